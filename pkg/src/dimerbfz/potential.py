"""Path algebra over a quiver, superpotentials, and rigidity certificates.

Paths are tuples of arrow ids composing left to right; elements of the path
algebra are maps path -> exact rational coefficient.  Cyclic equivalence is
decided by projecting closed paths onto their minimal rotation (necklace),
which quotients exactly by the span of all shift differences.

The certificate engine mirrors the constructive structure of the rigidity
argument: boundary faces follow from a single derivative, inner faces from
an already-certified neighbor across a shared edge, and larger single-sheet
cycles are reduced face by face through interior splitting edges.  Anything
the structural route cannot handle (multi-sheet cycles, non-simple
residuals) goes to an independent bounded-length linear-algebra oracle over
the Jacobian ideal.  Every certificate is replayed in exact arithmetic
before it is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import logging

from .cylinder import CylinderLayout, Face, boundary_arrows_of_sheet, point_strictly_inside
from .errors import CapError, ReplayError, ValidationError
from .quiver import Quiver

log = logging.getLogger("dimerbfz.potential")

Path = tuple[int, ...]


class PathContext:
    """Source/target bookkeeping for paths over a fixed quiver."""

    def __init__(self, quiver: Quiver):
        self.quiver = quiver
        self.src = {a.id: a.src for a in quiver.arrows}
        self.tgt = {a.id: a.tgt for a in quiver.arrows}
        self.arrow_ids = sorted(self.src)

    def is_composable(self, path: Path) -> bool:
        return all(self.tgt[a] == self.src[b] for a, b in zip(path, path[1:]))

    def path_source(self, path: Path) -> int:
        return self.src[path[0]]

    def path_target(self, path: Path) -> int:
        return self.tgt[path[-1]]

    def is_cycle(self, path: Path) -> bool:
        return bool(path) and self.is_composable(path) and self.path_source(path) == self.path_target(path)

    def check_cycle(self, path: Path) -> Path:
        path = tuple(path)
        if not self.is_cycle(path):
            raise ValidationError(f"arrow sequence {path} is not a cycle")
        return path

    def vertices_of_path(self, path: Path) -> list[int]:
        return [self.src[path[0]]] + [self.tgt[a] for a in path]


# -- path elements (dict path -> Fraction) ------------------------------------------


def pe_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for p, c in b.items():
        c2 = out.get(p, 0) + c
        if c2:
            out[p] = c2
        else:
            out.pop(p, None)
    return out


def pe_scale(a: dict, c) -> dict:
    c = Fraction(c)
    if not c:
        return {}
    return {p: k * c for p, k in a.items()}


def path_mul(prefix: Path, elem: dict, suffix: Path, ctx: PathContext) -> dict:
    """prefix . elem . suffix, dropping non-composable products."""
    out: dict = {}
    for p, c in elem.items():
        path = tuple(prefix) + p + tuple(suffix)
        if ctx.is_composable(path):
            c2 = out.get(path, 0) + c
            if c2:
                out[path] = c2
            else:
                out.pop(path, None)
    return out


def necklace(path: Path) -> Path:
    return min(path[i:] + path[:i] for i in range(len(path))) if path else path


def necklace_project(elem: dict) -> dict:
    out: dict = {}
    for p, c in elem.items():
        key = necklace(p)
        c2 = out.get(key, 0) + c
        if c2:
            out[key] = c2
        else:
            out.pop(key, None)
    return out


def cyclically_equal(a: dict, b: dict) -> bool:
    return necklace_project(a) == necklace_project(b)


# -- potentials ------------------------------------------------------------------------


@dataclass(frozen=True)
class Potential:
    """Integer combination of cycles, with an optional per-sheet split."""

    ctx: PathContext
    elem: dict
    by_sheet: dict = field(default_factory=dict)

    def __post_init__(self):
        for p in self.elem:
            self.ctx.check_cycle(p)

    def sheet(self, r: int) -> dict:
        return self.by_sheet.get(r, {})


def potential_from_cycles(ctx: PathContext, cycles) -> Potential:
    elem: dict = {}
    for path, coeff in cycles:
        elem = pe_add(elem, {ctx.check_cycle(path): Fraction(coeff)})
    return Potential(ctx, elem)


def superpotential(faces, ctx: PathContext) -> Potential:
    """Sum of clockwise face cycles minus anticlockwise ones."""
    elem: dict = {}
    by_sheet: dict = {}
    for f in faces:
        if not f.directed:
            raise ValidationError(f"face with arrows {f.arrows} is not an oriented cycle")
        cycle = ctx.check_cycle(f.arrows)
        coeff = Fraction(1 if f.orientation == "cw" else -1)
        term = {cycle: coeff}
        elem = pe_add(elem, term)
        by_sheet[f.sheet] = pe_add(by_sheet.get(f.sheet, {}), term)
    return Potential(ctx, elem, by_sheet)


def cyclic_derivative(elem: dict, a: int, ctx: PathContext) -> dict:
    out: dict = {}
    for cycle, coeff in elem.items():
        for i, e in enumerate(cycle):
            if e != a:
                continue
            rest = cycle[i + 1:] + cycle[:i]
            c2 = out.get(rest, 0) + coeff
            if c2:
                out[rest] = c2
            else:
                out.pop(rest, None)
    return out


def jacobian_generators(S: Potential) -> dict:
    """Nonzero cyclic derivatives, one per arrow, keyed by arrow id."""
    out = {}
    for a in S.ctx.arrow_ids:
        d = cyclic_derivative(S.elem, a, S.ctx)
        if d:
            out[a] = d
    return out


# -- certificates -------------------------------------------------------------------------


@dataclass(frozen=True)
class CertStep:
    kind: str  # "boundary" | "adjacent" | "split" | "oracle"
    edge: int | None = None
    face: Path | None = None
    target: Path | None = None
    residual: Path | None = None
    witness: tuple | None = None

    def to_json(self) -> dict:
        blob = {"kind": self.kind}
        if self.edge is not None:
            blob["edge"] = self.edge
        if self.face is not None:
            blob["face"] = list(self.face)
        if self.residual is not None:
            blob["residual"] = list(self.residual)
        if self.witness is not None:
            blob["witness"] = [
                {"left": list(p), "arrow": a, "right": list(q), "coeff": str(c)}
                for (p, a, q, c) in self.witness
            ]
        return blob


@dataclass(frozen=True)
class RigidityCertificate:
    cycle: Path
    steps: tuple
    verified: bool

    def to_json(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "steps": [s.to_json() for s in self.steps],
            "verified": self.verified,
        }


def face_distance(faces, boundary_arrow_ids) -> dict:
    """Index -> breadth-first distance from the sheet boundary, by shared edges."""
    boundary = set(boundary_arrow_ids)
    dist = {}
    frontier = []
    for i, f in enumerate(faces):
        if set(f.arrows) & boundary:
            dist[i] = 0
            frontier.append(i)
    while frontier:
        nxt = []
        for i in frontier:
            for j, g in enumerate(faces):
                if j in dist:
                    continue
                if set(faces[i].arrows) & set(g.arrows):
                    dist[j] = dist[i] + 1
                    nxt.append(j)
        frontier = nxt
    missing = [i for i in range(len(faces)) if i not in dist]
    if missing:
        raise ValidationError(f"faces {missing} unreachable from the sheet boundary")
    return dist


def _anchored(ctx: PathContext, cycle: Path) -> Path:
    verts = [ctx.src[a] for a in cycle]
    pivot = verts.index(min(verts))
    return cycle[pivot:] + cycle[:pivot]


def _derivative_terms(S_elem: dict, e: int, ctx: PathContext):
    d = cyclic_derivative(S_elem, e, ctx)
    return d, sorted(d.items())


def face_certificates(S_r: dict, faces, boundary_arrow_ids, ctx: PathContext) -> dict:
    """Certificates of Jacobian-ideal membership for every face of one sheet."""
    dist = face_distance(faces, boundary_arrow_ids)
    order = sorted(range(len(faces)), key=lambda i: (dist[i], i))
    certs: dict = {}
    for i in order:
        f = faces[i]
        cycle = ctx.check_cycle(f.arrows)
        if dist[i] == 0:
            step = _boundary_step(S_r, f, boundary_arrow_ids, ctx)
            steps = (step,)
        else:
            step = _adjacent_step(S_r, f, faces, dist, certs, ctx)
            prior = certs[step_face_index(step, faces)]
            steps = (step,) + prior.steps
        cert = RigidityCertificate(cycle, steps, verified=False)
        _replay_face_chain(cert, S_r, faces, ctx)
        certs[i] = RigidityCertificate(cycle, steps, verified=True)
    return certs


def step_face_index(step: CertStep, faces) -> int:
    for i, f in enumerate(faces):
        if tuple(f.arrows) == step.face:
            return i
    raise ReplayError("adjacent step references an unknown face")


def _boundary_step(S_r, f, boundary_arrow_ids, ctx) -> CertStep:
    for e in f.arrows:
        if e not in boundary_arrow_ids:
            continue
        d = cyclic_derivative(S_r, e, ctx)
        if len(d) == 1:
            return CertStep(kind="boundary", edge=e, target=tuple(f.arrows))
    raise ReplayError(f"no usable boundary edge for face {f.arrows}")


def _adjacent_step(S_r, f, faces, dist, certs, ctx) -> CertStep:
    candidates = []
    for j, g in enumerate(faces):
        if j not in certs or g is f:
            continue
        shared = sorted(set(f.arrows) & set(g.arrows))
        if shared:
            candidates.append((dist[j], j, shared[0]))
    if not candidates:
        raise ReplayError(f"face {f.arrows} has no certified neighbor")
    _, j, e = min(candidates)
    return CertStep(kind="adjacent", edge=e, face=tuple(faces[j].arrows), target=tuple(f.arrows))


def _replay_face_chain(cert: RigidityCertificate, S_r: dict, faces, ctx) -> None:
    """Check each face-chain step as an exact identity modulo rotation."""
    established = set()  # necklaces known to lie in the ideal
    for step in reversed(cert.steps):
        if step.kind == "boundary":
            e, target = step.edge, step.target
            d = cyclic_derivative(S_r, e, ctx)
            if len(d) != 1:
                raise ReplayError(f"derivative at {e} is not a single path")
            produced = path_mul((e,), d, (), ctx)
            if set(necklace_project(produced)) != {necklace(target)}:
                raise ReplayError(f"boundary identity fails at edge {e}")
            established.add(necklace(target))
        elif step.kind == "adjacent":
            e, helper, target = step.edge, step.face, step.target
            if necklace(helper) not in established:
                raise ReplayError("adjacent step used before its helper face")
            d = cyclic_derivative(S_r, e, ctx)
            produced = necklace_project(path_mul((e,), d, (), ctx))
            keys = set(produced)
            if keys != {necklace(helper), necklace(target)}:
                raise ReplayError(f"edge {e} does not join the two stated faces")
            established.add(necklace(target))
        else:
            raise ReplayError(f"unexpected step kind {step.kind} in face chain")
    if necklace(cert.cycle) not in established:
        raise ReplayError("face chain does not certify its own cycle")


# -- cycle enumeration -----------------------------------------------------------------


def simple_cycles(quiver: Quiver) -> list[Path]:
    """Vertex-simple directed cycles, anchored at their minimal vertex, sorted."""
    ctx = PathContext(quiver)
    adj: dict = {}
    for a in quiver.arrows:
        adj.setdefault(a.src, []).append((a.tgt, a.id))
    for lst in adj.values():
        lst.sort()
    out = []

    def dfs(anchor, v, path, visited):
        for (w, aid) in adj.get(v, ()):
            if w == anchor:
                out.append(tuple(path + [aid]))
            elif w > anchor and w not in visited:
                visited.add(w)
                dfs(anchor, w, path + [aid], visited)
                visited.remove(w)

    for anchor in sorted(v.id for v in quiver.vertices):
        dfs(anchor, anchor, [], {anchor})
    out.sort(key=lambda c: (len(c), c))
    return out


# -- geometric helpers for the structural route ---------------------------------------


class SheetGeometry:
    """Enclosure tests for cycles and faces drawn on one sheet."""

    def __init__(self, layout: CylinderLayout, sheet: int, faces, ctx: PathContext):
        self.layout = layout
        self.sheet = sheet
        self.coords = layout.sheet_coords(sheet)
        self.ctx = ctx
        self.faces = [f for f in faces if f.sheet == sheet]

    def polygon4(self, cycle: Path):
        verts = self.ctx.vertices_of_path(cycle)[:-1]
        return [(4 * self.coords[v][0], 4 * self.coords[v][1]) for v in verts]

    def face_interior_point4(self, f: Face):
        xs = sorted({self.coords[v][0] for v in f.vertices})
        if len(xs) != 2:
            raise ValidationError("face does not span two strings")
        x4 = 2 * (xs[0] + xs[1])
        crossings = []
        for a in f.arrows:
            x1, y1 = self.coords[self.ctx.src[a]]
            x2, y2 = self.coords[self.ctx.tgt[a]]
            if {x1, x2} == set(xs):
                crossings.append(2 * (y1 + y2))
        crossings.sort()
        if len(crossings) < 2:
            raise ValidationError("face has fewer than two inclined arrows")
        return (x4, (crossings[0] + crossings[1]) // 2)

    def enclosed_faces(self, cycle: Path):
        poly = self.polygon4(cycle)
        cycle_set = set(cycle)
        out = []
        for i, f in enumerate(self.faces):
            if set(f.arrows) <= cycle_set:
                out.append(i)
                continue
            pt = self.face_interior_point4(f)
            if point_strictly_inside(pt, poly):
                out.append(i)
        return out


def cycle_sheet(cycle: Path, ctx: PathContext, layout: CylinderLayout):
    """The unique sheet carrying the cycle's inclined arrows, or None if mixed."""
    deco = layout.decomposition
    sheets = set()
    for a in cycle:
        s, t = layout.string[ctx.src[a]], layout.string[ctx.tgt[a]]
        if s != t:
            sheets.add(deco.sheet_of_edge(s, t))
    if len(sheets) == 1:
        return sheets.pop()
    return None


def find_differentiable_edge(cycle: Path, geometry: SheetGeometry, enclosed):
    """An interior edge cutting a face off the cycle.

    Primary route per the planar structure: walk the right-most vertical run
    of the cycle and look for the inclined arrow returning to the vertex that
    entered it.  Falls back to scanning the enclosed faces for one with a
    single off-cycle edge.
    """
    ctx = geometry.ctx
    cycle_set = set(cycle)
    primary = _rightmost_run_edge(cycle, geometry)
    candidates = []
    for i in enclosed:
        f = geometry.faces[i]
        extra = set(f.arrows) - cycle_set
        if len(extra) == 1:
            candidates.append((extra.pop(), i))
    if primary is not None:
        for e, i in candidates:
            if e == primary:
                return e, i
        log.info("right-most-run edge %s not usable; falling back to face scan", primary)
    if candidates:
        return min(candidates, key=lambda t: (t[0], t[1]))
    return None


def _rightmost_run_edge(cycle: Path, geometry: SheetGeometry):
    ctx = geometry.ctx
    coords = geometry.coords
    verts = ctx.vertices_of_path(cycle)[:-1]
    xmax = max(coords[v][0] for v in verts)
    n = len(verts)
    run_vertices = [v for v in verts if coords[v][0] == xmax]
    if len(run_vertices) < 2:
        return None
    # entry vertex: predecessor (on the cycle) of the first run vertex of a run
    for i, v in enumerate(verts):
        if coords[v][0] != xmax:
            continue
        prev = verts[(i - 1) % n]
        if coords[prev][0] == xmax:
            continue
        # v starts a run entered from `prev`; scan the run for an arrow back to prev
        j = i
        while coords[verts[(j + 1) % n]][0] == xmax:
            j = (j + 1) % n
            for a in ctx.arrow_ids:
                if ctx.src[a] == verts[j] and ctx.tgt[a] == prev and a not in cycle:
                    return a
    return None


# -- brute-force membership oracle ------------------------------------------------------


@dataclass(frozen=True)
class Member:
    witness: tuple


@dataclass(frozen=True)
class NotMemberExact:
    pass


@dataclass(frozen=True)
class NotCertifiedWithinCap:
    pass


class BruteForceSolver:
    """Decides bounded-length membership in the Jacobian ideal modulo rotation."""

    def __init__(self, S: Potential, length_cap: int, max_basis: int = 200_000):
        self.S = S
        self.ctx = S.ctx
        self.length_cap = length_cap
        self.max_basis = max_basis
        self.generators = jacobian_generators(S)
        self.monomial = all(len(g) == 1 for g in self.generators.values())
        self._rows = None  # pivot necklace -> (row dict, provenance dict)
        self._columns = None

    def _all_paths(self, maxlen: int) -> list:
        """All composable paths of length 1..maxlen, in (length, path) order."""
        ctx = self.ctx
        adj: dict = {}
        for a in ctx.arrow_ids:
            adj.setdefault(ctx.src[a], []).append(a)
        for lst in adj.values():
            lst.sort()
        out = []
        current = [(a,) for a in ctx.arrow_ids]
        for _ in range(maxlen):
            out.extend(current)
            if len(out) > self.max_basis:
                raise CapError(
                    f"path basis exceeded {self.max_basis} elements at cap {self.length_cap}"
                )
            nxt = []
            for p in current:
                for a in adj.get(ctx.path_target(p), ()):
                    nxt.append(p + (a,))
            current = nxt
        return out

    def _build_columns(self):
        if self._columns is not None:
            return
        ctx = self.ctx
        budgets = {a: self.length_cap - max(len(t) for t in gen) for a, gen in self.generators.items()}
        max_budget = max((b for b in budgets.values() if b >= 0), default=-1)
        paths = self._all_paths(max_budget) if max_budget > 0 else []
        columns = []
        for a, gen in sorted(self.generators.items()):
            budget = budgets[a]
            if budget < 0:
                continue
            tv, sv = ctx.tgt[a], ctx.src[a]
            left_list = [()] + [p for p in paths if ctx.path_target(p) == tv and len(p) <= budget]
            right_list = [()] + [q for q in paths if ctx.path_source(q) == sv and len(q) <= budget]
            for p in left_list:
                for q in right_list:
                    if len(p) + len(q) > budget:
                        continue
                    start = ctx.path_source(p) if p else tv
                    end = ctx.path_target(q) if q else sv
                    if start != end:
                        continue
                    elem = path_mul(p, gen, q, ctx)
                    if not elem:
                        continue
                    vec = necklace_project(elem)
                    if vec:
                        columns.append(((p, a, q), vec))
            if len(columns) > self.max_basis:
                raise CapError(f"column count exceeded {self.max_basis}")
        self._columns = columns
        # incremental echelon over the necklace coordinates, tracking provenance
        rows: dict = {}
        for col_index, (_, vec) in enumerate(columns):
            row = dict(vec)
            prov = {col_index: Fraction(1)}
            self._insert(rows, row, prov)
        self._rows = rows

    @staticmethod
    def _insert(rows, row, prov):
        while row:
            pivot = min(row)
            if pivot not in rows:
                lead = row[pivot]
                rows[pivot] = (
                    {k: v / lead for k, v in row.items()},
                    {k: v / lead for k, v in prov.items()},
                )
                return
            base_row, base_prov = rows[pivot]
            factor = row[pivot]
            for k, v in base_row.items():
                nv = row.get(k, 0) - factor * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            for k, v in base_prov.items():
                nv = prov.get(k, 0) - factor * v
                if nv:
                    prov[k] = nv
                else:
                    prov.pop(k, None)

    def membership(self, cycle: Path):
        cycle = self.ctx.check_cycle(cycle)
        if len(cycle) > self.length_cap:
            raise ValidationError(
                f"cycle length {len(cycle)} exceeds the cap {self.length_cap}"
            )
        if self.monomial:
            return self._monomial_membership(cycle)
        self._build_columns()
        target = {necklace(cycle): Fraction(1)}
        combo: dict = {}
        row = dict(target)
        while row:
            pivot = min(row)
            if pivot not in self._rows:
                return NotCertifiedWithinCap()
            base_row, base_prov = self._rows[pivot]
            factor = row[pivot]
            for k, v in base_row.items():
                nv = row.get(k, 0) - factor * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            for k, v in base_prov.items():
                nv = combo.get(k, 0) + factor * v
                if nv:
                    combo[k] = nv
                else:
                    combo.pop(k, None)
        witness = tuple(
            (*self._columns[i][0], coeff) for i, coeff in sorted(combo.items())
        )
        self._verify_witness(cycle, witness)
        return Member(witness)

    def _monomial_membership(self, cycle: Path):
        rotations = [cycle[i:] + cycle[:i] for i in range(len(cycle))]
        for a, gen in sorted(self.generators.items()):
            (gpath, gcoeff), = gen.items()
            n = len(gpath)
            for rot in rotations:
                for i in range(len(rot) - n + 1):
                    if rot[i:i + n] == gpath:
                        p, q = rot[:i], rot[i + n:]
                        witness = ((p, a, q, Fraction(1) / gcoeff),)
                        self._verify_witness(cycle, witness)
                        return Member(witness)
        return NotMemberExact()

    def _verify_witness(self, cycle: Path, witness) -> None:
        total: dict = {}
        for (p, a, q, coeff) in witness:
            gen = self.generators[a]
            total = pe_add(total, pe_scale(path_mul(p, gen, q, self.ctx), coeff))
        if not cyclically_equal(total, {cycle: Fraction(1)}):
            raise ReplayError("oracle witness fails exact replay")


def brute_force_membership(cycle: Path, S: Potential, length_cap: int, max_basis: int = 200_000):
    """Member(witness) | NotMemberExact | NotCertifiedWithinCap for one cycle."""
    return BruteForceSolver(S, length_cap, max_basis).membership(cycle)


# -- rigidity ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RigidityReport:
    rigid: bool
    cycles: tuple
    certificates: dict
    failures: tuple
    oracle_only: int

    def to_json(self) -> dict:
        return {
            "rigid": self.rigid,
            "cycles_total": len(self.cycles),
            "certified": len(self.certificates),
            "oracle_only": self.oracle_only,
            "failures": [
                {"cycle": list(c), "reason": reason} for c, reason in self.failures
            ],
            "certificates": [
                self.certificates[c].to_json() for c in self.cycles if c in self.certificates
            ],
        }


def rigidity_check(
    quiver: Quiver,
    S: Potential,
    layout: CylinderLayout | None = None,
    faces=None,
    length_cap: int | None = None,
) -> RigidityReport:
    ctx = S.ctx
    cycles = simple_cycles(quiver)
    cap = length_cap if length_cap is not None else len(quiver.vertices)
    too_long = [c for c in cycles if len(c) > cap]
    if too_long:
        raise CapError(
            f"simple cycle of length {max(len(c) for c in too_long)} exceeds cap {cap}"
        )

    structural = None
    if layout is not None and faces is not None:
        structural = _StructuralEngine(S, layout, faces, ctx)

    max_face = max((len(p) for p in S.elem), default=0)
    solver_cap = max(cap, max_face) + max_face
    solvers: dict = {}

    def oracle(cycle):
        L = max(len(cycle), max_face)
        while True:
            solver = solvers.get(L)
            if solver is None:
                solver = solvers[L] = BruteForceSolver(S, L)
            result = solver.membership(cycle)
            if isinstance(result, NotCertifiedWithinCap) and L < solver_cap:
                L = min(L + 2, solver_cap)
                continue
            return result, L

    certificates: dict = {}
    failures = []
    oracle_only = 0
    for cycle in cycles:
        cert = None
        if structural is not None:
            cert = structural.certify(cycle)
        if cert is None:
            result, used_cap = oracle(cycle)
            if isinstance(result, Member):
                step = CertStep(kind="oracle", witness=result.witness)
                cert = RigidityCertificate(cycle, (step,), verified=True)
                oracle_only += 1
            elif isinstance(result, NotMemberExact):
                failures.append((cycle, "not in the Jacobian ideal (exact)"))
                continue
            else:
                failures.append((cycle, f"not certified within length cap {used_cap}"))
                continue
        certificates[cycle] = cert
    return RigidityReport(
        rigid=not failures,
        cycles=tuple(cycles),
        certificates=certificates,
        failures=tuple(failures),
        oracle_only=oracle_only,
    )


class _StructuralEngine:
    """Face-chain and face-splitting certification on a dimer layout."""

    def __init__(self, S: Potential, layout: CylinderLayout, faces, ctx: PathContext):
        self.S = S
        self.layout = layout
        self.ctx = ctx
        self.faces = list(faces)
        self.geometry = {}
        self.face_certs = {}
        for r in sorted({f.sheet for f in self.faces}):
            boundary = boundary_arrows_of_sheet(ctx.quiver, layout, r)
            sheet_faces = [f for f in self.faces if f.sheet == r]
            certs = face_certificates(S.sheet(r), sheet_faces, boundary, ctx)
            geo = SheetGeometry(layout, r, self.faces, ctx)
            self.geometry[r] = geo
            self.face_certs[r] = certs

    def certify(self, cycle: Path):
        r = cycle_sheet(cycle, self.ctx, self.layout)
        if r is None or r not in self.geometry:
            return None
        try:
            steps = self._certify_in_sheet(cycle, r, depth=0)
        except _StructuralMiss as miss:
            log.info("structural route failed for %s: %s", cycle, miss)
            return None
        cert = RigidityCertificate(_anchored(self.ctx, cycle), tuple(steps), verified=True)
        return cert

    def _certify_in_sheet(self, cycle: Path, r: int, depth: int):
        if depth > len(self.faces) + 2:
            raise _StructuralMiss("split recursion did not terminate")
        geo = self.geometry[r]
        verts = self.ctx.vertices_of_path(cycle)[:-1]
        if len(set(verts)) != len(verts):
            raise _StructuralMiss("residual cycle is not simple")
        enclosed = geo.enclosed_faces(cycle)
        if not enclosed:
            raise _StructuralMiss("cycle encloses no face")
        if len(enclosed) == 1:
            i = enclosed[0]
            face = geo.faces[i]
            if set(face.arrows) != set(cycle):
                raise _StructuralMiss("single enclosed face does not match the cycle")
            local_index = self._sheet_face_index(r, face)
            return list(self.face_certs[r][local_index].steps)
        found = find_differentiable_edge(cycle, geo, enclosed)
        if found is None:
            raise _StructuralMiss("no differentiable edge")
        e, i = found
        face = geo.faces[i]
        step, residual = self._split(cycle, e, face, r)
        # strict decrease of the enclosed-face count, verified before recursing
        verts = self.ctx.vertices_of_path(residual)[:-1]
        if len(set(verts)) == len(verts) and len(geo.enclosed_faces(residual)) >= len(enclosed):
            raise _StructuralMiss("face count did not decrease after split")
        rest = self._certify_in_sheet(residual, r, depth + 1)
        return [step] + rest

    def _sheet_face_index(self, r: int, face) -> int:
        sheet_faces = [f for f in self.faces if f.sheet == r]
        for i, f in enumerate(sheet_faces):
            if f is face or tuple(f.arrows) == tuple(face.arrows):
                return i
        raise _StructuralMiss("face missing from its sheet")

    def _split(self, cycle: Path, e: int, face, r: int):
        ctx = self.ctx
        fw = tuple(face.arrows)
        idx = fw.index(e)
        p_f = fw[idx + 1:] + fw[:idx]  # the face minus e, from tgt(e) to src(e)
        # rotate the cycle so it starts with p_f
        start = cycle.index(p_f[0])
        rot = cycle[start:] + cycle[:start]
        if rot[: len(p_f)] != p_f:
            raise _StructuralMiss("face complement is not contiguous on the cycle")
        tail = rot[len(p_f):]
        d = cyclic_derivative(self.S.sheet(r), e, ctx)
        if len(d) != 2 or p_f not in d:
            raise _StructuralMiss("splitting edge does not bound exactly two faces")
        (other_path, other_coeff), = [(p, c) for p, c in d.items() if p != p_f]
        residual = other_path + tail
        if not ctx.is_cycle(residual):
            raise _StructuralMiss("residual is not a cycle")
        step = CertStep(
            kind="split",
            edge=e,
            face=fw,
            target=_anchored(ctx, cycle),
            residual=_anchored(ctx, residual),
        )
        # replay: derivative . tail = c_f * rot + c_other * residual, exactly
        c_f = d[p_f]
        lhs = pe_add(pe_scale({rot: Fraction(1)}, c_f), pe_scale({residual: Fraction(1)}, other_coeff))
        rhs = path_mul((), d, tail, ctx)
        if lhs != rhs:
            raise ReplayError("split identity fails exact replay")
        return step, residual


class _StructuralMiss(Exception):
    pass
