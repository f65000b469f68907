"""Cylinder realization: branches, layout, planarity, faces, dimer axioms.

The cylinder over a Dynkin tree is cut into sheets, one per branch (maximal
path between endpoints / branching points).  A quiver vertex at position k
sits on the string of its letter at height = the global ordinal of k, so
per-sheet coordinates are (x = string order along the branch, y = height)
and all geometry is exact integer arithmetic.

Faces are traced from the per-sheet rotation system (half-edge successor
walk over counterclockwise-sorted directions); bounded faces are the orbits
of positive signed area that contain no foreign vertex or arrow.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key

from .bfz import BfzQuiver
from .cartan import DynkinGraph
from .errors import UnsupportedDiagramError, ValidationError
from .quiver import Quiver


# -- branch decomposition ------------------------------------------------------


@dataclass(frozen=True)
class BranchDecomposition:
    graph: DynkinGraph
    special: tuple[int, ...]
    branches: tuple[tuple[int, ...], ...]  # vertex paths, one per sheet

    @property
    def sheet_count(self) -> int:
        return len(self.branches)

    def branch_lengths(self) -> tuple[int, ...]:
        return tuple(len(b) - 1 for b in self.branches)

    def strings_of_sheet(self, r: int) -> tuple[int, ...]:
        return self.branches[r]

    def sheet_of_edge(self, i: int, j: int) -> int:
        for r, path in enumerate(self.branches):
            for a, b in zip(path, path[1:]):
                if {a, b} == {i, j}:
                    return r
        raise ValidationError(f"edge {{{i},{j}}} lies on no branch")

    def sheets_of_string(self, s: int) -> tuple[int, ...]:
        return tuple(r for r, path in enumerate(self.branches) if s in path)


def branch_decompose(g: DynkinGraph) -> BranchDecomposition:
    n = g.rank
    if len(g.edges) != n - 1:
        raise UnsupportedDiagramError(
            f"diagram with {n} vertices and {len(g.edges)} edges is not a tree"
        )
    # connectivity check (trees have |E| = |V| - 1 and must be connected)
    seen = {1}
    stack = [1]
    while stack:
        v = stack.pop()
        for w in g.neighbors(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != n:
        raise UnsupportedDiagramError("diagram is disconnected")

    if n == 1:
        return BranchDecomposition(g, (1,), ((1,),))

    special = tuple(v for v in g.vertices if g.degree(v) != 2)
    branches = []
    visited_edges = set()
    for s in special:
        for w in g.neighbors(s):
            if (s, w) in visited_edges or (w, s) in visited_edges:
                continue
            path = [s, w]
            while g.degree(path[-1]) == 2 and path[-1] not in special:
                nxt = [u for u in g.neighbors(path[-1]) if u != path[-2]]
                path.append(nxt[0])
            for a, b in zip(path, path[1:]):
                visited_edges.add((a, b))
                visited_edges.add((b, a))
            if path[-1] < path[0]:
                path.reverse()
            branches.append(tuple(path))
    branches.sort()
    return BranchDecomposition(g, special, tuple(branches))


# -- layout ---------------------------------------------------------------------


@dataclass(frozen=True)
class CylinderLayout:
    string: dict  # vertex id -> Dynkin vertex
    height: dict  # vertex id -> global ordinal
    decomposition: BranchDecomposition

    def vertices_of_string(self, s: int) -> list[int]:
        return sorted((v for v, st in self.string.items() if st == s), key=self.height.get)

    def sheet_coords(self, r: int) -> dict:
        path = self.decomposition.strings_of_sheet(r)
        xs = {s: i for i, s in enumerate(path)}
        return {
            v: (xs[self.string[v]], self.height[v])
            for v in self.string
            if self.string[v] in xs
        }


def build_layout(q: BfzQuiver, decomposition: BranchDecomposition) -> CylinderLayout:
    w = q.word
    positions = w.positions()
    string = {k: w.letter(k) for k in positions}
    height = {k: i for i, k in enumerate(positions)}
    return CylinderLayout(string, height, decomposition)


# -- axiom checks ---------------------------------------------------------------


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    violations: tuple

    def to_json(self) -> dict:
        return {"pass": self.passed, "violations": list(self.violations)}


def check_arrow_projection(q: Quiver, layout: CylinderLayout) -> CheckReport:
    """Axiom (1): every arrow projects onto a Dynkin vertex or edge."""
    g = layout.decomposition.graph
    edges = {frozenset(e) for e in g.edges}
    bad = []
    for a in q.arrows:
        s, t = layout.string.get(a.src), layout.string.get(a.tgt)
        if s is None or t is None:
            bad.append(a.id)
        elif s != t and frozenset((s, t)) not in edges:
            bad.append(a.id)
    return CheckReport(not bad, tuple(bad))


def _segments_by_string_pair(q: Quiver, layout: CylinderLayout):
    g = layout.decomposition.graph
    edges = {frozenset(e) for e in g.edges}
    groups: dict = {}
    for a in q.arrows:
        s, t = layout.string.get(a.src), layout.string.get(a.tgt)
        if s is None or t is None or s == t:
            continue
        key = frozenset((s, t))
        if key not in edges:
            continue
        lo = min(s, t)
        h_lo = layout.height[a.src if layout.string[a.src] == lo else a.tgt]
        h_hi = layout.height[a.tgt if layout.string[a.src] == lo else a.src]
        groups.setdefault(key, []).append((a.id, h_lo, h_hi))
    return groups


def check_planarity_per_sheet(q: Quiver, layout: CylinderLayout) -> CheckReport:
    """Inclined arrows between the same adjacent strings must not cross."""
    bad = []
    for _, segs in sorted(_segments_by_string_pair(q, layout).items(), key=lambda kv: sorted(kv[0])):
        segs.sort()
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                id1, a1, b1 = segs[i]
                id2, a2, b2 = segs[j]
                if (a1 - a2) * (b1 - b2) < 0:
                    bad.append((id1, id2))
    return CheckReport(not bad, tuple(bad))


# -- faces ------------------------------------------------------------------------


@dataclass(frozen=True)
class Face:
    sheet: int
    vertices: tuple[int, ...]  # boundary walk, anchored at the minimal vertex
    arrows: tuple[int, ...]  # arrow ids along the walk
    forward: tuple[bool, ...]  # True where the walk follows the arrow direction
    directed: bool
    strings: tuple[int, ...]
    edge: tuple[int, int] | None
    orientation: str  # "cw" | "ccw"

    def to_json(self) -> dict:
        return {
            "arrows": list(self.arrows),
            "sheet": self.sheet,
            "edge": list(self.edge) if self.edge else None,
            "orientation": self.orientation,
        }


def _angle_cmp(u, v):
    def half(d):
        dx, dy = d
        return 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1

    hu, hv = half(u[0]), half(v[0])
    if hu != hv:
        return hu - hv
    cross = u[0][0] * v[0][1] - u[0][1] * v[0][0]
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return u[1] - v[1]


def _sheet_subquiver(q: Quiver, layout: CylinderLayout, r: int):
    path = layout.decomposition.strings_of_sheet(r)
    strings = set(path)
    adjacent = {frozenset(p) for p in zip(path, path[1:])}
    vids = [v for v in layout.string if layout.string[v] in strings and q.has_vertex(v)]
    arrows = []
    for a in q.arrows:
        s, t = layout.string.get(a.src), layout.string.get(a.tgt)
        if s in strings and t in strings and (s == t or frozenset((s, t)) in adjacent):
            arrows.append(a)
    return vids, arrows


def _trace_sheet_faces(vids, arrows, coords):
    # rotation system: departing half-edges sorted counterclockwise at each vertex
    departing: dict = {v: [] for v in vids}
    for a in arrows:
        departing[a.src].append((a.id, True))
        departing[a.tgt].append((a.id, False))
    arrow_by_id = {a.id: a for a in arrows}

    def other_end(h):
        aid, fwd = h
        a = arrow_by_id[aid]
        return a.tgt if fwd else a.src

    def origin(h):
        aid, fwd = h
        a = arrow_by_id[aid]
        return a.src if fwd else a.tgt

    rotation: dict = {}
    for v, hs in departing.items():
        decorated = []
        for h in hs:
            w = other_end(h)
            d = (coords[w][0] - coords[v][0], coords[w][1] - coords[v][1])
            decorated.append((d, h[0], h))
        decorated.sort(key=cmp_to_key(lambda p, q: _angle_cmp((p[0], p[1]), (q[0], q[1]))))
        rotation[v] = [h for _, _, h in decorated]

    def successor(h):
        # arrive at w; depart along the half-edge after the reverse of h
        w = other_end(h)
        rev = (h[0], not h[1])
        ring = rotation[w]
        return ring[(ring.index(rev) + 1) % len(ring)]

    seen = set()
    walks = []
    for v in sorted(vids):
        for start in rotation[v]:
            if start in seen:
                continue
            walk = []
            h = start
            while True:
                seen.add(h)
                walk.append(h)
                h = successor(h)
                if h == start:
                    break
            walks.append(walk)

    # bounded faces are the orbits traced clockwise (negative area) under the
    # ccw-rotation successor rule; the outer walk of a component is ccw
    faces = []
    for walk in walks:
        verts = [origin(h) for h in walk]
        pts = [coords[v] for v in verts]
        area2 = sum(x1 * y2 - x2 * y1 for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]))
        if area2 >= 0:
            continue
        faces.append((verts, walk, area2))
    return faces, walks


def point_strictly_inside(pt, poly2) -> bool:
    # exact ray casting with integer doubled coordinates
    x, y = pt
    inside = False
    n = len(poly2)
    for i in range(n):
        x1, y1 = poly2[i]
        x2, y2 = poly2[(i + 1) % n]
        if (y1 <= y < y2) or (y2 <= y < y1):
            # x-coordinate of the crossing, scaled by (y2 - y1)
            num = x1 * (y2 - y1) + (y - y1) * (x2 - x1)
            den = y2 - y1
            if num == x * den:
                return False
            if (num > x * den) == (den > 0):
                inside = not inside
        elif y1 == y == y2 and min(x1, x2) <= x <= max(x1, x2):
            return False
    return inside


def enumerate_faces(q: Quiver, layout: CylinderLayout) -> list[Face]:
    planarity = check_planarity_per_sheet(q, layout)
    if not planarity.passed:
        raise ValidationError(
            f"per-sheet planarity fails for arrow pairs {planarity.violations};"
            " see check_planarity_per_sheet"
        )
    g = layout.decomposition.graph
    dynkin_edges = {frozenset(e) for e in g.edges}
    arrow_dir = {a.id: (a.src, a.tgt) for a in q.arrows}
    out = []
    for r in range(layout.decomposition.sheet_count):
        vids, arrows = _sheet_subquiver(q, layout, r)
        if not arrows:
            continue
        coords = layout.sheet_coords(r)
        raw, _ = _trace_sheet_faces(vids, arrows, coords)
        arrow_ids_on_sheet = {a.id for a in arrows}
        for verts, walk, _area in raw:
            vert_set = set(verts)
            # reject regions that merely surround another component
            poly2 = [(2 * coords[v][0], 2 * coords[v][1]) for v in verts]
            foreign = False
            for v in vids:
                if v not in vert_set and point_strictly_inside(
                    (2 * coords[v][0], 2 * coords[v][1]), poly2
                ):
                    foreign = True
                    break
            if not foreign:
                walk_ids = {h[0] for h in walk}
                for a in arrows:
                    if a.id in walk_ids:
                        continue
                    mx = coords[a.src][0] + coords[a.tgt][0]
                    my = coords[a.src][1] + coords[a.tgt][1]
                    if point_strictly_inside((mx, my), poly2):
                        foreign = True
                        break
            if foreign:
                continue
            out.append(_make_face(r, verts, walk, arrow_dir, layout, dynkin_edges))
    out.sort(key=lambda f: (min(f.vertices), min(layout.height[v] for v in f.vertices), f.vertices))
    return out


def _make_face(sheet, verts, walk, arrow_dir, layout, dynkin_edges) -> Face:
    flags = [h[1] for h in walk]
    arrows = [h[0] for h in walk]
    if all(flags):
        directed = True
        orientation = "cw"  # traced walks are clockwise and follow the arrows
    elif not any(flags):
        # reverse so the walk follows the arrows; the polygon flips to ccw
        verts = [verts[0]] + verts[:0:-1]
        arrows = arrows[::-1]
        flags = [True] * len(flags)
        directed = True
        orientation = "ccw"
    else:
        directed = False
        orientation = "cw"
    # anchor at the minimal vertex
    pivot = verts.index(min(verts))
    verts = verts[pivot:] + verts[:pivot]
    arrows = arrows[pivot:] + arrows[:pivot]
    flags = flags[pivot:] + flags[:pivot]
    strings = tuple(sorted({layout.string[v] for v in verts}))
    edge = None
    if len(strings) == 2 and frozenset(strings) in dynkin_edges:
        edge = strings
    return Face(
        sheet=sheet,
        vertices=tuple(verts),
        arrows=tuple(arrows),
        forward=tuple(flags),
        directed=directed,
        strings=strings,
        edge=edge,
        orientation=orientation,
    )


def boundary_arrows_of_sheet(q: Quiver, layout: CylinderLayout, r: int) -> set:
    """Arrow ids of the sheet subquiver bordering its unbounded region."""
    vids, arrows = _sheet_subquiver(q, layout, r)
    if not arrows:
        return set()
    coords = layout.sheet_coords(r)
    _, walks = _trace_sheet_faces(vids, arrows, coords)
    arrow_by_id = {a.id: a for a in arrows}
    boundary = set()
    for walk in walks:
        pts = []
        for h in walk:
            a = arrow_by_id[h[0]]
            v = a.src if h[1] else a.tgt
            pts.append(coords[v])
        area2 = sum(x1 * y2 - x2 * y1 for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]))
        if area2 >= 0:
            boundary.update(h[0] for h in walk)
    return boundary


# -- aggregate dimer report ---------------------------------------------------------


@dataclass(frozen=True)
class DimerReport:
    arrow_projection: CheckReport
    face_projection: CheckReport
    face_orientation: CheckReport
    planarity: CheckReport
    faces: tuple[Face, ...]

    @property
    def passed(self) -> bool:
        return (
            self.arrow_projection.passed
            and self.face_projection.passed
            and self.face_orientation.passed
            and self.planarity.passed
        )

    def to_json(self) -> dict:
        return {
            "arrow_projection": self.arrow_projection.to_json(),
            "face_projection": self.face_projection.to_json(),
            "face_orientation": self.face_orientation.to_json(),
            "planarity": self.planarity.to_json(),
            "faces": [f.to_json() for f in self.faces],
        }


def check_dimer(q: Quiver, layout: CylinderLayout) -> DimerReport:
    arrow_rep = check_arrow_projection(q, layout)
    planarity = check_planarity_per_sheet(q, layout)
    if not planarity.passed:
        fail = CheckReport(False, planarity.violations)
        return DimerReport(arrow_rep, fail, fail, planarity, ())
    faces = tuple(enumerate_faces(q, layout))
    bad_projection = tuple(list(f.arrows) for f in faces if f.edge is None)
    bad_orientation = tuple(list(f.arrows) for f in faces if not f.directed)
    return DimerReport(
        arrow_projection=arrow_rep,
        face_projection=CheckReport(not bad_projection, bad_projection),
        face_orientation=CheckReport(not bad_orientation, bad_orientation),
        planarity=planarity,
        faces=faces,
    )
