"""Quivers, seeds with exact rational-function variables, and mutation.

Mutation at a mutable vertex k:
  1. reverse every arrow incident to k;
  2. for every path i -> k -> j present after step 1, add one arrow j -> i
     per pair of arrows (skipping pairs of frozen endpoints);
  3. cancel opposite arrow pairs maximally;
  4. replace x_k by (prod over arrows out of k + prod over arrows into k) / x_k,
     with products taken in the quiver before mutation and empty products = 1.

Quiver equality ignores arrow ids: two quivers are equal when their vertex
records and their multisets of (src, tgt) pairs agree.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import ValidationError
from .ratfunc import Poly, RationalFunction, ratfun_str


@dataclass(frozen=True)
class Vertex:
    id: int
    frozen: bool = False
    label: str | None = None


@dataclass(frozen=True)
class Arrow:
    id: int
    src: int
    tgt: int


class Quiver:
    """Directed multigraph without loops or 2-cycles."""

    __slots__ = ("vertices", "arrows", "_by_id")

    def __init__(self, vertices, arrows):
        verts = []
        for v in vertices:
            if isinstance(v, Vertex):
                verts.append(v)
            elif isinstance(v, int):
                verts.append(Vertex(v))
            else:
                raise ValidationError(f"bad vertex spec {v!r}")
        verts.sort(key=lambda v: v.id)
        ids = [v.id for v in verts]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate vertex ids")
        by_id = {v.id: v for v in verts}

        raw = []
        explicit_ids = []
        for a in arrows:
            if isinstance(a, Arrow):
                raw.append((a.src, a.tgt))
                explicit_ids.append(a.id)
            elif len(a) == 3:
                aid, src, tgt = a
                raw.append((src, tgt))
                explicit_ids.append(aid)
            else:
                src, tgt = a
                raw.append((src, tgt))
                explicit_ids.append(None)
        if any(i is None for i in explicit_ids):
            if not all(i is None for i in explicit_ids):
                raise ValidationError("either all arrows carry ids or none do")
            explicit_ids = list(range(len(raw)))
        if len(set(explicit_ids)) != len(explicit_ids):
            raise ValidationError("duplicate arrow ids")
        for (src, tgt), aid in zip(raw, explicit_ids):
            if src not in by_id or tgt not in by_id:
                raise ValidationError(f"arrow {aid} references unknown vertex")
            if src == tgt:
                raise ValidationError(f"arrow {aid} is a loop at vertex {src}")

        kept = _cancel_two_cycles(list(zip(explicit_ids, raw)))
        self.vertices = tuple(verts)
        self.arrows = tuple(Arrow(aid, src, tgt) for aid, (src, tgt) in sorted(kept))
        self._by_id = by_id

    # -- accessors --------------------------------------------------------

    def vertex(self, vid: int) -> Vertex:
        try:
            return self._by_id[vid]
        except KeyError:
            raise ValidationError(f"no vertex {vid}") from None

    def has_vertex(self, vid: int) -> bool:
        return vid in self._by_id

    def vertex_ids(self):
        return [v.id for v in self.vertices]

    def arrow(self, aid: int) -> Arrow:
        for a in self.arrows:
            if a.id == aid:
                return a
        raise ValidationError(f"no arrow {aid}")

    def arrows_at(self, vid: int):
        return [a for a in self.arrows if vid in (a.src, a.tgt)]

    def pair_multiset(self) -> Counter:
        return Counter((a.src, a.tgt) for a in self.arrows)

    def __eq__(self, other):
        return (
            isinstance(other, Quiver)
            and self.vertices == other.vertices
            and self.pair_multiset() == other.pair_multiset()
        )

    def __hash__(self):
        return hash((self.vertices, frozenset(self.pair_multiset().items())))

    def __repr__(self):
        pairs = ", ".join(f"{a.src}->{a.tgt}" for a in self.arrows)
        return f"Quiver({len(self.vertices)} vertices; {pairs})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        verts = []
        for v in self.vertices:
            rec = {"id": v.id, "frozen": v.frozen}
            if v.label is not None:
                rec["label"] = v.label
            verts.append(rec)
        return {
            "vertices": verts,
            "arrows": [{"id": a.id, "src": a.src, "tgt": a.tgt} for a in self.arrows],
        }

    @staticmethod
    def from_json(data: dict) -> "Quiver":
        try:
            verts = [
                Vertex(int(v["id"]), bool(v.get("frozen", False)), v.get("label"))
                for v in data["vertices"]
            ]
            arrows = [(int(a["id"]), int(a["src"]), int(a["tgt"])) for a in data["arrows"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed quiver JSON: {exc}") from exc
        return Quiver(verts, arrows)


def _cancel_two_cycles(arrows):
    """arrows: list of (id, (src, tgt)); drop opposite pairs, highest ids first."""
    by_pair: dict = {}
    for aid, pair in arrows:
        by_pair.setdefault(pair, []).append(aid)
    for ids in by_pair.values():
        ids.sort()
    kept = []
    for (src, tgt), ids in sorted(by_pair.items()):
        opp = by_pair.get((tgt, src), [])
        if src > tgt and opp:
            continue  # handled from the opposite side
        n = min(len(ids), len(opp))
        kept.extend((aid, (src, tgt)) for aid in ids[: len(ids) - n])
        kept.extend((aid, (tgt, src)) for aid in opp[: len(opp) - n])
    return kept


def mutate_quiver(q: Quiver, k: int) -> Quiver:
    v = q.vertex(k)
    if v.frozen:
        raise ValidationError(f"vertex {k} is frozen")
    frozen = {w.id for w in q.vertices if w.frozen}
    step1 = []
    for a in q.arrows:
        if k in (a.src, a.tgt):
            step1.append((a.id, a.tgt, a.src))
        else:
            step1.append((a.id, a.src, a.tgt))
    next_id = max((a.id for a in q.arrows), default=-1) + 1
    ins = [(aid, src) for aid, src, tgt in step1 if tgt == k]
    outs = [(aid, tgt) for aid, src, tgt in step1 if src == k]
    new = []
    for _, i in sorted(ins):
        for _, j in sorted(outs):
            if i in frozen and j in frozen:
                continue
            if i == j:
                raise ValidationError("mutation would create a loop; input had a 2-cycle")
            new.append((next_id, j, i))
            next_id += 1
    arrows = [(aid, src, tgt) for aid, src, tgt in step1] + [(aid, s, t) for aid, s, t in new]
    return Quiver(q.vertices, arrows)


class Seed:
    """A quiver with one exact rational function per vertex."""

    __slots__ = ("quiver", "variables")

    def __init__(self, quiver: Quiver, variables: dict):
        missing = [v.id for v in quiver.vertices if v.id not in variables]
        if missing:
            raise ValidationError(f"variables missing for vertices {missing}")
        self.quiver = quiver
        self.variables = {v.id: variables[v.id] for v in quiver.vertices}

    @staticmethod
    def initial(quiver: Quiver) -> "Seed":
        ids = quiver.vertex_ids()
        n = len(ids)
        return Seed(quiver, {vid: RationalFunction.generator(n, i) for i, vid in enumerate(ids)})

    def __eq__(self, other):
        return (
            isinstance(other, Seed)
            and self.quiver == other.quiver
            and self.variables == other.variables
        )

    def __hash__(self):
        return hash((self.quiver, tuple(sorted(self.variables.items(), key=lambda kv: kv[0]))))

    def variable_names(self) -> dict:
        return {v.id: f"x_{v.id}" for v in self.quiver.vertices}

    def variable_strings(self) -> dict:
        ids = self.quiver.vertex_ids()
        names = [f"x_{vid}" for vid in ids]
        return {vid: ratfun_str(self.variables[vid], names) for vid in ids}


def mutate_seed(s: Seed, k: int) -> Seed:
    q = s.quiver
    new_quiver = mutate_quiver(q, k)  # also validates k
    nvars = len(q.vertices)
    out_prod = RationalFunction.constant(nvars, 1)
    in_prod = RationalFunction.constant(nvars, 1)
    for a in q.arrows:
        if a.src == k:
            out_prod = out_prod * s.variables[a.tgt]
        elif a.tgt == k:
            in_prod = in_prod * s.variables[a.src]
    new_var = (out_prod + in_prod) / s.variables[k]
    variables = dict(s.variables)
    variables[k] = new_var
    return Seed(new_quiver, variables)


def is_two_acyclic(q: Quiver) -> bool:
    pairs = q.pair_multiset()
    return not any((t, s) in pairs for (s, t) in pairs)
