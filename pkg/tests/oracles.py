"""Independent oracles used by the test suite.

Each oracle takes a route through the problem that is disjoint from the
implementation it checks: permutation groups for reduced words, exchange
matrices for quiver mutation, polygon containment for faces.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


# -- type A reduced words via permutations ------------------------------------

def perm_of_word(n_letters: int, word) -> tuple[int, ...]:
    """Compose adjacent transpositions s_i = (i, i+1) in S_{n_letters + 1}."""
    perm = list(range(n_letters + 1))
    for i in word:
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    return tuple(perm)


def inversions(perm) -> int:
    return sum(1 for a, b in combinations(range(len(perm)), 2) if perm[a] > perm[b])


def is_reduced_perm_oracle(n_letters: int, word) -> bool:
    return inversions(perm_of_word(n_letters, word)) == len(word)


# -- quiver mutation via exchange matrices ------------------------------------

def b_matrix(quiver) -> list[list[int]]:
    ids = [v.id for v in quiver.vertices]
    index = {v: i for i, v in enumerate(ids)}
    b = [[0] * len(ids) for _ in ids]
    for a in quiver.arrows:
        b[index[a.src]][index[a.tgt]] += 1
        b[index[a.tgt]][index[a.src]] -= 1
    return b


def mutate_b_matrix(b, k: int) -> list[list[int]]:
    """Classical matrix mutation at index k (0-based)."""
    n = len(b)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -b[i][j]
            else:
                sgn = 1 if b[i][k] > 0 else (-1 if b[i][k] < 0 else 0)
                out[i][j] = b[i][j] + sgn * max(b[i][k] * b[k][j], 0)
    return out


# -- faces via polygon containment ---------------------------------------------

def _signed_area2(points) -> Fraction:
    s = Fraction(0)
    for (x1, y1), (x2, y2) in zip(points, points[1:] + points[:1]):
        s += Fraction(x1) * y2 - Fraction(x2) * y1
    return s


def _point_in_polygon(pt, poly) -> bool:
    """Strict interior test by ray casting; poly vertices are exact rationals."""
    x, y = Fraction(pt[0]), Fraction(pt[1])
    inside = False
    n = len(poly)
    for i in range(n):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % n]
        x1, y1, x2, y2 = Fraction(x1), Fraction(y1), Fraction(x2), Fraction(y2)
        # on-boundary points are not interior
        if (y1 <= y < y2) or (y2 <= y < y1):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc == x:
                return False
            if xc > x:
                inside = not inside
        elif y1 == y == y2 and min(x1, x2) <= x <= max(x1, x2):
            return False
    return inside


def _on_segment(pt, a, b) -> bool:
    (x, y), (x1, y1), (x2, y2) = pt, a, b
    cross = (Fraction(x2) - x1) * (Fraction(y) - y1) - (Fraction(y2) - y1) * (Fraction(x) - x1)
    if cross != 0:
        return False
    return min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2)


def _undirected_simple_cycles(vertices, edges):
    """All simple cycles of an undirected multigraph, as tuples of edge indices.

    edges: list of (u, v).  Each cycle is canonicalized (min rotation of the
    vertex sequence over both directions) to dedupe.
    """
    adj = {v: [] for v in vertices}
    for idx, (u, v) in enumerate(edges):
        adj[u].append((v, idx))
        adj[v].append((u, idx))
    seen = set()
    cycles = []

    def canon(vs):
        best = None
        seqs = [vs, vs[::-1]]
        for s in seqs:
            for r in range(len(s)):
                rot = s[r:] + s[:r]
                if best is None or rot < best:
                    best = rot
        return tuple(best)

    def dfs(start, current, path_v, path_e, used_e):
        for (w, idx) in adj[current]:
            if idx in used_e:
                continue
            if w == start and len(path_v) >= 3:
                key = canon(path_v)
                if key not in seen:
                    seen.add(key)
                    cycles.append((tuple(path_v), tuple(path_e + [idx])))
                continue
            if w in path_v or w < start:
                continue
            dfs(start, w, path_v + [w], path_e + [idx], used_e | {idx})

    for s in sorted(vertices):
        dfs(s, s, [s], [], set())
    return cycles


def polygon_region_faces(vertices, coords, edges):
    """Bounded faces of a planar straight-line graph, by brute force.

    Keeps the simple cycles whose open polygon interior contains no vertex and
    no edge point.  Returns a set of frozensets of edge indices.
    """
    out = set()
    for path_v, path_e in _undirected_simple_cycles(vertices, edges):
        poly = [coords[v] for v in path_v]
        if _signed_area2(poly) == 0:
            continue
        ok = True
        for v in vertices:
            if v not in path_v and _point_in_polygon(coords[v], poly):
                ok = False
                break
        if ok:
            for idx, (u, w) in enumerate(edges):
                if idx in path_e:
                    continue
                mx = (Fraction(coords[u][0]) + coords[w][0]) / 2
                my = (Fraction(coords[u][1]) + coords[w][1]) / 2
                if _point_in_polygon((mx, my), poly):
                    ok = False
                    break
                # an edge not on the cycle may also cut through between midpoints
                qx = (Fraction(coords[u][0]) * 3 + coords[w][0]) / 4
                qy = (Fraction(coords[u][1]) * 3 + coords[w][1]) / 4
                if _point_in_polygon((qx, qy), poly):
                    ok = False
                    break
        if ok:
            out.add(frozenset(path_e))
    return out
