"""Symmetric generalized Cartan matrices, Dynkin graphs and Weyl words.

Root-lattice vectors are plain tuples of Python ints (arbitrary precision),
written in the simple-root basis.  A simple reflection acts by

    s_i(v)_i = v_i - sum_j a_{ij} v_j,      s_i(v)_j = v_j  for j != i.

A word is reduced iff no prefix sends the next simple root to a negative
vector; this criterion works uniformly for all Kac-Moody types.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapError, ValidationError

Vector = tuple[int, ...]
Word = tuple[int, ...]


@dataclass(frozen=True)
class GeneralizedCartanMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n == 0:
            raise ValidationError("empty Cartan matrix")
        for i, row in enumerate(self.entries):
            if len(row) != n:
                raise ValidationError(f"row {i + 1} has length {len(row)}, expected {n}")
        for i in range(n):
            if self.entries[i][i] != 2:
                raise ValidationError(f"diagonal entry a[{i + 1}][{i + 1}] = {self.entries[i][i]}, expected 2")
            for j in range(n):
                if i != j and self.entries[i][j] > 0:
                    raise ValidationError(f"off-diagonal entry a[{i + 1}][{j + 1}] = {self.entries[i][j]} is positive")
                if self.entries[i][j] != self.entries[j][i]:
                    raise ValidationError(
                        f"matrix is not symmetric at a[{i + 1}][{j + 1}] = {self.entries[i][j]},"
                        f" a[{j + 1}][{i + 1}] = {self.entries[j][i]}"
                    )

    @property
    def rank(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> int:
        """Entry a_{ij} with 1-based vertex indices."""
        return self.entries[i - 1][j - 1]

    def adjacent(self, i: int, j: int) -> bool:
        return i != j and self.entry(i, j) < 0

    def dynkin_graph(self) -> "DynkinGraph":
        edges = tuple(
            (i, j)
            for i in range(1, self.rank + 1)
            for j in range(i + 1, self.rank + 1)
            if self.entry(i, j) < 0
        )
        return DynkinGraph(self.rank, edges)


@dataclass(frozen=True)
class DynkinGraph:
    """Simple graph on vertices 1..rank with an edge where a_{ij} < 0."""

    rank: int
    edges: tuple[tuple[int, int], ...]

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = []
        for i, j in self.edges:
            if i == v:
                out.append(j)
            elif j == v:
                out.append(i)
        return tuple(sorted(out))

    @property
    def vertices(self) -> range:
        return range(1, self.rank + 1)


def _path_matrix(n: int) -> list[list[int]]:
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = 2
    for i in range(n - 1):
        m[i][i + 1] = m[i + 1][i] = -1
    return m


def _named_matrix(name: str) -> list[list[int]]:
    kind, num = name[0].upper(), name[1:]
    if not num.isdigit():
        raise ValidationError(f"unrecognized type name {name!r}")
    n = int(num)
    if kind == "A":
        if n < 1:
            raise ValidationError("type A requires rank >= 1")
        return _path_matrix(n)
    if kind == "D":
        if n < 4:
            raise ValidationError("type D requires rank >= 4")
        # chain 1..n-2, with n-1 and n both attached to n-2
        m = _path_matrix(n)
        m[n - 2][n - 1] = m[n - 1][n - 2] = 0
        m[n - 3][n - 1] = m[n - 1][n - 3] = -1
        return m
    if kind == "E":
        if n not in (6, 7, 8):
            raise ValidationError("type E exists for ranks 6, 7, 8 only")
        # chain 1-3-4-...-n, with 2 attached to 4 (Bourbaki labels)
        m = [[0] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = 2
        chain = [1, 3] + list(range(4, n + 1))
        for a, b in zip(chain, chain[1:]):
            m[a - 1][b - 1] = m[b - 1][a - 1] = -1
        m[1][3] = m[3][1] = -1
        return m
    raise ValidationError(f"unrecognized type name {name!r}")


def build_gcm(spec) -> GeneralizedCartanMatrix:
    """Build a GCM from a type name ("A3", "D4", "E7") or an explicit matrix."""
    if isinstance(spec, GeneralizedCartanMatrix):
        return spec
    if isinstance(spec, str):
        rows = _named_matrix(spec.strip())
    else:
        rows = spec
    try:
        entries = tuple(tuple(int(x) for x in row) for row in rows)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix entries must be integers: {exc}") from exc
    return GeneralizedCartanMatrix(entries)


def reflect(A: GeneralizedCartanMatrix, i: int, v) -> Vector:
    """Apply the simple reflection s_i to a root-lattice vector."""
    r = A.rank
    if not 1 <= i <= r:
        raise ValidationError(f"reflection index {i} out of range 1..{r}")
    v = tuple(int(x) for x in v)
    if len(v) != r:
        raise ValidationError(f"vector has length {len(v)}, expected {r}")
    pairing = sum(A.entry(i, j + 1) * v[j] for j in range(r))
    return v[:i - 1] + (v[i - 1] - pairing,) + v[i:]


def simple_root(A: GeneralizedCartanMatrix, i: int) -> Vector:
    return tuple(1 if j == i - 1 else 0 for j in range(A.rank))


def _check_letters(A: GeneralizedCartanMatrix, word) -> Word:
    word = tuple(int(x) for x in word)
    for x in word:
        if not 1 <= x <= A.rank:
            raise ValidationError(f"letter {x} out of range 1..{A.rank}")
    return word


def is_reduced(A: GeneralizedCartanMatrix, word) -> bool:
    """Prefix test: reduced iff every prefix keeps the next simple root positive."""
    word = _check_letters(A, word)
    for k in range(len(word)):
        v = simple_root(A, word[k])
        for t in range(k - 1, -1, -1):
            v = reflect(A, word[t], v)
        if any(c < 0 for c in v):
            return False
    return True


class _Element:
    """Weyl group element, identified by its action on the simple roots."""

    __slots__ = ("cols",)

    def __init__(self, cols):
        self.cols = cols  # cols[i] = w(alpha_{i+1})

    @staticmethod
    def identity(rank: int) -> "_Element":
        return _Element(tuple(simple_root_raw(rank, i + 1) for i in range(rank)))

    def right_multiply(self, A: GeneralizedCartanMatrix, i: int) -> "_Element":
        # (w s_i)(alpha_j) = w(alpha_j) - a_{ij} w(alpha_i)
        ci = self.cols[i - 1]
        new_cols = []
        for j in range(A.rank):
            a = A.entry(i, j + 1)
            if a == 0:
                new_cols.append(self.cols[j])
            else:
                new_cols.append(tuple(x - a * y for x, y in zip(self.cols[j], ci)))
        return _Element(tuple(new_cols))

    def extends_reduced(self, i: int) -> bool:
        return all(c >= 0 for c in self.cols[i - 1])


def simple_root_raw(rank: int, i: int) -> Vector:
    return tuple(1 if j == i - 1 else 0 for j in range(rank))


def enumerate_weyl(A: GeneralizedCartanMatrix, max_len: int, max_elements: int = 200_000) -> list[Word]:
    """One lexicographically-least reduced word per group element of length <= max_len.

    Raises CapError once more than max_elements distinct elements appear;
    Kac-Moody Weyl groups may be infinite.
    """
    if max_len < 0:
        raise ValidationError("max_len must be >= 0")
    rank = A.rank
    identity = _Element.identity(rank)
    seen = {identity.cols: ()}
    out: list[Word] = [()]
    level = [((), identity)]
    for _ in range(max_len):
        nxt = []
        for word, elt in level:
            for i in range(1, rank + 1):
                if not elt.extends_reduced(i):
                    continue
                new = elt.right_multiply(A, i)
                if new.cols in seen:
                    continue
                if len(seen) >= max_elements:
                    raise CapError(f"more than {max_elements} Weyl group elements; raise max_elements")
                w = word + (i,)
                seen[new.cols] = w
                out.append(w)
                nxt.append((w, new))
        level = nxt
        if not level:
            break
    return out
