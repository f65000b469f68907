"""Quivers from shuffled reduced words on a double Weyl-group copy.

Positions are indexed [-r..-1] + [1..m]; the prefix carries the letters
-r..-1 in order, positions >= 1 come from shuffling a reduced word for u
(negated letters) with a reduced word for v (positive letters).

The successor k+ of a position is the next position with the same absolute
letter.  The public successor uses the uniform sentinel m+1.  Arrow
construction, however, resolves successor ties past the end of the word by
per-letter virtual positions (letter c continues at m + c with negative
sign, mirroring the fixed prefix); this reproduces the worked type-A
examples exactly, frozen boundary arrows included.

Arrow rules for positions k < l:
  horizontal  l = k+              directed k -> l iff sign(i_l) = +1
  inclined    letters adjacent and  (l < k+ < l+ and sign(i_l) = sign(i_{k+}))
                                or  (l < l+ < k+ and sign(i_l) = -sign(i_{l+}))
              directed k -> l iff sign(i_l) = -1
"""

from __future__ import annotations

from dataclasses import dataclass

from .cartan import GeneralizedCartanMatrix, is_reduced
from .errors import ValidationError
from .quiver import Quiver, Vertex


@dataclass(frozen=True)
class ShuffledWord:
    rank: int
    word: tuple[int, ...]  # signed letters at positions 1..m

    def __post_init__(self):
        for x in self.word:
            if x == 0 or abs(x) > self.rank:
                raise ValidationError(f"signed letter {x} out of range for rank {self.rank}")

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def sentinel(self) -> int:
        return self.length + 1

    def positions(self) -> list[int]:
        return list(range(-self.rank, 0)) + list(range(1, self.length + 1))

    def entry(self, k: int) -> int:
        """The signed letter i_k."""
        if -self.rank <= k <= -1:
            return k
        if 1 <= k <= self.length:
            return self.word[k - 1]
        raise ValidationError(f"position {k} out of range")

    def letter(self, k: int) -> int:
        return abs(self.entry(k))

    def sign(self, k: int) -> int:
        return 1 if self.entry(k) > 0 else -1

    def u_word(self) -> tuple[int, ...]:
        return tuple(-x for x in self.word if x < 0)

    def v_word(self) -> tuple[int, ...]:
        return tuple(x for x in self.word if x > 0)


def build_shuffle(A: GeneralizedCartanMatrix, u, v, interleaving=None) -> ShuffledWord:
    """Shuffle reduced words for u and v; 0 consumes from u, 1 from v."""
    u = tuple(int(x) for x in u)
    v = tuple(int(x) for x in v)
    if not is_reduced(A, u):
        raise ValidationError(f"u word {u} is not reduced")
    if not is_reduced(A, v):
        raise ValidationError(f"v word {v} is not reduced")
    if interleaving is None:
        interleaving = (0,) * len(u) + (1,) * len(v)
    interleaving = tuple(int(b) for b in interleaving)
    if len(interleaving) != len(u) + len(v):
        raise ValidationError(
            f"interleaving length {len(interleaving)} != l(u)+l(v) = {len(u) + len(v)}"
        )
    if sum(interleaving) != len(v) or any(b not in (0, 1) for b in interleaving):
        raise ValidationError("interleaving must contain l(u) zeros and l(v) ones")
    ui, vi = iter(u), iter(v)
    word = tuple(next(vi) if b else -next(ui) for b in interleaving)
    return ShuffledWord(A.rank, word)


def k_plus(w: ShuffledWord, k: int) -> int:
    """Next position with the same absolute letter, else the sentinel m+1."""
    letter = w.letter(k)
    for l in range(k + 1, 0) if k < -1 else []:
        if abs(w.entry(l)) == letter:
            return l
    start = 1 if k < 0 else k + 1
    for l in range(start, w.length + 1):
        if abs(w.word[l - 1]) == letter:
            return l
    return w.sentinel


def is_exchangeable(w: ShuffledWord, k: int) -> bool:
    return k_plus(w, k) <= w.length


def exchangeable_positions(w: ShuffledWord) -> list[int]:
    return [k for k in w.positions() if is_exchangeable(w, k)]


def _succ_virtual(w: ShuffledWord, k: int) -> int:
    """Successor with per-letter virtual positions past the end of the word."""
    p = k_plus(w, k)
    return p if p <= w.length else w.length + w.letter(k)


def _sign_virtual(w: ShuffledWord, p: int) -> int:
    return w.sign(p) if p <= w.length else -1


@dataclass(frozen=True)
class BfzQuiver:
    quiver: Quiver
    word: ShuffledWord
    kinds: dict  # arrow id -> "horizontal" | "inclined"

    def letter(self, vid: int) -> int:
        return self.word.letter(vid)

    def to_json(self) -> dict:
        base = self.quiver.to_json()
        for rec in base["vertices"]:
            k = rec["id"]
            rec["letter"] = self.word.letter(k)
            rec["position"] = k
            rec["exchangeable"] = not rec["frozen"]
        for rec in base["arrows"]:
            rec["kind"] = self.kinds[rec["id"]]
        return base


def build_bfz_quiver(A: GeneralizedCartanMatrix, w: ShuffledWord) -> BfzQuiver:
    if w.rank != A.rank:
        raise ValidationError(f"word rank {w.rank} != matrix rank {A.rank}")
    positions = w.positions()
    exchangeable = set(exchangeable_positions(w))
    vertices = [Vertex(k, frozen=k not in exchangeable, label=str(w.letter(k))) for k in positions]

    horizontal = []
    inclined = []
    succ = {k: _succ_virtual(w, k) for k in positions}
    for idx, k in enumerate(positions):
        for l in positions[idx + 1:]:
            if w.letter(k) == w.letter(l):
                if succ[k] == l:
                    pair = (k, l) if w.sign(l) == 1 else (l, k)
                    horizontal.append(pair)
                continue
            if A.entry(w.letter(k), w.letter(l)) >= 0:
                continue
            kp, lp = succ[k], succ[l]
            cond1 = l < kp < lp and w.sign(l) == _sign_virtual(w, kp)
            cond2 = l < lp < kp and w.sign(l) == -_sign_virtual(w, lp)
            if cond1 or cond2:
                pair = (k, l) if w.sign(l) == -1 else (l, k)
                inclined.append(pair)

    arrows = [(i, s, t) for i, (s, t) in enumerate(horizontal + inclined)]
    kinds = {i: ("horizontal" if i < len(horizontal) else "inclined") for i, _ in enumerate(arrows)}
    return BfzQuiver(Quiver(vertices, arrows), w, kinds)
