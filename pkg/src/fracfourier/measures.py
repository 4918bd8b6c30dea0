"""Self-similar measures on the line with exact rational arithmetic.

A system is a finite list of orientation-preserving contractions
S_a(x) = r_a x + d_a together with a probability vector.  The invariant
measure mu is the unique fixed point of mu = sum_a p_a (S_a)_* mu.
Everything here is exact: ratios, translations and probabilities are
Fractions, word compositions are folded without rounding, and interval
masses come back as rational enclosures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BudgetExceededError, ValidationError

Word = tuple[int, ...]


def _as_fraction(x, what: str) -> Fraction:
    try:
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot interpret {what}={x!r} as a rational") from exc


@dataclass(frozen=True)
class SimilarityMap:
    """x -> ratio*x + translation with 0 < ratio < 1."""

    ratio: Fraction
    translation: Fraction

    def __post_init__(self):
        if not (0 < self.ratio < 1):
            raise ValidationError(f"contraction ratio must lie in (0,1), got {self.ratio}")

    def __call__(self, x: Fraction) -> Fraction:
        return self.ratio * x + self.translation

    def compose(self, inner: "SimilarityMap") -> "SimilarityMap":
        # (self o inner)(x) = r_s (r_i x + d_i) + d_s
        return SimilarityMap(self.ratio * inner.ratio,
                             self.ratio * inner.translation + self.translation)

    def image(self, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
        return (self(lo), self(hi))


@dataclass(frozen=True)
class SelfSimilarIFS:
    """Contractions plus exact probabilities summing to one."""

    maps: tuple[SimilarityMap, ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.maps) == 0:
            raise ValidationError("a system needs at least one map")
        if len(self.maps) != len(self.probs):
            raise ValidationError("maps and probabilities must have equal length")
        for p in self.probs:
            if p <= 0:
                raise ValidationError(f"probabilities must be positive, got {p}")
        if sum(self.probs) != 1:
            raise ValidationError(f"probabilities must sum to 1, got {sum(self.probs)}")

    @property
    def arity(self) -> int:
        return len(self.maps)

    def attractor_hull(self) -> tuple[Fraction, Fraction]:
        """Smallest interval containing the attractor.

        For increasing affine maps the extremes are the fixed points of
        the maps with extremal d/(1-r).
        """
        lo = min(m.translation / (1 - m.ratio) for m in self.maps)
        hi = max(m.translation / (1 - m.ratio) for m in self.maps)
        return (lo, hi)

    def mean(self) -> Fraction:
        """Exact barycenter: E[X] = sum p_a (r_a E[X] + d_a)."""
        rbar = sum(p * m.ratio for p, m in zip(self.probs, self.maps))
        dbar = sum(p * m.translation for p, m in zip(self.probs, self.maps))
        return dbar / (1 - rbar)

    def second_moment(self) -> Fraction:
        """Exact E[X^2] from E[X^2] = sum p_a E[(r_a X + d_a)^2]."""
        m1 = self.mean()
        r2 = sum(p * m.ratio ** 2 for p, m in zip(self.probs, self.maps))
        cross = sum(p * (2 * m.ratio * m.translation * m1 + m.translation ** 2)
                    for p, m in zip(self.probs, self.maps))
        return cross / (1 - r2)

    def variance(self) -> Fraction:
        return self.second_moment() - self.mean() ** 2

    def is_homogeneous(self) -> bool:
        return len({m.ratio for m in self.maps}) == 1

    def digit_view(self) -> tuple[int, tuple[Fraction, ...]] | None:
        """If every map is x -> (x+d)/b for an integer b, return (b, digits).

        Digits are the numerators d = b*translation, possibly non-integer
        rationals in [0, b-1].
        """
        if not self.is_homogeneous():
            return None
        r = self.maps[0].ratio
        if r.numerator != 1:
            return None
        b = r.denominator
        digits = tuple(m.translation * b for m in self.maps)
        if any(d < 0 or d > b - 1 for d in digits):
            return None
        return (b, digits)

    def to_json_dict(self) -> dict:
        return {
            "maps": [{"ratio": str(m.ratio), "translation": str(m.translation)}
                     for m in self.maps],
            "probs": [str(p) for p in self.probs],
        }

    @staticmethod
    def from_json_dict(obj: dict) -> "SelfSimilarIFS":
        try:
            maps = tuple(SimilarityMap(_as_fraction(m["ratio"], "ratio"),
                                       _as_fraction(m["translation"], "translation"))
                         for m in obj["maps"])
            probs = tuple(_as_fraction(p, "prob") for p in obj["probs"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed system description: {exc}") from exc
        return SelfSimilarIFS(maps, probs)

    @staticmethod
    def from_json(text: str) -> "SelfSimilarIFS":
        return SelfSimilarIFS.from_json_dict(json.loads(text))


def cantor_lebesgue() -> SelfSimilarIFS:
    """Equal-weight system {x/3, (x+2)/3}: the classical middle-thirds measure."""
    h = Fraction(1, 2)
    return SelfSimilarIFS(
        (SimilarityMap(Fraction(1, 3), Fraction(0)),
         SimilarityMap(Fraction(1, 3), Fraction(2, 3))),
        (h, h))


def missing_digit(base: int, digits: Sequence[int],
                  probs: Sequence[Fraction] | None = None) -> SelfSimilarIFS:
    """System {(x+d)/base : d in digits} with the given (default uniform) weights."""
    if base < 2:
        raise ValidationError("base must be >= 2")
    ds = tuple(sorted(set(int(d) for d in digits)))
    if len(ds) == 0:
        raise ValidationError("need at least one digit")
    if ds[0] < 0 or ds[-1] > base - 1:
        raise ValidationError(f"digits must lie in 0..{base - 1}")
    maps = tuple(SimilarityMap(Fraction(1, base), Fraction(d, base)) for d in ds)
    if probs is None:
        probs = tuple(Fraction(1, len(ds)) for _ in ds)
    else:
        probs = tuple(_as_fraction(p, "prob") for p in probs)
    return SelfSimilarIFS(maps, probs)


def mu_t_ifs(t) -> SelfSimilarIFS:
    """The three-map family {x/10, (x+1)/10, (x+t)/10}, equal weights.

    t is a rational in [0, 1].
    """
    tf = _as_fraction(t, "t")
    if not (0 <= tf <= 1):
        raise ValidationError(f"parameter t must lie in [0,1], got {tf}")
    third = Fraction(1, 3)
    tenth = Fraction(1, 10)
    return SelfSimilarIFS(
        (SimilarityMap(tenth, Fraction(0)),
         SimilarityMap(tenth, tenth),
         SimilarityMap(tenth, tf * tenth)),
        (third, third, third))


def compose_word(ifs: SelfSimilarIFS, word: Word) -> SimilarityMap:
    """S_w = S_{w_1} o ... o S_{w_k}, folded exactly.

    The empty word is not a SimilarityMap (ratio 1); callers handle it.
    """
    if len(word) == 0:
        raise ValidationError("cannot compose the empty word; handle it at the call site")
    r = Fraction(1)
    d = Fraction(0)
    # inside-out: after processing letter a the affine is S_a o (previous)
    for a in reversed(word):
        if a < 0 or a >= ifs.arity:
            raise ValidationError(f"letter {a} out of range")
        m = ifs.maps[a]
        r = m.ratio * r
        d = m.ratio * d + m.translation
    return SimilarityMap(r, d)


def word_prob(ifs: SelfSimilarIFS, word: Word) -> Fraction:
    p = Fraction(1)
    for a in word:
        p *= ifs.probs[a]
    return p


@dataclass(frozen=True)
class Stopping:
    """A finite antichain of words whose cylinders tile the attractor.

    Built so every word's contraction ratio is <= r while its parent's
    exceeds r (ties kept at the first word reaching r).
    """

    r: Fraction
    words: tuple[Word, ...]

    def __len__(self):
        return len(self.words)


def build_stopping(ifs: SelfSimilarIFS, r) -> Stopping:
    rf = _as_fraction(r, "r")
    if not (0 < rf < 1):
        raise ValidationError(f"stopping scale must lie in (0,1), got {rf}")
    out: list[Word] = []
    stack: list[tuple[Word, Fraction]] = [((), Fraction(1))]
    while stack:
        word, ratio = stack.pop()
        if ratio <= rf and word:
            out.append(word)
            continue
        for a in range(ifs.arity - 1, -1, -1):
            stack.append((word + (a,), ratio * ifs.maps[a].ratio))
    out.sort()
    return Stopping(rf, tuple(out))


def stopping_weights(ifs: SelfSimilarIFS, stopping: Stopping) -> list[Fraction]:
    return [word_prob(ifs, w) for w in stopping.words]


def frostman_exponent(ifs: SelfSimilarIFS) -> float:
    """Exponent s with mu(B(x, rho)) <= C rho^s on separated systems.

    For a digit system this is the worst-case log p / log r over maps.
    """
    return max(math.log(p) / math.log(m.ratio) for p, m in zip(ifs.probs, ifs.maps))


def _cylinder_hull(comp: SimilarityMap, hull: tuple[Fraction, Fraction]):
    return comp.image(hull[0], hull[1])


def measure_interval(ifs: SelfSimilarIFS, interval, tol, *,
                     closed: tuple[bool, bool] = (True, True),
                     max_cells: int = 2_000_000) -> tuple[Fraction, Fraction]:
    """Exact enclosure [lo, hi] for mu(I).

    Splits cylinders breadth-first; a cylinder counts once its hull is
    inside I, is dropped once disjoint from I, and otherwise refines.
    Endpoint openness matters only through the two flags.  Raises
    BudgetExceededError (carrying the best enclosure) past max_cells.
    """
    a = _as_fraction(interval[0], "left endpoint")
    b = _as_fraction(interval[1], "right endpoint")
    if a > b:
        raise ValidationError(f"empty interval: left {a} > right {b}")
    tol_f = _as_fraction(tol, "tol")
    if tol_f < 0:
        raise ValidationError("tolerance must be >= 0")
    closed_l, closed_r = closed
    hull = ifs.attractor_hull()

    def is_inside(lo: Fraction, hi: Fraction) -> bool:
        left_ok = lo > a or (lo == a and closed_l)
        right_ok = hi < b or (hi == b and closed_r)
        return left_ok and right_ok

    def is_disjoint(lo: Fraction, hi: Fraction) -> bool:
        if hi < a or (hi == a and not closed_l):
            return True
        if lo > b or (lo == b and not closed_r):
            return True
        return False

    inner = Fraction(0)
    boundary: list[tuple[SimilarityMap, Fraction]] = []
    lo0, hi0 = hull
    if is_inside(lo0, hi0):
        return (Fraction(1), Fraction(1))
    if is_disjoint(lo0, hi0):
        return (Fraction(0), Fraction(0))
    # Seed with the root split since the root itself straddles.
    cells = 0
    frontier: list[tuple[SimilarityMap, Fraction]] = [
        (ifs.maps[i], ifs.probs[i]) for i in range(ifs.arity)]
    while True:
        boundary_mass = Fraction(0)
        next_frontier: list[tuple[SimilarityMap, Fraction]] = []
        for comp, mass in frontier:
            lo, hi = _cylinder_hull(comp, hull)
            if is_disjoint(lo, hi):
                continue
            if is_inside(lo, hi):
                inner += mass
                continue
            boundary_mass += mass
            next_frontier.append((comp, mass))
        cells += len(frontier)
        if boundary_mass <= tol_f or not next_frontier:
            return (inner, inner + boundary_mass)
        if cells > max_cells:
            raise BudgetExceededError(
                f"interval mass enclosure still {float(boundary_mass):.3g} wide "
                f"after {cells} cells",
                partial=(inner, inner + boundary_mass))
        frontier = [(comp.compose(ifs.maps[i]), mass * ifs.probs[i])
                    for comp, mass in next_frontier
                    for i in range(ifs.arity)]
