"""Engineered failures of equidistribution along digit scales.

Everything here lives in base 10.  A schedule M_1 < M_2 < ... of digit
places defines a parameter t = sum_j 10^-M_j, a blockwise threshold
sequence psi, and a target gamma whose digits are chosen so that every
point x built from codings over {0, 1, 2} stays far from gamma at all
shifts: dist(10^(n-1) x - gamma, Z) > psi(n) for all n up to the
horizon.  The recurrence counter R(x, N) = #{n <= N : dist(10^(n-1) x
- gamma, Z) <= psi(n)} is then identically zero on the sample set even
though the thresholds sum to infinity.

All accept/reject decisions are exact: digit windows are compared as
integers, widening until the bracket around |shift - gamma| separates
from psi, falling back to full-precision rationals when expansions are
finite.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BudgetExceededError, ValidationError, VerificationFailed

# ---------------------------------------------------------------------------
# sparse decimal points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SparseDecimal:
    """A number in [0,1) with finitely many nonzero decimal digits.

    places[i] is the 1-based digit position of digit values[i]; places
    strictly increase.  The exact value is sum values[i] * 10^-places[i].
    """

    places: tuple[int, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.places) != len(self.values):
            raise ValidationError("places and values must pair up")
        if any(b <= a for a, b in zip(self.places, self.places[1:])):
            raise ValidationError("digit places must strictly increase")
        if any(p < 1 for p in self.places):
            raise ValidationError("digit places are 1-based")
        if any(not (1 <= v <= 9) for v in self.values):
            raise ValidationError("stored digits must lie in 1..9")

    @staticmethod
    def from_digit_counts(counts: dict[int, int]) -> "SparseDecimal":
        """Build from place -> count, carrying values >= 10 upward."""
        acc = dict(counts)
        for p in sorted(acc, reverse=True):
            v = acc[p]
            if v < 0:
                raise ValidationError("negative digit count")
            if v >= 10:
                acc[p] = v % 10
                acc[p - 1] = acc.get(p - 1, 0) + v // 10
                if p - 1 < 1:
                    raise ValidationError("carry escaped the unit interval")
        items = sorted((p, v) for p, v in acc.items() if v != 0)
        return SparseDecimal(tuple(p for p, _ in items),
                             tuple(v for _, v in items))

    def as_fraction(self) -> Fraction:
        acc = Fraction(0)
        for p, v in zip(self.places, self.values):
            acc += Fraction(v, 10 ** p)
        return acc

    def max_place(self) -> int:
        return self.places[-1] if self.places else 0

    def window_int(self, start: int, width: int) -> int:
        """Digits start..start+width-1 (1-based, inclusive) as an integer."""
        lo = bisect_left(self.places, start)
        hi = bisect_right(self.places, start + width - 1)
        out = 0
        for i in range(lo, hi):
            out += self.values[i] * 10 ** (start + width - 1 - self.places[i])
        return out

    def zero_beyond(self, place: int) -> bool:
        """True if all digits at positions > place vanish."""
        return not self.places or self.places[-1] <= place


def point_from_coding(t: Fraction, coding: Sequence[int]) -> Fraction:
    """x = sum_j a_j-indicator contributions over digit places j.

    Letter 0 contributes nothing at place j, letter 1 contributes
    10^-j, letter 2 contributes t * 10^-j.
    """
    x = Fraction(0)
    for j, a in enumerate(coding, start=1):
        if a == 1:
            x += Fraction(1, 10 ** j)
        elif a == 2:
            x += t / 10 ** j
        elif a != 0:
            raise ValidationError(f"coding letters must be 0/1/2, got {a}")
    return x


def sparse_point_from_coding(t_places: Sequence[int],
                             coding: Sequence[int]) -> SparseDecimal:
    """Exact digits of point_from_coding when t = sum 10^-k over t_places."""
    counts: dict[int, int] = {}
    for j, a in enumerate(coding, start=1):
        if a == 1:
            counts[j] = counts.get(j, 0) + 1
        elif a == 2:
            for k in t_places:
                counts[j + k] = counts.get(j + k, 0) + 1
        elif a != 0:
            raise ValidationError(f"coding letters must be 0/1/2, got {a}")
    return SparseDecimal.from_digit_counts(counts)


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledTowerSchedule:
    """Strictly increasing digit places M_1 < M_2 < ... with fast growth.

    The defaults mirror a tower-like profile scaled down to runnable
    size.  Block j spans shifts (M_j - M_{j-1}, M_{j+1} - M_j] in the
    threshold sequence; gaps must grow so blocks nest, and each gap
    must be >= 70 for the avoidance counting bound to hold (strict
    mode; disable for toy schedules that enumerate exhaustively).
    """

    M: tuple[int, ...] = (100, 10_000, 1_000_000)
    strict: bool = True

    def __post_init__(self):
        if len(self.M) < 2:
            raise ValidationError("need at least two places")
        if any(b <= a for a, b in zip(self.M, self.M[1:])):
            raise ValidationError("places must strictly increase")
        gaps = self.gaps()
        if any(g2 <= g1 for g1, g2 in zip(gaps, gaps[1:])):
            raise ValidationError("gaps between places must strictly grow")
        if self.strict and any(g < 70 for g in gaps):
            raise ValidationError(
                "gaps below 70 break the counting bound; pass strict=False "
                "for toy schedules")
        if self.M[0] < 2:
            raise ValidationError("first place must be >= 2")

    def gaps(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.M, self.M[1:]))

    def t_places(self) -> tuple[int, ...]:
        return self.M

    def t_value(self) -> Fraction:
        if self.M[-1] > 200_000:
            raise BudgetExceededError(
                f"t has denominator 10^{self.M[-1]}; keep it sparse")
        return sum((Fraction(1, 10 ** m) for m in self.M), Fraction(0))


def counting_bound_holds(schedule: ScaledTowerSchedule, *,
                         super_digit: int = 1,
                         factor: int = 1000) -> list[bool]:
    """Exact check of 10^block > factor * 9^window per adjacent pair.

    block = M_{j+1} - M_j free digit places, window = M_{j+1} digits of
    constraint; in base 10^g the 9 becomes 10^g - 1 and lengths divide
    by g (rounded to the safe side).  Uses exact big integers.
    """
    g = super_digit
    if g < 1:
        raise ValidationError("super-digit size must be >= 1")
    out = []
    for a, b in zip(schedule.M, schedule.M[1:]):
        block = (b - a) // g
        window = -(-b // g)
        out.append(10 ** (g * block) > factor * (10 ** g - 1) ** window)
    return out


@dataclass(frozen=True)
class PsiBlock:
    start: int  # first shift n of the block (inclusive, 1-based)
    end: int    # last shift n (inclusive)
    value: Fraction


@dataclass(frozen=True)
class PsiSchedule:
    """Blockwise constant thresholds tied to a place schedule.

    value_mode "inverse" uses 1/M_j on block j (slow enough that the
    running sum provably diverges); "exp" uses 10^-M_j (the shape used
    by the avoidance counting argument).  Block j covers shifts
    (M_j - M_{j-1}, M_{j+1} - M_j], with block 1 starting at n = 1.
    """

    blocks: tuple[PsiBlock, ...]
    value_mode: str
    horizon: int

    def psi(self, n: int) -> Fraction:
        if n < 1:
            raise ValidationError("shifts are 1-based")
        for b in self.blocks:
            if b.start <= n <= b.end:
                return b.value
        raise ValidationError(f"shift {n} beyond the horizon {self.horizon}")

    def partial_sum(self, N: int) -> Fraction:
        """Exact Psi(N) = sum_{n<=N} psi(n)."""
        if N < 1:
            return Fraction(0)
        if N > self.horizon:
            raise ValidationError(f"N={N} beyond the horizon {self.horizon}")
        acc = Fraction(0)
        for b in self.blocks:
            if N < b.start:
                break
            acc += b.value * (min(N, b.end) - b.start + 1)
        return acc

    def divergence_checkpoints(self) -> list[tuple[int, Fraction]]:
        """(block end, Psi(end)) rows witnessing the running sum's growth."""
        return [(b.end, self.partial_sum(b.end)) for b in self.blocks]


def build_psi(schedule: ScaledTowerSchedule, *,
              value_mode: str = "inverse") -> PsiSchedule:
    """Blockwise thresholds for a place schedule.

    Block boundaries are the gap lengths: block j ends at shift
    M_{j+1} - M_j.  With value_mode "inverse", block j contributes
    (gap_j - gap_{j-1}) / M_j to the running sum, which grows without
    bound for tower-like schedules; "exp" instead matches the avoidance
    counting argument exactly but sums to a tiny constant on runnable
    schedules.
    """
    if value_mode not in ("inverse", "exp"):
        raise ValidationError(f"unknown value mode {value_mode!r}")
    M = schedule.M
    blocks: list[PsiBlock] = []
    prev_end = 0
    for j in range(len(M) - 1):
        start = prev_end + 1
        end = M[j + 1] - M[j]
        if end < start:
            raise ValidationError("gap growth violated while building blocks")
        if value_mode == "inverse":
            v = Fraction(1, M[j])
        else:
            if M[j] > 200_000:
                raise BudgetExceededError(
                    f"exp mode needs denominator 10^{M[j]}")
            v = Fraction(1, 10 ** M[j])
        blocks.append(PsiBlock(start=start, end=end, value=v))
        prev_end = end
    return PsiSchedule(blocks=tuple(blocks), value_mode=value_mode,
                       horizon=prev_end)


# ---------------------------------------------------------------------------
# the avoidance target gamma
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaDigits:
    """The target's decimal digits (1-based places 1..len(digits))."""

    digits: tuple[int, ...]

    def __post_init__(self):
        if any(not (0 <= d <= 9) for d in self.digits):
            raise ValidationError("digits must lie in 0..9")

    def as_fraction(self) -> Fraction:
        acc = Fraction(0)
        for i, d in enumerate(self.digits, start=1):
            if d:
                acc += Fraction(d, 10 ** i)
        return acc

    def window_int(self, start: int, width: int) -> int:
        out = 0
        for i in range(width):
            pos = start + i - 1
            d = self.digits[pos] if 0 <= pos < len(self.digits) else 0
            out = out * 10 + d
        return out

    def length(self) -> int:
        return len(self.digits)


# dist(y, Z) bracket helpers -------------------------------------------------


def _dist_bracket2(wx: int, xe: int, wg: int, ge: int,
                   scale: int) -> tuple[int, int]:
    """Doubled-numerator bracket for dist(x - gamma, Z) from one window.

    The window integer wx encloses x in [wx, wx + xe] / scale (xe = 0
    when the expansion ends inside the window), likewise wg, ge for
    gamma.  u = |x - gamma| then lies in [u_lo, u_hi] / scale, and the
    circle distance min(u, 1 - u) is concave in u, so its range comes
    from the endpoints and the peak at 1/2.  Returns (2*lo, 2*hi) as
    integers over 2 * scale, avoiding any rational arithmetic.
    """
    u_lo = wx - wg - ge
    v = wg - wx - xe
    if v > u_lo:
        u_lo = v
    if u_lo < 0:
        u_lo = 0
    u_hi = wx + xe - wg
    v = wg + ge - wx
    if v > u_hi:
        u_hi = v
    if u_hi < 0:
        u_hi = 0
    elif u_hi > scale:
        u_hi = scale
    lo2 = 2 * u_lo
    co2 = 2 * (scale - u_hi)
    d_lo2 = lo2 if lo2 < co2 else co2
    if d_lo2 < 0:
        d_lo2 = 0
    hi2 = 2 * u_hi
    if lo2 <= scale <= hi2:
        d_hi2 = scale
    else:
        a = lo2 if lo2 < 2 * scale - lo2 else 2 * scale - lo2
        b = hi2 if hi2 < 2 * scale - hi2 else 2 * scale - hi2
        d_hi2 = a if a > b else b
    return d_lo2, d_hi2


def circle_distance(y: Fraction) -> Fraction:
    """Exact dist(y, Z) for a rational y."""
    f = y - math.floor(y)
    return min(f, 1 - f)


# ---------------------------------------------------------------------------
# the recurrence counter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceResult:
    count: int
    first_hit: int | None
    checked: int


def r_count_fraction(x: Fraction, gamma: Fraction, psi: PsiSchedule,
                     base: int, N: int) -> RecurrenceResult:
    """Reference counter in exact rational arithmetic, O(N) bigint work.

    Counts shifts n <= N with dist(base^(n-1) x - gamma, Z) <= psi(n).
    """
    if N > psi.horizon:
        raise ValidationError(f"N={N} beyond psi horizon {psi.horizon}")
    count = 0
    first = None
    y = x
    for n in range(1, N + 1):
        d = circle_distance(y - gamma)
        if d <= psi.psi(n):
            count += 1
            if first is None:
                first = n
        y = (y * base) % 1
    return RecurrenceResult(count=count, first_hit=first, checked=N)


def _decide_wide(x: SparseDecimal, gamma: GammaDigits, n: int,
                 tn: int, td: int, width: int, max_width: int) -> bool:
    """Slow-path hit decision, widening the window until it separates.

    Exact in the worst case because both expansions are finite: at
    max_width the bracket degenerates to the true distance.
    """
    glen = gamma.length()
    xmax = x.max_place()
    while True:
        scale = 10 ** width
        wx = x.window_int(n, width)
        xe = 0 if xmax <= n + width - 1 else 1
        wg = gamma.window_int(1, width)
        ge = 0 if glen <= width else 1
        d_lo2, d_hi2 = _dist_bracket2(wx, xe, wg, ge, scale)
        rhs = 2 * tn * scale
        if d_hi2 * td <= rhs:
            return True
        if d_lo2 * td > rhs:
            return False
        if (xe == 0 and ge == 0) or width >= max_width:
            return d_lo2 * td <= rhs
        width = min(max_width, width * 2)


def r_count_digits(x: SparseDecimal, gamma: GammaDigits, psi: PsiSchedule,
                   N: int, *, start_width: int = 12) -> RecurrenceResult:
    """Exact base-10 counter via digit-window brackets.

    Each shift n compares a window of x's digits against gamma's
    leading digits in pure integer arithmetic, rolling the window one
    digit per shift.  Near-collisions (rare) widen the window until
    the bracket decides against psi(n), reaching full precision in the
    worst case because both expansions are finite.
    """
    if N > psi.horizon:
        raise ValidationError(f"N={N} beyond psi horizon {psi.horizon}")
    K = start_width
    scale = 10 ** K
    drop = scale // 10
    xmax = x.max_place()
    glen = gamma.length()
    max_width = max(xmax, glen) + 2
    # dense digit array (index = 1-based place) covering every window
    dense = bytearray(N + K + 2)
    for p, v in zip(x.places, x.values):
        if p < len(dense):
            dense[p] = v
    w = 0
    for i in range(1, K + 1):
        w = w * 10 + dense[i]
    wg = gamma.window_int(1, K)
    ge = 0 if glen <= K else 1
    count = 0
    first = None
    for blk in psi.blocks:
        if blk.start > N:
            break
        tn = blk.value.numerator
        td = blk.value.denominator
        tn_scale = tn * scale
        rhs = 2 * tn_scale
        for n in range(blk.start, min(blk.end, N) + 1):
            # cheap reject: u = |x - gamma| is within 1/scale of
            # |w - wg| / scale, so dist clears psi(n) whenever the
            # shrunk tent at that point does
            a = w - wg
            if a < 0:
                a = -a
            m = a - 1 if 2 * a < scale else scale - a - 1
            if m * td > tn_scale:
                w = (w % drop) * 10 + dense[n + K]
                continue
            xe = 0 if xmax <= n + K - 1 else 1
            d_lo2, d_hi2 = _dist_bracket2(w, xe, wg, ge, scale)
            if d_hi2 * td <= rhs:
                hit = True
            elif d_lo2 * td > rhs:
                hit = False
            elif (xe == 0 and ge == 0) or K >= max_width:
                hit = d_lo2 * td <= rhs
            else:
                hit = _decide_wide(x, gamma, n, tn, td,
                                   min(max_width, 2 * K), max_width)
            if hit:
                count += 1
                if first is None:
                    first = n
            w = (w % drop) * 10 + dense[n + K]
    return RecurrenceResult(count=count, first_hit=first, checked=N)


def r_count(x, gamma, psi: PsiSchedule, base: int, N: int,
            *, implementation: str = "auto") -> RecurrenceResult:
    """Recurrence counter R(x, N); exact in all implementations.

    x may be a Fraction or SparseDecimal; gamma a Fraction or
    GammaDigits.  implementation "digits" requires base 10 and sparse
    digit forms; "fraction" uses plain rational arithmetic; "auto"
    picks digits when possible.
    """
    if implementation not in ("auto", "digits", "fraction"):
        raise ValidationError(f"unknown implementation {implementation!r}")
    want_digits = implementation in ("auto", "digits")
    if want_digits and base == 10 and isinstance(x, SparseDecimal) \
            and isinstance(gamma, GammaDigits):
        return r_count_digits(x, gamma, psi, N)
    if implementation == "digits":
        raise ValidationError(
            "digits implementation needs base 10, SparseDecimal x and "
            "GammaDigits gamma")
    xf = x.as_fraction() if isinstance(x, SparseDecimal) else Fraction(x)
    gf = gamma.as_fraction() if isinstance(gamma, GammaDigits) else Fraction(gamma)
    return r_count_fraction(xf, gf, psi, base, N)


# ---------------------------------------------------------------------------
# building gamma greedily
# ---------------------------------------------------------------------------

def _violations(samples: Sequence[SparseDecimal], gamma: GammaDigits,
                psi: PsiSchedule, N: int,
                limit: int = 1) -> list[tuple[int, int]]:
    """First `limit` (sample_index, shift) pairs with dist <= psi."""
    out = []
    for i, x in enumerate(samples):
        res = r_count_digits(x, gamma, psi, N)
        if res.count > 0:
            out.append((i, res.first_hit))
            if len(out) >= limit:
                return out
    return out


def _farthest_window(excluded: set[int], scale: int) -> tuple[int, int]:
    """Window integer maximizing the circular distance to a finite set.

    Sorts the excluded windows and takes the midpoint of the widest
    circular gap; returns (window, guaranteed unit distance).
    """
    ex = sorted(excluded)
    best_gap = -1
    best = 0
    prev = ex[-1] - scale
    for c in ex:
        gap = c - prev
        if gap > best_gap:
            best_gap = gap
            best = (prev + gap // 2) % scale
        prev = c
    return best, best_gap // 2


def build_gamma(schedule: ScaledTowerSchedule, psi: PsiSchedule,
                samples: Sequence[SparseDecimal], N: int, *,
                fill_digit: int = 5,
                max_repairs: int = 500) -> GammaDigits:
    """A target whose orbit distances avoid every sample at shifts <= N.

    Starts from the constant fill digit, long enough to pin gamma well
    below the smallest threshold in range.  Each verification failure
    adds the colliding digit windows to an exclusion set, and gamma's
    head moves to the midpoint of the widest free arc on the circle of
    width-2 windows (widening the head to 4, 6, 8 digits if the circle
    gets crowded).  Exact verification gates acceptance; running out
    of repairs or of free arcs raises VerificationFailed.

    With the default fill 5 and sample digits in {0, 1, 2} the initial
    guess is already safe: every shifted window of a sample starts at
    least two digit values away from gamma's leading 5.
    """
    if not (0 <= fill_digit <= 9):
        raise ValidationError("fill digit must be a decimal digit")
    if N > psi.horizon:
        raise ValidationError(f"N={N} beyond psi horizon {psi.horizon}")
    psi_min = min((b.value for b in psi.blocks if b.start <= N),
                  default=Fraction(1))
    psi_max = max((b.value for b in psi.blocks if b.start <= N),
                  default=Fraction(0))
    need = 4
    while Fraction(1, 10 ** need) > psi_min / 100:
        need += 1
        if need > 200_000:
            raise BudgetExceededError("threshold too small to pin gamma")
    length = max(12, need)
    digits = [fill_digit] * length
    bad_pairs: set[tuple[int, int]] = set()
    head = 2
    for _ in range(max_repairs + 1):
        gamma = GammaDigits(tuple(digits))
        bad = _violations(samples, gamma, psi, N)
        if not bad:
            return gamma
        bad_pairs.update(bad)
        placed = False
        while head <= 8 and not placed:
            scale = 10 ** head
            # each colliding window excludes itself +- 1 unit of
            # trailing-digit slack
            excluded: set[int] = set()
            for i, n in bad_pairs:
                c = samples[i].window_int(n, head)
                excluded.update(((c - 1) % scale, c, (c + 1) % scale))
            # unit distance that certifies dist > psi everywhere seen
            clearance = int(psi_max * scale) + 2
            g, sep = _farthest_window(excluded, scale)
            if sep >= clearance:
                for j in range(head - 1, -1, -1):
                    digits[j] = g % 10
                    g //= 10
                placed = True
            else:
                head += 2
        if not placed:
            raise VerificationFailed(
                f"no free arc wide enough for gamma among "
                f"{len(bad_pairs)} colliding windows at N={N}")
    raise VerificationFailed(
        f"gamma search exhausted {max_repairs} repairs; the schedule is "
        f"infeasible for this sample set at N={N}")


def verify_gamma_avoidance(gamma: GammaDigits, psi: PsiSchedule,
                           samples: Sequence[SparseDecimal],
                           N: int) -> None:
    """Raise VerificationFailed unless dist > psi(n) strictly everywhere."""
    bad = _violations(samples, gamma, psi, N, limit=5)
    if bad:
        raise VerificationFailed(
            f"avoidance fails at (sample, shift) pairs {bad}")


def enumerate_codings(depth: int) -> list[tuple[int, ...]]:
    """All 3^depth codings over {0,1,2} of exactly `depth` letters."""
    out: list[tuple[int, ...]] = [()]
    for _ in range(depth):
        out = [c + (a,) for c in out for a in (0, 1, 2)]
    return out
