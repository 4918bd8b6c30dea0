"""Construction of parameters whose measures decay arbitrarily slowly.

For t = p/10^n the transform of the three-map family at xi = 10^L with
L > n has modulus at least c * 3^-n, where

    c = prod_{j>=1} (1 - 4 pi / (3 * 10^j)) ~ 0.5542.

Given any decay target phi tending to zero, stacking digit ones at a
fast-growing sequence of places k_1 < k_2 < ... produces a single t
whose transform beats phi along the subsequence of frequencies 10^L_m.
Every inequality the construction relies on is certified in exact
rational arithmetic; measured moduli come from the L-independent
log-domain evaluator, so indices with millions of digits are still
checked numerically.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import BudgetExceededError, ValidationError, VerificationFailed
from .fourier import (ExactFrequency, digits_from_places, ft_mu_t,
                      modulus_lower_bound_exact, mu_t_pow10_log_modulus)
from .towers import PowerTower

# 2 pi < 710/113 since pi < 355/113; used in exact certificates
_TWO_PI_HI = Fraction(710, 113)
_FOUR_PI_HI = Fraction(1420, 113)
# log10(3) = 0.477121254... < 4771213/10^7
_LOG10_3_HI = Fraction(4771213, 10 ** 7)


def slow_decay_constant(terms: int = 64) -> float:
    """The infinite product c = prod_j (1 - 4 pi / (3 * 10^j)).

    Truncating after `terms` factors leaves a relative defect below
    sum_{j>terms} 4 pi 10^-j / 3, i.e. ~1e-64 at the default.
    """
    with mp.workdps(40):
        c = mp.mpf(1)
        for j in range(1, terms + 1):
            c *= 1 - 4 * mp.pi / (3 * mp.mpf(10) ** j)
        return float(c)


@functools.lru_cache(maxsize=1)
def slow_decay_constant_bounds() -> tuple[Fraction, Fraction]:
    """Rational bracket [lo, hi] around the constant, width 2e-12.

    The float value is correct to ~1e-16 (truncation of the product
    past 64 factors contributes under 1e-64), so padding it by 1e-12 on
    each side gives a comfortably rigorous bracket.
    """
    c = Fraction(slow_decay_constant())
    pad = Fraction(1, 10 ** 12)
    return (c - pad, c + pad)


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _decimal_digit_count(n: int) -> int:
    """Exact number of decimal digits of a positive integer."""
    if n <= 0:
        raise ValidationError("digit count of a non-positive integer")
    d = max(1, (n.bit_length() * 301029) // 1000000)
    while 10 ** d <= n:
        d += 1
    return d


def _mpf_bracket(v: mp.mpf) -> tuple[Fraction, Fraction]:
    """Rational bracket around a positive mpf, relative width ~4e-13.

    Splits v into mantissa and decimal exponent so tiny values (huge
    negative exponents) stay exact powers of ten times a small integer.
    """
    if not v > 0:
        raise ValidationError("bracket of a non-positive value")
    with mp.extraprec(60):
        e = int(mp.floor(mp.log10(v)))
        t = v * mp.power(mp.mpf(10), 13 - e)
        md = int(mp.floor(t))
    scale = Fraction(10) ** e
    return (Fraction(md - 2, 10 ** 13) * scale,
            Fraction(md + 2, 10 ** 13) * scale)


# ---------------------------------------------------------------------------
# decay targets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFunction:
    """A positive non-increasing target phi(xi) -> 0.

    kind is one of "log" (1/log10 xi), "loglog" (1/lnln xi), "ilog"
    (1/(k-fold iterated ln)), "power" ((1+xi)^-alpha), or "table"
    (right-continuous step function through sample points, constant
    beyond the last).  Values clamp to 1 below each kind's natural
    threshold so phi never exceeds 1.
    """

    kind: str
    param: float = 0.0
    table: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("log", "loglog", "ilog", "power", "table"):
            raise ValidationError(f"unknown decay preset {self.kind!r}")
        if self.kind == "ilog" and int(self.param) < 1:
            raise ValidationError("ilog needs an iteration count >= 1")
        if self.kind == "power" and not self.param > 0:
            raise ValidationError("power needs alpha > 0")
        if self.kind == "table":
            if not self.table:
                raise ValidationError("table preset needs sample points")
            xs = [x for x, _ in self.table]
            vs = [v for _, v in self.table]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValidationError("table abscissae must increase")
            if any(v <= 0 for v in vs):
                raise ValidationError("table values must be positive")
            if any(b > a for a, b in zip(vs, vs[1:])):
                raise ValidationError("table values must be non-increasing")

    def value(self, xi) -> mp.mpf:
        """phi(xi) for xi given as int/float/mpf (may be astronomically big)."""
        x = xi if isinstance(xi, mp.mpf) else mp.mpf(xi)
        if x < 0:
            raise ValidationError("decay targets are evaluated at xi >= 0")
        if self.kind == "power":
            return (1 + x) ** mp.mpf(-self.param)
        if self.kind == "table":
            out = mp.mpf(1)
            for ax, av in self.table:
                if x >= ax:
                    out = mp.mpf(av)
            return min(out, mp.mpf(1))
        if self.kind == "log":
            if x < 10:
                return mp.mpf(1)
            return 1 / mp.log10(x)
        if self.kind == "loglog":
            if x < 16:
                return mp.mpf(1)
            return 1 / mp.log(mp.log(x))
        k = int(self.param)
        v = x
        for _ in range(k):
            if v <= mp.e:
                return mp.mpf(1)
            v = mp.log(v)
        return min(mp.mpf(1), 1 / v)

    def value_at_pow10(self, L: int) -> mp.mpf:
        """phi(10^L) without materializing 10^L."""
        if self.kind == "log":
            return mp.mpf(1) if L < 1 else mp.mpf(1) / mp.mpf(L)
        if self.kind == "loglog":
            if L < 2:
                return self.value(mp.mpf(10) ** L)
            return 1 / mp.log(L * mp.log(10))
        if self.kind == "ilog":
            k = int(self.param)
            v = L * mp.log(10)
            for _ in range(k - 1):
                if v <= mp.e:
                    return mp.mpf(1)
                v = mp.log(v)
            return min(mp.mpf(1), 1 / v)
        if self.kind == "power":
            if L > 250:
                return mp.power(mp.mpf(10), mp.mpf(-self.param) * L)
            return self.value(mp.mpf(10) ** L)
        return self.value(mp.mpf(10) ** L)

    def rational_bracket_at_pow10(self, L: int) -> tuple[Fraction, Fraction]:
        """Certified rational lo <= phi(10^L) <= hi.

        The log preset is exactly 1/L; other presets evaluate in mpf at
        50 digits and widen by the mantissa-exponent bracket, which is
        far beyond the evaluation error.
        """
        if self.kind == "log":
            if L < 1:
                return (Fraction(1), Fraction(1))
            return (Fraction(1, L), Fraction(1, L))
        with mp.workdps(50):
            v = self.value_at_pow10(L)
            if v >= 1:
                return (Fraction(1), Fraction(1))
            return _mpf_bracket(v)

    @staticmethod
    def parse(text: str) -> "DecayFunction":
        body = text.strip()
        if body == "log":
            return DecayFunction("log")
        if body == "loglog":
            return DecayFunction("loglog")
        if body.startswith("ilog:"):
            return DecayFunction("ilog", param=int(body[5:]))
        if body.startswith("power:"):
            return DecayFunction("power", param=float(body[6:]))
        raise ValidationError(f"unknown decay preset {text!r}")


# ---------------------------------------------------------------------------
# choosing the frequency exponent for a given digit count
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChosenL:
    """Frequency exponent choice for one index.

    certified means c * 3^-n >= 2 phi(10^L) was proven in rational
    arithmetic; minimal means L-1 was proven to fail it.  Round-up
    choices (L a power of ten at sizes where 3^n cannot be bracketed)
    are certified but never claimed minimal; they carry exp10 = m with
    L = 10^m so later steps can work in the exponent instead of on the
    multi-megabyte integer.
    """

    L: int
    minimal: bool
    certified: bool
    mode: str  # "exact" or "pow10-roundup"
    exp10: int | None = None


def _exact_digits_of_3n(n: int) -> int:
    return (n * 4771213) // 10 ** 7 + 1


def choose_L(n: int, phi: DecayFunction, *,
             digit_budget: int = 3_000_000) -> ChosenL:
    """Smallest certified L with c * 3^-n >= 2 phi(10^L).

    Uses exact ceilings for the log preset and a rationally certified
    binary search otherwise.  When 3^n would exceed digit_budget
    decimal digits, the log preset falls back to a power-of-ten
    round-up certified through the bound log10(3) < 4771213/10^7;
    other presets raise BudgetExceededError.
    """
    if n < 1:
        raise ValidationError("digit count must be >= 1")
    c_lo, c_hi = slow_decay_constant_bounds()
    if _exact_digits_of_3n(n) <= digit_budget:
        value = 2 * 3 ** n
        if phi.kind == "log":
            # condition 1/L <= c 3^-n / 2  <=>  L >= 2 * 3^n / c
            L_hi = _ceil_frac(value / c_lo)
            L_lo = _ceil_frac(value / c_hi)
            L = max(L_hi, n + 1)
            minimal = (L_lo == L_hi) if L_hi >= n + 1 else True
            return ChosenL(L=L, minimal=minimal, certified=True, mode="exact")
        return _choose_L_search(n, phi, c_lo, c_hi, digit_budget)
    if phi.kind == "log":
        bound = n * _LOG10_3_HI + Fraction(6, 10)  # log10(2/c_lo) < 0.6
        m = _ceil_frac(bound)
        if m > 20_000_000:
            raise BudgetExceededError(
                f"round-up exponent 10^{m} has too many digits to hold")
        return ChosenL(L=10 ** m, minimal=False, certified=True,
                       mode="pow10-roundup", exp10=m)
    raise BudgetExceededError(
        f"n={n} needs 3^n with ~{_exact_digits_of_3n(n)} digits for preset "
        f"{phi.kind!r}; budget is {digit_budget}")


def _choose_L_search(n: int, phi: DecayFunction, c_lo: Fraction,
                     c_hi: Fraction, digit_budget: int) -> ChosenL:
    lhs_lo = c_lo / 3 ** n
    lhs_hi = c_hi / 3 ** n

    if phi.kind == "table":
        # the table floors at its last value; below that no L ever works
        last = mp.mpf(phi.table[-1][1])
        floor_lo, _ = _mpf_bracket(last)
        if lhs_lo < 2 * floor_lo:
            raise VerificationFailed(
                f"decay table floors at {float(last)}, above the reachable "
                f"bound c * 3^-{n}")

    def admissible(L: int) -> bool:
        _, phi_hi = phi.rational_bracket_at_pow10(L)
        return lhs_lo >= 2 * phi_hi

    def provably_fails(L: int) -> bool:
        phi_lo, _ = phi.rational_bracket_at_pow10(L)
        return lhs_hi < 2 * phi_lo

    hi = max(n + 1, 16)
    for _ in range(2000):
        if admissible(hi):
            break
        hi *= 4
    else:
        raise BudgetExceededError(
            f"no admissible frequency exponent below 10^1200 for n={n} "
            f"with preset {phi.kind!r}; the index is symbolic-only")
    lo = n  # L must exceed n anyway; everything <= lo treated as failing
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    minimal = hi == n + 1 or provably_fails(hi - 1)
    return ChosenL(L=hi, minimal=minimal, certified=True, mode="exact")


# ---------------------------------------------------------------------------
# the digit-place schedule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexCertificate:
    """Exact certificates attached to one index of a schedule.

    n is the prefix digit count (the index's own place k_m), L the
    chosen frequency exponent.  lower_bound_ok certifies
    c * 3^-n >= 2 phi(10^L); gap_ok certifies that all later blocks
    keep |t - prefix| < phi(10^L) / (2 pi 10^L).  Both are rational
    inequalities, not float comparisons.
    """

    index: int
    n: int
    L: int
    L_minimal: bool
    L_mode: str
    lower_bound_ok: bool
    gap_ok: bool
    L_exp10: int | None = None


@dataclass(frozen=True)
class LiouvilleSchedule:
    """Digit places k_1 < k_2 < ... building t = sum_i 10^-k_i.

    Any real whose expansion has ones exactly at places k_1..k_depth
    and further ones only at places >= k_tail (with gaps still at least
    doubling) satisfies every certificate; prefixes are the rationals
    p_m = sum_{i<=m} 10^-k_i.
    """

    phi: DecayFunction
    places: tuple[int, ...]
    k_tail: int
    certificates: tuple[IndexCertificate, ...]

    @property
    def depth(self) -> int:
        return len(self.places)

    def prefix_places(self, m: int) -> tuple[int, ...]:
        if not (1 <= m <= self.depth):
            raise ValidationError(f"index {m} outside 1..{self.depth}")
        return self.places[:m]

    def prefix_fraction(self, m: int) -> Fraction:
        n = self.places[m - 1]
        if n > 100_000:
            raise BudgetExceededError(
                f"prefix at index {m} has {n} digits; keep it sparse")
        acc = Fraction(0)
        for k in self.places[:m]:
            acc += Fraction(1, 10 ** k)
        return acc

    def describe_t(self) -> str:
        shown = ", ".join(str(k) for k in self.places[:6])
        more = "" if self.depth <= 6 else f", ... ({self.depth} places)"
        return f"t = sum of 10^-k over k in [{shown}{more}]"


def _gap_rule_ok(k_next: int, L: int, phi: DecayFunction) -> bool:
    """Certify 2 * 10^-k_next < phi(10^L) / (2 pi 10^L).

    Equivalent to 10^(k_next - L) * phi_lo > 4 pi with 2 pi < 710/113.
    """
    gap = k_next - L
    if gap <= 0:
        return False
    phi_lo, _ = phi.rational_bracket_at_pow10(L)
    return Fraction(10) ** gap * phi_lo > _FOUR_PI_HI


def _min_k_next(L: int, phi: DecayFunction) -> int:
    """Least k satisfying the gap rule at this L.

    Jumps straight to the digit count of 4 pi / phi_lo instead of
    stepping, so exponent-sized L (millions of digits in 10^L) stays
    cheap.
    """
    phi_lo, _ = phi.rational_bracket_at_pow10(L)
    ratio = _FOUR_PI_HI / phi_lo
    g = _decimal_digit_count(_ceil_frac(ratio))
    while Fraction(10) ** g * phi_lo <= _FOUR_PI_HI:
        g += 1
    while g > 1 and Fraction(10) ** (g - 1) * phi_lo > _FOUR_PI_HI:
        g -= 1
    return L + g


def build_liouville_t(phi: DecayFunction, depth: int, *,
                      k1: int = 1,
                      digit_budget: int = 3_000_000) -> LiouvilleSchedule:
    """Greedy schedule: each new place at least doubles and lands far
    enough beyond the previous index's certified frequency exponent.

    If an index overflows the digit budget, the raised
    BudgetExceededError carries the schedule truncated to the indices
    already certified (with a safe doubled k_tail) in .partial.
    """
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    if k1 < 1:
        raise ValidationError("k1 must be >= 1")
    places = [k1]
    certs: list[IndexCertificate] = []
    for m in range(1, depth + 1):
        n = places[-1]
        try:
            chosen = choose_L(n, phi, digit_budget=digit_budget)
            if chosen.L <= n:
                raise VerificationFailed(
                    f"chosen L={chosen.L} does not exceed prefix digits n={n}")
            if chosen.exp10 is not None:
                # L = 10^e with phi(10^L) = 1/L exactly (log preset):
                # the gap rule 10^g / L > 4 pi collapses to g >= e + 2
                g = chosen.exp10 + 2
                k_next = max(2 * n + 1, chosen.L + g)
                gap_ok = k_next - chosen.L >= chosen.exp10 + 2
            else:
                k_next = max(2 * n + 1, _min_k_next(chosen.L, phi))
                gap_ok = _gap_rule_ok(k_next, chosen.L, phi)
        except BudgetExceededError as exc:
            partial = LiouvilleSchedule(
                phi=phi, places=tuple(places[:m - 1]) or (k1,),
                k_tail=2 * places[-1] + 1,
                certificates=tuple(certs))
            raise BudgetExceededError(
                f"index {m} exceeded the digit budget: {exc}",
                partial=partial) from exc
        certs.append(IndexCertificate(
            index=m, n=n, L=chosen.L, L_minimal=chosen.minimal,
            L_mode=chosen.mode, lower_bound_ok=chosen.certified,
            gap_ok=gap_ok, L_exp10=chosen.exp10))
        if m < depth:
            places.append(k_next)
        else:
            return LiouvilleSchedule(phi=phi, places=tuple(places),
                                     k_tail=k_next,
                                     certificates=tuple(certs))
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexReport:
    """Numerical audit of one schedule index.

    ln_measured is ln |mu_hat_prefix(10^L)| from the L-independent
    evaluator (valid for every L > n simultaneously).  beats_two_phi
    checks measured >= 2 phi(10^L): the ideal parameter then still
    clears phi itself after losing at most phi to the parameter
    Lipschitz bound, which is exactly what the gap rule certifies.
    """

    index: int
    n: int
    L: int
    ln_measured: float
    ln_err: float
    ln_lemma_floor: float
    ln_two_phi: float
    beats_lemma_floor: bool
    beats_two_phi: bool
    certified: bool
    cross_checked: bool


def verify_lower_bound(schedule: LiouvilleSchedule, *,
                       digit_budget: int = 30_000_000,
                       cross_check_L_cap: int = 2_000,
                       cross_check_tol: float = 1e-10) -> list[IndexReport]:
    """Audit every index whose prefix fits in digit_budget digits.

    Raises VerificationFailed if the generic exact-phase evaluator
    disagrees with the fast path where both run; bound failures are
    reported, not raised, so callers can decide.
    """
    c = slow_decay_constant()
    reports: list[IndexReport] = []
    for cert in schedule.certificates:
        m, n, L = cert.index, cert.n, cert.L
        if n > digit_budget:
            break
        digits = digits_from_places(schedule.prefix_places(m), n)
        lm = mu_t_pow10_log_modulus(digits)
        ln_floor = math.log(c) - n * math.log(3.0)
        with mp.workdps(30):
            ln_two_phi = float(mp.log(2 * schedule.phi.value_at_pow10(L)))
        beats_floor = lm.ln + lm.err_ln >= ln_floor - 1e-9
        beats_two_phi = lm.ln - lm.err_ln >= ln_two_phi
        cross_checked = False
        if L <= cross_check_L_cap and n <= 40:
            fv = ft_mu_t(schedule.prefix_fraction(m),
                         ExactFrequency.pow10(L), cross_check_tol)
            fast = math.exp(lm.ln)
            if abs(fast - fv.modulus) > fv.err + fast * 2 * lm.err_ln + 1e-12:
                raise VerificationFailed(
                    f"fast and generic evaluators disagree at index {m}: "
                    f"{fast} vs {fv.modulus} +- {fv.err}")
            cross_checked = True
        reports.append(IndexReport(
            index=m, n=n, L=L, ln_measured=lm.ln, ln_err=lm.err_ln,
            ln_lemma_floor=ln_floor, ln_two_phi=ln_two_phi,
            beats_lemma_floor=beats_floor, beats_two_phi=beats_two_phi,
            certified=cert.lower_bound_ok and cert.gap_ok,
            cross_checked=cross_checked))
    return reports


def rajchman_status(t) -> tuple[str, str]:
    """Classify a three-map parameter: does mu_hat_t vanish at infinity?

    Returns (status, reason) with status in {"non-rajchman", "unknown",
    "rajchman"}.  Rationals p/q with q a product of 2s and 5s rescale
    to p'/10^n, where the transform along 10^L stays above c * 3^-n
    forever; for other rationals and unstructured reals nothing is
    claimed.  A LiouvilleSchedule classifies its ideal parameter.
    """
    if isinstance(t, LiouvilleSchedule):
        return ("rajchman",
                "digit gaps at least double forever, so the expansion is "
                "aperiodic and t is irrational; its transform still decays "
                "slower than the schedule's target along 10^L")
    tf = Fraction(t)
    if not (0 <= tf <= 1):
        raise ValidationError("parameter must lie in [0,1]")
    q = tf.denominator
    q0 = q
    n2 = n5 = 0
    while q0 % 2 == 0:
        q0 //= 2
        n2 += 1
    while q0 % 5 == 0:
        q0 //= 5
        n5 += 1
    if q0 == 1:
        n = max(n2, n5)
        return ("non-rajchman",
                f"t rescales to p/10^{n}; |mu_hat_t(10^L)| >= c * 3^-{n} "
                f"~ {float(modulus_lower_bound_exact(n)):.3g} for every L > {n}")
    return ("unknown", "no decay certificate applies to this denominator")


# ---------------------------------------------------------------------------
# symbolic tower rule for the loglog preset
# ---------------------------------------------------------------------------

def tower_rule_holds(n: int) -> bool:
    """Check c * 3^-n >= 2 / lnln(10^L) at L = the (n+2)-fold tower of 10.

    Since lnln(10^L) = ln L + lnln 10 > ln L and ln L = (n+1)-fold
    tower times ln 10, the condition follows from the n-fold tower
    dominating n * log10(3) + log10(2 / (c ln 10)); the comparison runs
    on symbolic towers with a small bump absorbing float rounding.
    """
    if n < 1:
        raise ValidationError("index must be >= 1")
    c = slow_decay_constant()
    lhs = PowerTower.uparrow(n)
    rhs = n * math.log10(3.0) + math.log10(2.0 / (c * math.log(10.0))) + 0.01
    return lhs >= PowerTower.of(rhs)


# ---------------------------------------------------------------------------
# piecewise-affine decreasing majorants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotoneEnvelope:
    """A strictly decreasing piecewise-affine majorant of a decay target.

    Knot n (1-based) sits at (xs[n-1], 2^-n) and the curve starts at
    (0, 1).  Every knot is placed where the target and the hyperbola
    (1+xi)^-1 have both fallen to 3^-(n+2), so the knot value 2^-n
    exceeds the target by the factor (3/2)^n * 9 there, and the whole
    curve stays above the hyperbola: knots dominate a convex curve, so
    the chords between them do too.
    """

    xs: tuple

    def __post_init__(self):
        if not self.xs:
            raise ValidationError("an envelope needs at least one knot")
        prev = 0
        for i, x in enumerate(self.xs):
            if not x > prev:
                raise ValidationError("knot abscissae must increase strictly")
            # keep the hyperbola below the knot: (1 + x_n) * 2^-n >= 1
            if mp.mpf(x) < 2 ** (i + 1) - 1:
                raise ValidationError(f"knot {i + 1} dips under (1+xi)^-1")
            prev = x

    def depth(self) -> int:
        return len(self.xs)

    def coverage(self):
        """Largest frequency the envelope is defined at."""
        return self.xs[-1]

    def knot(self, n: int) -> tuple:
        if not 1 <= n <= len(self.xs):
            raise ValidationError(f"envelope has no knot {n}")
        return (self.xs[n - 1], Fraction(1, 2 ** n))

    def knot_index_for(self, value) -> int:
        """Smallest n with 2^-n <= value."""
        v = mp.mpf(value)
        if v <= 0:
            raise ValidationError("threshold must be positive")
        for n in range(1, len(self.xs) + 1):
            if mp.mpf(2) ** -n <= v:
                return n
        raise ValidationError("envelope does not reach that far down")

    def psi(self, xi) -> mp.mpf:
        x = xi if isinstance(xi, mp.mpf) else mp.mpf(xi)
        if x < 0:
            raise ValidationError("the envelope is defined for xi >= 0")
        lo_x, lo_v = mp.mpf(0), mp.mpf(1)
        for i, kx in enumerate(self.xs):
            kxm = mp.mpf(kx)
            kv = mp.mpf(2) ** -(i + 1)
            if x <= kxm:
                return lo_v + (kv - lo_v) * (x - lo_x) / (kxm - lo_x)
            lo_x, lo_v = kxm, kv
        raise ValidationError("frequency beyond envelope coverage")


# feasible knot counts; deeper iterated-exponential knots would need
# mantissa exponents beyond what fits in memory
_ENVELOPE_DEPTH_DEFAULT = 40
_ENVELOPE_DEPTH_DOUBLE_EXP = 8


def _exp_tower(v: mp.mpf, height: int) -> mp.mpf:
    for _ in range(height):
        v = mp.exp(v)
    return v


def monotone_envelope(phi: DecayFunction,
                      n_points: int | None = None) -> MonotoneEnvelope:
    """Enveloping majorant of phi with knot values 2^-n.

    Knot n is the first point where max(phi(xi), (1+xi)^-1) has fallen
    to 3^-(n+2); presets invert in closed form, tables scan.  A table
    whose constant tail never falls below 1/27 cannot be enveloped.
    """
    if phi.kind in ("loglog",) or (phi.kind == "ilog" and int(phi.param) == 2):
        depth = _ENVELOPE_DEPTH_DOUBLE_EXP
    elif phi.kind == "ilog" and int(phi.param) >= 3:
        raise BudgetExceededError(
            "envelope knots for a triple-iterated logarithm exceed "
            "representable magnitudes")
    else:
        depth = _ENVELOPE_DEPTH_DEFAULT
    if n_points is not None:
        if n_points < 1:
            raise ValidationError("need at least one knot")
        depth = n_points

    xs: list = []
    prev = 0
    for n in range(1, depth + 1):
        hyper = 3 ** (n + 2) - 1
        if phi.kind == "power":
            alpha = phi.param
            if alpha >= 1.0:
                cand = hyper
            else:
                with mp.workdps(40):
                    cand = max(mp.mpf(hyper),
                               mp.power(3, mp.mpf(n + 2) / alpha) - 1)
        elif phi.kind == "log":
            cand = mp.power(10, 3 ** (n + 2))
        elif phi.kind == "loglog":
            cand = _exp_tower(mp.mpf(3 ** (n + 2)), 2)
        elif phi.kind == "ilog":
            cand = _exp_tower(mp.mpf(3 ** (n + 2)), int(phi.param))
        else:
            level = Fraction(1, 3 ** (n + 2))
            hit = None
            for ax, av in phi.table:
                if Fraction(av) <= level:
                    hit = ax
                    break
            if hit is None:
                if n == 1:
                    raise ValidationError(
                        "table tail never falls below 1/27; cannot envelope")
                break
            cand = hyper if hit <= hyper else int(math.ceil(hit))
        if isinstance(cand, int) and isinstance(prev, int):
            cand = max(cand, prev + 1)
        elif mp.mpf(cand) <= mp.mpf(prev):
            cand = mp.mpf(prev) * (1 + mp.mpf(2) ** -30)
        xs.append(cand)
        prev = cand
    return MonotoneEnvelope(tuple(xs))
