"""Smooth increasing maps of [0,1] with certified derivative oracles.

The centerpiece is a family of maps that are infinitely flat at 0 yet
strictly convex elsewhere, built from the bump W(x) = exp(-1/x^2) and
from bump sums whose coefficients follow an inductively built Schedule.
Coefficients like c_n or W(r_j - r_{n+1}) underflow any float, so every
oracle returns a LogReal; primitives of W reduce to upper incomplete
gamma values, bracketed two-sidedly so enclosures stay honest at
magnitudes like exp(-10^16).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import BudgetExceededError, ValidationError, VerificationFailed
from .logdomain import LogReal, ONE, ZERO
from .measures import SelfSimilarIFS, SimilarityMap, compose_word, \
    measure_interval
from .slowdecay import MonotoneEnvelope

__all__ = [
    "bump_w", "bump_w_d1", "bump_w_d2",
    "double_flat_h", "double_flat_h_d1", "double_flat_h_d2",
    "bump_primitive_bracket", "bump_second_primitive_bracket",
    "SmoothMapSpec", "Schedule", "r_of_psi",
    "eval_map", "eval_map_enclosure", "eval_rational",
    "derivative_bounds", "flat_excess",
    "build_schedule", "verify_schedule", "CheckRow", "ScheduleReport",
    "conjugate_derivatives", "zero_scan", "ZeroScanReport",
    "recurrence_zero_word", "RecurrenceWitness",
    "schedule_to_json_dict", "schedule_from_json_dict",
]


def _as_mpf(x) -> mp.mpf:
    if isinstance(x, mp.mpf):
        return x
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


# ---------------------------------------------------------------------------
# the bump and its doubly flat cousin, in closed form
# ---------------------------------------------------------------------------

def bump_w(x) -> LogReal:
    """W(x) = exp(-1/x^2) for x > 0, zero for x <= 0."""
    xm = _as_mpf(x)
    if xm <= 0:
        return ZERO
    return LogReal.exp(-1 / xm ** 2)


def bump_w_d1(x) -> LogReal:
    """W'(x) = 2 x^-3 W(x)."""
    xm = _as_mpf(x)
    if xm <= 0:
        return ZERO
    return LogReal.exp(mp.log(2) - 3 * mp.log(xm) - 1 / xm ** 2)


def bump_w_d2(x) -> LogReal:
    """W''(x) = (4 x^-6 - 6 x^-4) W(x); vanishes at x = sqrt(2/3)."""
    xm = _as_mpf(x)
    if xm <= 0:
        return ZERO
    u = 1 / xm ** 2
    poly = 4 * u ** 3 - 6 * u ** 2
    if poly == 0:
        return ZERO
    return LogReal.exp(mp.log(abs(poly)) - u, 1 if poly > 0 else -1)


def double_flat_h(x) -> LogReal:
    """h(x) = exp(-exp(1/x^2)) for x > 0, zero at x <= 0.

    Flat at 0 beyond all orders: even 1/h' outgrows every power of x.
    """
    xm = _as_mpf(x)
    if xm <= 0:
        return ZERO
    return LogReal.exp(-mp.exp(1 / xm ** 2))


def double_flat_h_d1(x) -> LogReal:
    """h'(x) = 2 x^-3 exp(1/x^2) h(x) > 0."""
    xm = _as_mpf(x)
    if xm <= 0:
        return ZERO
    u = 1 / xm ** 2
    return LogReal.exp(mp.log(2) - 3 * mp.log(xm) + u - mp.exp(u))


def double_flat_h_d2(x) -> LogReal:
    """h''(x) = ((2 x^-3 e^u)^2 - (6 x^-4 + 4 x^-6) e^u) h(x), u = 1/x^2.

    Positive on (0, 1]: e^u >= e > 1 + 1.5 x^2 there.
    """
    xm = _as_mpf(x)
    if xm <= 0:
        return ZERO
    u = 1 / xm ** 2
    a_log = mp.log(2) - 3 * mp.log(xm) + u
    b_log = u + mp.log(6 * xm ** -4 + 4 * xm ** -6)
    return (LogReal.exp(2 * a_log) - LogReal.exp(b_log)) \
        * LogReal.exp(-mp.exp(u))


# certified global bounds on [0, 1]:
#   h'' <= 4 u^3 e^{2u} h = 4 (ln s)^3 s^2 e^{-s} at s = e^u >= e, whose
#   log-derivative 3/(s ln s) + 2/s - 1 is negative for s >= 4.2 and whose
#   crude factor bound on [e, 4.2] stays under 14
_H_D2_CAP = 14.0
# h'(1) = 2 e^{1-e}; h' increases on (0,1] because h'' > 0 there
_H_D1_CAP = float(2 * mp.exp(1 - mp.e)) + 1e-12


# ---------------------------------------------------------------------------
# primitives of W via the upper incomplete gamma function
# ---------------------------------------------------------------------------

# guard precision for enclosure arithmetic: arguments like z = 1/u^2 and
# prefactors like e^-z must carry error far below every claimed width
_GUARD_PREC = 400


def _upper_gamma_bracket(a, z) -> tuple[LogReal, LogReal]:
    """Two-sided enclosure of Gamma(a, z) for a < 1, z > 0.

    For z >= 60 consecutive partial sums of z^(a-1) e^-z sum_k
    prod_i (a-i) / z^k bracket the value: the terms alternate in sign
    and shrink while k < z + a, so the truncation error carries the
    sign of the first omitted term.  Below 60 two working precisions
    of the library routine agree far beyond the widening applied.
    """
    with mp.workprec(_GUARD_PREC):
        a = mp.mpf(a)
        z = mp.mpf(z)
        if z >= 60:
            terms = 10
            s = mp.mpf(1)
            t = mp.mpf(1)
            prev = s
            for k in range(1, terms + 1):
                t *= (a - k) / z
                prev = s
                s += t
            lo_s, hi_s = (s, prev) if s < prev else (prev, s)
            pref = (a - 1) * mp.log(z) - z
            return (LogReal.exp(pref + mp.log(lo_s)),
                    LogReal.exp(pref + mp.log(hi_s)))
        with mp.workdps(50):
            g1 = mp.gammainc(a, z)
        with mp.workdps(100):
            g2 = mp.gammainc(a, z)
            width = 10 * abs(g1 - g2) + abs(g2) * mp.mpf(10) ** -80
            lo = LogReal.from_number(g2 - width)
            hi = LogReal.from_number(g2 + width)
        return (lo, hi)


def bump_primitive_bracket(u) -> tuple[LogReal, LogReal]:
    """Enclosure of V(u) = integral_0^u W = Gamma(-1/2, u^-2) / 2."""
    with mp.workprec(_GUARD_PREC):
        um = _as_mpf(u)
        if um <= 0:
            return (ZERO, ZERO)
        lo, hi = _upper_gamma_bracket(mp.mpf("-0.5"), 1 / um ** 2)
        half = LogReal.exp(-mp.log(2))
        return (lo * half, hi * half)


def bump_second_primitive_bracket(u) -> tuple[LogReal, LogReal]:
    """Enclosure of Q(u) = integral_0^u V = integral_0^u (u-v) W(v) dv.

    Q(u) = u V(u) - Gamma(-1, u^-2) / 2; the subtraction cancels one
    leading order in u^2, which the interval arithmetic absorbs.
    """
    with mp.workprec(_GUARD_PREC):
        um = _as_mpf(u)
        if um <= 0:
            return (ZERO, ZERO)
        vlo, vhi = bump_primitive_bracket(um)
        glo, ghi = _upper_gamma_bracket(mp.mpf(-1), 1 / um ** 2)
        uu = LogReal.from_number(um)
        half = LogReal.exp(-mp.log(2))
        qlo = uu * vlo - ghi * half
        qhi = uu * vhi - glo * half
        if qlo.sign <= 0:
            qlo = ZERO
        return (qlo, qhi)


def _bracket_mid(lo: LogReal, hi: LogReal) -> LogReal:
    if lo.is_zero():
        return hi if hi.is_zero() else LogReal.exp(hi.logmag - mp.log(2),
                                                   hi.sign)
    return LogReal.exp((lo.logmag + hi.logmag) / 2, lo.sign)


# ---------------------------------------------------------------------------
# schedules of breakpoints and coefficients
# ---------------------------------------------------------------------------

_SCHEDULE_VARIANTS = ("flat-cascade", "unit-slope")


@dataclass(frozen=True)
class Schedule:
    """Breakpoints and coefficients for a bump-sum construction.

    xi (increasing) and r (decreasing) carry n_terms + 2 entries, c
    carries n_terms, y carries n_terms + 1; psi_at_xi records the
    envelope values consumed, making the schedule self-auditing.  The
    flat-cascade variant additionally satisfies a mass-transfer bound
    that controls the double primitive of the bump sum; the unit-slope
    variant instead caps y by r^(1/r) so the drift term dominates.
    """

    variant: str
    xi: tuple
    r: tuple
    c: tuple
    y: tuple
    psi_at_xi: tuple

    def __post_init__(self):
        if self.variant not in _SCHEDULE_VARIANTS:
            raise ValidationError(f"unknown schedule variant {self.variant!r}")
        k = len(self.c)
        if k < 1 or len(self.xi) != k + 2 or len(self.r) != k + 2 \
                or len(self.y) != k + 1 or len(self.psi_at_xi) != k + 2:
            raise ValidationError("schedule sequences have mismatched lengths")

    def terms(self) -> int:
        return len(self.c)

    # 1-based accessors matching the construction indices
    def xi_at(self, n: int):
        return self.xi[n - 1]

    def r_at(self, n: int):
        return self.r[n - 1]

    def c_at(self, n: int) -> LogReal:
        return self.c[n - 1]

    def y_at(self, n: int) -> LogReal:
        return self.y[n - 1]


def r_of_psi(psi_value) -> mp.mpf:
    """The radius r = psi^(1/lnln(1/psi)); e.g. psi = e^-100 gives
    exp(-100/ln 100) ~ 3.7e-10.  Needs psi < e^-e so the inner log is
    positive and the map psi -> r is increasing."""
    p = _as_mpf(psi_value)
    if not 0 < p < mp.exp(-mp.e):
        raise ValidationError("radius relation needs 0 < psi < e^-e")
    s = -mp.log(p)
    return mp.exp(-s / mp.log(s))


def _schedule_g_terms(s: Schedule, x, order: int):
    xm = _as_mpf(x)
    fns = (bump_w, bump_w_d1, bump_w_d2)
    fn = fns[order]
    for n in range(1, s.terms() + 1):
        yield s.c_at(n) * fn(xm - s.r_at(n + 1))


def schedule_g(s: Schedule, x, order: int = 0) -> LogReal:
    """The bump sum g(x) = sum_n c_n W(x - r_{n+1}) or a derivative."""
    total = ZERO
    for term in _schedule_g_terms(s, x, order):
        total = total + term
    return total


def schedule_f_bracket(s: Schedule, x, *, order: int = 0,
                       with_linear_term: bool = False
                       ) -> tuple[LogReal, LogReal]:
    """Enclosure of the double primitive f(x) = [x +] sum_n c_n Q(x - r_{n+1})
    (order 0) or its derivative [1 +] sum_n c_n V(x - r_{n+1}) (order 1)."""
    with mp.workprec(_GUARD_PREC):
        xm = _as_mpf(x)
        lo = hi = ZERO
        bracket = bump_second_primitive_bracket if order == 0 \
            else bump_primitive_bracket
        for n in range(1, s.terms() + 1):
            blo, bhi = bracket(xm - s.r_at(n + 1))
            cn = s.c_at(n)
            lo = lo + cn * blo
            hi = hi + cn * bhi
        if with_linear_term:
            base = LogReal.from_number(x if isinstance(x, Fraction) else xm) \
                if order == 0 else ONE
            lo = lo + base
            hi = hi + base
        return (lo, hi)


# ---------------------------------------------------------------------------
# map specifications
# ---------------------------------------------------------------------------

_VARIANTS = ("identity", "affine", "poly-flat", "explicit-h",
             "explicit-x-plus-h", "bump-sum-g", "integrated-f",
             "affine-window")
_SCHEDULE_BACKED = ("bump-sum-g", "integrated-f")


@dataclass(frozen=True)
class SmoothMapSpec:
    """A named map of [0, 1] with value/d1/d2 oracles.

    identity and affine are the exact-arithmetic baseline; poly-flat is
    x + x^m; explicit-h is the doubly flat h alone and explicit-x-plus-h
    adds the drift x (slope stays in [1, 2]); bump-sum-g and
    integrated-f evaluate a built Schedule; affine-window has slope
    exactly 1 on a middle window and concave excess on both sides.
    """

    variant: str
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(0)
    m: int = 8
    schedule: Schedule | None = None
    with_linear_term: bool = True
    window: tuple[Fraction, Fraction] = (Fraction(2, 9), Fraction(1, 3))

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValidationError(f"unknown map variant {self.variant!r}")
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.variant == "affine" and self.a == 0:
            raise ValidationError("affine maps need a nonzero slope")
        if self.variant == "poly-flat" and self.m < 2:
            raise ValidationError("poly-flat needs an exponent >= 2")
        if self.variant == "affine-window":
            lo, hi = (Fraction(self.window[0]), Fraction(self.window[1]))
            if not 0 < lo < hi < 1:
                raise ValidationError("window must sit strictly inside (0,1)")
            object.__setattr__(self, "window", (lo, hi))

    @staticmethod
    def parse(text: str) -> "SmoothMapSpec":
        """Accepts "identity", "affine:1/2:1/3", "poly-flat:8",
        "explicit-h", "explicit-x-plus-h", "bump-sum-g", "integrated-f",
        "integrated-f:pure", "affine-window[:lo:hi]"."""
        parts = text.strip().split(":")
        head = parts[0]
        if head == "affine":
            if len(parts) != 3:
                raise ValidationError("affine needs slope and offset")
            return SmoothMapSpec("affine", a=Fraction(parts[1]),
                                 b=Fraction(parts[2]))
        if head == "poly-flat":
            if len(parts) != 2:
                raise ValidationError("poly-flat needs an exponent")
            return SmoothMapSpec("poly-flat", m=int(parts[1]))
        if head == "integrated-f" and len(parts) == 2:
            if parts[1] != "pure":
                raise ValidationError("integrated-f takes only ':pure'")
            return SmoothMapSpec("integrated-f", with_linear_term=False)
        if head == "affine-window" and len(parts) == 3:
            return SmoothMapSpec("affine-window",
                                 window=(Fraction(parts[1]),
                                         Fraction(parts[2])))
        if len(parts) == 1 and head in _VARIANTS:
            return SmoothMapSpec(head)
        raise ValidationError(f"cannot parse map spec {text!r}")


def _require_schedule(spec: SmoothMapSpec) -> Schedule:
    if spec.schedule is None:
        raise ValidationError(
            f"variant {spec.variant!r} needs a built schedule attached")
    return spec.schedule


def _window_lambda(spec: SmoothMapSpec) -> tuple[LogReal, LogReal]:
    """Enclosure of the right-side weight that makes f(1) = 1 for the
    affine-window variant: lambda = Q(lo) / Q(1 - hi)."""
    lo, hi = spec.window
    with mp.workprec(_GUARD_PREC):
        qn_lo, qn_hi = bump_second_primitive_bracket(lo)
        qd_lo, qd_hi = bump_second_primitive_bracket(1 - hi)
        return (qn_lo / qd_hi, qn_hi / qd_lo)


def _affine_window_enclosure(spec: SmoothMapSpec, x,
                             order: int) -> tuple[LogReal, LogReal]:
    wlo, whi = spec.window
    with mp.workprec(_GUARD_PREC):
        lam_lo, lam_hi = _window_lambda(spec)
        # rational x keeps lo - x and x - hi exact, so equal arguments
        # round identically everywhere (f(1) reuses the lambda denominator)
        if isinstance(x, (int, Fraction)):
            xq = Fraction(x)
            d_left, d_right = wlo - xq, xq - whi
        else:
            xm = _as_mpf(x)
            d_left, d_right = _as_mpf(wlo) - xm, xm - _as_mpf(whi)
        if order == 0:
            left_lo, left_hi = bump_second_primitive_bracket(wlo)
            cut_lo, cut_hi = bump_second_primitive_bracket(d_left)
            right_lo, right_hi = bump_second_primitive_bracket(d_right)
            base = LogReal.from_number(x)
            out_lo = base + left_lo - cut_hi - lam_hi * right_hi
            out_hi = base + left_hi - cut_lo - lam_lo * right_lo
            return (out_lo, out_hi)
        if order == 1:
            v_lo, v_hi = bump_primitive_bracket(d_left)
            w_lo, w_hi = bump_primitive_bracket(d_right)
            return (ONE + v_lo - lam_hi * w_hi, ONE + v_hi - lam_lo * w_lo)
        d2 = -bump_w(d_left)
        tail = bump_w(d_right)
        return (d2 - lam_hi * tail, d2 - lam_lo * tail)


def eval_map_enclosure(spec: SmoothMapSpec, x,
                       order: int = 0) -> tuple[LogReal, LogReal]:
    """Two-sided enclosure of the map value (order 0), f' (1) or f'' (2).

    Closed-form variants return a degenerate enclosure; variants built
    on bump primitives return genuine gamma-function brackets.
    """
    if order not in (0, 1, 2):
        raise ValidationError("order must be 0, 1 or 2")
    v = spec.variant
    if v in ("identity", "affine", "poly-flat", "explicit-h",
             "explicit-x-plus-h", "bump-sum-g"):
        out = _eval_closed(spec, x, order)
        return (out, out)
    if v == "integrated-f":
        s = _require_schedule(spec)
        if order == 2:
            out = schedule_g(s, x, 0)
            return (out, out)
        return schedule_f_bracket(s, x, order=order,
                                  with_linear_term=spec.with_linear_term)
    return _affine_window_enclosure(spec, x, order)


def _eval_closed(spec: SmoothMapSpec, x, order: int) -> LogReal:
    v = spec.variant
    if v == "identity":
        if order == 0:
            return LogReal.from_number(x)
        return ONE if order == 1 else ZERO
    if v == "affine":
        if order == 0:
            if isinstance(x, (int, Fraction)):
                return LogReal.from_number(spec.a * Fraction(x) + spec.b)
            return LogReal.from_number(spec.a) * LogReal.from_number(_as_mpf(x)) \
                + LogReal.from_number(spec.b)
        if order == 1:
            return LogReal.from_number(spec.a)
        return ZERO
    xm = _as_mpf(x)
    if xm < 0:
        raise ValidationError("flat variants are defined for x >= 0")
    if v == "poly-flat":
        m = spec.m
        if isinstance(x, (int, Fraction)):
            xq = Fraction(x)
            vals = (xq + xq ** m, 1 + m * xq ** (m - 1),
                    m * (m - 1) * (xq ** (m - 2) if m > 2 else 1))
            return LogReal.from_number(vals[order])
        vals = (xm + xm ** m, 1 + m * xm ** (m - 1),
                m * (m - 1) * xm ** (m - 2))
        return LogReal.from_number(vals[order])
    if v == "explicit-h":
        return (double_flat_h, double_flat_h_d1, double_flat_h_d2)[order](xm)
    if v == "explicit-x-plus-h":
        if order == 0:
            return LogReal.from_number(x if isinstance(x, (int, Fraction))
                                       else xm) + double_flat_h(xm)
        if order == 1:
            return ONE + double_flat_h_d1(xm)
        return double_flat_h_d2(xm)
    if v == "bump-sum-g":
        return schedule_g(_require_schedule(spec), xm, order)
    raise ValidationError(f"unhandled variant {v!r}")


def eval_map(spec: SmoothMapSpec, x, order: int = 0) -> LogReal:
    """Value (order 0), first (1) or second (2) derivative as a LogReal.

    Bracket-backed variants return the enclosure midpoint; use
    eval_map_enclosure when the width matters.
    """
    lo, hi = eval_map_enclosure(spec, x, order)
    if lo is hi or lo == hi:
        return lo
    return _bracket_mid(lo, hi)


def eval_rational(spec: SmoothMapSpec, x: Fraction,
                  order: int = 0) -> Fraction | None:
    """Exact rational evaluation where the variant allows it, else None."""
    xq = Fraction(x)
    if spec.variant == "identity":
        return (xq, Fraction(1), Fraction(0))[order]
    if spec.variant == "affine":
        return (spec.a * xq + spec.b, spec.a, Fraction(0))[order]
    if spec.variant == "poly-flat":
        m = spec.m
        return (xq + xq ** m, 1 + m * xq ** (m - 1),
                Fraction(m * (m - 1)) * xq ** (m - 2) if m > 2
                else Fraction(m * (m - 1)))[order]
    return None


def flat_excess(spec: SmoothMapSpec, x) -> tuple[LogReal, LogReal]:
    """Enclosure of f(x) - x, the deviation from the identity."""
    v = spec.variant
    if v == "identity":
        return (ZERO, ZERO)
    if v == "affine":
        xq = Fraction(x) if isinstance(x, (int, Fraction)) else None
        if xq is not None:
            out = LogReal.from_number((spec.a - 1) * xq + spec.b)
            return (out, out)
        out = LogReal.from_number((_as_mpf(spec.a) - 1) * _as_mpf(x)
                                  + _as_mpf(spec.b))
        return (out, out)
    if v == "poly-flat":
        if isinstance(x, (int, Fraction)):
            out = LogReal.from_number(Fraction(x) ** spec.m)
        else:
            out = LogReal.from_number(_as_mpf(x) ** spec.m)
        return (out, out)
    if v == "explicit-h":
        xm = _as_mpf(x)
        out = double_flat_h(xm) - LogReal.from_number(x)
        return (out, out)
    if v == "explicit-x-plus-h":
        out = double_flat_h(_as_mpf(x))
        return (out, out)
    if v == "bump-sum-g":
        out = schedule_g(_require_schedule(spec), x, 0) - LogReal.from_number(x)
        return (out, out)
    if v == "integrated-f":
        s = _require_schedule(spec)
        lo, hi = schedule_f_bracket(s, x, order=0, with_linear_term=False)
        if spec.with_linear_term:
            return (lo, hi)
        base = LogReal.from_number(x)
        return (lo - base, hi - base)
    lo, hi = _affine_window_enclosure(spec, x, 0)
    base = LogReal.from_number(x)
    return (lo - base, hi - base)


def _logreal_float_cap(v: LogReal, *, floor: float = 0.0) -> float:
    if v.sign <= 0:
        return floor
    if v.logmag > 700:
        return float("inf")
    if v.logmag < -745:
        return floor
    return max(floor, float(mp.exp(v.logmag)))


def derivative_bounds(spec: SmoothMapSpec, lo, hi) -> tuple[float, float]:
    """Certified (sup |f'|, sup |f''|) over [lo, hi] in [0, 1]."""
    lo_m, hi_m = _as_mpf(lo), _as_mpf(hi)
    if lo_m > hi_m:
        raise ValidationError("interval bounds out of order")
    v = spec.variant
    if v == "identity":
        return (1.0, 0.0)
    if v == "affine":
        return (abs(float(spec.a)), 0.0)
    if v == "poly-flat":
        m = spec.m
        h = float(hi_m)
        return (1.0 + m * h ** (m - 1), m * (m - 1) * h ** (m - 2))
    if v in ("explicit-h", "explicit-x-plus-h"):
        drift = 1.0 if v == "explicit-x-plus-h" else 0.0
        d1 = drift + _logreal_float_cap(double_flat_h_d1(hi_m))
        # h'' <= (2 x^-3 e^u)^2 h, increasing up to x ~ 0.49, capped globally
        if hi_m <= mp.mpf("0.49"):
            u = 1 / hi_m ** 2
            cap = LogReal.exp(2 * (mp.log(2) - 3 * mp.log(hi_m) + u)
                              - mp.exp(u))
            d2 = _logreal_float_cap(cap)
        else:
            d2 = _H_D2_CAP
        return (min(d1, 1.0 + _H_D1_CAP if drift else _H_D1_CAP), d2)
    if v in _SCHEDULE_BACKED:
        s = _require_schedule(spec)
        if v == "bump-sum-g":
            # global maxima: W' < 0.82 (at x = sqrt(2/3)), |W''| < 3
            d1 = d2 = 0.0
            for n in range(1, s.terms() + 1):
                cn = _logreal_float_cap(s.c_at(n), floor=0.0)
                d1 += cn * 0.82
                d2 += cn * 3.0
            return (d1, d2)
        drift = 1.0 if spec.with_linear_term else 0.0
        vsum = ZERO
        for n in range(1, s.terms() + 1):
            vsum = vsum + s.c_at(n) * bump_primitive_bracket(
                hi_m - s.r_at(n + 1))[1]
        d1 = drift + _logreal_float_cap(vsum)
        d2 = _logreal_float_cap(schedule_g(s, hi_m, 0))
        return (d1, d2)
    wlo, whi = spec.window
    lam_hi = _window_lambda(spec)[1]
    v_left = bump_primitive_bracket(_as_mpf(wlo) - lo_m)[1]
    v_right = lam_hi * bump_primitive_bracket(hi_m - _as_mpf(whi))[1]
    d1 = 1.0 + _logreal_float_cap(v_left) + _logreal_float_cap(v_right)
    w_left = bump_w(_as_mpf(wlo) - lo_m)
    w_right = lam_hi * bump_w(hi_m - _as_mpf(whi))
    d2 = _logreal_float_cap(w_left) + _logreal_float_cap(w_right)
    return (d1, d2)


# ---------------------------------------------------------------------------
# inductive schedule construction
# ---------------------------------------------------------------------------

_SCHEDULE_PREC = 192


def build_schedule(psi: MonotoneEnvelope, variant: str,
                   n_terms: int) -> Schedule:
    """Build breakpoints and coefficients against a decreasing envelope.

    Walks xi forward by adaptive halving until the radius spacing
    r_{n+1} >= r_n - e^{-1/r_n} holds with slack 2 and the density
    ratio (xi_{n+1} - xi_n)/psi(xi_{n+1}) halves at every step; then
    sets each c_n to half its largest admissible value and each y_{n+1}
    to half its cap, so every inequality carries slack factor >= 2.
    """
    if variant not in _SCHEDULE_VARIANTS:
        raise ValidationError(f"unknown schedule variant {variant!r}")
    if n_terms < 2:
        raise ValidationError("a schedule needs at least two terms")
    with mp.workprec(_SCHEDULE_PREC):
        start = psi.knot_index_for(mp.exp(-mp.e) / 2)
        xi = [mp.mpf(psi.xs[start - 1])]
        psis = [psi.psi(xi[0])]
        rs = [r_of_psi(psis[0])]
        delta = mp.mpf(1)
        prev_ratio = None
        for idx in range(2, n_terms + 3):
            placed = False
            for _ in range(300):
                cand = xi[-1] + delta
                try:
                    pv = psi.psi(cand)
                except ValidationError:
                    delta /= 2
                    continue
                rv = r_of_psi(pv)
                if rs[-1] - rv > mp.exp(-1 / rs[-1]) / 2:
                    delta /= 2
                    continue
                ratio = delta / pv
                if prev_ratio is not None and ratio > prev_ratio / 2:
                    delta /= 2
                    continue
                placed = True
                break
            if not placed:
                raise VerificationFailed(
                    f"breakpoint {idx} infeasible: spacing and density "
                    f"constraints left no admissible step within the "
                    f"halving budget")
            xi.append(cand)
            psis.append(pv)
            rs.append(rv)
            prev_ratio = ratio

        ln2 = mp.log(2)
        half = LogReal.exp(-ln2)
        hundredth = LogReal.from_number(Fraction(1, 100))
        ys = [hundredth / LogReal.from_number(xi[1])
              if xi[1] > 1 else hundredth]
        cs = []
        for n in range(1, n_terms + 1):
            caps = [LogReal.exp(-n * ln2)]
            for j in range(1, n + 1):
                w = bump_w(rs[j - 1] - rs[n])
                caps.append(LogReal.exp(-(n + 1 - j) * ln2) * ys[j - 1] / w)
            cn = min(caps) * half
            if cn.sign <= 0:
                raise VerificationFailed(
                    f"coefficient {n} collapsed to zero; radii are too close")
            cs.append(cn)
            dn = rs[n - 1] - rs[n]
            wn = bump_w(dn)
            if variant == "flat-cascade":
                ycaps = [hundredth / LogReal.from_number(xi[n + 1])]
            else:
                ycaps = [hundredth / LogReal.from_number(xi[n])]
            ycaps.append(hundredth * (cn * wn) ** (1 / rs[n - 1]))
            if variant == "flat-cascade":
                qlo = bump_second_primitive_bracket(dn)[0]
                ycaps.append(LogReal.from_number(Fraction(1, 50)) * cn * qlo
                             / LogReal.from_number(rs[n] ** 2))
            else:
                ycaps.append(hundredth
                             * LogReal.exp(mp.log(rs[n]) / rs[n]))
            yn = min(ycaps) * half
            if yn.sign <= 0:
                raise VerificationFailed(
                    f"flatness cap {n + 1} collapsed to zero")
            ys.append(yn)
        return Schedule(variant=variant, xi=tuple(xi), r=tuple(rs),
                        c=tuple(cs), y=tuple(ys), psi_at_xi=tuple(psis))


# ---------------------------------------------------------------------------
# schedule audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckRow:
    index: int
    name: str
    ok: bool
    margin: float

    def line(self) -> str:
        state = "ok  " if self.ok else "FAIL"
        return f"  [{state}] n={self.index:<3d} {self.name:<22s} " \
               f"margin={self.margin:+.6g}"


@dataclass(frozen=True)
class ScheduleReport:
    variant: str
    rows: tuple[CheckRow, ...]

    def all_ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> tuple[CheckRow, ...]:
        return tuple(r for r in self.rows if not r.ok)

    def lines(self) -> list[str]:
        out = [f"schedule audit ({self.variant}): "
               f"{len(self.rows)} checks, "
               f"{len(self.failures())} failures"]
        out.extend(r.line() for r in self.rows)
        return out


def _margin_row(index: int, name: str, lhs: LogReal,
                rhs: LogReal) -> CheckRow:
    """lhs <= rhs with margin ln(rhs) - ln(lhs); zero lhs passes with inf."""
    if lhs.sign <= 0:
        return CheckRow(index, name, rhs.sign >= 0, float("inf"))
    if rhs.sign <= 0:
        return CheckRow(index, name, False, float("-inf"))
    diff = rhs.logmag - lhs.logmag
    m = float(diff) if abs(diff) < 1e300 else math.copysign(1e300, diff)
    return CheckRow(index, name, diff >= 0, m)


def verify_schedule(s: Schedule) -> ScheduleReport:
    """Audit every schedule inequality and the contraction conclusions.

    Failures never raise; each check lands in a row with its log-domain
    margin so a corrupted coefficient is pinpointed by index.
    """
    rows: list[CheckRow] = []
    k = s.terms()
    with mp.workprec(_SCHEDULE_PREC):
        ln2 = mp.log(2)
        hundredth = LogReal.from_number(Fraction(1, 100))
        # spacing and density of the breakpoints
        prev_ratio = None
        for n in range(1, k + 2):
            r_n, r_next = s.r_at(n), s.r_at(n + 1)
            lhs = LogReal.from_number(r_n - r_next)
            rhs = LogReal.exp(-1 / r_n)
            rows.append(_margin_row(n, "radius-spacing", lhs, rhs))
            ratio = (s.xi_at(n + 1) - s.xi_at(n)) / s.psi_at_xi[n]
            if prev_ratio is not None:
                rows.append(_margin_row(
                    n, "density-halving",
                    LogReal.from_number(ratio),
                    LogReal.from_number(prev_ratio / 2)))
            prev_ratio = ratio
            back = r_of_psi(s.psi_at_xi[n - 1])
            drift = abs(back - r_n)
            rows.append(CheckRow(n, "radius-consistency",
                                 bool(drift <= mp.mpf(2) ** -100),
                                 float(-mp.log(drift + mp.mpf(2) ** -190))))
        y1_cap = hundredth / LogReal.from_number(s.xi_at(2)) \
            if s.xi_at(2) > 1 else hundredth
        # equality-tight by construction; 1e-30 absorbs decimal round trips
        m1 = float(y1_cap.logmag - s.y_at(1).logmag)
        rows.append(CheckRow(1, "start-level", m1 >= -1e-30, m1))
        for n in range(1, k + 1):
            cn = s.c_at(n)
            rows.append(_margin_row(n, "coefficient-cap", cn,
                                    LogReal.exp(-n * ln2)))
            worst: CheckRow | None = None
            for j in range(1, n + 1):
                row = _margin_row(
                    n, "coefficient-window",
                    cn * bump_w(s.r_at(j) - s.r_at(n + 1)),
                    LogReal.exp(-(n + 1 - j) * ln2) * s.y_at(j))
                if worst is None or row.margin < worst.margin:
                    worst = row
            rows.append(worst)
            dn = s.r_at(n) - s.r_at(n + 1)
            wn = bump_w(dn)
            ynext = s.y_at(n + 1)
            if s.variant == "flat-cascade":
                rows.append(_margin_row(
                    n + 1, "level-frequency-cap", ynext,
                    hundredth / LogReal.from_number(s.xi_at(n + 2))))
            else:
                rows.append(_margin_row(
                    n + 1, "level-frequency-cap", ynext,
                    hundredth / LogReal.from_number(s.xi_at(n + 1))))
            rows.append(_margin_row(
                n + 1, "level-flatness-cap", ynext,
                hundredth * (cn * wn) ** (1 / s.r_at(n))))
            if s.variant == "flat-cascade":
                qlo = bump_second_primitive_bracket(dn)[0]
                rows.append(_margin_row(
                    n + 1, "mass-transfer",
                    ynext * LogReal.from_number(s.r_at(n + 1) ** 2 / 2),
                    hundredth * cn * qlo))
            else:
                rows.append(_margin_row(
                    n + 1, "level-radius-cap", ynext,
                    hundredth * LogReal.exp(mp.log(s.r_at(n + 1))
                                            / s.r_at(n + 1))))
        # contraction conclusions
        g_at = {n: schedule_g(s, s.r_at(n), 0) for n in range(1, k + 2)}
        for n in range(1, k + 2):
            rows.append(_margin_row(n, "peak-below-level",
                                    g_at[n], s.y_at(n)))
        for n in range(1, k + 1):
            gn = g_at[n]
            if gn.sign > 0:
                rhs = hundredth * gn ** (1 / s.r_at(n))
            else:
                rhs = ZERO
            rows.append(_margin_row(n, "peak-contraction",
                                    g_at[n + 1], rhs))
        if s.variant == "flat-cascade":
            f_lo = {}
            f_hi = {}
            for n in range(1, k + 2):
                f_lo[n], f_hi[n] = schedule_f_bracket(
                    s, s.r_at(n), order=0, with_linear_term=False)
            for n in range(1, k + 1):
                rows.append(_margin_row(n, "mass-contraction",
                                        f_hi[n + 1], hundredth * f_lo[n]))
                rows.append(_margin_row(
                    n, "frequency-flatness",
                    LogReal.from_number(s.xi_at(n + 1)) * f_hi[n],
                    hundredth))
    return ScheduleReport(variant=s.variant, rows=tuple(rows))


# ---------------------------------------------------------------------------
# schedule serialization
# ---------------------------------------------------------------------------

# 62 decimal digits uniquely identify a 192-bit float, so parsing at the
# same working precision recovers the exact bits; anything shorter lets
# W(r_n - r_{n+1}) drift by e^(10^5) at depth 20
_JSON_DIGITS = 62


def _logreal_to_json(v: LogReal) -> dict:
    return {"sign": v.sign,
            "ln": mp.nstr(v.logmag, _JSON_DIGITS) if v.sign != 0 else "0",
            "prec": _JSON_DIGITS}


def _logreal_from_json(d: dict) -> LogReal:
    sign = int(d["sign"])
    if sign == 0:
        return ZERO
    return LogReal.exp(mp.mpf(d["ln"]), sign)


def _mpf_to_json(v) -> dict:
    return {"dec": mp.nstr(mp.mpf(v), _JSON_DIGITS), "prec": _JSON_DIGITS}


def schedule_to_json_dict(s: Schedule) -> dict:
    with mp.workprec(_SCHEDULE_PREC):
        return {
            "variant": s.variant,
            "xi": [_mpf_to_json(v) for v in s.xi],
            "r": [_mpf_to_json(v) for v in s.r],
            "psi_at_xi": [_mpf_to_json(v) for v in s.psi_at_xi],
            "c": [_logreal_to_json(v) for v in s.c],
            "y": [_logreal_to_json(v) for v in s.y],
        }


def schedule_from_json_dict(d: dict) -> Schedule:
    with mp.workprec(_SCHEDULE_PREC):
        return Schedule(
            variant=d["variant"],
            xi=tuple(mp.mpf(v["dec"]) for v in d["xi"]),
            r=tuple(mp.mpf(v["dec"]) for v in d["r"]),
            psi_at_xi=tuple(mp.mpf(v["dec"]) for v in d["psi_at_xi"]),
            c=tuple(_logreal_from_json(v) for v in d["c"]),
            y=tuple(_logreal_from_json(v) for v in d["y"]),
        )


# ---------------------------------------------------------------------------
# conjugation through a similarity
# ---------------------------------------------------------------------------

def conjugate_derivatives(f: SmoothMapSpec, T: SimilarityMap,
                          x) -> tuple[LogReal, LogReal, LogReal]:
    """Derivatives of S = f o T o f^-1 at the point f(x), closed form.

    S(f(x)) = f(Tx); S' = rho f'(Tx)/f'(x);
    S'' = rho (rho f''(Tx) f'(x) - f'(Tx) f''(x)) / f'(x)^3.
    No numeric inversion of f is ever performed.
    """
    tx = T(Fraction(x)) if isinstance(x, (int, Fraction)) else \
        _as_mpf(T.ratio) * _as_mpf(x) + _as_mpf(T.translation)
    f1_x = eval_map(f, x, 1)
    if f1_x.is_zero():
        raise ValidationError(
            "singular conjugation: the map has zero slope at this point")
    rho = LogReal.from_number(Fraction(T.ratio))
    f1_tx = eval_map(f, tx, 1)
    f2_tx = eval_map(f, tx, 2)
    f2_x = eval_map(f, x, 2)
    s_value = eval_map(f, tx, 0)
    s_d1 = rho * f1_tx / f1_x
    s_d2 = rho * (rho * f2_tx * f1_x - f1_tx * f2_x) / f1_x ** 3
    return (s_value, s_d1, s_d2)


# ---------------------------------------------------------------------------
# sign scanning for the conjugated second derivative
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroScanReport:
    """Sign structure of S'' along one branch over a scan interval."""

    interval: tuple[float, float]
    grid_n: int
    sign_changes: int
    brackets: tuple[tuple[float, float], ...]
    refine_sign_changes: int
    stable: bool
    near_zero: tuple[tuple[float, int, bool], ...]
    confident_sign: int
    confident_up_to: float | None
    confident_up_to_y: float | None


def _s_d2_sign(f: SmoothMapSpec, T: SimilarityMap, x: Fraction) -> int:
    if x == 0:
        return 0
    return conjugate_derivatives(f, T, x)[2].sign


def _dominance(f: SmoothMapSpec, T: SimilarityMap,
               x: Fraction) -> tuple[int, bool]:
    """Sign of S'' with a factor-5 dominance certificate.

    S'' shares the sign of A - B with A = rho^2 f''(Tx) f'(x) and
    B = rho f'(Tx) f''(x); when A and B agree in sign the call is
    confident only if one exceeds five times the other.
    """
    rho = LogReal.from_number(Fraction(T.ratio))
    tx = T(x)
    a = rho * rho * eval_map(f, tx, 2) * eval_map(f, x, 1)
    b = rho * eval_map(f, tx, 1) * eval_map(f, x, 2)
    diff = a - b
    if a.sign * b.sign <= 0:
        return (diff.sign, True)
    five = LogReal.from_number(5)
    confident = abs(a) >= five * abs(b) or abs(b) >= five * abs(a)
    return (diff.sign, confident)


def zero_scan(f: SmoothMapSpec, word_map: SimilarityMap, interval,
              grid_n: int = 64) -> ZeroScanReport:
    """Bracket the sign changes of S'' = (f o T o f^-1)'' over a grid.

    Brackets are bisection-refined to width 1e-12 and the count is
    re-derived on a 4x finer grid; near 0 no bracket is claimed, only a
    sign profile along a dyadic approach with dominance certificates.
    """
    if grid_n < 16:
        raise ValidationError("need at least 16 grid cells")
    lo = Fraction(interval[0])
    hi = Fraction(interval[1])
    if not 0 <= lo < hi <= 1:
        raise ValidationError("scan interval must sit inside [0, 1]")
    start = lo if lo > 0 else hi / 10 ** 9

    def grid_signs(cells: int) -> tuple[list[Fraction], list[int]]:
        xs = [start + (hi - start) * k / cells for k in range(cells + 1)]
        return xs, [_s_d2_sign(f, word_map, x) for x in xs]

    with mp.workprec(_SCHEDULE_PREC):
        xs, signs = grid_signs(grid_n)
        raw = [(xs[i], xs[i + 1]) for i in range(len(xs) - 1)
               if signs[i] * signs[i + 1] < 0]
        refined = []
        for a, b in raw:
            sa = _s_d2_sign(f, word_map, a)
            while b - a > Fraction(1, 10 ** 12):
                mid = (a + b) / 2
                sm = _s_d2_sign(f, word_map, mid)
                if sm == 0:
                    a = b = mid
                    break
                if sm == sa:
                    a = mid
                else:
                    b = mid
            refined.append((float(a), float(b)))
        _, signs4 = grid_signs(grid_n * 4)
        changes4 = sum(1 for i in range(len(signs4) - 1)
                       if signs4[i] * signs4[i + 1] < 0)

        near = []
        confident_sign = 0
        confident_up_to = None
        if lo == 0:
            for k in range(1, 61):
                xk = hi / 2 ** k
                sk, conf = _dominance(f, word_map, xk)
                near.append((float(xk), sk, conf))
            # largest prefix of the approach to 0 (ascending in x) that is
            # uniformly confident with one sign
            asc = list(reversed(near))
            if asc and asc[0][2] and asc[0][1] != 0:
                confident_sign = asc[0][1]
                for xv, sk, conf in asc:
                    if conf and sk == confident_sign:
                        confident_up_to = xv
                    else:
                        break
        up_to_y = None
        if confident_up_to is not None:
            up_to_y = eval_map(f, confident_up_to, 0).to_float()
    return ZeroScanReport(
        interval=(float(lo), float(hi)), grid_n=grid_n,
        sign_changes=len(raw), brackets=tuple(refined),
        refine_sign_changes=changes4, stable=changes4 == len(raw),
        near_zero=tuple(near), confident_sign=confident_sign,
        confident_up_to=confident_up_to, confident_up_to_y=up_to_y)


# ---------------------------------------------------------------------------
# recurrence words for vanishing second derivatives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RecurrenceWitness:
    """A word whose branch returns part of Z into Z with positive mass."""

    word: tuple[int, ...]
    overlap: tuple[tuple[Fraction, Fraction], ...]
    measure_lower: Fraction
    measure_upper: Fraction

    @property
    def letters(self) -> tuple[int, ...]:
        """1-based letters for display."""
        return tuple(a + 1 for a in self.word)


def _normalize_intervals(z) -> list[tuple[Fraction, Fraction]]:
    if z and isinstance(z[0], (int, float, Fraction)):
        z = [z]
    cleaned = []
    for pair in z:
        a, b = Fraction(pair[0]), Fraction(pair[1])
        if not 0 <= a <= b <= 1:
            raise ValidationError("target intervals must sit inside [0, 1]")
        if a < b:
            cleaned.append((a, b))
    cleaned.sort()
    merged: list[tuple[Fraction, Fraction]] = []
    for a, b in cleaned:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
        else:
            merged.append((a, b))
    return merged


def recurrence_zero_word(z, ifs: SelfSimilarIFS, max_depth: int,
                         *, tol: float = 1e-9,
                         word_budget: int = 200_000
                         ) -> RecurrenceWitness | None:
    """Find a word w with mu{x in Z : T_w(x) in Z} > 0, or None.

    Z is a finite union of rational intervals.  Words are searched in
    depth-then-lexicographic order; the overlap Z given T_w^{-1}(Z) is
    intersected exactly and its measure bounded by cylinder counting, so
    a returned witness is certified, and a Z of measure below tol
    short-circuits to None.
    """
    if max_depth < 1:
        raise ValidationError("need depth >= 1")
    intervals = _normalize_intervals(z)
    if not intervals:
        return None
    total_hi = sum(measure_interval(ifs, pair, tol)[1]
                   for pair in intervals)
    if total_hi <= tol:
        return None
    arity = ifs.arity
    checked = 0
    for depth in range(1, max_depth + 1):
        word = [0] * depth
        while True:
            checked += 1
            if checked > word_budget:
                raise BudgetExceededError(
                    f"recurrence search exceeded {word_budget} words")
            comp = compose_word(ifs, tuple(word))
            rho, d = comp.ratio, comp.translation
            pieces = []
            for (za, zb) in intervals:
                pa, pb = (za - d) / rho, (zb - d) / rho
                for (qa, qb) in intervals:
                    a, b = max(pa, qa), min(pb, qb)
                    if a < b:
                        pieces.append((a, b))
            if pieces:
                lo = hi = Fraction(0)
                for pair in pieces:
                    piece_lo, piece_hi = measure_interval(ifs, pair, tol)
                    lo += piece_lo
                    hi += piece_hi
                if lo > 0:
                    return RecurrenceWitness(
                        word=tuple(word), overlap=tuple(pieces),
                        measure_lower=lo, measure_upper=hi)
            # next word in lexicographic order
            i = depth - 1
            while i >= 0 and word[i] == arity - 1:
                word[i] = 0
                i -= 1
            if i < 0:
                break
            word[i] += 1
    return None
