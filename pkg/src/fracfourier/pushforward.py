"""Oscillatory integrals of smooth images of self-similar measures.

The central quantity is I(xi) = integral of e^{2 pi i xi f(x)} dmu(x).
It is computed by recursive cylinder subdivision: a cylinder becomes a
leaf once the phase 2 pi xi f is close enough to constant (plain leaf)
or to affine (linearized leaf) across it, and every approximation step
is charged to a certified error radius.  Linearized leaves reuse the
exact transform of the measure itself at a rescaled frequency, which is
what makes astronomically oscillatory integrands tractable: the flat
part of the map is resolved symbolically while the self-similar tail is
a single product-formula evaluation.

On top of the integrator sit the diagnostics: a three-region split of
the integral, selection of the largest frequency a flat window can
absorb, the near-zero lower-bound check, and empirical decay profiles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .errors import BudgetExceededError, ValidationError
from .fourier import ExactFrequency, FourierValue, ft_digit_system
from .logdomain import LogReal
from .measures import (SelfSimilarIFS, SimilarityMap, Word, compose_word,
                       frostman_exponent, measure_interval, word_prob)
from .smoothmaps import (SmoothMapSpec, derivative_bounds, double_flat_h,
                         eval_map, eval_map_enclosure, eval_rational,
                         flat_excess)

__all__ = [
    "OscIntegralResult", "RegionReport", "KnResult", "NearZeroReport",
    "ProfileRow", "DecayProfile",
    "pushforward_ft", "stopping_quadrature", "region_report",
    "select_kn", "near_zero_check", "decay_profile",
]

# leftover budget for float rounding in the compensated sums
_ROUND_SLACK = 1e-14
# extra phase slack charged once per leaf that went through mpf arithmetic
_MPF_PHASE_SLACK = 1e-20
_MAX_DEPTH = 4000


@dataclass(frozen=True)
class OscIntegralResult:
    """Value of an oscillatory integral with a certified error radius."""

    re: float
    im: float
    err: float
    leaf_count: int
    depth_max: int

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return abs(self.value)

    def modulus_bounds(self) -> tuple[float, float]:
        m = self.modulus
        return (max(0.0, m - self.err), m + self.err)


class _Kahan:
    """Compensated accumulator; keeps the sum error at a few ulps."""

    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x: float):
        y = x - self.c
        t = self.s + y
        self.c = (t - self.s) - y
        self.s = t


def _mpf_to_fraction(x) -> Fraction:
    if not mp.isfinite(x):
        raise ValidationError(f"cannot convert {x!r} to a rational")
    sign, man, exp, _ = mp.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    q = Fraction(int(man)) * Fraction(2) ** exp
    return -q if sign else q


def _unit_phase(t: Fraction) -> complex:
    """e^{2 pi i t} with the mod-1 reduction done exactly."""
    tt = t - (t.numerator // t.denominator)
    return cmath.exp(2j * math.pi * float(tt))


def _enclosure_mid_width(spec: SmoothMapSpec, x: Fraction,
                         order: int) -> tuple[mp.mpf, float]:
    lo, hi = eval_map_enclosure(spec, x, order)
    vlo, vhi = lo.to_mpf(), hi.to_mpf()
    return (vlo + vhi) / 2, abs(float(vhi - vlo))


def pushforward_ft(ifs: SelfSimilarIFS, f: SmoothMapSpec, xi,
                   tol: float = 1e-6, *, linearize: bool = True,
                   root_word: Word = (), eps_leaf: float | None = None,
                   leaf_budget: int = 10 ** 8) -> OscIntegralResult:
    """Certified integral of e^{2 pi i xi f(x)} dmu(x) over a cylinder.

    Subdivision stops at a cylinder C of diameter d when either
    2 pi |xi| sup_C |f''| d^2 <= eps_leaf (linearized leaf: f is replaced
    by a tangent line and the remaining factor is the exact measure
    transform at the rescaled frequency) or
    2 pi |xi| sup_C |f'| d <= eps_leaf (plain leaf: f is frozen at the
    midpoint).  Every leaf charges its full approximation bound plus the
    tail-transform error to ``err``, so the result is an enclosure.

    root_word restricts the integral to that cylinder; the reported
    value then carries the cylinder mass (it is not renormalized).
    eps_leaf defaults to tol/4, which also caps each leaf's tail
    tolerance, keeping the total error below tol on success.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    xiq = ExactFrequency.of(xi)
    if xiq.log10_abs() > 306:
        raise ValidationError("frequency is outside the float-feasible range")
    eps = tol / 4.0 if eps_leaf is None else float(eps_leaf)
    if eps <= 0:
        raise ValidationError("eps_leaf must be positive")
    xi_frac = xiq.as_fraction()
    xi_f = float(xi_frac)
    two_pi_xi = 2.0 * math.pi * abs(xi_f)
    can_linearize = linearize and ifs.digit_view() is not None

    h0, h1 = ifs.attractor_hull()
    hw = h1 - h0
    R, D, P = Fraction(1), Fraction(0), Fraction(1)
    for a in root_word:
        if not 0 <= a < ifs.arity:
            raise ValidationError(f"word letter {a} outside 0..{ifs.arity - 1}")
        sm = ifs.maps[a]
        R, D = R * sm.ratio, R * sm.translation + D
        P *= ifs.probs[a]

    # enough absolute phase precision for frac(xi * f) at this frequency
    prec = 160 + max(0, int(3.33 * max(0.0, xiq.log10_abs())) + 4)
    sre, sim = _Kahan(), _Kahan()
    err = 0.0
    leaves = 0
    depth_max = len(root_word)
    stack: list[tuple[Fraction, Fraction, Fraction, int]] = [
        (R, D, P, len(root_word))]

    while stack:
        cr, cd, cp, depth = stack.pop()
        lo, hi = cd + cr * h0, cd + cr * h1
        diam = float(cr * hw)
        d1, d2 = derivative_bounds(f, lo, hi)
        lin = can_linearize and two_pi_xi * d2 * diam * diam <= eps
        plain = two_pi_xi * d1 * diam <= eps
        if not (lin or plain):
            if depth >= _MAX_DEPTH:
                raise BudgetExceededError(
                    f"subdivision depth {depth} reached without a leaf")
            for a in reversed(range(ifs.arity)):
                sm = ifs.maps[a]
                stack.append((cr * sm.ratio, cr * sm.translation + cd,
                              cp * ifs.probs[a], depth + 1))
            continue

        leaves += 1
        if leaves > leaf_budget:
            pending = float(cp) + sum(float(it[2]) for it in stack)
            partial = OscIntegralResult(sre.s, sim.s, err + pending + _ROUND_SLACK,
                                        leaves - 1, depth_max)
            raise BudgetExceededError(
                f"leaf budget {leaf_budget} exceeded with mass "
                f"{pending:.3g} unresolved", partial=partial)
        depth_max = max(depth_max, depth)
        pf = float(cp)
        mid = (lo + hi) / 2
        mpf_leaf = False

        if lin:
            f0q = eval_rational(f, mid, 0)
            if f0q is not None:
                f1q = eval_rational(f, mid, 1)
                phase = _unit_phase(xi_frac * (f0q + f1q * (cd - mid)))
                eta = xi_frac * f1q * cr
                lin_round = 0.0
            else:
                mpf_leaf = True
                with mp.workprec(prec):
                    x0 = mp.mpf(mid.numerator) / mid.denominator
                    x0q = _mpf_to_fraction(x0)
                    v0, w0 = _enclosure_mid_width(f, x0q, 0)
                    v1, w1 = _enclosure_mid_width(f, x0q, 1)
                    drift = mp.mpf(cd.numerator) / cd.denominator - x0
                    theta = float(mp.frac(mp.mpf(xi_frac.numerator)
                                          / xi_frac.denominator
                                          * (v0 + v1 * drift)))
                    eta = xi_frac * _mpf_to_fraction(v1) * cr
                phase = cmath.exp(2j * math.pi * theta)
                lin_round = two_pi_xi * (w0 + w1 * diam)
            tail = ft_digit_system(ifs, eta, tol=eps)
            val = phase * tail.value
            leaf_err = pf * (two_pi_xi * d2 * diam * diam / 4.0
                             + tail.err + lin_round)
        else:
            f0q = eval_rational(f, mid, 0)
            if f0q is not None:
                val = _unit_phase(xi_frac * f0q)
                lin_round = 0.0
            else:
                mpf_leaf = True
                with mp.workprec(prec):
                    x0 = mp.mpf(mid.numerator) / mid.denominator
                    x0q = _mpf_to_fraction(x0)
                    v0, w0 = _enclosure_mid_width(f, x0q, 0)
                    theta = float(mp.frac(mp.mpf(xi_frac.numerator)
                                          / xi_frac.denominator * v0))
                val = cmath.exp(2j * math.pi * theta)
                lin_round = two_pi_xi * w0
            leaf_err = pf * (two_pi_xi * d1 * diam + lin_round)
        if mpf_leaf:
            leaf_err += pf * _MPF_PHASE_SLACK
        sre.add(pf * val.real)
        sim.add(pf * val.imag)
        err += leaf_err

    return OscIntegralResult(sre.s, sim.s, err + _ROUND_SLACK,
                             leaves, depth_max)


def _vectorized_map(spec: SmoothMapSpec):
    """float64 ufunc form of the closed map variants, for brute grids."""
    v = spec.variant
    if v == "identity":
        return lambda x: x
    if v == "affine":
        a, b = float(spec.a), float(spec.b)
        return lambda x: a * x + b
    if v == "poly-flat":
        m = spec.m
        return lambda x: x + x ** m
    if v in ("explicit-h", "explicit-x-plus-h"):
        def h(x):
            with np.errstate(over="ignore", divide="ignore"):
                u = np.exp(1.0 / np.square(np.maximum(x, 1e-300)))
                out = np.exp(-u)
            return np.where(x > 0, out, 0.0)
        if v == "explicit-h":
            return h
        return lambda x: x + h(x)
    raise ValidationError(f"no vectorized form for variant {v!r}")


def stopping_quadrature(ifs: SelfSimilarIFS, f: SmoothMapSpec, xi,
                        r) -> FourierValue:
    """Brute midpoint rule over an r-stopping, as an independent check.

    Expands words until each cylinder's contraction ratio is <= r, then
    sums p_w e^{2 pi i xi f(midpoint)} in float64.  The error radius
    covers the within-cylinder phase variation and rounding; it decays
    only linearly in r, so this is a cross-check, not a substitute for
    pushforward_ft.
    """
    rq = Fraction(r)
    if not 0 < rq < 1:
        raise ValidationError(f"stopping scale must lie in (0,1), got {rq}")
    fn = _vectorized_map(f)
    xi_f = float(ExactFrequency.of(xi).as_fraction())
    h0, h1 = (float(v) for v in ifs.attractor_hull())
    hw = h1 - h0
    rf = float(rq)
    ratios = [float(m.ratio) for m in ifs.maps]
    shifts = [float(m.translation) for m in ifs.maps]
    probs = [float(p) for p in ifs.probs]
    mids: list[float] = []
    mass: list[float] = []
    stack = [(1.0, 0.0, 1.0, False)]
    while stack:
        cr, cd, cp, deep = stack.pop()
        if deep and cr <= rf:
            mids.append(cd + cr * (h0 + h1) / 2.0)
            mass.append(cp)
            continue
        for a in reversed(range(ifs.arity)):
            stack.append((cr * ratios[a], cr * shifts[a] + cd,
                          cp * probs[a], True))
    x = np.asarray(mids)
    p = np.asarray(mass)
    phases = np.exp(2j * np.pi * ((xi_f * fn(x)) % 1.0))
    val = complex(np.dot(p, phases))
    d1, _ = derivative_bounds(f, ifs.attractor_hull()[0],
                              ifs.attractor_hull()[1])
    err = (2.0 * math.pi * abs(xi_f) * d1 * rf * hw / 2.0
           + len(mids) * 4e-16 + abs(xi_f) * 2e-15)
    return FourierValue(val.real, val.imag, err)


def _classify(lo: Fraction, hi: Fraction, a: Fraction, b: Fraction,
              closed: tuple[bool, bool]) -> int:
    """-1 disjoint, +1 inside, 0 straddles, for a cylinder hull [lo,hi]."""
    closed_l, closed_r = closed
    if hi < a or (hi == a and not closed_l):
        return -1
    if lo > b or (lo == b and not closed_r):
        return -1
    left_ok = lo > a or (lo == a and closed_l)
    right_ok = hi < b or (hi == b and closed_r)
    return 1 if (left_ok and right_ok) else 0


def _restricted_push(ifs: SelfSimilarIFS, f: SmoothMapSpec, xi, interval,
                     tol: float, *, closed: tuple[bool, bool] = (True, True),
                     leaf_budget: int = 10 ** 8,
                     max_cells: int = 500_000) -> OscIntegralResult:
    """Oscillatory integral restricted to an interval of the line.

    Splits the attractor into maximal cylinders inside the interval and
    integrates each; cylinders straddling an endpoint are refined until
    their total mass fits inside tol/4, then that mass is charged to the
    error radius (their contribution cannot exceed it in modulus).
    """
    a = Fraction(interval[0])
    b = Fraction(interval[1])
    if a > b:
        raise ValidationError(f"empty interval: left {a} > right {b}")
    hull = ifs.attractor_hull()
    strad_cap = Fraction(tol) / 4
    inside: list[Word] = []
    frontier: list[tuple[Word, Fraction]] = [((), Fraction(1))]
    strad_mass = Fraction(1)
    cells = 0
    while frontier and strad_mass > strad_cap:
        nxt: list[tuple[Word, Fraction]] = []
        strad_mass = Fraction(0)
        for word, mass in frontier:
            comp = compose_word(ifs, word) if word else None
            lo, hi = (comp.image(*hull) if comp else hull)
            side = _classify(lo, hi, a, b, closed)
            if side < 0:
                continue
            if side > 0:
                inside.append(word)
                continue
            strad_mass += mass
            nxt.append((word, mass))
        cells += len(frontier)
        if cells > max_cells:
            raise BudgetExceededError(
                f"straddling mass still {float(strad_mass):.3g} after "
                f"{cells} cells")
        frontier = [(w + (i,), m * ifs.probs[i]) for w, m in nxt
                    for i in range(ifs.arity)]

    sre, sim = _Kahan(), _Kahan()
    err = float(strad_mass)
    leaves = 0
    depth = 0
    for word in sorted(inside):
        part = pushforward_ft(ifs, f, xi, tol, root_word=word,
                              leaf_budget=leaf_budget)
        sre.add(part.re)
        sim.add(part.im)
        err += part.err
        leaves += part.leaf_count
        depth = max(depth, part.depth_max)
    return OscIntegralResult(sre.s, sim.s, err, leaves, depth)


@dataclass(frozen=True)
class RegionReport:
    """Three-way split of the integral: flat start, bulk, curved end.

    near covers [hull_lo, x1], far covers [x2, hull_hi]; the open middle
    is bounded by its measure alone, with no oscillatory gain claimed.
    min_second_deriv_far is a grid estimate of min |f''| on the far
    region, the quantity a stationary-phase decay rate would consume; it
    is diagnostic, not certified.
    """

    x1: Fraction
    x2: Fraction
    near: OscIntegralResult
    middle_mass: tuple[Fraction, Fraction]
    far: OscIntegralResult
    min_second_deriv_far: LogReal

    def bracket_slack(self, full: OscIntegralResult) -> float:
        """How much room the triangle inequality audit has left.

        full must enclose the same integral over the whole line; the
        audit checks |full - near - far| <= middle mass + error radii.
        """
        gap = abs(full.value - self.near.value - self.far.value)
        allowance = (float(self.middle_mass[1]) + self.near.err
                     + self.far.err + full.err)
        return allowance - gap

    def brackets(self, full: OscIntegralResult) -> bool:
        return self.bracket_slack(full) >= 0.0


def region_report(ifs: SelfSimilarIFS, f: SmoothMapSpec, xi,
                  x1, x2, tol: float = 1e-6) -> RegionReport:
    x1q, x2q = Fraction(x1), Fraction(x2)
    hull = ifs.attractor_hull()
    if not hull[0] <= x1q <= x2q <= hull[1]:
        raise ValidationError("need hull_lo <= x1 <= x2 <= hull_hi")
    near = _restricted_push(ifs, f, xi, (hull[0], x1q), tol)
    far = _restricted_push(ifs, f, xi, (x2q, hull[1]), tol)
    middle = measure_interval(ifs, (x1q, x2q), Fraction(tol) / 4,
                              closed=(False, False))
    n = 64
    best = None
    for i in range(n + 1):
        x = x2q + (hull[1] - x2q) * Fraction(i, n)
        v = abs(eval_map(f, x, 2))
        if best is None or v < best:
            best = v
    return RegionReport(x1q, x2q, near, middle, far, best)


@dataclass(frozen=True)
class KnResult:
    """Largest admissible frequency exponent for a flat window.

    kind is "exact" when k fits an integer scan, "symbolic" when only
    its log-magnitude is representable, "unbounded" when the window is
    exactly flat and every k works.  excess is the enclosure of the
    deviation the selection divides by; c_modulus_bounds is the certified
    bracket for |c| used on the right-hand side.
    """

    kind: str
    n: int
    j: int
    k: int | None
    k_log: LogReal | None
    excess: tuple[LogReal, LogReal] | None
    c_modulus_bounds: tuple[float, float]


def _window_excess(f: SmoothMapSpec, x: Fraction) -> tuple[LogReal, LogReal]:
    # the pure double-flat map is the deviation itself, not its carrier
    if f.variant == "explicit-h":
        v = double_flat_h(mp.mpf(x.numerator) / x.denominator)
        return (v, v)
    return flat_excess(f, x)


def select_kn(ifs: SelfSimilarIFS, f: SmoothMapSpec, n: int, j: int = 1,
              c_mu=None) -> KnResult:
    """Largest k with j * b^k * (f(b^-n) - b^-n) <= 0.01 |c|.

    b is the digit-system base and c the transform value at frequency j,
    so b^k is the largest frequency whose phase drift across the level-n
    flat window stays below one percent of the persistent modulus.  Both
    sides are certified: the excess is an exact or log-domain enclosure
    and |c| is a two-sided bracket, and the reported k is only "exact"
    when both brackets agree on the same integer.
    """
    dv = ifs.digit_view()
    if dv is None:
        raise ValidationError("frequency selection needs a digit system")
    b = dv[0]
    if n < 1:
        raise ValidationError("level n must be >= 1")
    if j < 1:
        raise ValidationError("frequency multiplier j must be >= 1")
    if c_mu is None:
        c_val = ft_digit_system(ifs, j, tol=1e-13)
    elif isinstance(c_mu, FourierValue):
        c_val = c_mu
    else:
        z = complex(c_mu)
        c_val = FourierValue(z.real, z.imag, 0.0)
    c_lo, c_hi = c_val.modulus_bounds()
    if c_lo <= 0.0:
        raise ValidationError(
            "degenerate frequency: |c| bracket touches zero, choose a "
            "different j")

    x_n = Fraction(1, b ** n)
    dev_lo, dev_hi = _window_excess(f, x_n)
    if dev_lo.sign == 0 and dev_hi.sign == 0:
        return KnResult("unbounded", n, j, None, None, (dev_lo, dev_hi),
                        (c_lo, c_hi))
    if dev_lo.sign < 0:
        raise ValidationError("flat excess f(b^-n) - b^-n must be positive")

    with mp.workprec(120):
        ln_b = mp.log(b)
        k_lo = mp.floor((mp.log(0.01 * c_lo / j) - dev_hi.logmag) / ln_b)
        k_hi = mp.floor((mp.log(0.01 * c_hi / j) - dev_lo.logmag) / ln_b)
        if k_lo != k_hi:
            raise ValidationError(
                "cannot certify the largest k: the modulus bracket "
                "straddles a power boundary")
        if k_lo > 10 ** 6:
            return KnResult("symbolic", n, j, None, LogReal.from_number(k_lo),
                            (dev_lo, dev_hi), (c_lo, c_hi))
        return KnResult("exact", n, j, int(k_lo), None, (dev_lo, dev_hi),
                        (c_lo, c_hi))


@dataclass(frozen=True)
class NearZeroReport:
    """Outcome of the near-zero lower-bound check at a selected frequency."""

    n: int
    j: int
    kind: str
    k: int | None
    modulus: float | None
    err: float | None
    threshold: float | None
    margin: float | None
    passed: bool | None
    note: str
    result: OscIntegralResult | None


def _zero_branch_index(ifs: SelfSimilarIFS) -> int:
    lo = ifs.attractor_hull()[0]
    for i, sm in enumerate(ifs.maps):
        if sm(lo) == lo:
            return i
    raise ValidationError("no branch fixes the left end of the attractor")


def near_zero_check(ifs: SelfSimilarIFS, f: SmoothMapSpec, n: int,
                    j: int = 1, *, tol: float = 1e-6,
                    c_mu=None) -> NearZeroReport:
    """Certify that the integral over the level-n left cylinder stays big.

    At the selected frequency xi = j * b^k the map is so flat on the
    cylinder that the oscillation cannot cancel the cylinder's own
    transform; the check computes the restricted integral and compares
    its modulus against 0.9 * b^(-s*n) * |c| - err, s being the measure's
    scaling exponent.  Symbolic k (explicit double-flat variants) makes
    the integral unevaluable and the check is skipped with a note.
    """
    sel = select_kn(ifs, f, n, j, c_mu)
    b = ifs.digit_view()[0]
    c_lo, c_hi = sel.c_modulus_bounds
    if sel.kind == "symbolic":
        return NearZeroReport(
            n, j, sel.kind, None, None, None, None, None, None,
            "selected exponent k is far beyond float range; the window "
            "is flatter than any computable frequency", None)
    k = 2 * n if sel.kind == "unbounded" else sel.k
    if k < n:
        note = (f"selected k = {k} sits below the window level {n}; the "
                f"map is not flat enough for the persistent-modulus bound")
    else:
        note = ""
    xi = j * b ** k
    zero = _zero_branch_index(ifs)
    res = pushforward_ft(ifs, f, xi, tol, root_word=(zero,) * n)
    s_mu = frostman_exponent(ifs)
    threshold = 0.9 * b ** (-s_mu * n) * c_lo - res.err
    margin = res.modulus - threshold
    return NearZeroReport(n, j, sel.kind, k, res.modulus, res.err,
                          threshold, margin, margin >= 0.0, note, res)


@dataclass(frozen=True)
class ProfileRow:
    xi_text: str
    log10_xi: float
    re: float
    im: float
    modulus: float
    err: float
    leaf_count: int


@dataclass(frozen=True)
class DecayProfile:
    """Modulus of the transform along a frequency grid plus a fitted slope.

    The least-squares slope of log10 modulus against log10 frequency is
    an empirical summary only; nothing about it is certified, and rows
    whose modulus is swamped by their error radius still enter the fit.
    """

    rows: tuple[ProfileRow, ...]
    slope: float | None
    certified: bool = False

    def csv_lines(self) -> list[str]:
        out = ["xi,log10_xi,re,im,modulus,err,leaf_count"]
        for r in self.rows:
            out.append(f"{r.xi_text},{r.log10_xi!r},{r.re!r},{r.im!r},"
                       f"{r.modulus!r},{r.err!r},{r.leaf_count}")
        return out


def decay_profile(ifs: SelfSimilarIFS, f: SmoothMapSpec,
                  xi_grid: Sequence, tol: float = 1e-6, *,
                  root_word: Word = (),
                  interval=None) -> DecayProfile:
    """Per-frequency modulus rows over a grid, optionally restricted.

    Restriction is either a cylinder word or an interval of the line,
    not both.  The slope is fitted over rows with positive modulus and
    needs at least two distinct frequencies, else it is None.
    """
    if root_word and interval is not None:
        raise ValidationError("restrict by word or by interval, not both")
    rows = []
    for xi in xi_grid:
        if interval is not None:
            res = _restricted_push(ifs, f, xi, interval, tol)
        else:
            res = pushforward_ft(ifs, f, xi, tol, root_word=root_word)
        xi_text = str(xi) if isinstance(xi, int) else repr(float(xi))
        log10_xi = ExactFrequency.of(xi).log10_abs()
        rows.append(ProfileRow(xi_text, log10_xi, res.re, res.im,
                               res.modulus, res.err, res.leaf_count))
    xs = [r.log10_xi for r in rows if r.modulus > 0.0]
    ys = [math.log10(r.modulus) for r in rows if r.modulus > 0.0]
    slope = None
    if len(set(xs)) >= 2:
        slope = float(np.polyfit(np.asarray(xs), np.asarray(ys), 1)[0])
    return DecayProfile(tuple(rows), slope)
