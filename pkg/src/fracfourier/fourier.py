"""Fourier transforms of self-similar measures.

The transform convention is mu_hat(xi) = integral of e^{2 pi i xi x}.
For a digit system {(x+d)/b} the self-similarity relation telescopes
into the infinite product

    mu_hat(xi) = prod_{j>=1} sum_a p_a e^{2 pi i xi d_a / b^j},

which converges geometrically, so a finite head plus an explicit tail
bound gives a value with a certified error.  Phases are reduced mod 1
in exact rational arithmetic before any rounding, which keeps the head
meaningful even when xi has thousands of digits.

For the three-map family with parameter t = p/10^n evaluated at
xi = 10^L (L > n) the product collapses to an L-independent form; a
vectorized log-domain routine evaluates its modulus for prefixes with
millions of digits.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath as mp
import numpy as np

from .errors import BudgetExceededError, ValidationError
from .measures import SelfSimilarIFS

TWO_PI = 2.0 * math.pi

# float rounding allowance per accumulated product factor (generous)
_ULP_PER_FACTOR = 8.0 * 2.0 ** -52


@dataclass(frozen=True)
class FourierValue:
    """A complex value with a one-sided absolute error radius."""

    re: float
    im: float
    err: float

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def modulus(self) -> float:
        return abs(self.value)

    def modulus_bounds(self) -> tuple[float, float]:
        m = self.modulus
        return (max(0.0, m - self.err), m + self.err)

    def times(self, other: "FourierValue") -> "FourierValue":
        v = self.value * other.value
        err = (abs(self.value) * other.err + abs(other.value) * self.err
               + self.err * other.err + _ULP_PER_FACTOR)
        return FourierValue(v.real, v.imag, err)


@dataclass(frozen=True)
class ExactFrequency:
    """xi = scale * 10^exp10 with an exact rational scale.

    Keeps astronomically large frequencies exact without materializing
    their decimal expansion until a phase reduction needs it.
    """

    scale: Fraction
    exp10: int = 0

    @staticmethod
    def of(x) -> "ExactFrequency":
        if isinstance(x, ExactFrequency):
            return x
        if isinstance(x, (int, Fraction)):
            return ExactFrequency(Fraction(x), 0)
        if isinstance(x, float):
            if not math.isfinite(x):
                raise ValidationError("frequency must be finite")
            return ExactFrequency(Fraction(x), 0)
        raise ValidationError(f"cannot interpret {x!r} as a frequency")

    @staticmethod
    def pow10(L: int, coeff=1) -> "ExactFrequency":
        return ExactFrequency(Fraction(coeff), L)

    def is_zero(self) -> bool:
        return self.scale == 0

    def log10_abs(self) -> float:
        """Approximate log10 |xi|; -inf for zero."""
        if self.scale == 0:
            return float("-inf")
        s = self.scale
        return (math.log10(abs(s.numerator)) - math.log10(s.denominator)
                + self.exp10)

    def materialized_digits(self) -> int:
        """Decimal digits needed to fold 10^exp10 into the fraction."""
        s = self.scale
        num_digits = (abs(s.numerator).bit_length() * 302 // 1000) + 1
        den_digits = (s.denominator.bit_length() * 302 // 1000) + 1
        return num_digits + den_digits + abs(self.exp10)

    def as_fraction(self, *, digit_budget: int = 2_000_000) -> Fraction:
        if self.materialized_digits() > digit_budget:
            raise BudgetExceededError(
                f"frequency needs ~{self.materialized_digits()} digits, "
                f"budget is {digit_budget}")
        if self.exp10 >= 0:
            return self.scale * (10 ** self.exp10)
        return self.scale / (10 ** (-self.exp10))

    def times_fraction_mod1(self, q: Fraction,
                            *, digit_budget: int = 2_000_000) -> Fraction:
        """Exact fractional part of xi*q (nonnegative, < 1)."""
        num = self.scale.numerator * q.numerator
        den = self.scale.denominator * q.denominator
        e = self.exp10
        # fold 10^e into numerator or denominator before the mod
        if e >= 0:
            if e > digit_budget:
                raise BudgetExceededError(
                    f"phase reduction needs 10^{e}, budget {digit_budget} digits")
            num *= 10 ** e
        else:
            den *= 10 ** (-e)
        return Fraction(num % den, den)


def parse_frequency(text: str) -> ExactFrequency:
    """Accepts "123", "-7/50", "10^500", "3*10^12"."""
    body = text.strip().replace(" ", "")
    if "^" in body:
        head, _, tail = body.partition("^")
        coeff = Fraction(1)
        if "*" in head:
            c, _, base = head.partition("*")
            coeff = Fraction(c)
        else:
            base = head
        if base not in ("10", "-10"):
            raise ValidationError(f"only powers of 10 supported, got {text!r}")
        if base == "-10":
            coeff = -coeff
        try:
            L = int(tail)
        except ValueError as exc:
            raise ValidationError(f"bad exponent in {text!r}") from exc
        return ExactFrequency(coeff, L)
    try:
        return ExactFrequency(Fraction(body), 0)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"bad frequency literal {text!r}") from exc


def _digit_system(ifs: SelfSimilarIFS) -> tuple[int, tuple[Fraction, ...]]:
    view = ifs.digit_view()
    if view is None:
        raise ValidationError("system is not a single-base digit system")
    return view


def product_factor(ifs: SelfSimilarIFS, xi: ExactFrequency, j: int,
                   *, digit_budget: int = 2_000_000) -> complex:
    """Exact-phase factor sum_a p_a e^{2 pi i xi d_a / b^j}."""
    b, digits = _digit_system(ifs)
    total = 0.0 + 0.0j
    for p, d in zip(ifs.probs, digits):
        theta = xi.times_fraction_mod1(d / Fraction(b) ** j,
                                       digit_budget=digit_budget)
        total += float(p) * cmath.exp(2j * math.pi * float(theta))
    return total


def _tail_start(ifs: SelfSimilarIFS, xi: ExactFrequency, tol: float) -> int:
    """Smallest J so the product over j > J differs from 1 by <= tol/2.

    Uses |1 - factor_j| <= 2 pi |xi| (sum_a p_a d_a / b) b^-(j-1) ... the
    phase of each term is at most 2 pi |xi| d_a b^-j, so the tail of
    log-product is bounded by a geometric series.
    """
    b, digits = _digit_system(ifs)
    dbar = sum(p * d for p, d in zip(ifs.probs, digits))
    if dbar == 0:
        return 0
    log_xi = xi.log10_abs()
    if log_xi == float("-inf"):
        return 0
    # need 2 pi |xi| dbar b^-J / (b-1) <= tol/2
    need = (math.log10(4 * math.pi) + log_xi + math.log10(float(dbar))
            - math.log10(b - 1) - math.log10(tol))
    J = max(1, math.ceil(need / math.log10(b)) + 1)
    return J


def ft_digit_system(ifs: SelfSimilarIFS, xi, tol: float = 1e-12,
                    *, precision_bits: int | None = None,
                    digit_budget: int = 2_000_000,
                    max_factors: int = 50_000_000) -> FourierValue:
    """Certified transform of a digit-system measure at an exact frequency.

    Error budget: tol/2 for the truncated tail, tol/2 for rounding; the
    product escalates to mpmath automatically when the factor count
    makes double precision too lossy.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    b, digits = _digit_system(ifs)
    xiq = ExactFrequency.of(xi)
    if xiq.is_zero():
        return FourierValue(1.0, 0.0, 0.0)
    J = _tail_start(ifs, xiq, tol)
    if J == 0:
        return FourierValue(1.0, 0.0, 0.0)
    if J > max_factors:
        raise BudgetExceededError(f"needs {J} product factors, budget {max_factors}")
    tail_err = tol / 2.0

    use_mpf = precision_bits is not None or J * _ULP_PER_FACTOR > tol / 2.0
    if use_mpf and precision_bits is None:
        precision_bits = max(64, int(math.log2(4.0 * J / tol)) + 10)

    probs_f = [float(p) for p in ifs.probs]
    # incremental denominators: phase_a(j) = frac(xi * d_a / b^j)
    if use_mpf:
        with mp.workprec(precision_bits):
            acc = mp.mpc(1, 0)
            eps = 2.0 ** (5 - precision_bits)
            for j in range(1, J + 1):
                f = mp.mpc(0, 0)
                for p, d in zip(probs_f, digits):
                    theta = xiq.times_fraction_mod1(
                        d / Fraction(b) ** j, digit_budget=digit_budget)
                    f += p * mp.expjpi(2 * mp.mpf(theta.numerator)
                                       / theta.denominator)
                acc *= f
            round_err = J * eps + 4e-16
            return FourierValue(float(acc.real), float(acc.imag),
                                tail_err + round_err)
    acc = 1.0 + 0.0j
    for j in range(1, J + 1):
        f = 0.0 + 0.0j
        for p, d in zip(probs_f, digits):
            theta = xiq.times_fraction_mod1(d / Fraction(b) ** j,
                                            digit_budget=digit_budget)
            f += p * cmath.exp(2j * math.pi * float(theta))
        acc *= f
    return FourierValue(acc.real, acc.imag, tail_err + J * _ULP_PER_FACTOR)


def ft_mu_t(t, xi, tol: float = 1e-12, **kw) -> FourierValue:
    """Transform of the three-map family member with rational t."""
    from .measures import mu_t_ifs
    return ft_digit_system(mu_t_ifs(t), xi, tol, **kw)


def lipschitz_in_t(xi) -> float:
    """Modulus of continuity in the parameter: the transform of the
    three-map family satisfies |mu_hat_t(xi) - mu_hat_s(xi)| <=
    2 pi |xi| |t - s|, since moving t displaces every point of the
    attractor by at most |t - s| * sum_k 10^-k < |t - s|.

    Returns the coefficient 2 pi |xi| (inf when it overflows a float).
    """
    xiq = ExactFrequency.of(xi)
    lg = xiq.log10_abs()
    if lg > 300:
        return float("inf")
    return TWO_PI * 10.0 ** lg


def _frac01(x: mp.mpf) -> float:
    """Fractional part in [0, 1) of an mpf, as a float."""
    return float(x - mp.floor(x))


def ft_general(ifs: SelfSimilarIFS, xi, tol: float = 1e-9, *,
               xi_base: float = 1e-3,
               memo_budget: int = 1_000_000) -> FourierValue:
    """Transform of any system at a real frequency via scale recursion.

    Expands mu_hat(eta) = sum_a p_a e^{2 pi i eta d_a} mu_hat(r_a eta)
    until the argument is small, then closes with the exact two-moment
    stub e^{2 pi i eta E[X]} whose error is (2 pi eta)^2 Var[X] / 2.
    Nodes are memoized on their exact ratio product, so homogeneous
    systems recurse linearly.  Phases are reduced in 160-bit arithmetic;
    the frequency may be a float or an mpf.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    prec = 160
    with mp.workprec(prec):
        if isinstance(xi, Fraction):
            xi_m = mp.mpf(xi.numerator) / xi.denominator
        else:
            xi_m = mp.mpf(xi)
        if mp.fabs(xi_m) > mp.mpf(2) ** (prec - 60):
            raise ValidationError("frequency too large for phase precision")
        mean = ifs.mean()
        var = ifs.variance()
        mean_m = mp.mpf(mean.numerator) / mean.denominator
        var_f = float(var)
        probs_f = [float(p) for p in ifs.probs]
        ratios = [m.ratio for m in ifs.maps]
        trans_m = [mp.mpf(m.translation.numerator) / m.translation.denominator
                   if m.translation != 0 else mp.mpf(0) for m in ifs.maps]
        memo: dict[Fraction, tuple[complex, float]] = {}

        def rec(mult: Fraction) -> tuple[complex, float]:
            hit = memo.get(mult)
            if hit is not None:
                return hit
            if len(memo) > memo_budget:
                raise BudgetExceededError("scale recursion exceeded its node budget")
            eta = xi_m * mult.numerator / mult.denominator
            eta_abs = float(mp.fabs(eta))
            base_err = (TWO_PI * eta_abs) ** 2 * var_f / 2.0
            if eta_abs <= xi_base and base_err <= tol / 2.0:
                theta = _frac01(eta * mean_m)
                out = (cmath.exp(2j * math.pi * theta), base_err + 4e-16)
            else:
                total = 0.0 + 0.0j
                err = 4e-16
                for p, r, d in zip(probs_f, ratios, trans_m):
                    child, cerr = rec(mult * r)
                    phase = cmath.exp(2j * math.pi * _frac01(eta * d))
                    total += p * phase * child
                    err += p * (cerr + 4e-16)
                out = (total, err)
            memo[mult] = out
            return out

        value, err = rec(Fraction(1))
    return FourierValue(value.real, value.imag, err)


# ---------------------------------------------------------------------------
# log-domain fast path for the three-map family at xi = 10^L, t = p/10^n
# ---------------------------------------------------------------------------

def _windows_from_digits(digits: np.ndarray, width: int = 18) -> np.ndarray:
    """windows[w] = 0.d_{w+1} d_{w+2} ... read from position w, as float.

    digits is a uint8 array (d_1 ... d_n).  Truncating after `width`
    digits costs at most 10^-width in each window value.
    """
    n = len(digits)
    padded = np.zeros(n + width, dtype=np.float64)
    padded[:n] = digits
    out = np.zeros(n, dtype=np.float64)
    scale = 0.1
    for k in range(width):
        out += padded[k:k + n] * scale
        scale *= 0.1
    return out


def digits_of_int(p: int, n: int) -> np.ndarray:
    """Digit array d_1..d_n of p/10^n (leading zeros included).

    Decimal conversion of huge ints is quadratic; beyond 200k digits use
    digits_from_places with a sparse description instead.
    """
    if n > 200_000:
        raise BudgetExceededError(
            f"refusing decimal conversion at {n} digits; use a sparse description")
    if p < 0 or p >= 10 ** n:
        raise ValidationError("numerator out of range for given digit count")
    if n + 10 > sys.get_int_max_str_digits():
        sys.set_int_max_str_digits(n + 10)
    s = str(p).zfill(n)
    return np.frombuffer(s.encode(), dtype=np.uint8) - ord("0")


def digits_from_places(places: Sequence[int], n: int) -> np.ndarray:
    """Sparse description {place k -> digit 1} to a dense digit array."""
    arr = np.zeros(n, dtype=np.uint8)
    for k in places:
        if not (1 <= k <= n):
            raise ValidationError(f"digit place {k} outside 1..{n}")
        arr[k - 1] += 1
    if (arr > 9).any():
        raise ValidationError("digit collision in sparse description")
    return arr


@dataclass(frozen=True)
class LogModulus:
    """ln |value| with an absolute error bound on the log."""

    ln: float
    err_ln: float

    def log10(self) -> float:
        return self.ln / math.log(10.0)


def mu_t_pow10_log_modulus(digits: np.ndarray, *,
                           tail_terms: int = 40,
                           chunk: int = 1 << 22) -> LogModulus:
    """ln |mu_hat_t(10^L)| for t = 0.d_1...d_n and any L > n.

    After reindexing the product by s = j - (L - n), factors with
    s <= n become (2 + e^{2 pi i w_s})/3 with w_s the fractional window
    of t starting at digit place n-s+1, and factors with s > n no longer
    depend on L.  The result is exactly independent of L, so one call
    certifies the modulus at every frequency 10^L with L > n.
    """
    digits = np.ascontiguousarray(digits, dtype=np.uint8)
    n = len(digits)
    if n == 0:
        raise ValidationError("empty digit array")
    total = 0.0
    for start in range(0, n, chunk):
        block = digits[start:min(n, start + chunk + 18)]
        windows = _windows_from_digits(block)[:min(chunk, n - start)]
        theta = TWO_PI * windows
        re = 2.0 + np.cos(theta)
        im = np.sin(theta)
        mods = np.sqrt(re * re + im * im) / 3.0
        total += float(np.sum(np.log(mods)))
    # factors s = n+m, m >= 1: (1 + e(10^-m) + e(t 10^-m))/3
    t_float = float(_windows_from_digits(digits[:19])[0])
    tail = 0.0
    for m in range(1, tail_terms + 1):
        u = 10.0 ** -m
        z = (1.0 + cmath.exp(2j * math.pi * u)
             + cmath.exp(2j * math.pi * t_float * u)) / 3.0
        tail += math.log(abs(z))
    # truncation of the tail beyond tail_terms: |log factor| <= 2 pi *
    # (1 + t) 10^-m / 3 summed geometrically
    trunc = 4.0 * math.pi / 3.0 * 10.0 ** -tail_terms / 0.9
    # per-factor relative error: window truncation 1e-18 * 2 pi plus
    # float trig and log, bounded by 5e-16 against factors >= 1/3
    err = n * 5e-16 + n * 2e-16 + trunc + 1e-14
    return LogModulus(total + tail, err)


def modulus_lower_bound_exact(n: int) -> Fraction:
    """Rational lower bound for |mu_hat_{p/10^n}(10^L)| valid for all L > n.

    Window factors satisfy |2 + e^{i theta}|/3 >= 1/3 and the tail
    product over m >= 1 of (1 - 4 pi 10^-m / 3) exceeds 55/100, so
    (55/100) * 3^-n is a certified floor independent of p and L.
    """
    if n < 0:
        raise ValidationError("digit count must be >= 0")
    return Fraction(55, 100) / 3 ** n
