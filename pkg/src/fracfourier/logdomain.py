"""Signed log-domain real numbers.

Quantities like exp(-exp(729)) or product chains of doubly-tiny bump values
cannot be held in IEEE doubles, and even their *logarithms* can exceed the
double range.  A LogReal stores a sign in {-1, 0, +1} together with the
natural log of the magnitude as an mpmath float (whose exponent is an
arbitrary-precision integer), so both the value and its log survive.

Multiplication, division and powers are exact in the log domain up to the
working mpmath precision.  Addition uses log-sum-exp; cancellation between
nearly equal opposite-sign terms loses precision in the usual way, which is
acceptable here because every consumer compares against bounds with at
least a factor-2 margin.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp

__all__ = ["LogReal", "ZERO", "ONE"]

_NEG_INF = mp.mpf("-inf")


def _to_logreal(x):
    if isinstance(x, LogReal):
        return x
    if isinstance(x, (int, float, Fraction, mp.mpf)):
        return LogReal.from_number(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to LogReal")


class LogReal:
    __slots__ = ("sign", "logmag")

    def __init__(self, sign: int, logmag):
        if sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        self.sign = sign
        if sign == 0:
            self.logmag = _NEG_INF
        elif isinstance(logmag, mp.mpf):
            # keep full precision: mp.mpf(x) would round to the ambient
            # context, silently corrupting values built at higher precision
            self.logmag = logmag
        else:
            self.logmag = mp.mpf(logmag)

    # ------------------------------------------------------------- builders
    @classmethod
    def zero(cls) -> "LogReal":
        return cls(0, _NEG_INF)

    @classmethod
    def from_number(cls, x) -> "LogReal":
        if isinstance(x, Fraction):
            if x == 0:
                return cls.zero()
            sign = 1 if x > 0 else -1
            # ln|p/q| from integer logs; exact inputs, mpf rounding only.
            p, q = abs(x.numerator), x.denominator
            return cls(sign, _ln_int(p) - _ln_int(q))
        x = mp.mpf(x)
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, mp.log(abs(x)))

    @classmethod
    def exp(cls, logmag, sign: int = 1) -> "LogReal":
        """The value sign * e^logmag."""
        if sign == 0:
            return cls.zero()
        return cls(sign, logmag)

    # ------------------------------------------------------------ accessors
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self) -> float:
        """Nearest double; underflows to (signed) 0.0, overflow raises."""
        if self.sign == 0:
            return 0.0
        if self.logmag > 710:
            raise OverflowError(f"LogReal magnitude e^{self.logmag} exceeds float range")
        if self.logmag < -745:
            return self.sign * 0.0
        return self.sign * float(mp.exp(self.logmag))

    def to_mpf(self):
        if self.sign == 0:
            return mp.mpf(0)
        if self.logmag < -10 ** 6:
            # the exponent of the result would not be storable
            return mp.mpf(0)
        return self.sign * mp.exp(self.logmag)

    def log(self):
        """Natural log of a positive value, as mpf."""
        if self.sign <= 0:
            raise ValueError("log requires a positive LogReal")
        return self.logmag

    def log10(self):
        if self.sign <= 0:
            raise ValueError("log10 requires a positive LogReal")
        return self.logmag / mp.log(10)

    # ----------------------------------------------------------- arithmetic
    def __mul__(self, other) -> "LogReal":
        other = _to_logreal(other)
        if self.sign == 0 or other.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogReal":
        other = _to_logreal(other)
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.logmag - other.logmag)

    def __rtruediv__(self, other) -> "LogReal":
        return _to_logreal(other) / self

    def __pow__(self, exponent) -> "LogReal":
        if self.sign == 0:
            if exponent == 0:
                return LogReal(1, mp.mpf(0))
            return LogReal.zero()
        if self.sign < 0:
            # only integer exponents keep the result real
            if not (isinstance(exponent, int) or float(exponent).is_integer()):
                raise ValueError("negative base with non-integer exponent")
            sign = -1 if int(exponent) % 2 else 1
        else:
            sign = 1
        return LogReal(sign, self.logmag * mp.mpf(exponent))

    def __neg__(self) -> "LogReal":
        if self.sign == 0:
            return self
        return LogReal(-self.sign, self.logmag)

    def __abs__(self) -> "LogReal":
        if self.sign >= 0:
            return self
        return LogReal(1, self.logmag)

    def __add__(self, other) -> "LogReal":
        other = _to_logreal(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        a, b = self, other
        if a.logmag < b.logmag:
            a, b = b, a
        d = b.logmag - a.logmag  # <= 0
        # beyond this gap exp(d) cannot move a.logmag at any working
        # precision, and its own exponent would not even be storable
        if d < -10 ** 6:
            return LogReal(a.sign, a.logmag)
        if a.sign == b.sign:
            return LogReal(a.sign, a.logmag + mp.log1p(mp.exp(d)))
        if d == 0:
            return LogReal.zero()
        # |a| > |b|, opposite signs: magnitude shrinks; expm1 keeps the
        # near-total cancellation d -> 0 exact where exp would round to 1
        return LogReal(a.sign, a.logmag + mp.log(-mp.expm1(d)))

    __radd__ = __add__

    def __sub__(self, other) -> "LogReal":
        return self + (-_to_logreal(other))

    def __rsub__(self, other) -> "LogReal":
        return _to_logreal(other) + (-self)

    # ----------------------------------------------------------- comparison
    def _cmp(self, other) -> int:
        other = _to_logreal(other)
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        if self.logmag == other.logmag:
            return 0
        bigger_mag = 1 if self.logmag > other.logmag else -1
        return bigger_mag * self.sign

    def __lt__(self, other):

        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.sign, self.logmag))

    def __repr__(self):
        if self.sign == 0:
            return "LogReal(0)"
        s = "-" if self.sign < 0 else ""
        return f"LogReal({s}exp({mp.nstr(self.logmag, 10)}))"


def _ln_int(n: int):
    """ln of a positive int without overflowing intermediate floats."""
    if n <= 0:
        raise ValueError("need a positive integer")
    if n.bit_length() <= 900:
        return mp.log(mp.mpf(n))
    # split into mantissa * 2^shift to stay in range
    shift = n.bit_length() - 60
    return mp.log(mp.mpf(n >> shift)) + shift * mp.log(mp.mpf(2))


ZERO = LogReal.zero()
ONE = LogReal(1, mp.mpf(0))
