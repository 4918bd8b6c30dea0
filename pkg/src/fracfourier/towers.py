"""Symbolic iterated exponentials ("power towers").

A PowerTower represents 10^(10^(...^(top))) with `height` tens stacked
under a real `top`.  Heights collapse to ordinary floats whenever the
value fits; beyond that the representation stays symbolic and supports
exactly the operations needed here: log10, comparison, multiplication
by a positive scalar, and adding a bounded scalar.

Adding or multiplying by a modest scalar perturbs log10 of a
non-collapsible tower by less than 1e-290, far below every margin this
package ever tests, so those operations absorb the perturbation and the
comparison helpers demand a minimum margin instead of exact ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

# Largest value we keep as a plain float before going symbolic.
_COLLAPSE_CAP = 1e300


def _stack_value(height: int, top: float) -> float | None:
    """Float value of the tower, or None if it overflows the cap."""
    v = top
    for _ in range(height):
        if v > 300.0:
            return None
        v = 10.0 ** v
    if v > _COLLAPSE_CAP:
        return None
    return v


@dataclass(frozen=True)
class PowerTower:
    """10^10^...^top with `height` tens; height 0 means just `top`."""

    height: int
    top: float

    def __post_init__(self):
        if self.height < 0:
            raise ValidationError("tower height must be >= 0")
        if self.height > 0 and not self.top > 0:
            raise ValidationError("tower top must be positive")

    @staticmethod
    def of(x) -> "PowerTower":
        if isinstance(x, PowerTower):
            return x
        return PowerTower(0, float(x))

    @staticmethod
    def uparrow(n: int) -> "PowerTower":
        """10^^n in Knuth notation; 10^^0 = 1."""
        if n < 0:
            raise ValidationError("uparrow argument must be >= 0")
        if n == 0:
            return PowerTower(0, 1.0)
        return PowerTower(n, 1.0)

    def value(self) -> float | None:
        return _stack_value(self.height, self.top)

    def is_finite_float(self) -> bool:
        return self.value() is not None

    def log10(self) -> "PowerTower":
        if self.height >= 1:
            return PowerTower(self.height - 1, self.top)
        if self.top <= 0:
            raise ValidationError("log10 of a non-positive tower")
        return PowerTower(0, math.log10(self.top))

    def pow10(self) -> "PowerTower":
        v = self.value()
        if v is not None and v <= 300.0:
            return PowerTower(0, 10.0 ** v)
        return PowerTower(self.height + 1, self.top)

    def add_scalar(self, s: float) -> "PowerTower":
        v = self.value()
        if v is not None and v + s <= _COLLAPSE_CAP:
            return PowerTower(0, v + s)
        # Relative perturbation below 1e-290: absorbed.
        return self

    def mul_scalar(self, s: float) -> "PowerTower":
        if not s > 0:
            raise ValidationError("tower scalar factor must be positive")
        v = self.value()
        if v is not None and v * s <= _COLLAPSE_CAP:
            return PowerTower(0, v * s)
        if self.height == 0:
            return PowerTower(0, self.top * s)
        # 10^u * s = 10^(u + log10 s)
        inner = PowerTower(self.height - 1, self.top).add_scalar(math.log10(s))
        return PowerTower(inner.height + 1, inner.top)

    def _cmp(self, other: "PowerTower") -> int:
        a, b = self, other
        va, vb = a.value(), b.value()
        if va is not None and vb is not None:
            return (va > vb) - (va < vb)
        if va is not None:
            return -1
        if vb is not None:
            return 1
        # Both symbolic: descend through logs, order preserved since
        # both sides stay far above 1.
        return a.log10()._cmp(b.log10())

    def __lt__(self, other):
        return self._cmp(PowerTower.of(other)) < 0

    def __le__(self, other):
        return self._cmp(PowerTower.of(other)) <= 0

    def __gt__(self, other):
        return self._cmp(PowerTower.of(other)) > 0

    def __ge__(self, other):
        return self._cmp(PowerTower.of(other)) >= 0

    def __str__(self):
        v = self.value()
        if v is not None:
            return repr(v)
        return ("10^" * self.height) + repr(self.top)


def parse_tower(text: str) -> PowerTower:
    """Parse "10^^n" into a symbolic tower."""
    body = text.strip()
    if not body.startswith("10^^"):
        raise ValidationError(f"not an up-arrow literal: {text!r}")
    try:
        n = int(body[4:])
    except ValueError as exc:
        raise ValidationError(f"bad up-arrow height in {text!r}") from exc
    return PowerTower.uparrow(n)
