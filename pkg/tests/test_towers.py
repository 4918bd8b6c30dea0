"""Symbolic power towers: collapse, ordering, scalar absorption."""

import math

import pytest

from fracfourier.errors import ValidationError
from fracfourier.towers import PowerTower, parse_tower


def test_small_towers_collapse_to_floats():
    assert PowerTower.uparrow(0).value() == 1.0
    assert PowerTower.uparrow(1).value() == 10.0
    assert PowerTower.uparrow(2).value() == 1e10
    assert PowerTower.uparrow(3).value() is None


def test_log10_peels_one_level():
    t = PowerTower.uparrow(3)
    assert t.log10().value() == 1e10
    assert t.log10().log10().value() == 10.0
    assert PowerTower(0, 1000.0).log10().value() == pytest.approx(3.0)


def test_pow10_stacks_or_collapses():
    assert PowerTower(0, 2.0).pow10().value() == 100.0
    sym = PowerTower(0, 400.0).pow10()
    assert sym.value() is None
    assert sym.log10().value() == 400.0


def test_ordering_across_symbolic_boundary():
    a = PowerTower.uparrow(2)
    b = PowerTower.uparrow(3)
    c = PowerTower.uparrow(4)
    assert a < b < c
    assert b > 1e300
    assert PowerTower(0, 5.0) < 6.0
    assert not (c < c)
    assert c <= c


def test_scalar_absorption_on_symbolic_towers():
    t = PowerTower.uparrow(3)
    assert t.add_scalar(12345.0) == t
    doubled = t.mul_scalar(2.0)
    assert doubled.value() is None
    assert doubled.log10().value() == pytest.approx(1e10 + math.log10(2))
    with pytest.raises(ValidationError):
        t.mul_scalar(-1.0)


def test_parse_and_str():
    assert parse_tower("10^^2").value() == 1e10
    assert parse_tower(" 10^^0 ").value() == 1.0
    assert str(PowerTower.uparrow(3)).startswith("10^")
    with pytest.raises(ValidationError):
        parse_tower("2^^3")
    with pytest.raises(ValidationError):
        parse_tower("10^^x")
    with pytest.raises(ValidationError):
        PowerTower(-1, 1.0)
