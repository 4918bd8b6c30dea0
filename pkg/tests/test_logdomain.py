"""Log-domain scalars: construction, arithmetic, extreme magnitudes."""

import math
import random
from fractions import Fraction

import mpmath as mp
import pytest

from fracfourier import LogReal


def test_from_number_roundtrip_floats():
    rng = random.Random(101)
    for _ in range(300):
        x = rng.uniform(-50.0, 50.0)
        if x == 0.0:
            continue
        y = LogReal.from_number(x).to_float()
        assert y == pytest.approx(x, rel=1e-14)
        assert math.copysign(1.0, y) == math.copysign(1.0, x)


def test_fraction_construction_is_exact_in_the_log():
    # ln(3/8) from integer logs; verify well past double precision
    with mp.workprec(300):
        v = LogReal.from_number(Fraction(3, 8))
        expected = mp.log(mp.mpf(3)) - mp.log(mp.mpf(8))
        assert abs(v.log() - expected) < mp.mpf(2) ** -280
        assert v.sign == 1


def test_constructor_keeps_high_precision_logmag():
    # a logmag built at 300 bits must not round to the ambient 53
    with mp.workprec(300):
        big = mp.log(mp.mpf(10)) * 1000 + mp.mpf(2) ** -200
    v = LogReal.exp(big)
    with mp.workprec(300):
        assert abs(v.logmag - big) == 0


def test_zero_identities():
    z = LogReal.zero()
    x = LogReal.from_number(Fraction(5, 7))
    assert z.is_zero()
    assert (z + x)._cmp(x) == 0
    assert (x * z).is_zero()
    assert z.to_float() == 0.0
    assert (x - x).is_zero()


def test_mul_div_pow_act_on_logs():
    a = LogReal.exp(mp.mpf(3))
    b = LogReal.exp(mp.mpf(10), sign=-1)
    assert (a * b).sign == -1
    assert (a * b).logmag == 13
    assert (b / a).logmag == 7
    assert (a ** 5).logmag == 15
    assert abs((1 / a).logmag - (-3)) == 0


def test_add_same_sign_against_fractions():
    rng = random.Random(202)
    for _ in range(200):
        p = Fraction(rng.randint(1, 999), rng.randint(1, 999))
        q = Fraction(rng.randint(1, 999), rng.randint(1, 999))
        got = (LogReal.from_number(p) + LogReal.from_number(q)).to_float()
        assert got == pytest.approx(float(p + q), rel=1e-13)


def test_near_total_cancellation_uses_expm1_branch():
    # 1 - (1 - 10^-20): exp(d) would round to 1 and report zero
    with mp.workprec(150):
        a = LogReal.from_number(Fraction(1))
        b = LogReal.from_number(Fraction(10 ** 20 - 1, 10 ** 20))
        diff = a - b
        assert diff.sign == 1
        # constructing b cancels ~20 digits; 150 bits leave ~1e-23 in d
        assert abs(diff.log() - (-20 * mp.log(10))) < mp.mpf(1e-22)


def test_opposite_sign_exact_tie_is_zero():
    a = LogReal.exp(mp.mpf("2.5"))
    b = LogReal.exp(mp.mpf("2.5"), sign=-1)
    assert (a + b).is_zero()


def test_add_gap_beyond_cutoff_is_absorbed():
    huge = LogReal.exp(mp.mpf(2 * 10 ** 6))
    one = LogReal.from_number(1)
    s = huge + one
    assert s.logmag == huge.logmag
    # and symmetrically a negligible tail on a unit value
    tiny = LogReal.exp(mp.mpf(-2 * 10 ** 6))
    assert (one + tiny).logmag == one.logmag


def test_to_float_overflow_and_underflow_guards():
    with pytest.raises(OverflowError):
        LogReal.exp(mp.mpf(800)).to_float()
    under = LogReal.exp(mp.mpf(-800), sign=-1).to_float()
    assert under == 0.0
    assert math.copysign(1.0, under) == -1.0
    assert LogReal.exp(mp.mpf(-2 * 10 ** 6)).to_mpf() == 0


def test_extreme_exponent_product_cancels_exactly():
    up = LogReal.exp(mp.mpf(10) ** 9)
    down = LogReal.exp(-mp.mpf(10) ** 9)
    prod = up * down
    assert prod.logmag == 0
    assert prod.to_float() == 1.0


def test_comparison_total_order_matches_floats():
    rng = random.Random(303)
    vals = [rng.uniform(-20, 20) for _ in range(60)] + [0.0]
    lrs = [LogReal.from_number(v) for v in vals]
    order = sorted(range(len(vals)), key=lambda i: vals[i])
    lr_order = sorted(range(len(vals)), key=lambda i: lrs[i])
    assert [vals[i] for i in order] == [vals[i] for i in lr_order]


def test_log_of_nonpositive_rejected():
    with pytest.raises(ValueError):
        LogReal.from_number(-2).log()
    with pytest.raises(ValueError):
        LogReal.zero().log10()


def test_random_field_ops_against_fraction_oracle():
    rng = random.Random(404)
    for _ in range(500):
        p = Fraction(rng.randint(-500, 500), rng.randint(1, 500))
        q = Fraction(rng.randint(-500, 500), rng.randint(1, 500))
        a, b = LogReal.from_number(p), LogReal.from_number(q)
        assert (a * b).to_float() == pytest.approx(float(p * q),
                                                   rel=1e-13, abs=1e-300)
        assert (a - b).to_float() == pytest.approx(float(p - q),
                                                   rel=1e-12, abs=1e-12)
        if q != 0:
            assert (a / b).to_float() == pytest.approx(float(p / q),
                                                       rel=1e-13, abs=1e-300)
        assert (a < b) == (p < q)
