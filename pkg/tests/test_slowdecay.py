"""Slowly decaying parameters: the constant, schedules, envelopes."""

from fractions import Fraction

import mpmath as mp
import pytest

from fracfourier import (BudgetExceededError, DecayFunction, ValidationError,
                         monotone_envelope)
from fracfourier.slowdecay import (LiouvilleSchedule, build_liouville_t,
                                   choose_L, rajchman_status,
                                   slow_decay_constant,
                                   slow_decay_constant_bounds,
                                   tower_rule_holds, verify_lower_bound)


def _brute_constant(terms=64, prec=200):
    """Independent product of (1 - 4 pi / (3 * 10^j))."""
    with mp.workprec(prec):
        acc = mp.mpf(1)
        for j in range(1, terms + 1):
            acc *= 1 - 4 * mp.pi / (3 * mp.mpf(10) ** j)
        return acc


def test_constant_value_and_bracket():
    # true product is 0.55418876991592003...; the bracket endpoints
    # are quoted to six decimals
    c = slow_decay_constant(64)
    assert 0.554186 <= c <= 0.554189
    assert abs(c - float(_brute_constant())) <= 1e-12
    lo, hi = slow_decay_constant_bounds()
    assert lo <= Fraction(str(float(_brute_constant()))) <= hi
    assert float(hi - lo) < 1e-11
    assert lo <= Fraction(c).limit_denominator(10 ** 15) <= hi


def test_decay_function_presets():
    log = DecayFunction.parse("log")
    assert log.value_at_pow10(100) == pytest.approx(0.01)
    assert log.rational_bracket_at_pow10(100)[0] == Fraction(1, 100)
    loglog = DecayFunction.parse("loglog")
    with mp.workprec(80):
        ref = float(1 / mp.log(mp.log(mp.mpf(10) ** 100)))
    assert loglog.value_at_pow10(100) == pytest.approx(ref, rel=1e-12)
    assert DecayFunction.parse("ilog:2").value_at_pow10(100) == \
        pytest.approx(ref, rel=1e-12)
    # power:a is (1+xi)^-a, matching the psi >= (1+xi)^-1 convention
    power = DecayFunction.parse("power:2")
    assert float(power.value_at_pow10(3)) == pytest.approx(1001.0 ** -2)
    with pytest.raises(ValidationError):
        DecayFunction.parse("cubic")


def test_choose_L_log_preset_minimality():
    # the smallest L with 2/L <= c 3^-n, certified by rational brackets
    c_lo, c_hi = slow_decay_constant_bounds()
    for n in (1, 2, 5, 14):
        chosen = choose_L(n, DecayFunction.parse("log"))
        assert chosen.certified
        L = chosen.L
        assert Fraction(2, L) <= c_lo * Fraction(1, 3) ** n
        if chosen.minimal and L - 1 >= n + 1:
            assert Fraction(2, L - 1) > c_hi * Fraction(1, 3) ** n


def test_choose_L_exact_small_values():
    # n = 1: ceil(6 / c) with c ~ 0.5541888 gives 11
    assert choose_L(1, DecayFunction.parse("log")).L == 11
    assert choose_L(14, DecayFunction.parse("log")).L == 17261155


def test_build_liouville_log_depth3_places():
    s = build_liouville_t(DecayFunction.parse("log"), 3)
    # k2 = L1 + g1 with 10^g1 > 4 pi L1: L1 = 11 -> g1 = 3
    # k3 = L2 + g2 with 10^g2 > 4 pi L2: L2 = 17261155 -> g2 = 9
    assert s.places == (1, 14, 17261164)
    assert s.depth == 3
    assert len(s.certificates) == 3
    assert all(c.lower_bound_ok and c.gap_ok for c in s.certificates)
    third = s.certificates[2]
    assert third.L_mode == "pow10-roundup"
    assert third.L == 10 ** third.L_exp10
    # prefix rational: sum of 10^-k over the first two places
    assert s.prefix_fraction(2) == Fraction(1, 10) + Fraction(1, 10 ** 14)


def test_verify_lower_bound_depth2():
    s = build_liouville_t(DecayFunction.parse("log"), 2)
    reports = verify_lower_bound(s)
    assert len(reports) == 2
    for r in reports:
        assert r.certified
        assert r.beats_lemma_floor
        assert r.beats_two_phi
        assert r.ln_measured - r.ln_err >= r.ln_two_phi
    assert reports[0].cross_checked  # L = 11 is within the generic cap


def test_verify_lower_bound_flags_bad_L():
    # L = 2 for n = 1: 2 phi = 2/2 = 1 exceeds the measured 0.918
    good = build_liouville_t(DecayFunction.parse("log"), 1)
    cert = good.certificates[0]
    bad = LiouvilleSchedule(
        phi=good.phi, places=good.places, k_tail=good.k_tail,
        certificates=(type(cert)(
            index=1, n=1, L=2, L_minimal=False, L_mode="exact",
            lower_bound_ok=True, gap_ok=True),))
    reports = verify_lower_bound(bad)
    assert not reports[0].beats_two_phi


def test_build_liouville_budget_truncation():
    # the loglog target needs a symbolic-only second index
    with pytest.raises(BudgetExceededError) as exc_info:
        build_liouville_t(DecayFunction.parse("loglog"), 3)
    partial = exc_info.value.partial
    assert partial is not None
    assert partial.depth >= 1
    assert partial.k_tail > partial.places[-1]


def test_rajchman_status_classification():
    status, reason = rajchman_status(Fraction(37, 100))
    assert status == "non-rajchman"
    assert "10^2" in reason
    # 1/4 = 25/100 rescales to the same certified family
    assert rajchman_status(Fraction(1, 4))[0] == "non-rajchman"
    assert rajchman_status(Fraction(1, 3))[0] == "unknown"


def test_monotone_envelope_power_knots():
    # psi = xi^-2 crosses 2^-n at xi = 10^(n/2); integer knots 3^(n+2)-1
    env = monotone_envelope(DecayFunction.parse("power:2"))
    for i in (1, 2, 3, 4):
        xi_i, val = env.knot(i)
        assert xi_i == 3 ** (i + 2) - 1
        assert val == Fraction(1, 2 ** i)
    # envelope dominates the target and decreases
    prev = None
    for i in range(1, env.depth() + 1):
        xi_i, val = env.knot(i)
        assert float(val) >= float(
            DecayFunction.parse("power:2").value(xi_i)) - 1e-15
        if prev is not None:
            assert val < prev
        prev = val


def test_monotone_envelope_log_knots():
    env = monotone_envelope(DecayFunction.parse("log"))
    xi_1, v1 = env.knot(1)
    assert float(xi_1) == pytest.approx(1e27, rel=1e-12)
    assert v1 == Fraction(1, 2)


def test_monotone_envelope_psi_between_knots():
    env = monotone_envelope(DecayFunction.parse("power:2"))
    x1, v1 = env.knot(1)
    x2, v2 = env.knot(2)
    mid = (mp.mpf(float(x1)) + mp.mpf(float(x2))) / 2
    val = float(env.psi(mid))
    assert float(v2) <= val <= float(v1)


def test_monotone_envelope_refusals():
    with pytest.raises(BudgetExceededError):
        monotone_envelope(DecayFunction.parse("ilog:3"))


def test_tower_rule():
    assert tower_rule_holds(1)
    assert tower_rule_holds(2)
    assert tower_rule_holds(10)
