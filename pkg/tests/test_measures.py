"""Self-similar systems: words, stopping sets, exact interval measure."""

import json
import random
from fractions import Fraction

import pytest

from fracfourier import (SelfSimilarIFS, SimilarityMap, ValidationError,
                         build_stopping, cantor_lebesgue, compose_word,
                         measure_interval, missing_digit, mu_t_ifs, word_prob)
from fracfourier.measures import frostman_exponent, stopping_weights


def test_cantor_system_basics():
    ifs = cantor_lebesgue()
    assert ifs.arity == 2
    assert ifs.digit_view() == (3, (0, 2))
    assert ifs.attractor_hull() == (Fraction(0), Fraction(1))
    assert ifs.is_homogeneous()
    assert ifs.probs == (Fraction(1, 2), Fraction(1, 2))


def test_cantor_moments_exact():
    # E solves E = sum p_a (r E + d_a); second moment likewise
    ifs = cantor_lebesgue()
    assert ifs.mean() == Fraction(1, 2)
    assert ifs.second_moment() == Fraction(3, 8)
    assert ifs.variance() == Fraction(1, 8)


def test_frostman_exponent_cantor():
    import math
    assert frostman_exponent(cantor_lebesgue()) == pytest.approx(
        math.log(2) / math.log(3), rel=1e-14)


def test_mu_t_family_shapes():
    ifs = mu_t_ifs(Fraction(37, 100))
    assert ifs.arity == 3
    assert [m.ratio for m in ifs.maps] == [Fraction(1, 10)] * 3
    assert [m.translation for m in ifs.maps] == [
        Fraction(0), Fraction(1, 10), Fraction(37, 1000)]
    # rational digit sets are still a digit view, base 10
    assert ifs.digit_view() == (10, (0, 1, Fraction(37, 100)))
    # float parameters coerce to the exact binary rational they denote
    assert mu_t_ifs(0.25).maps[2].translation == Fraction(1, 40)
    with pytest.raises(ValidationError):
        mu_t_ifs(3)


def test_similarity_map_validation_and_composition():
    with pytest.raises(ValidationError):
        SimilarityMap(Fraction(3, 2), Fraction(0))
    with pytest.raises(ValidationError):
        SimilarityMap(Fraction(0), Fraction(1, 2))
    s0 = SimilarityMap(Fraction(1, 3), Fraction(0))
    s1 = SimilarityMap(Fraction(1, 3), Fraction(2, 3))
    comp = s0.compose(s1)
    assert comp.ratio == Fraction(1, 9)
    assert comp.translation == Fraction(2, 9)
    assert comp(Fraction(1, 2)) == s0(s1(Fraction(1, 2)))
    assert comp.image(Fraction(0), Fraction(1)) == (
        Fraction(2, 9), Fraction(3, 9))


def test_compose_word_and_word_prob():
    ifs = cantor_lebesgue()
    m = compose_word(ifs, (0, 1))
    assert m.ratio == Fraction(1, 9)
    assert m.translation == Fraction(2, 9)
    assert word_prob(ifs, (0, 1)) == Fraction(1, 4)
    assert word_prob(ifs, ()) == Fraction(1)


def test_build_stopping_uniform_depth():
    ifs = cantor_lebesgue()
    st = build_stopping(ifs, Fraction(1, 10))
    # homogeneous ratio 1/3: first depth with 3^-k <= 1/10 is k = 3
    assert all(len(w) == 3 for w in st.words)
    assert len(st.words) == 8
    assert sum(stopping_weights(ifs, st)) == 1


def test_build_stopping_mixed_ratios():
    ifs = SelfSimilarIFS(
        maps=(SimilarityMap(Fraction(1, 2), Fraction(0)),
              SimilarityMap(Fraction(1, 4), Fraction(3, 4))),
        probs=(Fraction(1, 2), Fraction(1, 2)))
    st = build_stopping(ifs, Fraction(1, 8))
    for w in st.words:
        m = compose_word(ifs, w)
        assert m.ratio <= Fraction(1, 8)
        parent = compose_word(ifs, w[:-1])
        assert parent.ratio > Fraction(1, 8)
    assert sum(stopping_weights(ifs, st)) == 1


def _brute_measure_bounds(ifs, interval, depth):
    """Cylinder-counting enclosure, independent of measure_interval."""
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    inside = Fraction(0)
    touching = Fraction(0)
    stack = [((), Fraction(1))]
    while stack:
        word, p = stack.pop()
        if word:
            a, b = compose_word(ifs, word).image(Fraction(0), Fraction(1))
        else:
            a, b = Fraction(0), Fraction(1)
        if a >= lo and b <= hi:
            inside += p
            continue
        if b < lo or a > hi:
            continue
        if len(word) == depth:
            touching += p
            continue
        for i in range(ifs.arity):
            stack.append((word + (i,), p * ifs.probs[i]))
    return inside, inside + touching


def test_measure_interval_against_cylinder_counting():
    ifs = cantor_lebesgue()
    cases = [(Fraction(0), Fraction(1, 3)),
             (Fraction(1, 3), Fraction(2, 3)),
             (Fraction(0), Fraction(1)),
             (Fraction(1, 9), Fraction(5, 9)),
             (Fraction(1, 7), Fraction(6, 7))]
    for interval in cases:
        got_lo, got_hi = measure_interval(ifs, interval, Fraction(1, 10 ** 6))
        ref_lo, ref_hi = _brute_measure_bounds(ifs, interval, 14)
        assert got_hi - got_lo <= Fraction(1, 10 ** 6)
        assert ref_lo <= got_hi and got_lo <= ref_hi
    # the middle-third gap carries no mass at all
    lo, hi = measure_interval(ifs, (Fraction(1, 3), Fraction(2, 3)),
                              Fraction(1, 10 ** 6), closed=(False, False))
    assert lo == 0


def test_measure_interval_exact_cylinder_value():
    ifs = cantor_lebesgue()
    lo, hi = measure_interval(ifs, (Fraction(0), Fraction(1, 3)),
                              Fraction(1, 10 ** 9))
    assert lo <= Fraction(1, 2) <= hi


def test_measure_interval_additivity_random():
    ifs = cantor_lebesgue()
    rng = random.Random(505)
    tol = Fraction(1, 10 ** 7)
    for _ in range(25):
        a = Fraction(rng.randint(0, 100), 300)
        c = Fraction(rng.randint(200, 300), 300)
        b = (a + c) / 2
        lo_ab, hi_ab = measure_interval(ifs, (a, b), tol)
        lo_bc, hi_bc = measure_interval(ifs, (b, c), tol)
        lo_ac, hi_ac = measure_interval(ifs, (a, c), tol)
        # single points carry no mass, so the closed pieces add up
        assert lo_ab + lo_bc <= hi_ac
        assert lo_ac <= hi_ab + hi_bc


def test_missing_digit_system():
    ifs = missing_digit(5, (0, 2, 4))
    assert ifs.arity == 3
    assert ifs.digit_view() == (5, (0, 2, 4))
    assert ifs.attractor_hull() == (Fraction(0), Fraction(1))
    with pytest.raises(ValidationError):
        missing_digit(5, (0, 7))
    with pytest.raises(ValidationError):
        missing_digit(1, (0,))


def test_json_round_trip():
    ifs = mu_t_ifs(Fraction(37, 100))
    text = json.dumps(ifs.to_json_dict())
    back = SelfSimilarIFS.from_json(text)
    assert back.maps == ifs.maps
    assert back.probs == ifs.probs


def test_ifs_validation():
    maps = (SimilarityMap(Fraction(1, 3), Fraction(0)),
            SimilarityMap(Fraction(1, 3), Fraction(2, 3)))
    with pytest.raises(ValidationError):
        SelfSimilarIFS(maps=maps, probs=(Fraction(1, 2), Fraction(1, 3)))
    with pytest.raises(ValidationError):
        SelfSimilarIFS(maps=maps, probs=(Fraction(3, 2), Fraction(-1, 2)))
