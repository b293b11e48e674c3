from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoscale import exactq
from twoscale.exactq import (
    SQRT2_POLY,
    CASE_SPLIT_POLY,
    CUBIC_POLY,
    INFINITY,
    OutOfRange,
    RegimeTag,
    UnknownInequality,
    as_rational,
    check_inequality,
    classify_regime,
    derived_quantities,
    partial_geom_sum,
    poly_eval,
    poly_sign,
)

from oracles import bisect_float, poly_by_clearing

below_half = st.fractions(min_value=F(1, 10**4), max_value=F(1, 2) - F(1, 10**4), max_denominator=10**4)
unit = st.fractions(min_value=F(1, 10**4), max_value=1 - F(1, 10**4), max_denominator=10**4)


def test_as_rational_accepts_exact_forms():
    assert as_rational("2/5") == F(2, 5)
    assert as_rational(3) == 3
    assert as_rational(F(6, 15)) == F(2, 5)


@pytest.mark.parametrize("bad", [0.4, "0.4", "abc", "1/0"])
def test_as_rational_rejects_inexact(bad):
    with pytest.raises((TypeError, ValueError, ZeroDivisionError)):
        as_rational(bad)


def test_cubic_values_match_integer_oracle():
    # denominators cleared by hand: integers only
    assert poly_by_clearing(CUBIC_POLY, 2, 5) == (-11, 125)
    assert poly_by_clearing(CUBIC_POLY, 9, 20) == (127, 8000)
    assert poly_eval(CUBIC_POLY, F(2, 5)) == F(-11, 125)
    assert poly_eval(CUBIC_POLY, F(9, 20)) == F(127, 8000)


def test_poly_sign_examples():
    assert poly_sign(CUBIC_POLY, F(2, 5)) == -1
    assert poly_sign(CUBIC_POLY, F(9, 20)) == 1
    assert poly_sign((0, 0, 0), F(1, 3)) == 0
    assert poly_sign((5,), F(1, 3)) == 1


@given(unit)
def test_poly_sign_agrees_with_cleared_denominators(q):
    for coeffs in (CASE_SPLIT_POLY, SQRT2_POLY, CUBIC_POLY):
        top, bottom = poly_by_clearing(coeffs, q.numerator, q.denominator)
        assert bottom > 0
        assert poly_sign(coeffs, q) == (top > 0) - (top < 0)


def test_derived_quantities_examples():
    p = derived_quantities(F(1, 3))
    assert (p.Q, p.oneMinusQ, p.qQ) == (F(1, 2), F(1, 2), F(1, 6))
    assert (p.qTwoMinusQ, p.q2TwoMinusQ, p.qMinusQ2TwoMinusQ) == (F(1, 2), F(1, 6), F(1, 6))
    assert derived_quantities(F(1, 4)).Q == F(1, 3)
    p = derived_quantities(F(2, 5))
    assert (p.Q, p.oneMinusQ, p.qQ, p.qTwoMinusQ, p.qMinusQ2TwoMinusQ) == (
        F(2, 3), F(1, 3), F(4, 15), F(8, 15), F(14, 75))


@pytest.mark.parametrize("q", [0, 1, F(-1, 2), F(3, 2)])
def test_derived_quantities_out_of_range(q):
    with pytest.raises(OutOfRange):
        derived_quantities(q)


@given(below_half)
def test_profile_identities(q):
    p = derived_quantities(q)
    assert p.Q * (1 - q) == q
    assert p.oneMinusQ == 1 - p.Q > 0
    assert p.Q < 1
    assert p.qTwoMinusQ - p.qQ == 2 * q * (1 - 2 * q) / (1 - q) > 0
    assert p.q2TwoMinusQ == q * p.qTwoMinusQ
    assert p.qMinusQ2TwoMinusQ == q - p.q2TwoMinusQ
    assert p.qPlusQ2Q == q + q * p.qQ
    assert p.oneMinusQQ == 1 - p.qQ
    assert p.oneMinusQTwoMinusQ == 1 - p.qTwoMinusQ


def test_regime_examples():
    r = classify_regime(F(1, 4))
    assert r.tag is RegimeTag.CaseI and r.quarterFlag and r.halfGuard
    assert poly_eval(CASE_SPLIT_POLY, F(1, 4)) == F(5, 16)
    assert classify_regime(F(2, 5)).tag is RegimeTag.CaseII
    assert poly_eval(CASE_SPLIT_POLY, F(2, 5)) == F(-1, 25)
    assert classify_regime(F(9, 20)).tag is RegimeTag.AboveThreshold
    for bad in (0, 1, F(5, 4), F(-1, 3)):
        assert classify_regime(bad).tag is RegimeTag.Invalid


@given(st.fractions(min_value=-1, max_value=2, max_denominator=1000))
def test_regime_is_a_partition(q):
    tag = classify_regime(q).tag
    in_unit = 0 < q < 1
    case_split = in_unit and poly_sign(CASE_SPLIT_POLY, q) >= 0 and q < F(1, 2)
    cubic = poly_sign(CUBIC_POLY, q) if in_unit else None
    expected = {
        RegimeTag.Invalid: not in_unit,
        RegimeTag.CaseI: case_split,
        RegimeTag.CaseII: in_unit and not case_split and cubic <= 0,
        RegimeTag.AboveThreshold: in_unit and cubic > 0,
    }
    assert sum(expected.values()) == 1
    assert expected[tag]


def test_regime_flags():
    assert not classify_regime(F(1, 3)).quarterFlag
    assert classify_regime(F(1, 2)).halfGuard is False
    assert classify_regime(F(49, 100)).halfGuard is True


def test_partial_geom_sum():
    assert partial_geom_sum(F(1, 3), 0) == 0
    assert partial_geom_sum(F(1, 3), 2) == F(4, 9)
    assert partial_geom_sum(F(1, 3), INFINITY) == F(1, 2)
    with pytest.raises(OutOfRange):
        partial_geom_sum(F(3, 2), 2)


@given(unit, st.integers(min_value=0, max_value=30))
def test_partial_geom_sum_matches_loop(q, n):
    assert partial_geom_sum(q, n) == sum(q**i for i in range(1, n + 1))
    assert partial_geom_sum(q, n) < partial_geom_sum(q, INFINITY)


def test_inequality_examples():
    assert check_inequality("INEQ12", F(2, 5))
    p = derived_quantities(F(9, 20))
    assert (p.qMinusQ2TwoMinusQ, p.oneMinusQ) == (F(927, 4400), F(800, 4400))
    assert not check_inequality("INEQ12", F(9, 20))
    assert check_inequality("FINAL_Q", F(1, 3))
    with pytest.raises(UnknownInequality):
        check_inequality("NOPE", F(1, 3))


def test_every_inequality_has_text():
    assert set(exactq.INEQUALITY_TEXT) == set(exactq.INEQUALITY_IDS)
    for name in ("INEQ12", "QQ_LT", "SIDE16A", "SIDE16B", "FINAL_Q"):
        assert name in exactq.INEQUALITY_IDS


def test_ineq12_iff_cubic_nonpositive_dense():
    # every rational k/2000 in (0, 1/2)
    for k in range(1, 1000):
        q = F(k, 2000)
        assert check_inequality("INEQ12", q) == (poly_sign(CUBIC_POLY, q) <= 0), q


@settings(max_examples=300)
@given(below_half)
def test_ineq12_iff_cubic_nonpositive(q):
    assert check_inequality("INEQ12", q) == (poly_sign(CUBIC_POLY, q) <= 0)


@given(below_half)
def test_qq_lt_holds_below_half(q):
    assert check_inequality("QQ_LT", q)
    assert check_inequality("FINAL_Q", q)


@pytest.mark.parametrize("coeffs, expect", [
    (CASE_SPLIT_POLY, 0.3819660112501051),
    (SQRT2_POLY, 0.41421356237309503),
    (CUBIC_POLY, 0.4424933340244421),
])
def test_bisect_root_agrees_with_float_oracle(coeffs, expect):
    root = exactq.bisect_root(coeffs, tol=F(1, 10**12))
    assert abs(float(root) - expect) < 1e-11
    assert abs(bisect_float(coeffs) - expect) < 1e-11


def test_rational_grid_is_exact():
    g = exactq.rational_grid(F(1, 10), F(2, 5), 4)
    assert g == [F(1, 10), F(1, 5), F(3, 10), F(2, 5)]
    assert exactq.rational_grid(F(1, 10), F(1, 10), 1) == [F(1, 10)]
