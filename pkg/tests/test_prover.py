import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twoscale import exactq
from twoscale.certificate import AxiomKind, Rule, Verdict
from twoscale.checker import check_certificate, verify_certificate
from twoscale.exactq import INFINITY, RegimeTag, classify_regime, derived_quantities
from twoscale.prover import (
    GoalNotReached,
    HalfGuardViolated,
    RegimeError,
    StepFailure,
    initial_axioms,
    lemma1_closure,
    replay_paper_proof,
    rule_backward,
    rule_forward,
    saturate,
)
from twoscale.zeroset import Interval, ZeroSet

import oracles

PROVABLE_QS = [F(1, 10), F(1, 5), F(1, 4), F(3, 10), F(19, 50), F(2, 5), F(22, 50), F(44, 100)]
ABOVE_QS = [F(45, 100), F(46, 100), F(9, 20)]


def bands(cert, rule=None):
    return [s.produced for s in cert.steps if rule is None or s.rule is rule]


# --- axioms ---------------------------------------------------------------

def test_initial_axioms_third():
    Z, steps = initial_axioms(F(1, 3))
    assert all(s.rule is Rule.AXIOM for s in steps)
    assert Z.contains(ZeroSet.open(F(-1, 2), F(1, 2)))
    assert Z.contains(ZeroSet.outside(F(1, 2)))
    assert F(1, 2) in Z and F(-1, 2) in Z
    assert Z == ZeroSet.everything()


def test_initial_axioms_quarter_skips_q_atoms():
    Z, steps = initial_axioms(F(1, 4))
    assert AxiomKind.ATOM_Q not in [s.axiom for s in steps]
    assert all(F(1, 3) not in s.produced for s in steps if s.axiom is not AxiomKind.SEED_LEMMA2)
    # +-Q = +-1/3 still vanish here, but only because 1 - Q = 2/3 exceeds Q
    assert F(1, 3) in Z


def test_initial_axioms_two_fifths():
    Z, steps = initial_axioms(F(2, 5))
    assert Z.contains(ZeroSet.open(F(-1, 3), F(1, 3)))
    assert [s.axiom for s in steps] == [AxiomKind.SUPPORT, AxiomKind.SEED_LEMMA2,
                                         AxiomKind.ATOM_ZERO, AxiomKind.ATOM_Q]


@pytest.mark.parametrize("q", [F(1, 2), F(3, 5)])
def test_initial_axioms_half_guard(q):
    with pytest.raises(HalfGuardViolated):
        initial_axioms(q)


def test_initial_axioms_need_finite_seed():
    with pytest.raises(ValueError):
        initial_axioms(F(1, 3), (INFINITY, 1))
    with pytest.raises(ValueError):
        initial_axioms(F(1, 3), (0, 2))


# --- rules ---------------------------------------------------------------

def test_rule_forward_trivial_cases():
    assert rule_forward(ZeroSet.everything(), F(1, 3)) == ZeroSet.everything()
    assert rule_forward(ZeroSet.empty(), F(1, 3)).is_empty()
    for iso in ("MINUS", "CENTER", "PLUS"):
        assert rule_backward(ZeroSet.empty(), F(1, 3), iso).is_empty()
    with pytest.raises(ValueError):
        rule_backward(ZeroSet.empty(), F(1, 3), "SIDEWAYS")


def test_rule_forward_gives_first_band():
    q = F(2, 5)
    Z, _ = initial_axioms(q)
    Z = Z.insert(ZeroSet.closed(F(-1, 3), F(1, 3)))
    assert rule_forward(Z, q).contains(ZeroSet.closed(F(4, 15), F(8, 15)))


def test_rule_backward_plus_band():
    q = F(2, 5)
    cert = replay_paper_proof(q)
    before = ZeroSet.empty()
    for s in cert.steps:
        if s.rule is Rule.BACK_PLUS:
            break
        before = before.insert(s.produced)
    assert rule_backward(before, q, "PLUS").contains(ZeroSet.closed(F(7, 15), F(11, 15)))


def _random_zero_set(rng):
    return ZeroSet([Interval(*oracles.random_piece(rng)) for _ in range(5)])


seeds = st.integers(min_value=0, max_value=2**32 - 1)
q_below_half = st.fractions(min_value=F(1, 100), max_value=F(49, 100), max_denominator=200)


@given(seeds, q_below_half)
def test_rules_commute_with_reflection(seed, q):
    Z = _random_zero_set(random.Random(seed))
    R = Z.reflect()
    assert rule_forward(R, q) == rule_forward(Z, q).reflect()
    assert rule_backward(R, q, "CENTER") == rule_backward(Z, q, "CENTER").reflect()
    # reflecting swaps which neighbour is isolated
    assert rule_backward(R, q, "MINUS") == rule_backward(Z, q, "PLUS").reflect()
    assert rule_backward(R, q, "PLUS") == rule_backward(Z, q, "MINUS").reflect()


@given(seeds, q_below_half)
def test_rules_on_symmetric_sets(seed, q):
    S = _random_zero_set(random.Random(seed)).symmetrize()
    assert rule_forward(S, q).is_symmetric()
    assert rule_backward(S, q, "CENTER").is_symmetric()
    assert rule_backward(S, q, "MINUS").symmetrize() == (
        rule_backward(S, q, "MINUS") | rule_backward(S, q, "PLUS"))


# --- replay ---------------------------------------------------------------

def test_replay_two_fifths_bands():
    cert = replay_paper_proof(F(2, 5))
    assert cert.verdict is Verdict.TRIVIAL_ONLY
    produced = bands(cert)
    assert ZeroSet.closed(F(4, 15), F(8, 15)) in produced
    assert ZeroSet.closed(F(14, 75), F(16, 75)) in produced
    assert ZeroSet.closed(F(7, 15), F(11, 15)) in produced
    assert cert.finalSet.contains(ZeroSet.closed(0, F(8, 15)))
    assert verify_certificate(cert)


def test_replay_quarter_uses_conditional_atom():
    cert = replay_paper_proof(F(1, 4))
    kinds = [s.axiom for s in cert.steps]
    assert AxiomKind.ATOM_Q_CONDITIONAL in kinds and AxiomKind.ATOM_Q not in kinds
    closure = cert.steps[-1]
    assert closure.rule is Rule.LEMMA1_CLOSURE
    assert closure.detail["fQ"]["rule"] == "ATOM_Q_CONDITIONAL"
    assert verify_certificate(cert)


@pytest.mark.parametrize("q", PROVABLE_QS)
def test_replay_verifies(q):
    cert = replay_paper_proof(q)
    assert cert.verdict is Verdict.TRIVIAL_ONLY
    assert check_certificate(cert).ok
    assert oracles.pointwise_step_violations(cert) == 0


@pytest.mark.parametrize("q", ABOVE_QS)
def test_replay_refuses_above_threshold(q):
    with pytest.raises(RegimeError):
        replay_paper_proof(q)


@pytest.mark.parametrize("q", ABOVE_QS)
def test_override_fails_at_ineq12(q):
    with pytest.raises(StepFailure) as info:
        replay_paper_proof(q, override_regime=True)
    assert info.value.check == "INEQ12"
    # nothing before the cubic check failed
    assert info.value.step_index == 12


@pytest.mark.parametrize("q", [0, 1, F(5, 4), F(-1, 3)])
def test_replay_rejects_invalid(q):
    with pytest.raises(RegimeError):
        replay_paper_proof(q)


def test_replay_reduces_infinite_seed():
    cert = replay_paper_proof(F(2, 5), seed=(INFINITY, -1))
    assert cert.seed == (0, -1)
    assert cert.seedReduction
    assert verify_certificate(cert)


def test_case_two_band_above_sqrt2():
    # from sqrt(2) - 1 upward the last back-isolation band is nonempty and used
    cert = replay_paper_proof(F(44, 100))
    assert Rule.BACK_MINUS in [s.rule for s in cert.steps]
    assert Rule.BACK_MINUS not in [s.rule for s in replay_paper_proof(F(2, 5)).steps]


def test_case_two_ordering_chain_sweep():
    lo, hi = F(382, 1000), F(4424, 10000)
    checked = 0
    for q in exactq.rational_grid(lo, hi, 100):
        if classify_regime(q).tag is not RegimeTag.CaseII:
            continue
        p = derived_quantities(q)
        assert p.qQ < p.oneMinusQTwoMinusQ
        assert p.qMinusQ2TwoMinusQ <= p.oneMinusQ
        assert p.oneMinusQTwoMinusQ < p.qTwoMinusQ
        assert p.qPlusQ2Q < p.oneMinusQQ
        assert p.q < p.qTwoMinusQ
        checked += 1
    assert checked >= 95


below_cubic = st.fractions(min_value=F(1, 1000), max_value=F(221, 500), max_denominator=1000)


@settings(max_examples=60, deadline=None)
@given(below_cubic)
def test_every_provable_q_certifies(q):
    assert classify_regime(q).provable
    cert = replay_paper_proof(q)
    assert cert.verdict is Verdict.TRIVIAL_ONLY
    assert verify_certificate(cert)


# --- closure --------------------------------------------------------------

def test_closure_examples():
    step = lemma1_closure(ZeroSet.open(F(-1, 2), F(1, 2)).insert(F(0)), F(1, 3))
    assert step.rule is Rule.LEMMA1_CLOSURE and step.produced == ZeroSet.everything()
    q = F(1, 4)
    Z = ZeroSet.open(F(-2, 3), F(2, 3))
    step = lemma1_closure(Z, q)
    assert step.detail["fQ"] == {"rule": "ATOM_Q_CONDITIONAL", "via": "1/12",
                                 "reason": step.detail["fQ"]["reason"]}
    with pytest.raises(GoalNotReached):
        lemma1_closure(ZeroSet.closed(F(1, 2), 1), F(1, 3))


def test_closure_partial_sums_recursion():
    step = replay_paper_proof(F(3, 10)).steps[-1]
    sums = [exactq.as_rational(s) for s in step.detail["partialSums"]]
    q = F(3, 10)
    assert sums[0] == 0
    for a, b in zip(sums, sums[1:]):
        assert b / q == 1 + a
        assert b < q / (1 - q)


# --- saturation -----------------------------------------------------------

def test_saturate_third_is_quick():
    res = saturate(F(1, 3))
    assert res.status == "GOAL" and res.passes <= 2
    assert verify_certificate(res.certificate)


def test_saturate_two_fifths_contains_replay():
    z, cert, status = saturate(F(2, 5))
    assert status == "GOAL"
    assert z.contains(replay_paper_proof(F(2, 5)).finalSet)
    assert verify_certificate(cert)


@pytest.mark.parametrize("q", [F(1, 10), F(1, 4), F(19, 50), F(44, 100)])
def test_saturation_is_monotone(q):
    res = saturate(q)
    for a, b in zip(res.history, res.history[1:]):
        assert b.contains(a)
    assert oracles.pointwise_step_violations(res.certificate) == 0


def test_saturate_above_threshold_is_data_only():
    # the outcome here is recorded, not asserted as mathematics
    res = saturate(F(9, 20), budget=(24, 4096))
    assert res.status in {"GOAL", "STALLED", "BUDGET"}
    assert verify_certificate(res.certificate)
    assert oracles.pointwise_step_violations(res.certificate, k=3) == 0


def test_saturate_budget_is_reported():
    res = saturate(F(2, 5), budget=(0, 4096))
    assert res.status in {"GOAL", "BUDGET"}
    res = saturate(F(9, 20), budget=(1, 4096))
    assert res.status == "BUDGET"
    assert res.certificate.verdict is Verdict.INCOMPLETE
    assert verify_certificate(res.certificate)


def test_saturate_stop_at_goal():
    res = saturate(F(44, 100), stop_at_goal=True)
    assert res.status == "GOAL"
    assert verify_certificate(res.certificate)


def test_saturate_custom_start_is_not_trusted():
    res = saturate(F(1, 3), Z0=ZeroSet.open(F(-1, 2), F(1, 2)).insert(F(0)))
    assert res.status == "GOAL"
    assert not verify_certificate(res.certificate)
