"""Exact zero-set propagation and numerical probes for the two-scale equation

    f(qx) = [f(x-1) + f(x+1) + 2 f(x)] / (4q),   f(x) = 0 for |x| > q/(1-q).
"""

from .certificate import Certificate, DerivationStep, Rule, Verdict
from .checker import check_certificate, verify_certificate
from .exactq import (
    INFINITY,
    QProfile,
    Regime,
    RegimeTag,
    check_inequality,
    classify_regime,
    derived_quantities,
    partial_geom_sum,
    poly_sign,
)
from .prover import (
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
from .zeroset import Interval, ZeroSet, goal_reached

__version__ = "0.1.0"

__all__ = [
    "Certificate", "DerivationStep", "Rule", "Verdict",
    "check_certificate", "verify_certificate",
    "INFINITY", "QProfile", "Regime", "RegimeTag", "check_inequality", "classify_regime",
    "derived_quantities", "partial_geom_sum", "poly_sign",
    "GoalNotReached", "HalfGuardViolated", "RegimeError", "StepFailure", "initial_axioms",
    "lemma1_closure", "replay_paper_proof", "rule_backward", "rule_forward", "saturate",
    "Interval", "ZeroSet", "goal_reached",
]
