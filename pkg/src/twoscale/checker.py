"""Independent certificate checker.

Re-derives every step from scratch using only the set algebra in
:mod:`twoscale.zeroset` and the exact arithmetic in :mod:`twoscale.exactq`.
Nothing from the producer in :mod:`twoscale.prover` is imported, so a bug
in the producer cannot vouch for itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import exactq
from .certificate import AxiomKind, Certificate, DerivationStep, Rule, Verdict
from .exactq import INFINITY, format_rational
from .zeroset import Interval, ZeroSet


@dataclass
class CheckReport:
    ok: bool
    failed_step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


class _Reject(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _require(cond: bool, reason: str) -> None:
    if not cond:
        raise _Reject(reason)


def _expected_axiom(kind: AxiomKind, q: Fraction, Z: ZeroSet) -> ZeroSet:
    Q = q / (1 - q)
    half = q < Fraction(1, 2)
    if kind is AxiomKind.SUPPORT:
        return ZeroSet.outside(Q)
    if kind is AxiomKind.SEED_LEMMA2:
        _require(half, "seed axiom needs q < 1/2")
        return ZeroSet.open(Q - 1, 1 - Q)
    if kind is AxiomKind.ATOM_ZERO:
        _require(half, "f(0) = 0 needs q < 1/2")
        return ZeroSet.points(0)
    if kind is AxiomKind.ATOM_Q:
        _require(q != Fraction(1, 4), "f(Q) = 0 is not automatic at q = 1/4")
        return ZeroSet.points(-Q, Q)
    if kind is AxiomKind.ATOM_Q_CONDITIONAL:
        _require(q == Fraction(1, 4), "conditional f(Q) atom applies only at q = 1/4")
        _require(Z.contains(ZeroSet.points(-q * Q, q * Q)), "qQ not yet known to vanish")
        return ZeroSet.points(-Q, Q)
    raise _Reject(f"unknown axiom kind {kind}")


def _rule_obligations(rule: Rule, J: ZeroSet, q: Fraction):
    """(sets that must already vanish, set the rule yields)."""
    left, right, image = J.translate(-1), J.translate(1), J.scale(q)
    if rule is Rule.FORWARD:
        return [J, left, right], image
    if rule is Rule.BACK_CENTER:
        return [image, left, right], J
    if rule is Rule.BACK_MINUS:
        return [image, J, right], left
    if rule is Rule.BACK_PLUS:
        return [image, J, left], right
    raise _Reject(f"{rule} is not a propagation rule")


def _check_closure(step: DerivationStep, q: Fraction, Z: ZeroSet) -> None:
    _require(q < Fraction(1, 2), "closure needs q < 1/2")
    Q = q / (1 - q)
    _require(Q < 1, "closure needs Q < 1")
    _require(0 in Z, "closure needs f(0) = 0")
    side = step.detail.get("side")
    if side == 1:
        base = ZeroSet([Interval(0, q, True, False)])
    elif side == -1:
        base = ZeroSet([Interval(-q, 0, False, True)])
    else:
        raise _Reject("closure side must be +1 or -1")
    _require(step.domain == base, "closure domain is not the first induction set")
    _require(Z.contains(base), "first induction set is not known to vanish")
    sums = step.detail.get("partialSums", [])
    _require(len(sums) >= 2, "closure lists no induction levels")
    expect = Fraction(0)
    prev = None
    for k, text in enumerate(sums):
        s_k = exactq.as_rational(text)
        _require(s_k == expect, f"partial sum {k} is {text}, expected {format_rational(expect)}")
        if prev is not None:
            _require(s_k / q == 1 + prev, f"s_{k}/q != 1 + s_{k-1}")
        _require(s_k < Q, f"partial sum {k} is not below Q")
        prev = s_k
        expect = expect + q ** (k + 1)
    f_q = step.detail.get("fQ", {})
    if q == Fraction(1, 4):
        _require(f_q.get("rule") == AxiomKind.ATOM_Q_CONDITIONAL.value,
                 "q = 1/4 needs the conditional f(Q) resolution")
        via = exactq.as_rational(f_q.get("via", "0"))
        _require(via == q * Q and 0 <= via < Q, "conditional f(Q) witness is not qQ in [0, Q)")
    else:
        _require(f_q.get("rule") == AxiomKind.ATOM_Q.value, "f(Q) resolution must be ATOM_Q")
    _require(step.produced == ZeroSet.everything(), "closure must conclude f = 0 everywhere")


def _check_step(step: DerivationStep, q: Fraction, Z: ZeroSet) -> None:
    rule = step.rule
    if rule is Rule.AXIOM:
        _require(step.axiom is not None, "axiom step without a kind")
        _require(step.produced == _expected_axiom(step.axiom, q, Z),
                 f"{step.axiom.value} payload differs from the canonical one")
    elif rule is Rule.INEQUALITY_CHECK:
        name = step.inequality
        _require(name in exactq.INEQUALITY_IDS, f"unknown inequality {name!r}")
        _require(step.holds is True, f"{name} recorded as not holding")
        _require(exactq.check_inequality(name, q), f"{name} is false at q = {q}")
        _require(step.produced.is_empty(), "inequality checks produce nothing")
    elif rule is Rule.SYMMETRIZE:
        _require(Z.contains(step.domain), "mirror image of an unproven set")
        _require(step.produced == step.domain.reflect(), "produced is not the mirror image of the domain")
    elif rule is Rule.LEMMA1_CLOSURE:
        _check_closure(step, q, Z)
    else:
        needs, yields = _rule_obligations(rule, step.domain, q)
        _require(not step.domain.is_empty(), "empty rule window")
        for need in needs:
            _require(Z.contains(need), f"{rule.value}: {need} not known to vanish")
        _require(step.produced == yields, f"{rule.value}: produced {step.produced}, rule gives {yields}")


def check_certificate(cert: Certificate) -> CheckReport:
    q = cert.q
    try:
        _require(0 < q < 1, "q outside (0, 1)")
        _require(cert.regime == exactq.classify_regime(q), "recorded regime is wrong")
        n, eps = cert.seed
        _require(eps in (-1, 1), "seed epsilon must be +-1")
        _require(n is not INFINITY and isinstance(n, int) and n >= 0, "seed index must be finite")
    except _Reject as exc:
        return CheckReport(False, None, exc.reason)

    Z = ZeroSet.empty()
    closure_at: Optional[int] = None
    before_closure = Z
    for pos, step in enumerate(cert.steps):
        try:
            _require(step.index == pos, f"step index {step.index} at position {pos}")
            _require(all(0 <= i < pos for i in step.inputs), "inputs must cite earlier steps")
            _require(closure_at is None, "steps after the closure")
            _check_step(step, q, Z)
        except _Reject as exc:
            return CheckReport(False, pos, exc.reason)
        if step.rule is Rule.LEMMA1_CLOSURE:
            closure_at = pos
            before_closure = Z
        Z = Z.insert(step.produced)

    final_expected = before_closure if closure_at is not None else Z
    if cert.verdict is Verdict.TRIVIAL_ONLY and closure_at is None:
        return CheckReport(False, len(cert.steps), "TRIVIAL_ONLY verdict without a closure step")
    if cert.verdict is Verdict.INCOMPLETE and closure_at is not None:
        return CheckReport(False, closure_at, "INCOMPLETE verdict but a closure step is present")
    if cert.finalSet != final_expected:
        return CheckReport(False, len(cert.steps), "finalSet does not match the derived set")
    return CheckReport(True)


def verify_certificate(cert: Certificate) -> bool:
    return check_certificate(cert).ok

