"""Zero-set propagation for ``f(qx) = [f(x-1) + f(x+1) + 2f(x)] / (4q)``.

Four sound propagation rules follow from the three-term shape of the
equation.  With ``Z`` the set where ``f`` is already known to vanish:

* FORWARD: on a window ``J`` with ``J, J-1, J+1`` inside ``Z`` the right-hand
  side vanishes, hence ``f = 0`` on ``qJ``.
* BACK_CENTER / BACK_MINUS / BACK_PLUS: when ``f(qx)`` and two of the three
  right-hand terms vanish, the remaining one does too.

:func:`replay_paper_proof` runs the hand-written band sequence on exact
windows; :func:`saturate` applies every rule on its maximal window until
the closure goal ``(0, q) in Z`` is met or nothing grows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple

from . import exactq
from .certificate import (
    Axiom,
    AxiomKind,
    Certificate,
    DerivationStep,
    Rule,
    Verdict,
)
from .exactq import INFINITY, QUARTER, RegimeTag, as_rational, format_rational
from .zeroset import (
    DEFAULT_MAX_INTERVALS,
    Interval,
    IntervalCapExceeded,
    ZeroSet,
    goal_reached,
)

log = logging.getLogger(__name__)

#: Number of induction levels of the closure argument whose arithmetic is spelled out.
CLOSURE_DEPTH = 8

DEFAULT_PASSES = 64


class ProverError(Exception):
    pass


class HalfGuardViolated(ProverError):
    pass


class RegimeError(ProverError):
    def __init__(self, q, tag):
        super().__init__(f"q = {q} is {tag.value}; the propagation proof does not apply")
        self.q = q
        self.tag = tag


class StepFailure(ProverError):
    def __init__(self, step_index: int, reason: str, check: Optional[str] = None):
        super().__init__(f"step {step_index}: {reason}")
        self.step_index = step_index
        self.reason = reason
        self.check = check


class GoalNotReached(ProverError):
    pass


# windows and rules


def forward_window(Z: ZeroSet) -> ZeroSet:
    return Z & Z.translate(1) & Z.translate(-1)


def rule_forward(Z: ZeroSet, q) -> ZeroSet:
    return forward_window(Z).scale(as_rational(q))


def backward_window(Z: ZeroSet, q, isolate: str) -> ZeroSet:
    pre = Z.scale(1 / as_rational(q))
    if isolate == "CENTER":
        return pre & Z.translate(1) & Z.translate(-1)
    if isolate == "MINUS":
        return pre & Z & Z.translate(-1)
    if isolate == "PLUS":
        return pre & Z & Z.translate(1)
    raise ValueError(f"isolate must be MINUS, CENTER or PLUS, not {isolate!r}")


_SHIFT = {"MINUS": -1, "CENTER": 0, "PLUS": 1}


def rule_backward(Z: ZeroSet, q, isolate: str) -> ZeroSet:
    return backward_window(Z, q, isolate).translate(_SHIFT[isolate])


# axioms


def _validate_seed(seed) -> Tuple[object, int]:
    n, eps = seed
    if eps not in (-1, 1):
        raise ValueError("seed epsilon must be -1 or +1")
    if n is not INFINITY and (isinstance(n, bool) or not isinstance(n, int) or n < 0):
        raise ValueError(f"seed n must be a natural number or INFINITY, got {n!r}")
    return n, eps


def axiom_list(q, seed=(0, 1)) -> List[Axiom]:
    q = as_rational(q)
    n, _ = _validate_seed(seed)
    if not q < exactq.HALF or q <= 0:
        raise HalfGuardViolated(f"q = {q} is not in (0, 1/2)")
    if n is INFINITY:
        raise ValueError("initial axioms need a finite seed index")
    p = exactq.derived_quantities(q)
    axioms = [
        Axiom(AxiomKind.SUPPORT, ZeroSet.outside(p.Q), "f vanishes for |x| > Q"),
        Axiom(AxiomKind.SEED_LEMMA2, ZeroSet.open(-p.oneMinusQ, p.oneMinusQ),
              "boundedness near a seed point and 2q < 1 force f = 0 on |x| < 1 - Q"),
        Axiom(AxiomKind.ATOM_ZERO, ZeroSet.points(0), "f(0) = f(0)/(2q) with 2q < 1"),
    ]
    if q != QUARTER:
        axioms.append(Axiom(AxiomKind.ATOM_Q, ZeroSet.points(-p.Q, p.Q),
                            "x = Q/q gives f(Q) = f(Q)/(4q); mirrored for -Q"))
    return axioms


class _Builder:
    """Accumulates steps and the running zero set; checks each rule before use."""

    def __init__(self, q: Fraction):
        self.q = q
        self.Z = ZeroSet.empty()
        self.steps: List[DerivationStep] = []

    @property
    def next_index(self) -> int:
        return len(self.steps)

    def _append(self, **kw) -> DerivationStep:
        step = DerivationStep(index=self.next_index, **kw)
        self.steps.append(step)
        self.Z = self.Z.insert(step.produced)
        return step

    def _support(self, piece: ZeroSet) -> Tuple[int, ...]:
        """Indices of earlier steps whose output meets ``piece``."""
        return tuple(s.index for s in self.steps if s.produced.meets(piece))

    def axiom(self, ax: Axiom, inputs: Tuple[int, ...] = ()) -> DerivationStep:
        return self._append(rule=Rule.AXIOM, inputs=inputs, domain=ZeroSet.empty(),
                            produced=ax.payload, paperTag=ax.justification, axiom=ax.kind)

    def inequality(self, name: str) -> DerivationStep:
        holds = exactq.check_inequality(name, self.q)
        if not holds:
            raise StepFailure(self.next_index,
                              f"{name} ({exactq.INEQUALITY_TEXT[name]}) is false at q = {self.q}",
                              check=name)
        return self._append(rule=Rule.INEQUALITY_CHECK, inputs=(), domain=ZeroSet.empty(),
                            produced=ZeroSet.empty(), paperTag=exactq.INEQUALITY_TEXT[name],
                            inequality=name, holds=True)

    def apply(self, rule: Rule, window: ZeroSet, tag: str) -> DerivationStep:
        q, Z = self.q, self.Z
        needs = {
            Rule.FORWARD: [window, window.translate(-1), window.translate(1)],
            Rule.BACK_CENTER: [window.scale(q), window.translate(-1), window.translate(1)],
            Rule.BACK_MINUS: [window.scale(q), window, window.translate(1)],
            Rule.BACK_PLUS: [window.scale(q), window, window.translate(-1)],
        }[rule]
        for need in needs:
            if not Z.contains(need):
                raise StepFailure(self.next_index,
                                  f"{rule.value} on {window}: {need} not yet known to vanish")
        produced = {
            Rule.FORWARD: window.scale(q),
            Rule.BACK_CENTER: window,
            Rule.BACK_MINUS: window.translate(-1),
            Rule.BACK_PLUS: window.translate(1),
        }[rule]
        inputs = self._support(ZeroSet([p for n in needs for p in n.pieces()]))
        return self._append(rule=rule, inputs=inputs, domain=window, produced=produced, paperTag=tag)

    def mirror(self, source: DerivationStep) -> Optional[DerivationStep]:
        image = source.produced.reflect()
        if self.Z.contains(image):
            return None
        return self._append(rule=Rule.SYMMETRIZE, inputs=(source.index,), domain=source.produced,
                            produced=image, paperTag="mirror image via f(x) -> f(-x)")

    def mirror_all(self) -> Optional[DerivationStep]:
        image = self.Z.reflect()
        if self.Z.contains(image):
            return None
        inputs = tuple(s.index for s in self.steps if not s.produced.is_empty())
        return self._append(rule=Rule.SYMMETRIZE, inputs=inputs, domain=self.Z,
                            produced=image, paperTag="mirror image via f(x) -> f(-x)")

    def ensure(self, piece: ZeroSet, what: str) -> None:
        if not self.Z.contains(piece):
            raise StepFailure(self.next_index, f"{what}: {piece} is not covered by {self.Z}")


def initial_axioms(q, seed=(0, 1)) -> Tuple[ZeroSet, List[DerivationStep]]:
    """The starting zero set ``Z0`` and the AXIOM steps that build it."""
    b = _Builder(as_rational(q))
    for ax in axiom_list(q, seed):
        b.axiom(ax)
    return b.Z, b.steps


# closure


def _closure_side(Z: ZeroSet, q: Fraction) -> int:
    if Z.contains(Interval.open(0, q)):
        return 1
    if Z.contains(Interval.open(-q, 0)):
        return -1
    return 0


def _closure_step(b: _Builder) -> DerivationStep:
    q, Z = b.q, b.Z
    side = _closure_side(Z, q)
    if side == 0 or q >= exactq.HALF:
        raise GoalNotReached(f"neither (0, q) nor (-q, 0) is known to vanish for q = {q}")
    p = exactq.derived_quantities(q)
    base = ZeroSet([Interval(0, q, True, False)]) if side > 0 else ZeroSet([Interval(-q, 0, False, True)])
    b.ensure(ZeroSet.points(0), "closure base needs f(0) = 0")
    sums = [exactq.partial_geom_sum(q, k) for k in range(CLOSURE_DEPTH + 1)]
    for k in range(1, CLOSURE_DEPTH + 1):
        if sums[k] / q != 1 + sums[k - 1]:
            raise StepFailure(b.next_index, f"geometric recursion fails at level {k}")
    if not p.Q < 1:
        raise StepFailure(b.next_index, "closure needs Q < 1")
    if q == QUARTER:
        f_q = {"rule": AxiomKind.ATOM_Q_CONDITIONAL.value, "via": format_rational(p.qQ),
               "reason": "qQ lies in [0, Q), which the induction covers"}
    else:
        f_q = {"rule": AxiomKind.ATOM_Q.value}
    detail = {
        "side": side,
        "partialSums": [format_rational(s) for s in sums],
        "Q": format_rational(p.Q),
        "fQ": f_q,
    }
    inputs = b._support(base)
    return b._append(rule=Rule.LEMMA1_CLOSURE, inputs=inputs, domain=base,
                     produced=ZeroSet.everything(),
                     paperTag="vanishing on (0,q) spreads over A_n = [0, q+...+q^n), then to all of R",
                     detail=detail)


def lemma1_closure(Z: ZeroSet, q) -> DerivationStep:
    """Standalone closure step over ``Z``; raises GoalNotReached if ``(0,q)`` is open."""
    q = as_rational(q)
    if not goal_reached(Z, q):
        raise GoalNotReached(f"neither (0, q) nor (-q, 0) lies in {Z}")
    b = _Builder(q)
    b._append(rule=Rule.AXIOM, inputs=(), domain=ZeroSet.empty(), produced=Z,
              paperTag="given zero set", axiom=None)
    return _closure_step(b)


def _conditional_atom(b: _Builder) -> DerivationStep:
    p = exactq.derived_quantities(b.q)
    witness = ZeroSet.points(-p.qQ, p.qQ)
    b.ensure(witness, "f(Q) = 0 iff f(qQ) = 0 needs qQ in the zero set")
    ax = Axiom(AxiomKind.ATOM_Q_CONDITIONAL, ZeroSet.points(-p.Q, p.Q),
               "q = 1/4: f(Q) = 0 iff f(qQ) = 0, and qQ is known to vanish")
    return b.axiom(ax, inputs=b._support(witness))


# scripted replay


def _reduce_seed(seed):
    n, eps = _validate_seed(seed)
    if n is INFINITY:
        return (0, eps), "n = +inf reduced to a finite index; the seed axiom does not depend on n"
    return (n, eps), None


def replay_paper_proof(q, seed=(0, 1), *, override_regime: bool = False) -> Certificate:
    q = as_rational(q)
    regime = exactq.classify_regime(q)
    if regime.tag is RegimeTag.Invalid or (regime.tag is RegimeTag.AboveThreshold and not override_regime):
        raise RegimeError(q, regime.tag)
    finite_seed, reduction = _reduce_seed(seed)
    p = exactq.derived_quantities(q)
    b = _Builder(q)
    for ax in axiom_list(q, finite_seed):
        b.axiom(ax)

    if regime.tag is RegimeTag.CaseI:
        b.inequality("CASE_I")
        if regime.quarterFlag:
            _conditional_atom(b)
    else:
        _case_two(b, p)

    final = b.Z
    _closure_step(b)
    return Certificate(q=q, regime=regime, seed=finite_seed, steps=tuple(b.steps),
                       verdict=Verdict.TRIVIAL_ONLY, finalSet=final, seedReduction=reduction)


def _case_two(b: _Builder, p: exactq.QProfile) -> None:
    ci = Interval.closed
    # close the seed interval at its ends
    s = b.apply(Rule.BACK_CENTER, ZeroSet.points(p.oneMinusQ), "f(1-Q) = 0 from x = 1-Q")
    b.mirror(s)
    s = b.apply(Rule.FORWARD, ZeroSet([ci(p.Q, 2 - p.Q)]), "band qQ <= |x| <= q(2-Q)")
    b.mirror(s)
    b.inequality("QQ_LT")
    b.inequality("SIDE16B")
    s = b.apply(Rule.FORWARD, ZeroSet([ci(p.oneMinusQTwoMinusQ, p.qTwoMinusQ)]),
                "band q-q^2(2-Q) <= |x| <= q^2(2-Q)")
    b.mirror(s)
    b.inequality("INEQ12")
    b.ensure(ZeroSet([ci(-p.q2TwoMinusQ, p.q2TwoMinusQ)]), "|x| <= q^2(2-Q)")
    s = b.apply(Rule.BACK_PLUS, ZeroSet([ci(-p.qTwoMinusQ, -p.qQ)]), "band 1-q(2-Q) <= x <= 1-qQ")
    b.mirror(s)
    b.inequality("SIDE16A")
    if p.oneMinusQ <= p.qQ:
        # both bands below are nonempty only from sqrt(2) - 1 upward
        b.ensure(ZeroSet([ci(p.qTwoMinusQ, p.qPlusQ2Q)]), "q(2-Q) <= x <= q + q^2 Q")
        s = b.apply(Rule.BACK_MINUS, ZeroSet([ci(2 - p.Q, 1 + p.qQ)]), "band 1-Q <= x <= qQ")
        b.mirror(s)
    b.inequality("FINAL_Q")
    b.ensure(ZeroSet([ci(0, p.qTwoMinusQ)]), "0 <= x <= q(2-Q)")


# saturation


@dataclass
class SaturationResult:
    zero_set: ZeroSet
    certificate: Certificate
    status: str
    passes: int
    history: List[ZeroSet] = field(default_factory=list)

    def __iter__(self) -> Iterator:
        return iter((self.zero_set, self.certificate, self.status))


def saturate(q, Z0: Optional[ZeroSet] = None, budget: Tuple[int, int] = (DEFAULT_PASSES, DEFAULT_MAX_INTERVALS),
             seed=(0, 1), *, stop_at_goal: bool = False) -> SaturationResult:
    """Apply all rules on maximal windows, one pass at a time.

    Status is GOAL once ``(0, q)`` or ``(-q, 0)`` is covered, STALLED if a full
    pass adds nothing first, BUDGET if passes or intervals run out first.
    Unless ``stop_at_goal`` is set, passes continue after GOAL up to the
    fixpoint (or the budget) so that the returned set is as large as the
    rules allow.

    ``Z0`` defaults to the initial axioms.  A caller-supplied ``Z0`` is logged
    as one unjustified AXIOM step, so its certificate will not verify.
    """
    q = as_rational(q)
    max_passes, max_intervals = budget
    regime = exactq.classify_regime(q)
    finite_seed, reduction = _reduce_seed(seed)
    b = _Builder(q)
    if Z0 is None:
        for ax in axiom_list(q, finite_seed):
            b.axiom(ax)
    else:
        b._append(rule=Rule.AXIOM, inputs=(), domain=ZeroSet.empty(), produced=Z0,
                  paperTag="caller-supplied starting set", axiom=None)
    history = [b.Z]
    goal = False
    status = None
    passes = 0

    def check_goal() -> bool:
        nonlocal goal
        goal = goal or (q < exactq.HALF and b.Z.contains(ZeroSet.points(0)) and goal_reached(b.Z, q))
        return goal

    def conditional_atom() -> None:
        if not regime.quarterFlag:
            return
        pq = exactq.derived_quantities(q)
        if pq.Q not in b.Z and b.Z.contains(ZeroSet.points(-pq.qQ, pq.qQ)):
            _conditional_atom(b)

    try:
        conditional_atom()
        while True:
            if check_goal() and stop_at_goal:
                break
            if passes >= max_passes:
                status = "BUDGET"
                break
            passes += 1
            before = b.Z
            for rule in (Rule.FORWARD, Rule.BACK_CENTER, Rule.BACK_MINUS, Rule.BACK_PLUS, Rule.SYMMETRIZE):
                _saturate_rule(b, rule)
                if len(b.Z.intervals) > max_intervals:
                    status = "BUDGET"
                    break
                if check_goal() and stop_at_goal:
                    break
            conditional_atom()
            history.append(b.Z)
            if status is not None or (stop_at_goal and goal):
                break
            if b.Z == before:
                status = "STALLED"
                break
    except IntervalCapExceeded:
        status = "BUDGET"
    check_goal()
    if goal:
        status = "GOAL"

    final = b.Z
    verdict = Verdict.INCOMPLETE
    if goal:
        _closure_step(b)
        verdict = Verdict.TRIVIAL_ONLY
    log.debug("saturate q=%s: %s after %d passes, %d steps", q, status, passes, len(b.steps))
    cert = Certificate(q=q, regime=regime, seed=finite_seed, steps=tuple(b.steps), verdict=verdict,
                       finalSet=final, seedReduction=reduction)
    return SaturationResult(final, cert, status, passes, history)


def _saturate_rule(b: _Builder, rule: Rule) -> None:
    Z, q = b.Z, b.q
    if rule is Rule.SYMMETRIZE:
        b.mirror_all()
        return
    if rule is Rule.FORWARD:
        window = forward_window(Z)
    else:
        window = backward_window(Z, q, rule.value.split("_")[1])
    if window.is_empty():
        return
    produced = {
        Rule.FORWARD: lambda: window.scale(q),
        Rule.BACK_CENTER: lambda: window,
        Rule.BACK_MINUS: lambda: window.translate(-1),
        Rule.BACK_PLUS: lambda: window.translate(1),
    }[rule]()
    if Z.contains(produced):
        return
    b.apply(rule, window, f"{rule.value} on the maximal window")
