"""Exact rational arithmetic for the parameter q.

Every quantity the prover touches is a :class:`fractions.Fraction`.  The
irrational thresholds of the problem are never approximated here; regime
membership is decided by the exact sign of the comparator polynomials

* ``q**2 - 3*q + 1``          (root (3 - sqrt 5)/2, the case split),
* ``q**2 + 2*q - 1``          (root sqrt 2 - 1, the older bound),
* ``3*q**3 - 3*q**2 + 3*q - 1`` (root (1 - 2**(1/3) + 4**(1/3))/3).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

RationalLike = Union[Fraction, int, str]

# constant term first
CASE_SPLIT_POLY = (1, -3, 1)
SQRT2_POLY = (-1, 2, 1)
CUBIC_POLY = (-1, 3, -3, 3)

ONE = Fraction(1)
HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


class OutOfRange(ValueError):
    """q is not in the open unit interval."""


class UnknownInequality(KeyError):
    pass


class _Infinity(enum.Enum):
    INFINITY = "inf"

    def __repr__(self) -> str:
        return "INFINITY"


#: Seed index ``n = +oo`` in the seed-point set.
INFINITY = _Infinity.INFINITY


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ``value`` to a Fraction, refusing floats.

    Strings are accepted in ``"num/den"`` or integer form.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def poly_eval(coefficients: Sequence[RationalLike], q: RationalLike) -> Fraction:
    q = as_rational(q)
    acc = Fraction(0)
    for c in reversed(coefficients):
        acc = acc * q + as_rational(c)
    return acc


def poly_sign(coefficients: Sequence[RationalLike], q: RationalLike) -> int:
    """Exact sign of ``sum(c_i * q**i)``, coefficients given constant term first."""
    if len(coefficients) == 0:
        raise ValueError("empty coefficient list")
    return _sign(poly_eval(coefficients, q))


def _require_unit(q: Fraction) -> None:
    if not 0 < q < 1:
        raise OutOfRange(f"q = {q} is not in (0, 1)")


@dataclass(frozen=True)
class QProfile:
    """The exact endpoints derived from q that the propagation chain uses."""

    q: Fraction
    Q: Fraction
    oneMinusQ: Fraction
    qQ: Fraction
    qTwoMinusQ: Fraction
    q2TwoMinusQ: Fraction
    qMinusQ2TwoMinusQ: Fraction
    qPlusQ2Q: Fraction
    oneMinusQQ: Fraction
    oneMinusQTwoMinusQ: Fraction


def derived_quantities(q: RationalLike) -> QProfile:
    q = as_rational(q)
    _require_unit(q)
    Q = q / (1 - q)
    return QProfile(
        q=q,
        Q=Q,
        oneMinusQ=1 - Q,
        qQ=q * Q,
        qTwoMinusQ=q * (2 - Q),
        q2TwoMinusQ=q * q * (2 - Q),
        qMinusQ2TwoMinusQ=q - q * q * (2 - Q),
        qPlusQ2Q=q + q * q * Q,
        oneMinusQQ=1 - q * Q,
        oneMinusQTwoMinusQ=1 - q * (2 - Q),
    )


class RegimeTag(str, enum.Enum):
    CaseI = "CaseI"
    CaseII = "CaseII"
    AboveThreshold = "AboveThreshold"
    Invalid = "Invalid"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    quarterFlag: bool
    halfGuard: bool

    @property
    def provable(self) -> bool:
        return self.tag in (RegimeTag.CaseI, RegimeTag.CaseII)


def classify_regime(q: RationalLike) -> Regime:
    q = as_rational(q)
    quarter = q == QUARTER
    half = q < HALF
    if q <= 0 or q >= 1:
        tag = RegimeTag.Invalid
    elif poly_sign(CUBIC_POLY, q) > 0:
        # the cubic is increasing and already positive at 1/2
        tag = RegimeTag.AboveThreshold
    elif poly_sign(CASE_SPLIT_POLY, q) >= 0:
        tag = RegimeTag.CaseI
    else:
        tag = RegimeTag.CaseII
    return Regime(tag, quarter, half)


def partial_geom_sum(q: RationalLike, n) -> Fraction:
    """``q + q**2 + ... + q**n``; empty sum for n = 0, Q for n = INFINITY."""
    q = as_rational(q)
    _require_unit(q)
    if n is INFINITY:
        return q / (1 - q)
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"n must be a natural number or INFINITY, got {n!r}")
    # closed form q(1 - q^n)/(1 - q), exact
    return q * (1 - q**n) / (1 - q)


def seed_point(q: RationalLike, n, epsilon: int) -> Fraction:
    if epsilon not in (-1, 1):
        raise ValueError("epsilon must be -1 or +1")
    return epsilon * partial_geom_sum(q, n)


def _ineq_table(p: QProfile) -> dict:
    return {
        # q - q^2(2-Q) <= 1 - Q; equivalent to the cubic being <= 0 on (0, 1/2)
        "INEQ12": lambda: p.qMinusQ2TwoMinusQ <= p.oneMinusQ,
        "QQ_LT": lambda: p.qQ < p.oneMinusQTwoMinusQ,
        "SIDE16A": lambda: p.qPlusQ2Q < p.oneMinusQQ,
        "SIDE16B": lambda: p.oneMinusQTwoMinusQ < p.qTwoMinusQ,
        "FINAL_Q": lambda: p.q < p.qTwoMinusQ,
        # q <= 1 - Q, the first case of the split
        "CASE_I": lambda: p.q <= p.oneMinusQ,
        "HALF_GUARD": lambda: p.q < HALF,
    }


INEQUALITY_IDS = tuple(_ineq_table(derived_quantities(HALF)).keys())

INEQUALITY_TEXT = {
    "INEQ12": "q - q^2(2-Q) <= 1 - Q",
    "QQ_LT": "qQ < 1 - q(2-Q)",
    "SIDE16A": "q + q^2 Q < 1 - qQ",
    "SIDE16B": "1 - q(2-Q) < q(2-Q)",
    "FINAL_Q": "q < q(2-Q)",
    "CASE_I": "q <= 1 - Q",
    "HALF_GUARD": "q < 1/2",
}


def check_inequality(name: str, q: RationalLike) -> bool:
    """Exact truth value of one of the named side inequalities at ``q``."""
    table = _ineq_table(derived_quantities(q))
    try:
        return table[name]()
    except KeyError:
        raise UnknownInequality(name) from None


def bisect_root(
    coefficients: Sequence[RationalLike],
    lo: RationalLike = 0,
    hi: RationalLike = 1,
    tol: RationalLike = Fraction(1, 10**12),
) -> Fraction:
    """Bisection on exact signs; returns a rational within ``tol`` of a root.

    Diagnostics only.  The prover never consumes these values.
    """
    lo, hi, tol = as_rational(lo), as_rational(hi), as_rational(tol)
    s_lo, s_hi = poly_sign(coefficients, lo), poly_sign(coefficients, hi)
    if s_lo == 0:
        return lo
    if s_hi == 0:
        return hi
    if s_lo == s_hi:
        raise ValueError("no sign change on the bracket")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        s = poly_sign(coefficients, mid)
        if s == 0:
            return mid
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def rational_grid(lo: RationalLike, hi: RationalLike, steps: int) -> list:
    """``steps`` equally spaced exact rationals from lo to hi inclusive."""
    lo, hi = as_rational(lo), as_rational(hi)
    if steps < 1:
        raise ValueError("steps must be positive")
    if steps == 1:
        return [lo]
    return [lo + (hi - lo) * Fraction(k, steps - 1) for k in range(steps)]

