"""Certificate data model and its JSON wire format."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from .exactq import INFINITY, Regime, RegimeTag, as_rational, format_rational
from .zeroset import ZeroSet


class Rule(str, enum.Enum):
    FORWARD = "FORWARD"
    BACK_MINUS = "BACK_MINUS"
    BACK_CENTER = "BACK_CENTER"
    BACK_PLUS = "BACK_PLUS"
    AXIOM = "AXIOM"
    INEQUALITY_CHECK = "INEQUALITY_CHECK"
    LEMMA1_CLOSURE = "LEMMA1_CLOSURE"
    SYMMETRIZE = "SYMMETRIZE"


class AxiomKind(str, enum.Enum):
    SUPPORT = "SUPPORT"
    SEED_LEMMA2 = "SEED_LEMMA2"
    ATOM_ZERO = "ATOM_ZERO"
    ATOM_Q = "ATOM_Q"
    ATOM_Q_CONDITIONAL = "ATOM_Q_CONDITIONAL"


class Verdict(str, enum.Enum):
    TRIVIAL_ONLY = "TRIVIAL_ONLY"
    INCOMPLETE = "INCOMPLETE"


class CertificateFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Axiom:
    kind: AxiomKind
    payload: ZeroSet
    justification: str


@dataclass(frozen=True)
class DerivationStep:
    index: int
    rule: Rule
    inputs: Tuple[int, ...]
    domain: ZeroSet
    produced: ZeroSet
    paperTag: str
    axiom: Optional[AxiomKind] = None
    inequality: Optional[str] = None
    holds: Optional[bool] = None
    detail: Dict[str, Any] = field(default_factory=dict, compare=True, hash=False)

    def to_json(self) -> dict:
        out = {
            "index": self.index,
            "rule": self.rule.value,
            "inputs": list(self.inputs),
            "domain": self.domain.to_json(),
            "produced": self.produced.to_json(),
            "paperTag": self.paperTag,
        }
        if self.axiom is not None:
            out["axiom"] = self.axiom.value
        if self.inequality is not None:
            out["inequality"] = self.inequality
            out["holds"] = self.holds
        if self.detail:
            out["detail"] = self.detail
        return out

    @classmethod
    def from_json(cls, d: dict) -> "DerivationStep":
        return cls(
            index=int(d["index"]),
            rule=Rule(d["rule"]),
            inputs=tuple(int(i) for i in d.get("inputs", [])),
            domain=ZeroSet.from_json(d["domain"]),
            produced=ZeroSet.from_json(d["produced"]),
            paperTag=str(d.get("paperTag", "")),
            axiom=AxiomKind(d["axiom"]) if d.get("axiom") is not None else None,
            inequality=d.get("inequality"),
            holds=d.get("holds"),
            detail=dict(d.get("detail", {})),
        )


@dataclass(frozen=True)
class Certificate:
    q: Fraction
    regime: Regime
    seed: Tuple[Any, int]
    steps: Tuple[DerivationStep, ...]
    verdict: Verdict
    finalSet: ZeroSet
    seedReduction: Optional[str] = None

    def to_json(self) -> dict:
        n, eps = self.seed
        out = {
            "q": format_rational(self.q),
            "regime": {
                "tag": self.regime.tag.value,
                "quarterFlag": self.regime.quarterFlag,
                "halfGuard": self.regime.halfGuard,
            },
            "seed": {"n": "inf" if n is INFINITY else n, "epsilon": eps},
            "steps": [s.to_json() for s in self.steps],
            "verdict": self.verdict.value,
            "finalSet": self.finalSet.to_json(),
        }
        if self.seedReduction:
            out["seedReduction"] = self.seedReduction
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        try:
            reg = d["regime"]
            n = d["seed"]["n"]
            return cls(
                q=as_rational(d["q"]),
                regime=Regime(RegimeTag(reg["tag"]), bool(reg["quarterFlag"]), bool(reg["halfGuard"])),
                seed=(INFINITY if n == "inf" else int(n), int(d["seed"]["epsilon"])),
                steps=tuple(DerivationStep.from_json(s) for s in d["steps"]),
                verdict=Verdict(d["verdict"]),
                finalSet=ZeroSet.from_json(d["finalSet"]),
                seedReduction=d.get("seedReduction"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateFormatError(f"malformed certificate: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"not JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise CertificateFormatError("certificate must be a JSON object")
        return cls.from_json(data)
