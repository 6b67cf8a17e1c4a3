"""Valence-formula certificate: budget over the cusps plus verified vanishing at infinity."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .. import __version__
from ..cusps import WORKING_GROUP, GroupSpec, cusp_representatives, valence_budget
from ..qseries import DEFAULT_D
from .expand import CONDUCTOR, expand_identity
from .terms import IdentityTerm, build_identity_terms, identity_digest

F = Fraction
DEFAULT_T = 130

PROVEN = "proven"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass
class Certificate:
    group: str
    digest: str
    cusps: list  # dicts: cusp, width, bound, limiting_term
    budget: Optional[Fraction]
    conductor: int
    D: int
    T: Fraction
    V: Optional[Fraction]
    verdict: str
    reason: str = ""
    engine_version: str = __version__
    first_nonzero: Optional[Fraction] = None
    timestamp: Optional[str] = field(default=None, compare=False)

    def to_dict(self) -> dict:
        out = {
            "group": self.group,
            "digest": self.digest,
            "cusps": self.cusps,
            "budget": None if self.budget is None else str(self.budget),
            "conductor": self.conductor,
            "D": self.D,
            "T": str(self.T),
            "V": None if self.V is None else str(self.V),
            "verdict": self.verdict,
            "reason": self.reason,
            "first_nonzero": None if self.first_nonzero is None else str(self.first_nonzero),
            "engine_version": self.engine_version,
        }
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        opt = lambda x: None if x is None else F(x)
        return cls(
            group=d["group"],
            digest=d["digest"],
            cusps=list(d["cusps"]),
            budget=opt(d["budget"]),
            conductor=int(d["conductor"]),
            D=int(d["D"]),
            T=F(d["T"]),
            V=opt(d["V"]),
            verdict=d["verdict"],
            reason=d.get("reason", ""),
            engine_version=d.get("engine_version", ""),
            first_nonzero=opt(d.get("first_nonzero")),
            timestamp=d.get("timestamp"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))


def decide(V: Optional[Fraction], budget: Optional[Fraction], first_nonzero: Optional[Fraction]) -> tuple[str, str]:
    if first_nonzero is not None:
        return VIOLATED, f"nonzero coefficient at q^{first_nonzero}"
    if V is None or budget is None:
        return INCONCLUSIVE, "missing vanishing order or budget"
    if V + budget > 0:
        return PROVEN, f"vanishes below q^{V} and {V} + ({budget}) > 0"
    return INCONCLUSIVE, f"insufficient vanishing: {V} + ({budget}) <= 0"


def verify_mod7(
    T=DEFAULT_T,
    terms: Optional[Sequence[IdentityTerm]] = None,
    group: GroupSpec = WORKING_GROUP,
    D: int = DEFAULT_D,
    jobs: int = 1,
    timestamp: bool = False,
) -> Certificate:
    """Run the valence-formula argument for the weight-0 identity and record the outcome."""
    T = F(T)
    terms = list(terms) if terms is not None else build_identity_terms()
    digest = identity_digest(terms)
    reasons = []
    cusps, budget = [], None
    try:
        table, budget = valence_budget(group, [t.monomial() for t in terms], cusp_representatives(group))
        cusps = [row.to_dict() for row in table]
    except (ValueError, ArithmeticError) as exc:
        reasons.append(f"budget failed: {exc}")
    V = first = None
    try:
        s = expand_identity(terms, T, D, jobs)
        if s.is_zero():
            V = s.trunc
        else:
            first = s.valuation
            V = first
    except (ValueError, ArithmeticError, ZeroDivisionError) as exc:
        reasons.append(f"expansion failed: {exc}")
    verdict, why = decide(V, budget, first)
    if reasons and verdict == PROVEN:
        verdict = INCONCLUSIVE
    reason = "; ".join(reasons + [why])
    stamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()) if timestamp else None
    return Certificate(str(group), digest, cusps, budget, CONDUCTOR, D, T, V, verdict, reason, __version__, first, stamp)


def replay(cert: Certificate, terms: Optional[Sequence[IdentityTerm]] = None, jobs: int = 1) -> list[str]:
    """Recompute a stored certificate; returns the list of fields that differ (empty when it replays)."""
    from ..cusps import parse_group

    terms = list(terms) if terms is not None else build_identity_terms()
    if identity_digest(terms) != cert.digest:
        return ["digest"]
    fresh = verify_mod7(cert.T, terms, parse_group(cert.group), cert.D, jobs)
    a, b = cert.to_dict(), fresh.to_dict()
    a.pop("timestamp", None)
    return sorted(k for k in a if a[k] != b.get(k))
