#!/usr/bin/env python3
"""
Exponent Admissibility - hypotheses on (N, p, q, r) and the critical exponent

Features:
- ExponentSet model (N, p, q, r, λ)
- critical_exponent(N, p) = (Np - N + p)/(N - p)
- Per-inequality report with signed slack; violations are entries, not errors
"""

import logging
import math
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field

from errors import DimensionTooSmall, InadmissibleExponents
from nfunction import NFunctionParams


class ExponentSet(BaseModel):
    """Dimension, exponents and the parameter λ of the Dirichlet problems."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    N: int = Field(ge=1)
    p: float
    q: float
    r: float
    lam: float = Field(default=0.0, ge=0.0, alias="lambda")

    @property
    def params(self) -> NFunctionParams:
        return NFunctionParams(p=self.p, q=self.q)

    def with_lambda(self, lam: float) -> "ExponentSet":
        return self.model_copy(update={"lam": float(lam)})

    def to_dict(self) -> Dict[str, float]:
        return self.model_dump(by_alias=True)


class InequalityCheck(BaseModel):
    name: str
    passed: bool
    slack: Optional[float] = None  # rhs - lhs; None when the bound is undefined


class AdmissibilityReport(BaseModel):
    exponents: ExponentSet
    critical: Optional[float]
    checks: List[InequalityCheck]

    @computed_field
    @property
    def admissible(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def violations(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]


def critical_exponent(N: int, p: float) -> float:
    """(Np - N + p)/(N - p); requires N > p."""
    if not N > p:
        raise DimensionTooSmall(f"critical exponent needs N > p (N={N}, p={p})")
    return (N * p - N + p) / (N - p)


def _strict(name: str, lhs: float, rhs: Optional[float]) -> InequalityCheck:
    if rhs is None or not math.isfinite(rhs):
        return InequalityCheck(name=name, passed=False, slack=None)
    return InequalityCheck(name=name, passed=lhs < rhs, slack=rhs - lhs)


def check_admissible(e: ExponentSet) -> AdmissibilityReport:
    try:
        critical: Optional[float] = critical_exponent(e.N, e.p)
    except DimensionTooSmall:
        critical = None

    checks = [
        _strict("p>1", 1.0, e.p),
        _strict("q>1", 1.0, e.q),
        _strict("p+q<N", e.p + e.q, float(e.N)),
        _strict("p+q<r", e.p + e.q, e.r),
        _strict("r<critical", e.r, critical),
        _strict("N>p", e.p, float(e.N)),
        # implied by the two above; kept so the chain is visible in reports
        _strict("p+q<critical", e.p + e.q, critical),
    ]
    return AdmissibilityReport(exponents=e, critical=critical, checks=checks)


def require_admissible(e: ExponentSet, force: bool = False) -> bool:
    """Raise InadmissibleExponents unless `force`; returns whether the gate was bypassed."""
    report = check_admissible(e)
    if report.admissible:
        return False
    if not force:
        raise InadmissibleExponents(f"Inadmissible exponents, violated: {', '.join(report.violations)}")
    logging.warning(f"⚠️  Forced run with inadmissible exponents: {', '.join(report.violations)}")
    return True
