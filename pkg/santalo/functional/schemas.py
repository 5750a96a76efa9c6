from pydantic import BaseModel, Field

from santalo.schemas import Diagnostic, PolarityVerdict, Verdict


class IntegralResult(BaseModel):
    value: float
    abserr: float = Field(default=0.0, ge=0)
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class PrekopaLeindlerReport(BaseModel):
    """Hypothesis check on a lattice of tuples plus the integral comparison."""

    hypothesis: Verdict
    worst_violation: float
    witness: list[float] | None = None
    tuples_checked: int
    lhs: float
    rhs: float
    grid_error: float = Field(ge=0)
    conclusion_holds: bool
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class InequalityReport(BaseModel):
    """``lhs <= rhs`` for one instance; SKIPPED when the hypothesis fails."""

    verdict: Verdict
    lhs: float | None = None
    rhs: float | None = None
    error: float = Field(default=0.0, ge=0)
    polarity: PolarityVerdict | None = None
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class FullSpaceReport(InequalityReport):
    direct_lhs: float | None = None
    orthant_terms: int = 0
    nonzero_terms: int = 0


class LayerCakeReport(BaseModel):
    direct_product: float
    pipeline_product: float
    relative_gap: float
    levels: int
    rescaled_checks: int
    rescaled_failures: int
    prekopa_leindler: PrekopaLeindlerReport
    rhs: float
    verdict: Verdict
    diagnostics: list[Diagnostic] = Field(default_factory=list)
