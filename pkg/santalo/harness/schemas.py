from __future__ import annotations

from enum import Enum
from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

from santalo.schemas import FROZEN_CONFIG, Diagnostic, Verdict
from santalo.settings import settings


class CampaignCase(str, Enum):
    UNCONDITIONAL = "unconditional"
    J_EQUALS_K = "j=k"
    J_EVEN_MIXED = "j-even-mixed"
    GENERAL = "general"


class ExperimentConfig(BaseModel):
    """Fields shared by every campaign; echoed verbatim into the report."""

    model_config = FROZEN_CONFIG

    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2**64)
    n: int = Field(default=2, ge=1)
    k: int = Field(default=3, ge=2)
    j: int = Field(default=2, ge=1)
    tuples: int = Field(default=20, ge=1)
    vertices: int = Field(default=6, ge=1)
    samples: int = Field(default_factory=lambda: settings.MC_SAMPLES, ge=1_000)
    tol: float = Field(default_factory=lambda: settings.POLARITY_TOL, gt=0)
    workers: int | None = Field(default=None, ge=1)

    @model_validator(mode="after")
    def check_degree(self) -> ExperimentConfig:
        if not 1 <= self.j <= self.k:
            raise ValueError(f"j={self.j} must satisfy 1 <= j <= k={self.k}")
        return self


class VerifyConfig(ExperimentConfig):
    case: CampaignCase = CampaignCase.UNCONDITIONAL


class SymmetrizeConfig(ExperimentConfig):
    case: CampaignCase = CampaignCase.J_EQUALS_K
    k: int = Field(default=2, ge=2)
    heights: int = Field(default=10, ge=1)
    sweeps: int = Field(default=3, ge=1)

    @model_validator(mode="after")
    def check_case(self) -> SymmetrizeConfig:
        if self.case not in (CampaignCase.J_EQUALS_K, CampaignCase.J_EVEN_MIXED):
            raise ValueError("symmetrization runs in the j=k and j-even-mixed cases")
        return self


class SearchConfig(ExperimentConfig):
    steps: int = Field(default=200, ge=1)
    restarts: int = Field(default=2, ge=1)
    step_size: float = Field(default=0.1, gt=0)
    temperature: float = Field(default=0.02, ge=0)
    cooling: float = Field(default=0.99, gt=0, le=1)
    start: Literal["random", "lp-ball"] = "random"
    resolution: int = Field(default=4, ge=1)


class RadialConfig(ExperimentConfig):
    corpus: Literal["ball", "polytopes"] = "polytopes"
    scale: float = Field(default=1.0, gt=0)
    directions: int = Field(default=400, ge=1)


class FunctionalConfig(ExperimentConfig):
    checks: list[Literal["indicator", "exponential", "smooth", "ball"]] = Field(
        default_factory=lambda: ["indicator", "exponential", "smooth", "ball"]
    )
    grid_steps: int = Field(default=16, ge=2)


class CaseRecord(BaseModel):
    """One tuple of a campaign. ``asserted`` cases back a theorem."""

    index: int
    seed: int
    kind: str = ""
    labels: list[str] = Field(default_factory=list)
    volumes: list[float] = Field(default_factory=list)
    stderrs: list[float] = Field(default_factory=list)
    product: float | None = None
    ratio: float | None = None
    stderr: float = 0.0
    verdict: Verdict
    asserted: bool = True
    witness: list[list[float]] | None = None
    metrics: dict[str, float] = Field(default_factory=dict)
    series: list[float] = Field(default_factory=list)
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class ExperimentReport(BaseModel):
    experiment: str
    experiment_id: str
    config: dict[str, Any]
    cases: list[CaseRecord]
    summary: dict[str, Any] = Field(default_factory=dict)
    environment: dict[str, str] = Field(default_factory=dict)
    started_at: str = ""
    wall_clock: float = 0.0
    fingerprint: str = ""

    @property
    def violations(self) -> int:
        return sum(1 for c in self.cases if c.asserted and c.verdict is Verdict.FAIL)

    @property
    def candidates(self) -> int:
        return sum(1 for c in self.cases if c.verdict is Verdict.CANDIDATE)

    @property
    def exit_code(self) -> int:
        if self.violations:
            return 2
        if self.candidates:
            return 3
        return 0
