from __future__ import annotations

from enum import Enum
from math import comb
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from santalo.settings import settings

FROZEN_CONFIG = ConfigDict(frozen=True)


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    SKIPPED = "SKIPPED"
    CANDIDATE = "CANDIDATE"


class Diagnostic(BaseModel):
    """Structured, non-fatal report attached to a result."""

    code: str
    message: str
    data: dict[str, Any] | None = None


class PolarityParams(BaseModel):
    """Degree j, exponent p and threshold of the E_j / S_{j,p} family for k slots."""

    model_config = FROZEN_CONFIG

    k: int = Field(ge=2)
    j: int = Field(ge=1)
    p: float = Field(default=1.0, gt=0)
    threshold: float | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def check_degree(self) -> PolarityParams:
        if not 1 <= self.j <= self.k:
            raise ValueError(f"j={self.j} must satisfy 1 <= j <= k={self.k}")
        return self

    @property
    def binom(self) -> int:
        return comb(self.k, self.j)

    @property
    def bound(self) -> float:
        """Threshold on S_j; defaults to C(k, j) so that E_j <= 1."""
        return float(self.threshold) if self.threshold is not None else float(self.binom)


class McConfig(BaseModel):
    model_config = FROZEN_CONFIG

    samples: int = Field(default_factory=lambda: settings.MC_SAMPLES, ge=1_000)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)
    batch: int = Field(default_factory=lambda: settings.MC_BATCH, ge=1)
    estimator: Literal["hit-or-miss"] = "hit-or-miss"

    @model_validator(mode="after")
    def check_batch(self) -> McConfig:
        if self.samples % self.batch:
            raise ValueError(
                f"batch={self.batch} must divide samples={self.samples}"
            )
        return self


class SamplerCfg(BaseModel):
    """Boundary sampling + coordinate ascent for tuples containing oracles."""

    model_config = FROZEN_CONFIG

    samples_per_body: int = Field(default=2_000, ge=1)
    random_tuples: int = Field(default=20_000, ge=1)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0)
    sweeps: int = Field(default_factory=lambda: settings.ASCENT_SWEEPS, ge=1)
    restarts: int = Field(default_factory=lambda: settings.ASCENT_RESTARTS, ge=1)
    improvement_tol: float = Field(
        default_factory=lambda: settings.ASCENT_IMPROVEMENT_TOL, gt=0
    )


class VolumeResult(BaseModel):
    """Lebesgue measure (or a moment integral) with its standard error."""

    model_config = FROZEN_CONFIG

    value: float = Field(ge=0)
    stderr: float = Field(default=0.0, ge=0)
    method: Literal["exact", "quadrature", "mc"] = "exact"


class PolarityVerdict(BaseModel):
    """Outcome of an E_j-polarity check with the worst tuple found."""

    verdict: Verdict
    max_value: float
    argmax: list[int] | None = None
    witness: list[list[float]] | None = None
    tol: float
    method: Literal["exact", "sampled"] = "exact"
    diagnostics: list[Diagnostic] = Field(default_factory=list)
