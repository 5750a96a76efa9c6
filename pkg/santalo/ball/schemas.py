from pydantic import BaseModel, Field

from santalo.ball.models import OrthoBasis
from santalo.bodies.schemas import PolytopeIn
from santalo.schemas import Diagnostic, Verdict


class BallValue(BaseModel):
    """``Σ_m Π_i ∫_{K_i} |<x, ε_m>|^j dx`` at ``basis``.

    Minimized values are upper bounds on the minimum over bases.
    """

    value: float = Field(ge=0)
    basis: OrthoBasis
    per_axis_terms: list[float]
    stderr: float = Field(default=0.0, ge=0)
    upper_bound: bool = False
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class EqualMomentsResult(BaseModel):
    d: list[float]
    moments: list[float]
    residual: float
    iterations: int
    converged: bool
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class BallBoundReport(BaseModel):
    lhs: float
    rhs: float
    slack: float
    stderr: float = Field(ge=0)
    amgm: float
    ball: BallValue
    volume_product: float
    verdict: Verdict
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class FunctionalBallValue(BaseModel):
    value: float = Field(ge=0)
    per_axis_terms: list[float]
    basis: OrthoBasis
    error_estimate: float = Field(default=0.0, ge=0)
    upper_bound: bool = False
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class BallValueRequest(BaseModel):
    bodies: list[PolytopeIn] = Field(min_length=1)
    j: int = Field(ge=1)
    angles: list[float] | None = None
    minimize: bool = False
    restarts: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
