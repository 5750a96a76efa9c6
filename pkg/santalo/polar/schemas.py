from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from santalo.bodies.models import SymmetricPolytope
from santalo.bodies.schemas import PolytopeIn, PolytopeOut
from santalo.schemas import Diagnostic, PolarityParams, Verdict


class PolarProblem(BaseModel):
    """The k - 1 given bodies of a tuple whose remaining slot is to be completed."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bodies: list[SymmetricPolytope]
    params: PolarityParams

    @model_validator(mode="after")
    def check_bodies(self) -> PolarProblem:
        if len(self.bodies) != self.params.k - 1:
            raise ValueError(
                f"expected k-1={self.params.k - 1} bodies, got {len(self.bodies)}"
            )
        dims = {body.n for body in self.bodies}
        if len(dims) != 1:
            raise ValueError(f"bodies have different dimensions: {sorted(dims)}")
        return self

    @property
    def n(self) -> int:
        return self.bodies[0].n


class ContainmentVerdict(BaseModel):
    """Result of testing ``K_i ⊆ j_polar(others)`` vertex by vertex."""

    verdict: Verdict
    min_slack: float
    active_vertices: int = Field(ge=0)
    tol: float
    diagnostics: list[Diagnostic] = Field(default_factory=list)


class JPolarRequest(BaseModel):
    """The first ``k - 1`` bodies of a tuple; the last slot is completed."""

    bodies: list[PolytopeIn] = Field(min_length=1)
    j: int = Field(ge=1)

    def problem(self) -> PolarProblem:
        return PolarProblem(
            bodies=[b.to_polytope() for b in self.bodies],
            params=PolarityParams(k=len(self.bodies) + 1, j=self.j),
        )


class VerifyRequest(BaseModel):
    bodies: list[PolytopeIn] = Field(min_length=2)
    j: int = Field(ge=1)


class HalfspaceOut(BaseModel):
    A: list[list[float]]
    b: list[float]
    bounded: str
    degenerate: bool
    polytope: PolytopeOut | None = None
    diagnostics: list[Diagnostic] = Field(default_factory=list)
