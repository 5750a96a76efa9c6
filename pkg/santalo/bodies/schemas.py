from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field

from santalo.bodies.models import SymmetricPolytope


class PolytopeIn(BaseModel):
    """Vertices of a symmetric polytope; the negation closure may be omitted."""

    vertices: list[list[float]] = Field(min_length=1)
    label: str = ""

    def to_polytope(self) -> SymmetricPolytope:
        return SymmetricPolytope.from_points(np.asarray(self.vertices), label=self.label)


class PolytopeOut(BaseModel):
    vertices: list[list[float]]
    volume: float | None = None
    degenerate: bool = False
    label: str = ""

    @classmethod
    def of(cls, P: SymmetricPolytope) -> PolytopeOut:
        return cls(
            vertices=P.vertices.tolist(),
            volume=None if P.degenerate else P.volume,
            degenerate=P.degenerate,
            label=P.label,
        )


class SupportRequest(PolytopeIn):
    u: list[float] = Field(min_length=1)


class SteinerRequest(PolytopeIn):
    axis: int = Field(ge=0)
