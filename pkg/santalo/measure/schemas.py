from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator

from santalo.bodies.schemas import PolytopeIn
from santalo.schemas import VolumeResult


class RatioResult(BaseModel):
    """Volume product over ``|B_j^n|^k`` with a delta-method standard error."""

    value: float = Field(ge=0)
    stderr: float = Field(ge=0)
    product: float = Field(ge=0)
    reference: float = Field(gt=0)
    volumes: list[VolumeResult]

    def exceeds(self, level: float, sigmas: float = 3.0) -> bool:
        return self.value > level + sigmas * self.stderr


class LpBallIn(BaseModel):
    n: int = Field(ge=1)
    p: float = Field(gt=0)
    scale: float = Field(default=1.0, gt=0)


class VolumeRequest(BaseModel):
    """Exactly one of ``polytope`` and ``lp_ball``."""

    polytope: PolytopeIn | None = None
    lp_ball: LpBallIn | None = None
    method: Literal["mc", "analytic"] = "mc"
    samples: int | None = Field(default=None, ge=1_000)
    seed: int | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def check_body(self) -> VolumeRequest:
        if (self.polytope is None) == (self.lp_ball is None):
            raise ValueError("give exactly one of polytope and lp_ball")
        return self
