from __future__ import annotations

from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from santalo.errors import DomainError


def givens(n: int, r: int, theta: float) -> np.ndarray:
    """Rotation by ``theta`` in the plane of coordinates ``(r - 1, r)``."""
    G = np.eye(n)
    c, s = np.cos(theta), np.sin(theta)
    G[r - 1, r - 1], G[r - 1, r] = c, -s
    G[r, r - 1], G[r, r] = s, c
    return G


def _planes(n: int) -> list[int]:
    """Planes in application order: column by column, bottom row upwards."""
    return [r for c in range(n - 1) for r in range(n - 1, c, -1)]


class OrthoBasis(BaseModel):
    """Orthonormal basis of R^n parametrized by ``n(n-1)/2`` Givens angles.

    Columns of ``matrix`` are the basis vectors ``ε_m``. Sign flips of a basis
    vector leave every ``|<x, ε_m>|`` unchanged, so SO(n) covers all bases.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    angles: tuple[float, ...] = ()

    @model_validator(mode="after")
    def check_angles(self) -> OrthoBasis:
        expected = self.n * (self.n - 1) // 2
        if len(self.angles) != expected:
            raise ValueError(f"need {expected} angles for n={self.n}, got {len(self.angles)}")
        return self

    @classmethod
    def identity(cls, n: int) -> OrthoBasis:
        return cls(n=n, angles=(0.0,) * (n * (n - 1) // 2))

    @classmethod
    def from_angles(cls, n: int, angles) -> OrthoBasis:
        return cls(n=n, angles=tuple(float(a) for a in np.ravel(angles)))

    @classmethod
    def from_matrix(cls, Q) -> OrthoBasis:
        """Givens angles of an orthogonal ``Q``; a reflection loses its last sign."""
        Q = np.asarray(Q, dtype=float)
        n = Q.shape[0]
        if Q.shape != (n, n) or not np.allclose(Q.T @ Q, np.eye(n), atol=1e-10):
            raise DomainError("matrix is not orthogonal")
        R = Q.copy()
        angles = []
        for c in range(n - 1):
            for r in range(n - 1, c, -1):
                theta = float(np.arctan2(R[r, c], R[r - 1, c]))
                R = givens(n, r, theta).T @ R
                angles.append(theta)
        return cls(n=n, angles=tuple(angles))

    @cached_property
    def matrix(self) -> np.ndarray:
        Q = np.eye(self.n)
        for r, theta in zip(_planes(self.n), self.angles, strict=True):
            Q = Q @ givens(self.n, r, theta)
        return Q
