"""Origin-symmetric convex bodies.

Three representations share the ``n`` / ``label`` / ``linear_det`` surface:

- ``SymmetricPolytope``: vertex list closed under negation (V-polytope),
- ``HalfspacePolytope``: constraints ``A x <= b`` (H-polytope),
- ``BodyOracle``: membership predicate with inner / outer radii.

All three are immutable; arrays are stored read-only.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

from santalo.errors import DegenerateBodyError, DomainError, UnboundedBodyError
from santalo.settings import settings
from santalo.utils import formats
from santalo.utils.geometry import (
    chebyshev_center,
    facet_equations,
    halfspace_vertices,
    polytope_volume,
    sort_rows,
    symmetric_extreme_points,
)


class Boundedness(str, Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    UNKNOWN = "unknown"


class SymmetryClass(str, Enum):
    SYMMETRIC = "symmetric"
    UNCONDITIONAL = "unconditional"


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DomainError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("body data must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SymmetricPolytope:
    """V-polytope whose vertex set satisfies ``v in V <=> -v in V`` exactly."""

    vertices: np.ndarray
    degenerate: bool = False
    linear_det: float = 1.0
    label: str = ""

    def __post_init__(self):
        V = _frozen_array(self.vertices, 2)
        if V.shape[0] == 0:
            raise DomainError("a polytope needs at least one vertex")
        if not np.array_equal(sort_rows(V), sort_rows(-V)):
            raise DomainError("vertex set is not closed under negation")
        object.__setattr__(self, "vertices", V)

    @classmethod
    def from_points(cls, points, label: str = "") -> SymmetricPolytope:
        """Irredundant vertices of conv(points ∪ −points)."""
        vertices, degenerate = symmetric_extreme_points(points)
        return cls(vertices=vertices, degenerate=degenerate, label=label)

    @classmethod
    def load(cls, path: str | Path, label: str = "") -> SymmetricPolytope:
        points = formats.parse_vertices(formats.read_text(path))
        return cls.from_points(points, label=label or Path(path).stem)

    def dump(self, path: str | Path) -> Path:
        return formats.write_text(path, formats.format_vertices(self.vertices))

    @property
    def n(self) -> int:
        return self.vertices.shape[1]

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    def require_full(self) -> None:
        if self.degenerate:
            raise DegenerateBodyError(
                f"polytope {self.label or '<unnamed>'} is not full-dimensional"
            )

    @cached_property
    def facets(self) -> tuple[np.ndarray, np.ndarray]:
        """``(A, b)`` with unit-norm rows; ``b > 0`` since the origin is interior."""
        self.require_full()
        return facet_equations(self.vertices)

    @cached_property
    def volume(self) -> float:
        self.require_full()
        return polytope_volume(self.vertices)

    def contains(self, points, tol: float | None = None) -> np.ndarray:
        tol = settings.SLACK_TOL if tol is None else tol
        A, b = self.facets
        X = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all(X @ A.T <= b + tol, axis=1)

    def with_label(self, label: str) -> SymmetricPolytope:
        return SymmetricPolytope(self.vertices, self.degenerate, self.linear_det, label)


@dataclass(frozen=True, eq=False)
class HalfspacePolytope:
    """``{x : A x <= b}``; symmetric bodies keep the constraint list closed under
    ``(a, b) -> (-a, b)``."""

    A: np.ndarray
    b: np.ndarray
    bounded: Boundedness = Boundedness.UNKNOWN
    degenerate: bool = False
    symmetric: bool = True
    label: str = ""
    diagnostics: tuple[Any, ...] = ()

    def __post_init__(self):
        A = _frozen_array(self.A, 2)
        b = _frozen_array(self.b, 1)
        if A.shape[0] != b.shape[0]:
            raise DomainError("A and b have different numbers of rows")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def load(cls, path: str | Path, label: str = "") -> HalfspacePolytope:
        A, b = formats.parse_halfspaces(formats.read_text(path))
        return cls(A=A, b=b, label=label or Path(path).stem)

    def dump(self, path: str | Path) -> Path:
        return formats.write_text(path, formats.format_halfspaces(self.A, self.b))

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def constraints(self) -> list[tuple[np.ndarray, float]]:
        return [(a, float(beta)) for a, beta in zip(self.A, self.b, strict=True)]

    def slack(self, points) -> np.ndarray:
        """Minimal constraint slack ``min_r (b_r - <a_r, x>)`` per point."""
        X = np.atleast_2d(np.asarray(points, dtype=float))
        return np.min(self.b - X @ self.A.T, axis=1)

    def contains(self, points, tol: float | None = None) -> np.ndarray:
        tol = settings.SLACK_TOL if tol is None else tol
        return self.slack(points) >= -tol

    def require_bounded(self) -> None:
        if self.bounded is not Boundedness.BOUNDED:
            raise UnboundedBodyError(
                f"H-polytope {self.label or '<unnamed>'} is {self.bounded.value}"
            )
        if self.degenerate:
            raise DegenerateBodyError("H-polytope has empty interior")

    @cached_property
    def interior_point(self) -> np.ndarray:
        if np.all(self.b > 0):
            return np.zeros(self.n)
        center, radius = chebyshev_center(self.A, self.b)
        if radius <= 0:
            raise DegenerateBodyError("H-polytope has empty interior")
        return center

    @cached_property
    def vertices(self) -> np.ndarray:
        self.require_bounded()
        return halfspace_vertices(self.A, self.b, self.interior_point)

    def to_polytope(self, label: str = "") -> SymmetricPolytope:
        """V-representation; requires a bounded symmetric body."""
        if not self.symmetric:
            raise DomainError("only symmetric H-polytopes convert to SymmetricPolytope")
        return SymmetricPolytope.from_points(self.vertices, label=label or self.label)


Membership = Callable[[np.ndarray], np.ndarray]
SupportFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class BodyOracle:
    """Membership oracle ``member((m, n) array) -> (m,) bool``.

    ``support_fn`` and ``gauge`` are optional closed forms on rows; the gauge
    gives the radial function as ``1 / gauge(u)``.
    """

    member: Membership
    n: int
    outer_radius: float
    inner_radius: float
    symmetry_class: SymmetryClass = SymmetryClass.SYMMETRIC
    support_fn: SupportFn | None = None
    gauge: Callable[[np.ndarray], np.ndarray] | None = None
    linear_det: float = 1.0
    label: str = ""
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("dimension must be at least 1")
        if not 0 < self.inner_radius <= self.outer_radius:
            raise DomainError(
                "need 0 < inner_radius <= outer_radius",
                {"inner": self.inner_radius, "outer": self.outer_radius},
            )

    def contains(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        if X.shape[1] != self.n:
            raise DomainError(f"points have dimension {X.shape[1]}, expected {self.n}")
        return np.asarray(self.member(X), dtype=bool)


Body = SymmetricPolytope | BodyOracle
