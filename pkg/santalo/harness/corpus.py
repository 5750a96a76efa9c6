"""Random symmetric and unconditional polytopes for the campaigns."""

from itertools import product

import numpy as np

from santalo.bodies.models import SymmetricPolytope
from santalo.bodies.service import hull_reduce
from santalo.errors import DomainError
from santalo.utils.rng import unit_directions

MAX_DRAWS = 20


def _draw(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    radii = rng.beta(2.0, 1.0, size=m)
    return unit_directions(rng, m, n) * radii[:, None]


def random_symmetric_polytope(
    rng: np.random.Generator, n: int, m: int, label: str = ""
) -> SymmetricPolytope:
    """Hull of ``±`` m Gaussian directions scaled by Beta(2, 1) radii."""
    if m < n:
        raise DomainError(f"need at least n={n} generating points, got {m}")
    for _ in range(MAX_DRAWS):
        P = hull_reduce(_draw(rng, m, n), label=label)
        if not P.degenerate:
            return P
    raise DomainError("could not draw a full-dimensional polytope")


def random_unconditional_polytope(
    rng: np.random.Generator, n: int, m: int, label: str = ""
) -> SymmetricPolytope:
    """Same draw, closed under every coordinate sign flip."""
    if m < 1:
        raise DomainError("need at least one generating point")
    signs = np.array(list(product((-1.0, 1.0), repeat=n)))
    for _ in range(MAX_DRAWS):
        X = _draw(rng, m, n)
        points = (signs[:, None, :] * X[None, :, :]).reshape(-1, n)
        P = hull_reduce(points, label=label)
        if not P.degenerate:
            return P
    raise DomainError("could not draw a full-dimensional polytope")
