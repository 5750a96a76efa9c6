"""Thin wrappers around qhull (scipy.spatial) and the LP solver.

All routines take and return plain ``numpy`` arrays; the typed bodies in
``santalo.bodies.models`` are built on top of them.
"""

from math import factorial

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError, cKDTree
from scipy.spatial.distance import cdist

from santalo.errors import DegenerateBodyError, DomainError
from santalo.logger import logger
from santalo.settings import settings


def as_points(points, n: int | None = None) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if n == 1 else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DomainError("expected a nonempty (m, n) array of points")
    if n is not None and arr.shape[1] != n:
        raise DomainError(f"points have dimension {arr.shape[1]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("points must be finite")
    return arr


def dedupe(points: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Drop points lying within ``tol`` (relative to the cloud's scale) of an earlier one."""
    if len(points) <= 1:
        return points
    scale = max(1.0, float(np.abs(points).max()))
    radius = (tol or settings.HULL_TOL) * 10 * scale
    keep = np.ones(len(points), dtype=bool)
    for a, b in sorted(cKDTree(points).query_pairs(radius)):
        if keep[a] and keep[b]:
            keep[b] = False
    return points[keep]


def canonical_half(points: np.ndarray) -> np.ndarray:
    """One representative of each ±pair: first nonzero coordinate made positive."""
    out = points.copy()
    nonzero = out != 0
    first = np.where(nonzero.any(axis=1), nonzero.argmax(axis=1), 0)
    signs = np.sign(out[np.arange(len(out)), first])
    signs[signs == 0] = 1.0
    out *= signs[:, None]
    return out


def sort_rows(points: np.ndarray) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    return points[order]


def symmetric_extreme_points(points) -> tuple[np.ndarray, bool]:
    """Vertices of conv(P ∪ −P), closed under exact negation.

    Returns ``(vertices, degenerate)``; a flat input is returned symmetrised
    but unreduced with ``degenerate=True``.
    """
    pts = as_points(points)
    n = pts.shape[1]
    if n == 1:
        r = float(np.abs(pts).max())
        return np.array([[r], [-r]]), r == 0.0

    cloud = np.vstack([pts, -pts])
    if np.linalg.matrix_rank(cloud, tol=settings.HULL_TOL * max(1.0, np.abs(cloud).max())) < n:
        half = dedupe(sort_rows(canonical_half(cloud)))
        half = half[np.any(half != 0, axis=1)]
        return np.vstack([half, -half]) if len(half) else np.zeros((1, n)), True

    try:
        hull = ConvexHull(cloud)
    except QhullError as exc:
        logger.debug(f"qhull rejected a symmetric cloud of {len(cloud)} points: {exc!s}")
        half = dedupe(sort_rows(canonical_half(cloud)))
        return np.vstack([half, -half]), True

    half = canonical_half(cloud[hull.vertices])
    half = dedupe(sort_rows(np.unique(half, axis=0)))
    return np.vstack([half, -half]), False


def facet_equations(vertices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """H-representation ``A x <= b`` (unit normals) of conv(vertices)."""
    n = vertices.shape[1]
    if n == 1:
        lo, hi = float(vertices.min()), float(vertices.max())
        return np.array([[1.0], [-1.0]]), np.array([hi, -lo])
    try:
        hull = ConvexHull(vertices)
    except QhullError as exc:
        raise DegenerateBodyError("cannot take the hull of a flat point set") from exc
    eq = dedupe(hull.equations, tol=1e-10)
    return eq[:, :-1], -eq[:, -1]


def simplices_from_apex(vertices: np.ndarray, apex: np.ndarray | None = None) -> np.ndarray:
    """Triangulate conv(vertices) into simplices coned from ``apex``.

    Returns an array of shape ``(F, n + 1, n)``; ``apex`` defaults to the
    vertex centroid, which is interior for full-dimensional input.
    """
    n = vertices.shape[1]
    if apex is None:
        apex = vertices.mean(axis=0)
    if n == 1:
        lo, hi = float(vertices.min()), float(vertices.max())
        a = float(apex[0])
        return np.array([[[a], [lo]], [[a], [hi]]])
    try:
        hull = ConvexHull(vertices)
    except QhullError as exc:
        raise DegenerateBodyError("cannot triangulate a flat point set") from exc
    facets = hull.points[hull.simplices]
    apexes = np.broadcast_to(apex, (len(facets), 1, n))
    return np.concatenate([apexes, facets], axis=1)


def simplex_volumes(simplices: np.ndarray) -> np.ndarray:
    """Unsigned volumes of an ``(F, n + 1, n)`` stack of simplices."""
    n = simplices.shape[2]
    edges = simplices[:, 1:, :] - simplices[:, :1, :]
    return np.abs(np.linalg.det(edges)) / factorial(n)


def halfspace_vertices(
    A: np.ndarray, b: np.ndarray, interior: np.ndarray | None = None
) -> np.ndarray:
    """Vertices of the bounded polytope ``{x : A x <= b}``."""
    n = A.shape[1]
    if interior is None:
        interior = np.zeros(n)
    null = np.linalg.norm(A, axis=1) < 1e-14
    if np.any(b[null] < 0):
        raise DomainError("halfspace system is infeasible")
    A, b = A[~null], b[~null]
    if n == 1:
        a = A[:, 0]
        upper = b[a > 0] / a[a > 0]
        lower = b[a < 0] / a[a < 0]
        if not len(upper) or not len(lower):
            raise DomainError("interval is unbounded")
        return np.array([[float(lower.max())], [float(upper.min())]])
    halfspaces = np.hstack([A, -b[:, None]])
    try:
        hs = HalfspaceIntersection(halfspaces, np.asarray(interior, dtype=float))
    except QhullError as exc:
        raise DegenerateBodyError("halfspace intersection failed") from exc
    pts = hs.intersections[np.all(np.isfinite(hs.intersections), axis=1)]
    return dedupe(sort_rows(pts))


def chebyshev_center(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and radius of the largest ball inside ``{x : A x <= b}``."""
    n = A.shape[1]
    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if res.status != 0:
        return np.zeros(n), 0.0
    return res.x[:n], float(res.x[-1])


def hausdorff(P: np.ndarray, Q: np.ndarray) -> float:
    d = cdist(P, Q)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def close_under_negation(points: np.ndarray) -> np.ndarray:
    """Rebuild ``points`` as ``H ∪ −H`` so that negation closure is bitwise exact."""
    half = canonical_half(points)
    half = half[np.any(half != 0, axis=1)]
    half = dedupe(sort_rows(np.unique(half, axis=0)))
    return np.vstack([half, -half])


def polytope_volume(vertices: np.ndarray) -> float:
    """Exact volume of a full-dimensional polytope containing the origin."""
    n = vertices.shape[1]
    if n == 1:
        return float(vertices.max() - vertices.min())
    simplices = simplices_from_apex(vertices, np.zeros(n))
    return float(simplex_volumes(simplices).sum())
