from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.optimize import linprog, minimize

from santalo.bodies.models import (
    Body,
    BodyOracle,
    Boundedness,
    HalfspacePolytope,
    SymmetricPolytope,
    SymmetryClass,
)
from santalo.errors import DegenerateBodyError, DomainError
from santalo.logger import logger
from santalo.schemas import Diagnostic
from santalo.settings import settings
from santalo.utils.geometry import (
    chebyshev_center,
    close_under_negation,
    halfspace_vertices,
    hausdorff,
)

VOLUME_RTOL = 1e-9


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def lp_norm(X: np.ndarray, p: float) -> np.ndarray:
    X = np.abs(np.atleast_2d(X))
    if np.isinf(p):
        return X.max(axis=1)
    return (X**p).sum(axis=1) ** (1.0 / p)


def make_lp_ball(n: int, p: float, scale: float = 1.0) -> BodyOracle:
    """Oracle for ``scale * B_p^n``; ``p < 1`` gives a star body, not a convex one."""
    if n < 1 or p <= 0 or scale <= 0:
        raise DomainError("need n >= 1, p > 0 and scale > 0", {"n": n, "p": p})
    exponent = 0.5 - 1.0 / p
    # boundary points such as (0.6, 0.8) round to norm 1 + 2 ulp
    limit = scale * (1.0 + 1e-12)

    def gauge(X: np.ndarray) -> np.ndarray:
        return lp_norm(X, p) / scale

    def member(X: np.ndarray) -> np.ndarray:
        return lp_norm(X, p) <= limit

    support_fn = None
    if p >= 1:
        q = np.inf if p == 1 else p / (p - 1.0)

        def support_fn(U: np.ndarray) -> np.ndarray:
            return scale * lp_norm(U, q)

    return BodyOracle(
        member=member,
        n=n,
        outer_radius=scale * n ** max(0.0, exponent),
        inner_radius=scale * n ** min(0.0, exponent),
        symmetry_class=SymmetryClass.UNCONDITIONAL,
        support_fn=support_fn,
        gauge=gauge,
        label=f"B_{p:g}^{n}" if scale == 1 else f"{scale:g}*B_{p:g}^{n}",
        meta={"kind": "lp_ball", "p": p, "scale": scale},
    )


def hull_reduce(points, label: str = "") -> SymmetricPolytope:
    return SymmetricPolytope.from_points(points, label=label)


def lp_ball_polytope(
    n: int, p: float, resolution: int = 16, scale: float = 1.0
) -> SymmetricPolytope:
    """Inscribed polytope of ``scale * B_p^n``.

    Boundary points are the integer vectors on the surface of the cube
    ``[-resolution, resolution]^n`` normalised in ``||.||_p``; the set
    contains every ``±e_m`` and is unconditional.
    """
    if p < 1:
        raise DomainError("hull-based approximations need a convex ball (p >= 1)")
    if resolution < 1:
        raise DomainError("resolution must be positive")
    r = resolution
    grid = np.array(list(product(range(-r, r + 1), repeat=n)), dtype=float)
    surface = grid[np.abs(grid).max(axis=1) == r]
    points = scale * surface / lp_norm(surface, p)[:, None]
    return hull_reduce(points, label=f"P(B_{p:g}^{n}, {r})")


def cube(n: int, half_width: float = 1.0) -> SymmetricPolytope:
    corners = half_width * np.array(list(product((-1.0, 1.0), repeat=n)))
    return hull_reduce(corners, label=f"cube{n}")


def cross_polytope(n: int, radius: float = 1.0) -> SymmetricPolytope:
    return hull_reduce(radius * np.eye(n), label=f"cross{n}")


def truncated_slab(n: int, M: float) -> SymmetricPolytope:
    """``{|x_1 + ... + x_n| <= 1} ∩ [-M, M]^n``."""
    if n < 2 or M <= 0:
        raise DomainError("a truncated slab needs n >= 2 and M > 0")
    ones = np.ones((1, n))
    A = np.vstack([ones, -ones, np.eye(n), -np.eye(n)])
    b = np.concatenate([[1.0, 1.0], np.full(2 * n, float(M))])
    return hull_reduce(halfspace_vertices(A, b), label=f"slab{n}(M={M:g})")


# ---------------------------------------------------------------------------
# Support and radial functions
# ---------------------------------------------------------------------------


def _direction(u, n: int) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    if u.size != n:
        raise DomainError(f"direction has dimension {u.size}, expected {n}")
    if not np.any(u):
        raise DomainError("direction must be nonzero")
    return u


def radial_many(body: Body | HalfspacePolytope, U: np.ndarray) -> np.ndarray:
    """``sup{t > 0 : t u in K}`` for every row ``u`` of ``U``."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    if isinstance(body, SymmetricPolytope | HalfspacePolytope):
        A, b = body.facets if isinstance(body, SymmetricPolytope) else (body.A, body.b)
        ratios = (U @ A.T) / b
        peak = ratios.max(axis=1)
        with np.errstate(divide="ignore"):
            return np.where(peak > 0, 1.0 / peak, np.inf)

    if body.gauge is not None:
        with np.errstate(divide="ignore"):
            return 1.0 / body.gauge(U)

    norms = np.linalg.norm(U, axis=1)
    lo = body.inner_radius / norms
    hi = body.outer_radius * (1.0 + 1e-9) / norms
    steps = int(np.ceil(np.log2(max(hi.max() / settings.BISECTION_TOL, 2.0)))) + 1
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        inside = body.contains(mid[:, None] * U)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return lo


def radial(body: Body | HalfspacePolytope, u) -> float:
    return float(radial_many(body, _direction(u, body.n)[None, :])[0])


def _oracle_support(body: BodyOracle, u: np.ndarray) -> tuple[float, np.ndarray]:
    """Maximise ``r(w) <w, u>`` over directions ``w``, starting from ``w = u``."""

    def boundary(v: np.ndarray) -> np.ndarray:
        w = v / np.linalg.norm(v)
        return radial_many(body, w[None, :])[0] * w

    def objective(v: np.ndarray) -> float:
        if not np.any(v):
            return 0.0
        return -float(boundary(v) @ u)

    res = minimize(
        objective,
        u / np.linalg.norm(u),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 200 * body.n},
    )
    x = boundary(res.x)
    start = boundary(u)
    if start @ u > x @ u:
        x = start
    return float(x @ u), x


def support(body: Body | HalfspacePolytope, u) -> float:
    """``max_{x in K} <x, u>``."""
    u = _direction(u, body.n)
    if isinstance(body, SymmetricPolytope):
        return float((body.vertices @ u).max())
    if isinstance(body, HalfspacePolytope):
        res = linprog(-u, A_ub=body.A, b_ub=body.b, bounds=[(None, None)] * body.n)
        return float(-res.fun) if res.status == 0 else float("inf")
    if body.support_fn is not None:
        return float(body.support_fn(u[None, :])[0])
    return _oracle_support(body, u)[0]


def _lp_support_point(p: float, radius: float, u: np.ndarray) -> np.ndarray:
    """Maximiser of ``<x, u>`` over ``radius * B_p^n`` for ``p >= 1``."""
    if p == 1:
        m = int(np.argmax(np.abs(u)))
        x = np.zeros_like(u)
        x[m] = radius * np.sign(u[m])
        return x
    q = p / (p - 1.0)
    w = np.abs(u) ** (q - 1.0)
    x = np.sign(u) * w
    return radius * x / lp_norm(x[None, :], p)[0]


def support_point(body: Body, u) -> np.ndarray:
    """A maximiser of ``<x, u>`` over the body."""
    u = _direction(u, body.n)
    if isinstance(body, SymmetricPolytope):
        return body.vertices[int(np.argmax(body.vertices @ u))].copy()
    if body.meta.get("kind") == "lp_ball" and body.meta["p"] >= 1:
        T = _accumulated_map(body)
        return T @ _lp_support_point(body.meta["p"], body.meta["scale"], T.T @ u)
    return _oracle_support(body, u)[1]


# ---------------------------------------------------------------------------
# Linear images
# ---------------------------------------------------------------------------


def linear_image(body: Body | HalfspacePolytope, T, label: str = ""):
    """Image of the body under ``x -> T x``; ``linear_det`` accumulates ``|det T|``."""
    T = np.asarray(T, dtype=float)
    if T.shape != (body.n, body.n):
        raise DomainError(f"map must be {body.n}x{body.n}, got {T.shape}")
    det = abs(float(np.linalg.det(T)))
    if det == 0:
        raise DegenerateBodyError("linear map is singular")

    if isinstance(body, SymmetricPolytope):
        return SymmetricPolytope(
            close_under_negation(body.vertices @ T.T),
            degenerate=body.degenerate,
            linear_det=body.linear_det * det,
            label=label or body.label,
        )
    T_inv = np.linalg.inv(T)
    if isinstance(body, HalfspacePolytope):
        return HalfspacePolytope(
            A=body.A @ T_inv,
            b=body.b,
            bounded=body.bounded,
            degenerate=body.degenerate,
            symmetric=body.symmetric,
            label=label or body.label,
        )

    member, support_fn, gauge = body.member, body.support_fn, body.gauge
    sigma = np.linalg.svd(T, compute_uv=False)
    unconditional = body.symmetry_class is SymmetryClass.UNCONDITIONAL and np.allclose(
        T, np.diag(np.diag(T))
    )
    return BodyOracle(
        member=lambda X: member(X @ T_inv.T),
        n=body.n,
        outer_radius=body.outer_radius * float(sigma.max()),
        inner_radius=body.inner_radius * float(sigma.min()),
        symmetry_class=(
            SymmetryClass.UNCONDITIONAL if unconditional else SymmetryClass.SYMMETRIC
        ),
        support_fn=None if support_fn is None else (lambda U: support_fn(U @ T)),
        gauge=None if gauge is None else (lambda X: gauge(X @ T_inv.T)),
        linear_det=body.linear_det * det,
        label=label or body.label,
        meta={**body.meta, "linear_map": T @ _accumulated_map(body)},
    )


def _accumulated_map(body: BodyOracle) -> np.ndarray:
    return np.asarray(body.meta.get("linear_map", np.eye(body.n)), dtype=float)


def diagonal_image(body: Body | HalfspacePolytope, d, label: str = ""):
    d = np.asarray(d, dtype=float).ravel()
    if d.size != body.n or np.any(d <= 0):
        raise DomainError("diagonal entries must be n positive reals", {"d": d.tolist()})
    if isinstance(body, SymmetricPolytope):
        # scaling by d > 0 keeps the ±v pairing bitwise
        return SymmetricPolytope(
            body.vertices * d,
            degenerate=body.degenerate,
            linear_det=body.linear_det * float(np.prod(d)),
            label=label or body.label,
        )
    return linear_image(body, np.diag(d), label=label)


def rotate(body: Body, Q, label: str = ""):
    Q = np.asarray(Q, dtype=float)
    if not np.allclose(Q.T @ Q, np.eye(body.n), atol=1e-10):
        raise DomainError("rotation matrix is not orthogonal")
    return linear_image(body, Q, label=label)


def scale(body: Body, lam: float, label: str = ""):
    if lam <= 0:
        raise DomainError("scale factor must be positive")
    return diagonal_image(body, np.full(body.n, float(lam)), label=label)


def reflect(P: SymmetricPolytope, axis: int) -> np.ndarray:
    flipped = P.vertices.copy()
    flipped[:, axis] = -flipped[:, axis]
    return flipped


# ---------------------------------------------------------------------------
# Steiner symmetrization
# ---------------------------------------------------------------------------


def _check_axis(n: int, axis: int) -> None:
    if not 0 <= axis < n:
        raise DomainError(f"axis {axis} out of range for dimension {n}")


def steiner_symmetrize(P: SymmetricPolytope, axis: int) -> SymmetricPolytope:
    """Steiner symmetral of ``P`` about the hyperplane ``{x_axis = 0}``.

    The symmetral is the image of the fiber product
    ``{(y, s, t) : (y, s) in P, (y, -t) in P}`` under ``(y, s, t) -> (y, (s + t) / 2)``,
    whose vertices are enumerated exactly by halfspace intersection.
    """
    P.require_full()
    n = P.n
    _check_axis(n, axis)
    if n == 1:
        return P

    A, b = P.facets
    a_m = A[:, axis]
    A_rest = np.delete(A, axis, axis=1)
    zeros = np.zeros_like(a_m)
    fiber_A = np.vstack(
        [
            np.column_stack([A_rest, a_m, zeros]),
            np.column_stack([A_rest, zeros, -a_m]),
        ]
    )
    fiber_b = np.concatenate([b, b])
    Q = halfspace_vertices(fiber_A, fiber_b)
    centers = 0.5 * (Q[:, n - 1] + Q[:, n])
    points = np.insert(Q[:, : n - 1], axis, centers, axis=1)
    mirrored = points.copy()
    mirrored[:, axis] = -mirrored[:, axis]
    logger.debug(
        f"steiner axis={axis}: {len(P.vertices)} vertices -> {len(Q)} fiber-product vertices"
    )
    out = hull_reduce(np.vstack([points, mirrored]), label=P.label)
    return SymmetricPolytope(out.vertices, out.degenerate, P.linear_det, P.label)


def unconditional_defect(P: SymmetricPolytope) -> float:
    """Largest Hausdorff distance between the vertex set and a one-axis reflection."""
    return max(hausdorff(P.vertices, reflect(P, m)) for m in range(P.n))


@dataclass
class SweepResult:
    body: SymmetricPolytope
    sweeps: int
    defect: float
    volume_before: float
    volume_after: float
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def unconditional(self) -> bool:
        return not any(d.code == "not_unconditional" for d in self.diagnostics)


def _sweep_once(P: SymmetricPolytope) -> SymmetricPolytope:
    for axis in reversed(range(P.n)):
        P = steiner_symmetrize(P, axis)
    return P


def _finish_sweep(
    P: SymmetricPolytope, out: SymmetricPolytope, sweeps: int
) -> SweepResult:
    scale_ = max(1.0, float(np.abs(out.vertices).max()))
    defect = unconditional_defect(out)
    before, after = P.volume, out.volume
    diagnostics = []
    if defect >= settings.UNCONDITIONAL_DEFECT_TOL * scale_:
        diagnostics.append(
            Diagnostic(
                code="not_unconditional",
                message=f"coordinate-flip defect {defect:.3e} after {sweeps} sweep(s)",
                data={"defect": defect, "sweeps": sweeps},
            )
        )
    if abs(after - before) > VOLUME_RTOL * before:
        diagnostics.append(
            Diagnostic(
                code="volume_drift",
                message="symmetrization changed the volume",
                data={"before": before, "after": after},
            )
        )
    for diag in diagnostics:
        logger.warning(f"{diag.code}: {diag.message}")
    return SweepResult(out, sweeps, defect, before, after, diagnostics)


def unconditionalize_sweep(P: SymmetricPolytope) -> SweepResult:
    """Symmetrize along axes ``n-1, ..., 0`` and verify the output is unconditional."""
    return _finish_sweep(P, _sweep_once(P), 1)


def unconditionalize(P: SymmetricPolytope, cap: int | None = None) -> SweepResult:
    """Repeat full sweeps until the flip defect drops below tolerance."""
    cap = cap or settings.SWEEP_CAP
    out = P
    for sweeps in range(1, cap + 1):
        out = _sweep_once(out)
        scale_ = max(1.0, float(np.abs(out.vertices).max()))
        if unconditional_defect(out) < settings.UNCONDITIONAL_DEFECT_TOL * scale_:
            break
    return _finish_sweep(P, out, sweeps)


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


def section(body: SymmetricPolytope | HalfspacePolytope, axis: int, r: float) -> np.ndarray | None:
    """Vertices (in the remaining coordinates) of ``K ∩ {x_axis = r}``.

    Returns ``None`` when the section is empty or has no relative interior.
    """
    n = body.n
    _check_axis(n, axis)
    if n == 1:
        raise DomainError("sections need n >= 2")
    A, b = body.facets if isinstance(body, SymmetricPolytope) else (body.A, body.b)
    A_rest = np.delete(A, axis, axis=1)
    rhs = b - A[:, axis] * r
    keep = np.linalg.norm(A_rest, axis=1) > 1e-14
    if np.any(rhs[~keep] < 0):
        return None
    A_rest, rhs = A_rest[keep], rhs[keep]
    center, radius = chebyshev_center(A_rest, rhs)
    if radius <= 1e-12 * max(1.0, float(np.abs(rhs).max())):
        return None
    return halfspace_vertices(A_rest, rhs, center)


def boundedness_of(A: np.ndarray, b: np.ndarray) -> Boundedness:
    """LP ray test: bounded iff ``max <±e_m, x>`` is finite for every axis."""
    n = A.shape[1]
    for m in range(n):
        for sign in (1.0, -1.0):
            c = np.zeros(n)
            c[m] = -sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
            if res.status == 3:
                return Boundedness.UNBOUNDED
            if res.status != 0:
                return Boundedness.UNKNOWN
    return Boundedness.BOUNDED
