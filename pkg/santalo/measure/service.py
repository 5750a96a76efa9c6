"""Volumes, moment integrals and volume-product ratios.

Polytopes are integrated exactly over a cone triangulation; oracles go through
hit-or-miss Monte Carlo on the box ``[-R, R]^n`` with counter-based batches.
"""

from __future__ import annotations

from math import comb, factorial
from typing import Literal

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from santalo.bodies.models import Body, BodyOracle, HalfspacePolytope, SymmetricPolytope
from santalo.bodies.service import radial, radial_many
from santalo.errors import DomainError
from santalo.logger import logger
from santalo.measure.schemas import RatioResult
from santalo.schemas import McConfig, VolumeResult
from santalo.symfun.service import complete_homogeneous
from santalo.utils.geometry import (
    halfspace_vertices,
    simplex_volumes,
    simplices_from_apex,
)
from santalo.utils.parallel import ordered_map
from santalo.utils.rng import stream

OracleMethod = Literal["mc", "analytic"]


def _as_body(body) -> Body:
    if isinstance(body, HalfspacePolytope):
        body.require_bounded()
        return body.to_polytope()
    return body


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def lp_ball_volume(n: int, p: float) -> float:
    """``|B_p^n| = 2^n Γ(1 + 1/p)^n / Γ(1 + n/p)``."""
    if n < 1 or p <= 0:
        raise DomainError("need n >= 1 and p > 0")
    log_vol = n * np.log(2.0) + n * gammaln(1.0 + 1.0 / p) - gammaln(1.0 + n / p)
    return float(np.exp(log_vol))


def lp_ball_moment(n: int, p: float) -> float:
    """``∫_{B_p^n} |x_1|^p dx = |B_p^n| / (n + p)``."""
    return lp_ball_volume(n, p) / (n + p)


def orthant_lp_moment(n: int, P: float, q: float) -> float:
    """``∫_{B_P^n ∩ R^n_+} u_1^q du`` (Dirichlet integral), ``q > -1``."""
    if q <= -1 or P <= 0 or n < 1:
        raise DomainError("need n >= 1, P > 0 and q > -1")
    log_val = (
        gammaln((q + 1.0) / P)
        + (n - 1) * gammaln(1.0 / P)
        - n * np.log(P)
        - gammaln(1.0 + (n + q) / P)
    )
    return float(np.exp(log_val))


def bound_constant(n: int, j: int, k: int) -> float:
    """``C(k, j)^{n k / j}``, a volume-product bound valid for every symmetric tuple."""
    if not 2 <= j <= k:
        raise DomainError(f"need 2 <= j={j} <= k={k}")
    return float(comb(k, j) ** (n * k / j))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def _mc_integral(body: BodyOracle, cfg: McConfig, weight, key: int = 0) -> VolumeResult:
    """``∫_K weight(x) dx`` by uniform sampling of ``[-R, R]^n``."""
    n, R = body.n, body.outer_radius
    box = (2.0 * R) ** n
    batches = cfg.samples // cfg.batch

    def run(b: int) -> tuple[float, float]:
        rng = stream(cfg.seed, key, b)
        X = rng.uniform(-R, R, size=(cfg.batch, n))
        inside = body.contains(X)
        if weight is None:
            f = inside.astype(float)
        else:
            f = np.where(inside, weight(X), 0.0)
        return float(f.sum()), float((f * f).sum())

    sums = ordered_map(run, list(range(batches)))
    s1 = sum(s for s, _ in sums)
    s2 = sum(s for _, s in sums)
    N = cfg.samples
    mean = s1 / N
    var = max(s2 / N - mean * mean, 0.0)
    return VolumeResult(value=box * mean, stderr=box * np.sqrt(var / N), method="mc")


def volume_mc(body: BodyOracle, cfg: McConfig | None = None, key: int = 0) -> VolumeResult:
    """Hit-or-miss volume; ``key`` selects an independent random stream."""
    cfg = cfg or McConfig()
    result = _mc_integral(body, cfg, None, key)
    logger.debug(f"mc volume {body.label}: {result.value:.6g} ± {result.stderr:.2g}")
    return result


# ---------------------------------------------------------------------------
# Oracle integrals without sampling
# ---------------------------------------------------------------------------


def _lp_ball_integral(body: BodyOracle, m: int | None, j: int) -> float | None:
    """Closed form of ``∫_K |x_m|^j`` when ``K = T(s B_p^n)`` allows one.

    Volumes always have one. Moments need ``p = 2`` (rotation invariance) or a
    row ``m`` of ``T`` with a single nonzero entry.
    """
    if body.meta.get("kind") != "lp_ball":
        return None
    n, p, s = body.n, body.meta["p"], body.meta["scale"]
    T = np.asarray(body.meta.get("linear_map", np.eye(n)), dtype=float)
    det = abs(float(np.linalg.det(T)))
    if m is None or j == 0:
        return det * s**n * lp_ball_volume(n, p)
    row = T[m]
    if p == 2:
        weight = float(np.linalg.norm(row))
    elif np.count_nonzero(row) == 1:
        weight = float(np.abs(row).max())
    else:
        return None
    base = s ** (n + j) * 2.0**n * orthant_lp_moment(n, p, j)
    return det * weight**j * base


def _polar_quadrature(body: BodyOracle, m: int, j: int) -> VolumeResult:
    """``∫_0^{2π} |u_m|^j r(θ)^{2+j} / (2+j) dθ`` in the plane."""

    def integrand(theta: float) -> float:
        u = np.array([[np.cos(theta), np.sin(theta)]])
        r = float(radial_many(body, u)[0])
        return abs(u[0, m]) ** j * r ** (2 + j) / (2 + j)

    # symmetric bodies: integrate half the circle
    value, abserr = quad(integrand, 0.0, np.pi, limit=400, epsabs=1e-12, epsrel=1e-11)
    return VolumeResult(value=2.0 * value, stderr=2.0 * abserr, method="quadrature")


def _analytic(body: BodyOracle, m: int | None, j: int) -> VolumeResult | None:
    closed = _lp_ball_integral(body, m, j)
    if closed is not None:
        return VolumeResult(value=closed, method="exact")
    if body.n == 2:
        return _polar_quadrature(body, 0 if m is None else m, 0 if m is None else j)
    logger.debug(f"no deterministic rule for {body.label} in n={body.n}; using MC")
    return None


# ---------------------------------------------------------------------------
# Exact polytope integrals
# ---------------------------------------------------------------------------


def volume_polytope(P: SymmetricPolytope) -> VolumeResult:
    return VolumeResult(value=P.volume, stderr=0.0, method="exact")


def volume(
    body,
    cfg: McConfig | None = None,
    key: int = 0,
    oracle_method: OracleMethod = "mc",
) -> VolumeResult:
    """Exact for polytopes; oracles use MC unless ``oracle_method="analytic"``."""
    body = _as_body(body)
    if isinstance(body, SymmetricPolytope):
        return volume_polytope(body)
    if oracle_method == "analytic":
        result = _analytic(body, None, 0)
        if result is not None:
            return result
    return volume_mc(body, cfg, key)


def _simplex_power_integrals(simplices: np.ndarray, axis: int, j: int) -> float:
    """``Σ_Δ ∫_Δ x_axis^j`` via ``j! n! |Δ| / (n + j)! · h_j(vertex values)``."""
    n = simplices.shape[2]
    vols = simplex_volumes(simplices)
    h = complete_homogeneous(simplices[:, :, axis], j)
    coeff = factorial(j) * factorial(n) / factorial(n + j)
    return float(coeff * np.sum(vols * h))


def _half_body_simplices(P: SymmetricPolytope, axis: int) -> np.ndarray:
    """Triangulation of ``P ∩ {x_axis >= 0}``."""
    n = P.n
    A, b = P.facets
    cut = np.zeros((1, n))
    cut[0, axis] = -1.0
    e = np.zeros(n)
    e[axis] = 1.0
    inner = 0.5 * radial(P, e) * e
    half = halfspace_vertices(np.vstack([A, cut]), np.concatenate([b, [0.0]]), inner)
    return simplices_from_apex(half)


def polytope_moment(P: SymmetricPolytope, axis: int, j: int) -> float:
    """``∫_P |x_axis|^j dx`` exactly."""
    P.require_full()
    if j == 0:
        return P.volume
    if P.n == 1:
        r = float(P.vertices.max())
        return 2.0 * r ** (j + 1) / (j + 1)
    if j % 2 == 0:
        simplices = simplices_from_apex(P.vertices, np.zeros(P.n))
        return _simplex_power_integrals(simplices, axis, j)
    return 2.0 * _simplex_power_integrals(_half_body_simplices(P, axis), axis, j)


def moment_integral(
    body,
    m: int,
    j: int,
    cfg: McConfig | None = None,
    key: int = 0,
    oracle_method: OracleMethod = "mc",
) -> VolumeResult:
    """``∫_K |x_m|^j dx``; oracles default to Monte Carlo."""
    body = _as_body(body)
    if not 0 <= m < body.n:
        raise DomainError(f"axis {m} out of range for dimension {body.n}")
    if j < 0:
        raise DomainError("moment degree must be nonnegative")
    if isinstance(body, SymmetricPolytope):
        return VolumeResult(value=polytope_moment(body, m, j), method="exact")
    if oracle_method == "analytic":
        result = _analytic(body, m, j)
        if result is not None:
            return result
    if j == 0:
        return volume_mc(body, cfg, key)
    cfg = cfg or McConfig()
    return _mc_integral(body, cfg, lambda X: np.abs(X[:, m]) ** j, key)


def moment_integrals(
    body,
    j: int,
    cfg: McConfig | None = None,
    key: int = 0,
    oracle_method: OracleMethod = "mc",
) -> list[VolumeResult]:
    """``moment_integral`` for every axis ``m``; oracle axes share one sample stream."""
    body = _as_body(body)
    return [moment_integral(body, m, j, cfg, key, oracle_method) for m in range(body.n)]


def second_moment_matrix(P: SymmetricPolytope) -> np.ndarray:
    """``∫_P x x^T dx`` exactly."""
    P.require_full()
    n = P.n
    if n == 1:
        r = float(P.vertices.max())
        return np.array([[2.0 * r**3 / 3.0]])
    simplices = simplices_from_apex(P.vertices, np.zeros(n))
    vols = simplex_volumes(simplices)
    total = simplices.sum(axis=1)
    outer = np.einsum("fvi,fvj->fij", simplices, simplices) + np.einsum(
        "fi,fj->fij", total, total
    )
    return np.einsum("f,fij->ij", vols, outer) / ((n + 1) * (n + 2))


# ---------------------------------------------------------------------------
# Ratios
# ---------------------------------------------------------------------------


def product_with_error(results: list[VolumeResult]) -> tuple[float, float]:
    """Product of independent estimates; relative variances add (first order)."""
    value = float(np.prod([r.value for r in results]))
    rel_var = sum((r.stderr / r.value) ** 2 for r in results if r.value > 0)
    return value, abs(value) * float(np.sqrt(rel_var))


def santalo_ratio(
    bodies: list,
    j: int,
    cfg: McConfig | None = None,
    oracle_method: OracleMethod = "mc",
) -> RatioResult:
    """``Π|K_i| / |B_j^n|^k``; each oracle volume uses its own random stream."""
    if not bodies:
        raise DomainError("need at least one body")
    n = bodies[0].n
    if any(body.n != n for body in bodies):
        raise DomainError("bodies have different dimensions")
    volumes = [
        volume(body, cfg, key=i, oracle_method=oracle_method)
        for i, body in enumerate(bodies)
    ]
    product, stderr = product_with_error(volumes)
    reference = lp_ball_volume(n, j) ** len(bodies)
    return RatioResult(
        value=product / reference,
        stderr=stderr / reference,
        product=product,
        reference=reference,
        volumes=volumes,
    )
