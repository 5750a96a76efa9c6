"""Generalized j-polar bodies and polarity verification for tuples of bodies."""

from __future__ import annotations

from math import prod

import numpy as np

from santalo.bodies.models import Body, Boundedness, HalfspacePolytope, SymmetricPolytope
from santalo.bodies.service import (
    boundedness_of,
    radial_many,
    support_point,
)
from santalo.errors import DomainError, UnboundedBodyError
from santalo.functional.models import GridFunction, RhoFunction
from santalo.logger import logger
from santalo.polar.schemas import ContainmentVerdict, PolarProblem
from santalo.schemas import (
    Diagnostic,
    PolarityParams,
    PolarityVerdict,
    SamplerCfg,
    Verdict,
)
from santalo.settings import settings
from santalo.symfun.service import big_S_batch, check_polarity_on_points, elem_sym_upto
from santalo.utils.geometry import dedupe, sort_rows, symmetric_extreme_points
from santalo.utils.parallel import chunk_bounds, ordered_map
from santalo.utils.rng import stream, unit_directions

CONSTRAINT_CHUNK = 100_000


def polar_constraints(
    vertex_sets: list[np.ndarray], params: PolarityParams, workers: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """One halfspace ``<a(v), x> <= C(k,j) - c(v)`` per tuple of vertices.

    ``a(v)_l`` is e_{j-1} of the fixed coordinates in column ``l`` and
    ``c(v)`` the part of S_j not involving the free slot. Rows come out in
    lexicographic tuple order.
    """
    shape = tuple(len(s) for s in vertex_sets)
    j, bound = params.j, params.bound

    def build(bounds: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = bounds
        idx = np.unravel_index(np.arange(lo, hi), shape)
        X = np.stack([s[i] for s, i in zip(vertex_sets, idx, strict=True)], axis=1)
        e = elem_sym_upto(np.swapaxes(X, -1, -2), j)
        return e[j - 1], bound - e[j].sum(axis=-1)

    parts = ordered_map(build, chunk_bounds(prod(shape), CONSTRAINT_CHUNK), workers)
    return np.vstack([a for a, _ in parts]), np.concatenate([b for _, b in parts])


def j_polar(problem: PolarProblem, workers: int | None = None) -> HalfspacePolytope:
    """Largest symmetric body completing ``problem.bodies`` to an E_j-polar tuple."""
    params, n = problem.params, problem.n
    diagnostics: list[Diagnostic] = []
    if any(body.degenerate for body in problem.bodies):
        diagnostics.append(
            Diagnostic(code="degenerate_input", message="some given bodies are flat")
        )

    A, b = polar_constraints([body.vertices for body in problem.bodies], params, workers)
    scale = max(1.0, float(np.abs(b).max()))
    null = np.linalg.norm(A, axis=1) <= 1e-14 * scale
    if np.any(b[null] < 0):
        diagnostics.append(Diagnostic(code="empty", message="constraint 0 <= b < 0"))
        return HalfspacePolytope(
            A=np.zeros((1, n)),
            b=np.array([-1.0]),
            bounded=Boundedness.BOUNDED,
            degenerate=True,
            diagnostics=tuple(diagnostics),
        )
    A, b = A[~null], b[~null]

    if np.any(b <= 1e-14 * scale):
        # the symmetric closure of a row with b <= 0 squeezes the body flat
        both = np.hstack([np.vstack([A, -A]), np.concatenate([b, b])[:, None]])
        rows = dedupe(sort_rows(both))
        A_d, b_d = rows[:, :-1], rows[:, -1]
        diagnostics.append(
            Diagnostic(code="empty_interior", message="j-polar has empty interior")
        )
        logger.warning(f"j_polar(k={params.k}, j={params.j}) has empty interior")
        return HalfspacePolytope(
            A=A_d,
            b=b_d,
            bounded=boundedness_of(A_d, b_d),
            degenerate=True,
            diagnostics=tuple(diagnostics),
        )

    # {x : <g, x> <= 1 for g in G} is the polar of conv(±G); its facets are the
    # vertices of conv(±G), and the ± closure is the symmetric restriction
    G, flat = symmetric_extreme_points(A / b[:, None])
    norms = np.linalg.norm(G, axis=1)
    A_out, b_out = G / norms[:, None], 1.0 / norms
    bounded = boundedness_of(A_out, b_out)
    if bounded is not Boundedness.BOUNDED:
        diagnostics.append(
            Diagnostic(
                code="unbounded",
                message="j-polar contains a line",
                data={"rank_deficient": flat},
            )
        )
    logger.debug(
        f"j_polar(k={params.k}, j={params.j}, n={n}): {len(b)} constraints -> "
        f"{len(b_out)} facets, {bounded.value}"
    )
    return HalfspacePolytope(
        A=A_out, b=b_out, bounded=bounded, diagnostics=tuple(diagnostics)
    )


def classical_polar(P: SymmetricPolytope) -> SymmetricPolytope:
    """``{y : <x, y> <= 1 for all x in P}``, the k = j = 2 case of ``j_polar``."""
    H = j_polar(PolarProblem(bodies=[P], params=PolarityParams(k=2, j=2)))
    return H.to_polytope(label=f"{P.label}°" if P.label else "")


def complete_tuple(
    bodies: list[SymmetricPolytope], params: PolarityParams
) -> SymmetricPolytope | None:
    """``j_polar`` of the given bodies as a V-polytope, or ``None`` if unbounded or flat."""
    H = j_polar(PolarProblem(bodies=bodies, params=params))
    if H.bounded is not Boundedness.BOUNDED or H.degenerate:
        return None
    return H.to_polytope(label="polar")


def largest_body_check(
    bodies: list[SymmetricPolytope],
    params: PolarityParams,
    index: int,
    tol: float | None = None,
) -> ContainmentVerdict:
    """``K_index ⊆ j_polar(other bodies)``, checked on vertices."""
    tol = settings.SLACK_TOL if tol is None else tol
    if len(bodies) != params.k or not 0 <= index < params.k:
        raise DomainError("need k bodies and an index within range")
    others = [body for i, body in enumerate(bodies) if i != index]
    H = j_polar(PolarProblem(bodies=others, params=params))
    slack = H.slack(bodies[index].vertices)
    min_slack = float(slack.min())
    return ContainmentVerdict(
        verdict=Verdict.PASS if min_slack >= -tol else Verdict.FAIL,
        min_slack=min_slack,
        active_vertices=int(np.sum(np.abs(slack) <= tol)),
        tol=tol,
        diagnostics=list(H.diagnostics),
    )


# ---------------------------------------------------------------------------
# Polarity verification
# ---------------------------------------------------------------------------


def _normalise(body) -> Body:
    if isinstance(body, HalfspacePolytope):
        return body.to_polytope()
    return body


def _boundary_samples(body: Body, count: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(body, SymmetricPolytope):
        return body.vertices
    n = body.n
    U = np.vstack([np.eye(n), -np.eye(n), unit_directions(rng, count, n)])
    return radial_many(body, U)[:, None] * U


def _e_values(X: np.ndarray, params: PolarityParams) -> np.ndarray:
    return big_S_batch(X, params.j) / params.bound


def _ascend(
    bodies: list[Body], X: np.ndarray, params: PolarityParams, sweeps: int
) -> tuple[np.ndarray, float, float]:
    """Maximise E_j slot by slot; each slot is linear so its optimum is a support point."""
    X = X.copy()
    value = float(_e_values(X, params))
    improvement = float("inf")
    for _ in range(sweeps):
        previous = value
        for i, body in enumerate(bodies):
            others = np.delete(X, i, axis=0)
            a = elem_sym_upto(others.T, params.j)[params.j - 1]
            if np.any(a):
                X[i] = support_point(body, a)
        value = float(_e_values(X, params))
        improvement = value - previous
    return X, value, improvement


def verify_tuple_polarity(
    bodies: list, params: PolarityParams, sampler: SamplerCfg | None = None
) -> PolarityVerdict:
    """E_j-polarity of a tuple of polytopes and / or oracles.

    All-polytope tuples are decided exactly on vertices. Otherwise boundary
    samples and random tuples seed a coordinate ascent; the verdict is
    INCONCLUSIVE when the ascent was still improving at the sweep cap.
    """
    if params.p != 1.0:
        raise DomainError("tuple verification uses the signed form (p = 1)")
    if len(bodies) != params.k:
        raise DomainError(f"expected {params.k} bodies, got {len(bodies)}")
    bodies = [_normalise(body) for body in bodies]
    if len({body.n for body in bodies}) != 1:
        raise DomainError("bodies have different dimensions")
    tol = settings.POLARITY_TOL

    if all(isinstance(body, SymmetricPolytope) for body in bodies):
        return check_polarity_on_points([body.vertices for body in bodies], params, tol)

    sampler = sampler or SamplerCfg()
    rng = stream(sampler.seed, 0)
    samples = [_boundary_samples(b, sampler.samples_per_body, rng) for b in bodies]
    picks = np.stack(
        [rng.integers(0, len(s), size=sampler.random_tuples) for s in samples], axis=1
    )
    X = np.stack([s[picks[:, i]] for i, s in enumerate(samples)], axis=1)
    values = _e_values(X, params)
    worst = int(np.argmax(values))
    logger.debug(f"sampled max E_{params.j} = {values[worst]:.6g} over {len(X)} tuples")

    best = (float(values[worst]), X[worst], 0.0)
    for restart in range(sampler.restarts):
        if restart == 0:
            start = X[worst]
        else:
            start = X[stream(sampler.seed, 1, restart).integers(len(X))]
        Y, value, improvement = _ascend(bodies, start, params, sampler.sweeps)
        if value > best[0]:
            best = (value, Y, improvement)

    max_value, witness, improvement = best
    diagnostics = []
    if max_value > 1.0 + tol:
        verdict = Verdict.FAIL
        diagnostics.append(
            Diagnostic(
                code="polarity_violated",
                message=f"E_{params.j} reaches {max_value:.12g} > 1",
                data={"excess": max_value - 1.0},
            )
        )
    elif improvement > sampler.improvement_tol:
        verdict = Verdict.INCONCLUSIVE
        diagnostics.append(
            Diagnostic(
                code="ascent_not_converged",
                message=f"last sweep still improved E_{params.j} by {improvement:.3e}",
                data={"improvement": improvement},
            )
        )
    else:
        verdict = Verdict.PASS
    return PolarityVerdict(
        verdict=verdict,
        max_value=max_value,
        witness=np.asarray(witness).tolist(),
        tol=tol,
        method="sampled",
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Functional analogue
# ---------------------------------------------------------------------------

COMPLETION_CELLS = 2_000_000


def functional_polar(
    fs: list[GridFunction],
    rho: RhoFunction,
    j: int,
    tol: float | None = None,
    workers: int | None = None,
) -> GridFunction:
    """Largest even lattice function ``g`` with ``(f_1, ..., f_{k-1}, g)`` S_j-polar.

    ``g(y) = min ρ(S_j(x, y)) / Π f_i(x_i)`` over lattice tuples in the
    supports; ``S_j`` is affine in ``y``, as in ``polar_constraints``.
    """
    tol = settings.POLARITY_TOL if tol is None else tol
    if not fs:
        raise DomainError("need at least one function")
    if any(not fs[0].same_lattice(f) for f in fs[1:]):
        raise DomainError("functions live on different lattices")
    params = PolarityParams(k=len(fs) + 1, j=j)
    supports = [(f.points[f.flat > 0], f.flat[f.flat > 0]) for f in fs]
    if any(len(v) == 0 for _, v in supports):
        raise UnboundedBodyError("a zero function leaves the last slot unconstrained")
    Y = fs[0].points
    shape = tuple(len(v) for _, v in supports)
    chunk = max(1, COMPLETION_CELLS // len(Y))

    def bound(bounds: tuple[int, int]) -> np.ndarray:
        lo, hi = bounds
        idx = np.unravel_index(np.arange(lo, hi), shape)
        X = np.stack([p[i] for (p, _), i in zip(supports, idx, strict=True)], axis=1)
        F = np.prod(
            np.stack([v[i] for (_, v), i in zip(supports, idx, strict=True)], axis=1),
            axis=1,
        )
        e = elem_sym_upto(np.swapaxes(X, -1, -2), params.j)
        S = e[params.j].sum(axis=-1)[:, None] + e[params.j - 1] @ Y.T
        R = np.asarray(rho(S - tol * np.abs(S)), dtype=float)
        return (R / F[:, None]).min(axis=0)

    parts = ordered_map(bound, chunk_bounds(prod(shape), chunk), workers)
    values = np.minimum.reduce(parts).reshape(fs[0].values.shape)
    if not np.all(np.isfinite(values)):
        raise UnboundedBodyError("completion is unbounded at some lattice points")
    values = np.minimum(values, np.flip(values))
    logger.debug(f"functional polar over {prod(shape)} tuples, j={j}")
    return GridFunction(values, fs[0].L, fs[0].h, even=True, label="functional polar")
