"""Functional forms of the polarity condition and the conjectured bounds."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product
from math import comb, prod

import numpy as np
from scipy.integrate import IntegrationWarning, quad, simpson, trapezoid

from santalo.bodies.models import BodyOracle, SymmetricPolytope, SymmetryClass
from santalo.bodies.service import unconditional_defect
from santalo.errors import DivergenceError, DomainError
from santalo.functional.models import (
    GridFunction,
    IndicatorGrid,
    RhoFunction,
    RhoKind,
    Table1D,
)
from santalo.functional.schemas import (
    FullSpaceReport,
    InequalityReport,
    IntegralResult,
    LayerCakeReport,
    PrekopaLeindlerReport,
)
from santalo.logger import logger
from santalo.measure.service import bound_constant, lp_ball_volume, orthant_lp_moment
from santalo.schemas import (
    Diagnostic,
    PolarityParams,
    PolarityVerdict,
    SamplerCfg,
    Verdict,
)
from santalo.settings import settings
from santalo.symfun.service import big_S_batch, check_polarity_on_points, elem_sym_upto
from santalo.utils.parallel import chunk_bounds, ordered_map
from santalo.utils.rng import stream

TUPLE_CHUNK = 100_000
PIPELINE_GAP = 0.02


# ---------------------------------------------------------------------------
# Polarity of functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Support:
    """Lattice points where ``f > 0`` with their values and flat lattice index."""

    points: np.ndarray
    values: np.ndarray
    index: np.ndarray

    @classmethod
    def of(cls, f: GridFunction) -> _Support:
        idx = np.flatnonzero(f.flat > 0)
        return cls(f.points[idx], f.flat[idx], idx)

    def __len__(self) -> int:
        return len(self.values)


def _lenient_rho(rho: RhoFunction, S: np.ndarray, tol: float) -> np.ndarray:
    # ρ is nonincreasing, so shrinking |S| towards zero only loosens the check
    return np.asarray(rho(S - tol * np.abs(S)), dtype=float)


def _ratios(F: np.ndarray, R: np.ndarray) -> np.ndarray:
    """``F / R`` with ``F = 0 -> 0``, ``R = ∞ -> 0`` and ``0 < F, R = 0 -> ∞``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(R > 0, F / np.where(R > 0, R, 1.0), np.inf)
    return np.where((F == 0) | np.isinf(R), 0.0, raw)


def _check_lattices(fs: list[GridFunction]) -> None:
    if not fs:
        raise DomainError("need at least one function")
    if any(not fs[0].same_lattice(f) for f in fs[1:]):
        raise DomainError("functions live on different lattices")


def _tuple_values(
    supports: list[_Support],
    picks: np.ndarray,
    rho: RhoFunction,
    params: PolarityParams,
    absolute: bool,
    tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    X = np.stack([s.points[picks[:, i]] for i, s in enumerate(supports)], axis=1)
    F = np.prod(
        np.stack([s.values[picks[:, i]] for i, s in enumerate(supports)], axis=1), axis=1
    )
    S = big_S_batch(X, params.j, absolute=absolute, p=params.p)
    R = _lenient_rho(rho, S, tol)
    return _ratios(F, R), F - R


def _verdict(
    ratio: float, excess: float, picks, supports, tol: float, method: str, extra=()
) -> PolarityVerdict:
    diagnostics = list(extra)
    verdict = Verdict.PASS
    if excess > tol:
        verdict = Verdict.FAIL
        diagnostics.append(
            Diagnostic(
                code="polarity_violated",
                message=f"product of values exceeds ρ(S_j) by {excess:.6g}",
                data={"excess": excess},
            )
        )
    elif any(d.code == "ascent_not_converged" for d in diagnostics):
        verdict = Verdict.INCONCLUSIVE
    return PolarityVerdict(
        verdict=verdict,
        max_value=ratio,
        argmax=[int(s.index[p]) for s, p in zip(supports, picks, strict=True)],
        witness=[s.points[p].tolist() for s, p in zip(supports, picks, strict=True)],
        tol=tol,
        method=method,
        diagnostics=diagnostics,
    )


def check_function_polarity(
    fs: list[GridFunction],
    rho: RhoFunction,
    params: PolarityParams,
    sampler: SamplerCfg | None = None,
    tol: float | None = None,
    *,
    absolute: bool = False,
    workers: int | None = None,
) -> PolarityVerdict:
    """``Π f_i(x_i) <= ρ(S_j(x)) + tol`` on lattice tuples; reports the worst ratio.

    Tuples are enumerated over the supports when there are at most
    ``LATTICE_MAX_TUPLES`` of them; otherwise random tuples seed an exact
    slot-by-slot lattice ascent.
    """
    tol = settings.POLARITY_TOL if tol is None else tol
    if len(fs) != params.k:
        raise DomainError(f"expected {params.k} functions, got {len(fs)}")
    if params.p != 1.0 and not absolute:
        raise DomainError("the signed form has no exponent; pass absolute=True")
    _check_lattices(fs)
    supports = [_Support.of(f) for f in fs]
    if any(len(s) == 0 for s in supports):
        return PolarityVerdict(verdict=Verdict.PASS, max_value=0.0, tol=tol)

    shape = tuple(len(s) for s in supports)
    total = prod(shape)
    if total <= settings.LATTICE_MAX_TUPLES:
        logger.debug(f"function polarity over {total} lattice tuples")

        def scan(bounds: tuple[int, int]) -> tuple[float, int, float]:
            lo, hi = bounds
            picks = np.stack(np.unravel_index(np.arange(lo, hi), shape), axis=1)
            ratio, excess = _tuple_values(supports, picks, rho, params, absolute, tol)
            best = int(np.argmax(ratio))
            return float(ratio[best]), lo + best, float(excess.max())

        results = ordered_map(scan, chunk_bounds(total, TUPLE_CHUNK), workers)
        ratio, flat, _ = results[0]
        for r, f, _ in results[1:]:
            if r > ratio:
                ratio, flat = r, f
        excess = max(e for _, _, e in results)
        picks = [int(i) for i in np.unravel_index(flat, shape)]
        return _verdict(ratio, excess, picks, supports, tol, "exact")

    sampler = sampler or SamplerCfg()
    return _sampled_function_polarity(supports, rho, params, sampler, tol, absolute)


def _slot_ratios(
    supports: list[_Support],
    transformed: list[np.ndarray],
    tup: np.ndarray,
    i: int,
    rho: RhoFunction,
    j: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Ratio and excess for every support point of slot ``i``, others fixed.

    S_j is affine in one slot: ``c + <a, y>`` with ``a = e_{j-1}`` and
    ``c = sum e_j`` of the fixed columns.
    """
    rest = [o for o in range(len(supports)) if o != i]
    others = np.stack([transformed[o][tup[o]] for o in rest])
    e = elem_sym_upto(others.T, j)
    fixed = prod(float(supports[o].values[tup[o]]) for o in rest)
    F = supports[i].values * fixed
    R = _lenient_rho(rho, e[j].sum() + transformed[i] @ e[j - 1], tol)
    return _ratios(F, R), F - R


def _sampled_function_polarity(
    supports: list[_Support],
    rho: RhoFunction,
    params: PolarityParams,
    sampler: SamplerCfg,
    tol: float,
    absolute: bool,
) -> PolarityVerdict:
    rng = stream(sampler.seed, 3)
    picks = np.stack(
        [rng.integers(0, len(s), size=sampler.random_tuples) for s in supports], axis=1
    )
    ratio, excess = _tuple_values(supports, picks, rho, params, absolute, tol)
    starts = np.argsort(-ratio, kind="stable")[: sampler.restarts]
    transformed = [np.abs(s.points) ** params.p if absolute else s.points for s in supports]

    max_excess = float(excess.max())
    best_ratio, best_tuple, best_improvement = float(ratio[starts[0]]), picks[starts[0]], 0.0
    for start in starts:
        tup = picks[start].copy()
        value = float(ratio[start])
        improvement = 0.0
        for _ in range(sampler.sweeps):
            previous = value
            for i in range(len(supports)):
                r, ex = _slot_ratios(supports, transformed, tup, i, rho, params.j, tol)
                tup[i] = int(np.argmax(r))
                value = float(r[tup[i]])
                max_excess = max(max_excess, float(ex.max()))
            improvement = value - previous
        if value > best_ratio:
            best_ratio, best_tuple, best_improvement = value, tup, improvement

    extra = []
    if np.isfinite(best_improvement) and best_improvement > sampler.improvement_tol:
        extra.append(
            Diagnostic(
                code="ascent_not_converged",
                message=f"last sweep still improved the ratio by {best_improvement:.3e}",
            )
        )
    return _verdict(
        best_ratio, max_excess, list(best_tuple), supports, tol, "sampled", extra
    )


# ---------------------------------------------------------------------------
# Conjectured right-hand sides
# ---------------------------------------------------------------------------


def _layer_cake(rho: RhoFunction, k: int, exponent: float, C: float) -> IntegralResult:
    """``∫_0^{ρ(0)^{1/k}} max(ρ^{-1}(t^k) / C, 0)^exponent dt``."""
    top = rho.at_zero
    if not np.isfinite(top):
        raise DivergenceError("ρ(0) is infinite")
    if rho.floor > 0:
        return IntegralResult(
            value=float("inf"),
            diagnostics=[
                Diagnostic(
                    code="divergent",
                    message="inf ρ > 0: every level set below it is the whole space",
                    data={"floor": rho.floor},
                )
            ],
        )
    if rho.kind is RhoKind.POWER and k * exponent >= rho.params["alpha"]:
        return IntegralResult(
            value=float("inf"),
            diagnostics=[
                Diagnostic(
                    code="divergent",
                    message="power profile decays too slowly for this exponent",
                    data={"alpha": rho.params["alpha"], "k": k, "exponent": exponent},
                )
            ],
        )
    upper = top ** (1.0 / k)

    def integrand(t: float) -> float:
        inv = float(rho.inverse(t**k))
        return max(inv / C, 0.0) ** exponent

    breaks = sorted(b ** (1.0 / k) for b in rho.breakpoints if 0 < b ** (1.0 / k) < upper)
    diagnostics = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, abserr = quad(
            integrand,
            0.0,
            upper,
            points=breaks or None,
            limit=200,
            epsabs=1e-14,
            epsrel=1e-12,
        )
    if caught:
        diagnostics.append(
            Diagnostic(code="quadrature_warning", message=str(caught[-1].message))
        )
    return IntegralResult(value=value, abserr=abserr, diagnostics=diagnostics)


def _power_result(base: IntegralResult, factor: float, k: int) -> IntegralResult:
    value = (factor * base.value) ** k
    if not np.isfinite(value) or base.value == 0:
        return IntegralResult(value=value, diagnostics=base.diagnostics)
    return IntegralResult(
        value=value,
        abserr=k * value * base.abserr / base.value,
        diagnostics=base.diagnostics,
    )


def conjectured_rhs(rho: RhoFunction, n: int, j: int, k: int) -> IntegralResult:
    """``(∫ ρ(C(k,j) ||u||_j^j)^{1/k} du)^k`` through the layer-cake identity."""
    if not 1 <= j <= k:
        raise DomainError(f"need 1 <= j={j} <= k={k}")
    base = _layer_cake(rho, k, n / j, comb(k, j))
    return _power_result(base, lp_ball_volume(n, j), k)


def direct_rhs(rho: RhoFunction, n: int, j: int, k: int, L: float, h: float) -> float:
    """Lattice quadrature of the same integrand; an independent oracle."""
    C = comb(k, j)
    g = GridFunction.from_callable(
        lambda X: np.asarray(rho(C * np.sum(np.abs(X) ** j, axis=1))) ** (1.0 / k),
        n,
        L,
        h,
    )
    return g.mass() ** k


# ---------------------------------------------------------------------------
# Bodies <-> functions
# ---------------------------------------------------------------------------


def _radius(body) -> float:
    if isinstance(body, SymmetricPolytope):
        return float(np.linalg.norm(body.vertices, axis=1).max())
    return float(body.outer_radius)


def _is_unconditional(body) -> bool:
    if isinstance(body, BodyOracle):
        return body.symmetry_class is SymmetryClass.UNCONDITIONAL
    scale = max(1.0, _radius(body))
    return unconditional_defect(body) < settings.UNCONDITIONAL_DEFECT_TOL * scale


def default_lattice(bodies: list, M: int | None = None) -> tuple[float, float]:
    """``L = 4 * max radius`` with ``M = 64`` steps per half-axis (24 in n >= 3)."""
    n = bodies[0].n
    L = 4.0 * max(_radius(b) for b in bodies)
    M = M or (64 if n <= 2 else 24)
    return L, L / M


def lift_from_bodies(
    bodies: list, j: int, L: float | None = None, h: float | None = None
) -> tuple[list[IndicatorGrid], RhoFunction]:
    """Indicators of the bodies and the profile ``∞ · 1_{t<0} + 1_{[0, C(k,j)]}``."""
    k = len(bodies)
    if not 1 <= j <= k:
        raise DomainError(f"need 1 <= j={j} <= k={k}")
    if L is None or h is None:
        L, h = default_lattice(bodies)
    fs = [
        IndicatorGrid.from_body(b, L, h, unconditional=_is_unconditional(b))
        for b in bodies
    ]
    return fs, RhoFunction.indicator(C=float(comb(k, j)))


def functional_product(fs: list[GridFunction]) -> float:
    return float(prod(f.mass() for f in fs))


def superlevel_polytope(f: GridFunction, r: float) -> np.ndarray:
    """Lattice points with ``f >= r``."""
    if r <= 0:
        raise DomainError("level must be positive")
    return f.points[f.flat >= r]


def _hull_volume(points: np.ndarray, n: int) -> float:
    if len(points) < n + 1:
        return 0.0
    P = SymmetricPolytope.from_points(points)
    return 0.0 if P.degenerate else P.volume


# ---------------------------------------------------------------------------
# One-dimensional multiplicative Prekopa-Leindler
# ---------------------------------------------------------------------------


def _simpson_gap(table: Table1D) -> float:
    if len(table.t) < 3:
        return 0.0
    return abs(trapezoid(table.values, table.t) - simpson(table.values, x=table.t))


def prekopa_leindler_check(
    hs: list[Table1D], h: Table1D, tol: float | None = None
) -> PrekopaLeindlerReport:
    """Hypothesis ``Π h_i(t_i)^{1/k} <= h(Π t_i^{1/k})`` on grid tuples, then
    ``Π (∫ h_i)^{1/k}`` against ``∫ h``."""
    tol = settings.POLARITY_TOL if tol is None else tol
    k = len(hs)
    if k < 1:
        raise DomainError("need at least one table")
    cap = settings.LATTICE_MAX_TUPLES
    per_slot = max(2, int(cap ** (1.0 / k)))
    grids = []
    for table in hs:
        stride = max(1, int(np.ceil(len(table.t) / per_slot)))
        grids.append((table.t[::stride], table.values[::stride]))
    shape = tuple(len(t) for t, _ in grids)
    total = prod(shape)

    def scan(bounds: tuple[int, int]) -> tuple[float, int]:
        lo, hi = bounds
        idx = np.unravel_index(np.arange(lo, hi), shape)
        T = np.stack([g[0][i] for g, i in zip(grids, idx, strict=True)], axis=1)
        V = np.stack([g[1][i] for g, i in zip(grids, idx, strict=True)], axis=1)
        lhs = np.prod(V ** (1.0 / k), axis=1)
        rhs = h(np.prod(T ** (1.0 / k), axis=1))
        gap = lhs - rhs
        best = int(np.argmax(gap))
        return float(gap[best]), lo + best

    results = ordered_map(scan, chunk_bounds(total, TUPLE_CHUNK))
    worst, flat = max(results, key=lambda r: r[0])
    idx = np.unravel_index(flat, shape)
    witness = [float(g[0][i]) for g, i in zip(grids, idx, strict=True)]
    hypothesis = Verdict.PASS if worst <= tol else Verdict.FAIL

    lhs = float(prod(t.integral() ** (1.0 / k) for t in hs))
    rhs = h.integral()
    grid_error = sum(_simpson_gap(t) for t in hs) / k + _simpson_gap(h)
    diagnostics = []
    if hypothesis is Verdict.FAIL:
        diagnostics.append(
            Diagnostic(
                code="hypothesis_violated",
                message=f"geometric-mean hypothesis fails by {worst:.6g}",
                data={"witness": witness},
            )
        )
    return PrekopaLeindlerReport(
        hypothesis=hypothesis,
        worst_violation=worst,
        witness=witness,
        tuples_checked=total,
        lhs=lhs,
        rhs=rhs,
        grid_error=grid_error,
        conclusion_holds=lhs <= rhs + grid_error + tol,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Orthant inequalities
# ---------------------------------------------------------------------------


def _orthant_rhs(rho: RhoFunction, n: int, j: int, k: int, p: float, q: float):
    P = j * p
    base = _layer_cake(rho, k, (n + q) / P, comb(k, j))
    return _power_result(base, orthant_lp_moment(n, P, q), k)


def _check_exponents(p: float, q: float) -> None:
    if q <= -1 or p <= 0:
        raise DomainError("need q > -1 and p > 0", {"p": p, "q": q})


def _polarity_gate(fs, rho, params, sampler) -> tuple[PolarityVerdict, list[Diagnostic]]:
    polarity = check_function_polarity(fs, rho, params, sampler, absolute=True)
    diagnostics = []
    if polarity.verdict is Verdict.FAIL:
        diagnostics.append(
            Diagnostic(
                code="polarity_failed",
                message="functions do not satisfy S_{j,p}-polarity; no claim made",
                data={"witness": polarity.witness},
            )
        )
    return polarity, diagnostics


def weighted_orthant_check(
    fs: list[GridFunction],
    rho: RhoFunction,
    j: int,
    p: float = 1.0,
    q: float = 0.0,
    m: int = 0,
    sampler: SamplerCfg | None = None,
    tol: float = 1e-9,
) -> InequalityReport:
    """``Π ∫_{R^n_+} |x_m|^q f_i <= (∫_{R^n_+} u_1^q ρ(C ||u||_{jp}^{jp})^{1/k} du)^k``."""
    _check_exponents(p, q)
    _check_lattices(fs)
    k, n = len(fs), fs[0].n
    negative = np.any(fs[0].points < 0, axis=1)
    if any(np.any(f.flat[negative] > 0) for f in fs):
        raise DomainError("functions must vanish outside the positive orthant")
    params = PolarityParams(k=k, j=j, p=p)
    polarity, diagnostics = _polarity_gate(fs, rho, params, sampler)
    if polarity.verdict is Verdict.FAIL:
        return InequalityReport(
            verdict=Verdict.SKIPPED, polarity=polarity, diagnostics=diagnostics
        )

    lhs = float(prod(f.moment(m, q, orthant=True) for f in fs))
    rhs = _orthant_rhs(rho, n, j, k, p, q)
    diagnostics.extend(rhs.diagnostics)
    ok = lhs <= rhs.value * (1 + tol) + rhs.abserr
    return InequalityReport(
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        lhs=lhs,
        rhs=rhs.value,
        error=rhs.abserr,
        polarity=polarity,
        diagnostics=diagnostics,
    )


def full_space_from_orthants(
    fs: list[GridFunction],
    rho: RhoFunction,
    j: int,
    p: float = 1.0,
    q: float = 0.0,
    m: int = 0,
    sampler: SamplerCfg | None = None,
    tol: float = 1e-9,
) -> FullSpaceReport:
    """The full-space inequality assembled from ``2^{nk}`` folded orthant terms."""
    _check_exponents(p, q)
    _check_lattices(fs)
    k, n = len(fs), fs[0].n
    params = PolarityParams(k=k, j=j, p=p)
    polarity, diagnostics = _polarity_gate(fs, rho, params, sampler)
    if polarity.verdict is Verdict.FAIL:
        return FullSpaceReport(
            verdict=Verdict.SKIPPED, polarity=polarity, diagnostics=diagnostics
        )

    signs = list(product((1, -1), repeat=n))
    orthant = [
        [
            GridFunction.moment(f.with_values(f.fold(s), even=False), m, q, orthant=True)
            for s in signs
        ]
        for f in fs
    ]
    aggregate, nonzero = 0.0, 0
    for combo in product(range(len(signs)), repeat=k):
        term = prod(orthant[i][c] for i, c in enumerate(combo))
        aggregate += term
        nonzero += term > 0
    direct = float(prod(GridFunction.moment(f, m, q) for f in fs))

    per_orthant = _orthant_rhs(rho, n, j, k, p, q)
    diagnostics.extend(per_orthant.diagnostics)
    factor = 2.0 ** (n * k)
    rhs, err = factor * per_orthant.value, factor * per_orthant.abserr
    if direct > 0 and abs(aggregate - direct) > 1e-8 * direct:
        diagnostics.append(
            Diagnostic(
                code="decomposition_mismatch",
                message="orthant terms do not add up to the full-space integral",
                data={"aggregate": aggregate, "direct": direct},
            )
        )
    ok = aggregate <= rhs * (1 + tol) + err
    return FullSpaceReport(
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        lhs=aggregate,
        rhs=rhs,
        error=err,
        polarity=polarity,
        direct_lhs=direct,
        orthant_terms=len(signs) ** k,
        nonzero_terms=nonzero,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Set -> function pipeline
# ---------------------------------------------------------------------------


def _level_grid(top: float, levels: int) -> np.ndarray:
    uniform = top * np.linspace(1.0 / levels, 1.0, levels)
    geometric = top * np.geomspace(1e-10, 1.0, levels)
    return np.unique(np.concatenate([uniform, geometric]))


def _volume_profile(f: GridFunction, r: np.ndarray) -> np.ndarray:
    """``|conv {f >= r}|`` per level; nested sets of equal size share a hull."""
    cache: dict[int, float] = {}
    out = np.empty_like(r)
    for i, level in enumerate(r):
        pts = superlevel_polytope(f, level)
        if len(pts) not in cache:
            cache[len(pts)] = _hull_volume(pts, f.n)
        out[i] = cache[len(pts)]
    return out


def layer_cake_pipeline(
    fs: list[GridFunction],
    rho: RhoFunction,
    j: int,
    levels: int = 64,
    check_levels: int = 6,
    tol: float | None = None,
) -> LayerCakeReport:
    """Superlevel hulls, λ-rescaled polarity, and Prekopa-Leindler on the profiles.

    ``φ_i(r) = |conv{f_i >= r}|``; the rescaled hulls ``λ K_i(r_i)`` with
    ``λ = (C / ρ^{-1}(Π r_i))^{1/j}`` must satisfy E_j-polarity, and
    ``Π ∫ φ_i`` must reproduce ``Π ∫ f_i``.
    """
    tol = settings.POLARITY_TOL if tol is None else tol
    _check_lattices(fs)
    k, n = len(fs), fs[0].n
    params = PolarityParams(k=k, j=j)
    C = float(comb(k, j))
    if rho.floor > 0:
        raise DivergenceError("the pipeline needs inf ρ = 0")
    diagnostics: list[Diagnostic] = []

    direct = functional_product(fs)
    tops = [float(f.values.max()) for f in fs]
    if min(tops) <= 0:
        raise DomainError("every function must be positive somewhere")
    grids = [_level_grid(top, levels) for top in tops]
    profiles = [_volume_profile(f, r) for f, r in zip(fs, grids, strict=True)]
    tables = [Table1D(r, phi) for r, phi in zip(grids, profiles, strict=True)]
    pipeline = float(prod(t.integral() for t in tables))
    gap = abs(pipeline - direct) / direct if direct > 0 else 0.0
    logger.debug(f"layer-cake pipeline: direct {direct:.6g}, hulls {pipeline:.6g}")

    # λ-rescaled hull tuples at a few levels per function
    checks = failures = 0
    picks = [top * np.linspace(0.1, 0.9, check_levels) for top in tops]
    hulls = [
        {
            r: SymmetricPolytope.from_points(superlevel_polytope(f, r))
            for r in levels_i
            if len(superlevel_polytope(f, r)) > 0
        }
        for f, levels_i in zip(fs, picks, strict=True)
    ]
    for combo in product(*[list(h.keys()) for h in hulls]):
        inv = float(rho.inverse(prod(combo)))
        if not 0 < inv < np.inf:
            continue
        lam = (C / inv) ** (1.0 / j)
        sets = [lam * hulls[i][r].vertices for i, r in enumerate(combo)]
        checks += 1
        if check_polarity_on_points(sets, params, tol).verdict is Verdict.FAIL:
            failures += 1
            logger.warning(f"rescaled hulls at levels {combo} violate E_{j}-polarity")

    top_h = max(max(tops), rho.at_zero ** (1.0 / k))
    s = top_h * np.linspace(1.0 / (4 * levels), 1.0, 4 * levels)
    with np.errstate(invalid="ignore"):
        inv = np.asarray(rho.inverse(s**k), dtype=float)
    h_vals = lp_ball_volume(n, j) * np.maximum(inv / C, 0.0) ** (n / j)
    pl = prekopa_leindler_check(tables, Table1D(s, h_vals), tol)
    rhs = conjectured_rhs(rho, n, j, k)

    if gap > PIPELINE_GAP:
        diagnostics.append(
            Diagnostic(
                code="pipeline_gap",
                message=f"hull profiles miss the direct product by {100 * gap:.2f}%",
                data={"gap": gap},
            )
        )
    ok = gap <= PIPELINE_GAP and failures == 0 and pl.conclusion_holds
    return LayerCakeReport(
        direct_product=direct,
        pipeline_product=pipeline,
        relative_gap=gap,
        levels=len(grids[0]),
        rescaled_checks=checks,
        rescaled_failures=failures,
        prekopa_leindler=pl,
        rhs=rhs.value,
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        diagnostics=diagnostics + pl.diagnostics,
    )


def relaxed_bound_check(
    fs: list[GridFunction], rho: RhoFunction, j: int, tol: float = 1e-9
) -> InequalityReport:
    """``Π ∫ f_i <= a_{n,j,k} · conjectured_rhs`` for arbitrary symmetric tuples."""
    _check_lattices(fs)
    k, n = len(fs), fs[0].n
    lhs = functional_product(fs)
    base = conjectured_rhs(rho, n, j, k)
    constant = bound_constant(n, j, k)
    rhs = constant * base.value
    ok = lhs <= rhs * (1 + tol) + constant * base.abserr
    return InequalityReport(
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        lhs=lhs,
        rhs=rhs,
        error=constant * base.abserr,
        diagnostics=base.diagnostics,
    )
