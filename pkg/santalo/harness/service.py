"""Experiment campaigns over generated corpora.

Every campaign draws case ``c`` from the stream ``(seed, key, c)``, runs its
cases on the worker pool and aggregates them in case order, so a report is a
function of its echoed config alone (timestamps aside).
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass, field
from datetime import datetime
from datetime import timezone as _tz
from math import comb, prod

import numpy as np

from santalo.ball.service import ball_rhs, functional_ball_min
from santalo.bodies.models import Boundedness, HalfspacePolytope, SymmetricPolytope
from santalo.bodies.service import (
    hull_reduce,
    lp_ball_polytope,
    make_lp_ball,
    radial_many,
    scale,
    section,
    steiner_symmetrize,
    unconditional_defect,
    unconditionalize,
    unconditionalize_sweep,
)
from santalo.errors import BlockedParameterError, DomainError, UnboundedBodyError
from santalo.functional.models import GridFunction, RhoFunction
from santalo.functional.service import (
    check_function_polarity,
    conjectured_rhs,
    default_lattice,
    functional_product,
    lift_from_bodies,
)
from santalo.harness.corpus import random_symmetric_polytope, random_unconditional_polytope
from santalo.harness.report import build_report
from santalo.harness.schemas import (
    CampaignCase,
    CaseRecord,
    ExperimentConfig,
    ExperimentReport,
    FunctionalConfig,
    RadialConfig,
    SearchConfig,
    SymmetrizeConfig,
    VerifyConfig,
)
from santalo.logger import logger
from santalo.measure.schemas import RatioResult
from santalo.measure.service import (
    bound_constant,
    lp_ball_volume,
    product_with_error,
    santalo_ratio,
    volume,
)
from santalo.polar.schemas import PolarProblem
from santalo.polar.service import functional_polar, j_polar, verify_tuple_polarity
from santalo.schemas import (
    Diagnostic,
    McConfig,
    PolarityParams,
    SamplerCfg,
    Verdict,
)
from santalo.settings import settings
from santalo.symfun.service import big_S_batch
from santalo.utils.geometry import canonical_half, dedupe
from santalo.utils.parallel import ordered_map
from santalo.utils.rng import stream, unit_directions

UTC = _tz.utc  # datetime.UTC requires Python >= 3.11

SIGMAS = 3.0
CANDIDATE_SIGMAS = 5.0
INCLUSION_SLACK = 1e-8
MONOTONE_SLACK = 1e-9
LIFT_RTOL = 1e-6
TAIL_EXPONENT = 37.0
SMOOTH_STEPS = 8

# stream keys; case c of a campaign draws from stream(seed, key, c)
VERIFY_KEY, SYMMETRIZE_KEY, SEARCH_KEY, RADIAL_KEY, FUNCTIONAL_KEY = 10, 11, 12, 13, 14


# ---------------------------------------------------------------------------
# Shared plumbing
# ---------------------------------------------------------------------------


def refuse_degree_one(j: int) -> None:
    if j == 1:
        raise BlockedParameterError(
            "j = 1 campaigns are refused: the slab {|x_1 + ... + x_n| <= 1} taken in "
            "every slot satisfies E_1-polarity, so volume products are unbounded",
            {"j": 1},
        )


def mc_config(config: ExperimentConfig) -> McConfig:
    batch = settings.MC_BATCH if config.samples % settings.MC_BATCH == 0 else config.samples
    return McConfig(samples=config.samples, seed=config.seed, batch=batch)


def _summary(cases: list[CaseRecord]) -> dict:
    counts = {v.value: 0 for v in Verdict}
    for case in cases:
        counts[case.verdict.value] += 1
    ratios = [c.ratio for c in cases if c.ratio is not None and np.isfinite(c.ratio)]
    return {
        "cases": len(cases),
        "verdicts": counts,
        "violations": sum(1 for c in cases if c.asserted and c.verdict is Verdict.FAIL),
        "max_ratio": max(ratios) if ratios else None,
    }


def run_campaign(
    experiment: str,
    config: ExperimentConfig,
    run_case: Callable[[int], CaseRecord],
    count: int,
    extra: dict | None = None,
) -> ExperimentReport:
    started = datetime.now(UTC)
    t0 = time.perf_counter()
    log = logger.bind(experiment=experiment, seed=config.seed)
    log.info(f"{experiment}: {count} case(s), n={config.n}, k={config.k}, j={config.j}")
    cases = ordered_map(run_case, list(range(count)), config.workers)
    for case in cases:
        if case.verdict is Verdict.SKIPPED:
            log.warning(f"case {case.index} skipped: {[d.code for d in case.diagnostics]}")
        elif case.asserted and case.verdict is Verdict.FAIL:
            log.warning(f"case {case.index} violates an asserted bound")
        elif case.verdict is Verdict.CANDIDATE:
            log.warning(f"case {case.index} flagged as candidate, ratio {case.ratio}")
    summary = _summary(cases) | (extra or {})
    report = build_report(
        experiment, config, cases, summary, started, time.perf_counter() - t0
    )
    log.info(
        f"{experiment} done: {summary['verdicts']} in {report.wall_clock:.2f}s "
        f"(fingerprint {report.fingerprint[:12]})"
    )
    return report


def close_tuple(
    given: list[SymmetricPolytope], params: PolarityParams
) -> tuple[SymmetricPolytope | None, list[Diagnostic]]:
    """``j_polar`` on the last slot; ``None`` with diagnostics when unbounded or flat."""
    H = j_polar(PolarProblem(bodies=given, params=params))
    if H.bounded is not Boundedness.BOUNDED or H.degenerate:
        reason = "unbounded" if H.bounded is not Boundedness.BOUNDED else "flat"
        return None, [
            *H.diagnostics,
            Diagnostic(code="polar_skipped", message=f"completion is {reason}"),
        ]
    return H.to_polytope(label=f"K{params.k}"), []


def _ratio_fields(bodies: list, ratio: RatioResult) -> dict:
    return {
        "labels": [getattr(b, "label", "") for b in bodies],
        "volumes": [v.value for v in ratio.volumes],
        "stderrs": [v.stderr for v in ratio.volumes],
        "product": ratio.product,
        "ratio": ratio.value,
        "stderr": ratio.stderr,
    }


def _is_unconditional(P: SymmetricPolytope) -> bool:
    scale_ = max(1.0, float(np.abs(P.vertices).max()))
    return unconditional_defect(P) < settings.UNCONDITIONAL_DEFECT_TOL * scale_


# ---------------------------------------------------------------------------
# Volume-product campaigns
# ---------------------------------------------------------------------------


def _check_case(config: ExperimentConfig, case: CampaignCase) -> None:
    if case is CampaignCase.J_EQUALS_K and config.j != config.k:
        raise DomainError(f"case j=k needs j == k, got j={config.j}, k={config.k}")
    if case is CampaignCase.J_EVEN_MIXED and config.j % 2:
        raise DomainError(f"case j-even-mixed needs an even j, got {config.j}")


def unconditional_body(rng: np.random.Generator, n: int, m: int, label: str = ""):
    """A random symmetric polytope made unconditional by Steiner sweeps."""
    P = random_symmetric_polytope(rng, n, m, label)
    sweep = unconditionalize_sweep(P)
    body = sweep.body if sweep.unconditional else unconditionalize(P).body
    return body.with_label(label)


def draw_given(
    rng: np.random.Generator, case: CampaignCase, n: int, k: int, m: int
) -> list[SymmetricPolytope]:
    """Slots ``1..k-1`` of a tuple; slot ``k`` is left for ``j_polar``."""
    given = []
    for slot in range(k - 1):
        label = f"K{slot + 1}"
        if case is CampaignCase.UNCONDITIONAL or (
            case is CampaignCase.J_EVEN_MIXED and slot > 0
        ):
            given.append(unconditional_body(rng, n, m, label))
        else:
            given.append(random_symmetric_polytope(rng, n, m, label))
    return given


def evaluate_tuple(
    index: int,
    seed: int,
    given: list[SymmetricPolytope],
    params: PolarityParams,
    cfg: McConfig | None = None,
    tol: float = 1e-9,
    kind: str = "",
) -> CaseRecord:
    """Close the tuple, check polarity, then the ratio against 1 and ``bound_constant``."""
    n = given[0].n
    polar, diagnostics = close_tuple(given, params)
    if polar is None:
        return CaseRecord(
            index=index,
            seed=seed,
            kind=kind,
            labels=[b.label for b in given],
            verdict=Verdict.SKIPPED,
            diagnostics=diagnostics,
        )
    bodies = [*given, polar]
    polarity = verify_tuple_polarity(bodies, params)
    ratio = santalo_ratio(bodies, params.j, cfg)
    bound = bound_constant(n, params.j, params.k)
    limit = 1.0 + SIGMAS * ratio.stderr + tol
    within_bound = ratio.value <= bound * (1.0 + tol) + SIGMAS * ratio.stderr
    theorem_case = kind != CampaignCase.GENERAL.value
    if polarity.verdict is Verdict.FAIL:
        diagnostics += polarity.diagnostics
        verdict = Verdict.FAIL
    elif theorem_case:
        verdict = Verdict.PASS if ratio.value <= limit and within_bound else Verdict.FAIL
    else:
        verdict = Verdict.PASS if within_bound else Verdict.FAIL
        if ratio.value > limit:
            diagnostics.append(
                Diagnostic(
                    code="ratio_above_one",
                    message=f"ratio {ratio.value:.9g} exceeds 1 outside the proven cases",
                )
            )
    return CaseRecord(
        index=index,
        seed=seed,
        kind=kind,
        **_ratio_fields(bodies, ratio),
        verdict=verdict,
        witness=polarity.witness,
        metrics={"bound_constant": bound, "max_polarity": polarity.max_value},
        diagnostics=diagnostics,
    )


def cmd_verify_santalo(config: VerifyConfig) -> ExperimentReport:
    """Random tuples closed by ``j_polar``; theorem cases assert ratio <= 1."""
    refuse_degree_one(config.j)
    _check_case(config, config.case)
    params = PolarityParams(k=config.k, j=config.j)
    cfg = mc_config(config)

    def run_case(index: int) -> CaseRecord:
        rng = stream(config.seed, VERIFY_KEY, index)
        given = draw_given(rng, config.case, config.n, config.k, config.vertices)
        return evaluate_tuple(
            index, config.seed, given, params, cfg, config.tol, config.case.value
        )

    extra = {
        "case": config.case.value,
        "bound_constant": bound_constant(config.n, config.j, config.k),
    }
    return run_campaign("verify-santalo", config, run_case, config.tuples, extra)


# ---------------------------------------------------------------------------
# Symmetrization
# ---------------------------------------------------------------------------


@dataclass
class StepRecord:
    slot: int
    axis: int
    polar_before: float
    polar_after: float
    product_before: float
    product_after: float
    min_inclusion_slack: float | None = None
    heights_checked: int = 0
    heights_skipped: int = 0

    @property
    def monotone(self) -> bool:
        floor = self.product_before - MONOTONE_SLACK * max(1.0, self.product_before)
        return self.product_after >= floor

    @property
    def included(self) -> bool:
        return self.min_inclusion_slack is None or (
            self.min_inclusion_slack >= -INCLUSION_SLACK
        )


@dataclass
class ChainResult:
    steps: list[StepRecord] = field(default_factory=list)
    products: list[float] = field(default_factory=list)
    unconditional: bool = False

    @property
    def holds(self) -> bool:
        return all(s.monotone and s.included for s in self.steps)


def completed_polar(
    given: list[SymmetricPolytope], params: PolarityParams
) -> HalfspacePolytope:
    H = j_polar(PolarProblem(bodies=given, params=params))
    if H.bounded is not Boundedness.BOUNDED or H.degenerate:
        raise UnboundedBodyError("completion is unbounded or flat", {"k": params.k})
    return H


def fiber_inclusion(
    before: HalfspacePolytope, after: HalfspacePolytope, axis: int, heights
) -> tuple[float | None, int, int]:
    """Worst slack of ``((K(r) + K(-r)) / 2, r)`` inside ``after``.

    ``K(r)`` is the section of ``before`` at ``x_axis = r``; the Minkowski
    average is spanned by pairwise vertex midpoints. Empty sections are skipped.
    """
    worst, checked, skipped = None, 0, 0
    for r in heights:
        upper, lower = section(before, axis, r), section(before, axis, -r)
        if upper is None or lower is None:
            skipped += 1
            continue
        mid = 0.5 * (upper[:, None, :] + lower[None, :, :]).reshape(-1, upper.shape[1])
        points = np.insert(mid, axis, r, axis=1)
        slack = float(after.slack(points).min())
        worst = slack if worst is None else min(worst, slack)
        checked += 1
    return worst, checked, skipped


def _heights(P: SymmetricPolytope, axis: int, count: int, rng: np.random.Generator):
    top = float(P.vertices[:, axis].max())
    return np.sort(rng.uniform(0.0, 0.98 * top, size=count))


def symmetrization_step(
    given: list[SymmetricPolytope],
    polar: HalfspacePolytope,
    params: PolarityParams,
    slot: int,
    axis: int,
    heights: int,
    rng: np.random.Generator,
) -> tuple[list[SymmetricPolytope], HalfspacePolytope, StepRecord]:
    """Steiner-symmetrize ``given[slot]`` and recompute the completion."""
    new_given = list(given)
    new_given[slot] = steiner_symmetrize(given[slot], axis).with_label(given[slot].label)
    new_polar = completed_polar(new_given, params)
    before_body = polar.to_polytope()
    after_body = new_polar.to_polytope()
    step = StepRecord(
        slot=slot,
        axis=axis,
        polar_before=before_body.volume,
        polar_after=after_body.volume,
        product_before=prod(b.volume for b in given) * before_body.volume,
        product_after=prod(b.volume for b in new_given) * after_body.volume,
    )
    if given[0].n >= 2:
        worst, checked, skipped = fiber_inclusion(
            polar, new_polar, axis, _heights(before_body, axis, heights, rng)
        )
        step.min_inclusion_slack = worst
        step.heights_checked, step.heights_skipped = checked, skipped
    logger.debug(
        f"steiner slot={slot} axis={axis}: |polar| {step.polar_before:.10g} -> "
        f"{step.polar_after:.10g}"
    )
    return new_given, new_polar, step


def reduction_chain(
    given: list[SymmetricPolytope],
    params: PolarityParams,
    heights: int,
    sweeps: int,
    rng: np.random.Generator,
) -> ChainResult:
    """Symmetrize every given slot along axes ``n-1..0`` until all are unconditional."""
    polar = completed_polar(given, params)
    body = polar.to_polytope()
    result = ChainResult(products=[prod(b.volume for b in given) * body.volume])
    n = given[0].n
    for _ in range(sweeps):
        for slot in range(len(given)):
            for axis in reversed(range(n)):
                given, polar, step = symmetrization_step(
                    given, polar, params, slot, axis, heights, rng
                )
                result.steps.append(step)
                result.products.append(step.product_after)
        if all(_is_unconditional(b) for b in given):
            result.unconditional = True
            break
    return result


def cmd_symmetrize_experiment(config: SymmetrizeConfig) -> ExperimentReport:
    """Volume monotonicity and fiber inclusion along Steiner reduction chains."""
    refuse_degree_one(config.j)
    _check_case(config, config.case)
    params = PolarityParams(k=config.k, j=config.j)
    tail = (
        random_unconditional_polytope
        if config.case is CampaignCase.J_EVEN_MIXED
        else random_symmetric_polytope
    )

    def run_case(index: int) -> CaseRecord:
        rng = stream(config.seed, SYMMETRIZE_KEY, index)
        given = [random_symmetric_polytope(rng, config.n, config.vertices, "K1")]
        given += [
            tail(rng, config.n, config.vertices, f"K{slot + 2}")
            for slot in range(config.k - 2)
        ]
        try:
            chain = reduction_chain(given, params, config.heights, config.sweeps, rng)
        except UnboundedBodyError as exc:
            return CaseRecord(
                index=index,
                seed=config.seed,
                kind=config.case.value,
                verdict=Verdict.SKIPPED,
                diagnostics=[Diagnostic(code=exc.code, message=exc.message)],
            )
        slacks = [
            s.min_inclusion_slack
            for s in chain.steps
            if s.min_inclusion_slack is not None
        ]
        increments = np.diff(chain.products)
        diagnostics = []
        if not chain.unconditional:
            diagnostics.append(
                Diagnostic(
                    code="not_unconditional",
                    message=f"chain stopped after {config.sweeps} sweep(s)",
                )
            )
        return CaseRecord(
            index=index,
            seed=config.seed,
            kind=config.case.value,
            labels=[b.label for b in given],
            product=chain.products[-1],
            verdict=Verdict.PASS if chain.holds else Verdict.FAIL,
            metrics={
                "steps": float(len(chain.steps)),
                "min_increment": float(increments.min()) if increments.size else 0.0,
                "min_inclusion_slack": min(slacks) if slacks else 0.0,
                "heights_checked": float(sum(s.heights_checked for s in chain.steps)),
                "heights_skipped": float(sum(s.heights_skipped for s in chain.steps)),
            },
            series=chain.products,
            diagnostics=diagnostics,
        )

    return run_campaign(
        "symmetrize", config, run_case, config.tuples, {"case": config.case.value}
    )


# ---------------------------------------------------------------------------
# Counterexample search
# ---------------------------------------------------------------------------


@dataclass
class SearchState:
    given: list[SymmetricPolytope]
    ratio: float
    stderr: float
    best_given: list[SymmetricPolytope]
    best_ratio: float
    best_stderr: float
    temperature: float
    rng: np.random.Generator
    accepted: int = 0
    rejected: int = 0
    history: list[float] = field(default_factory=list)


def perturb(
    P: SymmetricPolytope, rng: np.random.Generator, step: float
) -> SymmetricPolytope:
    """Move one ``±`` vertex pair by a Gaussian step."""
    half = dedupe(canonical_half(P.vertices))
    i = int(rng.integers(len(half)))
    half[i] = half[i] + step * rng.standard_normal(P.n)
    return hull_reduce(half, label=P.label)


def score_tuple(
    given: list[SymmetricPolytope], params: PolarityParams, cfg: McConfig | None = None
) -> RatioResult | None:
    """Ratio of the closed tuple, or ``None`` unless the tuple passes polarity."""
    if any(b.degenerate for b in given):
        return None
    polar, _ = close_tuple(given, params)
    if polar is None:
        return None
    bodies = [*given, polar]
    if verify_tuple_polarity(bodies, params).verdict is not Verdict.PASS:
        return None
    return santalo_ratio(bodies, params.j, cfg)


def _search_start(
    config: SearchConfig, rng: np.random.Generator
) -> list[SymmetricPolytope]:
    if config.start == "lp-ball":
        P = lp_ball_polytope(config.n, config.j, config.resolution)
        return [P.with_label(f"K{slot + 1}") for slot in range(config.k - 1)]
    return [
        random_symmetric_polytope(rng, config.n, config.vertices, f"K{slot + 1}")
        for slot in range(config.k - 1)
    ]


def anneal(
    state: SearchState, params: PolarityParams, config: SearchConfig, cfg: McConfig
) -> SearchState:
    for _ in range(config.steps):
        slot = int(state.rng.integers(len(state.given)))
        proposal = list(state.given)
        proposal[slot] = perturb(state.given[slot], state.rng, config.step_size)
        scored = score_tuple(proposal, params, cfg)
        u = float(state.rng.uniform())
        if scored is None:
            state.rejected += 1
        else:
            delta = scored.value - state.ratio
            accept = delta >= 0 or (
                state.temperature > 0 and u < np.exp(delta / state.temperature)
            )
            if accept:
                state.given = proposal
                state.ratio, state.stderr = scored.value, scored.stderr
                state.accepted += 1
                if scored.value > state.best_ratio:
                    state.best_given = proposal
                    state.best_ratio, state.best_stderr = scored.value, scored.stderr
            else:
                state.rejected += 1
        state.temperature *= config.cooling
        state.history.append(state.best_ratio)
    return state


def reverify(
    given: list[SymmetricPolytope], params: PolarityParams, config: SearchConfig
) -> RatioResult | None:
    """Rebuild the tuple from its vertices and rescore with 10x the samples."""
    rebuilt = [hull_reduce(b.vertices, label=b.label) for b in given]
    samples = 10 * config.samples
    cfg = McConfig(samples=samples, seed=config.seed + 1, batch=samples // 10)
    return score_tuple(rebuilt, params, cfg)


def cmd_search_counterexample(config: SearchConfig) -> ExperimentReport:
    """Simulated annealing on vertex perturbations of the first ``k - 1`` slots.

    A ratio above ``1 + 5 stderr`` is re-verified before the case is flagged
    CANDIDATE; nothing here asserts the inequality false.
    """
    refuse_degree_one(config.j)
    if config.j >= config.k:
        raise DomainError(
            f"j={config.j} >= k={config.k} is a proven case; the search targets j < k"
        )
    params = PolarityParams(k=config.k, j=config.j)
    cfg = mc_config(config)

    def run_case(index: int) -> CaseRecord:
        rng = stream(config.seed, SEARCH_KEY, index)
        given = _search_start(config, rng)
        scored = score_tuple(given, params, cfg)
        if scored is None:
            return CaseRecord(
                index=index,
                seed=config.seed,
                kind="search",
                asserted=False,
                verdict=Verdict.SKIPPED,
                diagnostics=[Diagnostic(code="bad_start", message="start tuple rejected")],
            )
        state = SearchState(
            given=given,
            ratio=scored.value,
            stderr=scored.stderr,
            best_given=given,
            best_ratio=scored.value,
            best_stderr=scored.stderr,
            temperature=config.temperature,
            rng=rng,
            history=[scored.value],
        )
        state = anneal(state, params, config, cfg)

        verdict, diagnostics = Verdict.PASS, []
        level = 1.0 + CANDIDATE_SIGMAS * state.best_stderr + config.tol
        if state.best_ratio > level:
            check = reverify(state.best_given, params, config)
            again = check is not None and check.value > (
                1.0 + CANDIDATE_SIGMAS * check.stderr + config.tol
            )
            if again:
                verdict = Verdict.CANDIDATE
            else:
                diagnostics.append(
                    Diagnostic(
                        code="candidate_rejected",
                        message="re-verification did not confirm the excess",
                    )
                )
        best = state.best_given
        return CaseRecord(
            index=index,
            seed=config.seed,
            kind="search",
            labels=[b.label for b in best],
            ratio=state.best_ratio,
            stderr=state.best_stderr,
            asserted=False,
            verdict=verdict,
            witness=[row for b in best for row in canonical_half(b.vertices).tolist()],
            metrics={
                "start_ratio": state.history[0],
                "accepted": float(state.accepted),
                "rejected": float(state.rejected),
            },
            series=state.history,
            diagnostics=diagnostics,
        )

    extra = {"start": config.start}
    return run_campaign("search", config, run_case, config.restarts, extra)


# ---------------------------------------------------------------------------
# Radial-function condition
# ---------------------------------------------------------------------------


def radial_condition_values(bodies: list, U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Radial condition ``Π r_i(u_i) (Σ_l Π_i |u_i(l)|^{2/k})^{k/2}`` and ``S_{k,2/k}``
    at the boundary points ``r_i(u_i) u_i``.

    ``U`` has shape ``(T, k, n)`` of unit vectors. The second array equals the
    first raised to ``2/k``.
    """
    k = len(bodies)
    R = np.stack([radial_many(body, U[:, i]) for i, body in enumerate(bodies)], axis=1)
    weights = np.prod(np.abs(U) ** (2.0 / k), axis=1).sum(axis=1)
    lhs = np.prod(R, axis=1) * weights ** (k / 2.0)
    S = big_S_batch(R[:, :, None] * U, k, absolute=True, p=2.0 / k)
    return lhs, S


def _radial_directions(rng: np.random.Generator, k: int, n: int, count: int) -> np.ndarray:
    """Independent tuples, aligned tuples and the coordinate axes."""
    independent = np.stack([unit_directions(rng, count, n) for _ in range(k)], axis=1)
    shared = unit_directions(rng, count, n)
    axes = np.vstack([np.eye(n), -np.eye(n)])
    aligned = np.repeat(np.vstack([shared, axes])[:, None, :], k, axis=1)
    return np.concatenate([independent, aligned])


def cmd_radial_condition_check(config: RadialConfig) -> ExperimentReport:
    """Radial-function condition, its ``S_{k,2/k}`` form, and ``Π|K_i| <= |B_2^n|^k``."""
    k, n = config.k, config.n
    reference = lp_ball_volume(n, 2) ** k
    cfg = mc_config(config)

    def run_case(index: int) -> CaseRecord:
        rng = stream(config.seed, RADIAL_KEY, index)
        if config.corpus == "ball":
            bodies = [make_lp_ball(n, 2, config.scale) for _ in range(k)]
        else:
            bodies = [
                random_symmetric_polytope(rng, n, config.vertices, f"K{i + 1}")
                for i in range(k)
            ]
        U = _radial_directions(rng, k, n, config.directions)
        lhs, S = radial_condition_values(bodies, U)
        diagnostics = []
        if config.corpus == "polytopes":
            # rescale so that the condition is tight on the sampled directions
            lam = float(lhs.max()) ** (-1.0 / k) * config.scale
            bodies = [scale(b, lam, label=b.label) for b in bodies]
            lhs, S = radial_condition_values(bodies, U)
        worst = int(np.argmax(lhs))
        agree = bool(np.all((lhs <= 1.0 + config.tol) == (S <= 1.0 + config.tol)))
        gap = float(np.max(np.abs(S - lhs ** (2.0 / k))))
        if not agree:
            diagnostics.append(
                Diagnostic(code="forms_disagree", message=f"forms differ by {gap:.3e}")
            )
        metrics = {"max_condition": float(lhs.max()), "form_gap": gap}
        witness = U[worst].tolist()
        if lhs[worst] > 1.0 + config.tol:
            return CaseRecord(
                index=index,
                seed=config.seed,
                kind=config.corpus,
                labels=[b.label for b in bodies],
                asserted=False,
                verdict=Verdict.FAIL,
                witness=witness,
                metrics=metrics,
                diagnostics=[
                    *diagnostics,
                    Diagnostic(
                        code="condition_fails",
                        message=f"radial condition reaches {lhs[worst]:.9g} > 1",
                    ),
                ],
            )
        volumes = [
            volume(b, cfg, key=i, oracle_method="analytic") for i, b in enumerate(bodies)
        ]
        product, stderr = product_with_error(volumes)
        ok = product <= reference * (1.0 + config.tol) + SIGMAS * stderr
        return CaseRecord(
            index=index,
            seed=config.seed,
            kind=config.corpus,
            labels=[b.label for b in bodies],
            volumes=[v.value for v in volumes],
            stderrs=[v.stderr for v in volumes],
            product=product,
            ratio=product / reference,
            stderr=stderr / reference,
            verdict=Verdict.PASS if ok and agree else Verdict.FAIL,
            witness=witness,
            metrics=metrics,
            diagnostics=diagnostics,
        )

    extra = {"corpus": config.corpus, "reference": reference}
    return run_campaign("radial-check", config, run_case, config.tuples, extra)


# ---------------------------------------------------------------------------
# Functional suite
# ---------------------------------------------------------------------------


def _coarse(f: GridFunction) -> GridFunction:
    sub = f.values[(slice(None, None, 2),) * f.n]
    return GridFunction(sub, f.L, 2.0 * f.h, even=f.even)


def mass_with_error(f: GridFunction) -> tuple[float, float]:
    """Lattice mass and its difference from the mass on the ``2h`` sublattice."""
    mass = f.mass()
    if f.M % 2:
        return mass, 0.0
    return mass, abs(mass - _coarse(f).mass())


def exponential_family(
    rng: np.random.Generator, n: int, j: int, k: int, steps: int
) -> list[GridFunction]:
    """Even log-concave ``exp(-(C/k) Σ_l a_{i,l} |x_l|^j)``, polar w.r.t. ``e^{-t}``.

    For ``j = k`` the products ``Π_i a_{i,l}`` are at least 1 (AM-GM per
    coordinate); otherwise ``a_{i,l} = s_i >= 1``, below the AM-GM majorant.
    """
    C = comb(k, j)
    if j == k:
        logs = 0.5 * rng.standard_normal((k, n))
        logs -= logs.mean(axis=0)
        logs[0] += np.abs(0.3 * rng.standard_normal(n))
    else:
        logs = np.repeat(np.abs(0.3 * rng.standard_normal((k, 1))), n, axis=1)
    a = np.exp(logs)
    L = (TAIL_EXPONENT * k / (C * float(a.min()))) ** (1.0 / j)
    h = L / steps
    return [
        GridFunction.from_callable(
            lambda X, w=w: np.exp(-(C / k) * (np.abs(X) ** j) @ w),
            n,
            L,
            h,
            label=f"f{i + 1}",
        )
        for i, w in enumerate(a)
    ]


def _inequality_case(
    index: int,
    config: FunctionalConfig,
    kind: str,
    fs: list[GridFunction],
    rho: RhoFunction,
    asserted: bool,
    sampler: SamplerCfg,
) -> CaseRecord:
    params = PolarityParams(k=len(fs), j=config.j)
    polarity = check_function_polarity(fs, rho, params, sampler, workers=1)
    masses = [mass_with_error(f) for f in fs]
    lhs = float(prod(m for m, _ in masses))
    err = lhs * sum(e / m for m, e in masses if m > 0)
    rhs = conjectured_rhs(rho, config.n, config.j, len(fs))
    ok = lhs <= rhs.value * (1.0 + config.tol) + SIGMAS * (err + rhs.abserr)
    if polarity.verdict is Verdict.FAIL:
        verdict = Verdict.FAIL
    elif ok:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL if asserted else Verdict.INCONCLUSIVE
    return CaseRecord(
        index=index,
        seed=config.seed,
        kind=kind,
        labels=[f.label for f in fs],
        volumes=[m for m, _ in masses],
        stderrs=[e for _, e in masses],
        product=lhs,
        ratio=lhs / rhs.value,
        stderr=(err + rhs.abserr) / rhs.value,
        asserted=asserted,
        verdict=verdict,
        metrics={"rhs": rhs.value, "max_polarity_ratio": polarity.max_value},
        diagnostics=polarity.diagnostics + rhs.diagnostics,
    )


def indicator_case(index: int, config: FunctionalConfig) -> CaseRecord:
    """Lift an unconditional body tuple; the verdict must match the body-level one."""
    rng = stream(config.seed, FUNCTIONAL_KEY, 0, index)
    params = PolarityParams(k=config.k, j=config.j)
    given = draw_given(rng, CampaignCase.UNCONDITIONAL, config.n, config.k, config.vertices)
    polar, diagnostics = close_tuple(given, params)
    if polar is None:
        return CaseRecord(
            index=index,
            seed=config.seed,
            kind="indicator",
            verdict=Verdict.SKIPPED,
            diagnostics=diagnostics,
        )
    bodies = [*given, polar]
    L, h = default_lattice(bodies, config.grid_steps)
    fs, rho = lift_from_bodies(bodies, config.j, L, h)
    sampler = SamplerCfg(seed=config.seed)
    polarity = check_function_polarity(fs, rho, params, sampler, workers=1)
    lhs = functional_product(fs)
    rhs = conjectured_rhs(rho, config.n, config.j, config.k)
    body_ratio = santalo_ratio(bodies, config.j)
    lift_gap = abs(lhs / body_ratio.product - 1.0)
    ok = lhs <= rhs.value * (1.0 + config.tol) + SIGMAS * rhs.abserr
    same = ok == (body_ratio.value <= 1.0 + config.tol)
    if lift_gap > LIFT_RTOL or not same:
        diagnostics.append(
            Diagnostic(
                code="lift_mismatch",
                message=f"functional and body products differ by {lift_gap:.3e}",
            )
        )
    passed = ok and same and lift_gap <= LIFT_RTOL and polarity.verdict is not Verdict.FAIL
    return CaseRecord(
        index=index,
        seed=config.seed,
        kind="indicator",
        labels=[b.label for b in bodies],
        volumes=[f.mass() for f in fs],
        product=lhs,
        ratio=lhs / rhs.value,
        verdict=Verdict.PASS if passed else Verdict.FAIL,
        metrics={
            "rhs": rhs.value,
            "body_ratio": body_ratio.value,
            "lift_gap": lift_gap,
            "max_polarity_ratio": polarity.max_value,
        },
        diagnostics=diagnostics + polarity.diagnostics,
    )


def exponential_case(index: int, config: FunctionalConfig) -> CaseRecord:
    rng = stream(config.seed, FUNCTIONAL_KEY, 1, index)
    fs = exponential_family(rng, config.n, config.j, config.k, config.grid_steps)
    return _inequality_case(
        index,
        config,
        "exponential",
        fs,
        RhoFunction.exponential(),
        True,
        SamplerCfg(seed=config.seed),
    )


def smooth_case(index: int, config: FunctionalConfig) -> CaseRecord:
    """Random unconditional exponentials completed by the lattice polar.

    The completion is a lattice minimum, so the verdict is reported without
    being asserted.
    """
    rng = stream(config.seed, FUNCTIONAL_KEY, 2, index)
    steps = min(config.grid_steps, SMOOTH_STEPS) if config.k > 2 else config.grid_steps
    steps += steps % 2
    C = comb(config.k, config.j)
    a = np.exp(0.4 * rng.standard_normal((config.k - 1, config.n)))
    L = (TAIL_EXPONENT * config.k / (C * float(a.min()))) ** (1.0 / config.j)
    given = [
        GridFunction.from_callable(
            lambda X, w=w: np.exp(-(C / config.k) * (np.abs(X) ** config.j) @ w),
            config.n,
            L,
            L / steps,
            label=f"f{i + 1}",
        )
        for i, w in enumerate(a)
    ]
    rho = RhoFunction.exponential()
    try:
        last = functional_polar(given, rho, config.j, workers=1)
    except UnboundedBodyError as exc:
        return CaseRecord(
            index=index,
            seed=config.seed,
            kind="smooth",
            asserted=False,
            verdict=Verdict.SKIPPED,
            diagnostics=[Diagnostic(code=exc.code, message=exc.message)],
        )
    fs = [*given, last.with_values(last.values, label=f"f{config.k}")]
    return _inequality_case(
        index, config, "smooth", fs, rho, False, SamplerCfg(seed=config.seed)
    )


def ball_case(index: int, config: FunctionalConfig) -> CaseRecord:
    """Gaussian polar pair ``exp(-<a x, x>/2)``, ``exp(-<a^{-1} y, y>/2)`` (k = j = 2)."""
    rng = stream(config.seed, FUNCTIONAL_KEY, 3, index)
    n = config.n
    a = np.exp(0.3 * rng.standard_normal(n))
    L = float(np.sqrt(2.0 * TAIL_EXPONENT * max(a.max(), 1.0 / a.min())))
    steps = config.grid_steps + config.grid_steps % 2
    fs = [
        GridFunction.from_callable(
            lambda X, w=w: np.exp(-0.5 * (X**2) @ w), n, L, L / steps, label=label
        )
        for w, label in ((a, "gauss"), (1.0 / a, "gauss dual"))
    ]
    value = functional_ball_min(fs, 2, restarts=2, seed=config.seed)
    rhs = ball_rhs(RhoFunction.exponential(), n, 2, 2)
    ok = value.value <= rhs * (1.0 + config.tol) + SIGMAS * value.error_estimate
    return CaseRecord(
        index=index,
        seed=config.seed,
        kind="ball",
        labels=[f.label for f in fs],
        product=value.value,
        ratio=value.value / rhs,
        stderr=value.error_estimate / rhs,
        verdict=Verdict.PASS if ok else Verdict.FAIL,
        metrics={"rhs": rhs},
        diagnostics=value.diagnostics,
    )


FUNCTIONAL_CHECKS = {
    "indicator": indicator_case,
    "exponential": exponential_case,
    "smooth": smooth_case,
    "ball": ball_case,
}


def cmd_functional_suite(config: FunctionalConfig) -> ExperimentReport:
    """Indicator lifts, exponential families, lattice completions and ball-functional cases."""
    refuse_degree_one(config.j)
    plan = [(check, i) for check in config.checks for i in range(config.tuples)]

    def run_case(index: int) -> CaseRecord:
        check, i = plan[index]
        case = FUNCTIONAL_CHECKS[check](i, config)
        return case.model_copy(update={"index": index})

    extra = {"checks": list(config.checks)}
    return run_campaign("functional", config, run_case, len(plan), extra)
