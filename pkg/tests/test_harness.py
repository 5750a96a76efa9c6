import numpy as np
import pytest
from pydantic import ValidationError

from santalo.bodies.models import SymmetricPolytope
from santalo.bodies.service import unconditional_defect
from santalo.errors import BlockedParameterError, DomainError
from santalo.harness.corpus import random_symmetric_polytope, random_unconditional_polytope
from santalo.harness.report import load_report, write_report
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
from santalo.harness.service import (
    cmd_functional_suite,
    cmd_radial_condition_check,
    cmd_search_counterexample,
    cmd_symmetrize_experiment,
    cmd_verify_santalo,
    completed_polar,
    evaluate_tuple,
    reduction_chain,
    refuse_degree_one,
    symmetrization_step,
)
from santalo.schemas import PolarityParams, Verdict
from santalo.utils.rng import stream

SMALL = {"samples": 1_000, "seed": 11}


def report_with(*cases: CaseRecord) -> ExperimentReport:
    return ExperimentReport(
        experiment="unit", experiment_id="unit-0", config={}, cases=list(cases)
    )


class TestExitCodes:
    def test_clean_run(self):
        assert report_with(CaseRecord(index=0, seed=0, verdict=Verdict.PASS)).exit_code == 0

    def test_asserted_failure_wins(self):
        report = report_with(
            CaseRecord(index=0, seed=0, verdict=Verdict.CANDIDATE, asserted=False),
            CaseRecord(index=1, seed=0, verdict=Verdict.FAIL),
        )
        assert report.violations == 1
        assert report.exit_code == 2

    def test_candidate(self):
        report = report_with(
            CaseRecord(index=0, seed=0, verdict=Verdict.CANDIDATE, asserted=False)
        )
        assert report.exit_code == 3

    def test_unasserted_failure_is_not_a_violation(self):
        report = report_with(
            CaseRecord(index=0, seed=0, verdict=Verdict.FAIL, asserted=False)
        )
        assert report.exit_code == 0


class TestConfigs:
    def test_degree_above_slot_count(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(k=3, j=4)

    def test_symmetrize_case_restriction(self):
        with pytest.raises(ValidationError):
            SymmetrizeConfig(case=CampaignCase.UNCONDITIONAL)

    def test_samples_floor(self):
        with pytest.raises(ValidationError):
            VerifyConfig(samples=10)

    def test_degree_one_is_refused(self):
        with pytest.raises(BlockedParameterError):
            refuse_degree_one(1)
        with pytest.raises(BlockedParameterError) as info:
            cmd_verify_santalo(VerifyConfig(k=3, j=1, **SMALL))
        assert info.value.code == "blocked_parameter"

    def test_case_must_match_parameters(self):
        with pytest.raises(DomainError):
            cmd_verify_santalo(VerifyConfig(case=CampaignCase.J_EQUALS_K, k=3, j=2, **SMALL))


class TestCorpus:
    def test_draws_are_reproducible(self):
        a = random_symmetric_polytope(stream(5, 0), 2, 6)
        b = random_symmetric_polytope(stream(5, 0), 2, 6)
        np.testing.assert_array_equal(a.vertices, b.vertices)

    def test_unconditional_draw(self):
        P = random_unconditional_polytope(stream(5, 1), 3, 4)
        assert unconditional_defect(P) == pytest.approx(0.0, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            random_symmetric_polytope(stream(5, 2), 3, 2)


class TestTuples:
    def test_square_closes_to_diamond(self, square):
        case = evaluate_tuple(0, 0, [square], PolarityParams(k=2, j=2), kind="unconditional")
        assert case.verdict is Verdict.PASS
        assert case.product == pytest.approx(8.0)
        assert case.ratio == pytest.approx(8.0 / np.pi**2)

    def test_interval_family_has_ratio_one(self):
        given = [SymmetricPolytope(np.array([[a], [-a]])) for a in (0.5, 3.0)]
        case = evaluate_tuple(0, 0, given, PolarityParams(k=3, j=3), kind="j=k")
        assert case.verdict is Verdict.PASS
        assert case.ratio == pytest.approx(1.0)


class TestSymmetrization:
    def test_single_step_on_sheared_square(self, sheared_square):
        params = PolarityParams(k=2, j=2)
        polar = completed_polar([sheared_square], params)
        _, new_polar, step = symmetrization_step(
            [sheared_square], polar, params, 0, 1, 6, stream(1, 0)
        )
        assert step.polar_before == pytest.approx(2.0)
        assert step.polar_after == pytest.approx(20.0 / 9.0)
        assert step.product_after == pytest.approx(80.0 / 9.0)
        assert step.monotone
        assert step.included
        assert step.heights_checked > 0

    def test_reduction_chain(self, sheared_square):
        chain = reduction_chain(
            [sheared_square], PolarityParams(k=2, j=2), 4, 2, stream(1, 1)
        )
        assert chain.holds
        assert chain.unconditional
        assert all(np.diff(chain.products) >= -1e-9)


class TestCampaigns:
    def test_verify_campaign_is_reproducible(self, tmp_path):
        config = VerifyConfig(n=2, k=2, j=2, tuples=2, vertices=5, **SMALL)
        first = cmd_verify_santalo(config)
        second = cmd_verify_santalo(config)
        assert first.exit_code == 0
        assert first.summary["cases"] == 2
        assert first.fingerprint == second.fingerprint
        assert first.experiment_id.startswith("verify-santalo-")
        json_path, csv_path = write_report(first, tmp_path)
        assert load_report(json_path).fingerprint == first.fingerprint
        assert csv_path.read_text().splitlines()[0].startswith("index,seed,verdict")

    def test_verify_three_slots(self):
        config = VerifyConfig(n=2, k=3, j=2, tuples=1, vertices=4, **SMALL)
        report = cmd_verify_santalo(config)
        assert report.violations == 0

    def test_symmetrize_campaign(self):
        config = SymmetrizeConfig(
            n=2, k=2, j=2, tuples=2, vertices=5, heights=4, sweeps=2, **SMALL
        )
        report = cmd_symmetrize_experiment(config)
        assert report.violations == 0
        assert all(len(case.series) > 1 for case in report.cases)

    def test_search_refuses_proven_range(self):
        with pytest.raises(DomainError):
            cmd_search_counterexample(SearchConfig(k=2, j=2, **SMALL))

    def test_small_search(self):
        config = SearchConfig(n=2, k=3, j=2, steps=3, restarts=1, vertices=5, **SMALL)
        report = cmd_search_counterexample(config)
        assert report.violations == 0
        assert all(not case.asserted for case in report.cases)
        assert report.exit_code in (0, 3)

    def test_radial_check_on_balls(self):
        config = RadialConfig(corpus="ball", n=2, k=2, j=2, tuples=1, directions=50, **SMALL)
        report = cmd_radial_condition_check(config)
        assert report.exit_code == 0
        case = report.cases[0]
        assert case.ratio == pytest.approx(1.0)
        assert case.metrics["max_condition"] == pytest.approx(1.0)

    def test_radial_check_on_rescaled_polytopes(self):
        config = RadialConfig(
            corpus="polytopes", n=2, k=2, j=2, tuples=2, vertices=6, directions=400, **SMALL
        )
        report = cmd_radial_condition_check(config)
        assert report.violations == 0
        for case in report.cases:
            assert case.metrics["max_condition"] == pytest.approx(1.0)

    def test_inflated_balls_fail_at_aligned_directions(self):
        config = RadialConfig(
            corpus="ball", n=2, k=2, j=2, tuples=1, scale=1.05, directions=50, **SMALL
        )
        report = cmd_radial_condition_check(config)
        case = report.cases[0]
        assert case.verdict is Verdict.FAIL
        assert not case.asserted
        assert case.metrics["max_condition"] == pytest.approx(1.05**2)
        assert "condition_fails" in [d.code for d in case.diagnostics]
        first, second = np.abs(case.witness[0]), np.abs(case.witness[1])
        np.testing.assert_allclose(first, second)
        assert report.violations == 0
        assert report.exit_code == 0

    def test_inflated_polytopes_fail(self):
        config = RadialConfig(
            corpus="polytopes",
            n=2,
            k=2,
            j=2,
            tuples=1,
            vertices=6,
            scale=1.05,
            directions=400,
            **SMALL,
        )
        report = cmd_radial_condition_check(config)
        case = report.cases[0]
        assert case.verdict is Verdict.FAIL
        assert case.metrics["max_condition"] == pytest.approx(1.05**2)
        assert case.witness is not None

    def test_functional_suite(self):
        config = FunctionalConfig(
            n=2,
            k=2,
            j=2,
            tuples=1,
            vertices=4,
            checks=["indicator", "exponential"],
            grid_steps=8,
            **SMALL,
        )
        report = cmd_functional_suite(config)
        assert report.violations == 0
        assert [case.kind for case in report.cases] == ["indicator", "exponential"]
        assert [case.index for case in report.cases] == [0, 1]

    @pytest.mark.slow
    def test_functional_ball_campaign(self):
        config = FunctionalConfig(
            n=2, k=2, j=2, tuples=1, checks=["ball"], grid_steps=16, **SMALL
        )
        report = cmd_functional_suite(config)
        assert report.exit_code == 0
