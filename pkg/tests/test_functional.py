import numpy as np
import pytest

from santalo.bodies.service import cube, scale
from santalo.errors import DomainError, NonMonotoneRhoError
from santalo.functional.models import (
    GridFunction,
    IndicatorGrid,
    RhoFunction,
    Table1D,
    regularize,
)
from santalo.functional.service import (
    check_function_polarity,
    conjectured_rhs,
    direct_rhs,
    full_space_from_orthants,
    functional_product,
    layer_cake_pipeline,
    lift_from_bodies,
    prekopa_leindler_check,
    relaxed_bound_check,
    weighted_orthant_check,
)
from santalo.measure.service import lp_ball_volume
from santalo.schemas import PolarityParams, Verdict


def gaussian(a: float):
    return lambda X: np.exp(-a * np.sum(X**2, axis=1))


def positive_half(a: float):
    return lambda X: np.where(X[:, 0] >= 0, np.exp(-a * X[:, 0] ** 2), 0.0)


class TestRho:
    def test_exponential_inverse(self):
        rho = RhoFunction.exponential(2.0)
        assert rho(0.0) == pytest.approx(2.0)
        assert rho.inverse(2.0 * np.exp(-3.0)) == pytest.approx(3.0)
        assert rho.inverse(0.0) == np.inf

    def test_indicator_profile(self):
        rho = RhoFunction.indicator(C=3.0)
        assert rho(-0.1) == np.inf
        assert rho(3.0) == 1.0
        assert rho(3.1) == 0.0
        assert rho.inverse(0.5) == 3.0

    def test_table_must_be_nonincreasing(self):
        with pytest.raises(NonMonotoneRhoError):
            RhoFunction.table([0.0, 1.0, 2.0], [3.0, 1.0, 2.0])

    def test_table_inverse(self):
        rho = RhoFunction.table([0.0, 1.0, 2.0], [2.0, 1.0, 0.0])
        assert rho.inverse(1.5) == pytest.approx(0.5)
        assert rho.inverse(0.0) == np.inf

    def test_regularized_profile_is_strictly_decreasing(self):
        rho = RhoFunction.exponential().regularized(1e-3)
        t = np.linspace(0.0, 5.0, 200)
        assert np.all(np.diff(rho(t)) < 0)
        assert rho(rho.inverse(0.5)) == pytest.approx(0.5, rel=1e-6)
        t = np.array([0.0, 1.0, 4.0])
        np.testing.assert_allclose(regularize(RhoFunction.exponential(), 1e-3)(t), rho(t))


class TestGridFunction:
    def test_even_flag_is_enforced(self):
        with pytest.raises(DomainError):
            GridFunction(np.array([0.0, 1.0, 2.0]), L=1.0, h=1.0)

    def test_gaussian_mass(self):
        f = GridFunction.from_callable(gaussian(0.5), 2, 8.0, 0.125)
        assert f.mass() == pytest.approx(2 * np.pi, rel=1e-8)
        assert f.moment(0, 2) == pytest.approx(2 * np.pi, rel=1e-6)

    def test_indicator_grid_uses_exact_integrals(self, square):
        f = IndicatorGrid.from_body(square, 2.0, 0.5)
        assert f.mass() == pytest.approx(4.0)
        assert f.moment(0, 2) == pytest.approx(4.0 / 3.0)
        assert f.lattice_mass() != pytest.approx(4.0)


class TestRightHandSides:
    @pytest.mark.parametrize("n, j, k", [(2, 2, 2), (2, 2, 3), (3, 2, 2), (1, 3, 3)])
    def test_indicator_profile_gives_ball_power(self, n, j, k):
        from math import comb

        rho = RhoFunction.indicator(C=float(comb(k, j)))
        result = conjectured_rhs(rho, n, j, k)
        assert result.value == pytest.approx(lp_ball_volume(n, j) ** k)

    def test_exponential_profile(self):
        rho = RhoFunction.exponential()
        result = conjectured_rhs(rho, 2, 2, 2)
        assert result.value == pytest.approx(4 * np.pi**2, rel=1e-7)
        assert direct_rhs(rho, 2, 2, 2, L=8.0, h=0.1) == pytest.approx(
            4 * np.pi**2, rel=1e-6
        )

    def test_heavy_power_profile_diverges(self):
        result = conjectured_rhs(RhoFunction.power(alpha=1.0), 2, 2, 2)
        assert result.value == np.inf
        assert result.diagnostics[0].code == "divergent"


class TestPolarity:
    def test_lift_of_square_and_diamond(self, square, diamond):
        fs, rho = lift_from_bodies([square, diamond], 2)
        assert functional_product(fs) == pytest.approx(8.0)
        assert rho.params["C"] == 1.0

    def test_lifted_indicators_are_polar(self, square, diamond):
        fs, rho = lift_from_bodies([square, diamond], 2, L=2.0, h=0.25)
        verdict = check_function_polarity(fs, rho, PolarityParams(k=2, j=2))
        assert verdict.verdict is Verdict.PASS
        assert verdict.method == "exact"

    def test_enlarged_indicator_is_not_polar(self, diamond):
        fs, rho = lift_from_bodies([scale(cube(2), 1.5), diamond], 2, L=2.0, h=0.25)
        verdict = check_function_polarity(fs, rho, PolarityParams(k=2, j=2))
        assert verdict.verdict is Verdict.FAIL
        assert verdict.max_value == np.inf
        x, y = (np.array(w) for w in verdict.witness)
        assert float(x @ y) > 1.0

    def test_gaussian_pair_is_polar_for_exponential(self):
        f = GridFunction.from_callable(gaussian(0.5), 1, 4.0, 0.125)
        verdict = check_function_polarity(
            [f, f], RhoFunction.exponential(), PolarityParams(k=2, j=2)
        )
        assert verdict.verdict is Verdict.PASS
        assert verdict.max_value == pytest.approx(1.0)

    def test_inflated_gaussian_fails_at_origin(self):
        f = GridFunction.from_callable(gaussian(1.0), 1, 4.0, 0.125)
        params = PolarityParams(k=2, j=2)
        rho = RhoFunction.exponential()
        verdict = check_function_polarity([f, f], rho, params)
        assert verdict.verdict is Verdict.PASS
        assert verdict.max_value == pytest.approx(1.0)

        inflated = f.with_values(1.01 * f.values)
        verdict = check_function_polarity([inflated, f], rho, params)
        assert verdict.verdict is Verdict.FAIL
        assert verdict.max_value == pytest.approx(1.01)
        assert verdict.witness == [[0.0], [0.0]]
        assert [d.code for d in verdict.diagnostics] == ["polarity_violated"]

    def test_wrong_number_of_functions(self):
        f = GridFunction.from_callable(gaussian(0.5), 1, 2.0, 0.5)
        with pytest.raises(DomainError):
            check_function_polarity([f], RhoFunction.exponential(), PolarityParams(k=2, j=2))


class TestPrekopaLeindler:
    def test_exponential_tables(self):
        table = Table1D.from_callable(lambda t: np.exp(-t), T=10.0, size=200)
        report = prekopa_leindler_check([table, table], table)
        assert report.hypothesis is Verdict.PASS
        assert report.conclusion_holds
        assert report.lhs == pytest.approx(report.rhs)

    def test_shrunken_target_is_rejected(self):
        table = Table1D.from_callable(lambda t: np.exp(-t), T=10.0, size=200)
        target = Table1D(table.t, 0.9 * table.values)
        report = prekopa_leindler_check([table, table], target)
        assert report.hypothesis is Verdict.FAIL
        assert report.witness is not None
        assert not report.conclusion_holds
        assert report.diagnostics[0].code == "hypothesis_violated"


class TestOrthants:
    def test_weighted_orthant_inequality(self):
        f1 = GridFunction.from_callable(positive_half(0.5), 1, 6.0, 0.05, even=False)
        f2 = GridFunction.from_callable(positive_half(1.0), 1, 6.0, 0.05, even=False)
        report = weighted_orthant_check([f1, f2], RhoFunction.exponential(), j=2)
        assert report.verdict is Verdict.PASS
        assert report.polarity.verdict is Verdict.PASS
        assert report.lhs == pytest.approx(np.pi / (2 * np.sqrt(2)), rel=1e-4)
        assert report.rhs == pytest.approx(np.pi / 2, rel=1e-6)

    def test_orthant_check_needs_orthant_support(self):
        f = GridFunction.from_callable(gaussian(0.5), 1, 2.0, 0.5)
        with pytest.raises(DomainError):
            weighted_orthant_check([f, f], RhoFunction.exponential(), j=2)

    def test_full_space_decomposition(self):
        f1 = GridFunction.from_callable(gaussian(0.5), 1, 6.0, 0.05)
        f2 = GridFunction.from_callable(gaussian(1.0), 1, 6.0, 0.05)
        report = full_space_from_orthants([f1, f2], RhoFunction.exponential(), j=2)
        assert report.verdict is Verdict.PASS
        assert report.orthant_terms == 4
        assert report.nonzero_terms == 4
        assert report.lhs == pytest.approx(report.direct_lhs, rel=1e-10)
        assert report.rhs == pytest.approx(2 * np.pi, rel=1e-6)
        assert not [d for d in report.diagnostics if d.code == "decomposition_mismatch"]


class TestPipeline:
    def test_layer_cake_on_lifted_bodies(self, square, diamond):
        fs, rho = lift_from_bodies([square, diamond], 2, L=2.0, h=0.25)
        report = layer_cake_pipeline(fs, rho, 2)
        assert report.verdict is Verdict.PASS
        assert report.direct_product == pytest.approx(8.0)
        assert report.relative_gap == pytest.approx(0.0, abs=1e-9)
        assert report.rescaled_checks > 0
        assert report.rescaled_failures == 0
        assert report.rhs == pytest.approx(np.pi**2)

    def test_relaxed_bound(self, square, diamond):
        fs, rho = lift_from_bodies([square, diamond], 2, L=2.0, h=0.25)
        report = relaxed_bound_check(fs, rho, 2)
        assert report.verdict is Verdict.PASS
        assert report.lhs == pytest.approx(8.0)
        assert report.rhs == pytest.approx(np.pi**2)
