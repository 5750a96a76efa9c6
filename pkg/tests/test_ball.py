import numpy as np
import pytest
from pydantic import ValidationError

from santalo.ball.models import OrthoBasis
from santalo.ball.service import (
    amgm_value,
    ball_bound_check,
    ball_rhs,
    ball_value_at_basis,
    ball_value_min,
    coordinate_ball_value,
    equal_moments_map,
    functional_ball_min,
    functional_ball_value,
    isotropic_map,
)
from santalo.bodies.service import cube, diagonal_image, linear_image, make_lp_ball
from santalo.errors import DomainError
from santalo.functional.models import GridFunction, RhoFunction
from santalo.harness.corpus import random_symmetric_polytope
from santalo.measure.service import second_moment_matrix
from santalo.schemas import Verdict
from santalo.utils.rng import stream


class TestOrthoBasis:
    def test_identity(self):
        np.testing.assert_allclose(OrthoBasis.identity(3).matrix, np.eye(3))

    def test_matrix_is_orthogonal(self):
        Q = OrthoBasis.from_angles(3, [0.3, -1.1, 2.0]).matrix
        np.testing.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-12)

    def test_from_matrix_round_trip(self):
        basis = OrthoBasis.from_angles(3, [0.3, -1.1, 2.0])
        again = OrthoBasis.from_matrix(basis.matrix)
        np.testing.assert_allclose(again.matrix, basis.matrix, atol=1e-10)

    def test_wrong_angle_count(self):
        with pytest.raises(ValidationError):
            OrthoBasis(n=3, angles=(0.1,))

    def test_from_matrix_rejects_non_orthogonal(self):
        with pytest.raises(DomainError):
            OrthoBasis.from_matrix([[1.0, 1.0], [0.0, 1.0]])


def test_ball_value_of_disc_pair(disc):
    value = ball_value_at_basis([disc, disc], 2, OrthoBasis.identity(2))
    assert value.value == pytest.approx(np.pi**2 / 8)
    assert value.value == pytest.approx(coordinate_ball_value(2, 2, 2))
    turned = ball_value_at_basis([disc, disc], 2, OrthoBasis.from_angles(2, [0.7]))
    assert turned.value == pytest.approx(value.value)


def test_ball_value_of_two_squares(square):
    value = ball_value_at_basis([square, square], 2, OrthoBasis.identity(2))
    assert value.value == pytest.approx(32.0 / 9.0)
    assert value.per_axis_terms == pytest.approx([16.0 / 9.0, 16.0 / 9.0])
    assert amgm_value([square, square], 2) == pytest.approx(32.0 / 9.0)


def test_ball_value_checks_basis_dimension(square):
    with pytest.raises(DomainError):
        ball_value_at_basis([square], 2, OrthoBasis.identity(3))


def test_minimized_ball_value_is_an_upper_bound(square):
    stretched = diagonal_image(square, [2.0, 0.5])
    bodies = [square, linear_image(stretched, [[1.0, 0.3], [0.0, 1.0]])]
    standard = ball_value_at_basis(bodies, 4, OrthoBasis.identity(2))
    best = ball_value_min(bodies, 4, restarts=2, seed=5)
    assert best.upper_bound
    assert best.value <= standard.value + 1e-12
    assert best.diagnostics[0].code == "restart_spread"


def test_isotropic_map(sheared_square):
    T = isotropic_map(sheared_square)
    assert abs(np.linalg.det(T)) == pytest.approx(1.0)
    M = second_moment_matrix(linear_image(sheared_square, T))
    assert M[0, 1] == pytest.approx(0.0, abs=1e-10)
    assert M[0, 0] == pytest.approx(M[1, 1])


def test_equal_moments_map():
    box = diagonal_image(cube(2), [2.0, 0.5])
    result = equal_moments_map(box, 2)
    assert result.converged
    assert np.prod(result.d) == pytest.approx(1.0)
    assert result.moments[0] == pytest.approx(result.moments[1], rel=1e-7)
    # the fixed point undoes the stretch
    assert result.d == pytest.approx([0.5, 2.0], rel=1e-6)


def test_ball_bound_is_tight_at_discs(disc):
    report = ball_bound_check([disc, disc], 2, restarts=2, seed=1)
    assert report.verdict is Verdict.PASS
    assert report.slack == pytest.approx(0.0, abs=1e-9)
    assert report.ball.upper_bound


def test_ball_bound_holds_for_square_and_diamond(square, diamond):
    report = ball_bound_check([square, diamond], 2, restarts=2, seed=1)
    assert report.verdict is Verdict.PASS
    assert report.slack > 0


@pytest.mark.parametrize("j", [3, 4])
def test_ball_bound_is_tight_at_lp_balls(j):
    ball = make_lp_ball(2, j)
    report = ball_bound_check([ball, ball], j, restarts=2, seed=1)
    assert report.verdict is Verdict.PASS
    assert report.slack == pytest.approx(0.0, abs=1e-6 * report.lhs)


def test_ball_bound_amgm_is_unchanged_by_unit_diagonal_maps(square, sheared_square):
    bodies = [square, sheared_square]
    images = [diagonal_image(b, [2.0, 0.5]) for b in bodies]
    assert amgm_value(images, 2) == pytest.approx(amgm_value(bodies, 2), rel=1e-8)

    before = ball_bound_check(bodies, 2, restarts=1, seed=1)
    after = ball_bound_check(images, 2, restarts=1, seed=1)
    assert after.amgm == pytest.approx(before.amgm, rel=1e-8)
    assert after.volume_product == pytest.approx(before.volume_product, rel=1e-12)
    assert after.lhs == before.lhs


@pytest.mark.parametrize("j", [2, 4])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_ball_bound_holds_on_random_polytopes(seed, j):
    bodies = [random_symmetric_polytope(stream(seed, i), 2, 6) for i in range(2)]
    report = ball_bound_check(bodies, j, restarts=2, seed=seed)
    assert report.verdict is Verdict.PASS
    assert report.slack >= 0


def test_ball_rhs_for_exponential_profile():
    assert ball_rhs(RhoFunction.exponential(), 2, 2, 2) == pytest.approx(
        8 * np.pi**2, rel=1e-6
    )


def test_functional_ball_value_of_gaussians():
    f = GridFunction.from_callable(lambda X: np.exp(-0.5 * np.sum(X**2, axis=1)), 2, 8.0, 0.125)
    value = functional_ball_value([f, f], 2)
    assert value.value == pytest.approx(8 * np.pi**2, rel=1e-6)
    assert value.value == pytest.approx(
        ball_rhs(RhoFunction.exponential(), 2, 2, 2), rel=1e-5
    )
    assert not value.diagnostics
    best = functional_ball_min([f, f], 2, restarts=1, max_iter=20)
    assert best.upper_bound
    assert best.value <= value.value + 1e-9
