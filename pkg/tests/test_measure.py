import numpy as np
import pytest

from santalo.bodies.service import cube, make_lp_ball
from santalo.errors import DomainError
from santalo.measure.service import (
    bound_constant,
    lp_ball_moment,
    lp_ball_volume,
    moment_integral,
    moment_integrals,
    orthant_lp_moment,
    polytope_moment,
    product_with_error,
    santalo_ratio,
    second_moment_matrix,
    volume,
)
from santalo.schemas import McConfig, VolumeResult


def test_lp_ball_closed_forms():
    assert lp_ball_volume(2, 2) == pytest.approx(np.pi)
    assert lp_ball_volume(3, 2) == pytest.approx(4 * np.pi / 3)
    assert lp_ball_volume(2, 1) == pytest.approx(2.0)
    assert lp_ball_volume(3, np.inf) == pytest.approx(8.0)
    assert lp_ball_moment(2, 2) == pytest.approx(np.pi / 4)


def test_orthant_moment_matches_full_moment():
    # by symmetry the full moment is 2^n times the orthant one
    assert 4 * orthant_lp_moment(2, 2.0, 2.0) == pytest.approx(lp_ball_moment(2, 2))
    with pytest.raises(DomainError):
        orthant_lp_moment(2, 2.0, -1.0)


def test_bound_constant():
    assert bound_constant(2, 2, 3) == pytest.approx(27.0)
    assert bound_constant(3, 2, 2) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        bound_constant(2, 1, 3)


def test_mc_volume_of_disc(disc, mc):
    result = volume(disc, mc)
    assert result.method == "mc"
    assert result.stderr > 0
    assert abs(result.value - np.pi) < 4 * result.stderr
    assert volume(disc, mc) == result


def test_analytic_volume_of_disc(disc):
    result = volume(disc, oracle_method="analytic")
    assert result.method == "exact"
    assert result.value == pytest.approx(np.pi)


def test_analytic_volume_of_scaled_ball():
    assert volume(make_lp_ball(3, 2, 2.0), oracle_method="analytic").value == pytest.approx(
        8 * 4 * np.pi / 3
    )


def test_polytope_volume_is_exact(square):
    result = volume(square)
    assert result == VolumeResult(value=4.0, stderr=0.0, method="exact")


@pytest.mark.parametrize("j, expected", [(0, 4.0), (1, 2.0), (2, 4.0 / 3.0), (3, 1.0)])
def test_polytope_moments_of_square(square, j, expected):
    assert polytope_moment(square, 0, j) == pytest.approx(expected)
    assert polytope_moment(square, 1, j) == pytest.approx(expected)


def test_odd_moment_of_diamond(diamond):
    # ∫_{|x|+|y|<=1} |x| = 4 * ∫_0^1 x (1 - x) dx
    assert polytope_moment(diamond, 0, 1) == pytest.approx(2.0 / 3.0)


def test_moment_integral_on_oracle(disc, mc):
    exact = moment_integral(disc, 0, 2, oracle_method="analytic")
    assert exact.value == pytest.approx(np.pi / 4)
    sampled = moment_integral(disc, 0, 2, mc)
    assert abs(sampled.value - np.pi / 4) < 4 * sampled.stderr
    with pytest.raises(DomainError):
        moment_integral(disc, 2, 2)


def test_second_moment_matrix():
    np.testing.assert_allclose(second_moment_matrix(cube(2)), (4.0 / 3.0) * np.eye(2))
    np.testing.assert_allclose(second_moment_matrix(cube(3)), (8.0 / 3.0) * np.eye(3))


def test_product_with_error():
    value, err = product_with_error(
        [VolumeResult(value=2.0, stderr=0.2, method="mc"), VolumeResult(value=3.0)]
    )
    assert value == pytest.approx(6.0)
    assert err == pytest.approx(0.6)


def test_santalo_ratio_of_square_and_diamond(square, diamond):
    ratio = santalo_ratio([square, diamond], j=2)
    assert ratio.product == pytest.approx(8.0)
    assert ratio.value == pytest.approx(8.0 / np.pi**2)
    assert ratio.stderr == 0.0
    assert not ratio.exceeds(1.0)


def test_santalo_ratio_of_disc_pair(disc):
    ratio = santalo_ratio([disc, disc], j=2, oracle_method="analytic")
    assert ratio.value == pytest.approx(1.0)


def test_mc_config_batch_must_divide_samples():
    with pytest.raises(ValueError):
        McConfig(samples=10_000, batch=3_000)


def test_moment_integrals_cover_every_axis(square):
    results = moment_integrals(square, 2)
    assert [r.value for r in results] == pytest.approx([4.0 / 3.0, 4.0 / 3.0])
    assert all(r.method == "exact" for r in results)
