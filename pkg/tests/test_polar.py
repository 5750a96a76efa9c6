import numpy as np
import pytest

from santalo.bodies.models import Boundedness, SymmetricPolytope
from santalo.bodies.service import scale, steiner_symmetrize, truncated_slab
from santalo.errors import DomainError
from santalo.functional.models import GridFunction, RhoFunction
from santalo.measure.service import santalo_ratio
from santalo.polar.schemas import PolarProblem
from santalo.polar.service import (
    classical_polar,
    complete_tuple,
    functional_polar,
    j_polar,
    largest_body_check,
    verify_tuple_polarity,
)
from santalo.schemas import PolarityParams, SamplerCfg, Verdict


def interval(a: float) -> SymmetricPolytope:
    return SymmetricPolytope(np.array([[a], [-a]]), label=f"[-{a:g},{a:g}]")


def test_classical_polar_of_square_is_diamond(square):
    polar = classical_polar(square)
    assert polar.volume == pytest.approx(2.0)
    assert square.volume * polar.volume == pytest.approx(8.0)
    assert square.volume * polar.volume <= np.pi**2
    np.testing.assert_allclose(np.abs(polar.vertices).sum(axis=1), 1.0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_one_dimensional_family_attains_the_bound(a):
    params = PolarityParams(k=3, j=3)
    last = complete_tuple([interval(a), interval(a)], params)
    assert float(last.vertices.max()) == pytest.approx(1.0 / a**2)
    ratio = santalo_ratio([interval(a), interval(a), last], j=3)
    assert ratio.value == pytest.approx(1.0)


def test_sheared_square_polar_grows_under_steiner(sheared_square):
    before = classical_polar(sheared_square)
    assert before.volume == pytest.approx(2.0)
    after = classical_polar(steiner_symmetrize(sheared_square, 1))
    assert after.volume == pytest.approx(20.0 / 9.0)


def test_polar_problem_needs_k_minus_one_bodies(square):
    with pytest.raises(ValueError):
        PolarProblem(bodies=[square, square], params=PolarityParams(k=2, j=2))


def test_largest_body_check(square, diamond):
    params = PolarityParams(k=2, j=2)
    verdict = largest_body_check([square, diamond], params, index=1)
    assert verdict.verdict is Verdict.PASS
    assert verdict.min_slack == pytest.approx(0.0, abs=1e-9)
    assert verdict.active_vertices == 4
    too_big = largest_body_check([square, scale(diamond, 1.2)], params, index=1)
    assert too_big.verdict is Verdict.FAIL


def test_three_slot_completion_contains_no_extra_room(square):
    params = PolarityParams(k=3, j=2)
    H = j_polar(PolarProblem(bodies=[square, square], params=params))
    assert H.bounded is Boundedness.BOUNDED
    last = H.to_polytope()
    verdict = verify_tuple_polarity([square, square, last], params)
    assert verdict.verdict is Verdict.PASS
    assert verdict.max_value == pytest.approx(1.0)


def test_completion_with_threshold_passes_its_check(square):
    params = PolarityParams(k=2, j=2, threshold=2.0)
    H = j_polar(PolarProblem(bodies=[square], params=params))
    last = H.to_polytope()
    assert last.volume == pytest.approx(8.0)
    verdict = verify_tuple_polarity([square, last], params)
    assert verdict.verdict is Verdict.PASS
    assert verdict.max_value == pytest.approx(1.0)


def test_sampled_check_uses_threshold(disc):
    params = PolarityParams(k=2, j=2, threshold=1.1)
    sampler = SamplerCfg(samples_per_body=200, random_tuples=2_000, seed=3)
    verdict = verify_tuple_polarity([scale(disc, 1.1), disc], params, sampler)
    assert verdict.method == "sampled"
    assert verdict.verdict is Verdict.PASS
    assert verdict.max_value == pytest.approx(1.0, rel=1e-4)


def test_oracle_pair_is_sampled(disc):
    params = PolarityParams(k=2, j=2)
    sampler = SamplerCfg(samples_per_body=200, random_tuples=2_000, seed=3)
    verdict = verify_tuple_polarity([disc, disc], params, sampler)
    assert verdict.method == "sampled"
    assert verdict.verdict is Verdict.PASS
    assert verdict.max_value == pytest.approx(1.0, abs=1e-6)

    bigger = verify_tuple_polarity([scale(disc, 1.1), disc], params, sampler)
    assert bigger.verdict is Verdict.FAIL
    assert bigger.max_value == pytest.approx(1.1, rel=1e-4)


def test_tuple_verification_checks_slot_count(square):
    with pytest.raises(DomainError):
        verify_tuple_polarity([square], PolarityParams(k=2, j=2))


def test_degree_one_slab_polar_is_unbounded():
    params = PolarityParams(k=2, j=1)
    products = []
    for M in (1.0, 2.0, 4.0, 8.0):
        slab = truncated_slab(2, M)
        H = j_polar(PolarProblem(bodies=[slab], params=params))
        assert H.bounded is Boundedness.UNBOUNDED
        assert "unbounded" in [d.code for d in H.diagnostics]
        assert complete_tuple([slab], params) is None
        assert verify_tuple_polarity([slab, slab], params).verdict is Verdict.PASS
        products.append(slab.volume**2)
    assert products == sorted(products)
    assert len(set(products)) == len(products)


def test_functional_polar_of_indicator_is_indicator():
    L, h = 2.0, 0.25
    f = GridFunction.from_callable(lambda X: (np.abs(X[:, 0]) <= 1.0).astype(float), 1, L, h)
    rho = RhoFunction.indicator(C=1.0)
    g = functional_polar([f], rho, j=2)
    np.testing.assert_allclose(g.values, f.values)
