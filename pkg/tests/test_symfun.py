import numpy as np
import pytest

from santalo.errors import DomainError
from santalo.schemas import PolarityParams, Verdict
from santalo.symfun.service import (
    amgm_bound,
    big_E,
    big_S,
    check_polarity_on_points,
    complete_homogeneous,
    elem_sym,
    elem_sym_bruteforce,
    maclaurin_gap,
)
from santalo.utils.rng import stream


def test_elem_sym_small_values():
    assert elem_sym([1, 2, 3], 1) == 6
    assert elem_sym([1, 2, 3], 2) == 11
    assert elem_sym([1, 2, 3], 3) == 6


def test_elem_sym_matches_subset_sum():
    r = stream(1, 0).normal(size=7)
    for j in range(1, 8):
        assert elem_sym(r, j) == pytest.approx(elem_sym_bruteforce(r, j), abs=1e-12)


def test_elem_sym_odd_degree_flips_sign_exactly():
    r = stream(2, 0).normal(size=5)
    assert elem_sym(-r, 3) == -elem_sym(r, 3)
    assert elem_sym(-r, 2) == elem_sym(r, 2)


@pytest.mark.parametrize("j", [0, 4])
def test_elem_sym_degree_out_of_range(j):
    with pytest.raises(DomainError):
        elem_sym([1.0, 2.0, 3.0], j)


def test_complete_homogeneous():
    assert complete_homogeneous([1.0, 2.0], 2) == pytest.approx(7.0)
    assert complete_homogeneous([3.0], 4) == pytest.approx(81.0)


def test_big_s_is_inner_product_for_two_slots():
    params = PolarityParams(k=2, j=2)
    assert big_S([[1.0, 2.0], [3.0, 4.0]], params) == pytest.approx(11.0)
    assert big_E([[1.0, 2.0], [3.0, 4.0]], params) == pytest.approx(11.0)


def test_big_s_absolute_form():
    params = PolarityParams(k=2, j=2)
    assert big_S([[-1.0, 2.0], [3.0, -4.0]], params) == pytest.approx(-11.0)
    assert big_S([[-1.0, 2.0], [3.0, -4.0]], params, absolute=True) == pytest.approx(11.0)
    weighted = PolarityParams(k=2, j=2, p=2.0)
    assert big_S([[-1.0, 2.0], [3.0, -4.0]], weighted, absolute=True) == pytest.approx(
        9.0 + 64.0
    )


def test_signed_form_rejects_exponent():
    with pytest.raises(DomainError):
        big_S([[1.0], [1.0]], PolarityParams(k=2, j=2, p=2.0))


def test_amgm_bound_majorizes_big_s():
    rng = stream(3, 0)
    params = PolarityParams(k=3, j=2)
    for _ in range(50):
        X = rng.normal(size=(3, 4))
        assert big_S(X, params, absolute=True) <= amgm_bound(X, 2) + 1e-12


def test_maclaurin_gap():
    r = stream(4, 0).uniform(0, 2, size=6)
    assert maclaurin_gap(r, 1, 3) >= -1e-12
    assert maclaurin_gap(np.ones(4), 1, 4) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        maclaurin_gap([-1.0, 1.0], 1, 2)


def test_polarity_on_points_cube_and_cross(square, diamond):
    params = PolarityParams(k=2, j=2)
    verdict = check_polarity_on_points([square.vertices, diamond.vertices], params)
    assert verdict.verdict is Verdict.PASS
    assert verdict.max_value == pytest.approx(1.0)


def test_polarity_on_points_reports_witness(square, diamond):
    params = PolarityParams(k=2, j=2)
    verdict = check_polarity_on_points(
        [1.1 * square.vertices, diamond.vertices], params, workers=1
    )
    assert verdict.verdict is Verdict.FAIL
    assert verdict.max_value == pytest.approx(1.1)
    assert [d.code for d in verdict.diagnostics] == ["polarity_violated"]
    x, y = (np.array(w) for w in verdict.witness)
    assert float(x @ y) == pytest.approx(1.1)


def test_polarity_on_points_wrong_slot_count(square):
    with pytest.raises(DomainError):
        check_polarity_on_points([square.vertices], PolarityParams(k=2, j=2))


def test_polarity_on_points_uses_threshold(square, diamond):
    params = PolarityParams(k=2, j=2, threshold=2.0)
    verdict = check_polarity_on_points([square.vertices, 2.0 * diamond.vertices], params)
    assert verdict.verdict is Verdict.PASS
    assert verdict.max_value == pytest.approx(1.0)

    verdict = check_polarity_on_points([square.vertices, 2.2 * diamond.vertices], params)
    assert verdict.verdict is Verdict.FAIL
    assert verdict.max_value == pytest.approx(1.1)


class TestBigSInvariances:
    params = PolarityParams(k=3, j=2)

    def test_multilinear_in_each_slot(self):
        rng = stream(5, 0)
        X = rng.normal(size=(3, 4))
        Y = rng.normal(size=4)
        lam = 0.3
        for i in range(3):
            mixed = X.copy()
            mixed[i] = X[i] + lam * Y
            swapped = X.copy()
            swapped[i] = Y
            expected = big_S(X, self.params) + lam * big_S(swapped, self.params)
            assert big_S(mixed, self.params) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_permutation_invariance(self):
        rng = stream(6, 0)
        r = rng.normal(size=6)
        perm = rng.permutation(6)
        for j in range(1, 7):
            assert elem_sym(r[perm], j) == pytest.approx(elem_sym(r, j), rel=1e-12, abs=1e-12)

        X = rng.normal(size=(3, 4))
        for order in ([1, 0, 2], [2, 1, 0], [1, 2, 0]):
            assert big_S(X[order], self.params) == pytest.approx(
                big_S(X, self.params), rel=1e-12, abs=1e-12
            )

    def test_degree_two_is_rotation_invariant(self):
        rng = stream(7, 0)
        X = rng.normal(size=(3, 4))
        Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
        assert big_S(X @ Q.T, self.params) == pytest.approx(big_S(X, self.params), rel=1e-10)

    def test_degree_three_is_not_rotation_invariant(self):
        params = PolarityParams(k=3, j=3)
        X = np.tile([1.0, 0.0], (3, 1))
        c = np.cos(np.pi / 4)
        Q = np.array([[c, -c], [c, c]])
        assert big_S(X, params) == pytest.approx(1.0)
        rotated = big_S(X @ Q.T, params)
        assert rotated == pytest.approx(2 * c**3)
        assert abs(rotated - 1.0) > 0.2
