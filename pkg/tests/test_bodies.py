import numpy as np
import pytest

from santalo.bodies.models import Boundedness, SymmetricPolytope
from santalo.bodies.service import (
    boundedness_of,
    cube,
    diagonal_image,
    lp_ball_polytope,
    radial,
    rotate,
    section,
    steiner_symmetrize,
    support,
    support_point,
    truncated_slab,
    unconditional_defect,
    unconditionalize,
)
from santalo.errors import DegenerateBodyError, DomainError


def test_basic_volumes(square, diamond):
    assert square.volume == pytest.approx(4.0)
    assert diamond.volume == pytest.approx(2.0)
    assert cube(3).volume == pytest.approx(8.0)


def test_from_points_closes_under_negation():
    P = SymmetricPolytope.from_points([[1.0, 0.0], [0.0, 1.0], [0.2, 0.2]])
    assert P.num_vertices == 4
    assert P.volume == pytest.approx(2.0)


def test_constructor_rejects_asymmetric_vertices():
    with pytest.raises(DomainError):
        SymmetricPolytope(np.array([[1.0, 0.0], [0.0, 1.0]]))


def test_flat_hull_is_degenerate():
    P = SymmetricPolytope.from_points([[1.0, 1.0], [2.0, 2.0]])
    assert P.degenerate
    with pytest.raises(DegenerateBodyError):
        P.volume


def test_support_and_radial(square, diamond):
    assert support(square, [1.0, 1.0]) == pytest.approx(2.0)
    assert radial(diamond, [1.0, 1.0]) == pytest.approx(0.5)
    assert radial(square, [1.0, 0.0]) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        support(square, [0.0, 0.0])


def test_lp_ball_oracle(disc):
    assert disc.contains([[0.6, 0.8]])[0]
    assert not disc.contains([[0.8, 0.8]])[0]
    assert support(disc, [3.0, 4.0]) == pytest.approx(5.0)
    assert radial(disc, [3.0, 4.0]) == pytest.approx(0.2)
    np.testing.assert_allclose(support_point(disc, [3.0, 4.0]), [0.6, 0.8])


def test_inscribed_lp_polytope_approaches_ball():
    P = lp_ball_polytope(2, 2, resolution=16)
    assert np.pi * 0.98 < P.volume < np.pi


def test_linear_images(square, sheared_square):
    assert sheared_square.volume == pytest.approx(4.0)
    assert sheared_square.linear_det == pytest.approx(1.0)
    stretched = diagonal_image(cube(3), [2.0, 3.0, 1.0])
    assert stretched.volume == pytest.approx(48.0)
    assert diagonal_image(square, [2.0, 3.0]).volume == pytest.approx(24.0)
    c, s = np.cos(0.3), np.sin(0.3)
    turned = rotate(square, [[c, -s], [s, c]])
    assert turned.volume == pytest.approx(4.0)
    with pytest.raises(DomainError):
        rotate(square, [[1.0, 1.0], [0.0, 1.0]])


def test_steiner_sheared_square_becomes_hexagon(sheared_square):
    hexagon = steiner_symmetrize(sheared_square, 1)
    assert hexagon.volume == pytest.approx(4.0)
    assert hexagon.num_vertices == 6
    assert unconditional_defect(hexagon) == pytest.approx(0.0, abs=1e-9)
    expected = {(0.5, 1.0), (-0.5, 1.0), (1.5, 0.0)}
    got = {tuple(np.round(v, 9) + 0.0) for v in hexagon.vertices}
    assert expected <= got


def test_steiner_along_shear_direction_recovers_square(sheared_square, square):
    out = steiner_symmetrize(sheared_square, 0)
    assert out.volume == pytest.approx(4.0)
    assert out.num_vertices == 4
    assert np.allclose(np.abs(out.vertices), 1.0)


def test_unconditionalize(sheared_square):
    assert unconditional_defect(sheared_square) > 0.1
    result = unconditionalize(sheared_square)
    assert result.unconditional
    assert result.volume_after == pytest.approx(result.volume_before)


def test_sections(square):
    cut = section(square, 0, 0.5)
    np.testing.assert_allclose(np.sort(cut.ravel()), [-1.0, 1.0])
    assert section(square, 0, 2.0) is None
    with pytest.raises(DomainError):
        section(cube(1), 0, 0.0)


@pytest.mark.parametrize("M", [1.0, 2.0, 4.0])
def test_truncated_slab_area(M):
    assert truncated_slab(2, M).volume == pytest.approx(4 * M - 1)


def test_boundedness_of_slab_constraints():
    A = np.array([[1.0, 1.0], [-1.0, -1.0]])
    assert boundedness_of(A, np.ones(2)) is Boundedness.UNBOUNDED
    A_box = np.vstack([np.eye(2), -np.eye(2)])
    assert boundedness_of(A_box, np.ones(4)) is Boundedness.BOUNDED


def test_vertex_file_round_trip(tmp_path, diamond):
    path = diamond.dump(tmp_path / "cross.txt")
    loaded = SymmetricPolytope.load(path)
    assert loaded.label == "cross"
    assert loaded.volume == pytest.approx(2.0)


def test_half_vertex_file_is_completed(tmp_path):
    path = tmp_path / "half.txt"
    path.write_text("2 2\n1 0\n0 1\n")
    assert SymmetricPolytope.load(path).volume == pytest.approx(2.0)
