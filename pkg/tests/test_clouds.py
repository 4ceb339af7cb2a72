import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetext.clouds import (
    SetSpec,
    ball_restrict,
    boundary_points,
    dist_to_affine_hull,
    generate,
    read_points_file,
    write_points_file,
)


def test_square_point_count():
    # count = (side/h + 1)^2 for the grid discretization
    cloud = generate(SetSpec("square", h=2.0 ** -8))
    assert cloud.n_points == 129 ** 2 == 16641


def test_cantor_depth3_endpoints():
    cloud = generate(SetSpec("cantor", depth=3))
    assert cloud.dim == 1
    assert cloud.n_points == 16
    assert cloud.points.min() == 0.0
    assert cloud.points.max() == 0.25
    # finest generation scale 1/4 * 3^-3
    assert cloud.resolution == pytest.approx(0.25 * 3.0 ** -3)


def test_segment_second_coordinate_zero():
    cloud = generate(SetSpec("segment", h=2.0 ** -6))
    assert np.all(cloud.points[:, 1] == 0.0)
    assert np.all(cloud.boundary)


def test_generate_deterministic():
    a = generate(SetSpec("disk", h=2.0 ** -6))
    b = generate(SetSpec("disk", h=2.0 ** -6))
    assert np.array_equal(a.points, b.points)
    assert np.array_equal(a.boundary, b.boundary)


def test_unknown_family():
    with pytest.raises(ValueError):
        generate(SetSpec("pentagon"))


def test_square_boundary_is_edges():
    cloud = generate(SetSpec("square", h=2.0 ** -5))
    bnd = boundary_points(cloud)
    side = 0.25
    on_edge = np.any(np.isclose(np.abs(bnd.points), side), axis=1)
    assert np.all(on_edge)
    # interior grid points have all four neighbors inside
    n_axis = int(round(2 * side / 2.0 ** -5)) + 1
    assert bnd.n_points == 4 * (n_axis - 1)


def test_cantor_all_boundary():
    cloud = generate(SetSpec("cantor", depth=4))
    assert boundary_points(cloud).n_points == cloud.n_points


def test_disk_boundary_is_thin_ring():
    h = 2.0 ** -6
    cloud = generate(SetSpec("disk", h=h))
    bnd = boundary_points(cloud)
    r = np.linalg.norm(bnd.points, axis=1)
    assert np.all(r >= 0.25 - np.sqrt(2) * h - 1e-12)


def test_ball_restrict_contains_center():
    cloud = generate(SetSpec("square", h=2.0 ** -5))
    x0 = cloud.points[0]
    idx = ball_restrict(cloud, x0, 1e-9)
    assert len(idx) == 1
    assert np.allclose(cloud.points[idx[0]], x0)


def test_ball_restrict_whole_cloud_for_big_radius():
    cloud = generate(SetSpec("disk", h=2.0 ** -5))
    idx = ball_restrict(cloud, cloud.points[0], 10.0)
    assert len(idx) == cloud.n_points


def test_ball_restrict_corner_half_step():
    h = 2.0 ** -5
    cloud = generate(SetSpec("square", h=h))
    corner = np.array([-0.25, -0.25])
    idx = ball_restrict(cloud, corner, h / 2)
    assert len(idx) == 1
    assert np.allclose(cloud.points[idx[0]], corner)


def test_affine_hull_examples():
    assert dist_to_affine_hull([3.0, 4.0], [[0.0, 0.0]]) == pytest.approx(5.0)
    assert dist_to_affine_hull([5.0, 2.0], [[0.0, 0.0], [1.0, 0.0]]) == pytest.approx(2.0)
    full = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    assert dist_to_affine_hull([7.0, -3.0], full) == pytest.approx(0.0, abs=1e-10)


@given(st.permutations([0, 1, 2, 3]))
@settings(max_examples=20, deadline=None)
def test_affine_hull_permutation_invariant(perm):
    rng = np.random.default_rng(42)
    anchors = rng.standard_normal((4, 3))
    x = rng.standard_normal(3)
    base = dist_to_affine_hull(x, anchors)
    assert dist_to_affine_hull(x, anchors[list(perm)]) == pytest.approx(base, abs=1e-10)


def test_affine_hull_adding_point_in_hull():
    anchors = np.array([[0.0, 0.0], [1.0, 0.0]])
    x = np.array([0.3, 0.8])
    base = dist_to_affine_hull(x, anchors)
    extended = np.vstack([anchors, [0.5, 0.0]])
    assert dist_to_affine_hull(x, extended) == pytest.approx(base, abs=1e-10)


def test_membership_stable_under_refinement():
    # halving h changes no membership verdict of retained coarse points
    coarse = generate(SetSpec("disk", h=2.0 ** -5))
    fine = generate(SetSpec("disk", h=2.0 ** -6))
    fine_set = {p.tobytes() for p in fine.points}
    assert all(p.tobytes() in fine_set for p in coarse.points)


def test_points_file_roundtrip(tmp_path):
    cloud = generate(SetSpec("square", h=2.0 ** -4))
    path = tmp_path / "pts.txt"
    write_points_file(str(path), cloud)
    back = read_points_file(str(path), 2)
    assert np.array_equal(back.points, cloud.points)
    assert np.array_equal(back.boundary, cloud.boundary)


def test_points_file_missing_flag_means_boundary(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("0.0 0.0\n0.1 0.0\n")
    cloud = read_points_file(str(path), 2)
    assert np.all(cloud.boundary)


def test_cloud_escaping_box_rejected(tmp_path):
    path = tmp_path / "pts.txt"
    path.write_text("0.5 0.5\n")
    with pytest.raises(ValueError):
        read_points_file(str(path), 2)


def test_cusp_out_contains_tip_and_respects_profile():
    cloud = generate(SetSpec("cusp_out", h=2.0 ** -6, p=2.0))
    assert any(np.all(cloud.points == 0.0, axis=1))
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    assert np.all(np.abs(y) <= x ** 2 + 1e-12)
