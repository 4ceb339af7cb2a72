import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetext.clouds import PointCloud, SetSpec, generate
from jetext.jets import (
    Jet,
    jet_from_function,
    polynomial_oracle,
    read_jet_file,
    remainder,
    sup_norm,
    trig_corpus,
    whitney_norm,
    write_jet_file,
)
from jetext.multiindex import MultiPolynomial, enumerate_multiindices


def _line_cloud(points, h=0.01):
    pts = np.asarray(points, dtype=float)[:, None]
    return PointCloud(1, pts, h, np.ones(len(pts), dtype=bool), "line")


def test_constant_jet():
    cloud = _line_cloud(np.linspace(0, 0.25, 5))
    jet = jet_from_function(lambda a, p: np.ones(p.shape[0]) if sum(a) == 0 else np.zeros(p.shape[0]), cloud, 2)
    assert np.all(jet.row((0,)) == 1.0)
    assert np.all(jet.row((1,)) == 0.0)
    assert np.all(jet.row((2,)) == 0.0)


def test_identity_jet():
    cloud = _line_cloud(np.linspace(0, 0.25, 5))
    p = MultiPolynomial.from_dict(1, {(1,): 1.0})
    jet = jet_from_function(polynomial_oracle(p), cloud, 1)
    assert np.allclose(jet.row((0,)), cloud.points[:, 0])
    assert np.all(jet.row((1,)) == 1.0)


def test_trig_jet_matches_closed_form():
    cloud = generate(SetSpec("square", h=2.0 ** -4))

    def oracle(alpha, pts):
        w = 4 * np.pi
        return (w ** alpha[0] * np.sin(w * pts[:, 0] + alpha[0] * np.pi / 2)
                * w ** alpha[1] * np.cos(w * pts[:, 1] + alpha[1] * np.pi / 2))

    jet = jet_from_function(oracle, cloud, 3)
    # spot-check against direct partials of sin(4 pi x) cos(4 pi y)
    w = 4 * np.pi
    x, y = cloud.points[:, 0], cloud.points[:, 1]
    assert np.allclose(jet.row((0, 0)), np.sin(w * x) * np.cos(w * y), atol=1e-12)
    assert np.allclose(jet.row((1, 0)), w * np.cos(w * x) * np.cos(w * y), atol=1e-12)
    assert np.allclose(jet.row((0, 1)), -w * np.sin(w * x) * np.sin(w * y), atol=1e-12)
    assert np.allclose(jet.row((2, 1)), w ** 3 * np.sin(w * x) * np.sin(w * y), atol=1e-9)


def test_remainder_vanishes_for_polynomial_jets():
    rng = np.random.default_rng(9)
    cloud = _line_cloud(np.sort(rng.uniform(0, 0.25, size=12)))
    terms = {a: rng.standard_normal() for a in enumerate_multiindices(1, 2)}
    p = MultiPolynomial.from_dict(1, terms)
    jet = jet_from_function(polynomial_oracle(p), cloud, 2)
    assert remainder(jet, 2, None) <= 1e-9


def test_remainder_two_point_example():
    cloud = _line_cloud([0.0, 0.25])
    p = MultiPolynomial.from_dict(1, {(1,): 1.0})
    jet = jet_from_function(polynomial_oracle(p), cloud, 1)
    # n = 0: the single pair gives |f(x) - f(y)| / |x-y|^0 = 1/4
    assert remainder(jet, 0, 1.0) == pytest.approx(0.25)


def test_remainder_empty_supremum():
    cloud = _line_cloud([0.0, 0.25])
    jet = Jet(cloud, 1, np.ones((2, 2)))
    assert remainder(jet, 1, 0.1) == 0.0


def test_remainder_nondecreasing_in_t():
    rng = np.random.default_rng(4)
    cloud = _line_cloud(np.sort(rng.uniform(0, 0.25, size=10)))
    jet = Jet(cloud, 1, rng.standard_normal((2, 10)))
    ts = [0.01, 0.05, 0.1, 0.2, 0.3]
    qs = [remainder(jet, 1, t) for t in ts]
    assert all(a <= b + 1e-12 for a, b in zip(qs, qs[1:]))


def test_whitney_norm_examples():
    cloud = _line_cloud([0.0, 0.25])
    p = MultiPolynomial.from_dict(1, {(1,): 1.0})
    jet = jet_from_function(polynomial_oracle(p), cloud, 1)
    # n = 1: sup part is 1 (the derivative entry), remainder part 0
    assert whitney_norm(jet, 1) == pytest.approx(1.0, abs=1e-12)
    # n = 0: sup |f| = 1/4 and q_0 = 1/4
    assert whitney_norm(jet, 0) == pytest.approx(0.5, abs=1e-12)


def test_whitney_norm_zero_jet():
    cloud = _line_cloud([0.0, 0.1, 0.2])
    jet = Jet(cloud, 2, np.zeros((3, 3)))
    assert whitney_norm(jet, 2) == 0.0


def test_norm_dominates_sup():
    rng = np.random.default_rng(12)
    cloud = _line_cloud(np.sort(rng.uniform(0, 0.25, size=8)))
    jet = Jet(cloud, 1, rng.standard_normal((2, 8)))
    assert whitney_norm(jet, 1) >= sup_norm(jet, 0) - 1e-12


@given(st.floats(-4, 4).filter(lambda c: abs(c) > 1e-3))
@settings(max_examples=15, deadline=None)
def test_norm_scales_homogeneously(c):
    rng = np.random.default_rng(21)
    cloud = _line_cloud(np.sort(rng.uniform(0, 0.25, size=7)))
    jet = Jet(cloud, 1, rng.standard_normal((2, 7)))
    assert whitney_norm(jet.scale(c), 1) == pytest.approx(abs(c) * whitney_norm(jet, 1), rel=1e-12)


def test_norm_triangle_inequality():
    rng = np.random.default_rng(33)
    cloud = _line_cloud(np.sort(rng.uniform(0, 0.25, size=9)))
    for _ in range(5):
        f = Jet(cloud, 1, rng.standard_normal((2, 9)))
        g = Jet(cloud, 1, rng.standard_normal((2, 9)))
        assert whitney_norm(f + g, 1) <= whitney_norm(f, 1) + whitney_norm(g, 1) + 1e-10


def test_trig_corpus_deterministic():
    a = trig_corpus(2, 3, seed=7)
    b = trig_corpus(2, 3, seed=7)
    pts = np.array([[0.1, 0.2], [0.0, -0.1]])
    for (fa, _), (fb, _) in zip(a, b):
        assert np.array_equal(fa((1, 0), pts), fb((1, 0), pts))


def test_jet_file_roundtrip(tmp_path):
    cloud = _line_cloud(np.linspace(0, 0.25, 6))
    p = MultiPolynomial.from_dict(1, {(2,): 1.0})
    jet = jet_from_function(polynomial_oracle(p), cloud, 2)
    path = tmp_path / "jet.txt"
    write_jet_file(str(path), jet)
    back = read_jet_file(str(path))
    assert back.order == 2
    assert np.array_equal(back.values, jet.values)
    assert np.array_equal(back.cloud.points, cloud.points)
