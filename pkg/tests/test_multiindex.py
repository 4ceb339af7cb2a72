import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetext.clouds import PointCloud
from jetext.jets import Jet, jet_from_function
from jetext.multiindex import (
    MultiPolynomial,
    enumerate_multiindices,
    homogeneous_part,
    poly_derivative,
    poly_eval,
    taylor_poly,
)


def test_enumerate_1d():
    assert enumerate_multiindices(1, 2) == ((0,), (1,), (2,))


def test_enumerate_2d_order1_graded():
    assert enumerate_multiindices(2, 1) == ((0, 0), (1, 0), (0, 1))


def test_enumerate_count_matches_binomial():
    # stars and bars: binom(4 + 2, 2) = 15, confirmed by direct enumeration
    alphas = enumerate_multiindices(2, 4)
    assert len(alphas) == 15
    assert len(set(alphas)) == 15
    brute = {(i, j) for i in range(5) for j in range(5) if i + j <= 4}
    assert set(alphas) == brute


def test_enumerate_rejects_bad_args():
    with pytest.raises(ValueError):
        enumerate_multiindices(0, 3)


def test_eval_examples():
    p = MultiPolynomial.from_dict(1, {(2,): 1.0, (0,): -1.0})
    assert poly_eval(p, np.array([2.0])) == pytest.approx(3.0)
    one = MultiPolynomial.constant(1, 1.0)
    assert poly_eval(one, np.array([17.3])) == pytest.approx(1.0)
    q = MultiPolynomial.from_dict(2, {(1, 1): 1.0})
    assert poly_eval(q, np.array([3.0, 4.0])) == pytest.approx(12.0)


def test_eval_dimension_mismatch():
    p = MultiPolynomial.constant(2, 1.0)
    with pytest.raises(ValueError):
        poly_eval(p, np.array([1.0]))


def test_derivative_examples():
    p = MultiPolynomial.from_dict(1, {(3,): 1.0})
    dp = poly_derivative(p, (2,))
    assert dp.to_dict() == {(1,): 6.0}
    q = MultiPolynomial.from_dict(2, {(1, 1): 1.0})
    assert poly_derivative(q, (1, 1)).to_dict() == {(0, 0): 1.0}
    assert poly_derivative(q, (0, 0)).to_dict() == q.to_dict()


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
@settings(max_examples=30, deadline=None)
def test_derivative_commutes(a1, a2, b1, b2):
    rng = np.random.default_rng(5)
    terms = {a: rng.standard_normal() for a in enumerate_multiindices(2, 5)}
    p = MultiPolynomial.from_dict(2, terms)
    lhs = poly_derivative(poly_derivative(p, (a1, a2)), (b1, b2))
    rhs = poly_derivative(p, (a1 + b1, a2 + b2))
    assert lhs.to_dict() == pytest.approx(rhs.to_dict())


def test_homogeneous_examples():
    p = MultiPolynomial.from_dict(1, {(0,): 1.0, (1,): 1.0, (2,): 1.0})
    assert homogeneous_part(p, 2).to_dict() == {(2,): 1.0}
    assert homogeneous_part(p, 5).to_dict() == {}
    q = MultiPolynomial.from_dict(2, {(1, 1): 1.0, (1, 0): 1.0})
    assert homogeneous_part(q, 2).to_dict() == {(1, 1): 1.0}


def test_homogeneous_parts_sum_to_poly():
    rng = np.random.default_rng(11)
    terms = {a: rng.standard_normal() for a in enumerate_multiindices(2, 6)}
    p = MultiPolynomial.from_dict(2, terms)
    total = MultiPolynomial.zero(2)
    for k in range(p.deg + 1):
        total = total + homogeneous_part(p, k)
    assert total.to_dict() == pytest.approx(p.to_dict())


def _line_cloud(points):
    pts = np.asarray(points, dtype=float)[:, None]
    return PointCloud(1, pts, 0.01, np.ones(len(pts), dtype=bool), "line")


def test_taylor_reproduces_polynomial():
    # jet of p(x) = x^2 sampled with exact derivatives, expanded at y = 0
    cloud = _line_cloud(np.linspace(0.0, 0.25, 6))
    vals = np.stack([cloud.points[:, 0] ** 2, 2 * cloud.points[:, 0], np.full(6, 2.0)])
    jet = Jet(cloud, 2, vals)
    t = taylor_poly(jet, 0, 2)
    assert t.coefficient((2,)) == pytest.approx(1.0, abs=1e-12)
    assert t.coefficient((1,)) == pytest.approx(0.0, abs=1e-12)
    assert t.coefficient((0,)) == pytest.approx(0.0, abs=1e-12)


def test_taylor_zero_jet():
    cloud = _line_cloud([0.0, 0.1])
    jet = Jet(cloud, 2, np.zeros((3, 2)))
    t = taylor_poly(jet, 0, 2)
    assert t.to_dict() == {}


def test_taylor_sin_maclaurin():
    # sin jet at y = 0: coefficients (0, 1, 0, -1/6), closed-form Maclaurin oracle
    cloud = _line_cloud(np.linspace(0.0, 0.25, 9))

    def oracle(alpha, pts):
        return np.sin(pts[:, 0] + alpha[0] * np.pi / 2)

    jet = jet_from_function(oracle, cloud, 3)
    t = taylor_poly(jet, 0, 3)
    expected = {0: 0.0, 1: 1.0, 2: 0.0, 3: -1.0 / 6.0}
    for k, c in expected.items():
        assert t.coefficient((k,)) == pytest.approx(c, abs=1e-12)


def test_taylor_exact_for_poly_jets_2d():
    rng = np.random.default_rng(3)
    terms = {a: rng.standard_normal() for a in enumerate_multiindices(2, 3)}
    p = MultiPolynomial.from_dict(2, terms)
    from jetext.jets import polynomial_oracle

    pts = rng.uniform(-0.2, 0.2, size=(8, 2))
    cloud = PointCloud(2, pts, 0.01, np.ones(8, dtype=bool), "rand")
    jet = jet_from_function(polynomial_oracle(p), cloud, 3)
    for y_idx in (0, 3, 7):
        t = taylor_poly(jet, y_idx, 3)
        for a in enumerate_multiindices(2, 3):
            assert t.coefficient(a) == pytest.approx(p.coefficient(a), abs=1e-12)


def test_derivative_matches_finite_differences():
    # central differences at step 1e-5, relative error 1e-6, deg <= 5, |x| <= 2
    rng = np.random.default_rng(7)
    terms = {a: rng.standard_normal() for a in enumerate_multiindices(2, 5)}
    p = MultiPolynomial.from_dict(2, terms)
    hstep = 1e-5
    for alpha in ((1, 0), (0, 1)):
        dp = poly_derivative(p, alpha)
        for x in rng.uniform(-2, 2, size=(12, 2)):
            e = np.array(alpha, dtype=float)
            fd = (poly_eval(p, x + hstep * e) - poly_eval(p, x - hstep * e)) / (2 * hstep)
            exact = poly_eval(dp, x)
            scale = max(1.0, abs(exact))
            assert abs(fd - exact) / scale < 1e-6
