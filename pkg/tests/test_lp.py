import itertools

import numpy as np
import pytest

from jetext.lp import LinearProgram, LPError, check_outcome, solve


def test_maximize_x_up_to_one():
    # max x s.t. x <= 1 posed as min -x
    out = solve(LinearProgram(c=[-1.0], A_ub=[[1.0]], b_ub=[1.0]))
    assert out.status == "optimal"
    assert out.value == pytest.approx(-1.0)
    assert out.x[0] == pytest.approx(1.0)


def test_infeasible():
    out = solve(LinearProgram(c=[0.0], A_ub=[[1.0]], b_ub=[-1.0]))
    assert out.status == "infeasible"


def test_unbounded():
    out = solve(LinearProgram(c=[-1.0], A_ub=[[-1.0]], b_ub=[0.0]))
    assert out.status == "unbounded"


def _enumerate_bfs_tv(atoms, moments_rhs):
    """Brute-force minimum total variation over signed atoms meeting the
    moment constraints, by enumerating basic solutions."""
    A = np.array([[1.0, 1.0, 1.0], atoms])
    best = np.inf
    for cols in itertools.combinations(range(3), 2):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        w = np.linalg.solve(B, moments_rhs)
        best = min(best, np.sum(np.abs(w)))
    full = np.linalg.lstsq(A, moments_rhs, rcond=None)[0]
    if np.allclose(A @ full, moments_rhs):
        best = min(best, np.sum(np.abs(full)))
    return best


def test_three_atom_moment_problem():
    # atoms at -1, 0, 1; moments sum(mu) = 1, sum(y mu) = 0; split signed weights
    atoms = np.array([-1.0, 0.0, 1.0])
    rhs = np.array([1.0, 0.0])
    A = np.array([[1.0, 1.0, 1.0], atoms])
    A_split = np.hstack([A, -A])
    out = solve(LinearProgram(c=np.ones(6), A_eq=A_split, b_eq=rhs))
    assert out.status == "optimal"
    assert out.value == pytest.approx(_enumerate_bfs_tv(atoms, rhs))
    assert out.value == pytest.approx(1.0)
    w = out.x[:3] - out.x[3:]
    # the optimum is degenerate (any w = (t, 1-2t, t) has TV 1); the returned
    # vertex must meet the moments and the minimal TV exactly
    assert A @ w == pytest.approx(rhs, abs=1e-10)
    assert np.sum(np.abs(w)) == pytest.approx(1.0, abs=1e-10)
    # the point mass at 0 is among the optimal vertices found by enumeration
    assert _enumerate_bfs_tv(atoms, np.array([1.0, 0.0])) == pytest.approx(1.0)


def test_beale_cycling_instance_terminates():
    # classic degenerate instance; optimum -1/20 at x = (1/25, 0, 1, 0)
    c = [-0.75, 150.0, -0.02, 6.0]
    A_ub = [
        [0.25, -60.0, -1.0 / 25.0, 9.0],
        [0.5, -90.0, -1.0 / 50.0, 3.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
    b_ub = [0.0, 0.0, 1.0]
    out = solve(LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub))
    assert out.status == "optimal"
    assert out.value == pytest.approx(-0.05, abs=1e-9)
    assert check_outcome(LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub), out) <= 1e-8


def test_marshall_suurballe_cycling_instance_terminates():
    # degenerate at the origin; the problem is unbounded along (1, 0, 1, 0)
    c = [-2.0, -3.0, 1.0, 12.0]
    A_ub = [
        [-2.0, -9.0, 1.0, 9.0],
        [1.0 / 3.0, 1.0, -1.0 / 3.0, -2.0],
    ]
    b_ub = [0.0, 0.0]
    out = solve(LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub))
    assert out.status == "unbounded"


def test_solution_feasibility_on_random_programs():
    rng = np.random.default_rng(2024)
    for _ in range(25):
        m, n = rng.integers(2, 6), rng.integers(3, 9)
        A = rng.standard_normal((m, n))
        x_feas = rng.uniform(0, 1, n)
        b = A @ x_feas
        c = rng.standard_normal(n)
        p = LinearProgram(c=c, A_eq=A, b_eq=b)
        out = solve(p)
        if out.status == "optimal":
            assert check_outcome(p, out) <= 1e-8
            assert abs(out.value - c @ out.x) <= 1e-8 * (1 + abs(out.value))


def test_weak_duality_certificates():
    # for min c x s.t. A x = b, any y gives a lower bound b' y when A' y <= c;
    # build c so a random y0 is dual feasible by construction
    rng = np.random.default_rng(77)
    for _ in range(15):
        m, n = rng.integers(2, 5), rng.integers(4, 9)
        A = rng.standard_normal((m, n))
        x_feas = rng.uniform(0.1, 1, n)
        b = A @ x_feas
        y0 = rng.standard_normal(m)
        c = A.T @ y0 + rng.uniform(0, 1, n)
        out = solve(LinearProgram(c=c, A_eq=A, b_eq=b))
        assert out.status == "optimal"
        assert out.value >= b @ y0 - 1e-8 * (1 + abs(out.value))


def test_dual_multipliers_reproduce_value():
    rng = np.random.default_rng(5)
    m, n = 3, 7
    A = rng.standard_normal((m, n))
    x_feas = rng.uniform(0.1, 1, n)
    b = A @ x_feas
    c = A.T @ rng.standard_normal(m) + rng.uniform(0.1, 1, n)
    out = solve(LinearProgram(c=c, A_eq=A, b_eq=b))
    assert out.status == "optimal"
    # strong duality: b' pi equals the optimum, and A' pi <= c
    assert b @ out.dual_eq == pytest.approx(out.value, abs=1e-7)
    assert np.all(A.T @ out.dual_eq <= c + 1e-7)


def test_determinism_bitwise():
    rng = np.random.default_rng(123)
    A = rng.standard_normal((4, 12))
    b = A @ rng.uniform(0, 1, 12)
    c = rng.standard_normal(12)
    p1 = solve(LinearProgram(c=c, A_eq=A.copy(), b_eq=b.copy()))
    p2 = solve(LinearProgram(c=c, A_eq=A.copy(), b_eq=b.copy()))
    assert p1.status == p2.status
    assert p1.value == p2.value
    assert np.array_equal(p1.x, p2.x)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        LinearProgram(c=[np.nan], A_ub=[[1.0]], b_ub=[1.0])


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        LinearProgram(c=[1.0, 2.0], A_ub=[[1.0]], b_ub=[1.0])
