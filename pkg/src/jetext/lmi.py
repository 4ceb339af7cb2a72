"""Local Markov inequality checkers at exponent 1.

Three verifiers for the same geometric condition: greedy affine-hull spanning
(staying rho*eps away from the hull of previously chosen points), the band
width of K in a ball (smallest half-width of a slab through x0 containing
K cap B), and the polynomial Markov factor sup |grad P(x0)| over the unit-sup
ball of degree-k polynomials, computed by linear programming.  A scaling
sweep of the Markov factor estimates the inequality exponent, and the
set-level verdict aggregates the spanning sweep over boundary points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .clouds import PointCloud, ball_restrict, boundary_points, dist_to_affine_hull
from .multiindex import enumerate_multiindices, mi_factorial, shifted_monomial, MultiPolynomial

LP_POINT_CAP = 4000       # constraint points per Markov LP before subsampling
SUBSAMPLE_SEED = 7130     # fixed seed for all subsampling in this module
DEGENERATE_RHO = 1e-12


@dataclass(frozen=True)
class SpanningResult:
    x0: np.ndarray
    eps: float
    rho_span: float            # lower-bound certificate for the spanning constant
    witnesses: np.ndarray      # chosen points x_1..x_d (may be fewer if degenerate)
    step_dists: np.ndarray     # hull distance achieved at each step
    degenerate: bool           # fewer than d+1 points in the ball


@dataclass(frozen=True)
class MarkovResult:
    x0: np.ndarray
    eps: float
    degree: int
    factor: float              # max over coordinate directions of sup |d_j P(x0)|
    extremal: MultiPolynomial | None
    direction: int
    unbounded: bool
    # the coordinate-wise max lower-bounds the Euclidean gradient sup within sqrt(d)
    sqrt_d: float = 1.0


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r2: float
    inconclusive: bool = False
    factors: tuple = ()


@dataclass(frozen=True)
class VerdictConfig:
    eps_ladder: tuple = tuple(2.0 ** -k for k in range(3, 10))
    pass_floor: float = 0.05
    decay_slope: float = 0.5
    markov_degree: int = 2
    markov_sample: int = 12    # boundary points per eps for the cross-check
    seed: int = SUBSAMPLE_SEED


@dataclass(frozen=True)
class LMIVerdict:
    label: str
    h: float
    eps_ladder: tuple
    worst_rho: tuple           # min over boundary points, one entry per eps
    verdict: str               # pass | fail | inconclusive
    pass_floor: float
    decay_slope: float | None
    decay_r2: float | None
    markov: ExponentFit | None
    n_boundary: int


def valid_eps_ladder(cloud: PointCloud, ladder) -> tuple:
    """Clip a ladder to the resolution floor: eps >= 8h for grid families,
    eps >= 3 * finest generation scale for fractal iterates."""
    floor = 3 * cloud.resolution if cloud.fractal else 8 * cloud.resolution
    out = tuple(e for e in ladder if e >= floor - 1e-15)
    return out


def spanning_rho(cloud: PointCloud, x0, eps: float) -> SpanningResult:
    """Greedy maximin spanning certificate.

    Step n+1 picks the ball point farthest from the affine hull of the points
    chosen so far.  Greedy yields a valid witness tuple, so rho_span is a
    lower bound for the optimal spanning constant at (x0, eps).
    """
    x0 = np.asarray(x0, dtype=float)
    d = cloud.dim
    idx = ball_restrict(cloud, x0, eps)
    pts = cloud.points[idx]
    if pts.shape[0] < d + 1:
        return SpanningResult(x0, eps, 0.0, pts[:0], np.zeros(0), True)
    chosen = [x0]
    basis = []     # orthonormal directions of the current hull
    dists = []
    witnesses = []
    rel = pts - x0
    for _ in range(d):
        if basis:
            B = np.stack(basis, axis=1)
            resid = rel - (rel @ B) @ B.T
        else:
            resid = rel
        norms = np.linalg.norm(resid, axis=1)
        j = int(np.argmax(norms))
        dist = float(norms[j])
        dists.append(dist)
        witnesses.append(pts[j])
        if dist < DEGENERATE_RHO:
            break
        v = resid[j] / dist
        # re-orthogonalize against the accumulated basis
        for q in basis:
            v = v - np.dot(v, q) * q
        nv = np.linalg.norm(v)
        if nv > 0:
            basis.append(v / nv)
        chosen.append(pts[j])
    while len(dists) < d:
        dists.append(0.0)
    rho = min(dists) / eps
    return SpanningResult(x0, eps, float(rho), np.array(witnesses), np.array(dists), False)


def spanning_rho_exact(cloud: PointCloud, x0, eps: float) -> float:
    """Exact maximin over ordered witness tuples; only for small balls (<= 60
    points).  Test oracle for the greedy lower bound."""
    x0 = np.asarray(x0, dtype=float)
    d = cloud.dim
    idx = ball_restrict(cloud, x0, eps)
    pts = cloud.points[idx]
    m = pts.shape[0]
    if m > 60:
        raise ValueError("exact search is limited to 60 ball points")
    if m < d + 1:
        return 0.0
    if d == 1:
        return float(np.max(np.abs(pts[:, 0] - x0[0]))) / eps
    if d == 2:
        best = 0.0
        d1 = np.linalg.norm(pts - x0, axis=1)
        for i in range(m):
            if d1[i] <= best * eps:
                continue
            for j in range(m):
                if j == i:
                    continue
                d2 = dist_to_affine_hull(pts[j], [x0, pts[i]])
                best = max(best, min(d1[i], d2) / eps)
        return float(best)
    raise NotImplementedError("exact search implemented for d <= 2")


def band_width(cloud: PointCloud, x0, eps: float) -> float:
    """Smallest half-width over unit directions b of the slab
    {|<b, x - x0>| <= w} containing K cap B(x0, eps)."""
    x0 = np.asarray(x0, dtype=float)
    idx = ball_restrict(cloud, x0, eps)
    if len(idx) == 0:
        return 0.0
    rel = cloud.points[idx] - x0
    if cloud.dim == 1:
        return float(np.max(np.abs(rel[:, 0])))
    if cloud.dim != 2:
        raise NotImplementedError("band width implemented for d <= 2")

    def extent(theta):
        b = np.array([np.cos(theta), np.sin(theta)])
        return float(np.max(np.abs(rel @ b)))

    thetas = np.linspace(0.0, np.pi, 3600, endpoint=False)
    proj = rel @ np.stack([np.cos(thetas), np.sin(thetas)])
    vals = np.max(np.abs(proj), axis=0)
    i = int(np.argmin(vals))
    # golden-section refinement around the best angular sample
    lo, hi = thetas[i] - np.pi / 3600, thetas[i] + np.pi / 3600
    gr = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c1 = b - gr * (b - a)
    c2 = a + gr * (b - a)
    f1, f2 = extent(c1), extent(c2)
    for _ in range(60):
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - gr * (b - a)
            f1 = extent(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + gr * (b - a)
            f2 = extent(c2)
    return min(float(vals[i]), f1, f2)


def _global_order(n: int) -> np.ndarray:
    rng = np.random.default_rng(SUBSAMPLE_SEED)
    return rng.permutation(n)


def _constraint_points(cloud: PointCloud, x0, eps: float, cap: int = LP_POINT_CAP) -> np.ndarray:
    """Ball points used as LP constraints: all of them up to the cap, else a
    fixed-order subsample plus the ball's extreme points in 16 directions."""
    idx = ball_restrict(cloud, x0, eps)
    if len(idx) <= cap:
        return idx
    order = _global_order(cloud.n_points)
    in_ball = np.zeros(cloud.n_points, dtype=bool)
    in_ball[idx] = True
    ranked = order[in_ball[order]]
    keep = set(ranked[:cap].tolist())
    rel = cloud.points[idx] - np.asarray(x0, dtype=float)
    for t in range(16):
        theta = 2 * np.pi * t / 16
        b = np.array([np.cos(theta), np.sin(theta)])[: cloud.dim]
        keep.add(int(idx[np.argmax(rel @ b)]))
    return np.array(sorted(keep))


def _sup_ball_lp(cloud: PointCloud, x0, eps: float, k: int, objective_rank: int):
    """max c_alpha over polynomials with |P| <= 1 on the sampled ball, in the
    scaled basis ((y - x0)/eps)^alpha.

    Solved through the total-mass dual (few rows, one column per signed
    constraint); the simplex multipliers of the dual are the extremal
    coefficients.  Returns (value, coeffs) or (inf, None) when unbounded.
    """
    x0 = np.asarray(x0, dtype=float)
    alphas = enumerate_multiindices(cloud.dim, k)
    idx = _constraint_points(cloud, x0, eps)
    if len(idx) == 0:
        return np.inf, None
    scaled = (cloud.points[idx] - x0) / eps
    V = np.empty((len(idx), len(alphas)))
    for a_i, a in enumerate(alphas):
        col = np.ones(len(idx))
        for j, aj in enumerate(a):
            if aj:
                col = col * scaled[:, j] ** aj
        V[:, a_i] = col
    g = np.zeros(len(alphas))
    g[objective_rank] = 1.0
    A_eq = np.hstack([V.T, -V.T])
    out = lp.solve(lp.LinearProgram(c=np.ones(2 * len(idx)), A_eq=A_eq, b_eq=g))
    if out.status == "infeasible":
        return np.inf, None     # the primal maximum is unbounded
    if out.status != "optimal":
        raise lp.LPError(f"unexpected LP status {out.status}")
    return float(out.value), np.asarray(out.dual_eq)


def _scaled_coeffs_to_poly(cloud_dim: int, k: int, coeffs, x0, eps: float) -> MultiPolynomial:
    alphas = enumerate_multiindices(cloud_dim, k)
    terms = {}
    for a, c in zip(alphas, coeffs):
        if c == 0.0:
            continue
        scale = c / eps ** sum(a)
        for b, cb in shifted_monomial(cloud_dim, a, x0).items():
            terms[b] = terms.get(b, 0.0) + scale * cb
    return MultiPolynomial.from_dict(cloud_dim, terms)


def markov_factor(cloud: PointCloud, x0, eps: float, k: int) -> MarkovResult:
    """sup |d_j P(x0)| over coordinate directions j and degree-k polynomials
    bounded by 1 on the sampled ball."""
    x0 = np.asarray(x0, dtype=float)
    if k == 0:
        return MarkovResult(x0, eps, 0, 0.0, MultiPolynomial.constant(cloud.dim, 1.0), -1,
                            False, math.sqrt(cloud.dim))
    alphas = enumerate_multiindices(cloud.dim, k)
    rank = {a: i for i, a in enumerate(alphas)}
    best = -np.inf
    best_dir = -1
    best_coeffs = None
    for j in range(cloud.dim):
        e_j = tuple(1 if t == j else 0 for t in range(cloud.dim))
        value, coeffs = _sup_ball_lp(cloud, x0, eps, k, rank[e_j])
        if value == np.inf:
            return MarkovResult(x0, eps, k, np.inf, None, j, True, math.sqrt(cloud.dim))
        factor = value / eps
        if factor > best:
            best, best_dir, best_coeffs = factor, j, coeffs
    extremal = _scaled_coeffs_to_poly(cloud.dim, k, best_coeffs, x0, eps)
    return MarkovResult(x0, eps, k, float(best), extremal, best_dir, False, math.sqrt(cloud.dim))


def higher_order_markov_factor(cloud: PointCloud, x0, eps: float, k: int, alpha) -> float:
    """max |d^alpha P(x0)| over degree-k polynomials bounded by 1 on the
    sampled ball; infinity when the ball cannot bound the functional."""
    alpha = tuple(alpha)
    if sum(alpha) > k:
        raise ValueError("|alpha| must be <= k")
    alphas = enumerate_multiindices(cloud.dim, k)
    rank = {a: i for i, a in enumerate(alphas)}
    value, _ = _sup_ball_lp(cloud, x0, eps, k, rank[alpha])
    if value == np.inf:
        return np.inf
    return float(value * mi_factorial(alpha) / eps ** sum(alpha))


def fit_loglog(xs, ys):
    """Least squares fit of log(y) against log(x): (slope, intercept, r2)."""
    u = np.log(np.asarray(xs, dtype=float))
    v = np.log(np.asarray(ys, dtype=float))
    if len(u) < 2:
        raise ValueError("fit needs at least two points")
    A = np.stack([u, np.ones_like(u)], axis=1)
    sol, *_ = np.linalg.lstsq(A, v, rcond=None)
    pred = A @ sol
    ss_res = float(np.sum((v - pred) ** 2))
    ss_tot = float(np.sum((v - np.mean(v)) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(sol[0]), float(sol[1]), r2


def markov_exponent(cloud: PointCloud, k: int, eps_ladder, x0s=None,
                    sample: int = 12, seed: int = SUBSAMPLE_SEED) -> ExponentFit:
    """Slope of log M(eps) against log(1/eps), M the worst markov_factor over
    boundary points (or the given x0 list)."""
    ladder = sorted(eps_ladder, reverse=True)
    if len(ladder) < 2:
        raise ValueError("exponent fit needs at least two eps values")
    if x0s is None:
        bnd = boundary_points(cloud)
        if bnd.n_points > sample:
            rng = np.random.default_rng(seed)
            sel = np.sort(rng.choice(bnd.n_points, size=sample, replace=False))
            x0s = bnd.points[sel]
        else:
            x0s = bnd.points
    factors = []
    for eps in ladder:
        worst = 0.0
        for x0 in x0s:
            res = markov_factor(cloud, x0, eps, k)
            if res.unbounded:
                return ExponentFit(float("nan"), float("nan"), 0.0, True, tuple())
            worst = max(worst, res.factor)
        factors.append(worst)
    slope, intercept, r2 = fit_loglog([1.0 / e for e in ladder], factors)
    return ExponentFit(slope, intercept, r2, False, tuple(factors))


def lmi1_verdict(cloud: PointCloud, config: VerdictConfig = VerdictConfig()) -> LMIVerdict:
    """Sweep boundary points and the eps ladder with the spanning certificate.

    pass: the worst rho_span stays above the configured floor on the whole
    ladder.  fail: a demonstrated decay trend (fitted slope of log worst-rho
    against log eps at least the configured threshold) or exact degeneracy at
    some valid scale.  Everything else is inconclusive.  A Markov-factor
    exponent fit at degree markov_degree is attached as a cross-check.
    """
    ladder = valid_eps_ladder(cloud, config.eps_ladder)
    if not ladder:
        raise ValueError("no valid eps values for this resolution")
    bnd = boundary_points(cloud)
    worst = []
    for eps in ladder:
        rhos = [spanning_rho(cloud, x0, eps).rho_span for x0 in bnd.points]
        worst.append(float(min(rhos)))
    worst_arr = np.array(worst)
    decay_slope = None
    decay_r2 = None
    if np.min(worst_arr) >= config.pass_floor:
        verdict = "pass"
    else:
        pos = worst_arr > DEGENERATE_RHO
        has_zero = bool(np.any(~pos))
        if np.sum(pos) >= 2:
            decay_slope, _, decay_r2 = fit_loglog(np.array(ladder)[pos], worst_arr[pos])
        if has_zero or (decay_slope is not None and decay_slope >= config.decay_slope):
            verdict = "fail"
        else:
            verdict = "inconclusive"
    try:
        markov = markov_exponent(cloud, config.markov_degree, ladder,
                                 sample=config.markov_sample, seed=config.seed)
    except ValueError:
        markov = None
    return LMIVerdict(cloud.label, cloud.resolution, tuple(ladder), tuple(worst_arr),
                      verdict, config.pass_floor, decay_slope, decay_r2, markov,
                      bnd.n_points)


def sweep_table(cloud: PointCloud, eps_ladder, k: int, x0s=None, sample: int = 12,
                seed: int = SUBSAMPLE_SEED):
    """Rows (x0, eps, rho_span, band_width, M_k) for plotting."""
    if x0s is None:
        bnd = boundary_points(cloud)
        if bnd.n_points > sample:
            rng = np.random.default_rng(seed)
            sel = np.sort(rng.choice(bnd.n_points, size=sample, replace=False))
            x0s = bnd.points[sel]
        else:
            x0s = bnd.points
    rows = []
    for x0 in x0s:
        for eps in eps_ladder:
            rho = spanning_rho(cloud, x0, eps).rho_span
            bw = band_width(cloud, x0, eps)
            mk = markov_factor(cloud, x0, eps, k)
            rows.append((tuple(float(c) for c in x0), float(eps), float(rho), float(bw),
                         float(mk.factor) if not mk.unbounded else float("inf")))
    return rows
