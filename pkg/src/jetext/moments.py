"""Radial weight construction, blow-up sets, moment measures by
total-variation-minimizing LP, the derivative-interpolating functionals, and
the full extension operator built from order-0 data alone.

The weight is piecewise |y|^(k-1) on (R_{k-1}, R_k] with R_k the smallest
power of two satisfying the two recursion inequalities (driven by annulus and
blow-up Markov constants); it grows superpolynomially, which tames the moment
problem on the unbounded blow-up set.  Radii explode doubly exponentially, so
they are kept as exponents and all weight evaluations go through logs.

Moment measures are solved near-first: the LP over the rescaled cloud atoms
is tried alone, and the far radial shells enter only when the near atoms
cannot span the moments (degenerate sets).  This keeps the measures usable by
the near-field functionals while still exposing the total-variation blow-up
that signals a failing set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .clouds import PointCloud, boundary_points
from .jets import Jet
from .multiindex import enumerate_multiindices, mi_factorial, mi_leq, mi_rank, mi_sub
from .whitney import WhitneyDecomposition, PartitionOfUnity

FAR_DECAY_TOL = 1e-12
MODULE_SEED = 90210
MAX_LOG2_RADIUS = 1000.0    # atom coordinates must stay inside float64


class MomentInfeasible(RuntimeError):
    """The truncated moment problem has no solution on the given sample."""


# ---------------------------------------------------------------------------
# radial weight

def default_eps_alpha(alpha) -> float:
    """Margin family for the derivative bounds: 1 / (alpha! 2^|alpha|)."""
    return 1.0 / (mi_factorial(alpha) * 2.0 ** sum(alpha))


def _min_eps_alpha_log2(k: int) -> float:
    # min over |alpha| = k of the default family; the worst alpha is (k,0,...)
    return -(math.log2(math.factorial(k)) + k)


@dataclass(frozen=True)
class RadialWeight:
    """Piecewise-power radial weight with geometric blending at breakpoints.

    rho(0) = eps0/2, rho = eps0/2 on [0, 1], rho(r) = r^(k-1) on
    (R_{k-1}, R_k] with R_0 = 1, and the last exponent continues past R_kmax.
    Each jump is bridged from below by a geometric (log-linear) ramp over the
    first 10 percent after the breakpoint, so the weight is continuous and
    nondecreasing.  R_k = 2^exponents[k-1]; exponents can exceed the float
    range, hence the log-space evaluation.
    """

    eps0: float
    exponents: tuple          # integer log2 R_k for k = 1..k_max
    constants: tuple          # the C_k that produced the radii
    delta: float
    blend: float = 0.1

    @property
    def k_max(self) -> int:
        return len(self.exponents)

    def piece_exponent(self, log2_r: float) -> int:
        """Power of the raw piece at radius 2^log2_r (ignoring blends)."""
        if log2_r <= 0:
            return 0
        for k, e in enumerate(self.exponents, start=1):
            if log2_r <= e:
                return k - 1
        return self.k_max - 1

    def log_value(self, r):
        """Natural log of rho at radius r (scalar or array), stable for huge r."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.empty_like(r)
        log_half_eps0 = math.log(self.eps0 / 2.0)
        ln2 = math.log(2.0)
        breaks = [0.0] + [float(e) for e in self.exponents]   # log2 R_k, k = 0..k_max
        for i, rv in enumerate(r):
            if rv <= 1.0:
                out[i] = log_half_eps0
                continue
            l2 = math.log2(rv)
            # locate the raw piece: exponent k on (R_k, R_{k+1}]
            k = self.k_max - 1
            for j in range(len(breaks) - 1):
                if breaks[j] < l2 <= breaks[j + 1]:
                    k = j
                    break
            # left edge value at R_k (previous piece, or the constant head)
            bk = breaks[k]
            left = log_half_eps0 if k == 0 else (k - 1) * bk * ln2
            raw = k * l2 * ln2
            width = math.log2(1.0 + self.blend)
            if l2 < bk + width:
                t = (2.0 ** (l2 - bk) - 1.0) / self.blend
                out[i] = (1.0 - t) * left + t * raw
            else:
                out[i] = raw
        return float(out[0]) if scalar else out

    def value(self, r):
        """rho(r); overflows to inf past the float range (use log_value there)."""
        return np.exp(self.log_value(r))

    def decay_radius_log2(self, n: int) -> float | None:
        """Smallest log2 r on a 1/4-step grid with max_{|b|<=n} r^|b|/rho(r)
        below the far-field tolerance, or None if the weight never gets there."""
        if self.k_max < n + 2:
            return None
        target = math.log(FAR_DECAY_TOL)
        start = 0.25
        stop = min(float(self.exponents[-1]) + 64.0, MAX_LOG2_RADIUS)
        ln2 = math.log(2.0)
        g = start
        while g <= stop:
            r_ok = True
            lv = self.log_value(2.0 ** g) if g < MAX_LOG2_RADIUS else None
            if lv is None:
                return None
            for b in range(n + 1):
                if b * g * ln2 - lv >= target:
                    r_ok = False
                    break
            if r_ok:
                return g
            g += 0.25
        return None


def build_weight(constants, k_max: int | None = None, delta: float = 0.5,
                 eps0: float = 1.0) -> RadialWeight:
    """Choose R_k as the smallest power of two exceeding R_{k-1} with

        C_k / R_k < min{eps_alpha : |alpha| = k}   and
        C_k / R_k < delta * eps0 / (2 R_{k-1}^k).
    """
    constants = [float(c) for c in constants]
    if k_max is None:
        k_max = len(constants)
    if len(constants) < k_max:
        raise ValueError("need one constant per degree up to k_max")
    if not all(np.isfinite(constants[:k_max])):
        raise ValueError("Markov constants must be finite")
    exps = []
    e_prev = 0  # R_0 = 1
    for k in range(1, k_max + 1):
        ck = constants[k - 1]
        bound1 = math.log2(ck) - _min_eps_alpha_log2(k)
        bound2 = math.log2(ck) + 1.0 + k * e_prev - math.log2(delta * eps0)
        e_k = int(math.floor(max(bound1, bound2, float(e_prev)))) + 1
        # enforce strictness against float slop in the bounds
        while not (math.log2(ck) - e_k < _min_eps_alpha_log2(k)
                   and math.log2(ck) - e_k < math.log2(delta * eps0) - 1.0 - k * e_prev):
            e_k += 1
        exps.append(e_k)
        e_prev = e_k
    return RadialWeight(eps0, tuple(exps), tuple(constants[:k_max]), delta)


# ---------------------------------------------------------------------------
# Markov constants feeding the weight

def _annulus_samples(d: int, rho: float, n_radial: int = 48, n_angular: int = 64) -> np.ndarray:
    radii = np.linspace(1.0, rho, n_radial)
    if d == 1:
        return np.concatenate([radii, -radii])[:, None]
    thetas = np.linspace(0.0, 2 * np.pi, n_angular, endpoint=False)
    pts = np.stack([np.outer(radii, np.cos(thetas)).ravel(),
                    np.outer(radii, np.sin(thetas)).ravel()], axis=1)
    return pts


def _max_functional_lp(points: np.ndarray, k: int, objective_rank: int, scale: float):
    """max c_alpha over polynomials with |P| <= 1 on the points, in the basis
    (y/scale)^alpha.  Returns the optimum or inf when unbounded."""
    d = points.shape[1]
    alphas = enumerate_multiindices(d, k)
    scaled = points / scale
    V = np.empty((points.shape[0], len(alphas)))
    for i, a in enumerate(alphas):
        col = np.ones(points.shape[0])
        for j, aj in enumerate(a):
            if aj:
                col = col * scaled[:, j] ** aj
        V[:, i] = col
    g = np.zeros(len(alphas))
    g[objective_rank] = 1.0
    out = lp.solve(lp.LinearProgram(c=np.ones(2 * points.shape[0]),
                                    A_eq=np.hstack([V.T, -V.T]), b_eq=g))
    if out.status == "infeasible":
        return np.inf
    return float(out.value)


def annulus_markov_constant(k: int, d: int = 1, rho: float = 2.0) -> float:
    """Smallest C with sum_{|a|<=k} |d^a Q(0)|/a! rho^|a| <= C sup_{1<=|y|<=rho} |Q|,
    estimated by one LP per derivative functional and doubled as a margin."""
    if k < 0:
        raise ValueError("k must be >= 0")
    pts = _annulus_samples(d, rho)
    alphas = enumerate_multiindices(d, k)
    total = 0.0
    for i, a in enumerate(alphas):
        # functional |d^a Q(0)| / a! * rho^|a| = |c_a| rho^|a|; in the
        # (y/rho)^a basis the scaled coefficient is exactly c_a rho^|a|
        val = _max_functional_lp(pts, k, i, rho)
        if val == np.inf:
            raise lp.LPError("annulus LP unbounded; sampling too sparse")
        total += val
    return 2.0 * total


@dataclass(frozen=True)
class CkEstimate:
    value: float
    n_samples: int
    n_unbounded: int


def estimate_Ck(cloud: PointCloud, k: int, eps_list=(2.0 ** -3, 2.0 ** -5),
                r_list=(1.0, 2.0, 4.0, 16.0, 64.0), n_boundary: int = 4,
                seed: int = MODULE_SEED) -> CkEstimate:
    """Uniform Markov constant for the top-degree derivatives on blow-ups:

        sum_{|a|=k} |d^a P(0)|/a!  <=  (C_k / r^k) sup{|P(y)| : y in A, |y| <= r}

    estimated as a sup of per-sample LP values over (x, eps, r), doubled.
    Inner LPs that come back unbounded (sets too thin at that scale) are
    excluded and counted."""
    if k == 0:
        return CkEstimate(1.0, 1, 0)
    bnd = boundary_points(cloud)
    rng = np.random.default_rng(seed)
    if bnd.n_points > n_boundary:
        sel = np.sort(rng.choice(bnd.n_points, size=n_boundary, replace=False))
        xs = bnd.points[sel]
    else:
        xs = bnd.points
    alphas = enumerate_multiindices(cloud.dim, k)
    top = [i for i, a in enumerate(alphas) if sum(a) == k]
    worst = 0.0
    n_samples = 0
    n_unbounded = 0
    for x in xs:
        for eps in eps_list:
            near = (cloud.points - x[None, :]) / eps
            for r in r_list:
                sel_near = near[np.linalg.norm(near, axis=1) <= r]
                pts = [sel_near]
                if r > 1.0 / eps:
                    radii = np.geomspace(1.0 / eps, r, 16)
                    if cloud.dim == 1:
                        pts.append(np.concatenate([radii, -radii])[:, None])
                    else:
                        th = np.linspace(0, 2 * np.pi, 32, endpoint=False)
                        pts.append(np.stack([np.outer(radii, np.cos(th)).ravel(),
                                             np.outer(radii, np.sin(th)).ravel()], axis=1))
                sample = np.concatenate(pts, axis=0)
                if sample.shape[0] < len(alphas):
                    continue
                n_samples += 1
                total = 0.0
                unbounded = False
                for i in top:
                    val = _max_functional_lp(sample, k, i, r)
                    if val == np.inf:
                        unbounded = True
                        break
                    total += val    # scaled basis gives c_a r^k directly
                if unbounded:
                    n_unbounded += 1
                    continue
                worst = max(worst, total)
    if n_samples == 0 or worst == 0.0:
        raise MomentInfeasible("no bounded Markov sample at this resolution")
    return CkEstimate(2.0 * worst, n_samples, n_unbounded)


def weight_for_cloud(cloud: PointCloud, k_max: int = 6, delta: float = 0.5,
                     eps0: float = 1.0, constants=None) -> RadialWeight:
    """Build the radial weight from per-degree constants (estimated from the
    cloud by default, config-overridable)."""
    if constants is None:
        constants = []
        for k in range(1, k_max + 1):
            if k <= 2:
                try:
                    constants.append(estimate_Ck(cloud, k).value)
                except (MomentInfeasible, lp.LPError):
                    constants.append(2.0 ** k)
            else:
                # top degrees: the annulus constant is resolution-independent
                constants.append(annulus_markov_constant(k, cloud.dim))
    return build_weight(constants, k_max, delta, eps0)


# ---------------------------------------------------------------------------
# blow-up samples and moment measures

@dataclass(frozen=True)
class BlowupSample:
    """Atoms of the rescaled set (near) plus radial shells of the far region."""

    x: np.ndarray
    eps: float
    near: np.ndarray            # (m, d), exactly the rescaled cloud
    near_log_rho: np.ndarray
    far: np.ndarray             # (mf, d) shell atoms, possibly empty
    far_log_rho: np.ndarray
    far_quadrature: np.ndarray  # shell measure seeds (r^(d-1) dr), not LP data
    far_empty_flag: bool        # far field could not be built

    @property
    def dim(self) -> int:
        return self.near.shape[1]


def blowup_sample(cloud: PointCloud, x, eps: float, weight: RadialWeight,
                  truncation: int, n_shells: int = 48, n_angles: int = 64) -> BlowupSample:
    """Sample A = eps^-1 (K - x) union {|y| >= eps^-1} up to the radius where
    every monomial of order <= truncation decays below tolerance against rho."""
    x = np.asarray(x, dtype=float)
    near = (cloud.points - x[None, :]) / eps
    near_lr = weight.log_value(np.linalg.norm(near, axis=1))
    r_lo_log2 = math.log2(1.0 / eps)
    cut = weight.decay_radius_log2(truncation)
    if cut is None or cut <= r_lo_log2:
        far = np.zeros((0, cloud.dim))
        return BlowupSample(x, eps, near, near_lr, far, np.zeros(0), np.zeros(0),
                            far_empty_flag=True)
    log2_radii = np.linspace(r_lo_log2, cut, n_shells)
    radii = 2.0 ** log2_radii
    if cloud.dim == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        th = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=1)
    far = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, cloud.dim)
    far_r = np.repeat(radii, len(dirs))
    far_lr = weight.log_value(far_r)
    dr = np.gradient(radii)
    qw = np.repeat(radii ** (cloud.dim - 1) * dr, len(dirs)) / len(dirs)
    return BlowupSample(x, eps, near, near_lr, far, far_lr, qw, far_empty_flag=False)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Signed atomic measure on a blow-up sample with its rho-weighted moments."""

    alpha: tuple
    x: np.ndarray
    eps: float
    atoms: np.ndarray
    weights: np.ndarray
    log_rho: np.ndarray
    near_count: int
    total_variation: float
    residual: float             # worst moment violation
    stage: str                  # "near" or "near+far"

    def moment(self, beta) -> float:
        col = _moment_column(self.atoms, self.log_rho, beta)
        return float(col @ self.weights)


def _moment_column(atoms: np.ndarray, log_rho: np.ndarray, beta) -> np.ndarray:
    """y^beta / rho(y) per atom, computed in log space to survive huge radii."""
    beta = tuple(beta)
    m = atoms.shape[0]
    if m == 0:
        return np.zeros(0)
    log_mag = -log_rho.copy()
    sign = np.ones(m)
    zero = np.zeros(m, dtype=bool)
    for j, bj in enumerate(beta):
        if bj == 0:
            continue
        col = atoms[:, j]
        zero |= col == 0.0
        with np.errstate(divide="ignore"):
            log_mag = log_mag + bj * np.log(np.abs(col))
        sign = sign * np.sign(col) ** bj
    out = sign * np.exp(log_mag)
    out[zero & (np.array(sum(beta)) > 0)] = np.where(
        np.any(atoms[zero] != 0.0, axis=1) if np.any(zero) else False, out[zero], out[zero])
    out[zero] = 0.0
    if sum(beta) == 0:
        out = np.exp(-log_rho)
    return out


def solve_moment_lp(sample: BlowupSample, weight: RadialWeight, alpha,
                    N: int) -> DiscreteMeasure:
    """Minimum total variation measure with rho-weighted moments
    alpha! [beta == alpha] for all |beta| <= N.

    Near atoms are tried alone first; the far shells join only when the near
    problem is infeasible.  Signed weights are split into nonnegative pairs.
    """
    alpha = tuple(alpha)
    if sum(alpha) > N:
        raise ValueError("|alpha| must be <= N")
    d = sample.dim
    betas = enumerate_multiindices(d, N)
    rhs = np.zeros(len(betas))
    rhs[betas.index(alpha)] = mi_factorial(alpha)

    def attempt(atoms, log_rho):
        Phi = np.stack([_moment_column(atoms, log_rho, b) for b in betas])
        scales = np.maximum(np.max(np.abs(Phi), axis=1), 1e-300)
        Phi_s = Phi / scales[:, None]
        rhs_s = rhs / scales
        out = lp.solve(lp.LinearProgram(c=np.ones(2 * atoms.shape[0]),
                                        A_eq=np.hstack([Phi_s, -Phi_s]), b_eq=rhs_s))
        if out.status != "optimal":
            return None
        w = out.x[:atoms.shape[0]] - out.x[atoms.shape[0]:]
        support = np.nonzero(np.abs(w) > 1e-14)[0]
        if 0 < len(support) <= len(betas):
            # refine the basic solution in the original row scaling
            sol, *_ = np.linalg.lstsq(Phi[:, support], rhs, rcond=None)
            w2 = np.zeros_like(w)
            w2[support] = sol
            if np.max(np.abs(Phi @ w2 - rhs)) <= np.max(np.abs(Phi @ w - rhs)):
                w = w2
        res = float(np.max(np.abs(Phi @ w - rhs)))
        return w, res

    got = attempt(sample.near, sample.near_log_rho)
    if got is not None:
        w, res = got
        return DiscreteMeasure(alpha, sample.x, sample.eps, sample.near, w,
                               sample.near_log_rho, sample.near.shape[0],
                               float(np.sum(np.abs(w))), res, "near")
    if sample.far.shape[0] == 0:
        raise MomentInfeasible(f"moment problem for alpha={alpha} infeasible (no far field)")
    atoms = np.concatenate([sample.near, sample.far], axis=0)
    log_rho = np.concatenate([sample.near_log_rho, sample.far_log_rho])
    got = attempt(atoms, log_rho)
    if got is None:
        raise MomentInfeasible(f"moment problem for alpha={alpha} infeasible")
    w, res = got
    return DiscreteMeasure(alpha, sample.x, sample.eps, atoms, w, log_rho,
                           sample.near.shape[0], float(np.sum(np.abs(w))), res, "near+far")


def nu_eval(measure: DiscreteMeasure, f_vals) -> float:
    """The interpolation functional: sum over near atoms of
    w_j f(eps y_j + x) / rho(y_j).  The far field is cut off.

    Near atoms correspond one-to-one with the cloud points, so f is passed as
    its value vector on the cloud (a callable is also accepted)."""
    m = measure.near_count
    w = measure.weights[:m]
    lr = measure.log_rho[:m]
    if callable(f_vals):
        pts = measure.atoms[:m] * measure.eps + measure.x[None, :]
        fv = np.asarray(f_vals(pts), dtype=float)
    else:
        fv = np.asarray(f_vals, dtype=float)
        if fv.shape != (m,):
            raise ValueError("f values must align with the cloud")
    return float(np.sum(w * fv * np.exp(-lr)))


# ---------------------------------------------------------------------------
# the full operator

@dataclass
class CubeMeasures:
    nearest_idx: int
    gamma: float
    cap: int
    measures: dict           # alpha -> DiscreteMeasure
    infeasible: tuple        # alphas that failed


class ExtensionBuilder:
    """Per-cube moment measures for a decomposition; measures are cached by
    (nearest point, gap) and shared by every jet extended afterwards."""

    def __init__(self, dec: WhitneyDecomposition, weight: RadialWeight, n_max: int = 4,
                 n_shells: int = 48, n_angles: int = 64):
        self.dec = dec
        self.weight = weight
        self.n_max = n_max
        self.pou = PartitionOfUnity(dec)
        cloud = dec.cloud
        groups = {}
        for ci, cube in enumerate(dec.cubes):
            cap = min(cube.index, n_max)
            key = (cube.nearest_idx, round(cube.gamma, 12))
            if key in groups:
                groups[key].cap = max(groups[key].cap, cap)
            else:
                groups[key] = CubeMeasures(cube.nearest_idx, cube.gamma, cap, {}, ())
            groups.setdefault("_members", None)
        groups.pop("_members", None)
        self.cube_key = {ci: (c.nearest_idx, round(c.gamma, 12)) for ci, c in enumerate(dec.cubes)}
        self.groups = groups
        self.flagged_cubes = []
        for key, grp in groups.items():
            x_i = cloud.points[grp.nearest_idx]
            sample = blowup_sample(cloud, x_i, grp.gamma, weight, n_max,
                                   n_shells=n_shells, n_angles=n_angles)
            bad = []
            for a in enumerate_multiindices(cloud.dim, grp.cap):
                try:
                    grp.measures[a] = solve_moment_lp(sample, weight, a, n_max)
                except MomentInfeasible:
                    bad.append(a)
            grp.infeasible = tuple(bad)
        for ci, cube in enumerate(dec.cubes):
            if self.groups[self.cube_key[ci]].infeasible:
                self.flagged_cubes.append(cube.index)

    def extend(self, f0_vals: np.ndarray, label: str = "") -> "FullExtension":
        f0_vals = np.asarray(f0_vals, dtype=float)
        if f0_vals.shape != (self.dec.cloud.n_points,):
            raise ValueError("f0 must be a value per cloud point")
        coeff = {}
        for key, grp in self.groups.items():
            mus = {}
            for a, meas in grp.measures.items():
                mus[a] = nu_eval(meas, f0_vals) / grp.gamma ** sum(a)
            coeff[key] = mus
        return FullExtension(self, f0_vals, coeff, label)


class FullExtension:
    """E(f): f^(0) on K; off K the partition average of the moment-coefficient
    polynomials sum_{|a|<=min(i, N_max)} mu_{a,i}/a! (x - x_i)^a."""

    def __init__(self, builder: ExtensionBuilder, f0_vals, coeff, label=""):
        self.builder = builder
        self.dec = builder.dec
        self.f0 = f0_vals
        self.coeff = coeff
        self.label = label

    def _poly_deriv(self, ci: int, delta, x: np.ndarray) -> float:
        dec = self.dec
        cube = dec.cubes[ci]
        cap = min(cube.index, self.builder.n_max)
        mus = self.coeff[self.builder.cube_key[ci]]
        x_i = dec.cloud.points[cube.nearest_idx]
        diff = x - x_i
        acc = 0.0
        for a in enumerate_multiindices(dec.d, cap):
            if a not in mus or not mi_leq(delta, a):
                continue
            rest = mi_sub(a, delta)
            term = mus[a] / mi_factorial(rest)
            for j, rj in enumerate(rest):
                if rj:
                    term *= diff[j] ** rj
            acc += term
        return acc

    def __call__(self, x, beta=None) -> float:
        x = np.asarray(x, dtype=float)
        d = self.dec.d
        beta = tuple([0] * d) if beta is None else tuple(beta)
        dist, ni = self.dec.cloud.nearest(x)
        if dist <= 1e-12:
            if sum(beta) == 0:
                return float(self.f0[ni])
            raise ValueError("derivatives of E are defined off K only")
        phis = self.builder.pou.phi_derivs(x, sum(beta))
        acc = 0.0
        for ci, p in phis.items():
            for g in enumerate_multiindices(d, sum(beta)):
                if not mi_leq(g, beta):
                    continue
                binom = 1.0
                for bj, gj in zip(beta, g):
                    binom *= math.comb(bj, gj)
                acc += binom * p[g] * self._poly_deriv(ci, mi_sub(beta, g), x)
        return float(acc)


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    sup_low: float        # |alpha| <= n, |nu - eps^|a| f^(a)(x)| / eps^n
    sup_high: float       # |alpha| > n, |nu| / eps^n


def convergence_report(jets, cloud: PointCloud, weight: RadialWeight, n: int,
                       eps_ladder, n_max: int = 4, n_boundary: int = 8,
                       seed: int = MODULE_SEED, n_shells: int = 48):
    """The two suprema of the derivative-interpolation limits, per ladder
    value, over sampled boundary points and the given jets."""
    bnd = boundary_points(cloud)
    rng = np.random.default_rng(seed)
    if bnd.n_points > n_boundary:
        sel = np.sort(rng.choice(bnd.n_points, size=n_boundary, replace=False))
        xs = bnd.points[sel]
    else:
        xs = bnd.points
    # map each sampled boundary point to its cloud index for jet values
    _, x_idx = cloud.nearest(xs)
    alphas = enumerate_multiindices(cloud.dim, n_max)
    rows = []
    for eps in sorted(eps_ladder, reverse=True):
        sup_low = 0.0
        sup_high = 0.0
        for x, xi in zip(xs, x_idx):
            sample = blowup_sample(cloud, x, eps, weight, n_max, n_shells=n_shells)
            for a in alphas:
                try:
                    meas = solve_moment_lp(sample, weight, a, n_max)
                except MomentInfeasible:
                    continue
                for jet in jets:
                    nu = nu_eval(meas, jet.values[0])
                    if sum(a) <= n:
                        ref = eps ** sum(a) * jet.value(a, int(xi))
                        sup_low = max(sup_low, abs(nu - ref) / eps ** n)
                    else:
                        sup_high = max(sup_high, abs(nu) / eps ** n)
        rows.append(ConvergenceRow(float(eps), sup_low, sup_high))
    mono_low = all(a.sup_low >= b.sup_low for a, b in zip(rows, rows[1:]))
    mono_high = all(a.sup_high >= b.sup_high for a, b in zip(rows, rows[1:]))
    return {"rows": rows, "monotone_low": mono_low, "monotone_high": mono_high}


def continuity_report(evaluators, norms, n: int, grid_points):
    """max over the corpus of sup_grid |d^beta E(f)| / ||f||_n for |beta| <= n."""
    d = grid_points.shape[1]
    betas = enumerate_multiindices(d, n)
    per_beta = {b: 0.0 for b in betas}
    per_jet = []
    for E, norm in zip(evaluators, norms):
        worst = 0.0
        for x in grid_points:
            for b in betas:
                v = abs(E(x, b)) / norm
                per_beta[b] = max(per_beta[b], v)
                worst = max(worst, v)
        per_jet.append(worst)
    return {"max_ratio": max(per_jet) if per_jet else 0.0,
            "per_beta": per_beta, "per_jet": per_jet}
