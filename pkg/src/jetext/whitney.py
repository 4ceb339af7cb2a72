"""Whitney cube decomposition of the complement, the smooth partition of
unity subordinate to the dilated cubes, and the classical finite-order
extension operator.

Construction: maximal dyadic cubes Q in Omega with 2 diam(Q) <= dist(Q, K)
(the distance then automatically stays <= 8 diam(Q)); complete sibling groups
are merged into their parent whenever the parent still satisfies
diam <= dist.  Supports are the cubes dilated by a fixed factor, which keeps
diam(supp) <= 2 dist(supp, K) exactly and bounds the overlap.  Cube sides are
floored at the first dyadic level >= 2h, and the uncovered collar next to K
is reported as the truncation width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clouds import PointCloud
from .jets import Jet
from .multiindex import enumerate_multiindices, mi_factorial, mi_leq, mi_rank, mi_sub

DILATION = 9.0 / 8.0     # support half-width = DILATION * side / 2
MAX_BUMP_ORDER = 4


# ---------------------------------------------------------------------------
# 1-d bump profile chi(t) = exp(-1/(1 - t^2)) on (-1, 1) and its derivatives.
# chi^(k)(t) = P_k(t) / (1 - t^2)^(2k) * chi(t) with polynomial P_k obtained
# by differentiating the rational prefactor.

def _bump_tables(max_order: int):
    # rational functions stored as (numerator coeffs (lowest first), power m)
    # representing P(t) / (1 - t^2)^m
    tables = [(np.array([1.0]), 0)]
    for _ in range(max_order):
        P, m = tables[-1]
        # derivative of P/(1-t^2)^m: (P' (1-t^2) + 2 m t P) / (1-t^2)^(m+1)
        dP = np.polynomial.polynomial.polyder(P) if len(P) > 1 else np.array([0.0])
        term1 = np.polynomial.polynomial.polymul(dP, np.array([1.0, 0.0, -1.0]))
        term2 = 2 * m * np.polynomial.polynomial.polymul(np.array([0.0, 1.0]), P)
        num = np.polynomial.polynomial.polyadd(term1, term2)
        # product with chi' prefactor -2t/(1-t^2)^2: P/(1-t^2)^m * (-2t)/(1-t^2)^2
        chain = np.polynomial.polynomial.polymul(P, np.array([0.0, -2.0]))
        # align: d/dt [P/(1-u)^m chi] = [num/(1-u)^(m+1) + chain/(1-u)^(m+2)] chi
        num_full = np.polynomial.polynomial.polyadd(
            np.polynomial.polynomial.polymul(num, np.array([1.0, 0.0, -1.0])), chain)
        tables.append((num_full, m + 2))
    return tables

_BUMP = _bump_tables(MAX_BUMP_ORDER)


def bump_value(t: np.ndarray, order: int = 0) -> np.ndarray:
    """chi^(order)(t) evaluated stably (0 outside |t| < 1)."""
    t = np.asarray(t, dtype=float)
    P, m = _BUMP[order]
    u = 1.0 - t * t
    inside = u > 1e-14
    out = np.zeros_like(t)
    if np.any(inside):
        ui = u[inside]
        ti = t[inside]
        # exp(-1/u - m log u) avoids overflow of u^-m near the edge
        mag = np.exp(-1.0 / ui - m * np.log(ui))
        out[inside] = np.polynomial.polynomial.polyval(ti, P) * mag
    return out


@dataclass(frozen=True)
class WhitneyCube:
    index: int                # 1-based safety order (largest support first)
    center: np.ndarray
    side: float
    support_half: float       # half-width of the dilated support box
    nearest_idx: int          # cloud index of x_i
    gamma: float              # dist(K, supp phi_i)
    cube_dist: float          # dist(Q, K)
    merged: bool

    @property
    def diam(self) -> float:
        return self.side * math.sqrt(len(self.center))

    @property
    def support_diam(self) -> float:
        return 2.0 * self.support_half * math.sqrt(len(self.center))


@dataclass
class WhitneyDecomposition:
    cloud: PointCloud
    omega_half: float         # Omega = [-omega_half, omega_half]^d
    cubes: list
    floor_side: float
    collar_floor: float       # conservative width of the truncated collar
    dilation: float = DILATION
    _levels: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        levels = {}
        for ci, cube in enumerate(self.cubes):
            lv = levels.setdefault(cube.side, {})
            cell = tuple(np.floor(cube.center / cube.side).astype(int))
            lv.setdefault(cell, []).append(ci)
        self._levels = levels

    @property
    def d(self) -> int:
        return self.cloud.dim

    def active_cubes(self, x) -> list:
        """Indices of cubes whose dilated support contains x."""
        x = np.asarray(x, dtype=float)
        out = []
        for side, cells in self._levels.items():
            base = np.floor(x / side).astype(int)
            for off in _neighbor_offsets(self.d):
                cell = tuple(base + off)
                for ci in cells.get(cell, ()):
                    cube = self.cubes[ci]
                    if np.max(np.abs(x - cube.center)) <= cube.support_half:
                        out.append(ci)
        return sorted(out)

    def is_covered(self, x) -> bool:
        return len(self.active_cubes(np.asarray(x, dtype=float))) > 0

    def dump_rows(self):
        """(index, center, side, x_i, gamma) rows for the CSV dump."""
        rows = []
        for cube in self.cubes:
            rows.append((cube.index, tuple(map(float, cube.center)), float(cube.side),
                         tuple(map(float, self.cloud.points[cube.nearest_idx])),
                         float(cube.gamma)))
        return rows


def _neighbor_offsets(d: int):
    if d == 1:
        return [np.array([k]) for k in (-1, 0, 1)]
    return [np.array([i, j]) for i in (-1, 0, 1) for j in (-1, 0, 1)]


def _box_dist(points: np.ndarray, center: np.ndarray, half: float) -> np.ndarray:
    gap = np.abs(points - center[None, :]) - half
    np.maximum(gap, 0.0, out=gap)
    return np.sqrt(np.sum(gap * gap, axis=1))


def _cube_dist(cloud: PointCloud, center: np.ndarray, half: float) -> float:
    """Exact distance from the cube to the cloud, pruned by the center query."""
    d_c, _ = cloud.nearest(center)
    rad = half * math.sqrt(cloud.dim)
    lo, hi = d_c - rad, d_c
    if lo > 4 * rad + 1e-12 and hi > 0:  # far away, bound is enough only if exactness not needed
        pass
    cand = cloud._tree.query_ball_point(center, d_c + rad + 1e-12)
    pts = cloud.points[np.asarray(cand, dtype=int)]
    return float(np.min(_box_dist(pts, center, half)))


def decompose(cloud: PointCloud, omega_half: float = 0.5, min_side: float | None = None) -> WhitneyDecomposition:
    """Whitney decomposition of Omega minus K down to the resolution floor."""
    d = cloud.dim
    if np.max(np.abs(cloud.points)) >= omega_half:
        raise ValueError("Omega must contain K in its interior")
    if min_side is None:
        min_side = 2 * cloud.resolution
    # dyadic levels: side(j) = 2 omega_half / 2^j
    max_level = int(math.floor(math.log2(2 * omega_half / min_side)))
    if max_level < 1:
        raise ValueError("resolution floor reached before any cube fits")

    accepted = {}   # level -> set of integer cell tuples

    def visit(level, cell):
        side = 2 * omega_half / (1 << level)
        center = (np.array(cell, dtype=float) + 0.5) * side - omega_half
        diam = side * math.sqrt(d)
        dist = _cube_dist(cloud, center, side / 2)
        if dist >= 2 * diam:
            accepted.setdefault(level, set()).add(tuple(cell))
            return
        if level >= max_level:
            return
        for off in np.ndindex(*(2,) * d):
            child = tuple(2 * c + o for c, o in zip(cell, off))
            visit(level + 1, child)

    for cell in np.ndindex(*(2,) * d):
        visit(1, tuple(cell))

    # merge complete sibling groups into the parent while the parent still
    # satisfies diam <= dist
    merged_flag = {}
    changed = True
    while changed:
        changed = False
        for level in sorted(list(accepted.keys()), reverse=True):
            if level <= 1:
                continue
            cells = accepted.get(level, set())
            by_parent = {}
            for cell in cells:
                parent = tuple(c // 2 for c in cell)
                by_parent.setdefault(parent, []).append(cell)
            for parent, group in by_parent.items():
                if len(group) != (1 << d):
                    continue
                side = 2 * omega_half / (1 << (level - 1))
                center = (np.array(parent, dtype=float) + 0.5) * side - omega_half
                diam = side * math.sqrt(d)
                dist = _cube_dist(cloud, center, side / 2)
                if dist >= diam:
                    for cell in group:
                        cells.discard(cell)
                    accepted.setdefault(level - 1, set()).add(parent)
                    merged_flag[(level - 1, parent)] = True
                    changed = True
            if not cells and level in accepted:
                del accepted[level]

    cubes = []
    for level in sorted(accepted.keys()):
        side = 2 * omega_half / (1 << level)
        for cell in sorted(accepted[level]):
            center = (np.array(cell, dtype=float) + 0.5) * side - omega_half
            half = side / 2
            sup_half = DILATION * half
            dists = _box_dist(cloud.points, center, sup_half)
            ni = int(np.argmin(dists))
            gamma = float(dists[ni])
            cube_dist = _cube_dist(cloud, center, half)
            cubes.append(WhitneyCube(0, center, side, sup_half, ni, gamma, cube_dist,
                                     merged_flag.get((level, cell), False)))
    # safety order: largest cubes first, then lexicographic center
    cubes.sort(key=lambda c: (-c.side,) + tuple(c.center))
    cubes = [WhitneyCube(i + 1, c.center, c.side, c.support_half, c.nearest_idx,
                         c.gamma, c.cube_dist, c.merged) for i, c in enumerate(cubes)]
    floor_side = 2 * omega_half / (1 << max_level)
    collar_floor = 3 * math.sqrt(d) * floor_side
    return WhitneyDecomposition(cloud, omega_half, cubes, floor_side, collar_floor)


class PartitionOfUnity:
    """Evaluator family phi_i = psi_i / sum psi_j with closed-form derivatives
    up to order 4; psi_i is the product bump scaled to the dilated cube."""

    def __init__(self, dec: WhitneyDecomposition):
        self.dec = dec

    def psi_derivs(self, ci: int, x: np.ndarray, max_order: int):
        """dict beta -> d^beta psi_i(x) for |beta| <= max_order."""
        cube = self.dec.cubes[ci]
        r = cube.support_half
        t = (x - cube.center) / r
        d = self.dec.d
        per_dim = [[bump_value(np.array([t[j]]), k)[0] / r ** k
                    for k in range(max_order + 1)] for j in range(d)]
        out = {}
        for beta in enumerate_multiindices(d, max_order):
            val = 1.0
            for j, bj in enumerate(beta):
                val *= per_dim[j][bj]
            out[beta] = val
        return out

    def phi_derivs(self, x, max_order: int = 0):
        """dict cube index -> {beta: d^beta phi_i(x)}; raises when x is not in
        the covered collar."""
        x = np.asarray(x, dtype=float)
        if np.max(np.abs(x)) > self.dec.omega_half:
            raise ValueError("point outside Omega")
        active = self.dec.active_cubes(x)
        if not active:
            raise ValueError("point not covered (inside K or the truncated collar)")
        psis = {ci: self.psi_derivs(ci, x, max_order) for ci in active}
        betas = enumerate_multiindices(self.dec.d, max_order)
        S = {b: sum(p[b] for p in psis.values()) for b in betas}
        if S[betas[0]] <= 0:
            raise ValueError("partition sum vanished (uncovered point)")
        out = {}
        for ci, psi in psis.items():
            phi = {}
            for b in betas:   # graded order guarantees lower terms are ready
                acc = psi[b]
                for g in betas:
                    if g == b or not mi_leq(g, b):
                        continue
                    binom = 1.0
                    for bj, gj in zip(b, g):
                        binom *= math.comb(bj, gj)
                    acc -= binom * phi[g] * S[mi_sub(b, g)]
                phi[b] = acc / S[betas[0]]
            out[ci] = phi
        return out

    def sum_at(self, x) -> float:
        phis = self.phi_derivs(x, 0)
        zero = tuple([0] * self.dec.d)
        return float(sum(p[zero] for p in phis.values()))


@dataclass
class PartitionReport:
    n_overlap: int
    iii_constant: float             # max over cubes of diam(supp)/dist(supp, K)
    c_beta: dict                    # |d^beta phi| * dist^|beta| sup per beta
    sum_deviation: float            # max |sum phi - 1| over samples
    x_minus_xi_over_gamma: float    # max |x - x_i| / gamma_i over support samples
    n_samples: int
    truncated_collar: float


def _collar_samples(dec: WhitneyDecomposition, n: int, seed: int) -> np.ndarray:
    """Fixed-seed sample of covered collar points, drawn inside cube supports."""
    rng = np.random.default_rng(seed)
    cubes = dec.cubes
    out = []
    while len(out) < n:
        ci = int(rng.integers(len(cubes)))
        cube = cubes[ci]
        x = cube.center + rng.uniform(-1, 1, dec.d) * cube.support_half * 0.999
        if np.max(np.abs(x)) <= dec.omega_half and dec.is_covered(x):
            out.append(x)
    return np.array(out)


def verify_partition(dec: WhitneyDecomposition, n_samples: int = 2000,
                     max_beta: int = 3, seed: int = 424242) -> PartitionReport:
    """Measure the partition constants; violations are reported, not raised."""
    pou = PartitionOfUnity(dec)
    iii = max(c.support_diam / c.gamma for c in dec.cubes)
    pts = _collar_samples(dec, n_samples, seed)
    zero = tuple([0] * dec.d)
    betas = enumerate_multiindices(dec.d, max_beta)
    c_beta = {b: 0.0 for b in betas}
    sum_dev = 0.0
    overlap = 0
    ratio_xxi = 0.0
    for x in pts:
        dist_x = dec.cloud.dist(x)
        phis = pou.phi_derivs(x, max_beta)
        overlap = max(overlap, len(phis))
        total = sum(p[zero] for p in phis.values())
        sum_dev = max(sum_dev, abs(total - 1.0))
        for ci, p in phis.items():
            cube = dec.cubes[ci]
            r = float(np.linalg.norm(x - dec.cloud.points[cube.nearest_idx]))
            ratio_xxi = max(ratio_xxi, r / cube.gamma)
            for b in betas:
                c_beta[b] = max(c_beta[b], abs(p[b]) * dist_x ** sum(b))
    return PartitionReport(overlap, iii, c_beta, sum_dev, ratio_xxi,
                           len(pts), dec.collar_floor)


class FiniteOrderExtension:
    """The classical degree-n operator: f^(0) on K, and off K the partition
    average of the order-n Taylor polynomials at the nearest points x_i."""

    def __init__(self, jet: Jet, n: int, dec: WhitneyDecomposition):
        if n > jet.order:
            raise ValueError("jet order too low")
        if jet.cloud is not dec.cloud and jet.cloud.n_points != dec.cloud.n_points:
            raise ValueError("jet must be carried on the decomposition cloud")
        self.jet = jet
        self.n = n
        self.dec = dec
        self.pou = PartitionOfUnity(dec)

    def _taylor_deriv(self, y_idx: int, delta, x: np.ndarray) -> float:
        """d^delta T^n_{x_i}(f)(x), exact from the jet values."""
        jet, n = self.jet, self.n
        d = self.dec.d
        y = jet.cloud.points[y_idx]
        diff = x - y
        acc = 0.0
        for g in enumerate_multiindices(d, n):
            if not mi_leq(delta, g):
                continue
            rest = mi_sub(g, delta)
            term = jet.values[mi_rank(g, jet.order), y_idx] / mi_factorial(rest)
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
                return float(self.jet.values[0, ni])
            return float(self.jet.values[mi_rank(beta, self.jet.order), ni])
        phis = self.pou.phi_derivs(x, sum(beta))
        acc = 0.0
        for ci, p in phis.items():
            cube = self.dec.cubes[ci]
            for g in enumerate_multiindices(d, sum(beta)):
                if not mi_leq(g, beta):
                    continue
                binom = 1.0
                for bj, gj in zip(beta, g):
                    binom *= math.comb(bj, gj)
                acc += binom * p[g] * self._taylor_deriv(cube.nearest_idx, mi_sub(beta, g), x)
        return float(acc)


def extend_finite(jet: Jet, n: int, dec: WhitneyDecomposition) -> FiniteOrderExtension:
    return FiniteOrderExtension(jet, n, dec)
