"""Whitney jets of finite order on a point cloud, the Taylor-remainder
functional and the Whitney norm.

A jet of order n stores one value per (multi-index, carrier point) pair.  The
remainder functional is the worst normalized deviation of jet values from the
order-n Taylor field over carrier pairs at distance <= t; the Whitney norm
adds the sup of the jet entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clouds import PointCloud
from .multiindex import enumerate_multiindices, mi_factorial, mi_leq, mi_rank, mi_sub

PAIR_CAP = 3000          # exact pair enumeration up to this carrier size
PAIR_SEED = 20240601     # fixed seed for the subsample beyond the cap


@dataclass(frozen=True)
class Jet:
    """Values f^(alpha)(x) for |alpha| <= order and every carrier point.

    `values` has shape (n_alphas, m) aligned with enumerate_multiindices.
    """

    cloud: PointCloud
    order: int
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        n_alpha = len(enumerate_multiindices(self.cloud.dim, self.order))
        if self.values.shape != (n_alpha, self.cloud.n_points):
            raise ValueError("jet value array has wrong shape")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("jet values must be finite")

    def value(self, alpha, point_index: int) -> float:
        return float(self.values[mi_rank(tuple(alpha), self.order), point_index])

    def row(self, alpha) -> np.ndarray:
        return self.values[mi_rank(tuple(alpha), self.order)]

    def scale(self, c: float) -> "Jet":
        return Jet(self.cloud, self.order, self.values * float(c), self.label)

    def __add__(self, other: "Jet") -> "Jet":
        if other.cloud is not self.cloud or other.order != self.order:
            raise ValueError("jets must share carrier and order")
        return Jet(self.cloud, self.order, self.values + other.values)


def jet_from_function(derivative_oracle, cloud: PointCloud, n: int, label: str = "") -> Jet:
    """Sample a closed-form derivative oracle on the carrier.

    The oracle maps (alpha, points array (m, d)) to the values of the
    alpha-derivative at those points.
    """
    alphas = enumerate_multiindices(cloud.dim, n)
    vals = np.empty((len(alphas), cloud.n_points))
    for i, a in enumerate(alphas):
        vals[i] = np.asarray(derivative_oracle(a, cloud.points), dtype=float)
    return Jet(cloud, n, vals, label)


def _pair_sample_indices(m: int, cap: int = PAIR_CAP):
    """Carrier indices used for pair enumeration: all if m <= cap, else a
    fixed-seed uniform subsample.  Returns (indices, sampled_flag)."""
    if m <= cap:
        return np.arange(m), False
    rng = np.random.default_rng(PAIR_SEED)
    idx = np.sort(rng.choice(m, size=cap, replace=False))
    return idx, True


def taylor_field_deriv(jet: Jet, alpha, y_indices: np.ndarray, x: np.ndarray, n: int) -> np.ndarray:
    """d^alpha T^n_y(f)(x) for one x-block against many base points y.

    x has shape (d,), y_indices selects carrier points; returns (len(y),).
    """
    d = jet.cloud.dim
    alpha = tuple(alpha)
    ys = jet.cloud.points[y_indices]
    diff = x[None, :] - ys                     # (m, d)
    acc = np.zeros(len(y_indices))
    for g in enumerate_multiindices(d, n):
        if not mi_leq(alpha, g):
            continue
        rest = mi_sub(g, alpha)
        term = jet.values[mi_rank(g, jet.order)][y_indices] / mi_factorial(rest)
        for j, rj in enumerate(rest):
            if rj:
                term = term * diff[:, j] ** rj
        acc += term
    return acc


def remainder(jet: Jet, n: int, t: float | None) -> float:
    """The functional q_{n,t}: sup over |alpha| <= n and carrier pairs x != y
    with |x - y| <= t of |f^(alpha)(x) - d^alpha T^n_y(f)(x)| / |x-y|^(n-|alpha|).

    t = None means no distance restriction (equivalently t = carrier diameter).
    Returns 0 if no admissible pair exists.
    """
    if n > jet.order:
        raise ValueError("n exceeds jet order")
    if t is not None and t <= 0:
        raise ValueError("t must be positive")
    m = jet.cloud.n_points
    idx, _ = _pair_sample_indices(m)
    pts = jet.cloud.points[idx]
    sup = 0.0
    alphas = enumerate_multiindices(jet.cloud.dim, n)
    for xi_pos, xi in enumerate(idx):
        x = jet.cloud.points[xi]
        dist = np.linalg.norm(pts - x[None, :], axis=1)
        ok = dist > 0
        if t is not None:
            ok &= dist <= t + 1e-15
        if not np.any(ok):
            continue
        sel = idx[ok]
        dsel = dist[ok]
        for a in alphas:
            ta = taylor_field_deriv(jet, a, sel, x, n)
            fa = jet.value(a, xi)
            dev = np.abs(fa - ta) / dsel ** (n - sum(a))
            sup = max(sup, float(np.max(dev)))
    return sup


def remainder_is_sampled(jet: Jet) -> bool:
    return jet.cloud.n_points > PAIR_CAP


def sup_norm(jet: Jet, n: int) -> float:
    n_alpha = len(enumerate_multiindices(jet.cloud.dim, n))
    return float(np.max(np.abs(jet.values[:n_alpha])))


def whitney_norm(jet: Jet, n: int) -> float:
    """sup |f^(alpha)| over |alpha| <= n plus sup_t q_{n,t} (q is nondecreasing
    in t, so the second sup is q at the carrier diameter)."""
    return sup_norm(jet, n) + remainder(jet, n, None)


# ---------------------------------------------------------------------------
# test-function corpus: trigonometric products with closed-form derivatives
# of every order (d/dx sin(w x + phi) = w sin(w x + phi + pi/2))

@dataclass(frozen=True)
class TrigTerm:
    amplitude: float
    freqs: tuple      # angular frequency per coordinate
    phases: tuple

    def deriv(self, alpha, pts: np.ndarray) -> np.ndarray:
        out = np.full(pts.shape[0], self.amplitude)
        for j, (w, phi, aj) in enumerate(zip(self.freqs, self.phases, alpha)):
            out = out * w ** aj * np.sin(w * pts[:, j] + phi + aj * np.pi / 2)
        return out


def trig_oracle(terms):
    def oracle(alpha, pts):
        pts = np.atleast_2d(pts)
        acc = np.zeros(pts.shape[0])
        for t in terms:
            acc += t.deriv(alpha, pts)
        return acc
    return oracle


def trig_corpus(d: int, count: int, seed: int, max_freq: int = 8, terms_per_jet: int = 3):
    """Fixed-seed corpus of trigonometric test functions.

    Returns a list of (oracle, label); frequencies are 2*pi*k with k <= max_freq.
    """
    rng = np.random.default_rng(seed)
    corpus = []
    for i in range(count):
        terms = []
        for _ in range(terms_per_jet):
            amp = rng.uniform(-1.0, 1.0)
            ks = rng.integers(1, max_freq + 1, size=d)
            phases = rng.uniform(0.0, 2 * np.pi, size=d)
            terms.append(TrigTerm(float(amp), tuple(2 * np.pi * ks), tuple(phases)))
        corpus.append((trig_oracle(terms), f"trig{i}"))
    return corpus


def polynomial_oracle(poly):
    """Derivative oracle for a MultiPolynomial (used to build exact jets)."""
    from .multiindex import poly_derivative, poly_eval

    def oracle(alpha, pts):
        return poly_eval(poly_derivative(poly, alpha), np.atleast_2d(pts))
    return oracle


# ---------------------------------------------------------------------------
# jet file io: header "d n m", then one line per point with coordinates
# followed by the jet values in graded multi-index order

def write_jet_file(path: str, jet: Jet) -> None:
    cloud = jet.cloud
    with open(path, "w") as f:
        f.write(f"{cloud.dim} {jet.order} {cloud.n_points}\n")
        for i in range(cloud.n_points):
            coords = " ".join(repr(float(c)) for c in cloud.points[i])
            vals = " ".join(repr(float(v)) for v in jet.values[:, i])
            f.write(f"{coords} {vals}\n")


def read_jet_file(path: str) -> Jet:
    with open(path) as f:
        header = f.readline().split()
        d, n, m = int(header[0]), int(header[1]), int(header[2])
        n_alpha = len(enumerate_multiindices(d, n))
        pts = np.empty((m, d))
        vals = np.empty((n_alpha, m))
        for i in range(m):
            parts = f.readline().split()
            if len(parts) != d + n_alpha:
                raise ValueError(f"{path}: line {i + 2} has {len(parts)} fields, expected {d + n_alpha}")
            pts[i] = [float(v) for v in parts[:d]]
            vals[:, i] = [float(v) for v in parts[d:]]
    from .clouds import PointCloud, _infer_resolution
    cloud = PointCloud(d, pts, _infer_resolution(pts), np.ones(m, dtype=bool), f"jet_file({path})")
    return Jet(cloud, n, vals)
