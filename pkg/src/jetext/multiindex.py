"""Multi-index arithmetic and dense multivariate polynomials.

Multi-indices are plain tuples of nonnegative ints.  Polynomials are stored
densely in the monomial basis about the origin, with one coefficient per
multi-index in graded order (total degree first, then first entry decreasing).
Degrees in this package stay small (<= 8), so dense storage is cheap and
every operation is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


def mi_order(alpha) -> int:
    return sum(alpha)


def mi_factorial(alpha) -> float:
    return float(math.prod(math.factorial(a) for a in alpha))


def mi_leq(alpha, beta) -> bool:
    """Componentwise alpha <= beta."""
    return all(a <= b for a, b in zip(alpha, beta))


def mi_add(alpha, beta):
    return tuple(a + b for a, b in zip(alpha, beta))


def mi_sub(alpha, beta):
    return tuple(a - b for a, b in zip(alpha, beta))


def _compositions(total: int, d: int):
    """Compositions of `total` into d parts, first part decreasing."""
    if d == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(total - head, d - 1):
            yield (head,) + tail


@lru_cache(maxsize=None)
def enumerate_multiindices(d: int, max_order: int) -> tuple:
    """All alpha with |alpha| <= max_order in graded order, no duplicates.

    The count is binom(max_order + d, d).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    out = []
    for k in range(max_order + 1):
        out.extend(_compositions(k, d))
    return tuple(out)


@lru_cache(maxsize=None)
def _rank_map(d: int, max_order: int) -> dict:
    return {a: i for i, a in enumerate(enumerate_multiindices(d, max_order))}


def mi_rank(alpha, max_order: int) -> int:
    """Graded rank of alpha within enumerate_multiindices(len(alpha), max_order)."""
    return _rank_map(len(alpha), max_order)[tuple(alpha)]


def n_multiindices(d: int, max_order: int) -> int:
    return math.comb(max_order + d, d)


@dataclass(frozen=True)
class MultiPolynomial:
    """Dense multivariate polynomial sum_alpha c_alpha y^alpha.

    `coeffs` is aligned with enumerate_multiindices(dim, deg).  The zero
    polynomial has deg 0 by convention.
    """

    dim: int
    deg: int
    coeffs: np.ndarray

    def __post_init__(self):
        expected = n_multiindices(self.dim, self.deg)
        if len(self.coeffs) != expected:
            raise ValueError(f"coefficient vector has length {len(self.coeffs)}, expected {expected}")

    @staticmethod
    def zero(dim: int) -> "MultiPolynomial":
        return MultiPolynomial(dim, 0, np.zeros(1))

    @staticmethod
    def constant(dim: int, value: float) -> "MultiPolynomial":
        return MultiPolynomial(dim, 0, np.array([float(value)]))

    @staticmethod
    def from_dict(dim: int, terms: dict) -> "MultiPolynomial":
        """Build from {alpha: coefficient}; degree is trimmed to the support."""
        terms = {tuple(a): float(c) for a, c in terms.items() if c != 0.0}
        if not terms:
            return MultiPolynomial.zero(dim)
        deg = max(mi_order(a) for a in terms)
        coeffs = np.zeros(n_multiindices(dim, deg))
        for a, c in terms.items():
            coeffs[mi_rank(a, deg)] = c
        return MultiPolynomial(dim, deg, coeffs)

    def to_dict(self) -> dict:
        alphas = enumerate_multiindices(self.dim, self.deg)
        return {a: c for a, c in zip(alphas, self.coeffs) if c != 0.0}

    @property
    def alphas(self) -> tuple:
        return enumerate_multiindices(self.dim, self.deg)

    def coefficient(self, alpha) -> float:
        alpha = tuple(alpha)
        if mi_order(alpha) > self.deg:
            return 0.0
        return float(self.coeffs[mi_rank(alpha, self.deg)])

    def effective_degree(self) -> int:
        """Largest |alpha| with a nonzero coefficient (0 for the zero polynomial)."""
        deg = 0
        for a, c in zip(self.alphas, self.coeffs):
            if c != 0.0:
                deg = max(deg, mi_order(a))
        return deg

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other: "MultiPolynomial") -> "MultiPolynomial":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        terms = self.to_dict()
        for a, c in other.to_dict().items():
            terms[a] = terms.get(a, 0.0) + c
        return MultiPolynomial.from_dict(self.dim, terms)

    def __sub__(self, other: "MultiPolynomial") -> "MultiPolynomial":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "MultiPolynomial":
        return MultiPolynomial(self.dim, self.deg, self.coeffs * float(factor))


def poly_eval(p: MultiPolynomial, x):
    """Evaluate p at a point (d,) or batch (m, d) of points."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.shape[1] != p.dim:
        raise ValueError(f"point dimension {pts.shape[1]} != polynomial dimension {p.dim}")
    acc = np.zeros(pts.shape[0])
    for a, c in zip(p.alphas, p.coeffs):
        if c == 0.0:
            continue
        term = np.full(pts.shape[0], c)
        for j, aj in enumerate(a):
            if aj:
                term = term * pts[:, j] ** aj
        acc += term
    if np.ndim(x) == 1:
        return float(acc[0])
    return acc


def poly_derivative(p: MultiPolynomial, alpha) -> MultiPolynomial:
    """Exact partial derivative d^alpha p."""
    alpha = tuple(alpha)
    if len(alpha) != p.dim:
        raise ValueError("multi-index dimension mismatch")
    terms = {}
    for a, c in zip(p.alphas, p.coeffs):
        if c == 0.0 or not mi_leq(alpha, a):
            continue
        factor = 1.0
        for aj, dj in zip(a, alpha):
            # falling factorial aj * (aj-1) * ... * (aj-dj+1)
            for i in range(dj):
                factor *= aj - i
        terms[mi_sub(a, alpha)] = terms.get(mi_sub(a, alpha), 0.0) + c * factor
    return MultiPolynomial.from_dict(p.dim, terms)


def homogeneous_part(p: MultiPolynomial, k: int) -> MultiPolynomial:
    """Retain exactly the coefficients with |alpha| = k."""
    if k < 0:
        raise ValueError("k must be >= 0")
    terms = {a: c for a, c in zip(p.alphas, p.coeffs) if mi_order(a) == k}
    return MultiPolynomial.from_dict(p.dim, terms)


def shifted_monomial(dim: int, alpha, y) -> dict:
    """Expansion of (x - y)^alpha into monomials about the origin, as {beta: coeff}."""
    alpha = tuple(alpha)
    y = np.asarray(y, dtype=float)
    terms = {(): 1.0}
    for j in range(dim):
        aj = alpha[j]
        # 1-d binomial expansion of (x_j - y_j)^aj
        expanded = {}
        for b in range(aj + 1):
            expanded[b] = math.comb(aj, b) * (-y[j]) ** (aj - b)
        new_terms = {}
        for prefix, c in terms.items():
            for b, cb in expanded.items():
                if cb == 0.0:
                    continue
                new_terms[prefix + (b,)] = new_terms.get(prefix + (b,), 0.0) + c * cb
        terms = new_terms
    return terms


def taylor_poly(jet, y_index: int, n: int) -> MultiPolynomial:
    """Taylor polynomial of a jet about carrier point y, expanded about the origin.

    T(x) = sum_{|alpha|<=n} f^(alpha)(y) / alpha! * (x - y)^alpha.  `jet` is a
    jets.Jet and y is addressed by its carrier index.
    """
    if n > jet.order:
        raise ValueError("jet order too low")
    if not (0 <= y_index < jet.cloud.n_points):
        raise ValueError("y is not a carrier point")
    d = jet.cloud.dim
    y = jet.cloud.points[y_index]
    terms = {}
    for a in enumerate_multiindices(d, n):
        coeff = jet.value(a, y_index) / mi_factorial(a)
        if coeff == 0.0:
            continue
        for b, cb in shifted_monomial(d, a, y).items():
            terms[b] = terms.get(b, 0.0) + coeff * cb
    return MultiPolynomial.from_dict(d, terms)
