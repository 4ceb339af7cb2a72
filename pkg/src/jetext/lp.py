"""Deterministic dense linear-program solver.

Two-phase primal simplex with an explicitly maintained basis inverse.
Pivoting is Dantzig's rule with ties broken by lowest column index; after
2*(m+n) iterations without objective progress the solver switches to Bland's
rule, which guarantees termination on degenerate instances.  All tie-breaks
are index-based, so identical inputs produce identical outputs.

Problems are stated as

    minimize c @ x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.

Free quantities (signed measure weights, polynomial coefficients) are split
into nonnegative pairs by the callers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
MAX_ITER = 200_000
REFACTOR_EVERY = 120


class LPError(RuntimeError):
    """Numerical breakdown inside the solver (not infeasibility)."""


@dataclass
class LinearProgram:
    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = len(self.c)
        for name in ("A_eq", "A_ub"):
            A = getattr(self, name)
            if A is not None:
                A = np.asarray(A, dtype=float)
                if A.ndim != 2 or A.shape[1] != n:
                    raise ValueError(f"{name} must have {n} columns")
                setattr(self, name, A)
        for Aname, bname in (("A_eq", "b_eq"), ("A_ub", "b_ub")):
            A, b = getattr(self, Aname), getattr(self, bname)
            if (A is None) != (b is None):
                raise ValueError(f"{Aname} and {bname} must be given together")
            if b is not None:
                b = np.asarray(b, dtype=float)
                if b.shape != (A.shape[0],):
                    raise ValueError(f"{bname} has wrong length")
                setattr(self, bname, b)
        for arr in (self.c, self.A_eq, self.b_eq, self.A_ub, self.b_ub):
            if arr is not None and not np.all(np.isfinite(arr)):
                raise ValueError("linear program data must be finite")


@dataclass
class LPOutcome:
    status: str                 # optimal | infeasible | unbounded
    value: float
    x: np.ndarray | None
    iterations: int
    dual_eq: np.ndarray | None = None
    dual_ub: np.ndarray | None = None
    used_bland: bool = False


class _Simplex:
    """One standard-form instance: min c x, A x = b (b >= 0), x >= 0."""

    def __init__(self, A, b):
        self.A = A
        self.b = b
        self.m, self.n = A.shape
        self.basis = None
        self.Binv = None
        self.iterations = 0
        self.used_bland = False

    def set_basis(self, basis):
        self.basis = list(basis)
        self.refactor()

    def refactor(self):
        B = self.A[:, self.basis]
        try:
            self.Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as e:
            raise LPError("singular basis") from e

    def xb(self):
        return self.Binv @ self.b

    def run(self, c, banned) -> str:
        """Minimize c over the current feasible basis; returns optimal|unbounded."""
        m, n = self.m, self.n
        stall_limit = 2 * (m + n)
        bland = False
        stall = 0
        best = np.inf
        since_refactor = 0
        basic_mask = np.zeros(n, dtype=bool)
        basic_mask[self.basis] = True
        while True:
            if self.iterations >= MAX_ITER:
                raise LPError("iteration limit exceeded")
            pi = c[self.basis] @ self.Binv
            reduced = c - pi @ self.A
            cand = ~basic_mask & ~banned & (reduced < -PIVOT_TOL)
            if not np.any(cand):
                return "optimal"
            if bland:
                j = int(np.nonzero(cand)[0][0])
            else:
                scores = np.where(cand, reduced, 0.0)
                j = int(np.argmin(scores))
            u = self.Binv @ self.A[:, j]
            xb = self.xb()
            pos = u > PIVOT_TOL
            if not np.any(pos):
                return "unbounded"
            ratios = np.where(pos, xb / np.where(pos, u, 1.0), np.inf)
            theta = np.min(ratios)
            tie = np.nonzero(ratios <= theta + 1e-15)[0]
            # among the tied rows choose the one whose basic variable has the
            # lowest index (required for Bland, deterministic always)
            r = int(tie[np.argmin([self.basis[t] for t in tie])])
            # pivot
            leave = self.basis[r]
            basic_mask[leave] = False
            basic_mask[j] = True
            self.basis[r] = j
            piv = u[r]
            eta = self.Binv[r, :] / piv
            self.Binv = self.Binv - np.outer(u, eta)
            self.Binv[r, :] = eta
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= REFACTOR_EVERY:
                self.refactor()
                since_refactor = 0
            obj = float(c[self.basis] @ self.xb())
            if obj < best - 1e-12:
                best = obj
                stall = 0
            else:
                stall += 1
                if stall >= stall_limit and not bland:
                    bland = True
                    self.used_bland = True


def solve(p: LinearProgram) -> LPOutcome:
    """Solve the program; deterministic for identical inputs."""
    n_user = len(p.c)
    m_eq = 0 if p.A_eq is None else p.A_eq.shape[0]
    m_ub = 0 if p.A_ub is None else p.A_ub.shape[0]
    m = m_eq + m_ub
    if m == 0:
        # without constraints the optimum is 0 unless some cost is negative
        if np.any(p.c < 0):
            return LPOutcome("unbounded", -np.inf, None, 0)
        return LPOutcome("optimal", 0.0, np.zeros(n_user), 0,
                         dual_eq=np.zeros(0), dual_ub=np.zeros(0))

    rows = []
    if m_eq:
        rows.append(p.A_eq)
    if m_ub:
        rows.append(p.A_ub)
    A = np.vstack(rows)
    b = np.concatenate([p.b_eq if m_eq else np.zeros(0), p.b_ub if m_ub else np.zeros(0)])

    # slack columns for the <= rows
    slack = np.zeros((m, m_ub))
    for i in range(m_ub):
        slack[m_eq + i, i] = 1.0
    A = np.hstack([A, slack])

    # normalize b >= 0 (remember the flips for the duals)
    signs = np.ones(m)
    neg = b < 0
    signs[neg] = -1.0
    A[neg] *= -1.0
    b = b * signs

    n_slack = m_ub
    n_real = n_user + n_slack

    # phase 1: artificials where no slack can start basic
    basis = [-1] * m
    art_cols = []
    for i in range(m):
        if i >= m_eq and signs[i] > 0:
            basis[i] = n_user + (i - m_eq)   # slack is basic with value b_i >= 0
    for i in range(m):
        if basis[i] == -1:
            col = np.zeros((m, 1))
            col[i, 0] = 1.0
            art_cols.append(col)
            basis[i] = n_real + len(art_cols) - 1
    if art_cols:
        A1 = np.hstack([A] + art_cols)
    else:
        A1 = A
    n_total = A1.shape[1]
    is_artificial = np.zeros(n_total, dtype=bool)
    is_artificial[n_real:] = True

    sx = _Simplex(A1, b)
    sx.set_basis(basis)

    if np.any(is_artificial[basis]):
        c1 = np.zeros(n_total)
        c1[is_artificial] = 1.0
        status = sx.run(c1, banned=np.zeros(n_total, dtype=bool))
        if status != "optimal":
            raise LPError("phase 1 did not reach an optimum")
        xb = sx.xb()
        phase1 = float(np.sum(xb[[is_artificial[bi] for bi in sx.basis]])) if m else 0.0
        art_rows = [i for i, bi in enumerate(sx.basis) if is_artificial[bi]]
        phase1 = float(sum(max(xb[i], 0.0) for i in art_rows))
        if phase1 > FEAS_TOL * (1.0 + float(np.max(np.abs(b)))):
            return LPOutcome("infeasible", np.inf, None, sx.iterations, used_bland=sx.used_bland)
        # drive remaining artificials out of the basis where possible
        for i in art_rows:
            if not is_artificial[sx.basis[i]]:
                continue
            row = sx.Binv[i, :] @ sx.A[:, :n_real]
            nz = np.nonzero(np.abs(row) > PIVOT_TOL)[0]
            entered = False
            for j in nz:
                if j not in sx.basis:
                    u = sx.Binv @ sx.A[:, j]
                    piv = u[i]
                    if abs(piv) <= PIVOT_TOL:
                        continue
                    eta = sx.Binv[i, :] / piv
                    sx.Binv = sx.Binv - np.outer(u, eta)
                    sx.Binv[i, :] = eta
                    sx.basis[i] = int(j)
                    entered = True
                    break
            # if no pivot exists the row is redundant: the artificial stays
            # basic at zero and is barred from moving
            if not entered:
                continue
        sx.refactor()

    c2 = np.concatenate([p.c, np.zeros(n_total - n_user)])
    status = sx.run(c2, banned=is_artificial)
    if status == "unbounded":
        return LPOutcome("unbounded", -np.inf, None, sx.iterations, used_bland=sx.used_bland)

    x_full = np.zeros(n_total)
    x_full[sx.basis] = np.maximum(sx.xb(), 0.0)
    x = x_full[:n_user]
    value = float(p.c @ x)
    pi = c2[sx.basis] @ sx.Binv
    pi = pi * signs
    dual_eq = pi[:m_eq] if m_eq else np.zeros(0)
    dual_ub = pi[m_eq:] if m_ub else np.zeros(0)
    return LPOutcome("optimal", value, x, sx.iterations,
                     dual_eq=dual_eq, dual_ub=dual_ub, used_bland=sx.used_bland)


def check_outcome(p: LinearProgram, out: LPOutcome, tol: float = FEAS_TOL) -> float:
    """Largest constraint violation of an optimal outcome (for assertions)."""
    if out.status != "optimal":
        raise ValueError("only optimal outcomes can be checked")
    worst = 0.0
    if p.A_eq is not None:
        worst = max(worst, float(np.max(np.abs(p.A_eq @ out.x - p.b_eq), initial=0.0)))
    if p.A_ub is not None:
        worst = max(worst, float(np.max(p.A_ub @ out.x - p.b_ub, initial=0.0)))
    worst = max(worst, float(np.max(-out.x, initial=0.0)))
    return worst
