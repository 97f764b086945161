"""Dense two-phase tableau simplex.

Solves   maximize c.x  subject to  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0.

Bland's smallest-index rule is used for both the entering and the leaving
variable, so the method terminates on degenerate problems (the strategy
polytopes here are highly degenerate).  The ``"dantzig"`` rule picks the
most positive reduced cost instead and falls back to Bland after a run of
degenerate pivots.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SolverError

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"


@dataclass
class LPResult:
    status: str
    x: Optional[np.ndarray]
    objective: Optional[float]
    iterations: int
    basis: Optional[np.ndarray] = None


class _Tableau:
    def __init__(self, T: np.ndarray, basis: np.ndarray, tol: float, rule: str, stall_limit: int):
        self.T = T
        self.basis = basis
        self.tol = tol
        self.rule = rule
        self.stall_limit = stall_limit
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        factors = T[:, col].copy()
        factors[row] = 0.0
        T -= np.outer(factors, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col
        self.iterations += 1

    def _entering(self, allowed: int, bland: bool) -> Optional[int]:
        r = self.T[-1, :allowed]
        if bland:
            cand = np.flatnonzero(r > self.tol)
            return int(cand[0]) if cand.size else None
        col = int(np.argmax(r))
        return col if r[col] > self.tol else None

    def _leaving(self, col: int) -> Optional[int]:
        T = self.T
        column = T[:-1, col]
        rows = np.flatnonzero(column > self.tol)
        if rows.size == 0:
            return None
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        return int(ties[np.argmin(self.basis[ties])])

    def run(self, allowed: int, max_iter: int) -> str:
        degenerate_run = 0
        while True:
            if self.iterations >= max_iter:
                raise SolverError(f"simplex did not converge within {max_iter} pivots")
            bland = self.rule == "bland" or degenerate_run >= self.stall_limit
            col = self._entering(allowed, bland)
            if col is None:
                return OPTIMAL
            row = self._leaving(col)
            if row is None:
                return UNBOUNDED
            step = self.T[row, -1] / self.T[row, col]
            degenerate_run = degenerate_run + 1 if step <= self.tol else 0
            self.pivot(row, col)


def linprog_max(
    c,
    A_eq=None,
    b_eq=None,
    A_ub=None,
    b_ub=None,
    tol: float = 1e-9,
    max_iter: int = 100_000,
    rule: str = "bland",
    stall_limit: int = 50,
) -> LPResult:
    if rule not in ("bland", "dantzig"):
        raise ValueError(f"unknown pivot rule {rule!r}")
    c = np.asarray(c, dtype=float)
    n = c.size
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
    m = m_eq + m_ub

    # Structural columns, then one slack per inequality row.
    nvar = n + m_ub
    A = np.zeros((m, nvar))
    A[:m_eq, :n] = A_eq
    A[m_eq:, :n] = A_ub
    A[m_eq:, n:] = np.eye(m_ub)
    b = np.concatenate([b_eq, b_ub])
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # Phase 1: one artificial per row, minimize their sum.
    T = np.zeros((m + 1, nvar + m + 1))
    T[:m, :nvar] = A
    T[:m, nvar : nvar + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :nvar] = A.sum(axis=0)
    T[-1, -1] = b.sum()
    tab = _Tableau(T, np.arange(nvar, nvar + m), tol, rule, stall_limit)
    tab.run(nvar + m, max_iter)

    infeas = tab.T[:m, -1][tab.basis >= nvar].sum()
    if infeas > max(tol, tol * b.sum()) * 10:
        return LPResult(INFEASIBLE, None, None, tab.iterations)

    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if tab.basis[i] < nvar:
            continue
        row = tab.T[i, :nvar]
        nz = np.flatnonzero(np.abs(row) > tol)
        if nz.size:
            tab.pivot(i, int(nz[0]))
        else:
            keep[i] = False

    # Phase 2 on the surviving rows, artificial columns dropped.
    rows = np.flatnonzero(keep)
    T2 = np.zeros((rows.size + 1, nvar + 1))
    T2[:-1, :nvar] = tab.T[rows, :nvar]
    T2[:-1, -1] = tab.T[rows, -1]
    basis = tab.basis[rows].copy()
    cost = np.zeros(nvar)
    cost[:n] = c
    T2[-1, :nvar] = cost - cost[basis] @ T2[:-1, :nvar]
    T2[-1, -1] = -(cost[basis] @ T2[:-1, -1])
    tab2 = _Tableau(T2, basis, tol, rule, stall_limit)
    tab2.iterations = tab.iterations
    status = tab2.run(nvar, max_iter)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None, tab2.iterations)

    x = np.zeros(nvar)
    x[tab2.basis] = tab2.T[:-1, -1]
    x = np.where(np.abs(x) <= tol, 0.0, x)
    if (x < -10 * tol).any():
        raise SolverError(f"simplex lost primal feasibility (min x = {x.min():.3e})")
    x = np.clip(x, 0.0, None)
    resid = np.abs(A @ x - b).max() if m else 0.0
    if resid > 1e3 * tol:
        raise SolverError(f"simplex solution violates constraints by {resid:.3e}")
    xs = x[:n]
    return LPResult(OPTIMAL, xs, float(c @ xs), tab2.iterations, tab2.basis.copy())
