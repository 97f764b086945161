"""Brute-force maximum of the chained statistic over local models.

Every local model is a mixture of the 3^(2N) deterministic strategies, so
the largest chained statistic compatible with given detection efficiencies
is a linear program over the strategy weights.  Detection constraints fix
P(A_j) = eta_A, P(B_k) = eta_B and P(A_j and B_k) = eta_A*eta_B for all N^2
setting pairs.  With coincidences pinned, each conditional correlation is
its numerator divided by eta_A*eta_B and the objective is linear.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParameterError, ResourceError
from .lhv import LhvModel, LhvState, a_index, b_index, chain_geometry
from .simplex import INFEASIBLE, OPTIMAL, linprog_max

EFFICIENCY_ONLY = "EfficiencyOnly"
FULL_QM = "FullQm"
MODES = (EFFICIENCY_ONLY, FULL_QM)

MIN_N, MAX_N = 2, 5


def _check_range(n: int) -> None:
    if int(n) != n or not MIN_N <= n <= MAX_N:
        raise ResourceError(f"strategy enumeration supports N in [{MIN_N}, {MAX_N}], got {n!r}")


def strategy_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All 3^(2N) strategies as (A, B) int8 arrays, lexicographic over A_1..A_2N-1, B_2..B_2N with -1 < 0 < +1."""
    _check_range(n)
    grid = np.array(list(itertools.product((-1, 0, 1), repeat=2 * n)), dtype=np.int8)
    return grid[:, :n], grid[:, n:]


def enumerate_strategies(n: int) -> list[LhvState]:
    a, b = strategy_arrays(n)
    return [LhvState(tuple(ra), tuple(rb)) for ra, rb in zip(a.tolist(), b.tolist())]


@dataclass(frozen=True)
class OracleProblem:
    n_settings: int
    eta_a: float
    eta_b: float
    constraint_mode: str = EFFICIENCY_ONLY
    tolerance: float = 1e-9
    # +1 maximizes the chain-positive signed sum, -1 its negation.
    orientation: int = 1
    # Turn the single-detection equalities into P(A_j) <= eta_A, P(B_k) <= eta_B.
    relax_singles: bool = False
    max_strategies: int = 3 ** (2 * MAX_N)

    def __post_init__(self):
        _check_range(self.n_settings)
        if 3 ** (2 * self.n_settings) > self.max_strategies:
            raise ResourceError(f"3^{2 * self.n_settings} strategies exceed the budget of {self.max_strategies}")
        for name in ("eta_a", "eta_b"):
            e = getattr(self, name)
            if not 0.0 < e <= 1.0:
                raise ParameterError(f"{name} must lie in (0, 1], got {e!r}")
        if self.constraint_mode not in MODES:
            raise ParameterError(f"constraint_mode must be one of {MODES}, got {self.constraint_mode!r}")
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")
        if self.orientation not in (1, -1):
            raise ParameterError("orientation must be +1 or -1")


@dataclass
class OracleSolution:
    status: str
    beta_max: Optional[float] = None
    witness: Optional[LhvModel] = None
    iterations: int = 0
    problem: Optional[OracleProblem] = field(default=None, repr=False)


def build_lp(problem: OracleProblem):
    """Return (c, A_eq, b_eq, A_ub, b_ub, a, b) for ``problem``."""
    n = problem.n_settings
    ea, eb = problem.eta_a, problem.eta_b
    a, b = strategy_arrays(n)
    da = (a != 0).astype(float)
    db = (b != 0).astype(float)
    af, bf = a.astype(float), b.astype(float)
    S = a.shape[0]

    eq_rows, eq_rhs, ub_rows, ub_rhs = [np.ones(S)], [1.0], [], []
    singles = [(da[:, i], ea) for i in range(n)] + [(db[:, k], eb) for k in range(n)]
    for row, rhs in singles:
        (ub_rows if problem.relax_singles else eq_rows).append(row)
        (ub_rhs if problem.relax_singles else eq_rhs).append(rhs)
    for i in range(n):
        for k in range(n):
            eq_rows.append(da[:, i] * db[:, k])
            eq_rhs.append(ea * eb)

    geom = chain_geometry(n)
    numerators = [s * af[:, a_index(j)] * bf[:, b_index(k)] for j, k, s in geom.measured_pairs]
    if problem.constraint_mode == FULL_QM:
        for i in range(n):
            eq_rows.append(af[:, i])
            eq_rhs.append(0.0)
            eq_rows.append(bf[:, i])
            eq_rhs.append(0.0)
        for num in numerators[1:]:
            eq_rows.append(num - numerators[0])
            eq_rhs.append(0.0)

    c = problem.orientation * np.sum(numerators, axis=0) / (ea * eb)
    A_ub = np.array(ub_rows) if ub_rows else None
    b_ub = np.array(ub_rhs) if ub_rhs else None
    return c, np.array(eq_rows), np.array(eq_rhs), A_ub, b_ub, a, b


def solve(problem: OracleProblem, rule: str = "bland") -> OracleSolution:
    c, A_eq, b_eq, A_ub, b_ub, a, b = build_lp(problem)
    res = linprog_max(c, A_eq, b_eq, A_ub, b_ub, tol=problem.tolerance, rule=rule)
    if res.status == INFEASIBLE:
        return OracleSolution(INFEASIBLE, iterations=res.iterations, problem=problem)
    assert res.status == OPTIMAL, res.status

    support = np.flatnonzero(res.x > 0)
    p = res.x[support]
    # Absorb round-off so the witness is exactly normalized.
    p = p / p.sum()
    states = tuple(
        (LhvState(tuple(a[s].tolist()), tuple(b[s].tolist())), float(w)) for s, w in zip(support, p)
    )
    witness = LhvModel(problem.n_settings, states)
    return OracleSolution(OPTIMAL, res.objective, witness, res.iterations, problem)
