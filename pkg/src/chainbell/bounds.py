"""Closed-form detection-efficiency bounds for the chained Bell inequality."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import ParameterError, RangeError
from .quantum import quantum_beta

# Slack on the [2N-2, 2N] interval for betas computed in floating point.
BETA_TOL = 1e-8


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise ParameterError(f"number of settings must be an integer >= 2, got {n!r}")


def _check_eta(name: str, eta: float) -> None:
    if not 0.0 < eta <= 1.0:
        raise ParameterError(f"{name} must lie in (0, 1], got {eta!r}")


def _scaled_cos(n: int) -> float:
    return n / (n - 1) * math.cos(math.pi / (2 * n))


def eta_crit_symmetric(n: int) -> float:
    """Critical efficiency when both sides detect with the same efficiency."""
    _check_n(n)
    return 2.0 / (_scaled_cos(n) + 1.0)


def eta_a_crit_asymmetric(n: int, eta_b: float) -> float:
    """Critical efficiency of side A given the efficiency of side B."""
    _check_n(n)
    den = _scaled_cos(n) + 1.0 - 1.0 / eta_b
    if den <= 0.0:
        raise RangeError(f"no finite critical eta_A at eta_B={eta_b!r} for N={n}")
    return 1.0 / den


def beta_max_lhv(n: int, eta_a: float, eta_b: float) -> float:
    """Largest grouped chained statistic any local model reaches at efficiencies (eta_a, eta_b).

    Capped at the algebraic maximum 2N.
    """
    _check_n(n)
    _check_eta("eta_a", eta_a)
    _check_eta("eta_b", eta_b)
    return min(2.0 * n, 2.0 * (n - 1) * (1.0 / eta_a + 1.0 / eta_b - 1.0))


def eta_bound_from_beta(n: int, beta: float, eta_b: Optional[float] = None, tol: float = BETA_TOL) -> float:
    """Largest efficiency at which a local model can still produce ``beta``.

    Symmetric when ``eta_b`` is None, otherwise the bound on eta_A at the
    given eta_B.  ``beta`` must lie in [2N-2, 2N]; values within ``tol`` of
    the interval are clamped onto it.
    """
    _check_n(n)
    lo, hi = 2.0 * n - 2, 2.0 * n
    if not lo - tol <= beta <= hi + tol:
        raise RangeError(f"beta must lie in [{lo:g}, {hi:g}] for N={n}, got {beta!r}")
    beta = min(max(beta, lo), hi)
    if eta_b is None:
        return 2.0 * (n - 1) / (n - 1 + beta / 2.0)
    _check_eta("eta_b", eta_b)
    den = beta / (2.0 * (n - 1)) + 1.0 - 1.0 / eta_b
    if den <= 0.0:
        raise RangeError(f"no finite bound on eta_A at eta_B={eta_b!r} for beta={beta!r}")
    return 1.0 / den


def delta_lower_bound(n: int, eta_a: float, eta_b: float) -> float:
    """Lower bound on P(all settings detected | a measured coincidence). May be negative (vacuous)."""
    _check_n(n)
    _check_eta("eta_a", eta_a)
    _check_eta("eta_b", eta_b)
    return 2.0 * n - 1 - (n - 1) / eta_a - (n - 1) / eta_b


def eta_crit_from_violation(d: float, eta_b: Optional[float] = None) -> float:
    """Critical efficiency expressed through the violation ratio D."""
    if not d > 1.0:
        raise RangeError(f"violation ratio must exceed 1, got {d!r}")
    if eta_b is None:
        return 2.0 / (d + 1.0)
    _check_eta("eta_b", eta_b)
    den = d + 1.0 - 1.0 / eta_b
    if den <= 0.0:
        raise RangeError(f"no finite critical eta_A at eta_B={eta_b!r}")
    return 1.0 / den


@dataclass(frozen=True)
class BoundReport:
    n_settings: int
    eta_a: float
    eta_b: float
    beta_max_lhv: float
    delta_lower: float
    # True when a local model can reproduce the quantum beta at these efficiencies.
    critical: bool


def bound_report(n: int, eta_a: float, eta_b: float, visibility: float = 1.0, tol: float = 1e-12) -> BoundReport:
    bmax = beta_max_lhv(n, eta_a, eta_b)
    return BoundReport(
        n_settings=n,
        eta_a=eta_a,
        eta_b=eta_b,
        beta_max_lhv=bmax,
        delta_lower=delta_lower_bound(n, eta_a, eta_b),
        critical=quantum_beta(n, visibility) <= bmax + tol,
    )
