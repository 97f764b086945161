"""Singlet-state predictions for the chained (Braunstein-Caves) observables.

Observer A measures at angles j*pi/2N for odd j, observer B at k*pi/2N for
even k.  Correlations use the chain-positive sign convention, in which the
2N-1 adjacent pairs are +V cos(pi/2N) and (A_1, B_2N) is -V cos(pi/2N).
A literal singlet calculation gives the global negation of these values
(equivalent to relabelling every B outcome), which leaves the chained
statistic unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise ParameterError(f"number of settings must be an integer >= 2, got {n!r}")


def _check_visibility(visibility: float) -> None:
    if not 0.0 <= visibility <= 1.0:
        raise ParameterError(f"visibility must lie in [0, 1], got {visibility!r}")


def chain_correlation(n: int, visibility: float = 1.0) -> float:
    """Magnitude V*cos(pi/2N) shared by every measured chain pair."""
    _check_n(n)
    _check_visibility(visibility)
    return visibility * math.cos(math.pi / (2 * n))


def quantum_beta(n: int, visibility: float = 1.0) -> float:
    """Quantum value 2VN cos(pi/2N) of the chained statistic."""
    return (2 * n - 2) * violation_ratio(n, visibility)


def quantum_correlation(n: int, j: int, k: int, visibility: float = 1.0) -> float:
    """Correlation <A_j B_k> for odd ``j`` in 1..2N-1 and even ``k`` in 2..2N."""
    _check_n(n)
    _check_visibility(visibility)
    if j % 2 != 1 or not 1 <= j <= 2 * n - 1:
        raise ParameterError(f"A setting index must be odd in [1, {2 * n - 1}], got {j!r}")
    if k % 2 != 0 or not 2 <= k <= 2 * n:
        raise ParameterError(f"B setting index must be even in [2, {2 * n}], got {k!r}")
    return visibility * math.cos((j - k) * math.pi / (2 * n))


def violation_ratio(n: int, visibility: float = 1.0) -> float:
    """Ratio D of the quantum chained statistic to the local bound 2N-2."""
    return 2 * n * chain_correlation(n, visibility) / (2 * n - 2)


def critical_visibility(n: int) -> float:
    """Smallest visibility at which the singlet still violates the chained inequality."""
    return 1.0 / violation_ratio(n, 1.0)


@dataclass(frozen=True)
class QuantumPrediction:
    n_settings: int
    visibility: float
    pair_correlation: float
    beta: float
    violation_ratio: float


def predict(n: int, visibility: float = 1.0) -> QuantumPrediction:
    corr = chain_correlation(n, visibility)
    beta = 2 * n * corr
    return QuantumPrediction(
        n_settings=n,
        visibility=visibility,
        pair_correlation=corr,
        beta=beta,
        violation_ratio=beta / (2 * n - 2),
    )
