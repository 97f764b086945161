"""Explicit local models that reach the efficiency bounds.

Every building block is a family of "threshold" states over the combined
setting sequence 1, 2, ..., 2N (A on odd positions, B on even): the value is
m before a threshold position and -m after it, optionally with a single
no-detection at the threshold itself.  Uniform mixtures over the threshold
position and m = +-1 have zero marginals and extreme chain correlations.
"""

from __future__ import annotations

import enum
from fractions import Fraction
from typing import Optional

from .errors import ParameterError, RangeError
from .lhv import LhvModel, LhvState

# Slack for floating-point round-off at the edges of admissible ranges.
EDGE_TOL = 1e-12


class SubensembleKind(enum.Enum):
    LAMBDA0 = "Lambda0"
    LAMBDA1 = "Lambda1"
    LAMBDA10 = "Lambda10"
    LAMBDA01 = "Lambda01"
    ALL_ZERO = "AllZero"
    WHITE_NOISE = "WhiteNoise"


FLIPPED_SUFFIX = "/flipB"


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise ParameterError(f"number of settings must be an integer >= 2, got {n!r}")


def _threshold_state(n: int, threshold: int, m: int, zero_at_threshold: bool) -> LhvState:
    values = []
    for j in range(1, 2 * n + 1):
        if j < threshold:
            values.append(m)
        elif j == threshold and zero_at_threshold:
            values.append(0)
        else:
            values.append(-m)
    return LhvState(tuple(values[0::2]), tuple(values[1::2]))


def lambda0_states(n: int) -> list[LhvState]:
    """4N fully detected states: m before the threshold, -m from it on."""
    _check_n(n)
    return [_threshold_state(n, t, m, False) for t in range(1, 2 * n + 1) for m in (1, -1)]


def lambda1_states(n: int) -> list[LhvState]:
    """4N states with exactly one no-detection, placed at the threshold."""
    _check_n(n)
    return [_threshold_state(n, t, m, True) for t in range(1, 2 * n + 1) for m in (1, -1)]


def lambda10_states(n: int) -> list[LhvState]:
    """2N states whose single no-detection is always on the A side."""
    _check_n(n)
    return [_threshold_state(n, 2 * t - 1, m, True) for t in range(1, n + 1) for m in (1, -1)]


def lambda01_states(n: int) -> list[LhvState]:
    """Mirror of :func:`lambda10_states`: the no-detection is always on the B side."""
    _check_n(n)
    return [_threshold_state(n, 2 * t, m, True) for t in range(1, n + 1) for m in (1, -1)]


def _spread(states: list[LhvState], weight: float) -> list[tuple[LhvState, float]]:
    if weight <= 0.0:
        return []
    w = weight / len(states)
    return [(s, w) for s in states]


def _assemble(
    n: int,
    blocks: list[tuple[str, list[LhvState], float]],
    white_noise: float,
    undetected: float,
) -> LhvModel:
    weighted = []
    components = {}
    for tag, states, weight in blocks:
        weighted += _spread(states, weight)
        if weight > 0.0:
            components[tag] = weight
    if white_noise > 0.0:
        components[SubensembleKind.WHITE_NOISE.value] = white_noise
    if undetected > 0.0:
        components[SubensembleKind.ALL_ZERO.value] = undetected
    return LhvModel(n, tuple(weighted), white_noise, undetected, components=components)


def _dilute(
    n: int,
    beta_target: Optional[float],
    natural_beta: float,
    coincidence: float,
    full_weight: float,
    partial_weight: float,
) -> tuple[float, float]:
    """Split the correlation reduction needed to hit ``beta_target``.

    Returns (white_noise, flipped): weight moved from the fully detected block
    into white noise, and weight of the partially detected blocks replaced by
    their B-flipped copies.  White noise is used first; flipping takes over
    only when the fully detected weight is exhausted.
    """
    if beta_target is None:
        return 0.0, 0.0
    if beta_target < 0:
        raise RangeError(f"beta_target must be >= 0, got {beta_target!r}")
    if beta_target > natural_beta + EDGE_TOL:
        raise RangeError(
            f"beta_target {beta_target!r} exceeds the value {natural_beta!r} this model reaches; "
            "dilution can only lower it"
        )
    per_unit = 1.0 - 1.0 / n
    # Correlation numerators of the chain pairs, per unit of coincidence.
    excess = max(0.0, (natural_beta - beta_target) / (2 * n) * coincidence)
    white = min(full_weight, excess / per_unit)
    excess -= white * per_unit
    flipped = min(partial_weight / 2, max(0.0, excess / (2 * per_unit)))
    return white, flipped


def symmetric_min_eta(n: int) -> Fraction:
    """Smallest efficiency for which the symmetric construction has nonnegative weights."""
    return Fraction(2 * (n - 1), 2 * n - 1)


def symmetric_weights(n: int, eta: float) -> tuple[float, float, float]:
    """(P(Lambda0), P(Lambda1), P(all-zero)) solving the single/coincidence detection equations."""
    p0 = (2 * n - 1) * eta**2 - (2 * n - 2) * eta
    p1 = 2 * n * (eta - eta**2)
    return p0, p1, (1.0 - eta) ** 2


def symmetric_model(n: int, eta: float, beta_target: Optional[float] = None) -> LhvModel:
    """Model with eta_A = eta_B = eta and independent, setting-independent no-detections.

    Without ``beta_target`` the chained statistic is (2N-2)(2/eta - 1).  With
    it, the correlations are diluted to give exactly ``beta_target`` while all
    detection probabilities stay as they are.
    """
    _check_n(n)
    lo = symmetric_min_eta(n)
    if not (float(lo) - EDGE_TOL <= eta <= 1.0):
        raise RangeError(f"eta must lie in the admissible interval [{lo}, 1] for N={n}, got {eta!r}")
    p0, p1, p_none = symmetric_weights(n, eta)
    p0 = max(p0, 0.0)
    natural = (2 * n - 2) * (2.0 / eta - 1.0)
    white, flipped = _dilute(n, beta_target, natural, eta * eta, p0, p1)

    l1 = lambda1_states(n)
    return _assemble(
        n,
        [
            (SubensembleKind.LAMBDA0.value, lambda0_states(n), p0 - white),
            (SubensembleKind.LAMBDA1.value, l1, p1 - flipped),
            (SubensembleKind.LAMBDA1.value + FLIPPED_SUFFIX, [s.flip_b() for s in l1], flipped),
        ],
        white,
        p_none,
    )


def asymmetric_weights(n: int, eta_a: float, eta_b: float) -> tuple[float, float, float, float]:
    """(P(Lambda00), P(Lambda01), P(Lambda10), P(all-zero)) for the asymmetric construction."""
    p00 = (2 * n - 1) * eta_a * eta_b - (n - 1) * (eta_a + eta_b)
    p01 = n * (eta_a - eta_a * eta_b)
    p10 = n * (eta_b - eta_a * eta_b)
    return p00, p01, p10, (1.0 - eta_a) * (1.0 - eta_b)


def asymmetric_model(n: int, eta_a: float, eta_b: float, beta_target: Optional[float] = None) -> LhvModel:
    """Model with efficiencies (eta_a, eta_b); chained statistic (2N-2)(1/eta_a + 1/eta_b - 1).

    Lambda01 (no-detections on B) carries N*eta_a*(1-eta_b) and Lambda10
    (no-detections on A) carries N*eta_b*(1-eta_a).
    """
    _check_n(n)
    for name, e in (("eta_a", eta_a), ("eta_b", eta_b)):
        if not 0.0 < e <= 1.0:
            raise ParameterError(f"{name} must lie in (0, 1], got {e!r}")
    p00, p01, p10, p_none = asymmetric_weights(n, eta_a, eta_b)
    if p00 < -EDGE_TOL:
        raise RangeError(
            f"(eta_a, eta_b) = ({eta_a!r}, {eta_b!r}) is outside the admissible region "
            f"(2N-1)*eta_a*eta_b >= (N-1)*(eta_a+eta_b) for N={n}"
        )
    p00 = max(p00, 0.0)
    natural = (2 * n - 2) * (1.0 / eta_a + 1.0 / eta_b - 1.0)
    white, flipped = _dilute(n, beta_target, natural, eta_a * eta_b, p00, p01 + p10)
    frac = flipped / (p01 + p10) if flipped > 0 else 0.0

    l01, l10 = lambda01_states(n), lambda10_states(n)
    return _assemble(
        n,
        [
            (SubensembleKind.LAMBDA0.value, lambda0_states(n), p00 - white),
            (SubensembleKind.LAMBDA01.value, l01, p01 * (1 - frac)),
            (SubensembleKind.LAMBDA10.value, l10, p10 * (1 - frac)),
            (SubensembleKind.LAMBDA01.value + FLIPPED_SUFFIX, [s.flip_b() for s in l01], p01 * frac),
            (SubensembleKind.LAMBDA10.value + FLIPPED_SUFFIX, [s.flip_b() for s in l10], p10 * frac),
        ],
        white,
        p_none,
    )
