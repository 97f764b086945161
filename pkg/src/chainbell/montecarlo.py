"""Seeded finite-statistics simulation of a chained Bell experiment.

Each emitted pair draws an LHV state from the model and one of the 2N
measured setting pairs uniformly at random.  Trials are processed in
fixed-size shards; shard ``i`` uses a PCG64 generator seeded with
``SeedSequence(seed, spawn_key=(i,))`` so the counts depend only on the
seed and the trial count, never on how many worker threads run the shards.
Only ``Generator.random`` and ``Generator.integers`` are used, whose
streams numpy keeps stable for PCG64.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .lhv import LhvModel, a_index, b_index, chain_geometry

SHARD_SIZE = 1 << 18
THREADS_ENV = "CHAINBELL_THREADS"

# Per-pair outcome categories.
_NEITHER, _A_ONLY, _B_ONLY, _PLUS, _MINUS = range(5)
_NCAT = 5


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int = 0
    workers: Optional[int] = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ParameterError(f"trials must be a positive integer, got {self.trials!r}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class PairCounts:
    j: int
    k: int
    sign: int
    emitted: int
    coincidences: int
    a_only: int
    b_only: int
    neither: int
    plus_products: int
    correlation: Optional[float]
    correlation_se: Optional[float]


@dataclass(frozen=True)
class SimReport:
    seed: int
    trials: int
    pairs: tuple[PairCounts, ...]
    eta_a: Optional[float]
    eta_a_se: Optional[float]
    eta_b: Optional[float]
    eta_b_se: Optional[float]
    beta: Optional[float]
    beta_se: Optional[float]

    @property
    def coincidence_rate(self) -> float:
        return sum(p.coincidences for p in self.pairs) / self.trials

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pairs"] = [asdict(p) for p in self.pairs]
        d["coincidence_rate"] = self.coincidence_rate
        return d


def _default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return 1


class _Sampler:
    def __init__(self, model: LhvModel):
        n = model.n_settings
        a, b, p = model.arrays()
        s = a.shape[0]
        # Rows 0..s-1 explicit states, s white noise (signs drawn per trial), s+1 all-zero.
        self.a = np.vstack([a, np.zeros((2, n), np.int8)])
        self.b = np.vstack([b, np.zeros((2, n), np.int8)])
        self.noise_row = s
        weights = np.concatenate([p, [model.white_noise_weight, model.undetected_weight]])
        self.cum = np.cumsum(weights)
        self.cum[-1] = max(self.cum[-1], 1.0)
        geom = chain_geometry(n)
        self.pair_a = np.array([a_index(j) for j, _, _ in geom.measured_pairs])
        self.pair_b = np.array([b_index(k) for _, k, _ in geom.measured_pairs])
        self.n_pairs = len(geom.measured_pairs)

    def shard(self, seed: int, index: int, size: int) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
        state = np.searchsorted(self.cum, rng.random(size), side="right")
        state = np.minimum(state, len(self.cum) - 1)
        pair = rng.integers(0, self.n_pairs, size)
        noise_signs = rng.integers(0, 2, (2, size), dtype=np.int8) * 2 - 1

        a_out = self.a[state, self.pair_a[pair]]
        b_out = self.b[state, self.pair_b[pair]]
        noisy = state == self.noise_row
        a_out = np.where(noisy, noise_signs[0], a_out)
        b_out = np.where(noisy, noise_signs[1], b_out)

        det_a, det_b = a_out != 0, b_out != 0
        cat = np.full(size, _NEITHER, dtype=np.int64)
        cat[det_a & ~det_b] = _A_ONLY
        cat[~det_a & det_b] = _B_ONLY
        both = det_a & det_b
        cat[both & (a_out * b_out > 0)] = _PLUS
        cat[both & (a_out * b_out < 0)] = _MINUS
        return np.bincount(pair * _NCAT + cat, minlength=self.n_pairs * _NCAT).reshape(self.n_pairs, _NCAT)


def _wald(successes: int, total: int) -> tuple[Optional[float], Optional[float]]:
    if total == 0:
        return None, None
    p = successes / total
    return p, math.sqrt(p * (1 - p) / total)


def _pair_counts(j: int, k: int, sign: int, row: np.ndarray) -> PairCounts:
    neither, a_only, b_only, plus, minus = (int(x) for x in row)
    coinc = plus + minus
    corr = se = None
    if coinc > 0:
        corr = (plus - minus) / coinc
        if coinc > 1:
            var = coinc / (coinc - 1) * (1 - corr * corr)
            se = math.sqrt(var / coinc)
    return PairCounts(j, k, sign, int(row.sum()), coinc, a_only, b_only, neither, plus, corr, se)


def simulate(model: LhvModel, config: SimConfig) -> SimReport:
    sampler = _Sampler(model)
    n = model.n_settings
    sizes = [SHARD_SIZE] * (config.trials // SHARD_SIZE)
    if config.trials % SHARD_SIZE:
        sizes.append(config.trials % SHARD_SIZE)
    workers = config.workers or _default_workers()

    def run(i):
        return sampler.shard(config.seed, i, sizes[i])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    counts = np.sum(parts, axis=0)

    geom = chain_geometry(n)
    pairs = tuple(_pair_counts(j, k, s, counts[i]) for i, (j, k, s) in enumerate(geom.measured_pairs))

    # Plug-in P(A | B) and P(B | A) per measured pair; the efficiency is the minimum.
    cond_a = [_wald(p.coincidences, p.coincidences + p.b_only) for p in pairs]
    cond_b = [_wald(p.coincidences, p.coincidences + p.a_only) for p in pairs]
    eta_a, eta_a_se = min((c for c in cond_a if c[0] is not None), default=(None, None))
    eta_b, eta_b_se = min((c for c in cond_b if c[0] is not None), default=(None, None))

    beta = beta_se = None
    if all(p.correlation is not None for p in pairs):
        beta = 0.0
        for g in range(n):
            p1, p2 = pairs[2 * g], pairs[2 * g + 1]
            beta += abs(p1.sign * p1.correlation + p2.sign * p2.correlation)
        if all(p.correlation_se is not None for p in pairs):
            beta_se = math.sqrt(sum(p.correlation_se**2 for p in pairs))

    return SimReport(config.seed, config.trials, pairs, eta_a, eta_a_se, eta_b, eta_b_se, beta, beta_se)
