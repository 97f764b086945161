"""Local hidden-variable states, ensembles and their exact statistics.

A state fixes one instruction per setting: -1 or +1 (fire that detector) or
0 (no detection).  A model is a finite mixture of states plus two implicit
components: uniform white noise over all fully-detected sign assignments,
and the all-zero (never detected) state.

Setting labels follow the chain: A settings are the odd indices
1, 3, ..., 2N-1 and B settings the even indices 2, 4, ..., 2N.  Position
``i`` of ``a_values`` holds A_{2i+1}; position ``i`` of ``b_values`` holds
B_{2i+2}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import jsonschema
import numpy as np

from .errors import ModelValidationError, ParameterError

INSTRUCTIONS = (-1, 0, 1)

NORMALIZATION_TOL = 1e-12
LOAD_NORMALIZATION_TOL = 1e-9


def a_label(i: int) -> int:
    return 2 * i + 1


def b_label(i: int) -> int:
    return 2 * i + 2


def a_index(j: int) -> int:
    return (j - 1) // 2


def b_index(k: int) -> int:
    return k // 2 - 1


@dataclass(frozen=True)
class LhvState:
    a_values: tuple[int, ...]
    b_values: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(v) for v in self.a_values)
        b = tuple(int(v) for v in self.b_values)
        if len(a) != len(b):
            raise ParameterError(f"A and B instruction lists differ in length ({len(a)} vs {len(b)})")
        for v in a + b:
            if v not in INSTRUCTIONS:
                raise ParameterError(f"instruction must be one of -1, 0, +1, got {v!r}")
        object.__setattr__(self, "a_values", a)
        object.__setattr__(self, "b_values", b)

    @property
    def n_settings(self) -> int:
        return len(self.a_values)

    def flip_b(self) -> "LhvState":
        return LhvState(self.a_values, tuple(-v for v in self.b_values))


@dataclass(frozen=True)
class LhvModel:
    n_settings: int
    weighted_states: tuple[tuple[LhvState, float], ...] = ()
    white_noise_weight: float = 0.0
    undetected_weight: float = 0.0
    # Informational only: total weight per named subensemble.
    components: Mapping[str, float] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = self.n_settings
        if int(n) != n or n < 2:
            raise ParameterError(f"number of settings must be an integer >= 2, got {n!r}")
        pairs = tuple((s, float(p)) for s, p in self.weighted_states)
        for s, p in pairs:
            if s.n_settings != n:
                raise ParameterError(f"state {s} has {s.n_settings} settings per side, expected {n}")
            if p < 0 or not math.isfinite(p):
                raise ParameterError(f"state probability must be finite and >= 0, got {p!r}")
        for name in ("white_noise_weight", "undetected_weight"):
            w = getattr(self, name)
            if w < 0 or not math.isfinite(w):
                raise ParameterError(f"{name} must be finite and >= 0, got {w!r}")
        total = math.fsum([p for _, p in pairs] + [self.white_noise_weight, self.undetected_weight])
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ParameterError(f"model probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "weighted_states", pairs)
        object.__setattr__(self, "components", dict(self.components))

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Explicit states as (A, B, p) arrays of shapes (S, N), (S, N), (S,)."""
        n = self.n_settings
        if not self.weighted_states:
            return np.zeros((0, n), np.int8), np.zeros((0, n), np.int8), np.zeros(0)
        a = np.array([s.a_values for s, _ in self.weighted_states], dtype=np.int8)
        b = np.array([s.b_values for s, _ in self.weighted_states], dtype=np.int8)
        p = np.array([p for _, p in self.weighted_states], dtype=float)
        return a, b, p


def uniform_mixture(n: int, states: Sequence[LhvState], tag: Optional[str] = None) -> LhvModel:
    """Model putting equal weight on every state in ``states``."""
    w = 1.0 / len(states)
    return LhvModel(n, tuple((s, w) for s in states), components={tag: 1.0} if tag else {})


@dataclass(frozen=True)
class ChainGeometry:
    n_settings: int
    measured_pairs: tuple[tuple[int, int, int], ...]

    def groups(self) -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
        """Consecutive pairs of measured pairs sharing a setting, as bounded by the grouped statistic."""
        mp = self.measured_pairs
        return [(mp[2 * i], mp[2 * i + 1]) for i in range(self.n_settings)]


def chain_geometry(n: int) -> ChainGeometry:
    if int(n) != n or n < 2:
        raise ParameterError(f"number of settings must be an integer >= 2, got {n!r}")
    pairs = []
    for i in range(1, n + 1):
        pairs.append((2 * i - 1, 2 * i, 1))
        if i < n:
            pairs.append((2 * i + 1, 2 * i, 1))
    pairs.append((1, 2 * n, -1))
    return ChainGeometry(n, tuple(pairs))


def grouped_beta(correlations: Mapping[tuple[int, int], Optional[float]], n: int) -> Optional[float]:
    """Chained statistic in grouped absolute-value form; None if any measured correlation is undefined."""
    total = 0.0
    for (j1, k1, s1), (j2, k2, s2) in chain_geometry(n).groups():
        e1, e2 = correlations.get((j1, k1)), correlations.get((j2, k2))
        if e1 is None or e2 is None:
            return None
        total += abs(s1 * e1 + s2 * e2)
    return total


def signed_beta(correlations: Mapping[tuple[int, int], Optional[float]], n: int, orientation: int = 1) -> Optional[float]:
    """Plain signed chain sum, multiplied by ``orientation`` (+1 or -1)."""
    total = 0.0
    for j, k, s in chain_geometry(n).measured_pairs:
        e = correlations.get((j, k))
        if e is None:
            return None
        total += s * e
    return orientation * total


@dataclass(frozen=True)
class ModelStats:
    """Exact statistics of a model. Conditional quantities with a zero denominator are None."""

    n_settings: int
    pair_correlations: dict[tuple[int, int], Optional[float]]
    pair_coincidence_probs: dict[tuple[int, int], float]
    a_detection_probs: dict[int, float]
    b_detection_probs: dict[int, float]
    a_marginals: dict[int, Optional[float]]
    b_marginals: dict[int, Optional[float]]
    eta_a: Optional[float]
    eta_b: Optional[float]
    beta: Optional[float]

    @property
    def beta_defined(self) -> bool:
        return self.beta is not None

    def measured_correlations(self) -> list[Optional[float]]:
        return [self.pair_correlations[(j, k)] for j, k, _ in chain_geometry(self.n_settings).measured_pairs]

    def to_dict(self) -> dict:
        def key(jk):
            return f"A{jk[0]}B{jk[1]}"

        return {
            "n": self.n_settings,
            "beta": self.beta,
            "eta_a": self.eta_a,
            "eta_b": self.eta_b,
            "a_detection_probs": {f"A{j}": v for j, v in self.a_detection_probs.items()},
            "b_detection_probs": {f"B{k}": v for k, v in self.b_detection_probs.items()},
            "a_marginals": {f"A{j}": v for j, v in self.a_marginals.items()},
            "b_marginals": {f"B{k}": v for k, v in self.b_marginals.items()},
            "pair_coincidence_probs": {key(jk): v for jk, v in self.pair_coincidence_probs.items()},
            "pair_correlations": {key(jk): v for jk, v in self.pair_correlations.items()},
        }


def _ratio(num: float, den: float) -> Optional[float]:
    return None if den <= 0.0 else num / den


def _min_defined(values: Iterable[Optional[float]]) -> Optional[float]:
    vals = [v for v in values if v is not None]
    return min(vals) if vals else None


def evaluate(model: LhvModel) -> ModelStats:
    n = model.n_settings
    a, b, p = model.arrays()
    w = model.white_noise_weight
    det_a = (a != 0).astype(float)
    det_b = (b != 0).astype(float)

    pa = p @ det_a + w
    pb = p @ det_b + w
    coinc = np.einsum("s,sj,sk->jk", p, det_a, det_b) + w
    num = np.einsum("s,sj,sk->jk", p, a.astype(float), b.astype(float))
    marg_a = p @ a
    marg_b = p @ b

    a_det = {a_label(i): float(pa[i]) for i in range(n)}
    b_det = {b_label(i): float(pb[i]) for i in range(n)}
    coinc_d, corr_d = {}, {}
    for i in range(n):
        for k in range(n):
            key = (a_label(i), b_label(k))
            coinc_d[key] = float(coinc[i, k])
            corr_d[key] = _ratio(float(num[i, k]), float(coinc[i, k]))

    eta_a = _min_defined(_ratio(coinc_d[(j, k)], b_det[k]) for j in a_det for k in b_det)
    eta_b = _min_defined(_ratio(coinc_d[(j, k)], a_det[j]) for j in a_det for k in b_det)

    return ModelStats(
        n_settings=n,
        pair_correlations=corr_d,
        pair_coincidence_probs=coinc_d,
        a_detection_probs=a_det,
        b_detection_probs=b_det,
        a_marginals={a_label(i): _ratio(float(marg_a[i]), float(pa[i])) for i in range(n)},
        b_marginals={b_label(i): _ratio(float(marg_b[i]), float(pb[i])) for i in range(n)},
        eta_a=eta_a,
        eta_b=eta_b,
        beta=grouped_beta(corr_d, n),
    )


@dataclass(frozen=True)
class QmReport:
    marginals_ok: bool
    correlations_ok: bool
    uniformity_ok: bool
    independence_ok: bool
    require_independence: bool
    max_marginal_dev: float
    max_correlation_dev: float
    max_uniformity_dev: float
    max_independence_dev: float

    @property
    def passed(self) -> bool:
        ok = self.marginals_ok and self.correlations_ok and self.uniformity_ok
        return ok and (self.independence_ok or not self.require_independence)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "marginals_ok": self.marginals_ok,
            "correlations_ok": self.correlations_ok,
            "uniformity_ok": self.uniformity_ok,
            "independence_ok": self.independence_ok,
            "require_independence": self.require_independence,
            "max_marginal_dev": self.max_marginal_dev,
            "max_correlation_dev": self.max_correlation_dev,
            "max_uniformity_dev": self.max_uniformity_dev,
            "max_independence_dev": self.max_independence_dev,
        }


def _spread(values: Iterable[float]) -> float:
    vals = list(values)
    return max(vals) - min(vals) if vals else 0.0


def check_qm_constraints(
    stats: ModelStats,
    n: int,
    visibility: float = 1.0,
    tol: float = 1e-9,
    require_independence: bool = True,
) -> QmReport:
    """Compare a model's statistics with the singlet predictions at visibility ``visibility``.

    Checks zero conditional marginals, the chain correlation values, setting
    independence of detection probabilities and (unless relaxed) statistical
    independence of detections at the two sites. Undefined quantities count
    as infinite deviations.
    """
    from .quantum import chain_correlation

    if stats.n_settings != n:
        raise ParameterError(f"stats are for N={stats.n_settings}, not N={n}")
    inf = math.inf
    target = chain_correlation(n, visibility)

    marg = list(stats.a_marginals.values()) + list(stats.b_marginals.values())
    marg_dev = max(inf if m is None else abs(m) for m in marg)

    corr_dev = 0.0
    for j, k, s in chain_geometry(n).measured_pairs:
        e = stats.pair_correlations[(j, k)]
        corr_dev = max(corr_dev, inf if e is None else abs(e - s * target))

    unif_dev = max(
        _spread(stats.a_detection_probs.values()),
        _spread(stats.b_detection_probs.values()),
        _spread(stats.pair_coincidence_probs.values()),
    )

    indep_dev = 0.0
    for (j, k), c in stats.pair_coincidence_probs.items():
        indep_dev = max(indep_dev, abs(c - stats.a_detection_probs[j] * stats.b_detection_probs[k]))

    return QmReport(
        marginals_ok=marg_dev <= tol,
        correlations_ok=corr_dev <= tol,
        uniformity_ok=unif_dev <= tol,
        independence_ok=indep_dev <= tol,
        require_independence=require_independence,
        max_marginal_dev=marg_dev,
        max_correlation_dev=corr_dev,
        max_uniformity_dev=unif_dev,
        max_independence_dev=indep_dev,
    )


MODEL_SCHEMA = {
    "type": "object",
    "required": ["n", "states", "white_noise", "undetected"],
    "properties": {
        "n": {"type": "integer", "minimum": 2},
        "states": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "p"],
                "properties": {
                    "a": {"type": "array", "items": {"enum": list(INSTRUCTIONS)}},
                    "b": {"type": "array", "items": {"enum": list(INSTRUCTIONS)}},
                    "p": {"type": "number", "minimum": 0},
                },
            },
        },
        "white_noise": {"type": "number", "minimum": 0},
        "undetected": {"type": "number", "minimum": 0},
        "components": {"type": "object", "additionalProperties": {"type": "number"}},
    },
}


def model_to_dict(model: LhvModel) -> dict:
    out = {
        "n": model.n_settings,
        "states": [{"a": list(s.a_values), "b": list(s.b_values), "p": p} for s, p in model.weighted_states],
        "white_noise": model.white_noise_weight,
        "undetected": model.undetected_weight,
    }
    if model.components:
        out["components"] = dict(model.components)
    return out


def _field_path(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def model_from_dict(data: dict) -> LhvModel:
    """Validate and build a model; raises ModelValidationError naming the offending field."""
    try:
        jsonschema.validate(data, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ModelValidationError(f"{_field_path(exc.absolute_path)}: {exc.message}") from None
    n = data["n"]
    for i, st in enumerate(data["states"]):
        for side in ("a", "b"):
            if len(st[side]) != n:
                raise ModelValidationError(f"states[{i}].{side}: expected {n} instructions, got {len(st[side])}")
    probs = [st["p"] for st in data["states"]] + [data["white_noise"], data["undetected"]]
    total = math.fsum(probs)
    if abs(total - 1.0) > LOAD_NORMALIZATION_TOL:
        raise ModelValidationError(f"p: probabilities sum to {total!r}, expected 1 within {LOAD_NORMALIZATION_TOL}")
    if abs(total - 1.0) <= NORMALIZATION_TOL:
        total = 1.0  # keep stored weights bit-for-bit
    states = tuple((LhvState(tuple(st["a"]), tuple(st["b"])), st["p"] / total) for st in data["states"])
    return LhvModel(
        n,
        states,
        white_noise_weight=data["white_noise"] / total,
        undetected_weight=data["undetected"] / total,
        components=data.get("components", {}),
    )


def save_model(model: LhvModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> LhvModel:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelValidationError(f"<root>: invalid JSON ({exc})") from None
    return model_from_dict(data)
