from fractions import Fraction

import numpy as np
import pytest


def brute_force_stats(n, weighted_states):
    """Exact rational statistics by direct enumeration; shares no code with chainbell.lhv.evaluate.

    ``weighted_states`` is an iterable of ((a_values, b_values), Fraction weight).
    Returns dicts keyed by the chain setting labels.
    """
    det_a = {2 * i + 1: Fraction(0) for i in range(n)}
    det_b = {2 * k + 2: Fraction(0) for k in range(n)}
    sum_a = dict.fromkeys(det_a, Fraction(0))
    sum_b = dict.fromkeys(det_b, Fraction(0))
    coinc, prod = {}, {}
    for (a, b), w in weighted_states:
        for i, av in enumerate(a):
            if av:
                det_a[2 * i + 1] += w
                sum_a[2 * i + 1] += w * av
        for k, bv in enumerate(b):
            if bv:
                det_b[2 * k + 2] += w
                sum_b[2 * k + 2] += w * bv
        for i, av in enumerate(a):
            for k, bv in enumerate(b):
                key = (2 * i + 1, 2 * k + 2)
                coinc.setdefault(key, Fraction(0))
                prod.setdefault(key, Fraction(0))
                if av and bv:
                    coinc[key] += w
                    prod[key] += w * av * bv
    corr = {key: (prod[key] / coinc[key] if coinc[key] else None) for key in coinc}
    return {
        "det_a": det_a,
        "det_b": det_b,
        "marg_a": {j: (sum_a[j] / det_a[j] if det_a[j] else None) for j in det_a},
        "marg_b": {k: (sum_b[k] / det_b[k] if det_b[k] else None) for k in det_b},
        "coinc": coinc,
        "corr": corr,
    }


def uniform(states):
    w = Fraction(1, len(states))
    return [((s.a_values, s.b_values), w) for s in states]


def chain_pairs(n):
    """Measured (j, k, sign) pairs written out directly from the inequality."""
    out = []
    for i in range(1, n):
        out += [(2 * i - 1, 2 * i, 1), (2 * i + 1, 2 * i, 1)]
    out += [(2 * n - 1, 2 * n, 1), (1, 2 * n, -1)]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
