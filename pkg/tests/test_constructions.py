import math
from fractions import Fraction

import numpy as np
import pytest

from chainbell.bounds import beta_max_lhv, eta_a_crit_asymmetric, eta_bound_from_beta, eta_crit_symmetric
from chainbell.constructions import (
    asymmetric_model,
    lambda0_states,
    lambda01_states,
    lambda1_states,
    lambda10_states,
    symmetric_model,
)
from chainbell.errors import ParameterError, RangeError
from chainbell.lhv import check_qm_constraints, evaluate
from chainbell.quantum import quantum_beta

from conftest import brute_force_stats, chain_pairs, uniform

ETA_CRIT_3 = 0.869929034695732  # mpmath, 30 digits
ETA_A_CRIT_3 = 0.769800358919501


def _chain_values(ref, n):
    return [ref["corr"][(j, k)] for j, k, _ in chain_pairs(n)]


class TestLambda0:
    def test_count_and_first_state(self):
        states = lambda0_states(2)
        assert len(states) == 8
        assert states[0].a_values == (-1, -1) and states[0].b_values == (-1, -1)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_saturates_local_bound(self, n):
        ref = brute_force_stats(n, uniform(lambda0_states(n)))
        expected = Fraction(n - 1, n)
        signs = [s for _, _, s in chain_pairs(n)]
        assert _chain_values(ref, n) == [s * expected for s in signs]
        assert all(m == 0 for m in list(ref["marg_a"].values()) + list(ref["marg_b"].values()))
        assert all(v == 1 for v in ref["det_a"].values())

    def test_n3_beta(self):
        stats = evaluate(symmetric_model(3, 1.0))
        assert all(abs(e) == pytest.approx(2 / 3, abs=1e-12) for e in stats.measured_correlations())
        assert stats.beta == pytest.approx(4.0, abs=1e-12)

    def test_invalid(self):
        with pytest.raises(ParameterError):
            lambda0_states(1)


class TestLambda1:
    def test_transcription(self):
        s = lambda1_states(2)[2]  # threshold 2, m = +1
        assert s.a_values == (1, -1) and s.b_values == (0, -1)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_extreme_correlations_and_coefficients(self, n):
        states = lambda1_states(n)
        assert len(states) == 4 * n
        assert all(list(s.a_values + s.b_values).count(0) == 1 for s in states)
        ref = brute_force_stats(n, uniform(states))
        assert _chain_values(ref, n) == [s for _, _, s in chain_pairs(n)]
        assert set(ref["det_a"].values()) | set(ref["det_b"].values()) == {1 - Fraction(1, 2 * n)}
        assert set(ref["coinc"].values()) == {1 - Fraction(1, n)}
        assert all(m == 0 for m in list(ref["marg_a"].values()) + list(ref["marg_b"].values()))


class TestLambda10And01:
    def test_transcriptions(self):
        s10 = lambda10_states(2)[0]
        assert s10.a_values == (0, -1) and s10.b_values == (-1, -1)
        s01 = lambda01_states(2)[0]
        assert s01.a_values == (1, -1) and s01.b_values == (0, -1)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_lambda10(self, n):
        states = lambda10_states(n)
        assert len(states) == 2 * n
        assert all(s.a_values.count(0) == 1 and 0 not in s.b_values for s in states)
        ref = brute_force_stats(n, uniform(states))
        assert _chain_values(ref, n) == [s for _, _, s in chain_pairs(n)]
        assert set(ref["det_a"].values()) == {1 - Fraction(1, n)}
        assert set(ref["det_b"].values()) == {1}
        assert set(ref["coinc"].values()) == {1 - Fraction(1, n)}
        assert all(m == 0 for m in list(ref["marg_a"].values()) + list(ref["marg_b"].values()))

    @pytest.mark.parametrize("n", range(2, 9))
    def test_lambda01_mirror(self, n):
        states = lambda01_states(n)
        assert all(s.b_values.count(0) == 1 and 0 not in s.a_values for s in states)
        ref = brute_force_stats(n, uniform(states))
        assert _chain_values(ref, n) == [s for _, _, s in chain_pairs(n)]
        assert set(ref["det_a"].values()) == {1}
        assert set(ref["det_b"].values()) == {1 - Fraction(1, n)}
        assert set(ref["coinc"].values()) == {1 - Fraction(1, n)}
        assert all(m == 0 for m in list(ref["marg_a"].values()) + list(ref["marg_b"].values()))


class TestSymmetricModel:
    def test_weights_eta_09(self):
        m = symmetric_model(2, 0.9)
        assert m.components["Lambda0"] == pytest.approx(0.63, abs=1e-12)
        assert m.components["Lambda1"] == pytest.approx(0.36, abs=1e-12)
        assert m.components["AllZero"] == pytest.approx(0.01, abs=1e-12)
        stats = evaluate(m)
        assert stats.eta_a == pytest.approx(0.9, abs=1e-12)
        assert stats.eta_b == pytest.approx(0.9, abs=1e-12)
        assert stats.beta == pytest.approx(2.44444444, abs=1e-8)

    def test_perfect_detectors(self):
        m = symmetric_model(2, 1.0)
        assert set(m.components) == {"Lambda0"}
        assert evaluate(m).beta == pytest.approx(2.0, abs=1e-12)

    def test_critical_n3(self):
        stats = evaluate(symmetric_model(3, ETA_CRIT_3))
        for e in stats.measured_correlations():
            assert abs(e) == pytest.approx(0.86602540, abs=1e-8)
        assert stats.beta == pytest.approx(5.19615242, abs=1e-8)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_beta_grid(self, n):
        lo = 2 * (n - 1) / (2 * n - 1)
        for eta in np.linspace(lo, 1.0, 15):
            assert evaluate(symmetric_model(n, eta)).beta == pytest.approx((2 * n - 2) * (2 / eta - 1), abs=1e-10)

    def test_rejects_low_eta(self):
        with pytest.raises(RangeError, match=r"\[2/3, 1\]"):
            symmetric_model(2, 0.5)

    def test_beta_target_dilution(self):
        base = evaluate(symmetric_model(3, 0.9))
        for target in (0.0, 1.0, 3.0, 4.5, base.beta):
            stats = evaluate(symmetric_model(3, 0.9, beta_target=target))
            assert stats.beta == pytest.approx(target, abs=1e-10)
            assert stats.a_detection_probs == pytest.approx(base.a_detection_probs, abs=1e-12)
            assert stats.pair_coincidence_probs == pytest.approx(base.pair_coincidence_probs, abs=1e-12)
            assert all(abs(m) < 1e-12 for m in stats.a_marginals.values())

    def test_beta_target_too_high(self):
        with pytest.raises(RangeError):
            symmetric_model(2, 0.9, beta_target=2.5)


class TestAsymmetricModel:
    def test_example_weights(self):
        m = asymmetric_model(2, 0.75, 1.0)
        assert m.components == pytest.approx({"Lambda0": 0.5, "Lambda10": 0.5})
        assert m.undetected_weight == 0
        assert evaluate(m).beta == pytest.approx(2.66666667, abs=1e-8)

    def test_symmetric_specialization(self):
        a, s = evaluate(asymmetric_model(2, 0.9, 0.9)), evaluate(symmetric_model(2, 0.9))
        assert a.beta == pytest.approx(s.beta, abs=1e-12)
        assert a.eta_a == pytest.approx(s.eta_a, abs=1e-12)
        assert a.eta_b == pytest.approx(s.eta_b, abs=1e-12)
        assert a.a_marginals == pytest.approx(s.a_marginals, abs=1e-12)

    def test_critical_one_sided(self):
        assert evaluate(asymmetric_model(3, 0.76980036, 1.0)).beta == pytest.approx(5.19615242, abs=1e-8)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_beta_and_independence_grid(self, n):
        checked = 0
        for ea in np.linspace(0.6, 1.0, 9):
            for eb in np.linspace(0.6, 1.0, 9):
                if (2 * n - 1) * ea * eb < (n - 1) * (ea + eb):
                    continue
                stats = evaluate(asymmetric_model(n, ea, eb))
                assert stats.beta == pytest.approx((2 * n - 2) * (1 / ea + 1 / eb - 1), abs=1e-10)
                assert stats.beta == pytest.approx(beta_max_lhv(n, ea, eb), abs=1e-10)
                for c in stats.pair_coincidence_probs.values():
                    assert c == pytest.approx(ea * eb, abs=1e-12)
                report = check_qm_constraints(stats, n, 1.0, 1e-9)
                assert report.marginals_ok and report.uniformity_ok and report.independence_ok
                checked += 1
        assert checked > 0

    def test_rejects_outside_region(self):
        with pytest.raises(RangeError):
            asymmetric_model(2, 0.6, 0.6)
        with pytest.raises(ParameterError):
            asymmetric_model(2, 0.0, 1.0)
        with pytest.raises(ParameterError):
            asymmetric_model(2, 1.1, 1.0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_correlation_check_only_at_critical(self, n):
        crit = evaluate(asymmetric_model(n, eta_a_crit_asymmetric(n, 1.0), 1.0))
        assert check_qm_constraints(crit, n, 1.0, 1e-9).passed
        off = evaluate(asymmetric_model(n, min(1.0, eta_a_crit_asymmetric(n, 1.0) + 0.02), 1.0))
        assert not check_qm_constraints(off, n, 1.0, 1e-9).correlations_ok

    def test_beta_target_full_range(self):
        n, ea, eb = 3, 0.85, 0.95
        base = evaluate(asymmetric_model(n, ea, eb))
        for target in (0.0, 2.0, base.beta - 0.5):
            stats = evaluate(asymmetric_model(n, ea, eb, beta_target=target))
            assert stats.beta == pytest.approx(target, abs=1e-10)
            assert stats.eta_a == pytest.approx(ea, abs=1e-12)
            assert stats.eta_b == pytest.approx(eb, abs=1e-12)

    def test_quantum_match_via_target(self):
        n = 3
        target = 2 * n * math.cos(math.pi / (2 * n)) * 0.95
        stats = evaluate(asymmetric_model(n, 0.7, 1.0, beta_target=target))
        assert check_qm_constraints(stats, n, 0.95, 1e-9).passed


class TestVisibility:
    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("v", [0.8, 0.9])
    def test_matches_noisy_singlet_at_its_critical_efficiency(self, n, v):
        beta_q = quantum_beta(n, v)
        eta = eta_bound_from_beta(n, beta_q)
        stats = evaluate(symmetric_model(n, eta))
        assert stats.beta == pytest.approx(beta_q, abs=1e-10)
        assert check_qm_constraints(stats, n, v, 1e-8).passed

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("v", [0.8, 0.9])
    def test_perfect_detectors_cannot_reach_noisy_singlet(self, n, v):
        # Above the critical visibility the target exceeds the local bound 2N-2.
        with pytest.raises(RangeError):
            symmetric_model(n, 1.0, beta_target=quantum_beta(n, v))
