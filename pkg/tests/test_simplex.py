import numpy as np
import pytest
from scipy.optimize import linprog

from chainbell.errors import SolverError
from chainbell.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog_max


def _random_bounded_lp(rng, m_eq, m_ub, n):
    x0 = rng.uniform(0, 1, n)
    A_eq = rng.integers(-2, 3, (m_eq, n)).astype(float)
    b_eq = A_eq @ x0
    A_ub = np.vstack([rng.uniform(-1, 1, (m_ub, n)), np.ones((1, n))])
    b_ub = np.concatenate([A_ub[:-1] @ x0 + rng.uniform(0, 1, m_ub), [n]])
    c = rng.normal(size=n)
    return c, A_eq, b_eq, A_ub, b_ub


class TestAgainstHighs:
    @pytest.mark.parametrize("rule", ["bland", "dantzig"])
    def test_random_problems(self, rng, rule):
        for _ in range(40):
            c, A_eq, b_eq, A_ub, b_ub = _random_bounded_lp(rng, rng.integers(0, 4), rng.integers(1, 5), rng.integers(3, 12))
            ours = linprog_max(c, A_eq, b_eq, A_ub, b_ub, rule=rule)
            ref = linprog(-c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
            assert ref.status == 0
            assert ours.status == OPTIMAL
            assert ours.objective == pytest.approx(-ref.fun, abs=1e-7)
            assert np.all(ours.x >= 0)
            np.testing.assert_allclose(A_eq @ ours.x, b_eq, atol=1e-8)
            assert np.all(A_ub @ ours.x <= b_ub + 1e-8)

    def test_redundant_equalities(self):
        # Third row is the sum of the first two.
        A_eq = np.array([[1, 1, 0, 0], [0, 0, 1, 1], [1, 1, 1, 1]], float)
        b_eq = np.array([0.4, 0.6, 1.0])
        res = linprog_max([1, 2, 3, 0], A_eq, b_eq)
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(0.8 + 1.8)


class TestStatuses:
    def test_infeasible(self):
        res = linprog_max([1, 1], A_eq=[[1, 1]], b_eq=[1], A_ub=[[1, 1]], b_ub=[0.5])
        assert res.status == INFEASIBLE and res.x is None

    def test_unbounded(self):
        res = linprog_max([1, 0], A_ub=[[-1, 1]], b_ub=[1])
        assert res.status == UNBOUNDED

    def test_negative_rhs(self):
        # x0 - x1 = -1 forces x1 = x0 + 1.
        res = linprog_max([-1, -1], A_eq=[[1, -1]], b_eq=[-1])
        assert res.status == OPTIMAL
        np.testing.assert_allclose(res.x, [0, 1], atol=1e-12)

    def test_iteration_cap(self):
        c, A_eq, b_eq, A_ub, b_ub = _random_bounded_lp(np.random.default_rng(1), 2, 4, 10)
        with pytest.raises(SolverError):
            linprog_max(c, A_eq, b_eq, A_ub, b_ub, max_iter=1)

    def test_degenerate_cycling_example(self):
        # Beale's example cycles under the textbook largest-coefficient rule; Bland must terminate.
        c = np.array([0.75, -150, 0.02, -6])
        A_ub = np.array([[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]])
        b_ub = np.array([0, 0, 1])
        res = linprog_max(c, A_ub=A_ub, b_ub=b_ub)
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(0.05, abs=1e-9)
