import numpy as np
import pytest

from robust_lotsize import (
    BudgetTypeError,
    Continuous,
    Discrete,
    FeasibleSet,
    InfeasibleError,
    Instance,
    PreconditionError,
    adv_general_bb,
    adv_nonoverlap_dp,
    decompose,
    master_lp,
    minmax_continuous_lp,
    plan_cost,
)
from robust_lotsize.oracle import det_lp_optimum, finite_minmax_lp, random_instance, robust_lp_oracle, vertex_scenarios

from conftest import fractional_vertex_instance, single_period


def _capped(rng, T, **kw):
    inst = random_instance(rng, T, budget="continuous", **kw)
    u = float(inst.upper[-1]) + 5
    return Instance(T, inst.costs, FeasibleSet.box(T, u=[u] * T), inst.d_hat, inst.delta, inst.budget)


class TestDagLP:
    def test_single_period(self):
        res = minmax_continuous_lp(single_period(Continuous(2)))
        assert res.value == pytest.approx(2) and res.plan.x == pytest.approx([5])

    def test_zero_budget(self, rng):
        for _ in range(10):
            inst = _capped(rng, int(rng.integers(1, 6)), gamma=0)
            assert minmax_continuous_lp(inst).value == pytest.approx(det_lp_optimum(inst).value, abs=1e-6)

    def test_saddle(self, rng):
        for _ in range(20):
            inst = _capped(rng, int(rng.integers(1, 6)))
            res = minmax_continuous_lp(inst)
            assert adv_nonoverlap_dp(res.plan, inst).value == pytest.approx(res.value, abs=1e-5)

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            minmax_continuous_lp(fractional_vertex_instance()[0])
        with pytest.raises(PreconditionError):
            minmax_continuous_lp(Instance.build([2, 6], [1, 1], Continuous(0.5)))
        with pytest.raises(BudgetTypeError):
            minmax_continuous_lp(Instance.build([2, 6], [1, 1], Discrete(1)))


class TestDecomposition:
    def test_zero_budget_one_iteration(self, rng):
        inst = _capped(rng, 4, overlap=True, gamma=0)
        res, state = decompose(inst)
        assert state.iterations == 1 and state.converged
        assert state.LB == pytest.approx(state.UB, abs=1e-6)
        assert res.value == pytest.approx(det_lp_optimum(inst).value, abs=1e-6)

    def test_fractional_vertex_instance(self):
        inst, _ = fractional_vertex_instance(u=[10, 10, 10])
        res, state = decompose(inst)
        assert state.converged and state.gap <= 1e-6
        assert adv_general_bb(res.plan, inst).value == pytest.approx(state.UB, abs=1e-9)
        assert res.value == pytest.approx(robust_lp_oracle(inst)[1], abs=1e-5)

    def test_matches_dag_lp(self, rng):
        for _ in range(20):
            inst = _capped(rng, int(rng.integers(1, 4)))
            res, state = decompose(inst)
            assert state.converged
            assert res.value == pytest.approx(minmax_continuous_lp(inst).value, abs=1e-5)

    def test_bounds_and_pool(self, rng):
        for _ in range(20):
            inst = _capped(rng, int(rng.integers(1, 5)), overlap=True, integral=bool(rng.integers(2)))
            res, state = decompose(inst)
            lbs = [h[0] for h in state.history]
            ubs = [h[1] for h in state.history]
            assert np.all(np.diff(lbs) >= 0) and np.all(np.diff(ubs) <= 0)
            assert all(lb <= ub + 1e-6 for lb, ub in zip(lbs, ubs))
            assert state.converged and state.gap <= 1e-6
            for D in state.pool:
                assert plan_cost(res.plan, D, inst) <= state.UB + 1e-7
            for a, b in zip(state.pool, state.pool[1:]):
                assert np.max(np.abs(a - b)) > 1e-9

    def test_full_vertex_pool(self, rng):
        for _ in range(10):
            inst = _capped(rng, int(rng.integers(1, 4)), overlap=True, integral=False)
            res, _ = decompose(inst)
            _, alpha = master_lp(inst, list(vertex_scenarios(inst)))
            assert res.value == pytest.approx(alpha, abs=1e-5)
            assert alpha == pytest.approx(finite_minmax_lp(inst, vertex_scenarios(inst))[1], abs=1e-6)

    def test_iteration_cap(self):
        inst, _ = fractional_vertex_instance(u=[10, 10, 10])
        res, state = decompose(inst, max_iter=1)
        assert state.iterations == 1 and not state.converged and state.reason == "max_iter"
        assert res.value == state.UB and res.info["converged"] is False

    def test_bad_arguments(self):
        inst, _ = fractional_vertex_instance()
        with pytest.raises(ValueError):
            decompose(inst, epsilon=0)
        with pytest.raises(BudgetTypeError):
            decompose(Instance.build([2], [1], Discrete(1)))
        empty = Instance.build([2], [1], Continuous(1), c_i=1, feasible=FeasibleSet.box(1, u=[1], L=[2]))
        with pytest.raises(InfeasibleError):
            decompose(empty)
