import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_lotsize import (
    BudgetTypeError,
    Continuous,
    Discrete,
    DomainError,
    Instance,
    MipModel,
    PreconditionError,
    ProductionPlan,
    adv_general_bb,
    adv_nonoverlap_dp,
    deviation_cost,
    deviation_cost_function,
    plan_cost,
    subset_sum_instance,
)
from robust_lotsize.core import branch_values
from robust_lotsize.oracle import brute_adv_continuous, random_instance, random_plan

from conftest import fractional_vertex_instance


class TestDeviationCost:
    def test_zero_deviation(self, rng):
        inst = random_instance(rng, 4, budget="continuous")
        plan = random_plan(rng, inst)
        for t in range(1, 5):
            assert deviation_cost(plan, inst, t, 0.0) == pytest.approx(0.0)

    def test_subset_sum_shape(self):
        inst, plan = subset_sum_instance([2, 3, 5], 4)
        for t, a in enumerate([2, 3, 5], start=1):
            for d in np.linspace(0, a, 11):
                assert deviation_cost(plan, inst, t, d) == pytest.approx(max(0.0, 2 * d - a))
            f = deviation_cost_function(plan, inst, t)
            assert f.breakpoints == pytest.approx((0, a / 2, a)) and f.slopes == pytest.approx((0, 2))

    def test_balanced_plan_is_linear(self):
        inst = Instance.build([4, 9], [3, 4], Continuous(3), c_i=1, c_b=1)
        plan = ProductionPlan.from_cumulative([4, 9])
        for d in (0.0, 0.5, 2.0, 3.0):
            assert deviation_cost(plan, inst, 1, d) == pytest.approx(d)

    def test_domain_errors(self):
        inst, plan = subset_sum_instance([2, 3], 3)
        with pytest.raises(DomainError):
            deviation_cost(plan, inst, 1, 2.5)
        with pytest.raises(DomainError):
            deviation_cost(plan, inst, 1, -1)
        with pytest.raises(DomainError):
            deviation_cost(plan, inst, 3, 0)

    @settings(max_examples=60)
    @given(st.integers(0, 2**32 - 1))
    def test_convex_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        inst = random_instance(rng, 3, budget="continuous", overlap=True, integral=False)
        plan = random_plan(rng, inst)
        for t in (1, 2, 3):
            f = deviation_cost_function(plan, inst, t)
            grid = np.linspace(0, inst.delta[t - 1], 9)
            vals = np.array([f(d) for d in grid])
            assert np.all(vals >= -1e-9)
            assert np.all(np.diff(vals, 2) >= -1e-9)
            assert np.all(np.diff(f.slopes) >= -1e-12)


class TestNonOverlapDP:
    def test_zero_budget(self, rng):
        inst = random_instance(rng, 4, budget="continuous", gamma=0)
        plan = random_plan(rng, inst)
        res = adv_nonoverlap_dp(plan, inst)
        assert np.array_equal(res.D, inst.d_hat) and res.value == pytest.approx(plan_cost(plan, inst.d_hat, inst))

    def test_single_unit(self):
        inst = Instance.build([2, 4], [1, 1], Continuous(1), c_i=1, c_b=1)
        assert adv_nonoverlap_dp(ProductionPlan.from_cumulative([2, 4]), inst).value == pytest.approx(1)

    def test_preconditions(self):
        inst = Instance.build([2, 3], [1, 1], Continuous(1), c_i=1, c_b=1)
        with pytest.raises(PreconditionError):
            adv_nonoverlap_dp([1, 1], inst)
        frac = Instance.build([2, 6], [1, 1], Continuous(1.5), c_i=1, c_b=1)
        with pytest.raises(PreconditionError):
            adv_nonoverlap_dp([1, 1], frac)
        with pytest.raises(BudgetTypeError):
            adv_nonoverlap_dp([1, 1], Instance.build([2, 6], [1, 1], Discrete(1)))

    def test_matches_integral_enumeration(self, rng):
        for _ in range(60):
            T = int(rng.integers(1, 7))
            inst = random_instance(rng, T, budget="continuous", gamma=int(rng.integers(0, 9)))
            plan = random_plan(rng, inst, integral=True)
            res = adv_nonoverlap_dp(plan, inst)
            ref = brute_adv_continuous(plan, inst, mode="integral")
            assert res.value == pytest.approx(ref.value, abs=1e-6)
            assert res.value == pytest.approx(plan_cost(plan, res.scenario, inst), abs=1e-9)
            assert res.scenario.violations(inst) == []
            by = res.info["by_budget"]
            assert np.all(np.diff(by) >= 0) and by[-1] == pytest.approx(res.value)


class TestSubsetSum:
    def test_generated_data(self):
        inst, plan = subset_sum_instance([2, 3], 3)
        assert list(inst.d_hat) == [5, 10] and list(inst.delta) == [2, 3]
        assert list(plan.X) == [6, 11.5] and inst.budget == Continuous(3.0)
        c = inst.costs
        assert (c.c_p, c.c_i, c.c_b, c.b_p) == (0, 0, 2, 0)

    def test_yes_instance(self):
        inst, plan = subset_sum_instance([2, 3], 3)
        res = adv_nonoverlap_dp(plan, inst)
        assert res.value == pytest.approx(3) and res.info["deviations"] == [0, 3]

    def test_single_item(self):
        assert adv_nonoverlap_dp(*reversed(subset_sum_instance([1], 1))).value == pytest.approx(1)

    def test_no_instance(self):
        inst, plan = subset_sum_instance([2, 4], 3)
        assert adv_nonoverlap_dp(plan, inst).value < 3 - 1e-9

    def test_invalid_arguments(self):
        for a, b in (([], 0), ([0, 2], 1), ([1.5], 1), ([2, 3], 6), ([2], -1)):
            with pytest.raises(DomainError):
                subset_sum_instance(a, b)

    def test_branch_and_bound_agrees(self):
        for a, b in (([2, 3], 3), ([2, 4], 3), ([1, 2, 4], 5), ([3, 5, 7], 11)):
            inst, plan = subset_sum_instance(a, b)
            assert adv_general_bb(plan, inst).value == pytest.approx(adv_nonoverlap_dp(plan, inst).value, abs=1e-6)


class TestBranchAndBound:
    def test_fractional_vertex_example(self):
        inst, plan = fractional_vertex_instance()
        res = adv_general_bb(plan, inst)
        # the plan is worth 22 here, above the value 21 of the printed relaxation
        assert res.value == pytest.approx(22, abs=1e-9)
        assert res.value == pytest.approx(brute_adv_continuous(plan, inst).value, abs=1e-9)
        assert res.scenario.violations(inst) == []

    def test_fractional_vertex_example_integral_hook(self):
        inst, plan = fractional_vertex_instance()
        res = adv_general_bb(plan, inst, integral_deltas=True)
        assert res.value == pytest.approx(brute_adv_continuous(plan, inst, mode="integral").value, abs=1e-9)
        assert np.allclose(res.D - inst.d_hat, np.round(res.D - inst.d_hat))

    def test_big_m_covers_branch_gap(self, rng):
        for _ in range(20):
            inst = random_instance(rng, 4, budget="continuous", overlap=True, integral=False)
            plan = random_plan(rng, inst)
            model = MipModel.build(plan, inst)
            D = rng.uniform(inst.lower, inst.upper)
            f_inv, f_back = branch_values(plan.X, D, inst.costs)
            gap = np.abs(f_inv - f_back)
            assert np.all(np.asarray(model.M) >= gap)

    def test_matches_nonoverlap_dp(self, rng):
        for _ in range(40):
            inst = random_instance(rng, int(rng.integers(1, 7)), budget="continuous")
            plan = random_plan(rng, inst, integral=True)
            assert adv_general_bb(plan, inst).value == pytest.approx(adv_nonoverlap_dp(plan, inst).value, abs=1e-6)

    def test_matches_pattern_oracle(self, rng):
        for _ in range(60):
            T = int(rng.integers(1, 7))
            inst = random_instance(rng, T, budget="continuous", overlap=True, integral=bool(rng.integers(2)))
            plan = random_plan(rng, inst)
            res = adv_general_bb(plan, inst)
            assert res.value == pytest.approx(brute_adv_continuous(plan, inst).value, abs=1e-6)
            assert res.value == pytest.approx(plan_cost(plan, res.scenario, inst), abs=1e-9)
            dev = np.abs(res.D - inst.d_hat)
            assert np.all(np.diff(res.D) >= -1e-7) and np.all(dev <= inst.delta + 1e-7)
            assert dev.sum() <= inst.budget.gamma + 1e-7

    def test_budget_monotone(self, rng):
        for _ in range(15):
            inst = random_instance(rng, 4, budget="continuous", overlap=True, integral=False)
            plan = random_plan(rng, inst)
            total = float(inst.delta.sum())
            values = [adv_general_bb(plan, inst.with_budget(Continuous(g))).value for g in np.linspace(0, total, 6)]
            assert np.all(np.diff(values) >= -1e-7)

    def test_requires_continuous_budget(self):
        with pytest.raises(BudgetTypeError):
            adv_general_bb([1], Instance.build([2], [1], Discrete(1)))


def test_integral_enumeration_is_exhaustive():
    inst, plan = fractional_vertex_instance()
    best = max(
        plan_cost(plan, inst.d_hat + np.array(d), inst)
        for d in itertools.product(range(-3, 4), range(-2, 3), range(-1, 2))
        if sum(map(abs, d)) <= 4 and np.all(np.diff(inst.d_hat + np.array(d)) >= 0)
    )
    assert brute_adv_continuous(plan, inst, mode="integral").value == pytest.approx(best)
