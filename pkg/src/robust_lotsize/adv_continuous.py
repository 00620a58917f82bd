"""Worst-case scenarios under the continuous budget (a cap on the total absolute deviation)."""
from __future__ import annotations

import heapq
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .adv_discrete import AdvResult, _check_plan
from .core import (
    TOL,
    Continuous,
    CostParams,
    FeasibleSet,
    Instance,
    ProductionPlan,
    Scenario,
    branch_coefficients,
    is_non_overlapping,
    period_costs,
    plan_cost,
)
from .errors import BudgetTypeError, DomainError, NumericalError, PreconditionError
from .linprog import INF, solve_dense

log = logging.getLogger(__name__)


def _require_continuous(instance):
    if not isinstance(instance.budget, Continuous):
        raise BudgetTypeError(f"{type(instance.budget).__name__} budget; a continuous budget is required")
    return float(instance.budget.gamma)


@dataclass(frozen=True)
class DeviationCost:
    """Extra cost of period ``t`` when its demand deviates by ``delta`` in the worse direction.

    Piecewise linear and convex on ``[0, delta_t]``; ``breakpoints`` includes
    both ends and ``slopes[i]`` applies between ``breakpoints[i]`` and
    ``breakpoints[i+1]``.
    """

    t: int
    breakpoints: tuple
    slopes: tuple
    low_start: float  # inventory branch at zero deviation
    low_slope: float
    high_start: float  # backorder branch at zero deviation
    high_slope: float

    def __call__(self, delta):
        base = max(self.low_start, self.high_start)
        return max(self.low_start + self.low_slope * delta, self.high_start + self.high_slope * delta) - base


def deviation_cost_function(plan, instance, t):
    """Build the :class:`DeviationCost` of period ``t`` (1-based)."""
    if not 1 <= t <= instance.T:
        raise DomainError(f"period {t} outside 1..{instance.T}")
    X = _check_plan(plan, instance)
    iX, iD, bX, bD = branch_coefficients(instance.T, instance.costs)
    k = t - 1
    lo0 = iX[k] * X[k] + iD[k] * instance.d_hat[k]
    hi0 = bX[k] * X[k] + bD[k] * instance.d_hat[k]
    lo_s, hi_s = -iD[k], bD[k]
    cap = float(instance.delta[k])
    pts = [0.0]
    if lo_s != hi_s:
        cross = (hi0 - lo0) / (lo_s - hi_s)
        if 0.0 < cross < cap:
            pts.append(float(cross))
    pts.append(cap)
    f = DeviationCost(t, (), (), float(lo0), float(lo_s), float(hi0), float(hi_s))
    slopes = tuple(
        (f(b) - f(a)) / (b - a) if b > a else 0.0 for a, b in zip(pts[:-1], pts[1:])
    )
    return DeviationCost(t, tuple(pts), slopes, f.low_start, f.low_slope, f.high_start, f.high_slope)


def deviation_cost(plan, instance, t, delta):
    """Value of the deviation cost of period ``t`` (1-based) at ``delta``."""
    if not 1 <= t <= instance.T:
        raise DomainError(f"period {t} outside 1..{instance.T}")
    if not -TOL <= delta <= instance.delta[t - 1] + TOL:
        raise DomainError(f"deviation {delta} outside [0, {instance.delta[t - 1]}]")
    return deviation_cost_function(plan, instance, t)(delta)


def _orient(X, instance, dev):
    """Scenario from unsigned deviations: go down only when the inventory branch strictly wins."""
    iX, iD, bX, bD = branch_coefficients(instance.T, instance.costs)
    lo = instance.d_hat - dev
    hi = instance.d_hat + dev
    down = iX * X + iD * lo > bX * X + bD * hi
    return np.where(down, lo, hi)


def adv_nonoverlap_dp(plan, instance):
    """Longest path over the (period, budget used) DAG for integral non-overlapping data.

    ``info['by_budget'][g]`` is the worst-case value for every integral
    budget ``g`` up to the instance budget, read off the same DP table.
    """
    gamma = _require_continuous(instance)
    if not is_non_overlapping(instance):
        raise PreconditionError("demand intervals overlap; use adv_general_bb")
    if not instance.is_integral():
        raise PreconditionError("budget and deviations must be integral; rescale or use adv_general_bb")
    X = _check_plan(plan, instance)
    G = int(round(gamma))
    caps = np.minimum(np.round(instance.delta).astype(np.int64), G)
    kmax = int(caps.max()) if instance.T else 0
    ks = np.arange(kmax + 1)
    iX, iD, bX, bD = branch_coefficients(instance.T, instance.costs)
    lo = iX[:, None] * X[:, None] + iD[:, None] * (instance.d_hat[:, None] - ks)
    hi = bX[:, None] * X[:, None] + bD[:, None] * (instance.d_hat[:, None] + ks)
    arc_cost = np.ascontiguousarray(np.maximum(lo, hi))
    best, choice = kernels.dag_dp(arc_cost, caps, G)

    final = best[instance.T]
    used = int(np.argmax(final))
    dev = np.zeros(instance.T)
    d = used
    for t in range(instance.T - 1, -1, -1):
        k = int(choice[t, d])
        dev[t] = k
        d -= k
    scenario = Scenario(_orient(X, instance, dev))
    return AdvResult(
        scenario, float(final[used]), "dag-dp",
        {"deviations": dev.tolist(), "budget_used": used, "by_budget": np.maximum.accumulate(final).tolist()},
    )


def subset_sum_instance(a, b):
    """Adversarial instance whose worst-case value is ``b`` iff some subset of ``a`` sums to ``b``."""
    a = list(a)
    if not a:
        raise DomainError("a must be nonempty")
    if any(int(v) != v or v <= 0 for v in a):
        raise DomainError("a must contain positive integers")
    if int(b) != b or b < 0 or b > sum(a):
        raise DomainError(f"b must be an integer in [0, {sum(a)}]")
    n, A = len(a), float(sum(a))
    t = np.arange(1, n + 1)
    inst = Instance(
        n, CostParams(c_p=0.0, c_i=0.0, c_b=2.0, b_p=0.0), FeasibleSet.box(n),
        t * A, np.array(a, dtype=float), Continuous(float(b)),
    )
    return inst, ProductionPlan.from_cumulative(t * A + np.array(a, dtype=float) / 2)


# ---------------------------------------------------------------- general case


@dataclass(frozen=True, eq=False)
class MipModel:
    """Big-M model of the general continuous adversary for a fixed plan.

    Column layout is ``[dev (T), abs_dev (T), cost (T), pick (T)]`` with signed ``dev``;
    ``pick_t = 0`` keeps the inventory branch of period ``t`` and ``pick_t = 1``
    the backorder branch.
    """

    T: int
    c: np.ndarray
    A: np.ndarray
    row_lo: np.ndarray
    row_hi: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    M: np.ndarray

    @classmethod
    def build(cls, plan, instance):
        gamma = _require_continuous(instance)
        X = _check_plan(plan, instance)
        T, k = instance.T, instance.costs
        iX, iD, bX, bD = branch_coefficients(T, k)
        M = np.full(T, (k.c_i + k.c_b + k.c_p + k.b_p) * (instance.d_hat[-1] + instance.delta.max() + X[-1] + 1))
        fI0 = iX * X + iD * instance.d_hat
        fB0 = bX * X + bD * instance.d_hat
        d, b, p, g = (np.arange(T) + s * T for s in range(4))
        rows, hi = [], []

        def row():
            r = np.zeros(4 * T)
            rows.append(r)
            return r

        for t in range(T):
            # cost_t <= f_I(X_t, d_hat_t + dev_t) + M_t pick_t
            r = row()
            r[p[t]], r[d[t]], r[g[t]] = 1.0, -iD[t], -M[t]
            hi.append(fI0[t])
            # cost_t <= f_B(X_t, d_hat_t + dev_t) + M_t (1 - pick_t)
            r = row()
            r[p[t]], r[d[t]], r[g[t]] = 1.0, -bD[t], M[t]
            hi.append(fB0[t] + M[t])
        r = row()
        r[b] = 1.0
        hi.append(gamma)
        for t in range(T):
            r = row()
            r[d[t]], r[b[t]] = 1.0, -1.0
            hi.append(0.0)
            r = row()
            r[d[t]], r[b[t]] = -1.0, -1.0
            hi.append(0.0)
        for t in range(T - 1):
            r = row()
            r[d[t]], r[d[t + 1]] = 1.0, -1.0
            hi.append(instance.d_hat[t + 1] - instance.d_hat[t])
        A = np.array(rows)
        c = np.zeros(4 * T)
        c[p] = 1.0
        lb = np.concatenate([-instance.delta, np.zeros(T), np.full(T, -INF), np.zeros(T)])
        ub = np.concatenate([instance.delta, np.full(T, INF), np.full(T, INF), np.ones(T)])
        return cls(T, c, A, np.full(len(hi), -INF), np.array(hi), lb, ub, M)

    def relax(self, lb=None, ub=None):
        """Solve the LP relaxation with optionally tightened column bounds."""
        return solve_dense(
            self.c, self.A, self.row_lo, self.row_hi,
            self.lb if lb is None else lb, self.ub if ub is None else ub, "max",
        )

    def deltas(self, x):
        return x[: self.T]

    def gammas(self, x):
        return x[3 * self.T:]


def adv_general_bb(plan, instance, integral_deltas=False, max_nodes=100_000):
    """Exact general continuous adversary by best-first branch and bound on the big-M model.

    Branches on the fractional ``pick_t`` closest to 0.5.  Every LP point is
    also turned into a feasible scenario and priced exactly, which seeds
    the incumbent.  ``integral_deltas`` additionally forces integral
    deviations (branching on the most fractional ``dev_t``).
    """
    _require_continuous(instance)
    X = _check_plan(plan, instance)
    mip = MipModel.build(plan, instance)
    T = instance.T
    inc_val, inc_D = -INF, None
    counter = itertools.count()
    heap = []
    lps = 0

    def evaluate(lb, ub):
        nonlocal inc_val, inc_D, lps
        lps += 1
        sol = mip.relax(lb, ub)
        if sol.status == "infeasible":
            return
        if sol.status != "optimal":
            raise NumericalError(f"relaxation is {sol.status}")
        dlt = mip.deltas(sol.x)
        if not integral_deltas or np.all(np.abs(dlt - np.round(dlt)) <= 1e-9):
            D = instance.d_hat + (np.round(dlt) if integral_deltas else dlt)
            val = float(np.sum(period_costs(X, D, instance.costs)))
            if val > inc_val + 1e-12:
                inc_val, inc_D = val, D
        heapq.heappush(heap, (-sol.objective, next(counter), lb, ub, sol.x))

    evaluate(mip.lb.copy(), mip.ub.copy())
    nodes = 0
    while heap:
        neg_bound, _, lb, ub, x = heapq.heappop(heap)
        if -neg_bound <= inc_val + 1e-9 * (1 + abs(inc_val)):
            break  # best-first: nothing left can improve
        nodes += 1
        if nodes > max_nodes:
            raise NumericalError("branch-and-bound node limit", best_bound=-neg_bound)
        gam = mip.gammas(x)
        frac = np.abs(gam - np.round(gam))
        col = None
        if frac.max() > 1e-9:
            t = int(np.argmin(np.abs(gam - 0.5) + np.where(frac > 1e-9, 0.0, INF)))
            col = 3 * T + t
            splits = [(0.0, 0.0), (1.0, 1.0)]
        elif integral_deltas:
            dlt = mip.deltas(x)
            dfrac = np.abs(dlt - np.round(dlt))
            if dfrac.max() > 1e-9:
                t = int(np.argmax(dfrac))
                col = t
                splits = [(lb[t], math.floor(dlt[t])), (math.ceil(dlt[t]), ub[t])]
        if col is None:
            continue  # the relaxation is already a model solution; it was priced in evaluate
        for lo_v, hi_v in splits:
            clb, cub = lb.copy(), ub.copy()
            clb[col], cub[col] = lo_v, hi_v
            evaluate(clb, cub)

    if inc_D is None:
        raise NumericalError("branch and bound found no scenario")
    scenario = Scenario(inc_D)
    log.debug("branch and bound: %d nodes, %d LPs, value %g", nodes, lps, inc_val)
    return AdvResult(scenario, plan_cost(plan, scenario, instance), "branch-and-bound", {"nodes": nodes, "lps": lps})
