"""Brute-force and LP reference solvers for desk-scale verification.

Everything here is formulated independently of the production solvers: the
deterministic model keeps explicit inventory/backorder/sales variables, the
continuous adversary splits deviations into positive and negative parts, and
scenario enumeration never goes through the layered graphs.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .adv_discrete import AdvResult
from .core import (
    Continuous,
    Discrete,
    FeasibleSet,
    Instance,
    ProductionPlan,
    Scenario,
    TOL,
    _plan_X,
    _scenario_D,
    candidate_values,
    plan_cost,
    plan_costs,
)
from .errors import BudgetTypeError, DimensionError, InfeasibleError, NumericalError, SizeGuardError
from .linprog import INF, LinearProgram, solve_dense, solve_lp

MAX_T_DISCRETE = 8
MAX_T_INTEGRAL = 6
MAX_T_GENERAL = 10
MAX_T_MINMAX = 3
MAX_T_VERTICES = 4


def _guard(T, limit, what):
    if T > limit:
        raise SizeGuardError(f"{what} is limited to T <= {limit}, got T={T}")


def _check_plan(plan, instance):
    X = _plan_X(plan)
    if X.shape[0] != instance.T:
        raise DimensionError(f"plan has {X.shape[0]} periods, instance has {instance.T}")
    return X


# ---------------------------------------------------------------- deterministic


@dataclass
class DetSolution:
    plan: ProductionPlan
    value: float
    inventory: np.ndarray
    backorder: np.ndarray
    sales: np.ndarray


def det_lp_optimum(instance, scenario=None):
    """Deterministic lot sizing LP with explicit inventory, backorder and sales.

    ``scenario`` defaults to the nominal demands.  Raises InfeasibleError
    when the production set is empty.
    """
    T, k = instance.T, instance.costs
    D = instance.d_hat if scenario is None else _scenario_D(scenario)
    if D.shape[0] != T:
        raise DimensionError(f"scenario has {D.shape[0]} periods, instance has {T}")
    fs = instance.feasible
    lp = LinearProgram("min")
    x = [lp.add_variable(f"x{t}", max(0.0, fs.l[t]), fs.u[t], k.c_p) for t in range(T)]
    I = [lp.add_variable(f"I{t}", 0.0, INF, k.c_i) for t in range(T)]
    B = [lp.add_variable(f"B{t}", 0.0, INF, k.c_b) for t in range(T)]
    s = [lp.add_variable(f"s{t}", 0.0, INF, -k.b_p) for t in range(T)]
    for t in range(T):
        prod = {x[i]: 1.0 for i in range(t + 1)}
        # B_t - I_t = D_t - X_t
        lp.add_constraint({B[t]: 1.0, I[t]: -1.0, **prod}, "=", float(D[t]))
        lp.add_constraint({**{s[i]: 1.0 for i in range(t + 1)}, B[t]: 1.0}, "=", float(D[t]))
        lp.add_constraint(prod, ">=", float(fs.L[t]))
        if math.isfinite(fs.U[t]):
            lp.add_constraint(prod, "<=", float(fs.U[t]))
    sol = solve_lp(lp)
    if sol.status == "infeasible":
        raise InfeasibleError("no production plan satisfies the capacity limits")
    if sol.status != "optimal":
        raise NumericalError(f"deterministic LP is {sol.status}")
    v = sol.x
    return DetSolution(ProductionPlan(v[x]), sol.objective, v[I], v[B], v[s])


# ---------------------------------------------------------------- scenario enumeration


def _monotone_product(choices, d_hat, gamma, tol=TOL):
    """All nondecreasing vectors from ``choices[0] x ... x choices[T-1]`` with at most
    ``gamma`` coordinates away from ``d_hat``, built breadth-first."""
    rows = np.zeros((1, 0))
    used = np.zeros(1, dtype=np.int64)
    for t, vals in enumerate(choices):
        vals = np.asarray(vals, dtype=float)
        dev = (np.abs(vals - d_hat[t]) > tol).astype(np.int64)
        n, m = rows.shape[0], vals.shape[0]
        ri = np.repeat(np.arange(n), m)
        vi = np.tile(np.arange(m), n)
        ok = used[ri] + dev[vi] <= gamma
        if t:
            ok &= rows[ri, -1] <= vals[vi] + tol
        ri, vi = ri[ok], vi[ok]
        rows = np.column_stack([rows[ri], vals[vi]])
        used = used[ri] + dev[vi]
    return rows


def discrete_vertex_scenarios(instance):
    """Every monotone selection from the per-period candidate sets within the budget."""
    _guard(instance.T, MAX_T_DISCRETE, "discrete enumeration")
    gamma = int(instance.budget.gamma)
    choices = [candidate_values(instance, k) for k in range(1, instance.T + 1)]
    return _monotone_product(choices, instance.d_hat, gamma)


def _best_row(plan, rows, instance, method):
    vals = plan_costs(plan, rows, instance.costs)
    i = int(np.argmax(vals))
    scen = Scenario(rows[i])
    return AdvResult(scen, plan_cost(plan, scen, instance), method, {"enumerated": int(rows.shape[0])})


def brute_adv_discrete(plan, instance):
    """Exhaustive worst case under the discrete budget (T <= 8)."""
    if not isinstance(instance.budget, Discrete):
        raise BudgetTypeError("discrete budget required")
    _check_plan(plan, instance)
    return _best_row(plan, discrete_vertex_scenarios(instance), instance, "brute-discrete")


def _integral_deviation_rows(instance):
    T = instance.T
    gamma = int(round(instance.budget.gamma))
    delta = np.round(instance.delta).astype(int)
    rows = np.zeros((1, 0))
    spent = np.zeros(1, dtype=np.int64)
    for t in range(T):
        steps = np.arange(-delta[t], delta[t] + 1)
        vals = instance.d_hat[t] + steps
        n, m = rows.shape[0], steps.shape[0]
        ri = np.repeat(np.arange(n), m)
        vi = np.tile(np.arange(m), n)
        ok = spent[ri] + np.abs(steps[vi]) <= gamma
        if t:
            ok &= rows[ri, -1] <= vals[vi] + TOL
        ri, vi = ri[ok], vi[ok]
        rows = np.column_stack([rows[ri], vals[vi]])
        spent = spent[ri] + np.abs(steps[vi])
    return rows


def _leaf_lp(X, instance, pattern):
    """Maximise the chosen cost branch of every period over the continuous set.

    Variables ``p, n >= 0`` with ``D = d_hat + p - n``.  Returns ``(value, D)``
    or ``(-inf, None)`` for an infeasible leaf.
    """
    T, k = instance.T, instance.costs
    d_hat, delta = instance.d_hat, instance.delta
    # slope of each period's chosen branch in D and its constant part
    slope = np.where(pattern, k.c_b, -k.c_i)
    const = np.where(pattern, -k.c_b * X, k.c_i * X)
    slope[-1] += 0.0 if pattern[-1] else -k.b_p
    const[-1] += k.c_p * X[-1] - (k.b_p * X[-1] if pattern[-1] else 0.0)

    c = np.concatenate([slope, -slope])
    rows = [np.ones(2 * T)]
    lo, hi = [-INF], [float(instance.budget.gamma)]
    for t in range(T - 1):
        r = np.zeros(2 * T)
        r[t], r[T + t], r[t + 1], r[T + t + 1] = 1.0, -1.0, -1.0, 1.0
        rows.append(r)
        lo.append(-INF)
        hi.append(float(d_hat[t + 1] - d_hat[t]))
    sol = solve_dense(c, np.array(rows), lo, hi, np.zeros(2 * T), np.concatenate([delta, delta]), "max")
    if sol.status != "optimal":
        return -INF, None
    p, n = sol.x[:T], sol.x[T:]
    return sol.objective + float(const.sum() + slope @ d_hat), d_hat + p - n


def brute_adv_continuous(plan, instance, mode="general"):
    """Exhaustive worst case under the continuous budget.

    ``mode='integral'`` enumerates every integral signed deviation vector
    (T <= 6; exact for non-overlapping integral data).  ``mode='general'``
    solves one LP per inventory/backorder pattern (2^T LPs, T <= 10).
    """
    if not isinstance(instance.budget, Continuous):
        raise BudgetTypeError("continuous budget required")
    X = _check_plan(plan, instance)
    if mode == "integral":
        _guard(instance.T, MAX_T_INTEGRAL, "integral enumeration")
        if not instance.is_integral():
            raise ValueError("integral mode needs integral budget and deviations")
        return _best_row(plan, _integral_deviation_rows(instance), instance, "brute-integral")
    if mode != "general":
        raise ValueError(f"unknown mode {mode!r}")
    _guard(instance.T, MAX_T_GENERAL, "pattern enumeration")
    best_val, best_D = -INF, None
    for bits in itertools.product((False, True), repeat=instance.T):
        val, D = _leaf_lp(X, instance, np.array(bits))
        if D is not None:
            val = max(val, plan_cost(plan, D, instance))
            if val > best_val + 1e-12:
                best_val, best_D = val, D
    scen = Scenario(best_D)
    return AdvResult(scen, best_val, "brute-patterns", {"leaves": 2 ** instance.T})


def brute_adv(plan, instance):
    """The matching brute-force adversary for the instance's budget kind."""
    if isinstance(instance.budget, Discrete):
        return brute_adv_discrete(plan, instance)
    return brute_adv_continuous(plan, instance, "general")


def continuous_vertex_scenarios(instance, tol=1e-9):
    """Vertices of every sign-orthant piece of the continuous scenario set (T <= 4).

    Their convex hull is the whole scenario set, so a robust LP over these
    scenarios equals the minmax optimum.
    """
    T = instance.T
    _guard(T, MAX_T_VERTICES, "vertex enumeration")
    gamma = float(instance.budget.gamma)
    d_hat, delta = instance.d_hat, instance.delta
    found = []
    for signs in itertools.product((-1.0, 1.0), repeat=T):
        s = np.array(signs)
        # rows G @ dev <= h in deviation space
        G, h = [], []
        for t in range(T):
            e = np.zeros(T)
            e[t] = 1.0
            G += [-s[t] * e, e, -e]
            h += [0.0, delta[t], delta[t]]
        G.append(s)
        h.append(gamma)
        for t in range(T - 1):
            r = np.zeros(T)
            r[t], r[t + 1] = 1.0, -1.0
            G.append(r)
            h.append(d_hat[t + 1] - d_hat[t])
        G, h = np.array(G), np.array(h)
        for act in itertools.combinations(range(len(h)), T):
            sub = G[list(act)]
            if abs(np.linalg.det(sub)) < 1e-12:
                continue
            dev = np.linalg.solve(sub, h[list(act)])
            if np.all(G @ dev <= h + tol):
                found.append(d_hat + dev)
    pts = np.unique(np.round(np.array(found), 9), axis=0)
    return pts


def vertex_scenarios(instance):
    if isinstance(instance.budget, Discrete):
        return discrete_vertex_scenarios(instance)
    return continuous_vertex_scenarios(instance)


# ---------------------------------------------------------------- minmax oracles


def finite_minmax_lp(instance, scenarios):
    """Robust plan against a finite scenario list (epigraph LP).

    Returns ``(plan, value)``; raises InfeasibleError if the production
    set is empty.
    """
    T, k, fs = instance.T, instance.costs, instance.feasible
    scenarios = np.atleast_2d(np.asarray(scenarios, dtype=float))
    lp = LinearProgram("min")
    alpha = lp.add_variable("alpha", None, None, 1.0)
    x = [lp.add_variable(f"x{t}", max(0.0, fs.l[t]), fs.u[t]) for t in range(T)]
    for t in range(T):
        prod = {x[i]: 1.0 for i in range(t + 1)}
        lp.add_constraint(prod, ">=", float(fs.L[t]))
        if math.isfinite(fs.U[t]):
            lp.add_constraint(prod, "<=", float(fs.U[t]))
    for D in scenarios:
        pis = [lp.add_variable(None, None, None) for _ in range(T)]
        lp.add_constraint({alpha: 1.0, **{p: -1.0 for p in pis}}, ">=", 0.0)
        for t in range(T):
            last = t == T - 1
            # pi_t >= c_i (X_t - D_t) [+ c_p X_T - b_p D_t]
            row = {pis[t]: 1.0}
            for i in range(t + 1):
                row[x[i]] = -(k.c_i + (k.c_p if last else 0.0))
            lp.add_constraint(row, ">=", -k.c_i * D[t] - (k.b_p * D[t] if last else 0.0))
            # pi_t >= c_b (D_t - X_t) [+ (c_p - b_p) X_T]
            row = {pis[t]: 1.0}
            for i in range(t + 1):
                row[x[i]] = k.c_b - ((k.c_p - k.b_p) if last else 0.0)
            lp.add_constraint(row, ">=", k.c_b * D[t])
    sol = solve_lp(lp)
    if sol.status == "infeasible":
        raise InfeasibleError("no production plan satisfies the capacity limits")
    if sol.status != "optimal":
        raise NumericalError(f"robust LP is {sol.status}")
    return ProductionPlan(np.maximum(sol.x[x], 0.0)), sol.objective


def robust_lp_oracle(instance):
    """Exact minmax value for tiny instances: robust LP over all vertex scenarios."""
    return finite_minmax_lp(instance, vertex_scenarios(instance))


def brute_minmax(instance, grid_step, cap=None):
    """Best grid plan against the matching brute-force adversary (T <= 3).

    Per-period amounts range over ``[l_t, min(u_t, cap)]`` in steps of
    ``grid_step``; ``cap`` defaults to the largest upper demand.  The result
    is an upper bound on the minmax optimum.
    """
    T = instance.T
    _guard(T, MAX_T_MINMAX, "grid minmax")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    fs = instance.feasible
    if cap is None:
        cap = float(np.max(instance.upper))
    axes = []
    for t in range(T):
        lo = max(0.0, fs.l[t])
        hi = min(fs.u[t], cap)
        n = int(math.floor((hi - lo) / grid_step + 1e-9))
        axes.append(lo + grid_step * np.arange(n + 1))
    best_plan, best_val = None, INF
    for x in itertools.product(*axes):
        if not fs.contains(x):
            continue
        val = brute_adv(x, instance).value
        if val < best_val:
            best_plan, best_val = ProductionPlan(x), val
    if best_plan is None:
        raise InfeasibleError("no grid plan lies in the production set")
    return best_plan, best_val


# ---------------------------------------------------------------- random generators


def _positive_steps(rng, T, integral, lo=1, hi=10):
    if integral:
        return rng.integers(lo, hi + 1, T).astype(float)
    return rng.uniform(lo, hi, T)


def random_instance(rng, T, *, budget="discrete", overlap=False, integral=True, gamma=None,
                    costs=None, feasible=None, max_step=10):
    """Seeded random instance.

    Nominal demands are sorted cumulative sums of positive uniforms.  For
    non-overlapping instances each deviation is at most half of both
    neighbouring gaps; otherwise it is drawn up to the nominal value itself.
    """
    d_hat = np.cumsum(_positive_steps(rng, T, integral, 1, max_step))
    if overlap:
        caps = d_hat.copy()
    else:
        gaps = np.diff(d_hat)
        left = np.concatenate([[d_hat[0]], gaps]) / 2
        right = np.concatenate([gaps, [d_hat[-1]]]) / 2
        caps = np.minimum(np.minimum(left, right), d_hat)
    if integral:
        delta = np.array([float(rng.integers(0, int(math.floor(c)) + 1)) for c in caps])
    else:
        delta = rng.uniform(0, caps)
    if budget == "discrete":
        b = Discrete(int(rng.integers(0, T + 1)) if gamma is None else int(gamma))
    else:
        if gamma is None:
            total = float(delta.sum())
            g = float(rng.integers(0, int(total) + 1)) if integral else float(rng.uniform(0, total))
        else:
            g = float(gamma)
        b = Continuous(g)
    if costs is None:
        from .core import CostParams

        draw = (lambda: float(rng.integers(0, 5))) if integral else (lambda: float(rng.uniform(0, 4)))
        costs = CostParams(c_p=draw(), c_i=draw() + 1, c_b=draw() + 1, b_p=draw())
    if feasible is None:
        feasible = FeasibleSet.box(T)
    return Instance(T, costs, feasible, d_hat, delta, b)


def random_plan(rng, instance, integral=False):
    """A random plan whose cumulative production roams around the demand band."""
    hi = float(instance.upper[-1]) * 1.2 + 1
    X = np.sort(rng.uniform(0, hi, instance.T))
    if integral:
        X = np.round(X)
    return ProductionPlan.from_cumulative(X)


# ---------------------------------------------------------------- reports


@dataclass
class OracleReport:
    """Outcome of comparing two methods on a batch of inputs."""

    methods: tuple
    instance_digest: str
    max_discrepancy: float = 0.0
    witness: dict = field(default_factory=dict)
    cases: int = 0

    def record(self, a, b, witness):
        self.cases += 1
        gap = abs(a - b)
        if gap > self.max_discrepancy or not self.witness:
            self.max_discrepancy = max(self.max_discrepancy, gap)
            self.witness = {**witness, "values": [a, b]}

    def ok(self, tol=1e-6):
        return self.max_discrepancy <= tol
