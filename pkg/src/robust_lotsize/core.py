"""Domain types and cost evaluation for robust lot sizing with backordering.

Periods are 1-based wherever a period index appears in a public signature
(``f_I``, ``f_B``, ``candidate_values``); arrays are plain 0-based numpy
vectors of length ``T``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError

INF = math.inf
TOL = 1e-9  # invariant checks
XTOL = 1e-6  # cross-solver equality


def _frozen_array(values, n=None, name="array"):
    arr = np.array(values, dtype=float).reshape(-1)
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"{name} has length {arr.shape[0]}, expected {n}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CostParams:
    """Production, inventory, backorder cost rates and the selling price."""

    c_p: float = 0.0
    c_i: float = 0.0
    c_b: float = 0.0
    b_p: float = 0.0

    def violations(self):
        out = []
        for name in ("c_p", "c_i", "c_b", "b_p"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                out.append(f"cost {name}={v} must be finite and nonnegative")
        return out


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """Box bounds on per-period and cumulative production.

    Missing bounds default to ``l=0``, ``u=inf``, ``L=0``, ``U=inf``.
    """

    l: np.ndarray
    u: np.ndarray
    L: np.ndarray
    U: np.ndarray

    @classmethod
    def box(cls, T, l=None, u=None, L=None, U=None):
        def fill(v, default, name):
            if v is None:
                return _frozen_array(np.full(T, default), T, name)
            return _frozen_array([INF if e is None else e for e in v], T, name)

        return cls(fill(l, 0.0, "l"), fill(u, INF, "u"), fill(L, 0.0, "L"), fill(U, INF, "U"))

    @property
    def T(self):
        return self.l.shape[0]

    def contains(self, x, tol=1e-7):
        x = np.asarray(x, dtype=float)
        X = np.cumsum(x)
        return bool(
            np.all(x >= -tol)
            and np.all(x >= self.l - tol)
            and np.all(x <= self.u + tol)
            and np.all(X >= self.L - tol)
            and np.all(X <= self.U + tol)
        )


@dataclass(frozen=True)
class Discrete:
    """At most ``gamma`` cumulative demands deviate from nominal."""

    gamma: int

    kind = "discrete"

    @property
    def value(self):
        return self.gamma


@dataclass(frozen=True)
class Continuous:
    """Total absolute deviation from nominal is at most ``gamma``."""

    gamma: float

    kind = "continuous"

    @property
    def value(self):
        return self.gamma


Budget = Union[Discrete, Continuous]


@dataclass(frozen=True, eq=False)
class Instance:
    T: int
    costs: CostParams
    feasible: FeasibleSet
    d_hat: np.ndarray
    delta: np.ndarray
    budget: Budget

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise DimensionError(f"T must be a positive integer, got {self.T}")
        object.__setattr__(self, "d_hat", _frozen_array(self.d_hat, self.T, "d_hat"))
        object.__setattr__(self, "delta", _frozen_array(self.delta, self.T, "delta"))
        if self.feasible.T != self.T:
            raise DimensionError(f"feasible set has horizon {self.feasible.T}, expected {self.T}")

    @classmethod
    def build(cls, d_hat, delta, budget, costs=None, feasible=None, **cost_kwargs):
        """Convenience constructor; ``feasible`` may be a FeasibleSet or a dict of bounds."""
        d_hat = list(d_hat)
        T = len(d_hat)
        if costs is None:
            costs = CostParams(**cost_kwargs)
        if feasible is None:
            feasible = FeasibleSet.box(T)
        elif isinstance(feasible, dict):
            feasible = FeasibleSet.box(T, **feasible)
        return cls(T, costs, feasible, d_hat, delta, budget)

    def with_budget(self, budget):
        return Instance(self.T, self.costs, self.feasible, self.d_hat, self.delta, budget)

    @property
    def lower(self):
        return self.d_hat - self.delta

    @property
    def upper(self):
        return self.d_hat + self.delta

    def nominal(self):
        return Scenario(self.d_hat)

    def is_integral(self, tol=TOL):
        """True when the budget and all deviations are integers."""
        vals = np.append(self.delta, float(self.budget.value))
        return bool(np.all(np.abs(vals - np.round(vals)) <= tol))


@dataclass(frozen=True, eq=False)
class ProductionPlan:
    """Per-period production amounts ``x``; ``X`` is the running total."""

    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_array(self.x, name="x"))

    @classmethod
    def from_cumulative(cls, X):
        X = np.asarray(X, dtype=float)
        return cls(np.diff(X, prepend=0.0))

    @property
    def X(self):
        return np.cumsum(self.x)

    @property
    def T(self):
        return self.x.shape[0]


@dataclass(frozen=True, eq=False)
class Scenario:
    """A cumulative demand vector."""

    D: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "D", _frozen_array(self.D, name="D"))

    @property
    def T(self):
        return self.D.shape[0]

    def deviations(self, instance):
        return self.D - instance.d_hat

    def violations(self, instance, tol=TOL):
        """List of reasons this scenario is outside the instance's uncertainty set."""
        if self.T != instance.T:
            return [f"scenario length {self.T} != T={instance.T}"]
        out = []
        D = self.D
        if np.any(D < -tol):
            out.append("negative cumulative demand")
        if np.any(np.diff(D) < -tol):
            out.append("cumulative demand decreases")
        dev = np.abs(D - instance.d_hat)
        if np.any(dev > instance.delta + tol):
            out.append("deviation exceeds delta")
        b = instance.budget
        if isinstance(b, Discrete):
            if int(np.sum(dev > tol)) > b.gamma:
                out.append(f"more than {b.gamma} deviating periods")
        elif float(np.sum(dev)) > b.gamma + max(tol, 1e-7):
            out.append(f"total deviation {np.sum(dev)} exceeds {b.gamma}")
        return out


def _plan_X(plan):
    if isinstance(plan, ProductionPlan):
        return plan.X
    return np.cumsum(np.asarray(plan, dtype=float))


def _scenario_D(scenario):
    if isinstance(scenario, Scenario):
        return scenario.D
    return np.asarray(scenario, dtype=float)


def f_I(t, T, X_t, D_t, X_T, costs):
    """Inventory-side period cost; nonincreasing in ``D_t``."""
    val = costs.c_i * (X_t - D_t)
    if t == T:
        val += costs.c_p * X_T - costs.b_p * D_t
    return val


def f_B(t, T, X_t, D_t, X_T, costs):
    """Backorder-side period cost; nondecreasing in ``D_t``."""
    val = costs.c_b * (D_t - X_t)
    if t == T:
        val += costs.c_p * X_T - costs.b_p * X_t
    return val


def branch_coefficients(T, costs):
    """Slopes of both cost branches as linear functions of ``(X_t, D_t)``.

    Returns four length-``T`` arrays ``(iX, iD, bX, bD)`` such that
    ``f_I = iX[t]*X_t + iD[t]*D_t`` and ``f_B = bX[t]*X_t + bD[t]*D_t``.
    In the last period ``X_t == X_T`` so the production term folds in.
    """
    iX = np.full(T, costs.c_i)
    iD = np.full(T, -costs.c_i)
    bX = np.full(T, -costs.c_b)
    bD = np.full(T, costs.c_b)
    iX[-1] += costs.c_p
    iD[-1] -= costs.b_p
    bX[-1] += costs.c_p - costs.b_p
    return iX, iD, bX, bD


def branch_values(X, D, costs):
    """Vectorised ``(f_I, f_B)`` over all periods; ``D`` may be 1-d or 2-d (rows = scenarios)."""
    X = np.asarray(X, dtype=float)
    D = np.asarray(D, dtype=float)
    iX, iD, bX, bD = branch_coefficients(X.shape[-1], costs)
    return iX * X + iD * D, bX * X + bD * D


def period_costs(X, D, costs):
    fi, fb = branch_values(X, D, costs)
    return np.maximum(fi, fb)


def plan_cost(plan, scenario, instance_or_costs):
    """Total cost of a plan under one cumulative demand scenario."""
    X = _plan_X(plan)
    D = _scenario_D(scenario)
    costs = getattr(instance_or_costs, "costs", instance_or_costs)
    if X.shape[0] != D.shape[-1]:
        raise DimensionError(f"plan has {X.shape[0]} periods, scenario has {D.shape[-1]}")
    T_inst = getattr(instance_or_costs, "T", X.shape[0])
    if T_inst != X.shape[0]:
        raise DimensionError(f"plan has {X.shape[0]} periods, instance has {T_inst}")
    return float(np.sum(period_costs(X, D, costs)))


def plan_costs(plan, scenarios, costs):
    """Costs of one plan under many scenarios (rows of ``scenarios``)."""
    return np.sum(period_costs(_plan_X(plan), np.atleast_2d(scenarios), costs), axis=-1)


def is_non_overlapping(instance, tol=TOL):
    up = instance.d_hat[:-1] + instance.delta[:-1]
    lo = instance.d_hat[1:] - instance.delta[1:]
    return bool(np.all(up <= lo + tol))


def dedupe_sorted(values, tol=TOL):
    out = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return out


def candidate_values(instance, k, tol=TOL):
    """Values worth considering for the ``k``-th (1-based) cumulative demand at a vertex scenario."""
    if not 1 <= k <= instance.T:
        raise DimensionError(f"period {k} outside 1..{instance.T}")
    lo = instance.d_hat[k - 1] - instance.delta[k - 1]
    hi = instance.d_hat[k - 1] + instance.delta[k - 1]
    pts = np.concatenate([instance.lower, instance.d_hat, instance.upper])
    inside = [min(max(float(p), lo), hi) for p in pts if lo - tol <= p <= hi + tol]
    return dedupe_sorted(inside, tol)


def validate(instance):
    """Return a list of human-readable invariant violations (empty when valid)."""
    out = list(instance.costs.violations())
    d_hat, delta, T = instance.d_hat, instance.delta, instance.T
    if not np.all(np.isfinite(d_hat)) or not np.all(np.isfinite(delta)):
        out.append("d_hat and delta must be finite")
    for t in range(T):
        if d_hat[t] < 0:
            out.append(f"t={t + 1}: d_hat={d_hat[t]} is negative")
        if delta[t] < 0:
            out.append(f"t={t + 1}: delta={delta[t]} is negative")
        if delta[t] > d_hat[t] + TOL:
            out.append(f"t={t + 1}: delta={delta[t]} exceeds d_hat={d_hat[t]}")
    for t in range(T - 1):
        if d_hat[t] > d_hat[t + 1] + TOL:
            out.append(f"t={t + 1}: d_hat not monotone ({d_hat[t]} > {d_hat[t + 1]})")
    b = instance.budget
    if isinstance(b, Discrete):
        if int(b.gamma) != b.gamma or not 0 <= b.gamma <= T:
            out.append(f"discrete budget {b.gamma} must be an integer in 0..{T}")
    elif isinstance(b, Continuous):
        if not math.isfinite(b.gamma) or b.gamma < 0:
            out.append(f"continuous budget {b.gamma} must be finite and nonnegative")
    else:
        out.append(f"unknown budget type {type(b).__name__}")
    fs = instance.feasible
    for t in range(T):
        if not (0 <= fs.l[t] <= fs.u[t]):
            out.append(f"t={t + 1}: need 0 <= l <= u, got l={fs.l[t]}, u={fs.u[t]}")
        if not (0 <= fs.L[t] <= fs.U[t]):
            out.append(f"t={t + 1}: need 0 <= L <= U, got L={fs.L[t]}, U={fs.U[t]}")
    if not out and not feasible_set_nonempty(fs):
        out.append("feasible production set is empty")
    return out


def production_lp_columns(lp, feasible, prefix=""):
    """Add ``x`` and ``X`` variables plus linking and capacity rows to ``lp``.

    Returns the index arrays ``(x_idx, X_idx)``.
    """
    T = feasible.T
    x_idx = [lp.add_variable(f"{prefix}x{t + 1}", max(0.0, feasible.l[t]), feasible.u[t]) for t in range(T)]
    X_idx = [lp.add_variable(f"{prefix}X{t + 1}", feasible.L[t], feasible.U[t]) for t in range(T)]
    for t in range(T):
        row = {X_idx[t]: 1.0, x_idx[t]: -1.0}
        if t:
            row[X_idx[t - 1]] = -1.0
        lp.add_constraint(row, "=", 0.0)
    return x_idx, X_idx


def feasible_set_nonempty(feasible):
    from .linprog import LinearProgram, solve_lp

    lp = LinearProgram("min")
    production_lp_columns(lp, feasible)
    return solve_lp(lp).status == "optimal"
