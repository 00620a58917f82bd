"""Robust plans under the continuous budget."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .adv_continuous import _require_continuous, adv_general_bb
from .core import ProductionPlan, branch_coefficients, is_non_overlapping, production_lp_columns
from .errors import InfeasibleError, NumericalError, PreconditionError
from .linprog import LinearProgram, solve_lp
from .minmax_discrete import MinMaxResult, _branch_rows, _solve

log = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-9


def minmax_nonoverlap_lp(instance, max_iter=None):
    """Node-potential LP over the (period, budget used) DAG; integral non-overlapping data."""
    gamma = _require_continuous(instance)
    if not is_non_overlapping(instance):
        raise PreconditionError("demand intervals overlap; use decompose")
    if not instance.is_integral():
        raise PreconditionError("budget and deviations must be integral; use decompose")
    T = instance.T
    G = int(round(gamma))
    caps = np.round(instance.delta).astype(int)
    reach = np.minimum(np.cumsum(caps), G)
    coef = branch_coefficients(T, instance.costs)

    lp = LinearProgram("min")
    x_idx, X_idx = production_lp_columns(lp, instance.feasible)
    prev = {0: lp.add_variable("pi_0^0", 0.0, 0.0)}
    arcs = 0
    for t in range(T):
        cur = {d: lp.add_variable(f"pi_{t + 1}^{d}", None, None) for d in range(reach[t] + 1)}
        for d, u in prev.items():
            for k in range(min(caps[t], G - d) + 1):
                lhs = {cur[d + k]: 1.0, u: -1.0}
                iX, iD, bX, bD = coef
                row = dict(lhs)
                row[X_idx[t]] = -iX[t]
                lp.add_constraint(row, ">=", iD[t] * (instance.d_hat[t] - k))
                row = dict(lhs)
                row[X_idx[t]] = -bX[t]
                lp.add_constraint(row, ">=", bD[t] * (instance.d_hat[t] + k))
                arcs += 1
        prev = cur
    sink = lp.add_variable("pi_t", None, None, 1.0)
    for u in prev.values():
        lp.add_constraint({sink: 1.0, u: -1.0}, ">=", 0.0)
    return _solve(lp, x_idx, "dag-lp", max_iter, arcs=arcs)


@dataclass
class DecompositionState:
    """Bounds and scenario pool of the decomposition loop."""

    LB: float = -math.inf
    UB: float = math.inf
    pool: list = field(default_factory=list)
    iterations: int = 0
    incumbent: ProductionPlan | None = None
    history: list = field(default_factory=list)  # (LB, UB, master value, adversary value)
    converged: bool = False
    reason: str = ""

    @property
    def gap(self):
        return self.UB - self.LB


def master_lp(instance, pool):
    """Relaxed minmax LP over a finite scenario pool; returns ``(plan, alpha)``."""
    T = instance.T
    coef = branch_coefficients(T, instance.costs)
    lp = LinearProgram("min")
    x_idx, X_idx = production_lp_columns(lp, instance.feasible)
    alpha = lp.add_variable("alpha", None, None, 1.0)
    for s, D in enumerate(pool):
        pis = [lp.add_variable(f"pi{s}_{t + 1}", None, None) for t in range(T)]
        lp.add_constraint({alpha: 1.0, **{p: -1.0 for p in pis}}, ">=", 0.0)
        for t in range(T):
            _branch_rows(lp, {pis[t]: 1.0}, X_idx[t], t, D[t], coef)
    sol = solve_lp(lp)
    if sol.status == "infeasible":
        raise InfeasibleError("no production plan satisfies the capacity limits")
    if sol.status != "optimal":
        raise NumericalError(f"master LP is {sol.status}")
    return ProductionPlan(np.maximum(sol.x[x_idx], 0.0)), sol.objective


def decompose(instance, epsilon=1e-6, max_iter=200, adversary=adv_general_bb):
    """Scenario-generation loop between the master LP and an exact adversary.

    Returns ``(MinMaxResult, DecompositionState)``.  When ``max_iter`` runs
    out, or the adversary returns a scenario already in the pool, the best
    plan found so far is returned with ``converged=False`` unless the gap
    is already within ``epsilon``.
    """
    _require_continuous(instance)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    st = DecompositionState(pool=[np.array(instance.d_hat, dtype=float)])
    while True:
        if st.iterations >= max_iter:
            st.reason = "max_iter"
            break
        st.iterations += 1
        plan, alpha = master_lp(instance, st.pool)
        prev_lb, prev_ub = st.LB, st.UB
        st.LB = max(st.LB, alpha)
        adv = adversary(plan, instance)
        if adv.value < st.UB:
            st.UB = adv.value
            st.incumbent = plan
        st.history.append((st.LB, st.UB, alpha, adv.value))
        assert st.LB >= prev_lb and st.UB <= prev_ub, "bounds lost monotonicity"
        log.info("iteration %d: LB=%.9g UB=%.9g pool=%d", st.iterations, st.LB, st.UB, len(st.pool))
        if st.UB - st.LB <= epsilon:
            st.converged, st.reason = True, "gap"
            break
        D = np.array(adv.D, dtype=float)
        if any(np.max(np.abs(D - P)) <= DUPLICATE_TOL for P in st.pool):
            st.reason = "duplicate"
            break
        st.pool.append(D)
    info = {"LB": st.LB, "UB": st.UB, "iterations": st.iterations, "converged": st.converged,
            "reason": st.reason, "pool": len(st.pool)}
    return MinMaxResult(st.incumbent, st.UB, "decomposition", info), st
