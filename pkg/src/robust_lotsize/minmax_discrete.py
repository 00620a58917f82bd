"""Robust plans under the discrete budget."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .adv_discrete import (
    LayeredGraph,
    _finalize,
    _graph_structure,
    _require_discrete,
    node_costs,
)
from .core import ProductionPlan, branch_coefficients, is_non_overlapping, production_lp_columns
from .errors import InfeasibleError, NumericalError, PreconditionError
from .linprog import LinearProgram, solve_lp

log = logging.getLogger(__name__)


@dataclass
class MinMaxResult:
    plan: ProductionPlan
    value: float
    method: str
    info: dict = field(default_factory=dict)


def _solve(lp, x_idx, method, max_iter=None, **info):
    sol = solve_lp(lp, max_iter=max_iter)
    if sol.status == "infeasible":
        raise InfeasibleError("no production plan satisfies the capacity limits")
    if sol.status != "optimal":
        raise NumericalError(f"{method} LP is {sol.status}")
    log.debug("%s: %d rows, %d cols, %d iterations", method, lp.n_rows, lp.n_vars, sol.iterations)
    x = np.maximum(sol.x[x_idx], 0.0)
    info.update(rows=lp.n_rows, cols=lp.n_vars, iterations=sol.iterations, status=sol.status)
    return MinMaxResult(ProductionPlan(x), sol.objective, method, info)


def _branch_rows(lp, lhs, X_var, t, D, coef):
    """Add ``lhs >= f_I(X_t, D)`` and ``lhs >= f_B(X_t, D)`` where ``lhs`` is a coeff dict."""
    iX, iD, bX, bD = coef
    for sX, sD in ((iX[t], iD[t]), (bX[t], bD[t])):
        row = dict(lhs)
        row[X_var] = row.get(X_var, 0.0) - sX
        lp.add_constraint(row, ">=", sD * D)


def minmax_nonoverlap_lp(instance, max_iter=None):
    """Compact LP from dualising the selection problem (non-overlapping intervals)."""
    gamma = _require_discrete(instance)
    if not is_non_overlapping(instance):
        raise PreconditionError("demand intervals overlap; use minmax_general_lp")
    T = instance.T
    coef = branch_coefficients(T, instance.costs)
    lp = LinearProgram("min")
    x_idx, X_idx = production_lp_columns(lp, instance.feasible)
    pi = [lp.add_variable(f"pi{t + 1}", None, None, 1.0) for t in range(T)]
    alpha = lp.add_variable("alpha", 0.0, None, float(gamma))
    gam = [lp.add_variable(f"gamma{t + 1}", 0.0, None, 1.0) for t in range(T)]
    for t in range(T):
        _branch_rows(lp, {pi[t]: 1.0}, X_idx[t], t, instance.d_hat[t], coef)
        # alpha + gamma_t + pi_t >= f_I(X_t, lower), f_B(X_t, upper)
        iX, iD, bX, bD = coef
        lhs = {alpha: 1.0, gam[t]: 1.0, pi[t]: 1.0}
        row = dict(lhs)
        row[X_idx[t]] = -iX[t]
        lp.add_constraint(row, ">=", iD[t] * instance.lower[t])
        row = dict(lhs)
        row[X_idx[t]] = -bX[t]
        lp.add_constraint(row, ">=", bD[t] * instance.upper[t])
    return _solve(lp, x_idx, "nonoverlap-lp", max_iter)


def build_split_graph(instance, plan=None):
    """Budget-indexed copy of the layered graph.

    Node ``u^j`` means "at ``u`` having used ``j`` deviations so far"; arcs
    into a deviating node raise ``j`` by one and never exceed the budget.
    Nodes off every source-sink path are removed.  With ``plan`` given the
    node costs are filled in.
    """
    gamma = _require_discrete(instance)
    layer, value, weight, tails, heads = _graph_structure(instance)
    n_base = len(layer)
    sink_base = n_base - 1
    budget = np.arange(gamma + 1)

    # id of (base node, j): source only at j=0, sink only once
    ids = -np.ones((n_base, gamma + 1), dtype=np.int64)
    ids[0, 0] = 0
    nxt = 1
    for u in range(1, n_base - 1):
        for j in range(weight[u], gamma + 1):
            ids[u, j] = nxt
            nxt += 1
    ids[sink_base, :] = nxt
    n_split = nxt + 1

    s_layer = np.empty(n_split, dtype=np.int64)
    s_value = np.empty(n_split)
    s_budget = np.empty(n_split, dtype=np.int64)
    s_weight = np.empty(n_split, dtype=np.int64)
    for u in range(n_base):
        for j in budget:
            v = ids[u, j]
            if v >= 0:
                s_layer[v], s_value[v], s_budget[v], s_weight[v] = layer[u], value[u], j, weight[u]
    s_budget[0] = 0
    s_budget[-1] = -1

    st, sh = [], []
    for a in range(len(tails)):
        u, w = tails[a], heads[a]
        for i in budget:
            if ids[u, i] < 0:
                continue
            j = i if w == sink_base else i + weight[w]
            if j <= gamma and ids[w, j] >= 0:
                st.append(ids[u, i])
                sh.append(ids[w, j])
    st, sh = np.array(st, dtype=np.int64), np.array(sh, dtype=np.int64)
    # dedupe parallel sink arcs
    pairs = np.unique(np.column_stack([st, sh]), axis=0) if len(st) else np.zeros((0, 2), np.int64)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    st, sh = pairs[order, 0], pairs[order, 1]

    parts = _finalize(s_layer, s_value, s_budget, s_weight, st, sh, instance.T)
    g = LayeredGraph(*parts[:4], None, parts[4], parts[5], instance.T)
    if plan is not None:
        g = LayeredGraph(*parts[:4], node_costs(g, plan, instance), parts[4], parts[5], instance.T)
    return g


def longest_path_value(graph):
    """Unconstrained longest source-sink path; node costs must be set."""
    ptr, idx = graph.predecessors()
    start = np.zeros(graph.n_nodes, dtype=np.uint8)
    start[graph.source] = 1
    zero = np.zeros(graph.n_nodes, dtype=np.int64)
    best, _ = kernels.rlp_dp(ptr, idx, graph.node_cost, zero, start, 0)
    return float(best[graph.sink, 0])


def minmax_general_lp(instance, max_iter=None):
    """Node-potential LP over the split graph; overlapping intervals allowed."""
    _require_discrete(instance)
    g = build_split_graph(instance)
    T = instance.T
    coef = branch_coefficients(T, instance.costs)
    lp = LinearProgram("min")
    x_idx, X_idx = production_lp_columns(lp, instance.feasible)
    pot = np.empty(g.n_nodes, dtype=np.int64)
    pot[g.source] = lp.add_variable("pi_s", 0.0, 0.0)
    for v in range(1, g.n_nodes - 1):
        pot[v] = lp.add_variable(f"pi_{g.node_layer[v]}_{g.node_value[v]:g}^{g.node_budget[v]}", None, None)
    pot[g.sink] = lp.add_variable("pi_t", None, None, 1.0)
    for u, w in zip(g.arc_tail, g.arc_head):
        if w == g.sink:
            lp.add_constraint({pot[w]: 1.0, pot[u]: -1.0}, ">=", 0.0)
            continue
        k = g.node_layer[w] - 1
        _branch_rows(lp, {pot[w]: 1.0, pot[u]: -1.0}, X_idx[k], k, g.node_value[w], coef)
    return _solve(lp, x_idx, "split-graph-lp", max_iter, nodes=g.n_nodes, arcs=g.n_arcs)
