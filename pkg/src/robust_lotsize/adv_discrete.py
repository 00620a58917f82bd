"""Worst-case scenarios under the discrete budget (a cap on the number of deviating periods)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import (
    TOL,
    Discrete,
    Scenario,
    _plan_X,
    branch_coefficients,
    branch_values,
    candidate_values,
    is_non_overlapping,
    period_costs,
    plan_cost,
)
from .errors import BudgetTypeError, DimensionError, PreconditionError


@dataclass
class AdvResult:
    scenario: Scenario
    value: float
    method: str
    info: dict = field(default_factory=dict)

    @property
    def D(self):
        return self.scenario.D


def _require_discrete(instance):
    if not isinstance(instance.budget, Discrete):
        raise BudgetTypeError(f"{type(instance.budget).__name__} budget; a discrete budget is required")
    return int(instance.budget.gamma)


def _check_plan(plan, instance):
    X = _plan_X(plan)
    if X.shape[0] != instance.T:
        raise DimensionError(f"plan has {X.shape[0]} periods, instance has {instance.T}")
    return X


def adv_coefficients(plan, instance):
    """Cost increase of each period when its demand moves to the worse endpoint."""
    X = _check_plan(plan, instance)
    costs = instance.costs
    fi_lo, _ = branch_values(X, instance.lower, costs)
    _, fb_hi = branch_values(X, instance.upper, costs)
    nominal = period_costs(X, instance.d_hat, costs)
    return np.maximum(fi_lo, fb_hi) - nominal


def adv_nonoverlap(plan, instance):
    """Selection algorithm: deviate the ``gamma`` periods with the largest coefficients.

    Uses a stable full sort (ties go to the earlier period) instead of
    linear-time selection; O(T log T).
    """
    gamma = _require_discrete(instance)
    if not is_non_overlapping(instance):
        raise PreconditionError("demand intervals overlap; use adv_general_dp")
    X = _check_plan(plan, instance)
    c = adv_coefficients(plan, instance)
    order = sorted(range(instance.T), key=lambda t: (-c[t], t))
    chosen = sorted(order[:gamma])

    D = instance.d_hat.copy()
    fi_lo, _ = branch_values(X, instance.lower, instance.costs)
    _, fb_hi = branch_values(X, instance.upper, instance.costs)
    for t in chosen:
        D[t] = instance.lower[t] if fi_lo[t] > fb_hi[t] else instance.upper[t]
    scenario = Scenario(D)
    return AdvResult(scenario, plan_cost(plan, scenario, instance), "selection", {"selected": [t + 1 for t in chosen]})


@dataclass(frozen=True, eq=False)
class LayeredGraph:
    """Layered DAG with source (layer 0) and sink (layer T+1).

    Nodes are numbered in layer order and, within a layer, by ascending
    demand value (then budget copy for split graphs).  ``node_budget`` is -1
    in the plain graph and the budget-used index in the split graph.
    Arc cost depends only on the head node, so it is stored per node as
    ``node_cost``; ``node_cost`` is None when built without a plan.
    """

    node_layer: np.ndarray
    node_value: np.ndarray
    node_budget: np.ndarray
    node_weight: np.ndarray  # 1 when the node's value deviates from nominal
    node_cost: np.ndarray | None
    arc_tail: np.ndarray
    arc_head: np.ndarray
    T: int

    @property
    def source(self):
        return 0

    @property
    def sink(self):
        return len(self.node_layer) - 1

    @property
    def n_nodes(self):
        return len(self.node_layer)

    @property
    def n_arcs(self):
        return len(self.arc_tail)

    def layer(self, k):
        return np.flatnonzero(self.node_layer == k)

    def layer_sizes(self):
        return [int(np.sum(self.node_layer == k)) for k in range(self.T + 2)]

    def layer_values(self, k):
        return [float(v) for v in self.node_value[self.layer(k)]]

    @property
    def arc_weight(self):
        w = self.node_weight[self.arc_head].copy()
        w[self.arc_head == self.sink] = 0
        return w

    @property
    def arc_cost(self):
        if self.node_cost is None:
            return None
        c = self.node_cost[self.arc_head].copy()
        c[self.arc_head == self.sink] = 0.0
        return c

    def predecessors(self):
        """CSR ``(ptr, idx)`` of predecessors per node, in ascending tail order."""
        order = np.lexsort((self.arc_tail, self.arc_head))
        heads = self.arc_head[order]
        ptr = np.zeros(self.n_nodes + 1, dtype=np.int64)
        np.add.at(ptr, heads + 1, 1)
        return np.cumsum(ptr), self.arc_tail[order].astype(np.int64)


def _prune(n, tails, heads, source, sink):
    """Keep nodes lying on some source-sink path (forward ∩ backward reachability)."""
    fwd = np.zeros(n, bool)
    fwd[source] = True
    bwd = np.zeros(n, bool)
    bwd[sink] = True
    order = np.argsort(tails, kind="stable")
    for a in order:  # tails are in topological order
        if fwd[tails[a]]:
            fwd[heads[a]] = True
    for a in order[::-1]:
        if bwd[heads[a]]:
            bwd[tails[a]] = True
    return fwd & bwd


def _finalize(layer, value, budget, weight, tails, heads, T):
    keep = _prune(len(layer), tails, heads, 0, len(layer) - 1)
    remap = -np.ones(len(layer), dtype=np.int64)
    remap[keep] = np.arange(int(keep.sum()))
    arc_keep = keep[tails] & keep[heads]
    return (
        layer[keep],
        value[keep],
        budget[keep],
        weight[keep],
        remap[tails[arc_keep]],
        remap[heads[arc_keep]],
    )


def _graph_structure(instance, tol=TOL):
    T = instance.T
    layer = [0]
    value = [math.nan]
    weight = [0]
    bounds = []
    for k in range(1, T + 1):
        vals = candidate_values(instance, k)
        start = len(layer)
        for v in vals:
            layer.append(k)
            value.append(v)
            weight.append(int(abs(v - instance.d_hat[k - 1]) > tol))
        bounds.append((start, len(layer)))
    layer.append(T + 1)
    value.append(math.nan)
    weight.append(0)
    sink = len(layer) - 1
    value_arr = np.array(value)

    tails, heads = [], []
    s0, e0 = bounds[0]
    tails += [0] * (e0 - s0)
    heads += list(range(s0, e0))
    for k in range(1, T):
        (sp, ep), (sc, ec) = bounds[k - 1], bounds[k]
        # head-major so predecessor lists come out in ascending tail order
        ok = value_arr[sp:ep][None, :] <= value_arr[sc:ec][:, None] + tol
        w, u = np.nonzero(ok)
        tails.extend((sp + u).tolist())
        heads.extend((sc + w).tolist())
    sT, eT = bounds[-1]
    tails += list(range(sT, eT))
    heads += [sink] * (eT - sT)
    return (
        np.array(layer, dtype=np.int64),
        value_arr,
        np.array(weight, dtype=np.int64),
        np.array(tails, dtype=np.int64),
        np.array(heads, dtype=np.int64),
    )


def node_costs(graph, plan, instance):
    """Per-node cost ``max{f_I, f_B}`` at the node's period and demand value."""
    X = _check_plan(plan, instance)
    cost = np.zeros(graph.n_nodes)
    mid = (graph.node_layer >= 1) & (graph.node_layer <= instance.T)
    k = graph.node_layer[mid] - 1
    Xk = X[k]
    iX, iD, bX, bD = branch_coefficients(instance.T, instance.costs)
    v = graph.node_value[mid]
    cost[mid] = np.maximum(iX[k] * Xk + iD[k] * v, bX[k] * Xk + bD[k] * v)
    return cost


def build_rlp_graph(plan, instance):
    """Layered graph whose source-sink paths are monotone vertex scenarios.

    Pass ``plan=None`` for the structure only (``node_cost`` left empty).
    """
    _require_discrete(instance)
    layer, value, weight, tails, heads = _graph_structure(instance)
    budget = -np.ones(len(layer), dtype=np.int64)
    layer, value, budget, weight, tails, heads = _finalize(layer, value, budget, weight, tails, heads, instance.T)
    g = LayeredGraph(layer, value, budget, weight, None, tails, heads, instance.T)
    if plan is not None:
        g = LayeredGraph(layer, value, budget, weight, node_costs(g, plan, instance), tails, heads, instance.T)
    return g


def adv_general_dp(plan, instance, graph=None):
    """Restricted longest path over the layered graph by DP on (node, budget used).

    Overlapping intervals are allowed.  Among equal-value predecessors the one
    with the smaller demand value wins; among equal final states the smaller
    demand value, then the smaller budget used.
    """
    gamma = _require_discrete(instance)
    _check_plan(plan, instance)
    if graph is None:
        graph = build_rlp_graph(plan, instance)
    elif graph.node_cost is None:
        graph = LayeredGraph(
            graph.node_layer, graph.node_value, graph.node_budget, graph.node_weight,
            node_costs(graph, plan, instance), graph.arc_tail, graph.arc_head, graph.T,
        )
    ptr, idx = graph.predecessors()
    is_start = np.zeros(graph.n_nodes, dtype=np.uint8)
    is_start[graph.layer(1)] = 1
    # the DP runs over demand nodes only; source/sink are implicit
    best, parent = kernels.rlp_dp(ptr, idx, graph.node_cost, graph.node_weight, is_start, gamma)

    last = graph.layer(instance.T)
    best_val, best_node, best_j = -math.inf, -1, -1
    for v in last:
        for j in range(gamma + 1):
            if best[v, j] > best_val:
                best_val, best_node, best_j = best[v, j], int(v), j
    D = np.empty(instance.T)
    v, j = best_node, best_j
    while v >= 0:
        D[graph.node_layer[v] - 1] = graph.node_value[v]
        p = int(parent[v, j])
        j -= int(graph.node_weight[v])
        v = p
    scenario = Scenario(D)
    return AdvResult(
        scenario, float(best_val), "rlp-dp",
        {"budget_used": best_j, "nodes": graph.n_nodes, "arcs": graph.n_arcs},
    )
