"""Pure-Python (numpy) implementations of the hot kernels.

These mirror ``_kernels.pyx`` line by line in their pivot and tie-breaking
rules; the compiled module is preferred when it is importable.
"""
import math

import numpy as np

OPTIMAL, UNBOUNDED, ITER_LIMIT, SINGULAR = 0, 1, 2, 3

D_TOL = 1e-9  # reduced-cost tolerance
P_TOL = 1e-9  # bound tolerance
PIV_TOL = 1e-9  # smallest acceptable pivot magnitude
REFACTOR_EVERY = 64


def simplex_phase(A, c, lb, ub, x, basis, max_iter, bland_after):
    """Bounded-variable primal simplex from a basis; the system is ``A @ x = 0``.

    ``x`` holds values for all columns (nonbasic ones at a bound, or at any
    value when free).  Basic values are recomputed on entry.  Returns
    ``(code, x, basis, iterations)``.
    """
    A = np.ascontiguousarray(A, dtype=float)
    m, n = A.shape
    x = np.array(x, dtype=float)
    basis = np.array(basis, dtype=np.int64)
    is_basic = np.zeros(n, dtype=bool)
    is_basic[basis] = True
    movable = (ub - lb) > P_TOL

    try:
        Binv = np.linalg.inv(A[:, basis])
    except np.linalg.LinAlgError:
        return SINGULAR, x, basis, 0
    x[basis] = 0.0
    x[basis] = -Binv @ (A @ x)

    it = 0
    degenerate = 0
    since_refactor = 0
    while True:
        if it >= max_iter:
            return ITER_LIMIT, x, basis, it
        y = c[basis] @ Binv
        d = c - y @ A
        nb = ~is_basic & movable
        inc = nb & (x < ub - P_TOL) & (d < -D_TOL)
        dec = nb & (x > lb + P_TOL) & (d > D_TOL)
        score = np.where(inc, -d, 0.0) + np.where(dec, d, 0.0)
        if degenerate > bland_after:
            cand = np.flatnonzero(score > 0.0)
            if cand.size == 0:
                return OPTIMAL, x, basis, it
            j = int(cand[0])
        else:
            j = int(np.argmax(score))
            if score[j] <= 0.0:
                return OPTIMAL, x, basis, it
        direction = 1.0 if inc[j] else -1.0

        alpha = Binv @ A[:, j]
        g = -direction * alpha  # rate of change of basic values
        xb = x[basis]
        lbb = lb[basis]
        ubb = ub[basis]
        ratios = np.full(m, math.inf)
        down = g < -PIV_TOL
        up = g > PIV_TOL
        with np.errstate(invalid="ignore"):
            ratios[down] = (xb[down] - lbb[down]) / -g[down]
            ratios[up] = (ubb[up] - xb[up]) / g[up]
        ratios[np.isnan(ratios)] = math.inf
        ratios = np.maximum(ratios, 0.0)
        theta_row = float(ratios.min()) if m else math.inf
        theta_flip = ub[j] - lb[j]

        if theta_flip <= theta_row:
            if not math.isfinite(theta_flip):
                return UNBOUNDED, x, basis, it
            x[basis] = xb + g * theta_flip
            x[j] = ub[j] if direction > 0 else lb[j]
            it += 1
            degenerate = 0
            continue
        if not math.isfinite(theta_row):
            return UNBOUNDED, x, basis, it

        ties = np.flatnonzero(ratios <= theta_row + 1e-12)
        if degenerate > bland_after:
            r = int(ties[np.argmin(basis[ties])])
        else:
            r = int(ties[np.argmax(np.abs(g[ties]))])
        theta = theta_row
        leaving = int(basis[r])
        x[basis] = xb + g * theta
        x[j] += direction * theta
        x[leaving] = lb[leaving] if g[r] < 0 else ub[leaving]

        piv = alpha[r]
        row_r = Binv[r] / piv
        Binv -= np.outer(alpha, row_r)
        Binv[r] = row_r
        basis[r] = j
        is_basic[leaving] = False
        is_basic[j] = True

        it += 1
        degenerate = degenerate + 1 if theta < 1e-12 else 0
        since_refactor += 1
        if since_refactor >= REFACTOR_EVERY:
            since_refactor = 0
            try:
                Binv = np.linalg.inv(A[:, basis])
            except np.linalg.LinAlgError:
                return SINGULAR, x, basis, it
            x[basis] = 0.0
            x[basis] = -Binv @ (A @ x)


def rlp_dp(pred_ptr, pred_idx, node_cost, node_weight, is_start, budget):
    """Budget-indexed longest path over a DAG whose nodes are in topological order.

    ``best[v, j]`` is the largest total node cost of a source-to-``v`` path
    using exactly ``j`` units of weight (``-inf`` when none exists);
    ``parent[v, j]`` is the predecessor on one such path (``-1`` at start
    nodes).  Predecessors must be listed in the preferred tie-break order:
    the first maximiser wins.
    """
    n = len(node_cost)
    W = int(budget)
    best = np.full((n, W + 1), -math.inf)
    parent = np.full((n, W + 1), -1, dtype=np.int64)
    for v in range(n):
        w = int(node_weight[v])
        if w > W:
            continue
        lo, hi = pred_ptr[v], pred_ptr[v + 1]
        if is_start[v]:
            best[v, w] = node_cost[v]
            continue
        if hi == lo:
            continue
        preds = pred_idx[lo:hi]
        block = best[preds, : W + 1 - w]
        k = np.argmax(block, axis=0)
        vals = block[k, np.arange(W + 1 - w)]
        ok = vals > -math.inf
        best[v, w:][ok] = vals[ok] + node_cost[v]
        parent[v, w:][ok] = preds[k[ok]]
    return best, parent


def dag_dp(arc_cost, caps, budget):
    """Longest path over the budget-allocation DAG.

    ``arc_cost[t, k]`` is the cost of allocating ``k`` units to period ``t``
    (valid for ``k <= caps[t]``).  Returns ``(best, choice)`` where
    ``best[t, d]`` is the best value over periods ``< t`` using exactly ``d``
    units and ``choice[t, d]`` the units given to period ``t`` on that path.
    Smaller allocations win ties.
    """
    T = arc_cost.shape[0]
    G = int(budget)
    best = np.full((T + 1, G + 1), -math.inf)
    best[0, 0] = 0.0
    choice = np.full((T, G + 1), -1, dtype=np.int64)
    for t in range(T):
        prev = best[t]
        cur = best[t + 1]
        ch = choice[t]
        for k in range(min(int(caps[t]), G) + 1):
            cand = prev[: G + 1 - k] + arc_cost[t, k]
            seg = cur[k:]
            better = cand > seg
            seg[better] = cand[better]
            ch[k:][better] = k
    return best, choice
