# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Same contracts, pivot rules and tie-breaking as ``_kernels_py``; see there
for the documentation of each function.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, isnan

cnp.import_array()

DEF D_TOL = 1e-9
DEF P_TOL = 1e-9
DEF PIV_TOL = 1e-9
DEF REFACTOR_EVERY = 64

OPTIMAL, UNBOUNDED, ITER_LIMIT, SINGULAR = 0, 1, 2, 3


cdef int _refactor(double[:, ::1] A, long long[::1] basis, double[::1] x, object Binv_obj):
    """Invert the basis and recompute basic values; returns 0 or -1 if singular."""
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1], i, k, j
    cdef double s
    try:
        inv = np.linalg.inv(np.asarray(A)[:, np.asarray(basis)])
    except np.linalg.LinAlgError:
        return -1
    Binv_obj[...] = inv
    cdef double[:, ::1] Binv = Binv_obj
    for i in range(m):
        x[basis[i]] = 0.0
    cdef double[::1] ax = np.zeros(m)
    for i in range(m):
        s = 0.0
        for j in range(n):
            if x[j] != 0.0:
                s += A[i, j] * x[j]
        ax[i] = s
    for k in range(m):
        s = 0.0
        for i in range(m):
            s += Binv[k, i] * ax[i]
        x[basis[k]] = -s
    return 0


def simplex_phase(A_in, c_in, lb_in, ub_in, x_in, basis_in, long max_iter, long bland_after):
    cdef double[:, ::1] A = np.ascontiguousarray(A_in, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(c_in, dtype=np.float64)
    cdef double[::1] lb = np.ascontiguousarray(lb_in, dtype=np.float64)
    cdef double[::1] ub = np.ascontiguousarray(ub_in, dtype=np.float64)
    x_arr = np.array(x_in, dtype=np.float64)
    basis_arr = np.array(basis_in, dtype=np.int64)
    cdef double[::1] x = x_arr
    cdef long long[::1] basis = basis_arr
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t i, j, k, r, jin, leaving
    Binv_arr = np.zeros((m, m))
    cdef double[:, ::1] Binv = Binv_arr
    cdef double[::1] y = np.zeros(m)
    cdef double[::1] alpha = np.zeros(m)
    cdef double[::1] g = np.zeros(m)
    cdef double[::1] ratios = np.zeros(m)
    cdef double[::1] row_r = np.zeros(m)
    is_basic_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] is_basic = is_basic_arr
    cdef long it = 0, degenerate = 0, since_refactor = 0
    cdef double dj, score, best_score, direction, theta_row, theta_flip, theta, piv, s, gmax
    cdef bint inc_j, bland

    # column-sparse copy of A for pricing and FTRAN
    A_np = np.asarray(A)
    nz_rows, nz_cols = np.nonzero(A_np.T)
    col_ptr_arr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(nz_rows, minlength=n), out=col_ptr_arr[1:])
    cdef long long[::1] col_ptr = col_ptr_arr
    cdef long long[::1] row_idx = nz_cols.astype(np.int64)
    cdef double[::1] vals = A_np.T[nz_rows, nz_cols].copy()
    cdef Py_ssize_t p

    for i in range(m):
        is_basic[basis[i]] = 1
    if _refactor(A, basis, x, Binv_arr) < 0:
        return SINGULAR, x_arr, basis_arr, 0

    while True:
        if it >= max_iter:
            return ITER_LIMIT, x_arr, basis_arr, it
        for i in range(m):
            s = 0.0
            for k in range(m):
                s += c[basis[k]] * Binv[k, i]
            y[i] = s
        bland = degenerate > bland_after
        jin = -1
        best_score = 0.0
        inc_j = False
        for j in range(n):
            if is_basic[j] or not (ub[j] - lb[j] > P_TOL):
                continue
            s = 0.0
            for p in range(col_ptr[j], col_ptr[j + 1]):
                s += y[row_idx[p]] * vals[p]
            dj = c[j] - s
            score = 0.0
            if x[j] < ub[j] - P_TOL and dj < -D_TOL:
                score = -dj
            elif x[j] > lb[j] + P_TOL and dj > D_TOL:
                score = dj
            if score > best_score:
                best_score = score
                jin = j
                inc_j = dj < 0.0
                if bland:
                    break
        if jin < 0:
            return OPTIMAL, x_arr, basis_arr, it
        direction = 1.0 if inc_j else -1.0

        theta_row = INFINITY
        for k in range(m):
            alpha[k] = 0.0
        for p in range(col_ptr[jin], col_ptr[jin + 1]):
            i = row_idx[p]
            for k in range(m):
                alpha[k] += Binv[k, i] * vals[p]
        for k in range(m):
            g[k] = -direction * alpha[k]
            if g[k] < -PIV_TOL:
                ratios[k] = (x[basis[k]] - lb[basis[k]]) / -g[k]
            elif g[k] > PIV_TOL:
                ratios[k] = (ub[basis[k]] - x[basis[k]]) / g[k]
            else:
                ratios[k] = INFINITY
            if isnan(ratios[k]):
                ratios[k] = INFINITY
            if ratios[k] < 0.0:
                ratios[k] = 0.0
            if ratios[k] < theta_row:
                theta_row = ratios[k]
        theta_flip = ub[jin] - lb[jin]

        if theta_flip <= theta_row:
            if theta_flip == INFINITY:
                return UNBOUNDED, x_arr, basis_arr, it
            for k in range(m):
                x[basis[k]] += g[k] * theta_flip
            x[jin] = ub[jin] if direction > 0 else lb[jin]
            it += 1
            degenerate = 0
            continue
        if theta_row == INFINITY:
            return UNBOUNDED, x_arr, basis_arr, it

        r = -1
        gmax = -1.0
        for k in range(m):
            if ratios[k] <= theta_row + 1e-12:
                if bland:
                    if r < 0 or basis[k] < basis[r]:
                        r = k
                elif fabs(g[k]) > gmax:
                    gmax = fabs(g[k])
                    r = k
        theta = theta_row
        leaving = basis[r]
        for k in range(m):
            x[basis[k]] += g[k] * theta
        x[jin] += direction * theta
        x[leaving] = lb[leaving] if g[r] < 0 else ub[leaving]

        piv = alpha[r]
        for i in range(m):
            row_r[i] = Binv[r, i] / piv
        for k in range(m):
            if k == r or alpha[k] == 0.0:
                continue
            for i in range(m):
                Binv[k, i] -= alpha[k] * row_r[i]
        for i in range(m):
            Binv[r, i] = row_r[i]
        basis[r] = jin
        is_basic[leaving] = 0
        is_basic[jin] = 1

        it += 1
        degenerate = degenerate + 1 if theta < 1e-12 else 0
        since_refactor += 1
        if since_refactor >= REFACTOR_EVERY:
            since_refactor = 0
            if _refactor(A, basis, x, Binv_arr) < 0:
                return SINGULAR, x_arr, basis_arr, it


def rlp_dp(pred_ptr_in, pred_idx_in, node_cost_in, node_weight_in, is_start_in, long budget):
    cdef long long[::1] pred_ptr = np.ascontiguousarray(pred_ptr_in, dtype=np.int64)
    cdef long long[::1] pred_idx = np.ascontiguousarray(pred_idx_in, dtype=np.int64)
    cdef double[::1] node_cost = np.ascontiguousarray(node_cost_in, dtype=np.float64)
    cdef long long[::1] node_weight = np.ascontiguousarray(node_weight_in, dtype=np.int64)
    cdef unsigned char[::1] is_start = np.ascontiguousarray(is_start_in, dtype=np.uint8)
    cdef Py_ssize_t n = node_cost.shape[0], W = budget
    best_arr = np.full((n, W + 1), -np.inf)
    parent_arr = np.full((n, W + 1), -1, dtype=np.int64)
    cdef double[:, ::1] best = best_arr
    cdef long long[:, ::1] parent = parent_arr
    cdef Py_ssize_t v, j, p, u
    cdef long long w
    cdef double val, bv
    cdef long long bu
    for v in range(n):
        w = node_weight[v]
        if w > W:
            continue
        if is_start[v]:
            best[v, w] = node_cost[v]
            continue
        for j in range(W + 1 - w):
            bv = -INFINITY
            bu = -1
            for p in range(pred_ptr[v], pred_ptr[v + 1]):
                u = pred_idx[p]
                val = best[u, j]
                if val > bv:
                    bv = val
                    bu = u
            if bv > -INFINITY:
                best[v, j + w] = bv + node_cost[v]
                parent[v, j + w] = bu
    return best_arr, parent_arr


def dag_dp(arc_cost_in, caps_in, long budget):
    cdef double[:, ::1] arc_cost = np.ascontiguousarray(arc_cost_in, dtype=np.float64)
    cdef long long[::1] caps = np.ascontiguousarray(caps_in, dtype=np.int64)
    cdef Py_ssize_t T = arc_cost.shape[0], G = budget
    best_arr = np.full((T + 1, G + 1), -np.inf)
    choice_arr = np.full((T, G + 1), -1, dtype=np.int64)
    cdef double[:, ::1] best = best_arr
    cdef long long[:, ::1] choice = choice_arr
    cdef Py_ssize_t t, k, d, kmax
    cdef double cand
    best[0, 0] = 0.0
    for t in range(T):
        kmax = caps[t] if caps[t] < G else G
        for k in range(kmax + 1):
            for d in range(G + 1 - k):
                cand = best[t, d] + arc_cost[t, k]
                if cand > best[t + 1, d + k]:
                    best[t + 1, d + k] = cand
                    choice[t, d + k] = k
    return best_arr, choice_arr
