"""A small dense linear programming layer.

Problems are stored in the bounded form::

    min/max  c @ x   s.t.  row_lo <= A @ x <= row_hi,  lb <= x <= ub

and solved by a two-phase bounded-variable primal simplex.  Each row gets a
logical variable ``r_i = A_i @ x`` carrying the row bounds, so the working
system is ``[A, -I] @ (x, r) = 0`` with bounds on every column.  Rows whose
logical starts outside its bounds receive an artificial column for phase 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NumericalError, StructuralError

INF = math.inf
FEAS_TOL = 1e-7

_RELATIONS = {"<=": "<=", "le": "<=", ">=": ">=", "ge": ">=", "=": "=", "==": "=", "eq": "="}


class LinearProgram:
    """Incrementally built LP.  Variables are referred to by integer index."""

    def __init__(self, sense="min"):
        if sense not in ("min", "max"):
            raise StructuralError(f"sense must be 'min' or 'max', got {sense!r}")
        self.sense = sense
        self.names = []
        self.lb = []
        self.ub = []
        self.obj = []
        self.rows = []  # (coeffs dict, relation, rhs)

    @property
    def n_vars(self):
        return len(self.names)

    @property
    def n_rows(self):
        return len(self.rows)

    def add_variable(self, name=None, lb=0.0, ub=INF, cost=0.0):
        lb = -INF if lb is None else float(lb)
        ub = INF if ub is None else float(ub)
        if math.isnan(lb) or math.isnan(ub) or lb == INF or ub == -INF or not math.isfinite(cost):
            raise StructuralError(f"bad bounds/cost for variable {name!r}")
        self.names.append(name if name is not None else f"v{len(self.names)}")
        self.lb.append(lb)
        self.ub.append(ub)
        self.obj.append(float(cost))
        return len(self.names) - 1

    def set_objective(self, coeffs):
        for j, v in coeffs.items():
            self._check_index(j)
            self.obj[j] = float(v)

    def add_constraint(self, coeffs, relation, rhs):
        rel = _RELATIONS.get(relation)
        if rel is None:
            raise StructuralError(f"unknown relation {relation!r}")
        if not math.isfinite(rhs):
            raise StructuralError("right-hand side must be finite")
        row = {}
        for j, v in coeffs.items():
            self._check_index(j)
            if not math.isfinite(v):
                raise StructuralError(f"non-finite coefficient for variable {j}")
            row[j] = row.get(j, 0.0) + float(v)
        self.rows.append((row, rel, float(rhs)))
        return len(self.rows) - 1

    def _check_index(self, j):
        if not isinstance(j, (int, np.integer)) or not 0 <= j < len(self.names):
            raise StructuralError(f"constraint references undeclared variable {j!r}")

    def dense(self):
        """Return ``(c, A, row_lo, row_hi, lb, ub)`` as numpy arrays."""
        n, m = self.n_vars, self.n_rows
        A = np.zeros((m, n))
        lo = np.full(m, -INF)
        hi = np.full(m, INF)
        for i, (row, rel, rhs) in enumerate(self.rows):
            for j, v in row.items():
                A[i, j] = v
            if rel in ("<=", "="):
                hi[i] = rhs
            if rel in (">=", "="):
                lo[i] = rhs
        return np.array(self.obj), A, lo, hi, np.array(self.lb), np.array(self.ub)


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    objective: float = math.nan
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0

    @property
    def ok(self):
        return self.status == "optimal"

    def __getitem__(self, j):
        return self.x[j]


def solve_lp(lp, max_iter=None):
    """Solve ``lp`` and return an :class:`LpSolution`.

    ``duals[i]`` is the sensitivity of the objective to the right-hand side
    of row ``i`` (zero for rows dropped as empty).
    Raises :class:`NumericalError` when the iteration limit is reached.
    """
    c, A, lo, hi, lb, ub = lp.dense()
    return solve_dense(c, A, lo, hi, lb, ub, lp.sense, max_iter)


def solve_dense(c, A, lo, hi, lb, ub, sense="min", max_iter=None):
    """Array-level entry point used by :func:`solve_lp` and by hot loops.

    Solves ``min/max c @ x`` s.t. ``lo <= A @ x <= hi``, ``lb <= x <= ub``.
    """
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, c.shape[0])
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    lb, ub = np.asarray(lb, dtype=float), np.asarray(ub, dtype=float)
    m, n = A.shape
    if np.any(lb > ub + FEAS_TOL):
        return LpSolution("infeasible")
    ub = np.maximum(ub, lb)

    keep = np.any(A != 0.0, axis=1) if m else np.zeros(0, bool)
    for i in np.flatnonzero(~keep):
        if lo[i] > FEAS_TOL or hi[i] < -FEAS_TOL:
            return LpSolution("infeasible")
    A, lo, hi = A[keep], lo[keep], hi[keep]

    sign = -1.0 if sense == "max" else 1.0
    status, x, y, iters = _two_phase(A, sign * c, lb, ub, lo, hi, max_iter)
    if status != "optimal":
        return LpSolution(status, iterations=iters)
    duals = np.zeros(m)
    duals[keep] = sign * y
    return LpSolution("optimal", float(c @ x), x, duals, iters)


def _initial_value(lb, ub):
    if math.isfinite(lb):
        return lb
    if math.isfinite(ub):
        return ub
    return 0.0


def _two_phase(A, c, lb, ub, lo, hi, max_iter):
    m, n = A.shape
    x0 = np.array([_initial_value(a, b) for a, b in zip(lb, ub)])
    if m == 0:
        # bounds only: each variable sits at its cheapest bound
        x = x0.copy()
        for j in range(n):
            if c[j] > 0:
                x[j] = lb[j]
            elif c[j] < 0:
                x[j] = ub[j]
            if not math.isfinite(x[j]):
                return "unbounded", None, None, 0
        return "optimal", x, np.zeros(0), 0

    v = A @ x0
    art_rows = []
    art_sign = []
    r0 = v.copy()
    for i in range(m):
        if v[i] < lo[i] - FEAS_TOL * 0.01:
            r0[i] = lo[i]
        elif v[i] > hi[i] + FEAS_TOL * 0.01:
            r0[i] = hi[i]
        else:
            continue
        art_rows.append(i)
        art_sign.append(1.0 if r0[i] > v[i] else -1.0)
    k = len(art_rows)

    # columns: structural | logical | artificial
    ncol = n + m + k
    Af = np.zeros((m, ncol))
    Af[:, :n] = A
    Af[np.arange(m), n + np.arange(m)] = -1.0
    for a, (i, s) in enumerate(zip(art_rows, art_sign)):
        Af[i, n + m + a] = s
    flb = np.concatenate([lb, lo, np.zeros(k)])
    fub = np.concatenate([ub, hi, np.full(k, INF)])
    x = np.concatenate([x0, r0, np.abs(r0[art_rows] - v[art_rows]) if k else np.zeros(0)])

    basis = np.arange(n, n + m, dtype=np.int64)
    for a, i in enumerate(art_rows):
        basis[i] = n + m + a

    limit = max_iter if max_iter is not None else 50 * (m + n) + 1000
    bland_after = 2 * (m + n)
    total = 0
    if k:
        c1 = np.zeros(ncol)
        c1[n + m:] = 1.0
        code, x, basis, it = kernels.simplex_phase(Af, c1, flb, fub, x, basis, limit, bland_after)
        total += it
        if code == 2:
            raise NumericalError("phase 1 iteration limit", best_bound=float(c1 @ x))
        if code == 3:
            raise NumericalError("singular basis in phase 1")
        infeas = float(np.sum(x[n + m:]))
        scale = 1.0 + float(np.max(np.abs(r0))) if m else 1.0
        if infeas > FEAS_TOL * scale:
            return "infeasible", None, None, total
        fub[n + m:] = 0.0
        x[n + m:] = 0.0

    c2 = np.concatenate([c, np.zeros(m + k)])
    code, x, basis, it = kernels.simplex_phase(Af, c2, flb, fub, x, basis, max(limit - total, 1), bland_after)
    total += it
    if code == 1:
        return "unbounded", None, None, total
    if code == 2:
        raise NumericalError("phase 2 iteration limit", best_bound=float(c2 @ x))
    if code == 3:
        raise NumericalError("singular basis in phase 2")
    B = Af[:, basis]
    y = np.linalg.solve(B.T, c2[basis])
    xs = np.clip(x[:n], lb, ub)
    return "optimal", xs, y, total
