import math

import numpy as np
import pytest
import scipy.optimize

from robust_lotsize import LinearProgram, NumericalError, StructuralError, solve_lp
from robust_lotsize.linprog import solve_dense


def test_bounded_maximum(backend):
    lp = LinearProgram("max")
    x = lp.add_variable("x", 0, None, 1.0)
    lp.add_constraint({x: 1.0}, "<=", 3)
    sol = solve_lp(lp)
    assert sol.status == "optimal" and sol.objective == pytest.approx(3)


def test_contradictory_rows(backend):
    lp = LinearProgram()
    x = lp.add_variable("x", None, None)
    lp.add_constraint({x: 1.0}, ">=", 1)
    lp.add_constraint({x: 1.0}, "<=", 0)
    assert solve_lp(lp).status == "infeasible"


def test_unbounded_ray(backend):
    lp = LinearProgram("max")
    x = lp.add_variable("x", 0, None, 1.0)
    y = lp.add_variable("y", 0, None)
    lp.add_constraint({x: 1.0, y: -1.0}, "<=", 2)
    assert solve_lp(lp).status == "unbounded"


def test_fractional_vertex_relaxation(backend):
    """max 14 + 2(d1 + d2) - d3 with |d| budget 4 and chained order rows."""
    lp = LinearProgram("max")
    dev = [3, 2, 1]
    d = [lp.add_variable(f"d{t}", -dev[t], dev[t]) for t in range(3)]
    p = [lp.add_variable(f"p{t}", 0, None) for t in range(3)]
    n = [lp.add_variable(f"n{t}", 0, None) for t in range(3)]
    lp.set_objective({d[0]: 2, d[1]: 2, d[2]: -1})
    for t in range(3):
        lp.add_constraint({d[t]: 1, p[t]: -1, n[t]: 1}, "=", 0)
    lp.add_constraint({**{v: 1 for v in p}, **{v: 1 for v in n}}, "<=", 4)
    lp.add_constraint({d[0]: 1, d[1]: -1}, "<=", 1)
    lp.add_constraint({d[1]: 1, d[2]: -1}, "<=", 1)
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert 14 + sol.objective == pytest.approx(21, abs=1e-9)
    assert sol.x[d] == pytest.approx([7 / 3, 4 / 3, 1 / 3], abs=1e-9)


def test_free_variables_and_equalities(backend):
    lp = LinearProgram()
    a = lp.add_variable("a", None, None, 1.0)
    b = lp.add_variable("b", None, None, 1.0)
    lp.add_constraint({a: 1, b: -1}, "=", 4)
    lp.add_constraint({a: 1, b: 1}, ">=", -2)
    sol = solve_lp(lp)
    assert sol.objective == pytest.approx(-2)
    assert sol.x[a] - sol.x[b] == pytest.approx(4)


def test_empty_rows_are_dropped():
    lp = LinearProgram()
    x = lp.add_variable("x", 1, 2, 1.0)
    lp.add_constraint({}, "<=", 5)
    lp.add_constraint({x: 0.0}, ">=", -1)
    sol = solve_lp(lp)
    assert sol.objective == pytest.approx(1) and len(sol.duals) == 2
    lp.add_constraint({}, ">=", 1)
    assert solve_lp(lp).status == "infeasible"


def test_structural_errors():
    lp = LinearProgram()
    with pytest.raises(StructuralError):
        LinearProgram("maximise")
    with pytest.raises(StructuralError):
        lp.add_constraint({0: 1.0}, "<=", 1)
    x = lp.add_variable("x")
    with pytest.raises(StructuralError):
        lp.add_constraint({x: 1.0}, "<", 1)
    with pytest.raises(StructuralError):
        lp.add_constraint({x: math.nan}, "<=", 1)
    with pytest.raises(StructuralError):
        lp.add_constraint({x: 1.0}, "<=", math.inf)
    with pytest.raises(StructuralError):
        lp.add_variable("y", math.inf, None)


def _random_lp(rng, m, n):
    A = rng.integers(-4, 6, (m, n)).astype(float)
    x0 = rng.uniform(0, 3, n)
    b = A @ x0 - rng.uniform(0, 2, m)
    c = rng.uniform(0.5, 3, n)
    return c, A, b


def test_iteration_limit_raises():
    rng = np.random.default_rng(5)
    c, A, b = _random_lp(rng, 12, 15)
    with pytest.raises(NumericalError):
        solve_dense(c, A, b, np.full(12, math.inf), np.zeros(15), np.full(15, math.inf), max_iter=1)


def test_strong_duality(rng, backend):
    """min c.x, Ax >= b, x >= 0 against max b.y, A'y <= c, y >= 0."""
    for _ in range(40):
        m, n = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        c, A, b = _random_lp(rng, m, n)
        primal = solve_dense(c, A, b, np.full(m, math.inf), np.zeros(n), np.full(n, math.inf))
        dual = solve_dense(b, A.T, np.full(n, -math.inf), c, np.zeros(m), np.full(m, math.inf), sense="max")
        assert primal.status == dual.status == "optimal"
        assert primal.objective == pytest.approx(dual.objective, abs=1e-6)
        assert b @ primal.duals == pytest.approx(primal.objective, abs=1e-6)
        assert np.all(A @ primal.x >= b - 1e-7)


def test_matches_reference_solver(rng, backend):
    for _ in range(150):
        m, n = int(rng.integers(1, 8)), int(rng.integers(1, 8))
        A = rng.integers(-3, 4, (m, n)).astype(float)
        c = rng.integers(-3, 4, n).astype(float)
        lb = np.where(rng.random(n) < 0.3, -math.inf, rng.integers(-3, 1, n))
        ub = np.where(rng.random(n) < 0.3, math.inf, rng.integers(1, 5, n))
        lo = np.where(rng.random(m) < 0.5, -math.inf, rng.integers(-6, 3, m))
        hi = np.where(rng.random(m) < 0.5, math.inf, np.maximum(lo, rng.integers(-2, 7, m)))
        ours = solve_dense(c, A, lo, hi, lb, ub)
        ref = _reference(c, A, lo, hi, lb, ub)
        if ref is None:
            assert ours.status in ("infeasible", "unbounded")
        elif ref == "unbounded":
            assert ours.status == "unbounded"
        elif ref == "infeasible":
            assert ours.status == "infeasible"
        else:
            assert ours.status == "optimal" and ours.objective == pytest.approx(ref, abs=1e-6)
            assert np.all(A @ ours.x >= lo - 1e-7) and np.all(A @ ours.x <= hi + 1e-7)


def _reference(c, A, lo, hi, lb, ub):
    """Reference optimum, or a status string.

    HiGHS can report infeasible for some unbounded problems, so an
    infeasible verdict is re-checked with a zero objective.
    """
    fin_hi, fin_lo = np.isfinite(hi), np.isfinite(lo)
    A_ub = np.vstack([A[fin_hi], -A[fin_lo]])
    b_ub = np.concatenate([hi[fin_hi], -lo[fin_lo]])
    bounds = [(None if np.isinf(a) else a, None if np.isinf(b) else b) for a, b in zip(lb, ub)]

    def run(obj):
        return scipy.optimize.linprog(obj, A_ub=A_ub if len(b_ub) else None, b_ub=b_ub if len(b_ub) else None,
                                      bounds=bounds, method="highs")

    res = run(c)
    if res.status == 0:
        return res.fun
    if res.status == 3:
        return "unbounded"
    if res.status == 2:
        return "unbounded" if run(np.zeros_like(c)).status == 0 else "infeasible"
    return None


def test_deterministic():
    rng = np.random.default_rng(9)
    c, A, b = _random_lp(rng, 6, 6)
    args = (c, A, b, np.full(6, math.inf), np.zeros(6), np.full(6, math.inf))
    first, second = solve_dense(*args), solve_dense(*args)
    assert np.array_equal(first.x, second.x) and first.iterations == second.iterations
