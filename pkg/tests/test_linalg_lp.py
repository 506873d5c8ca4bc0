import numpy as np
import pytest
from scipy.optimize import linprog

from robvec.linalg_lp import (INFEASIBLE, OPTIMAL, UNBOUNDED, LPProblem, convex_hull_membership,
                              lp_solve)


def test_bounded_single_variable():
    sol = lp_solve(LPProblem([1.0], [[1.0]], ["<="], [3.0], lower=[0.0]))
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(3.0, abs=1e-12)


def test_unbounded_single_variable():
    assert lp_solve(LPProblem([1.0], lower=[0.0])).status == UNBOUNDED


def test_infeasible_single_variable():
    assert lp_solve(LPProblem([0.0], [[1.0]], ["<="], [-1.0], lower=[0.0])).status == INFEASIBLE


def test_from_rows_and_unicode_senses():
    p = LPProblem.from_rows([1.0, 1.0], [([1, 2], "≤", 4), ([3, 1], "<=", 6)], [(0, None), (0, None)])
    sol = lp_solve(p)
    assert sol.value == pytest.approx(2.8)
    assert sol.point == pytest.approx([1.6, 1.2])


def test_equality_and_free_variables():
    # max x - y  s.t.  x + y == 1,  -2 <= x <= 2,  y free, y >= -5 via row
    sol = lp_solve(LPProblem([1.0, -1.0], [[1, 1], [0, 1]], ["==", ">="], [1.0, -5.0],
                             lower=[-2, -np.inf], upper=[2, np.inf]))
    assert sol.value == pytest.approx(3.0)
    assert sol.point == pytest.approx([2.0, -1.0])


def test_bad_sense_rejected():
    with pytest.raises(ValueError):
        LPProblem([1.0], [[1.0]], ["<"], [1.0])


def _scipy_status(c, A, senses, b, lo, hi):
    senses = np.asarray(senses)
    ub, ge, eq = senses == "<=", senses == ">=", senses == "=="
    A_ub = np.vstack([A[ub], -A[ge]])
    b_ub = np.r_[b[ub], -b[ge]]
    bounds = [(None if np.isinf(l) else l, None if np.isinf(h) else h) for l, h in zip(lo, hi)]
    kw = dict(A_ub=A_ub if len(A_ub) else None, b_ub=b_ub if len(b_ub) else None,
              A_eq=A[eq] if eq.any() else None, b_eq=b[eq] if eq.any() else None, bounds=bounds)
    ref = linprog(-c, **kw)
    if ref.status == 0:
        return OPTIMAL, -ref.fun
    # HiGHS presolve may answer "infeasible" for unbounded problems; settle it
    feas = linprog(np.zeros_like(c), **kw)
    if feas.status != 0:
        return INFEASIBLE, None
    return UNBOUNDED, None


def test_agrees_with_reference_solver_on_random_lps():
    rng = np.random.default_rng(5)
    for _ in range(300):
        n, r = rng.integers(1, 8), rng.integers(1, 12)
        A = rng.normal(size=(r, n))
        b = rng.normal(size=r) * 3
        c = rng.normal(size=n)
        senses = list(rng.choice(["<=", ">=", "=="], size=r, p=[0.5, 0.35, 0.15]))
        lo = np.where(rng.random(n) < 0.6, -rng.random(n) * 5, -np.inf)
        hi = np.where(rng.random(n) < 0.6, rng.random(n) * 5, np.inf)
        sol = lp_solve(LPProblem(c, A, senses, b, lo, hi))
        status, value = _scipy_status(c, A, senses, b, lo, hi)
        assert sol.status == status
        if status == OPTIMAL:
            assert sol.value == pytest.approx(value, rel=1e-7, abs=1e-7)


def test_optimum_is_feasible_and_beats_random_feasible_points():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(2, 5))
        A = rng.normal(size=(6, n))
        x0 = rng.uniform(0, 1, n)
        b = A @ x0 + rng.uniform(0.1, 1.0, 6)  # x0 strictly feasible
        c = rng.normal(size=n)
        lo, hi = np.zeros(n), np.full(n, 3.0)
        sol = lp_solve(LPProblem(c, A, ["<="] * 6, b, lo, hi))
        assert sol.status == OPTIMAL
        assert np.all(A @ sol.point <= b + 1e-9)
        assert np.all(sol.point >= -1e-9) and np.all(sol.point <= 3 + 1e-9)
        pts = rng.uniform(0, 3, (2000, n))
        feas = pts[np.all(pts @ A.T <= b, axis=1)][:100]
        assert np.all(feas @ c <= sol.value + 1e-9)


def test_degenerate_problem_terminates():
    # many redundant constraints through the optimal vertex
    ang = np.linspace(0, np.pi / 2, 40)
    A = np.c_[np.cos(ang), np.sin(ang)]
    b = np.zeros(40)
    sol = lp_solve(LPProblem([1.0, 1.0], np.vstack([A, [[1, 0], [0, 1]]]), ["<="] * 42,
                             np.r_[b, 1, 1], lower=[-1, -1]))
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(0.0, abs=1e-9)


# ------------------------------------------------------------- hull membership

def test_hull_midpoint():
    ok, lam = convex_hull_membership([[0.0], [1.0]], [0.5])
    assert ok
    assert lam == pytest.approx([0.5, 0.5])


def test_hull_singleton():
    ok, lam = convex_hull_membership([[2.0, -1.0]], [2.0, -1.0])
    assert ok and lam == pytest.approx([1.0])


def _grid_distance(P, q, step=0.02):
    """Smallest max-norm distance from q to sum(lam_i p_i) over a lambda grid on the simplex."""
    P = np.asarray(P, dtype=float)
    if len(P) == 1:
        return float(np.abs(P[0] - q).max())
    ticks = np.arange(0, 1 + step / 2, step)
    mesh = np.stack(np.meshgrid(*[ticks] * (len(P) - 1), indexing="ij"), -1).reshape(-1, len(P) - 1)
    lam = np.c_[mesh, 1 - mesh.sum(axis=1)]
    lam = lam[lam[:, -1] >= -1e-12]
    return float(np.abs(lam @ P - q).max(axis=1).min())


# oracle result, frozen: the closest grid combination is (0.5, 0.5)
TRIANGLE_Q_DISTANCE = 0.4


def test_hull_triangle_outside():
    P = [[0, 0], [1, 0], [0, 1]]
    assert _grid_distance(P, np.array([0.9, 0.9])) == pytest.approx(TRIANGLE_Q_DISTANCE, abs=1e-9)
    ok, lam = convex_hull_membership(P, [0.9, 0.9])
    assert not ok and lam is None


def test_hull_agrees_with_grid_oracle():
    rng = np.random.default_rng(3)
    step = 0.02
    for _ in range(200):
        P = rng.integers(-3, 4, (int(rng.integers(1, 5)), 2)).astype(float)
        q = rng.integers(-6, 7, 2).astype(float) / 2
        ok, lam = convex_hull_membership(P, q)
        d = _grid_distance(P, q, step)
        if ok:
            assert lam.min() >= -1e-12 and lam.sum() == pytest.approx(1)
            assert lam @ P == pytest.approx(q, abs=1e-9)
            # rounding any lambda to the grid moves the point by at most this much
            assert d <= step * len(P) * np.abs(P).max() + 1e-12
        else:
            assert d > 0


def test_hull_tolerance_box():
    ok, _ = convex_hull_membership([[0.0], [1.0]], [1.0005], tol=1e-3)
    assert ok
    ok, _ = convex_hull_membership([[0.0], [1.0]], [1.002], tol=1e-3)
    assert not ok


def test_hull_dimension_mismatch():
    with pytest.raises(ValueError):
        convex_hull_membership([[0.0, 1.0]], [0.0])
