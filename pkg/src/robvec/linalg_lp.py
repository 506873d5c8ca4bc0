"""Dense two-phase simplex with Bland's rule, plus convex hull membership.

Problems are stated as ``maximize c @ x`` subject to rows ``a @ x (<=|>=|==) b``
and optional per-variable bounds.  Everything downstream that claims a
certificate goes through :func:`lp_solve`, so the solver favours determinism
over speed.
"""
from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 32
MAX_PIVOTS = 100_000

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"

_SENSES = {"<=": "<=", "≤": "<=", ">=": ">=", "≥": ">=", "==": "==", "=": "=="}


class LPNumericalError(RuntimeError):
    """The simplex finished but its answer does not survive re-checking."""


@dataclass(frozen=True, eq=False)
class LPProblem:
    objective: np.ndarray
    A: np.ndarray
    senses: tuple
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __init__(self, objective, A=None, senses=(), b=None, lower=None, upper=None):
        c = np.asarray(objective, dtype=float).ravel()
        n = c.size
        A = np.zeros((0, n)) if A is None else np.asarray(A, dtype=float)
        if A.ndim == 1:
            A = A.reshape(1, -1)
        b = np.zeros(0) if b is None else np.asarray(b, dtype=float).ravel()
        if isinstance(senses, str):
            senses = (senses,) * A.shape[0]
        try:
            senses = tuple(_SENSES[s] for s in senses)
        except KeyError as exc:
            raise ValueError(f"unknown constraint relation {exc.args[0]!r}") from None
        if A.shape[1] != n:
            raise ValueError(f"constraint width {A.shape[1]} != objective length {n}")
        if not (A.shape[0] == b.size == len(senses)):
            raise ValueError("constraint rows, relations and right-hand sides disagree in count")
        lower = np.full(n, -np.inf) if lower is None else _bound(lower, n, -np.inf)
        upper = np.full(n, np.inf) if upper is None else _bound(upper, n, np.inf)
        if np.any(lower > upper):
            raise ValueError("variable bound with lower > upper")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("LP data must be finite")
        for name, val in zip(("objective", "A", "senses", "b", "lower", "upper"),
                             (c, A, senses, b, lower, upper)):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)

    @classmethod
    def from_rows(cls, objective, constraints, bounds=None):
        """Build from ``[(row, relation, rhs), ...]`` and ``[(lo, hi), ...]``."""
        c = np.asarray(objective, dtype=float).ravel()
        rows = [np.asarray(r, dtype=float).ravel() for r, _, _ in constraints]
        A = np.array(rows) if rows else np.zeros((0, c.size))
        lower = upper = None
        if bounds is not None:
            lower = [-np.inf if lo is None else lo for lo, _ in bounds]
            upper = [np.inf if hi is None else hi for _, hi in bounds]
        return cls(c, A, [s for _, s, _ in constraints], [r for _, _, r in constraints],
                   lower, upper)

    @property
    def n(self):
        return self.objective.size


def _bound(v, n, fill):
    vals = [v] * n if v is None or np.isscalar(v) else list(v)
    if len(vals) != n:
        raise ValueError(f"expected {n} bounds, got {len(vals)}")
    return np.array([fill if x is None else float(x) for x in vals])


@dataclass(frozen=True)
class LPSolution:
    status: str
    point: np.ndarray = None
    value: float = None

    @property
    def optimal(self):
        return self.status == OPTIMAL


def _standard_form(p):
    """Rewrite bounds so every variable is >= 0.  Returns (c, A, b, senses, M, offset)."""
    n = p.n
    cols, offset = [], np.zeros(n)
    extra_rows = []
    for j in range(n):
        lo, hi = p.lower[j], p.upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    M = np.zeros((n, len(cols)))
    for col, (j, s) in enumerate(cols):
        M[j, col] = s
    A = p.A @ M
    b = p.b - p.A @ offset
    senses = list(p.senses)
    if extra_rows:
        E = np.zeros((len(extra_rows), len(cols)))
        for r, (col, ub) in enumerate(extra_rows):
            E[r, col] = 1.0
        A = np.vstack([A, E])
        b = np.concatenate([b, [ub for _, ub in extra_rows]])
        senses += ["<="] * len(extra_rows)
    return p.objective @ M, A, b, senses, M, offset


class _Tableau:
    def __init__(self, A, b, senses):
        r, n = A.shape
        A = A.copy()
        b = b.copy()
        senses = list(senses)
        for i in range(r):
            if b[i] < 0:
                A[i] *= -1
                b[i] *= -1
                senses[i] = {"<=": ">=", ">=": "<=", "==": "=="}[senses[i]]
        n_slack = sum(s != "==" for s in senses)
        n_art = sum(s != "<=" for s in senses)
        self.n_struct = n
        self.n_slack = n_slack
        width = n + n_slack + n_art
        T = np.zeros((r, width + 1))
        T[:, :n] = A
        T[:, -1] = b
        basis = np.empty(r, dtype=int)
        si, ai = n, n + n_slack
        for i, s in enumerate(senses):
            if s == "<=":
                T[i, si] = 1.0
                basis[i] = si
                si += 1
            elif s == ">=":
                T[i, si] = -1.0
                si += 1
                T[i, ai] = 1.0
                basis[i] = ai
                ai += 1
            else:
                T[i, ai] = 1.0
                basis[i] = ai
                ai += 1
        self.T = T
        self.basis = basis
        self.n_art_start = n + n_slack
        self.width = width
        self.std = T[:, :-1].copy()
        self.rhs = b

    def pivot(self, row, col):
        T = self.T
        T[row] /= T[row, col]
        factor = T[:, col].copy()
        factor[row] = 0.0
        T -= np.outer(factor, T[row])
        self.obj -= self.obj[col] * T[row]
        self.basis[row] = col

    def set_objective(self, c):
        """c has one entry per tableau column; builds the reduced-cost row."""
        self.c = c
        self.obj = np.concatenate([c, [0.0]]) - c[self.basis] @ self.T

    def refactor(self):
        """Rebuild the tableau from the original rows and the current basis."""
        B = self.std[:, self.basis]
        try:
            body = np.linalg.solve(B, np.c_[self.std, self.rhs])
        except np.linalg.LinAlgError:
            return
        if np.all(np.isfinite(body)):
            self.T = body
            self.T[:, -1] = np.maximum(self.T[:, -1], 0.0)
            self.set_objective(self.c)

    def run(self, allowed):
        """Bland's rule iterations. Returns False if the objective is unbounded."""
        for it in range(MAX_PIVOTS):
            if it and it % REFACTOR_EVERY == 0:
                self.refactor()
            red = self.obj[:-1]
            cand = np.flatnonzero((red > OPT_TOL) & allowed)
            if cand.size == 0:
                return True
            col = cand[0]
            column = self.T[:, col]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return False
            # rhs entries that drifted below zero count as degenerate
            ratios = np.maximum(self.T[rows, -1], 0.0) / column[rows]
            best = ratios.min()
            tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            # among ties, skip pivots much smaller than the largest one
            tied = tied[column[tied] >= 1e-3 * column[tied].max()]
            row = tied[np.argmin(self.basis[tied])]
            self.pivot(row, col)
        raise LPNumericalError("simplex exceeded the pivot limit")


def lp_solve(p):
    """Solve ``p`` and return an :class:`LPSolution`.

    Raises LPNumericalError if an optimal basis fails the final feasibility
    re-check; callers treat that as a numerical failure, never as a verdict.
    """
    c_std, A, b, senses, M, offset = _standard_form(p)
    tab = _Tableau(A, b, senses)
    width = tab.width
    art = np.arange(width) >= tab.n_art_start
    scale = 1.0 + (np.abs(b).max() if b.size else 0.0)

    if art.any():
        tab.set_objective(np.where(art, -1.0, 0.0))
        tab.run(np.ones(width, dtype=bool))
        infeas = tab.T[art[tab.basis], -1].sum()
        if infeas > FEAS_TOL * scale:
            return LPSolution(INFEASIBLE)
        # drive remaining (zero-valued) artificials out of the basis
        keep = np.ones(tab.T.shape[0], dtype=bool)
        for i in range(tab.T.shape[0]):
            if tab.basis[i] >= tab.n_art_start:
                row = tab.T[i, :tab.n_art_start]
                j = np.argmax(np.abs(row)) if row.size else 0
                if row.size and abs(row[j]) > 1e-9:
                    tab.pivot(i, j)
                else:
                    keep[i] = False
        tab.T = tab.T[keep]
        tab.basis = tab.basis[keep]
        tab.std = tab.std[keep]
        tab.rhs = tab.rhs[keep]

    n_real = tab.n_art_start
    tab.T = np.hstack([tab.T[:, :n_real], tab.T[:, -1:]])
    tab.std = tab.std[:, :n_real]
    c_full = np.zeros(n_real)
    c_full[:c_std.size] = c_std
    tab.set_objective(c_full)
    if not tab.run(np.ones(n_real, dtype=bool)):
        return LPSolution(UNBOUNDED)

    x_std = np.zeros(n_real)
    x_std[tab.basis] = tab.T[:, -1]
    if tab.basis.size:
        try:
            refined = np.linalg.solve(tab.std[:, tab.basis], tab.rhs)
            if np.all(np.isfinite(refined)) and np.all(refined > -1e-7 * scale):
                x_std[:] = 0.0
                x_std[tab.basis] = refined
        except np.linalg.LinAlgError:
            pass
    x_std = np.maximum(x_std, 0.0)
    x = offset + M @ x_std[:c_std.size]
    _recheck(p, x)
    return LPSolution(OPTIMAL, x, float(p.objective @ x))


def _recheck(p, x):
    lhs = p.A @ x
    slack = np.abs(p.A) @ np.abs(x) + np.abs(p.b) + 1.0
    tol = 1e-7 * slack
    bad = np.zeros(lhs.size, dtype=bool)
    for i, s in enumerate(p.senses):
        if s == "<=":
            bad[i] = lhs[i] > p.b[i] + tol[i]
        elif s == ">=":
            bad[i] = lhs[i] < p.b[i] - tol[i]
        else:
            bad[i] = abs(lhs[i] - p.b[i]) > tol[i]
    if bad.any() or np.any(x < p.lower - 1e-7 * (1 + np.abs(p.lower))) \
            or np.any(x > p.upper + 1e-7 * (1 + np.abs(p.upper))):
        raise LPNumericalError("optimal basis violates constraints on re-check")


def convex_hull_membership(points, q, tol=0.0):
    """Is ``q`` a convex combination of ``points`` (up to ``tol`` per coordinate)?

    Returns ``(True, weights)`` on success and ``(False, None)`` otherwise.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.asarray(q, dtype=float).ravel()
    if P.size == 0:
        raise ValueError("convex hull of an empty point list")
    if P.shape[1] != q.size:
        raise ValueError(f"point dimension {P.shape[1]} != query dimension {q.size}")
    N = P.shape[0]
    rows = [np.ones(N)]
    senses = ["=="]
    rhs = [1.0]
    if tol > 0:
        rows += list(P.T) + list(P.T)
        senses += ["<="] * q.size + [">="] * q.size
        rhs += list(q + tol) + list(q - tol)
    else:
        rows += list(P.T)
        senses += ["=="] * q.size
        rhs += list(q)
    sol = lp_solve(LPProblem(np.zeros(N), np.array(rows), senses, rhs, lower=np.zeros(N)))
    if not sol.optimal:
        return False, None
    return True, sol.point
