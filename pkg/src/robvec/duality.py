"""Robust primal problems, Lagrangian-type duals and duality verification.

Dual frontiers are represented by attained points.  For one multiplier
(z* or T) and scenario u the inner problem is the finite value set
P = {F(x) - L x + T G_u(x) : x in C}; its attained weak minima are the
candidate dual points.  A candidate d is kept on the dual frontier when it
lies in P_j + K for every multiplier j of the grid: for finite P_j this is
exactly the condition that no point of winf P_j sits strictly above d.
"""
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cones import EPS_CLOSED, EPS_STRICT
from .farkas import (NumericalFailure, composite_rows, is_positive_operator,
                     is_weak_positive_operator, operator_grid)
from .linalg_lp import LPNumericalError, LPProblem, lp_solve
from .order import FiniteValueSet, exists_above, winf_contains, wmin_mask

RVD, RVDW, RVDK = "RVD", "RVDw", "RVDk"
RCD1, RCD2, RCD3, RCD4 = "RCD1", "RCD2", "RCD3", "RCD4"
SCALAR_VARIANTS = (RCD1, RCD2, RCD3, RCD4)
VARIANTS = (RVD, RVDW, RVDK) + SCALAR_VARIANTS

GOLDEN_STEPS = 64
VECTOR_TOL = 1e-3
SCALAR_TOL = 1e-6


def _as_operator(inst, L):
    if L is None:
        return np.zeros((inst.m, inst.n))
    L = np.asarray(L, dtype=float)
    return L.reshape(inst.m, inst.n)


@dataclass
class PrimalReport:
    L: np.ndarray
    indices: np.ndarray
    values: np.ndarray
    wmin_indices: np.ndarray
    cone: object
    possibly_unbounded: bool = False

    @property
    def wmin_points(self):
        return self.values[np.searchsorted(self.indices, self.wmin_indices)]

    @property
    def value_set(self):
        return FiniteValueSet(self.values, self.cone)

    def winf_contains(self, v):
        return winf_contains(self.value_set, v)


def solve_primal(inst, L=None):
    """Enumerate A ∩ dom F and the weak minima of F - L over it."""
    L = _as_operator(inst, L)
    mask = inst.feasible_mask()
    idx = np.flatnonzero(mask)
    X = inst.ground.points[idx]
    vals = inst.F.values[idx] - X @ L.T
    wm = wmin_mask(FiniteValueSet(vals, inst.K))
    # minimisers pinned to the bounding box of the ground set hint that the
    # continuous problem would run off to -infinity
    lo, hi = inst.ground.points.min(axis=0), inst.ground.points.max(axis=0)
    on_box = np.any((X[wm] == lo) | (X[wm] == hi), axis=1)
    unbounded = bool(np.any(lo < hi) and on_box.all())
    return PrimalReport(L, idx, vals, idx[wm], inst.K, unbounded)


@dataclass
class DualReport:
    variant: str
    values: np.ndarray
    certificates: list
    wmax_mask: np.ndarray
    metadata: dict = field(default_factory=dict)
    heuristic: bool = False
    discarded: list = field(default_factory=list)

    @property
    def wmax_points(self):
        return self.values[self.wmax_mask]


@dataclass(frozen=True)
class InnerCertificate:
    """Which inner problem produced a dual point, and at which ground point."""

    u: str
    multiplier: np.ndarray
    x_index: int
    s: np.ndarray = None


def _inner_values(base, g, T):
    # elementwise products and a fixed-order sum keep results independent of
    # how many rows are evaluated at once (a reconstructed certificate must
    # reproduce the solver's value bit for bit)
    return base + (g[:, None, :] * T[None, :, :]).sum(axis=2)


def _inner_problem(inst, L, s, T, s_samples=None, same_point_shift=False):
    """Values and (x index, s) labels of one inner problem.

    With ``same_point_shift`` each x feasible for this scenario also gets the
    shift s = -G_u(x), whose inner value is the plain objective at x.
    """
    rows = np.flatnonzero(composite_rows(inst, s))
    X = inst.ground.points[rows]
    base = inst.F.values[rows] - X @ L.T
    g = s.G.values[rows]
    vals = _inner_values(base, g, T)
    if s_samples is None:
        return vals, rows, None
    svec = np.repeat(np.asarray(s_samples), rows.size, axis=0)
    xs = np.tile(rows, len(s_samples))
    allv = _inner_values(base[np.tile(np.arange(rows.size), len(s_samples))],
                         g[np.tile(np.arange(rows.size), len(s_samples))] + svec, T)
    if same_point_shift:
        ok = inst.constraint_ok(s)[rows]
        allv = np.vstack([allv, _inner_values(base[ok], g[ok] - g[ok], T)])
        xs = np.r_[xs, rows[ok]]
        svec = np.vstack([svec, -g[ok]])
    return allv, xs, svec


def _frontier(K, cand_vals, inner_sets):
    """Mask of candidates lying in P_j + K for every inner set P_j."""
    A = K.normals
    keep = np.ones(cand_vals.shape[0], dtype=bool)
    Zd = cand_vals @ A.T
    for P in inner_sets:
        if not keep.any():
            break
        live = np.flatnonzero(keep)
        ok = exists_above(-Zd[live], -(P @ A.T), False, _scaled_tol(cand_vals[live], P))
        keep[live[~ok]] = False
    return keep


def _scaled_tol(a, b):
    scale = max(1.0, float(np.abs(a).max(initial=0.0)), float(np.abs(b).max(initial=0.0)))
    return EPS_CLOSED * min(scale, 1e6)


def _solve_dual(inst, L, operators, variant, labels, s_samples=None, meta=None,
                same_point_shift=False):
    L = _as_operator(inst, L)
    values, certs, inner_sets = [], [], []
    for s in inst.scenarios:
        for T, mult in zip(operators, labels):
            vals, xs, svec = _inner_problem(inst, L, s, T, s_samples, same_point_shift)
            if vals.shape[0] == 0:
                continue
            inner_sets.append(vals)
            mask = wmin_mask(FiniteValueSet(vals, inst.K))
            for i in np.flatnonzero(mask):
                values.append(vals[i])
                sv = None if svec is None else svec[i]
                certs.append(InnerCertificate(s.label, mult, int(xs[i]), sv))
    values = np.array(values).reshape(-1, inst.m)
    keep = _frontier(inst.K, values, inner_sets)
    md = {"scenarios": len(inst.scenarios), "multipliers": len(operators),
          "attained": int(values.shape[0])}
    md.update(meta or {})
    return DualReport(variant, values, certs, keep, md)


def solve_dual_k(inst, L, zgrid):
    zgrid = np.atleast_2d(np.asarray(zgrid, dtype=float))
    if zgrid.size == 0 or not np.any(np.all(zgrid == 0, axis=1)):
        raise ValueError("dual grid must contain 0")
    ops = [np.outer(inst.k, z) for z in zgrid]
    return _solve_dual(inst, L, ops, RVDK, list(zgrid), meta={"grid": "z*", "size": len(zgrid)})


def solve_dual_T(inst, L, Tgrid):
    ops = [np.asarray(T, dtype=float) for T in Tgrid if is_positive_operator(T, inst.S, inst.K)]
    if not ops:
        raise ValueError("operator grid has no positive operator")
    return _solve_dual(inst, L, ops, RVD, ops, meta={"grid": "T", "size": len(ops),
                                                     "filtered_out": len(Tgrid) - len(ops)})


def default_s_samples(inst, ladder=None):
    """0 and ladder multiples of each generator of S."""
    ladder = inst.s_ladder if ladder is None else ladder
    samples = [np.zeros(inst.p)]
    for g in inst.S.generators:
        samples.extend(t * g for t in ladder)
    arr = np.array(samples)
    _, first = np.unique(np.round(arr, 12), axis=0, return_index=True)
    return arr[np.sort(first)]


def solve_dual_weak(inst, L, Tgrid, s_samples=None):
    """Weak dual with the inner infimum over s in S truncated to samples.

    Default samples are 0, ladder multiples of the S generators, and per
    feasible x the shift s = -G_u(x); the last keeps every primal objective
    value inside each inner set, which a plain truncation could lose.
    Explicit ``s_samples`` are used exactly as given.
    """
    default = s_samples is None
    s_samples = default_s_samples(inst) if default else \
        np.atleast_2d(np.asarray(s_samples, dtype=float))
    ops, discarded = [], []
    for T in Tgrid:
        if is_weak_positive_operator(T, inst.S, inst.K):
            ops.append(np.asarray(T, dtype=float))
        else:
            discarded.append((np.asarray(T, dtype=float),
                              "maps part of S into -int K; inner infimum unbounded below"))
    rep = _solve_dual(inst, L, ops, RVDW, ops, s_samples=s_samples,
                      meta={"grid": "T", "size": len(ops), "s_samples": len(s_samples),
                            "feasible_shifts": default},
                      same_point_shift=default)
    rep.heuristic = True
    rep.discarded = discarded
    return rep


def reconstruct(inst, L, cert, variant=RVDK):
    """Recompute the inner value named by a certificate."""
    L = _as_operator(inst, L)
    s = inst.scenario(cert.u)
    T = np.outer(inst.k, cert.multiplier) if variant == RVDK else np.asarray(cert.multiplier)
    rows = np.array([cert.x_index])
    base = inst.F.values[rows] - inst.ground.points[rows] @ L.T
    g = s.G.values[rows]
    if cert.s is not None:
        g = g + np.asarray(cert.s)[None, :]
    return _inner_values(base, g, T)[0]


@dataclass
class DualityReport:
    primal: PrimalReport
    dual: DualReport
    weak_violations: list
    pairs_checked: int
    winf_flags: np.ndarray
    gaps: np.ndarray
    tol: float

    @property
    def max_gap(self):
        return float(self.gaps.max()) if self.gaps.size else 0.0

    @property
    def exact_direction(self):
        return bool(np.all(self.winf_flags))

    @property
    def strong(self):
        return not self.weak_violations and self.exact_direction and self.max_gap <= self.tol


def directional_gaps(K, k, P, D):
    """For each row p of P: min over rows d of D of the shift t making d + t k >= p."""
    A = K.normals
    ak = A @ k
    ZP, ZD = P @ A.T, D @ A.T
    out = np.full(P.shape[0], np.inf)
    step = max(1, 2 ** 22 // max(1, ZD.shape[0] * ZD.shape[1]))
    for start in range(0, P.shape[0], step):
        blk = ZP[start:start + step]
        for ds in range(0, ZD.shape[0], 2 ** 16):
            t = np.max((blk[:, None, :] - ZD[None, ds:ds + 2 ** 16, :]) / ak, axis=2)
            out[start:start + step] = np.minimum(out[start:start + step], t.min(axis=1))
    return out


def verify_duality(primal, dual, tol=VECTOR_TOL, k=None):
    K = primal.cone
    k = K.interior_direction() if k is None else np.asarray(k, dtype=float)
    A = K.normals
    D, P = dual.values, primal.values
    viol = exists_above(-(D @ A.T), -(P @ A.T), True, EPS_STRICT)
    violations = [int(i) for i in np.flatnonzero(viol)]
    M = primal.value_set
    flags = np.array([winf_contains(M, d) for d in dual.wmax_points], dtype=bool)
    gaps = directional_gaps(K, k, primal.wmin_points, D) if D.shape[0] else \
        np.full(primal.wmin_indices.size, np.inf)
    return DualityReport(primal, dual, violations, int(D.shape[0] * P.shape[0]), flags, gaps, tol)


def run_variant(inst, L, variant, zgrid=None, Tgrid=None, s_samples=None):
    if variant in SCALAR_VARIANTS:
        return solve_scalar_duals(inst, L, variant).dual
    if variant == RVDK:
        return solve_dual_k(inst, L, inst.zgrid() if zgrid is None else zgrid)
    if zgrid is None:
        zgrid = inst.zgrid(inst.operator_dual_resolution)
    if variant == RVD:
        return solve_dual_T(inst, L, Tgrid if Tgrid is not None else
                            operator_grid(inst.K, inst.S, zgrid, inst.operator_resolution))
    if variant == RVDW:
        return solve_dual_weak(inst, L, Tgrid if Tgrid is not None else
                               operator_grid(inst.K, inst.S, zgrid, inst.operator_resolution, weak=True),
                               s_samples)
    raise ValueError(f"unknown dual variant {variant!r}")


def stable_sweep(inst, V, variant=RVDK, grids=None, tol=None):
    grids = grids or {}
    reports = []
    for L in V:
        if variant in SCALAR_VARIANTS:
            rep = solve_scalar_duals(inst, L, variant)
            if tol is not None:
                rep.tol = tol
        else:
            primal = solve_primal(inst, L)
            dual = run_variant(inst, L, variant, grids.get("zgrid"), grids.get("Tgrid"),
                               grids.get("s_samples"))
            rep = verify_duality(primal, dual, VECTOR_TOL if tol is None else tol, inst.k)
        reports.append(rep)
    return reports


# ------------------------------------------------------------- scalar duals

def _scalar_rows(inst, xstar):
    if inst.m != 1:
        raise ValueError("scalar duals need a one-dimensional objective")
    if not inst.blocks:
        raise ValueError("scalar duals need the constraint block structure")
    xstar = np.asarray(xstar, dtype=float).reshape(-1)
    rows = inst.ground.C & inst.F.dom
    obj = inst.F.values[:, 0] - inst.ground.points @ xstar
    return rows, obj


def _lagrangian_lp(obj, G):
    """max theta s.t. theta <= obj(x) + sum_j lam_j G[j](x) for all x, lam >= 0.

    ``G`` has one row per multiplier; columns with a +inf entry are dropped.
    """
    keep = np.all(np.isfinite(G), axis=0)
    obj, G = obj[keep], G[:, keep]
    q = G.shape[0]
    A = np.hstack([np.ones((obj.size, 1)), -G.T])
    c = np.zeros(q + 1)
    c[0] = 1.0
    sol = lp_solve(LPProblem(c, A, "<=", obj, lower=np.r_[-np.inf, np.zeros(q)]))
    if sol.status != "Optimal":
        return -np.inf if sol.status == "Infeasible" else np.inf, np.zeros(q)
    lam = np.where(np.abs(sol.point[1:]) < 1e-12, 0.0, sol.point[1:])
    # the certified value is recomputed from the multipliers, not read off the LP
    return float(np.min(obj + lam @ G)), lam


def _inner_min(obj, H, lam):
    keep = np.isfinite(H)
    return float(np.min(obj[keep] + lam * H[keep])) if keep.any() else np.inf


def _maximize_concave(phi, ladder):
    """Ladder scan then golden-section refinement of a concave function on [0, inf)."""
    grid = np.r_[0.0, np.asarray(ladder, dtype=float)]
    vals = np.array([phi(t) for t in grid])
    i = int(np.argmax(vals))
    flags = []
    d = np.diff(vals) / np.diff(grid)
    if np.any(np.diff(d) > 1e-7 * (1 + np.abs(d[1:]))):
        flags.append("nonconcave")
    if i == grid.size - 1 and grid.size > 1 and vals[-1] > vals[-2] + 1e-12:
        flags.append("bracketing_failed")
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    best_t, best_v = grid[i], vals[i]
    g = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c1, c2 = b - g * (b - a), a + g * (b - a)
    f1, f2 = phi(c1), phi(c2)
    for _ in range(GOLDEN_STEPS):
        if f1 >= f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - g * (b - a)
            f1 = phi(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + g * (b - a)
            f2 = phi(c2)
    for t, v in ((c1, f1), (c2, f2)):
        if v > best_v:
            best_t, best_v = t, v
    return best_t, best_v, flags


def solve_scalar_duals(inst, xstar, variant=RCD1, tol=SCALAR_TOL):
    xstar = np.asarray(xstar, dtype=float).reshape(-1)
    rows, obj = _scalar_rows(inst, xstar)
    primal = solve_primal(inst, xstar.reshape(1, -1))
    obj_r = obj[rows]
    blocks = inst.blocks
    ladder = inst.ladder or (1.0, 10.0, 100.0, 1000.0)
    best = (-np.inf, None)
    flags = []
    try:
        if variant == RCD1:
            for sel in product(*[range(len(b.u_values)) for b in blocks]):
                G = np.array([b.g[i][rows] for b, i in zip(blocks, sel)])
                v, lam = _lagrangian_lp(obj_r, G)
                if v > best[0]:
                    best = (v, {"selection": [b.label + ":" + str(i) for b, i in zip(blocks, sel)],
                                "lambda": lam.tolist()})
        elif variant == RCD4:
            G = np.array([b.g[i][rows] for b in blocks for i in range(len(b.u_values))])
            names = [f"{b.label}:{i}" for b in blocks for i in range(len(b.u_values))]
            v, lam = _lagrangian_lp(obj_r, G)
            support = {nm: float(l) for nm, l in zip(names, lam) if l != 0}
            best = (v, {"pairs": support})
        elif variant == RCD2:
            for b in blocks:
                H = b.g[:, rows].max(axis=0)
                t, v, fl = _maximize_concave(lambda lam: _inner_min(obj_r, H, lam), ladder)
                flags += fl
                if v > best[0]:
                    best = (v, {"t": b.label, "lambda": t})
        elif variant == RCD3:
            for sel in product(*[range(len(b.u_values)) for b in blocks]):
                H = np.max([b.g[i][rows] for b, i in zip(blocks, sel)], axis=0)
                t, v, fl = _maximize_concave(lambda lam: _inner_min(obj_r, H, lam), ladder)
                flags += fl
                if v > best[0]:
                    best = (v, {"selection": [b.label + ":" + str(i) for b, i in zip(blocks, sel)],
                                "lambda": t})
        else:
            raise ValueError(f"unknown scalar dual {variant!r}")
    except LPNumericalError as exc:
        raise NumericalFailure(f"{variant}: {exc}") from exc
    dual = DualReport(variant, np.array([[best[0]]]), [best[1]], np.array([True]),
                      {"flags": sorted(set(flags))})
    return verify_duality(primal, dual, tol, np.ones(1))
