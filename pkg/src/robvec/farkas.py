"""Robust instances, qualifying-set membership and the four Farkas statements.

Notation used in docstrings: for a probe (L, y) and a ground point x write
``w(x) = y - L x + F(x)``.  The statements are

* alpha: w(x) is outside -int K for every x in A (the robust feasible set);
* beta:  some u and positive T keep w(x) + T G_u(x) outside -int K on C;
* gamma: some u and weakly positive T keep w(x) + T G_u(x) outside -T(S) - int K on C;
* delta: some u and z* in S+ keep w(x) + (z* . G_u(x)) k outside -int K on C.

Only delta is decided exactly (one LP per scenario); beta and gamma are
grid searches that report "not found" rather than "false".
"""
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .cones import (EPS_CLOSED, EPS_STRICT, check_direction, in_cone, in_neg_interior,
                    sample_dual_cone, threshold_alpha)
from .conjugate import EpiPoint, GroundSet, VectorMap
from .linalg_lp import LPNumericalError, LPProblem, lp_solve, OPTIMAL

TRUE = "True"
FALSE = "False"
CERTIFIED = "CertifiedTrue"
NOT_FOUND = "NotFoundUnderGrid"
UNKNOWN = "Unknown"

MU_BOUND = 1e6


class InstanceError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


@dataclass(eq=False)
class Scenario:
    label: str
    G: VectorMap
    u: np.ndarray = None


@dataclass(eq=False)
class AffineFamily:
    """G(x, u) = base(x) + sum_l u_l coeffs[l](x); concave (affine) in u."""

    base: np.ndarray
    coeffs: np.ndarray

    def evaluate(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        return self.base + np.tensordot(u, self.coeffs, axes=(0, 0))


@dataclass(eq=False)
class ConstraintBlock:
    """One scalar robust constraint g_t(x, v) <= 0 for all v in U_t."""

    label: str
    u_values: np.ndarray
    g: np.ndarray  # shape (|U_t|, N), +inf allowed


@dataclass(eq=False)
class Declarations:
    convex_regime: bool = False
    concave_in_u: bool = False
    compact_U: bool = True


@dataclass(eq=False)
class RobustInstance:
    ground: GroundSet
    F: VectorMap
    scenarios: list
    S: object
    k: np.ndarray
    name: str = "instance"
    family: AffineFamily = None
    blocks: list = None
    declarations: Declarations = field(default_factory=Declarations)
    dual_resolution: int = 4
    ladder: tuple = None
    operator_resolution: int = 2
    operator_dual_resolution: int = 4
    s_ladder: tuple = (1.0, 10.0, 100.0)
    tolerances: dict = field(default_factory=dict)
    probe_box: tuple = (-3.0, 3.0)
    seed: int = 0

    @property
    def K(self):
        return self.F.cone

    @property
    def n(self):
        return self.ground.n

    @property
    def m(self):
        return self.K.dim

    @property
    def p(self):
        return self.S.dim

    def scenario(self, label):
        for s in self.scenarios:
            if s.label == label:
                return s
        raise KeyError(label)

    def constraint_ok(self, s):
        """Mask of x with G_u(x) in -S (finite and every S-normal product <= 0)."""
        G = s.G.values
        ok = s.G.dom.copy()
        ok[ok] = np.all(G[ok] @ self.S.normals.T <= EPS_CLOSED, axis=1)
        return ok

    def feasible_mask(self):
        """A intersected with dom F."""
        mask = self.ground.C & self.F.dom
        for s in self.scenarios:
            mask &= self.constraint_ok(s)
        return mask

    def zgrid(self, resolution=None):
        return sample_dual_cone(self.S, resolution or self.dual_resolution, self.ladder)

    def validate(self):
        check_direction(self.K, self.k)
        if not self.scenarios:
            raise InstanceError("scenarios: at least one scenario is required")
        labels = [s.label for s in self.scenarios]
        if len(set(labels)) != len(labels):
            raise InstanceError("scenarios: duplicate labels")
        for s in self.scenarios:
            if s.G.ground is not self.ground or s.G.cone.dim != self.S.dim:
                raise InstanceError(f"scenarios[{s.label}]: table does not match ground set / S")
        if not self.feasible_mask().any():
            raise InstanceError("standing assumption violated: A ∩ dom F is empty "
                                "(no point of C is feasible for every scenario)")
        return self


def operator_grid(K, S, zgrid, resolution=2, weak=False, seed=0):
    """Rank-one operators c z*^T with z* from ``zgrid``.

    Positive grid: c runs over a simplex grid of K's generators, so c z*^T maps
    S into K.  Weak grid: c also runs over directions outside -int K, which is
    exactly the weak positivity condition for rank-one operators.
    """
    G = K.generators / np.abs(K.generators).max(axis=1, keepdims=True)
    cs = []
    q = G.shape[0]
    for combo in product(range(resolution + 1), repeat=q):
        if sum(combo) == resolution:
            cs.append(np.array(combo) @ G / resolution)
    if weak:
        m = K.dim
        if m == 2:
            ang = np.linspace(0, 2 * np.pi, 8 * resolution, endpoint=False)
            dirs = np.c_[np.cos(ang), np.sin(ang)]
        else:
            dirs = np.random.default_rng(seed).normal(size=(8 * resolution * m, m))
        cs.extend(d for d in dirs if not in_neg_interior(K, d))
    cs = np.unique(np.round(np.array(cs), 12), axis=0)
    ops = [np.zeros((K.dim, S.dim))]
    for z in zgrid:
        if np.abs(z).max() == 0:
            continue
        ops.extend(np.outer(c, z) for c in cs)
    return ops


def is_positive_operator(T, S, K, tol=EPS_CLOSED):
    """T maps every generator of S into K."""
    return bool(np.all(in_cone(K, S.generators @ np.asarray(T).T, tol)))


def is_weak_positive_operator(T, S, K):
    """T(S) misses -int K: the LP  mu >= 0,  a_i . T G mu <= -1  is infeasible."""
    TG = S.generators @ np.asarray(T).T  # rows T g_j
    A = K.normals @ TG.T
    sol = lp_solve(LPProblem(np.zeros(A.shape[1]), A, "<=", -np.ones(A.shape[0]),
                             lower=np.zeros(A.shape[1])))
    return not sol.optimal


def _residuals(inst, p, rows):
    X = inst.ground.points[rows]
    return p.y - X @ p.L.T + inst.F.values[rows]


def _check_probe(inst, p):
    if p.L.shape != (inst.m, inst.n) or p.y.shape != (inst.m,):
        raise ValueError(f"probe shapes {p.L.shape}, {p.y.shape} do not match (m, n) = {(inst.m, inst.n)}")


def statement_alpha(inst, p):
    _check_probe(inst, p)
    rows = inst.feasible_mask()
    return not bool(in_neg_interior(inst.K, _residuals(inst, p, rows)).any())


def composite_rows(inst, s):
    """x in C with F(x) and G_u(x) both finite."""
    return inst.ground.C & inst.F.dom & s.G.dom


@dataclass(frozen=True)
class DualCertificate:
    u: str
    zstar: np.ndarray


@dataclass(frozen=True)
class OperatorCertificate:
    u: str
    T: np.ndarray


def delta_holds(inst, p, cert):
    """Direct evaluation of delta for a given (u, z*)."""
    s = inst.scenario(cert.u)
    rows = composite_rows(inst, s)
    W = _residuals(inst, p, rows) + np.outer(s.G.values[rows] @ cert.zstar, inst.k)
    return not bool(in_neg_interior(inst.K, W).any())


def delta_thresholds(inst, p, s):
    rows = composite_rows(inst, s)
    return rows, threshold_alpha(inst.K, _residuals(inst, p, rows), inst.k)


def delta_lp(inst, p, s):
    """Smallest z* in S+ with z* . G_u(x) >= a_bar(x) on C; None if infeasible."""
    rows, abar = delta_thresholds(inst, p, s)
    pdim = inst.p
    Gs = inst.S.generators
    G = s.G.values[rows]
    A = np.vstack([Gs, G])
    b = np.r_[np.zeros(Gs.shape[0]), abar]
    sol = lp_solve(LPProblem(-Gs.sum(axis=0), A, ">=", b))
    if sol.status != OPTIMAL:
        return None
    return sol.point


def statement_delta_certify(inst, p):
    """First scenario admitting a multiplier, as a re-verified certificate, or None."""
    _check_probe(inst, p)
    for s in inst.scenarios:
        try:
            z = delta_lp(inst, p, s)
        except LPNumericalError as exc:
            raise NumericalFailure(f"delta LP for scenario {s.label}: {exc}") from exc
        if z is None:
            continue
        z = np.where(np.abs(z) < 1e-13, 0.0, z)
        cert = DualCertificate(s.label, z)
        if not delta_holds(inst, p, cert):
            raise NumericalFailure(f"delta certificate for scenario {s.label} fails re-verification")
        return cert
    return None


def beta_holds(inst, p, cert):
    s = inst.scenario(cert.u)
    rows = composite_rows(inst, s)
    W = _residuals(inst, p, rows) + s.G.values[rows] @ np.asarray(cert.T).T
    return not bool(in_neg_interior(inst.K, W).any())


def statement_beta_search(inst, p, Tgrid):
    _check_probe(inst, p)
    Ts = [T for T in Tgrid if is_positive_operator(T, inst.S, inst.K)]
    for s in inst.scenarios:
        for T in Ts:
            cert = OperatorCertificate(s.label, np.asarray(T, dtype=float))
            if beta_holds(inst, p, cert):
                return cert
    return None


def cone_image_membership(w, T, S, K, eps=EPS_STRICT, bound=MU_BOUND):
    """Classify w against -T(S) - int K: 'inside', 'outside' or 'unknown'.

    Inside means some mu >= 0 has a_i . (w + T G mu) < -eps for all i.  The
    margin LP  max tau  s.t.  a_i . (w + T G mu) + tau <= 0  is solved with
    mu <= ``bound`` and the returned mu is re-checked directly, so LP slack
    never decides a boundary case.  'unknown' means only larger mu could work.
    """
    TG = S.generators @ np.asarray(T).T
    A = K.normals @ TG.T
    aw = K.normals @ w
    q = A.shape[1]
    rows = np.hstack([A, np.ones((A.shape[0], 1))])
    c = np.r_[np.zeros(q), 1.0]

    def margin(upper):
        sol = lp_solve(LPProblem(c, rows, "<=", -aw, lower=np.r_[np.zeros(q), -np.inf],
                                 upper=np.r_[np.full(q, upper), 1.0]))
        if not sol.optimal:
            return -np.inf
        mu = np.clip(sol.point[:q], 0.0, upper)
        return -float(np.max(aw + A @ mu))

    if margin(bound) > eps:
        return "inside"
    return "unknown" if margin(np.inf) > eps else "outside"


def gamma_status(inst, p, cert):
    """'holds', 'fails' or 'unknown' for a given (u, T)."""
    s = inst.scenario(cert.u)
    rows = composite_rows(inst, s)
    W = _residuals(inst, p, rows) + s.G.values[rows] @ np.asarray(cert.T).T
    unknown = False
    for w in W:
        verdict = cone_image_membership(w, cert.T, inst.S, inst.K)
        if verdict == "inside":
            return "fails"
        unknown |= verdict == "unknown"
    return "unknown" if unknown else "holds"


def statement_gamma_search(inst, p, Tgrid):
    _check_probe(inst, p)
    Ts = [T for T in Tgrid if is_weak_positive_operator(T, inst.S, inst.K)]
    for s in inst.scenarios:
        for T in Ts:
            cert = OperatorCertificate(s.label, np.asarray(T, dtype=float))
            # cheap necessary condition first: gamma implies w + T G_u(x) outside -int K
            if not beta_holds(inst, p, cert):
                continue
            if gamma_status(inst, p, cert) == "holds":
                return cert
    return None


def _wsup_projection(q, T, S, K, k):
    """Slide q up along an interior direction until it leaves Q - int K, Q = -T(S).

    Returns the landing point, which lies on the weak supremum of Q, or None
    if the LP does not produce one.
    """
    TG = S.generators @ np.asarray(T).T
    A = K.normals
    # max t  s.t.  a_i . (q + t k + T G mu) <= 0,  mu >= 0
    rows = np.hstack([(A @ k)[:, None], A @ TG.T])
    nvar = rows.shape[1]
    c = np.zeros(nvar)
    c[0] = 1.0
    sol = lp_solve(LPProblem(c, rows, "<=", -(A @ q), lower=np.r_[-np.inf, np.zeros(nvar - 1)]))
    if not sol.optimal:
        return None
    return q + sol.value * k


def support_shifts(inst, s, T):
    """Sample points v of wsup(-T(S)) used to approximate the intersection in B."""
    T = np.asarray(T, dtype=float)
    cands = [np.zeros(inst.m)]
    ladder = inst.ladder or (1.0, 10.0, 100.0, 1000.0)
    for g in inst.S.generators:
        for t in ladder:
            cands.append(-t * (T @ g))
    rows = composite_rows(inst, s)
    cands.extend(s.G.values[rows] @ T.T)
    shifts = [np.zeros(inst.m)]
    for q in cands:
        v = _wsup_projection(q, T, inst.S, inst.K, inst.k)
        if v is not None:
            shifts.append(v)
    return np.unique(np.round(np.array(shifts), 12), axis=0)


def in_B_part(inst, p, s, T):
    """(L, y - v) lies in epi(F + I_C + T G_u)* for every sampled v."""
    rows = composite_rows(inst, s)
    W = _residuals(inst, p, rows) + s.G.values[rows] @ np.asarray(T).T
    for v in support_shifts(inst, s, T):
        if in_neg_interior(inst.K, W - v).any():
            return False
    return True


def qualifying_set_contains(inst, which, p, Tgrid=None):
    if which == "Ak":
        return statement_delta_certify(inst, p) is not None
    if Tgrid is None:
        Tgrid = operator_grid(inst.K, inst.S, inst.zgrid(inst.operator_dual_resolution), inst.operator_resolution,
                              weak=(which == "Bgrid"))
    if which == "Agrid":
        return statement_beta_search(inst, p, Tgrid) is not None
    if which == "Bgrid":
        Ts = [T for T in Tgrid if is_weak_positive_operator(T, inst.S, inst.K)]
        return any(in_B_part(inst, p, s, T) for s in inst.scenarios for T in Ts)
    raise ValueError(f"unknown qualifying set {which!r}")


@dataclass
class CloudPoint:
    point: EpiPoint
    coords: np.ndarray
    certificate: DualCertificate


def _in_dual_cone(S, z):
    return bool(np.all(S.generators @ z >= -EPS_CLOSED))


def _cloud_point(inst, p, s, xstar, z, rows, h):
    """Lowest point above (L + k x*^T, y) certified by (u, z)."""
    X = inst.ground.points[rows]
    r = float(np.max(h + X @ xstar - s.G.values[rows] @ z))
    k = inst.k
    pt = EpiPoint(p.L + np.outer(k, xstar), p.y + r * k)
    cert = DualCertificate(s.label, z)
    if not delta_holds(inst, pt, cert):
        raise NumericalFailure(f"cloud point for scenario {s.label} fails re-verification")
    return CloudPoint(pt, np.r_[xstar, r], cert)


def ak_section_cloud(inst, p, xstar_grid=None, bound=1e4):
    """Points of A_k in the section of p along k, each with its (u, z*) certificate.

    Two sources: for each scenario and each x* on ``xstar_grid`` the lowest
    certified r (an LP in (r, z*)); and the support points of the convex
    combination LP

        min sum_u rho_u  s.t.  rho_u >= theta_u h_u(x) + xi_u . x - zeta_u . G_u(x),
                               sum theta_u = 1,  sum xi_u = 0,  zeta_u in S+,

    whose scaled solutions (xi_u, rho_u, zeta_u) / theta_u are A_k points
    that combine to the section coordinate x* = 0 at height sum rho_u.
    """
    _check_probe(inst, p)
    n, q = inst.n, inst.p
    Gs = inst.S.generators
    out = []
    data = []
    for s in inst.scenarios:
        rows = np.flatnonzero(composite_rows(inst, s))
        h = threshold_alpha(inst.K, _residuals(inst, p, rows), inst.k)
        data.append((s, rows, h))
    if xstar_grid is not None:
        for s, rows, h in data:
            X, G = inst.ground.points[rows], s.G.values[rows]
            for xs in np.atleast_2d(xstar_grid):
                # max -r  s.t.  r + z . G(x) >= h(x) + x* . x,  z in S+
                A = np.vstack([np.c_[np.ones(rows.size), G], np.c_[np.zeros((Gs.shape[0], 1)), Gs]])
                b = np.r_[h + X @ xs, np.zeros(Gs.shape[0])]
                sol = lp_solve(LPProblem(np.r_[-1.0, np.zeros(q)], A, ">=", b,
                                         upper=np.r_[np.inf, np.full(q, bound)]))
                if sol.optimal:
                    z = sol.point[1:]
                    if _in_dual_cone(inst.S, z):
                        out.append(_cloud_point(inst, p, s, xs, z, rows, h))
    # combination LP; variables per scenario: theta, xi (n), zeta (q), rho
    w = 1 + n + q + 1
    nv = w * len(data)
    A, senses, b = [], [], []
    lower, upper = np.zeros(nv), np.full(nv, np.inf)
    for j, (s, rows, h) in enumerate(data):
        o = j * w
        lower[o + 1:o + 1 + n] = -bound
        upper[o + 1:o + 1 + n] = bound
        upper[o + 1 + n:o + 1 + n + q] = bound
        lower[o + w - 1] = -np.inf
        X, G = inst.ground.points[rows], s.G.values[rows]
        for i in range(rows.size):
            row = np.zeros(nv)
            row[o] = h[i]
            row[o + 1:o + 1 + n] = X[i]
            row[o + 1 + n:o + 1 + n + q] = -G[i]
            row[o + w - 1] = -1.0
            A.append(row), senses.append("<="), b.append(0.0)
        for g in Gs:
            row = np.zeros(nv)
            row[o + 1 + n:o + 1 + n + q] = g
            A.append(row), senses.append(">="), b.append(0.0)
    row = np.zeros(nv)
    row[0::w] = 1.0
    A.append(row), senses.append("=="), b.append(1.0)
    for d in range(n):
        row = np.zeros(nv)
        row[1 + d::w] = 1.0
        A.append(row), senses.append("=="), b.append(0.0)
    c = np.zeros(nv)
    c[w - 1::w] = -1.0
    try:
        sol = lp_solve(LPProblem(c, np.array(A), senses, b, lower, upper))
    except LPNumericalError as exc:
        raise NumericalFailure(f"combination LP: {exc}") from exc
    if sol.optimal:
        for j, (s, rows, h) in enumerate(data):
            v = sol.point[j * w:(j + 1) * w]
            if v[0] <= 1e-9:
                continue
            z = v[1 + n:1 + n + q] / v[0]
            if _in_dual_cone(inst.S, z):
                out.append(_cloud_point(inst, p, s, v[1:1 + n] / v[0], z, rows, h))
    return out


def lift_cloud(inst, cloud, height):
    """Copies of cloud points raised by ``height`` along k; still in A_k."""
    up = np.zeros(inst.n + 1)
    up[-1] = height
    return [CloudPoint(EpiPoint(cp.point.L, cp.point.y + height * inst.k), cp.coords + up,
                       cp.certificate) for cp in cloud]


@dataclass
class FarkasVerdict:
    probe: EpiPoint
    alpha: str
    beta: str
    gamma: str
    delta: str
    delta_certificate: DualCertificate = None
    beta_certificate: OperatorCertificate = None
    gamma_certificate: OperatorCertificate = None


def farkas_equivalence_report(inst, probes, Tgrid=None):
    """Evaluate all four statements per probe.

    The operator grid is augmented with the rank-one lift k z*^T of each
    probe's delta certificate, so the implications delta => beta => gamma are
    exercised on every certified probe.
    """
    if Tgrid is None:
        Tgrid = operator_grid(inst.K, inst.S, inst.zgrid(inst.operator_dual_resolution), inst.operator_resolution)
    rows = []
    for p in probes:
        a = statement_alpha(inst, p)
        dc = statement_delta_certify(inst, p)
        grid = list(Tgrid)
        if dc is not None:
            grid.insert(0, np.outer(inst.k, dc.zstar))
        bc = statement_beta_search(inst, p, grid)
        gc = statement_gamma_search(inst, p, grid)
        rows.append(FarkasVerdict(
            p, TRUE if a else FALSE,
            CERTIFIED if bc else NOT_FOUND,
            CERTIFIED if gc else NOT_FOUND,
            CERTIFIED if dc else FALSE,
            dc, bc, gc))
    return rows


def summarize_farkas(rows):
    alpha_true = [r.alpha == TRUE for r in rows]
    delta_true = [r.delta == CERTIFIED for r in rows]
    return {
        "probes": len(rows),
        "alpha_true": sum(alpha_true),
        "delta_certified": sum(delta_true),
        "beta_certified": sum(r.beta == CERTIFIED for r in rows),
        "gamma_certified": sum(r.gamma == CERTIFIED for r in rows),
        "alpha_iff_delta": all(a == d for a, d in zip(alpha_true, delta_true)),
        "delta_implies_alpha": all(a or not d for a, d in zip(alpha_true, delta_true)),
    }


# ----------------------------------------------------------------- hypotheses

@dataclass
class H1Verdict:
    passed: bool
    witnesses: list
    counter_pair: tuple = None


def check_H1(inst, pairs, witness_grid=None):
    """Uniform S+-concavity on sampled pairs ((z1, u1), (z2, u2)).

    Each pair needs a (z, u) with z1.G_u1(x) + z2.G_u2(x) <= z.G_u(x) on C ∩ dom F.
    Declared concave scalar families get the constructed witness
    lambda = lambda1 + lambda2, u = (lambda1 u1 + lambda2 u2) / lambda.
    """
    rows = inst.ground.C & inst.F.dom
    witnesses = []
    use_family = (inst.declarations.concave_in_u and inst.family is not None and inst.p == 1)
    if witness_grid is None:
        witness_grid = [(z, s.label) for s in inst.scenarios for z in inst.zgrid()]
    for (z1, u1), (z2, u2) in pairs:
        s1, s2 = inst.scenario(u1), inst.scenario(u2)
        lhs = (s1.G.values[rows] @ np.atleast_1d(z1)) + (s2.G.values[rows] @ np.atleast_1d(z2))
        if use_family:
            l1, l2 = float(np.atleast_1d(z1)[0]), float(np.atleast_1d(z2)[0])
            lam = l1 + l2
            if lam == 0:
                wit = (np.zeros(1), s1.u)
                rhs = np.zeros(rows.sum())
            else:
                u = (l1 * s1.u + l2 * s2.u) / lam
                wit = (np.array([lam]), u)
                rhs = inst.family.evaluate(u)[rows] @ np.array([lam])
            if np.all(lhs <= rhs + 1e-9 * (1 + np.abs(rhs))):
                witnesses.append(wit)
                continue
            return H1Verdict(False, witnesses, ((z1, u1), (z2, u2)))
        found = None
        for z, u in witness_grid:
            rhs = inst.scenario(u).G.values[rows] @ np.atleast_1d(z)
            if np.all(np.isfinite(rhs)) and np.all(lhs <= rhs + 1e-9 * (1 + np.abs(rhs))):
                found = (np.atleast_1d(z), u)
                break
        if found is None:
            return H1Verdict(False, witnesses, ((z1, u1), (z2, u2)))
        witnesses.append(found)
    return H1Verdict(True, witnesses)


@dataclass
class SlaterVerdict:
    passed: bool
    witnesses: dict
    failures: list


def check_slater(inst):
    """Per scenario, a point of C ∩ dom F where G_u is strictly inside -S."""
    base = inst.ground.C & inst.F.dom
    witnesses, failures = {}, []
    for s in inst.scenarios:
        ok = base & s.G.dom
        ok[ok] = in_neg_interior(inst.S, s.G.values[ok])
        idx = np.flatnonzero(ok)
        if idx.size:
            witnesses[s.label] = inst.ground.points[idx[-1]]
        else:
            failures.append(s.label)
    return SlaterVerdict(not failures, witnesses, failures)


def check_slater_scalar(inst, variant=1):
    """Slater variants for scalar block structures.

    1: every selection (u_t) has x with g_t(x, u_t) < 0 for all t;
    2: every t has x with sup_v g_t(x, v) < 0;
    3: every selection has x with sup_t g_t(x, u_t) < 0 (same scan as 1).
    """
    if not inst.blocks:
        raise ValueError("instance has no scalar constraint blocks")
    base = inst.ground.C & inst.F.dom
    X = inst.ground.points
    witnesses, failures = {}, []
    if variant == 2:
        for b in inst.blocks:
            agg = b.g.max(axis=0)
            idx = np.flatnonzero(base & (agg < -EPS_STRICT))
            if idx.size:
                witnesses[b.label] = X[idx[-1]]
            else:
                failures.append(b.label)
        return SlaterVerdict(not failures, witnesses, failures)
    for sel in product(*[range(len(b.u_values)) for b in inst.blocks]):
        agg = np.max([b.g[i] for b, i in zip(inst.blocks, sel)], axis=0)
        idx = np.flatnonzero(base & (agg < -EPS_STRICT))
        key = ",".join(f"{b.label}:{i}" for b, i in zip(inst.blocks, sel))
        if idx.size:
            witnesses[key] = X[idx[-1]]
        else:
            failures.append(key)
    return SlaterVerdict(not failures, witnesses, failures)
