"""Sections of operator-vector space along a direction k.

Two epigraph points (L1, y1), (L2, y2) share a section when
L2 - L1 = k x*^T and y2 - y1 = r k for some (x*, r).  Sectional hulls take
ordinary convex hulls inside each section, in the (x*, r) coordinates.
"""
from dataclasses import dataclass, field

import numpy as np

from .conjugate import EpiPoint
from .linalg_lp import convex_hull_membership

COSET_TOL = 1e-8
CLOSURE_EPS = 1e-6


@dataclass
class SectionCoset:
    representative: EpiPoint
    members: np.ndarray
    direction: np.ndarray
    indices: list = field(default_factory=list)

    def point(self, coords):
        """Rebuild the epigraph point at section coordinates (x*, r)."""
        coords = np.asarray(coords, dtype=float)
        k = self.direction
        return EpiPoint(self.representative.L + np.outer(k, coords[:-1]),
                        self.representative.y + coords[-1] * k)


def section_coordinates(base, p, k, tol=COSET_TOL):
    """(x*, r) with p = base + (k x*^T, r k), or None if p is in another section."""
    k = np.asarray(k, dtype=float)
    i0 = int(np.argmax(np.abs(k)))
    if abs(k[i0]) == 0:
        raise ValueError("direction must be nonzero")
    dL = p.L - base.L
    dy = p.y - base.y
    xstar = dL[i0] / k[i0]
    r = dy[i0] / k[i0]
    if np.abs(dL - np.outer(k, xstar)).max(initial=0.0) > tol:
        return None
    if np.abs(dy - r * k).max(initial=0.0) > tol:
        return None
    return np.r_[xstar, r]


def coset_decompose(points, k, tol=COSET_TOL):
    k = np.asarray(k, dtype=float)
    cosets = []
    for idx, p in enumerate(points):
        for c in cosets:
            coords = section_coordinates(c.representative, p, k, tol)
            if coords is not None:
                c.indices.append(idx)
                if not np.any(np.all(np.abs(c.members - coords) <= tol, axis=1)):
                    c.members = np.vstack([c.members, coords])
                break
        else:
            n = p.L.shape[1]
            cosets.append(SectionCoset(p, np.zeros((1, n + 1)), k, [idx]))
    return cosets


def _coset_of(points, k, q, tol):
    coords = [section_coordinates(q, p, k, tol) for p in points]
    return np.array([c for c in coords if c is not None])


def sectional_hull_contains(points, k, q, tol=COSET_TOL):
    return sectional_closure_contains(points, k, q, tol, eps=0.0)


def sectional_closure_contains(points, k, q, tol=COSET_TOL, eps=CLOSURE_EPS):
    """Is q within eps (max norm, section coordinates) of the hull of its section?"""
    members = _coset_of(points, k, q, tol)
    if members.size == 0:
        return False
    inside, _ = convex_hull_membership(members, np.zeros(members.shape[1]), tol=max(eps, 0.0))
    return inside


@dataclass
class SamplingPlan:
    """Seeded random coset pairs inside a box, plus explicit caller pairs.

    Random pairs are drawn by rejection: a base point accepted by the oracle,
    then a section offset whose endpoint is also accepted.
    """

    n: int
    m: int
    n_pairs: int = 1000
    seed: int = 0
    box: float = 3.0
    offset: float = 2.0
    max_tries: int = 50
    pairs: list = field(default_factory=list)
    lambdas: tuple = (0.5,)


@dataclass
class SectionalVerdict:
    passed: bool
    witness: tuple = None
    pairs_checked: int = 0


def is_sectionally_convex(oracle, k, plan):
    k = np.asarray(k, dtype=float)
    checked = 0

    def check(a1, a2):
        for lam in plan.lambdas:
            mid = EpiPoint(lam * a1.L + (1 - lam) * a2.L, lam * a1.y + (1 - lam) * a2.y)
            if not oracle(mid):
                return mid
        return None

    for a1, a2 in plan.pairs:
        if section_coordinates(a1, a2, k) is None:
            raise ValueError("seeded pair does not share a section")
        if oracle(a1) and oracle(a2):
            checked += 1
            mid = check(a1, a2)
            if mid is not None:
                return SectionalVerdict(False, (a1, a2, mid), checked)

    rng = np.random.default_rng(plan.seed)
    for _ in range(plan.n_pairs):
        a1 = None
        for _ in range(plan.max_tries):
            cand = EpiPoint(rng.uniform(-plan.box, plan.box, (plan.m, plan.n)),
                            rng.uniform(-plan.box, plan.box, plan.m))
            if oracle(cand):
                a1 = cand
                break
        if a1 is None:
            continue
        for _ in range(plan.max_tries):
            xs = rng.uniform(-plan.offset, plan.offset, plan.n)
            r = rng.uniform(-plan.offset, plan.offset)
            a2 = EpiPoint(a1.L + np.outer(k, xs), a1.y + r * k)
            if oracle(a2):
                checked += 1
                mid = check(a1, a2)
                if mid is not None:
                    return SectionalVerdict(False, (a1, a2, mid), checked)
                break
    return SectionalVerdict(True, None, checked)


def zero_map_counterexample(ground_points=None):
    """Section of epi F* for F = 0 on R into (R^2, R^2_+) along k = (1, -1).

    The pair y = (0, -1) and y = (-1, 0) at L = 0 lies in epi F*, their
    midpoint (-0.5, -0.5) does not: the section is not convex.  Returns the
    map, the direction and the seeded pair for :func:`is_sectionally_convex`.
    """
    from .cones import PolyhedralCone
    from .conjugate import GroundSet, VectorMap

    X = np.linspace(-5, 5, 101) if ground_points is None else ground_points
    K = PolyhedralCone.orthant(2)
    ground = GroundSet(X)
    F = VectorMap(ground, np.zeros((len(ground), 2)), K)
    k = np.array([1.0, -1.0])
    L = np.zeros((2, 1))
    a1 = EpiPoint(L, [0.0, -1.0])
    a2 = EpiPoint(L, [-1.0, 0.0])
    return F, k, (a1, a2)
