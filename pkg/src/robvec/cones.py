"""Polyhedral cones given by both halfspace normals and generator rays."""
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .linalg_lp import LPProblem, lp_solve

EPS_STRICT = 1e-9
EPS_CLOSED = 1e-9
DEFAULT_LADDER = (1.0, 10.0, 100.0, 1000.0)


class ConeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """K = {y : a_i . y >= 0} = cone(g_j).  Rows of ``normals`` are a_i."""

    normals: np.ndarray
    generators: np.ndarray

    def __init__(self, normals, generators):
        A = np.atleast_2d(np.asarray(normals, dtype=float))
        G = np.atleast_2d(np.asarray(generators, dtype=float))
        if A.shape[1] != G.shape[1]:
            raise ConeError(f"normals live in R^{A.shape[1]} but generators in R^{G.shape[1]}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(G))):
            raise ConeError("cone data must be finite")
        A.setflags(write=False)
        G.setflags(write=False)
        object.__setattr__(self, "normals", A)
        object.__setattr__(self, "generators", G)

    @property
    def dim(self):
        return self.normals.shape[1]

    @classmethod
    def orthant(cls, m):
        return cls(np.eye(m), np.eye(m))

    def interior_direction(self):
        """Sum of the generators; interior whenever the cone is solid."""
        return self.generators.sum(axis=0)

    def __repr__(self):
        return f"PolyhedralCone(normals={self.normals.tolist()}, generators={self.generators.tolist()})"


def _products(K, y):
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != K.dim:
        raise ValueError(f"vector of length {y.shape[-1]} does not live in R^{K.dim}")
    return y @ K.normals.T


def in_cone(K, y, tol=EPS_CLOSED):
    return np.all(_products(K, y) >= -tol, axis=-1)


def in_interior(K, y):
    return np.all(_products(K, y) > EPS_STRICT, axis=-1)


def in_neg_interior(K, y):
    """y in -int K, i.e. a_i . y < -eps for every normal.  Vectorised over rows."""
    return np.all(_products(K, y) < -EPS_STRICT, axis=-1)


def check_direction(K, k):
    k = np.asarray(k, dtype=float)
    ak = _products(K, k)
    if not np.all(ak > EPS_STRICT):
        raise ConeError(f"direction {k.tolist()} is not interior to the cone (a.k = {ak.tolist()})")
    return k


def check_dual_vector(S, z, tol=EPS_CLOSED):
    """z must pair nonnegatively with every generator of S."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != S.dim:
        raise ValueError(f"dual vector of length {z.shape[-1]} does not live in R^{S.dim}")
    if np.any(S.generators @ z < -tol):
        raise ConeError(f"{z.tolist()} is not in the dual cone")
    return z


def threshold_alpha(K, y, k):
    """The scalar a_bar with  y + a k in -int K  <=>  a < a_bar.

    a_bar = min_i (-a_i . y) / (a_i . k).  ``y`` may be a stack of vectors.
    """
    k = check_direction(K, k)
    ak = K.normals @ k
    return np.min(-_products(K, y) / ak, axis=-1)


def sample_dual_cone(S, resolution, ladder=None):
    """Deterministic grid on the dual cone of S, zero vector first.

    Directions are simplex-grid combinations (``resolution`` subdivisions) of the
    max-norm-normalised normals of S, which generate the dual cone.  Each
    direction is scaled by every magnitude in ``ladder``; by default the ladder
    is 1, 10, ..., 10**(resolution - 1).
    """
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    A = S.normals / np.abs(S.normals).max(axis=1, keepdims=True)
    q = A.shape[0]
    if ladder is None:
        ladder = 10.0 ** np.arange(resolution)
    weights = []
    for combo in combinations_with_replacement(range(q), resolution):
        w = np.bincount(combo, minlength=q) / resolution
        weights.append(w)
    dirs = np.array(weights) @ A
    dirs = dirs[np.abs(dirs).max(axis=1) > 1e-12]
    _, first = np.unique(np.round(dirs, 12), axis=0, return_index=True)
    dirs = dirs[np.sort(first)]
    out = [np.zeros(S.dim)]
    for mag in ladder:
        out.extend(mag * d for d in dirs)
    return np.array(out)


def validate_cone(K, name="cone", samples=64, seed=0):
    """Check the two representations agree.  Raises ConeError naming the problem."""
    A, G = K.normals, K.generators
    if not np.any(np.abs(A) > 0):
        raise ConeError(f"{name}: every normal is zero, so the cone is the whole space")
    prod = A @ G.T
    bad = np.argwhere(prod < -EPS_CLOSED)
    if bad.size:
        i, j = bad[0]
        raise ConeError(f"{name}: generator {j} {G[j].tolist()} violates normal {i} "
                        f"{A[i].tolist()} (product {prod[i, j]:.3g})")
    m = K.dim
    # max t  s.t.  a_i.y >= t,  -1 <= y <= 1,  t <= 1
    rows = np.hstack([A, -np.ones((A.shape[0], 1))])
    sol = lp_solve(LPProblem(np.r_[np.zeros(m), 1.0], rows, ">=", np.zeros(A.shape[0]),
                             lower=np.r_[-np.ones(m), -np.inf], upper=np.r_[np.ones(m), 1.0]))
    if not sol.optimal or sol.value <= EPS_STRICT:
        raise ConeError(f"{name}: interior is empty")
    y0 = sol.point[:m]
    rng = np.random.default_rng(seed)
    probes = [y0]
    for d in rng.normal(size=(samples, m)):
        ad = A @ d
        neg = ad < -1e-12
        # walk from the interior point to the boundary along d
        t = np.min((A @ y0)[neg] / -ad[neg]) if neg.any() else 1.0
        probes.append(y0 + t * d)
    for y in probes:
        if not _generated(G, y):
            raise ConeError(f"{name}: point {np.round(y, 6).tolist()} satisfies every normal "
                            "but is not a nonnegative combination of the generators")
    return K


def _generated(G, y, tol=1e-7):
    s = G.shape[0]
    scale = 1.0 + np.abs(y).max()
    sol = lp_solve(LPProblem(np.zeros(s), np.vstack([G.T, G.T]),
                             ["<="] * len(y) + [">="] * len(y),
                             np.r_[y + tol * scale, y - tol * scale], lower=np.zeros(s)))
    return sol.optimal
