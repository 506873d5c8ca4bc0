"""Weak suprema and infima of finite sets under a polyhedral cone order.

For finite M the closure of M - int K is M - K, so membership in wsup M is
two finite clauses: some y in M sits weakly above v, and no y in M sits
strictly above v.
"""
from dataclasses import dataclass

import numpy as np

from .cones import EPS_CLOSED, EPS_STRICT

BELOW = "Below"
FRONTIER = "Frontier"
ABOVE = "Above"

_CHUNK = 256
_SMALL = 64  # below this many points the broadcast beats sorting


@dataclass(frozen=True, eq=False)
class FiniteValueSet:
    points: np.ndarray
    cone: object

    def __init__(self, points, cone):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if P.shape[0] == 0 or P.size == 0:
            raise ValueError("value set must be nonempty")
        if P.shape[1] != cone.dim:
            raise ValueError(f"points live in R^{P.shape[1]} but the cone in R^{cone.dim}")
        if not np.all(np.isfinite(P)):
            raise ValueError("value set points must be finite")
        P.setflags(write=False)
        object.__setattr__(self, "points", P)
        object.__setattr__(self, "cone", cone)

    def __neg__(self):
        return FiniteValueSet(-self.points, self.cone)

    def __len__(self):
        return self.points.shape[0]


def exists_above(Zq, Zs, strict, tol):
    """For each query row q: is there s with s > q + tol (strict) or s >= q - tol?

    Works in normal coordinates (Z = Y @ A.T), where the cone order is the
    componentwise order.
    """
    Zq = np.atleast_2d(Zq)
    Zs = np.atleast_2d(Zs)
    r = Zq.shape[1]
    if Zs.shape[0] == 0:
        return np.zeros(Zq.shape[0], dtype=bool)
    if r == 1:
        top = Zs[:, 0].max()
        return top > Zq[:, 0] + tol if strict else top >= Zq[:, 0] - tol
    if r == 2 and Zs.shape[0] > _SMALL:
        order = np.argsort(-Zs[:, 0], kind="stable")
        first = Zs[order, 0]
        pref = np.maximum.accumulate(Zs[order, 1])
        neg = -first  # ascending
        if strict:
            count = np.searchsorted(neg, -(Zq[:, 0] + tol), side="left")
        else:
            count = np.searchsorted(neg, -(Zq[:, 0] - tol), side="right")
        out = np.zeros(Zq.shape[0], dtype=bool)
        has = count > 0
        best = pref[np.maximum(count - 1, 0)]
        out[has] = best[has] > Zq[has, 1] + tol if strict else best[has] >= Zq[has, 1] - tol
        return out
    out = np.empty(Zq.shape[0], dtype=bool)
    for start in range(0, Zq.shape[0], _CHUNK):
        block = Zq[start:start + _CHUNK]
        diff = Zs[None, :, :] - block[:, None, :]
        ok = np.all(diff > tol, axis=2) if strict else np.all(diff >= -tol, axis=2)
        out[start:start + _CHUNK] = ok.any(axis=1)
    return out


def _coords(M, v):
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != M.cone.dim:
        raise ValueError(f"vector of length {v.shape[-1]} does not live in R^{M.cone.dim}")
    A = M.cone.normals
    return np.atleast_2d(v) @ A.T, M.points @ A.T


def strictly_below(M, v):
    """v in M - int K: some point of M is strictly above v."""
    Zq, Zs = _coords(M, v)
    res = exists_above(Zq, Zs, True, EPS_STRICT)
    return res if np.ndim(v) > 1 else bool(res[0])


def weakly_below(M, v):
    """v in M - K."""
    Zq, Zs = _coords(M, v)
    res = exists_above(Zq, Zs, False, EPS_CLOSED)
    return res if np.ndim(v) > 1 else bool(res[0])


def wsup_contains(M, v):
    both = weakly_below(M, v) & ~strictly_below(M, v)
    return both if np.ndim(v) > 1 else bool(both)


def winf_contains(M, v):
    return wsup_contains(-M, -np.asarray(v, dtype=float))


def wmax(M):
    """Points of M not strictly dominated by another point of M."""
    return M.points[~strictly_below(M, M.points)]


def wmin(M):
    return -wmax(-M)


def wmax_mask(M):
    return ~strictly_below(M, M.points)


def wmin_mask(M):
    return wmax_mask(-M)


def decomposition_class(M, v):
    if strictly_below(M, v):
        return BELOW
    if wsup_contains(M, v):
        return FRONTIER
    return ABOVE


def above_witness(M, v, k=None):
    """Constructive check of v in wsup M + int K.

    Slides v down along k until it first touches M - K; the touching point w
    is returned when it lies on the frontier and v - w is interior.  Returns
    None when no such w exists.
    """
    K = M.cone
    k = K.interior_direction() if k is None else np.asarray(k, dtype=float)
    A = K.normals
    v = np.asarray(v, dtype=float)
    ak = A @ k
    # smallest t with  y - (v - t k) in K,  per y
    t_y = np.max((A @ v - M.points @ A.T) / ak, axis=1)
    t = t_y.min()
    if t <= 0:
        return None
    w = v - t * k
    if not wsup_contains(M, w):
        return None
    if not np.all(A @ (v - w) > EPS_STRICT):
        return None
    return w
