"""Extended-valued vector maps on a finite ground set and conjugate epigraphs.

A map stores one row per ground point; a row of +inf marks a point outside
the domain.  -inf is never representable, so every map here is proper by
construction.
"""
from dataclasses import dataclass

import numpy as np

from .cones import in_neg_interior
from .order import FiniteValueSet, wmax, wsup_contains


@dataclass(frozen=True, eq=False)
class GroundSet:
    points: np.ndarray
    C: np.ndarray

    def __init__(self, points, C=None):
        X = np.asarray(points, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[0] == 0:
            raise ValueError("ground set is empty")
        if np.unique(X, axis=0).shape[0] != X.shape[0]:
            raise ValueError("ground set has duplicate points")
        C = np.ones(X.shape[0], dtype=bool) if C is None else np.asarray(C, dtype=bool)
        if C.shape != (X.shape[0],):
            raise ValueError("C mask must have one entry per ground point")
        if not C.any():
            raise ValueError("C is empty")
        X.setflags(write=False)
        C.setflags(write=False)
        object.__setattr__(self, "points", X)
        object.__setattr__(self, "C", C)

    @property
    def n(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class VectorMap:
    ground: GroundSet
    values: np.ndarray
    cone: object

    def __init__(self, ground, values, cone):
        V = np.asarray(values, dtype=float)
        if V.ndim == 1:
            V = V.reshape(-1, 1)
        if V.shape != (len(ground), cone.dim):
            raise ValueError(f"map table has shape {V.shape}, expected {(len(ground), cone.dim)}")
        if np.any(np.isnan(V)) or np.any(V == -np.inf):
            raise ValueError("map values must be finite or +inf")
        inf_rows = np.isinf(V)
        mixed = inf_rows.any(axis=1) & ~inf_rows.all(axis=1)
        if mixed.any():
            raise ValueError(f"row {int(np.flatnonzero(mixed)[0])} mixes finite and +inf entries")
        if inf_rows.all(axis=1).all():
            raise ValueError("map is improper: every value is +inf")
        V.setflags(write=False)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "values", V)
        object.__setattr__(self, "cone", cone)

    @property
    def dom(self):
        return np.isfinite(self.values[:, 0])

    def __add__(self, other):
        if other.ground is not self.ground or other.cone.dim != self.cone.dim:
            raise ValueError("maps live on different spaces")
        return VectorMap(self.ground, _plus(self.values, other.values), self.cone)


def _plus(a, b):
    out = a + b
    out[~(np.isfinite(a[:, 0]) & np.isfinite(b[:, 0]))] = np.inf
    return out


@dataclass(frozen=True, eq=False)
class EpiPoint:
    """(L, y) with L an m x n matrix acting as x -> L @ x."""

    L: np.ndarray
    y: np.ndarray

    def __init__(self, L, y):
        y = np.asarray(y, dtype=float).ravel()
        L = np.asarray(L, dtype=float)
        if L.ndim < 2:
            L = L.reshape(y.size, -1)
        if L.shape[0] != y.size:
            raise ValueError(f"operator has {L.shape[0]} rows but y has length {y.size}")
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "y", y)

    def __repr__(self):
        return f"EpiPoint(L={self.L.tolist()}, y={self.y.tolist()})"


def indicator(ground, D, cone):
    D = np.asarray(D, dtype=bool)
    if not D.any():
        raise ValueError("indicator of an empty set")
    V = np.zeros((len(ground), cone.dim))
    V[~D] = np.inf
    return VectorMap(ground, V, cone)


def epi_conjugate_contains(F, p):
    """(L, y) in epi F*  <=>  y - L x + F(x) is outside -int K for every x in dom F."""
    X = F.ground.points
    if p.L.shape != (F.cone.dim, X.shape[1]):
        raise ValueError(f"operator shape {p.L.shape} does not map R^{X.shape[1]} to R^{F.cone.dim}")
    dom = F.dom
    W = p.y - X[dom] @ p.L.T + F.values[dom]
    return not bool(in_neg_interior(F.cone, W).any())


def composite_T(F, C, T, Gu):
    """x -> F(x) + I_C(x) + T Gu(x), +inf if any term is."""
    T = np.atleast_2d(np.asarray(T, dtype=float))
    G = Gu.values
    finite = F.dom & np.asarray(C, dtype=bool) & Gu.dom
    V = np.full(F.values.shape, np.inf)
    V[finite] = F.values[finite] + G[finite] @ T.T
    return VectorMap(F.ground, V, F.cone)


def composite_k(F, C, zstar, Gu, k):
    """x -> F(x) + I_C(x) + (z* . Gu(x)) k."""
    T = np.outer(np.asarray(k, dtype=float), np.asarray(zstar, dtype=float))
    return composite_T(F, C, T, Gu)


def conjugate_values(F, L):
    dom = F.dom
    L = np.atleast_2d(np.asarray(L, dtype=float))
    return F.ground.points[dom] @ L.T - F.values[dom]


def conjugate_frontier(F, L):
    """wmax of {L x - F(x) : x in dom F} and a wsup membership oracle for that set."""
    M = FiniteValueSet(conjugate_values(F, L), F.cone)
    return wmax(M), lambda v: wsup_contains(M, v)
