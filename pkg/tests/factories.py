"""Random instance and cone factories shared by the tests."""
import numpy as np

from robvec.cones import PolyhedralCone
from robvec.conjugate import EpiPoint, GroundSet, VectorMap
from robvec.farkas import RobustInstance, Scenario


def random_cone_2d(rng):
    """Pointed cone in R^2 spanned by two generators less than pi apart."""
    a = rng.uniform(0, 2 * np.pi)
    w = rng.uniform(0.3, np.pi - 0.3)
    g1 = np.array([np.cos(a), np.sin(a)])
    g2 = np.array([np.cos(a + w), np.sin(a + w)])
    # inward normals: rotate each generator toward the other
    n1 = np.array([-g1[1], g1[0]])
    n2 = np.array([g2[1], -g2[0]])
    return PolyhedralCone(np.array([n1, n2]), np.array([g1, g2]))


def random_cone_3d(rng):
    """Simplicial cone in R^3 from three random generators."""
    while True:
        G = rng.normal(size=(3, 3))
        if abs(np.linalg.det(G)) > 0.2:
            break
    N = np.linalg.inv(G).T  # rows n_i with n_i . g_j = delta_ij
    return PolyhedralCone(N, G)


def random_instance(rng, n_ground=8, n_u=3):
    """n=1, m=2, p=1 instance with a nonempty feasible set."""
    K = random_cone_2d(rng)
    S = PolyhedralCone.orthant(1)
    X = np.sort(rng.choice(np.linspace(-2, 2, 41), size=n_ground, replace=False))
    ground = GroundSet(X)
    F = VectorMap(ground, rng.uniform(-2, 2, (n_ground, 2)), K)
    feasible = rng.integers(n_ground)
    scen = []
    for j in range(n_u):
        g = rng.uniform(-2, 2, n_ground)
        g[feasible] = -abs(g[feasible]) - 0.1
        scen.append(Scenario(f"u{j}", VectorMap(ground, g.reshape(-1, 1), S), np.array([float(j)])))
    k = K.interior_direction()
    return RobustInstance(ground=ground, F=F, scenarios=scen, S=S, k=k, name="random").validate()


def random_probe(rng, inst, box=3.0):
    return EpiPoint(rng.uniform(-box, box, (inst.m, inst.n)), rng.uniform(-box, box, inst.m))


def scalar_robust_lp(U=(1.0, 2.0), X=None):
    """min x over a grid of [0, 10] s.t. 1 - u x <= 0 for every u in U."""
    from robvec.bundled import ORTHANT_1, _doc
    from robvec.instances import parse

    X = np.linspace(0, 10, 101) if X is None else np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    doc = _doc("scalar_lp", X, X.reshape(-1, 1), [("t0", U, 1 - np.outer(U, X))], K=ORTHANT_1,
               S=ORTHANT_1, k=("1",), family=(np.ones((X.size, 1)), [-X.reshape(-1, 1)]),
               decl={"convex_regime": True, "concave_in_u": True, "compact_U": True})
    return parse(doc)
