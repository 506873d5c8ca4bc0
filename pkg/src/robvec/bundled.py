"""Builders for the bundled instance files.

Run ``python3 -m robvec.bundled`` to regenerate ``robvec/data/*.json``.
"""
import json
import sys
from pathlib import Path

import numpy as np

from .instances import BUNDLED, fmt, table_doc

ORTHANT_1 = {"normals": [["1"]], "generators": [["1"]]}
ORTHANT_2 = {"normals": [["1", "0"], ["0", "1"]], "generators": [["1", "0"], ["0", "1"]]}


def _grid(lo, hi, num):
    # rounded so the decimal strings stay short and exact grid points survive
    return np.round(np.linspace(lo, hi, num), 12)


def _doc(name, X, F, blocks, K=ORTHANT_2, S=ORTHANT_1, k=("1", "1"), family=None,
         decl=None, grids=None, probe_box=(-3, 3), C=None):
    X = np.asarray(X, dtype=float).reshape(-1, 1)
    F = np.asarray(F, dtype=float)
    doc = {
        "name": name,
        "dims": {"n": 1, "m": F.shape[1], "p": len(blocks)},
        "cones": {"K": K, "S": S},
        "direction": list(k),
        "ground": {"points": [[fmt(x)] for x in X[:, 0]]},
        "F": table_doc(F),
        "blocks": [{"label": lab, "u": [[fmt(v)] for v in u],
                    "g": [[fmt(v) for v in row] for row in g]} for lab, u, g in blocks],
        "declarations": decl or {"convex_regime": True, "concave_in_u": False, "compact_U": True},
        "grids": grids or {"dual_resolution": 6, "operator_resolution": 2},
        "probe_box": [fmt(v) for v in probe_box],
        "seed": 0,
    }
    if C is not None:
        doc["ground"]["C"] = [bool(c) for c in C]
    if family is not None:
        base, coeffs = family
        doc["family"] = {"kind": "affine_in_u", "base": table_doc(base),
                         "coeffs": [table_doc(c) for c in coeffs]}
    return doc


def robust_lp():
    X = _grid(0, 10, 101)
    U = _grid(1, 2, 11)
    g = 1 - np.outer(U, X)
    return _doc("robust_lp", X, X.reshape(-1, 1), [("t0", U, g)], K=ORTHANT_1, S=ORTHANT_1,
                k=("1",), family=(np.ones((X.size, 1)), [-X.reshape(-1, 1)]),
                decl={"convex_regime": True, "concave_in_u": True, "compact_U": True},
                grids={"dual_resolution": 8, "operator_resolution": 2})


def slater_vector():
    X = _grid(-1, 3, 201)
    U = _grid(1, 1.5, 6)
    # the active multiplier at the boundary point x = 1 is exactly z = 1
    F = np.c_[X ** 2, (X - 1.5) ** 2]
    g = X[None, :] - U[:, None]
    return _doc("slater_vector", X, F, [("t0", U, g)],
                family=(X.reshape(-1, 1), [-np.ones((X.size, 1))]),
                decl={"convex_regime": True, "concave_in_u": True, "compact_U": True},
                grids={"dual_resolution": 20, "operator_resolution": 2})


def convex_1():
    X = _grid(-1, 3, 81)
    U = np.array([1.0, 1.25, 1.5])
    return _doc("convex_1", X, np.c_[X ** 2, (X - 2) ** 2], [("t0", U, X[None, :] - U[:, None])],
                family=(X.reshape(-1, 1), [-np.ones((X.size, 1))]),
                decl={"convex_regime": True, "concave_in_u": True, "compact_U": True})


def convex_2():
    X = _grid(-2, 2, 81)
    U = np.array([1.0, 2.0])
    return _doc("convex_2", X, np.c_[np.abs(X), (X - 1) ** 2],
                [("t0", U, np.outer(U, X) - 1)],
                family=(-np.ones((X.size, 1)), [X.reshape(-1, 1)]),
                decl={"convex_regime": True, "concave_in_u": True, "compact_U": True})


def convex_3():
    X = _grid(-1, 2, 61)
    U = np.array([0.0, 0.5])
    K = {"normals": [["1", "0"], ["1", "1"]], "generators": [["1", "-1"], ["0", "1"]]}
    return _doc("convex_3", X, np.c_[np.exp(X), -X], [("t0", U, U[:, None] - X[None, :])],
                K=K, k=("1", "0"), family=(-X.reshape(-1, 1), [np.ones((X.size, 1))]),
                decl={"convex_regime": True, "concave_in_u": True, "compact_U": True})


def convex_4():
    X = _grid(-1, 2, 61)
    U = np.array([0.0, 0.5])
    g = (X[None, :] - U[:, None]) ** 2 - 1
    return _doc("convex_4", X, np.c_[X ** 2 + X, (X - 1) ** 2], [("t0", U, g)])


def convex_5():
    X = _grid(-2, 2, 81)
    U = np.array([0.5, 1.0])
    blocks = [("t0", U, X[None, :] - U[:, None]), ("t1", np.array([0.0]), (-X - 1)[None, :])]
    return _doc("convex_5", X, np.c_[(X + 1) ** 2, (X - 1) ** 2], blocks, S=ORTHANT_2,
                grids={"dual_resolution": 4, "operator_resolution": 2})


def null_map():
    X = _grid(-5, 5, 101)
    return _doc("null_map", X, np.zeros((X.size, 2)), [("t0", np.array([0.0]), -np.ones((1, X.size)))],
                decl={"convex_regime": True, "concave_in_u": True, "compact_U": True})


BUILDERS = {name: globals()[name] for name in BUNDLED}


def write_all(directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name, build in BUILDERS.items():
        (directory / f"{name}.json").write_text(json.dumps(build(), indent=1) + "\n")


if __name__ == "__main__":
    write_all(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "data")
