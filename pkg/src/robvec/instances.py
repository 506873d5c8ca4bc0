"""Reading and writing instance files.

An instance file is a JSON document; numeric leaves may be JSON numbers or
decimal strings, and ``null`` in a map table means +inf.  Load errors name
the offending field path.
"""
import hashlib
import json
from importlib import resources
from itertools import product
from pathlib import Path

import numpy as np

from .cones import ConeError, PolyhedralCone, check_direction, validate_cone
from .conjugate import GroundSet, VectorMap
from .farkas import (AffineFamily, ConstraintBlock, Declarations, InstanceError,
                     RobustInstance, Scenario)

BUNDLED = ("robust_lp", "slater_vector", "convex_1", "convex_2", "convex_3", "convex_4",
           "convex_5", "null_map")


def _num(v, path):
    if v is None:
        return np.inf
    try:
        out = float(v)
    except (TypeError, ValueError):
        raise InstanceError(f"{path}: expected a number, got {v!r}") from None
    if np.isnan(out) or out == -np.inf:
        raise InstanceError(f"{path}: NaN and -inf are not allowed")
    return out


def _vec(v, path, size=None):
    if not isinstance(v, list):
        raise InstanceError(f"{path}: expected a list")
    out = np.array([_num(x, f"{path}[{i}]") for i, x in enumerate(v)])
    if size is not None and out.size != size:
        raise InstanceError(f"{path}: expected length {size}, got {out.size}")
    if np.isinf(out).any():
        raise InstanceError(f"{path}: entries must be finite")
    return out


def _mat(v, path, cols=None):
    if not isinstance(v, list) or not v:
        raise InstanceError(f"{path}: expected a nonempty list of rows")
    rows = [_vec(r, f"{path}[{i}]", cols) for i, r in enumerate(v)]
    width = rows[0].size
    if any(r.size != width for r in rows):
        raise InstanceError(f"{path}: rows have different lengths")
    return np.array(rows)


def _table(v, path, N, width):
    """Map table: one row per ground point, a row or null (+inf)."""
    if not isinstance(v, list) or len(v) != N:
        raise InstanceError(f"{path}: expected {N} rows, one per ground point")
    out = np.empty((N, width))
    for i, r in enumerate(v):
        if r is None:
            out[i] = np.inf
        else:
            if not isinstance(r, list):
                r = [r]
            out[i] = _vec(r, f"{path}[{i}]", width)
    return out


def _extended_rows(v, path, rows, cols):
    """Matrix whose individual entries may be null (+inf)."""
    if not isinstance(v, list) or len(v) != rows:
        raise InstanceError(f"{path}: expected {rows} rows")
    out = np.empty((rows, cols))
    for i, r in enumerate(v):
        if not isinstance(r, list) or len(r) != cols:
            raise InstanceError(f"{path}[{i}]: expected {cols} entries")
        out[i] = [_num(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)]
    return out


def _cone(d, path, dim):
    if not isinstance(d, dict):
        raise InstanceError(f"{path}: expected an object with normals and generators")
    try:
        K = PolyhedralCone(_mat(d.get("normals"), f"{path}.normals", dim),
                           _mat(d.get("generators"), f"{path}.generators", dim))
        return validate_cone(K, name=path)
    except ConeError as exc:
        msg = str(exc)
        raise InstanceError(msg if msg.startswith(path) else f"{path}: {msg}") from None


def _require(doc, key, path=""):
    if key not in doc:
        raise InstanceError(f"{path}{key}: missing field")
    return doc[key]


def parse(doc):
    if not isinstance(doc, dict):
        raise InstanceError("document root must be an object")
    dims = _require(doc, "dims")
    try:
        n, m, p = (int(dims[k]) for k in ("n", "m", "p"))
    except (KeyError, TypeError, ValueError):
        raise InstanceError("dims: expected integers n, m, p") from None
    cones = _require(doc, "cones")
    K = _cone(_require(cones, "K", "cones."), "cones.K", m)
    S = _cone(_require(cones, "S", "cones."), "cones.S", p)
    k = _vec(_require(doc, "direction"), "direction", m)
    try:
        check_direction(K, k)
    except ConeError as exc:
        raise InstanceError(f"direction: {exc}") from None

    g = _require(doc, "ground")
    X = _mat(_require(g, "points", "ground."), "ground.points", n)
    C = g.get("C")
    if C is not None and (not isinstance(C, list) or len(C) != X.shape[0]):
        raise InstanceError("ground.C: expected one boolean per ground point")
    try:
        ground = GroundSet(X, C)
    except ValueError as exc:
        raise InstanceError(f"ground: {exc}") from None
    N = len(ground)
    try:
        F = VectorMap(ground, _table(_require(doc, "F"), "F", N, m), K)
    except ValueError as exc:
        raise InstanceError(f"F: {exc}") from None

    blocks = None
    if doc.get("blocks"):
        blocks = []
        for t, b in enumerate(doc["blocks"]):
            path = f"blocks[{t}]"
            u = _mat(_require(b, "u", path + "."), path + ".u")
            gt = _extended_rows(_require(b, "g", path + "."), path + ".g", u.shape[0], N)
            blocks.append(ConstraintBlock(str(b.get("label", f"t{t}")), u, gt))

    scenarios = []
    if doc.get("scenarios"):
        for i, sd in enumerate(doc["scenarios"]):
            path = f"scenarios[{i}]"
            try:
                G = VectorMap(ground, _table(_require(sd, "G", path + "."), path + ".G", N, p), S)
            except ValueError as exc:
                raise InstanceError(f"{path}: {exc}") from None
            u = None if sd.get("u") is None else _vec(sd["u"], path + ".u")
            scenarios.append(Scenario(str(sd.get("label", f"u{i}")), G, u))
    elif blocks:
        if p != len(blocks):
            raise InstanceError(f"dims.p: block structure needs p = {len(blocks)}")
        scenarios = scenarios_from_blocks(ground, blocks, S)
    else:
        raise InstanceError("scenarios: missing (give scenarios or blocks)")

    family = None
    if doc.get("family"):
        fd = doc["family"]
        if fd.get("kind") != "affine_in_u":
            raise InstanceError("family.kind: only 'affine_in_u' is supported")
        base = _table(_require(fd, "base", "family."), "family.base", N, p)
        coeffs = np.array([_table(c, f"family.coeffs[{j}]", N, p) for j, c in enumerate(fd["coeffs"])])
        family = AffineFamily(base, coeffs)
        for s in scenarios:
            if s.u is None:
                raise InstanceError(f"scenarios[{s.label}].u: required when a family is declared")
            G = family.evaluate(s.u)
            fin = np.isfinite(s.G.values)
            if not np.allclose(G[fin], s.G.values[fin], rtol=1e-9, atol=1e-9):
                raise InstanceError(f"family: does not reproduce the table of scenario {s.label}")

    decl = doc.get("declarations", {})
    grids = doc.get("grids", {})
    ladder = grids.get("ladder")
    inst = RobustInstance(
        ground=ground, F=F, scenarios=scenarios, S=S, k=k,
        name=str(doc.get("name", "instance")), family=family, blocks=blocks,
        declarations=Declarations(bool(decl.get("convex_regime", False)),
                                  bool(decl.get("concave_in_u", False)),
                                  bool(decl.get("compact_U", True))),
        dual_resolution=int(grids.get("dual_resolution", 4)),
        ladder=None if ladder is None else tuple(_vec(ladder, "grids.ladder")),
        operator_resolution=int(grids.get("operator_resolution", 2)),
        operator_dual_resolution=int(grids.get("operator_dual_resolution", 4)),
        s_ladder=tuple(_vec(grids.get("s_ladder", [1, 10, 100]), "grids.s_ladder")),
        tolerances={k2: _num(v, f"tolerances.{k2}") for k2, v in doc.get("tolerances", {}).items()},
        probe_box=tuple(_vec(doc.get("probe_box", [-3, 3]), "probe_box", 2)),
        seed=int(doc.get("seed", 0)),
    )
    try:
        return inst.validate()
    except ConeError as exc:
        raise InstanceError(str(exc)) from None


def scenarios_from_blocks(ground, blocks, S):
    """Product scenarios u = (u_t)_t with G_u(x) = (g_t(x, u_t))_t."""
    out = []
    for sel in product(*[range(len(b.u_values)) for b in blocks]):
        G = np.stack([b.g[i] for b, i in zip(blocks, sel)], axis=1)
        G[~np.isfinite(G).all(axis=1)] = np.inf
        label = ",".join(f"{b.label}:{i}" for b, i in zip(blocks, sel))
        u = np.concatenate([b.u_values[i] for b, i in zip(blocks, sel)])
        out.append(Scenario(label, VectorMap(ground, G, S), u))
    return out


def load(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse(doc)


def bundled_path(name):
    return resources.files("robvec") / "data" / f"{name}.json"


def load_bundled(name):
    if name not in BUNDLED:
        raise KeyError(f"no bundled instance {name!r}; choose from {', '.join(BUNDLED)}")
    return parse(json.loads(bundled_path(name).read_text()))


def digest(path_or_doc):
    if isinstance(path_or_doc, (str, Path)):
        doc = json.loads(Path(path_or_doc).read_text())
    else:
        doc = path_or_doc
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def fmt(x):
    """Decimal string for an instance file; None for +inf."""
    x = float(x)
    if np.isinf(x):
        return None
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def table_doc(V):
    V = np.atleast_2d(np.asarray(V, dtype=float))
    return [None if not np.isfinite(r).all() else [fmt(v) for v in r] for r in V]
