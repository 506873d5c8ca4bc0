"""Command-line entry point: load an instance, run one command, emit a report."""
import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .cones import validate_cone
from .conjugate import EpiPoint, epi_conjugate_contains
from .duality import (RVDW, SCALAR_VARIANTS, VARIANTS, run_variant, solve_primal,
                      solve_scalar_duals, stable_sweep, verify_duality)
from .farkas import (InstanceError, NumericalFailure, check_H1, check_slater,
                     check_slater_scalar, farkas_equivalence_report, summarize_farkas)
from .instances import BUNDLED, bundled_path, digest, load
from .linalg_lp import LPNumericalError
from .order import decomposition_class, winf_contains, wsup_contains
from .sectional import SamplingPlan, is_sectionally_convex, zero_map_counterexample

COMMANDS = ("wsup", "farkas", "sectional", "solve", "sweep", "check", "gap")
VARIANT_FLAGS = {v.lower(): v for v in VARIANTS}
DEFAULT_SHIFTS = (-1.0, -0.5, 0.0, 0.5, 1.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="robvec", description="Robust vector optimization toolkit.")
    p.add_argument("--version", action="version", version=f"robvec {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--instance", help="instance file or bundled name (" + ", ".join(BUNDLED) + ")")
    p.add_argument("--variant", choices=sorted(VARIANT_FLAGS), default="rvdk")
    p.add_argument("--probes", help="JSON file with probe points")
    p.add_argument("--perturbations", help="JSON file with perturbation operators")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    # the long spelling is the published flag name; the short one is an alias
    p.add_argument("--seed-counterexample", "--seed-paper-counterexample", dest="seed_counterexample",
                   action="store_true", help="sectional: check the zero-map section along (1, -1)")
    return p


# ------------------------------------------------------------------ helpers

def _num(x):
    x = float(x)
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(f"{x:.12g}")


def _plain(obj):
    """Numpy scalars and arrays to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _arr(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def _arr(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return _num(a)
    return [_arr(v) for v in a]


def _resolve_instance(ref):
    if ref is None:
        raise InstanceError("--instance is required for this command")
    if not Path(ref).exists() and ref not in BUNDLED:
        raise InstanceError(f"{ref}: no such file or bundled instance ({', '.join(BUNDLED)})")
    if ref in BUNDLED and not Path(ref).exists():
        path = bundled_path(ref)
        return load(path), digest(json.loads(path.read_text()))
    return load(ref), digest(ref)


def _read_json(path, key):
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict) or key not in doc:
        raise InstanceError(f"{path}: expected an object with a {key!r} list")
    return doc[key]


def _probes(args, inst):
    if args.probes:
        out = []
        for i, d in enumerate(_read_json(args.probes, "probes")):
            try:
                out.append(EpiPoint(np.array(d["L"], dtype=float).reshape(inst.m, inst.n),
                                    np.array(d["y"], dtype=float)))
            except (KeyError, TypeError, ValueError):
                raise InstanceError(f"probes[{i}]: expected L ({inst.m}x{inst.n}) and y ({inst.m})") from None
        return out
    lo, hi = inst.probe_box
    rng = np.random.default_rng(args.seed)
    return [EpiPoint(rng.uniform(lo, hi, (inst.m, inst.n)), rng.uniform(lo, hi, inst.m))
            for _ in range(20)]


def _perturbations(args, inst):
    if args.perturbations:
        try:
            return [np.array(L, dtype=float).reshape(inst.m, inst.n)
                    for L in _read_json(args.perturbations, "perturbations")]
        except (TypeError, ValueError):
            raise InstanceError(f"perturbations: each entry must be an {inst.m}x{inst.n} operator") from None
    return [np.full((inst.m, inst.n), t) for t in DEFAULT_SHIFTS]


def _duality_summary(rep):
    return {
        "primal_wmin": _arr(rep.primal.wmin_points),
        "primal_possibly_unbounded": rep.primal.possibly_unbounded,
        "dual_points": int(rep.dual.values.shape[0]),
        "dual_wmax": int(rep.dual.wmax_mask.sum()),
        "pairs_checked": rep.pairs_checked,
        "weak_violations": len(rep.weak_violations),
        "exact_direction": rep.exact_direction,
        "max_gap": _num(rep.max_gap),
        "tol": _num(rep.tol),
        "strong": rep.strong,
        "heuristic": rep.dual.heuristic,
    }


# ----------------------------------------------------------------- commands

def cmd_wsup(args):
    inst, dig = _resolve_instance(args.instance)
    primal = solve_primal(inst)
    M = primal.value_set
    res = {"feasible_points": int(primal.indices.size), "wmin": _arr(primal.wmin_points)}
    if args.probes:
        rows = []
        for i, y in enumerate(_read_json(args.probes, "points")):
            y = np.asarray(y, dtype=float)
            rows.append({"point": _arr(y), "class": decomposition_class(M, y),
                         "in_winf": winf_contains(M, y), "in_wsup": wsup_contains(M, y)})
        res["queries"] = rows
    return inst.name, dig, res


def cmd_farkas(args):
    inst, dig = _resolve_instance(args.instance)
    rows = farkas_equivalence_report(inst, _probes(args, inst))
    out = []
    for r in rows:
        d = {"L": _arr(r.probe.L), "y": _arr(r.probe.y), "alpha": r.alpha, "beta": r.beta,
             "gamma": r.gamma, "delta": r.delta}
        if r.delta_certificate is not None:
            d["delta_certificate"] = {"u": r.delta_certificate.u, "z": _arr(r.delta_certificate.zstar)}
        out.append(d)
    return inst.name, dig, {"summary": summarize_farkas(rows), "probes": out}


def cmd_sectional(args):
    if args.seed_counterexample:
        F, k, pair = zero_map_counterexample()
        plan = SamplingPlan(1, 2, n_pairs=0, seed=args.seed, pairs=[pair])
        v = is_sectionally_convex(lambda p: epi_conjugate_contains(F, p), k, plan)
        res = {"direction": _arr(k), "verdict": "Pass" if v.passed else "Fail",
               "pairs_checked": v.pairs_checked}
        if v.witness:
            res["witness"] = [{"L": _arr(p.L), "y": _arr(p.y)} for p in v.witness]
        return "zero_map", "builtin", res
    inst, dig = _resolve_instance(args.instance)
    plan = SamplingPlan(inst.n, inst.m, n_pairs=1000, seed=args.seed, box=max(map(abs, inst.probe_box)))
    v = is_sectionally_convex(lambda p: epi_conjugate_contains(inst.F, p), inst.k, plan)
    res = {"direction": _arr(inst.k), "verdict": "Pass" if v.passed else "Fail",
           "pairs_checked": v.pairs_checked}
    if v.witness:
        res["witness"] = [{"L": _arr(p.L), "y": _arr(p.y)} for p in v.witness]
    return inst.name, dig, res


def _variant(args):
    return VARIANT_FLAGS[args.variant]


def cmd_solve(args):
    inst, dig = _resolve_instance(args.instance)
    variant = _variant(args)
    if variant in SCALAR_VARIANTS:
        rep = solve_scalar_duals(inst, np.zeros(inst.n), variant)
        if args.tol is not None:
            rep.tol = args.tol
    else:
        primal = solve_primal(inst)
        dual = run_variant(inst, None, variant)
        rep = verify_duality(primal, dual, 1e-3 if args.tol is None else args.tol, inst.k)
    res = {"variant": variant, **_duality_summary(rep)}
    if variant in SCALAR_VARIANTS:
        res["dual_value"] = _num(rep.dual.values[0, 0])
        res["certificate"] = rep.dual.certificates[0]
        res["flags"] = rep.dual.metadata.get("flags", [])
    elif variant == RVDW:
        res["discarded_operators"] = len(rep.dual.discarded)
    return inst.name, dig, res


def cmd_sweep(args):
    inst, dig = _resolve_instance(args.instance)
    variant = _variant(args)
    V = _perturbations(args, inst)
    reps = stable_sweep(inst, V, variant, tol=args.tol)
    rows = [{"L": _arr(L), **_duality_summary(r)} for L, r in zip(V, reps)]
    return inst.name, dig, {"variant": variant, "stable": all(r.strong for r in reps), "rows": rows}


def cmd_check(args):
    inst, dig = _resolve_instance(args.instance)
    res = {}
    for name, cone in (("K", inst.K), ("S", inst.S)):
        validate_cone(cone, name)
        res[f"cone_{name}"] = "ok"
    sl = check_slater(inst)
    res["slater"] = {"passed": sl.passed, "failures": sl.failures,
                     "witnesses": {u: _arr(x) for u, x in sl.witnesses.items()}}
    if inst.blocks:
        for v in (1, 2, 3):
            s = check_slater_scalar(inst, v)
            res[f"slater_scalar_{v}"] = {"passed": s.passed, "failures": s.failures}
    rng = np.random.default_rng(args.seed)
    zg = inst.zgrid(inst.operator_dual_resolution)
    labels = [s.label for s in inst.scenarios]
    pairs = [((zg[rng.integers(len(zg))], labels[rng.integers(len(labels))]),
              (zg[rng.integers(len(zg))], labels[rng.integers(len(labels))])) for _ in range(50)]
    h1 = check_H1(inst, pairs)
    res["H1"] = {"passed": h1.passed, "pairs": len(pairs), "declared_concave": inst.declarations.concave_in_u}
    return inst.name, dig, res


def cmd_gap(args):
    inst, dig = _resolve_instance(args.instance)
    V = _perturbations(args, inst) if args.perturbations else [np.zeros((inst.m, inst.n))]
    rows = []
    for L in V:
        for variant in SCALAR_VARIANTS:
            rep = solve_scalar_duals(inst, L.reshape(-1), variant)
            primal = float(rep.primal.wmin_points[:, 0].min())
            dual = float(rep.dual.values[0, 0])
            rows.append({"L": _arr(L), "variant": variant, "primal": _num(primal), "dual": _num(dual),
                         "gap": _num(primal - dual), "flags": rep.dual.metadata.get("flags", [])})
    return inst.name, dig, {"rows": rows}


HANDLERS = {"wsup": cmd_wsup, "farkas": cmd_farkas, "sectional": cmd_sectional, "solve": cmd_solve,
            "sweep": cmd_sweep, "check": cmd_check, "gap": cmd_gap}


# ------------------------------------------------------------------ output

def _text(report):
    lines = [f"command: {report['command']}", f"instance: {report['instance']}",
             f"digest: {report['digest']}", f"seed: {report['seed']}"]

    def walk(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, (dict, list)) and v and not _flat(v):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {json.dumps(v)}")
        else:
            for i, v in enumerate(obj):
                if isinstance(v, (dict, list)) and not _flat(v):
                    lines.append(f"{pad}[{i}]")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {json.dumps(v)}")

    walk(report["results"], 0)
    return "\n".join(lines) + "\n"


def _flat(v):
    if isinstance(v, dict):
        return False
    return all(not isinstance(x, dict) for x in v) and len(json.dumps(v)) <= 100


def _csv(report):
    res = report["results"]
    rows = res.get("rows") or res.get("probes") or res.get("queries") or [res]
    keys = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys)
    for r in rows:
        w.writerow([json.dumps(r[k]) if isinstance(r.get(k), (list, dict)) else r.get(k, "")
                    for k in keys])
    return buf.getvalue()


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "csv":
        return _csv(report)
    return _text(report)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"robvec: {exc}", file=sys.stderr)
        return 1
    try:
        name, dig, results = HANDLERS[args.command](args)
    except InstanceError as exc:
        print(f"robvec: load error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, LPNumericalError) as exc:
        print(f"robvec: numerical failure: {exc}", file=sys.stderr)
        return 2
    report = {"command": args.command, "instance": name, "digest": dig, "seed": args.seed,
              "flags": {k: v for k, v in sorted(vars(args).items())
                        if k not in ("command", "out", "format") and v not in (None, False)},
              "results": _plain(results)}
    text = render(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
