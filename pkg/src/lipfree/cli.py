"""Command-line front door.

Every command emits a single JSON report with the same envelope:
command, artifact version, input digests, the tolerances that were in
force, the command-specific results, and a timing block. Reports are
deterministic for identical inputs and flags, independent of the
LIPFREE_THREADS setting; only the timing block varies between runs.

Exit codes: 0 for any computed verdict (a negative verdict is still a
successful computation), 2 for input errors, and 3 for internal
invariant failures such as certifier disagreement.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .composition import (
    LipschitzMap,
    certify_isometry,
    compose,
    operator_norm,
)
from .errors import (
    InputError,
    InternalCheckError,
    MalformedInput,
    MethodDisagreement,
    RangeNotDense,
)
from .fixtures import BUILTIN_MAPS, builtin_map, random_lipschitz_function
from .freespace import (
    extreme_molecules,
    free_norm_dual,
    free_norm_primal,
    is_norming,
)
from .geodesic import (
    check_geodesic_necessary,
    check_geodesic_sufficient,
    check_interval_necessary,
    check_interval_sufficient,
)
from .io import (
    load_free_vector,
    load_function,
    load_geodesic_space,
    load_map,
    load_space,
    sha256_of_file,
)
from .lipschitz import LipschitzFunction, lipschitz_norm, mcshane_extend
from .metric_core import PointPair

FREENORM_AGREEMENT = 1e-8


def _input_record(role: str, path: str | None, extra: dict | None = None) -> dict:
    rec: dict[str, Any] = {"role": role}
    if path is not None:
        rec["path"] = str(path)
        rec["sha256"] = sha256_of_file(path)
    if extra:
        rec.update(extra)
    return rec


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _emit_csv(rows, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "best_ratio", "defect"])
        for t, best, defect in rows:
            writer.writerow([repr(t), repr(best), repr(defect)])


def _parse_pairs(text: str) -> list[PointPair]:
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise MalformedInput("--pairs", f"cannot parse pair {chunk!r}")
        pairs.append(PointPair(int(parts[0]), int(parts[1])))
    return pairs


def _resolve_experiment_map(spec_text: str, mesh: int | None):
    """builtin:NAME (requires --mesh) or file:PATH or a bare path."""
    if spec_text.startswith("builtin:"):
        name = spec_text.split(":", 1)[1]
        if name not in BUILTIN_MAPS:
            raise MalformedInput("--map", f"unknown builtin map {name!r}")
        if mesh is None:
            raise MalformedInput("--mesh", "builtin maps need --mesh")
        return builtin_map(name, mesh), {"builtin": name, "mesh": mesh}
    path = spec_text.split(":", 1)[1] if spec_text.startswith("file:") else spec_text
    return load_map(path), {"path": path}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lipfree",
        description="norms, extreme molecules, and isometry certificates "
                    "for Lipschitz spaces over finite metric spaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")

    def common(p, method=False):
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--tol", type=float, default=None,
                       help="absolute metric tolerance override")
        if method:
            p.add_argument("--method", default="both",
                           help="which algorithm(s) to run")

    p = sub.add_parser("validate", help="check a space file against the metric axioms")
    p.add_argument("space")
    common(p)

    p = sub.add_parser("norm", help="Lipschitz norm of a function file")
    p.add_argument("function")
    common(p)

    p = sub.add_parser("freenorm", help="transport norm of a zero-sum vector file")
    p.add_argument("vector")
    common(p, method=True)

    p = sub.add_parser("extremes", help="extreme molecule pairs of a space")
    p.add_argument("space")
    common(p)

    p = sub.add_parser("norming", help="is a pair set norming for the space?")
    p.add_argument("space")
    p.add_argument("--pairs", required=True,
                   help="semicolon-separated pairs, e.g. '0,1;1,2'")
    common(p)

    p = sub.add_parser("isometry", help="certify a composition operator")
    p.add_argument("--map", required=True, dest="map_path")
    p.add_argument("--domain", default=None)
    p.add_argument("--codomain", default=None)
    p.add_argument("--pairs", default=None,
                   help="optional norming pair set for the dual method")
    common(p, method=True)

    p = sub.add_parser("extend", help="norm-preserving extension from a subset")
    p.add_argument("function")
    p.add_argument("--subset", required=True, help="comma-separated point indices")
    p.add_argument("--floor", default=None, help="optional floor function file")
    common(p)

    p = sub.add_parser("experiment", help="mesh-scale isometry experiments")
    exp = p.add_subparsers(dest="experiment_kind")

    pi = exp.add_parser("interval", help="run the interval-net checks on a map")
    pi.add_argument("--mesh", type=int, default=None, help="subdivisions n (mesh 1/n)")
    pi.add_argument("--map", required=True, dest="map_spec",
                    help="builtin:identity|fold|halving|collapse or file:PATH")
    pi.add_argument("--r-loc", type=float, default=None, dest="r_loc")
    pi.add_argument("--eps", type=float, default=None)
    pi.add_argument("--seed", type=int, default=None,
                    help="seed for the random lower-bound probe")
    pi.add_argument("--probe", type=int, default=0,
                    help="number of random functions for the norm probe")
    pi.add_argument("--csv", default=None, help="write the defect profile as CSV")
    common(pi, method=True)

    pg = exp.add_parser("geodesic", help="run the geodesic checks on a map")
    pg.add_argument("--space", required=True, help="geodesic space file (with paths)")
    pg.add_argument("--map", required=True, dest="map_spec",
                    help="file path or builtin:identity")
    pg.add_argument("--r-loc", type=float, default=None, dest="r_loc")
    pg.add_argument("--eps", type=float, default=None)
    pg.add_argument("--csv", default=None, help="write the defect profiles as CSV")
    common(pg, method=True)

    return parser


# ---------------------------------------------------------------------------
# command bodies: each returns (inputs, tolerances, results)
# ---------------------------------------------------------------------------

def _cmd_validate(args):
    inputs = [_input_record("space", args.space)]
    try:
        space = load_space(args.space, tol=args.tol)
    except MalformedInput:
        raise
    except InputError as exc:
        results = {
            "valid": False,
            "error": {"kind": type(exc).__name__, "message": str(exc),
                      "witness": list(getattr(exc, "witness", ()) or ())},
        }
        return inputs, {"tol_metric": args.tol}, results
    results = {"valid": True, "points": space.n, "diameter": space.diameter}
    return inputs, {"tol_metric": args.tol if args.tol is not None else space.tol}, results


def _cmd_norm(args):
    f = load_function(args.function)
    value, witness = lipschitz_norm(f)
    return (
        [_input_record("function", args.function)],
        {"tol_metric": f.space.tol},
        {"norm": value, "witness": list(witness)},
    )


def _cmd_freenorm(args):
    mu = load_free_vector(args.vector)
    inputs = [_input_record("vector", args.vector)]
    tolerances = {"agreement": FREENORM_AGREEMENT}
    if args.method == "flow":
        value, plan = free_norm_primal(mu)
        return inputs, tolerances, {"method": "flow", "value": value,
                                    "plan": [list(p) for p in plan]}
    if args.method == "lp":
        value, maximizer = free_norm_dual(mu)
        return inputs, tolerances, {"method": "lp", "value": value,
                                    "maximizer": maximizer.values.tolist()}
    if args.method != "both":
        raise MalformedInput("--method", f"unknown method {args.method!r}")
    flow_value, plan = free_norm_primal(mu)
    lp_value, maximizer = free_norm_dual(mu)
    gap = abs(flow_value - lp_value)
    agree = gap <= FREENORM_AGREEMENT * max(1.0, flow_value)
    results = {
        "method": "both",
        "flow": flow_value,
        "lp": lp_value,
        "difference": gap,
        "agree": agree,
        "plan": [list(p) for p in plan],
        "maximizer": maximizer.values.tolist(),
    }
    if not agree:
        raise MethodDisagreementJSON(results)
    return inputs, tolerances, results


class MethodDisagreementJSON(InternalCheckError):
    def __init__(self, results: dict):
        self.results = results
        super().__init__("primal and dual norms disagree beyond tolerance")


def _cmd_extremes(args):
    space = load_space(args.space, tol=args.tol)
    pairs = extreme_molecules(space)
    return (
        [_input_record("space", args.space)],
        {"tol_metric": space.tol},
        {"pairs": [list(p.as_tuple()) for p in pairs], "count": len(pairs)},
    )


def _cmd_norming(args):
    space = load_space(args.space, tol=args.tol)
    pairs = _parse_pairs(args.pairs)
    result = is_norming(space, pairs)
    return (
        [_input_record("space", args.space)],
        {"tol_metric": space.tol},
        {"is_norming": result.is_norming,
         "failing_vertex": list(result.failing_vertex.as_tuple())
         if result.failing_vertex else None},
    )


def _cmd_isometry(args):
    domain = load_space(args.domain, tol=args.tol) if args.domain else None
    codomain = load_space(args.codomain, tol=args.tol) if args.codomain else None
    phi = load_map(args.map_path, domain=domain, codomain=codomain)
    pairs = _parse_pairs(args.pairs) if args.pairs else None
    started = time.perf_counter()
    cert = certify_isometry(phi, method=args.method, pairs=pairs, tol=args.tol)
    wall = time.perf_counter() - started
    results = cert.to_dict()
    results["operator_norm"] = operator_norm(phi)
    results["wall_time_s"] = wall
    inputs = [_input_record("map", args.map_path)]
    if args.domain:
        inputs.append(_input_record("domain", args.domain))
    if args.codomain:
        inputs.append(_input_record("codomain", args.codomain))
    tol = args.tol if args.tol is not None else max(phi.domain.tol, phi.codomain.tol)
    return inputs, {"tol_metric": tol}, results


def _cmd_extend(args):
    f = load_function(args.function)
    subset = [int(s) for s in args.subset.split(",") if s.strip()]
    floor = load_function(args.floor) if args.floor else None
    if floor is not None and floor.space.n != f.space.n:
        raise MalformedInput("--floor", "floor lives on a different-size space")
    if floor is not None:
        # re-anchor the floor onto the function's space object
        floor = LipschitzFunction(f.space, floor.values, normalize=False)
    f_sub = [float(f.values[i]) for i in subset]
    ext = mcshane_extend(f.space, subset, f_sub, floor=floor, tol=args.tol)
    inputs = [_input_record("function", args.function)]
    if args.floor:
        inputs.append(_input_record("floor", args.floor))
    return (
        inputs,
        {"tol_metric": args.tol if args.tol is not None else f.space.tol},
        {"subset": subset, "values": ext.values.tolist(),
         "norm": lipschitz_norm(ext).value},
    )


def _cmd_experiment_interval(args):
    phi, map_record = _resolve_experiment_map(args.map_spec, args.mesh)
    inputs = [_input_record("map", map_record.get("path"), map_record)]
    necessary = check_interval_necessary(phi, r_loc=args.r_loc, eps=args.eps)
    r = args.r_loc if args.r_loc is not None else 4.0 * necessary.extra["mesh"]
    sufficient = check_interval_sufficient(phi, r=r, eps=args.eps)
    started = time.perf_counter()
    cert = certify_isometry(phi, method=args.method, tol=args.tol)
    wall = time.perf_counter() - started
    results = {
        "operator_norm": operator_norm(phi),
        "necessary": necessary.to_dict(),
        "sufficient": sufficient.to_dict(),
        "certificate": cert.to_dict(),
        "wall_time_s": wall,
    }
    if args.probe:
        rng = np.random.default_rng(args.seed)
        best = 0.0
        for _ in range(args.probe):
            f = random_lipschitz_function(rng, phi.codomain)
            fn = lipschitz_norm(f).value
            if fn > 0:
                best = max(best, lipschitz_norm(compose(phi, f)).value / fn)
        results["random_probe"] = {"samples": args.probe, "seed": args.seed,
                                   "max_ratio": best}
    tolerances = {"r_loc": necessary.r_loc, "eps": necessary.eps,
                  "tol_metric": args.tol}
    if args.csv:
        _emit_csv(necessary.rows, args.csv)
    elif args.out:
        _emit_csv(necessary.rows, str(Path(args.out).with_suffix(".csv")))
    return inputs, tolerances, results


def _cmd_experiment_geodesic(args):
    gspace = load_geodesic_space(args.space)
    if args.map_spec == "builtin:identity":
        phi = LipschitzMap(gspace.space, gspace.space,
                           tuple(range(gspace.space.n)))
        inputs = [_input_record("space", args.space),
                  _input_record("map", None, {"builtin": "identity"})]
    else:
        path = (args.map_spec.split(":", 1)[1]
                if args.map_spec.startswith("file:") else args.map_spec)
        phi = load_map(path, codomain=gspace.space)
        inputs = [_input_record("space", args.space), _input_record("map", path)]
    started = time.perf_counter()
    cert = certify_isometry(phi, method=args.method, tol=args.tol)
    wall = time.perf_counter() - started
    profiles = []
    for (x, y) in sorted(gspace.paths):
        profile = check_geodesic_necessary(phi, gspace, PointPair(x, y),
                                           r_loc=args.r_loc, eps=args.eps)
        profiles.append(profile)
    r = args.r_loc if args.r_loc is not None else 4.0 * gspace.mesh
    try:
        sufficient = check_geodesic_sufficient(phi, gspace, r=r, eps=args.eps).to_dict()
    except RangeNotDense as exc:
        sufficient = {"range_not_dense": {"worst_point": exc.worst_point,
                                          "gap": exc.gap}}
    results = {
        "operator_norm": operator_norm(phi),
        "mesh": gspace.mesh,
        "necessary": [p.to_dict() for p in profiles],
        "sufficient": sufficient,
        "certificate": cert.to_dict(),
        "wall_time_s": wall,
    }
    tolerances = {"r_loc": args.r_loc, "eps": args.eps, "tol_metric": args.tol}
    if args.csv:
        rows = [row for p in profiles for row in p.rows]
        _emit_csv(rows, args.csv)
    return inputs, tolerances, results


_COMMANDS = {
    "validate": _cmd_validate,
    "norm": _cmd_norm,
    "freenorm": _cmd_freenorm,
    "extremes": _cmd_extremes,
    "norming": _cmd_norming,
    "isometry": _cmd_isometry,
    "extend": _cmd_extend,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2
    started = time.perf_counter()
    try:
        if args.command == "experiment":
            if args.experiment_kind == "interval":
                inputs, tolerances, results = _cmd_experiment_interval(args)
            elif args.experiment_kind == "geodesic":
                inputs, tolerances, results = _cmd_experiment_geodesic(args)
            else:
                print("experiment requires a kind: interval | geodesic",
                      file=sys.stderr)
                return 2
        else:
            inputs, tolerances, results = _COMMANDS[args.command](args)
    except MethodDisagreementJSON as exc:
        report = _envelope(args, [], {}, exc.results, started)
        report["error"] = {"kind": "MethodDisagreement", "message": str(exc)}
        _emit(report, args.out)
        return 3
    except MethodDisagreement as exc:
        report = _envelope(args, [], {}, {
            "dual": exc.dual_cert.to_dict(), "primal": exc.primal_cert.to_dict(),
        }, started)
        report["error"] = {"kind": "MethodDisagreement", "message": str(exc)}
        _emit(report, args.out)
        return 3
    except InternalCheckError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = _envelope(args, inputs, tolerances, results, started)
    _emit(report, args.out)
    return 0


def _envelope(args, inputs, tolerances, results, started) -> dict:
    command = args.command
    if command == "experiment":
        command = f"experiment.{args.experiment_kind}"
    return {
        "command": command,
        "version": __version__,
        "inputs": inputs,
        "tolerances": tolerances,
        "results": results,
        "timing": {"wall_time_s": time.perf_counter() - started},
    }


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
