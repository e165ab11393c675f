"""JSON file formats and digests.

Schemas (documented in docs/formats.md):

* space:     {"labels": [..], "base": int,
              "metric": {"type": "matrix", "d": [[..]]}
                      | {"type": "graph", "n": int, "edges": [[i, j, w], ..]}}
* function:  {"space": <path-or-inline>, "values": [..]}
* vector:    {"space": <path-or-inline>, "coeffs": [..]}   (zero sum required;
              files violating it are rejected, never rebalanced)
* map:       {"domain": <path-or-inline>, "codomain": <path-or-inline>,
              "image": [..]}
* geodesic:  space fields plus "paths": [{"pair": [i, j], "points": [..]}]

Inline space references are the space object itself; path references are
resolved relative to the referencing file. All files are UTF-8 JSON and
field order never matters.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError, MalformedInput, NotZeroSum
from .freespace import FreeVector
from .geodesic import DiscretizedGeodesicSpace
from .lipschitz import LipschitzFunction
from .composition import LipschitzMap
from .metric_core import PointedMetricSpace, from_weighted_graph, validate_space


def sha256_of_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def sha256_of_obj(obj: Any) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise MalformedInput(str(path), "file not found") from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(str(path), f"invalid JSON: {exc}") from None


def _require(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise MalformedInput(f"{where}.{key}", "missing required field")
    return obj[key]


def space_from_dict(obj: dict, where: str = "space",
                    tol: float | None = None) -> PointedMetricSpace:
    if not isinstance(obj, dict):
        raise MalformedInput(where, "expected an object")
    metric = _require(obj, "metric", where)
    base = int(obj.get("base", 0))
    labels = obj.get("labels")
    kind = _require(metric, "type", f"{where}.metric")
    if kind == "matrix":
        d = _require(metric, "d", f"{where}.metric")
        try:
            return validate_space(np.asarray(d, dtype=float), base=base,
                                  labels=labels, tol=tol)
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"{where}.metric.d", str(exc)) from None
    if kind == "graph":
        n = int(_require(metric, "n", f"{where}.metric"))
        edges = _require(metric, "edges", f"{where}.metric")
        try:
            triples = [(int(i), int(j), float(w)) for i, j, w in edges]
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"{where}.metric.edges", str(exc)) from None
        return from_weighted_graph(n, triples, base=base, labels=labels)
    raise MalformedInput(f"{where}.metric.type", f"unknown metric type {kind!r}")


def _resolve_space(ref: Any, anchor: Path | None, where: str) -> PointedMetricSpace:
    if isinstance(ref, str):
        path = Path(ref)
        if anchor is not None and not path.is_absolute():
            path = anchor / path
        return space_from_dict(read_json(path), where=str(path))
    return space_from_dict(ref, where=where)


def load_space(path: str | Path, tol: float | None = None) -> PointedMetricSpace:
    return space_from_dict(read_json(path), where=str(path), tol=tol)


def space_to_dict(space: PointedMetricSpace) -> dict:
    return {
        "labels": list(space.labels),
        "base": space.base,
        "metric": {"type": "matrix", "d": space.dist.tolist()},
    }


def load_function(path: str | Path) -> LipschitzFunction:
    obj = read_json(path)
    where = str(path)
    space = _resolve_space(_require(obj, "space", where), Path(path).parent, where)
    values = np.asarray(_require(obj, "values", where), dtype=float)
    if values.shape != (space.n,):
        raise MalformedInput(f"{where}.values",
                             f"expected {space.n} values, got {values.shape}")
    return LipschitzFunction(space, values)


def load_free_vector(path: str | Path) -> FreeVector:
    obj = read_json(path)
    where = str(path)
    space = _resolve_space(_require(obj, "space", where), Path(path).parent, where)
    coeffs = np.asarray(_require(obj, "coeffs", where), dtype=float)
    try:
        return FreeVector(space, coeffs)
    except NotZeroSum as exc:
        raise MalformedInput(f"{where}.coeffs", str(exc)) from None
    except ValueError as exc:
        raise MalformedInput(f"{where}.coeffs", str(exc)) from None


def load_map(path: str | Path,
             domain: PointedMetricSpace | None = None,
             codomain: PointedMetricSpace | None = None) -> LipschitzMap:
    obj = read_json(path)
    where = str(path)
    anchor = Path(path).parent
    if domain is None:
        domain = _resolve_space(_require(obj, "domain", where), anchor, where)
    if codomain is None:
        codomain = _resolve_space(_require(obj, "codomain", where), anchor, where)
    image = _require(obj, "image", where)
    try:
        return LipschitzMap(domain, codomain, tuple(int(i) for i in image))
    except (InputError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise MalformedInput(f"{where}.image", str(exc)) from None


def load_geodesic_space(path: str | Path) -> DiscretizedGeodesicSpace:
    obj = read_json(path)
    where = str(path)
    space = space_from_dict(obj, where=where)
    paths_field = _require(obj, "paths", where)
    paths = {}
    for k, entry in enumerate(paths_field):
        pair = _require(entry, "pair", f"{where}.paths[{k}]")
        points = _require(entry, "points", f"{where}.paths[{k}]")
        paths[(int(pair[0]), int(pair[1]))] = tuple(int(p) for p in points)
    return DiscretizedGeodesicSpace(space, paths)


def geodesic_space_to_dict(gspace: DiscretizedGeodesicSpace) -> dict:
    obj = space_to_dict(gspace.space)
    obj["paths"] = [
        {"pair": [x, y], "points": list(pts)}
        for (x, y), pts in sorted(gspace.paths.items())
    ]
    return obj
