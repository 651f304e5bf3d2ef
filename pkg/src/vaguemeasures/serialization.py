"""JSON forms of spaces, regions, measures, test functions and models.

Infinite endpoints are written as the strings ``"inf"`` / ``"-inf"`` so the
output stays strict JSON. Parsers raise ``ConfigError`` naming the offending
field.
"""
from __future__ import annotations

import math

import numpy as np

from .boundedness import GroundSpace
from .functions import (
    Bump,
    Cone,
    FunctionFamily,
    LowerApprox,
    Product,
    UpperApprox,
    Zero,
    lipschitz_battery,
    multiplicative_family,
)
from .measures import DiscreteMeasure
from .regions import Annulus, Ball, Box, Interval, Region, Union, Whole


class ConfigError(ValueError):
    """Malformed experiment input; the message names the offending field."""


def num_to_json(x: float):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def num_from_json(v, where: str) -> float:
    if isinstance(v, str) and v in ("inf", "-inf", "+inf"):
        return math.inf if v != "-inf" else -math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _get(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    if key not in d:
        raise ConfigError(f"{where}.{key}: missing")
    return d[key]


# spaces

def space_to_json(space: GroundSpace) -> dict:
    out = {"kind": space.kind}
    if space.kind != "halfline_hl":
        out["dim"] = space.dim
    if space.kind == "punctured":
        out["cap"] = space.cap
    return out


def space_from_json(d, where: str = "space") -> GroundSpace:
    kind = _get(d, "kind", where)
    try:
        return GroundSpace(kind, int(d.get("dim", 1)), bool(d.get("cap", False)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


# regions

def region_to_json(region: Region) -> dict:
    if isinstance(region, Interval):
        return {"type": "interval", "lo": num_to_json(region.lo), "hi": num_to_json(region.hi),
                "lo_open": region.lo_open, "hi_open": region.hi_open}
    if isinstance(region, Ball):
        return {"type": "ball", "center": [float(c) for c in region.center],
                "radius": float(region.radius), "open": region.open}
    if isinstance(region, Box):
        return {"type": "box", "lo": [float(v) for v in region.lo], "hi": [float(v) for v in region.hi]}
    if isinstance(region, Annulus):
        return {"type": "annulus", "lo": num_to_json(region.lo), "hi": num_to_json(region.hi),
                "lo_open": region.lo_open, "hi_open": region.hi_open, "dim": region.dim}
    if isinstance(region, Whole):
        return {"type": "whole", "dim": region.dim}
    if isinstance(region, Union):
        return {"type": "union", "parts": [region_to_json(p) for p in region.parts]}
    raise TypeError(f"cannot serialise {region!r}")


def region_from_json(d, where: str = "region") -> Region:
    kind = _get(d, "type", where)
    try:
        if kind == "interval":
            return Interval(num_from_json(_get(d, "lo", where), f"{where}.lo"),
                            num_from_json(_get(d, "hi", where), f"{where}.hi"),
                            bool(d.get("lo_open", False)), bool(d.get("hi_open", False)))
        if kind == "ball":
            return Ball(tuple(num_from_json(c, f"{where}.center") for c in _get(d, "center", where)),
                        num_from_json(_get(d, "radius", where), f"{where}.radius"),
                        bool(d.get("open", True)))
        if kind == "box":
            return Box(tuple(num_from_json(v, f"{where}.lo") for v in _get(d, "lo", where)),
                       tuple(num_from_json(v, f"{where}.hi") for v in _get(d, "hi", where)))
        if kind == "annulus":
            return Annulus(num_from_json(_get(d, "lo", where), f"{where}.lo"),
                           num_from_json(d.get("hi", "inf"), f"{where}.hi"),
                           bool(d.get("lo_open", True)), bool(d.get("hi_open", False)),
                           int(d.get("dim", 1)))
        if kind == "whole":
            return Whole(int(d.get("dim", 1)))
        if kind == "union":
            return Union(tuple(region_from_json(p, f"{where}.parts[{i}]")
                               for i, p in enumerate(_get(d, "parts", where))))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}.type: unknown region type {kind!r}")


# measures

def measure_to_json(mu: DiscreteMeasure) -> dict:
    return {
        "space": space_to_json(mu.space),
        "atoms": [{"x": [float(v) for v in p], "w": float(w)} for p, w in zip(mu.points, mu.weights)],
        "point_measure": mu.is_point_measure(),
    }


def measure_from_json(d, where: str = "measure") -> DiscreteMeasure:
    space = space_from_json(_get(d, "space", where), f"{where}.space")
    atoms = _get(d, "atoms", where)
    if not isinstance(atoms, list):
        raise ConfigError(f"{where}.atoms: expected a list")
    pts, wts = [], []
    for i, a in enumerate(atoms):
        x = _get(a, "x", f"{where}.atoms[{i}]")
        x = [x] if not isinstance(x, list) else x
        if len(x) != space.dim:
            raise ConfigError(f"{where}.atoms[{i}].x: expected {space.dim} coordinates")
        pts.append([num_from_json(v, f"{where}.atoms[{i}].x") for v in x])
        w = num_from_json(a.get("w", 1.0), f"{where}.atoms[{i}].w")
        if d.get("point_measure") and not (w >= 1 and w == round(w)):
            raise ConfigError(f"{where}.atoms[{i}].w: point measure weights are positive integers")
        wts.append(w)
    try:
        return DiscreteMeasure(space, np.array(pts, dtype=float).reshape(-1, space.dim), wts)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


# test functions

def function_from_json(d, space: GroundSpace, where: str = "function"):
    op = _get(d, "op", where)
    try:
        if op in ("upper", "lower"):
            cls = UpperApprox if op == "upper" else LowerApprox
            return cls(space, region_from_json(_get(d, "region", where), f"{where}.region"),
                       int(_get(d, "m", where)), d.get("metric", "hu"))
        if op == "bump":
            return Bump(space, int(_get(d, "m", where)))
        if op == "zero":
            return Zero(space)
        if op == "cone":
            return Cone(num_from_json(_get(d, "alpha", where), f"{where}.alpha"),
                        function_from_json(_get(d, "f", where), space, f"{where}.f"),
                        num_from_json(_get(d, "beta", where), f"{where}.beta"),
                        function_from_json(_get(d, "g", where), space, f"{where}.g"))
        if op == "prod":
            return Product(function_from_json(_get(d, "f", where), space, f"{where}.f"),
                           function_from_json(_get(d, "g", where), space, f"{where}.g"))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}.op: unknown operation {op!r}")


def battery_from_json(d, space: GroundSpace, where: str = "battery") -> FunctionFamily:
    """``{"type": "lipschitz"|"multiplicative", "count", "seed"}`` or explicit members."""
    kind = _get(d, "type", where)
    if kind == "lipschitz":
        return lipschitz_battery(space, int(_get(d, "count", where)), int(d.get("seed", 0)))
    if kind == "multiplicative":
        levels, size = d.get("levels"), d.get("size")
        try:
            return multiplicative_family(space, int(_get(d, "generators", where)), int(d.get("seed", 0)),
                                         None if levels is None else int(levels),
                                         None if size is None else int(size))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    if kind == "explicit":
        members = _get(d, "members", where)
        return FunctionFamily(tuple(function_from_json(m, space, f"{where}.members[{i}]")
                                    for i, m in enumerate(members)))
    raise ConfigError(f"{where}.type: unknown battery type {kind!r}")


# random measure models

def model_from_json(d, where: str = "model"):
    from .random_measures import extremes_model, poisson_model

    kind = _get(d, "kind", where)
    try:
        if kind == "poisson":
            return poisson_model(num_from_json(_get(d, "c", where), f"{where}.c"),
                                 num_from_json(_get(d, "alpha", where), f"{where}.alpha"))
        if kind == "empirical_extremes":
            return extremes_model(int(_get(d, "n", where)),
                                  num_from_json(_get(d, "alpha", where), f"{where}.alpha"))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}.kind: unknown model kind {kind!r}")
