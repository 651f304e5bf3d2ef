"""Command-line experiment runner.

    vaguemeasures dist|converge|simulate|laplace --config FILE [--out DIR] [--seed N] [--verbose]
    vaguemeasures selftest [--out DIR]

Exit codes: 0 pass, 1 fail, 2 configuration error, 3 size cap exceeded,
4 space mismatch, 5 inconclusive. Outputs are written once, at the end, as
JSON with sorted keys plus CSV tables, so equal inputs give equal bytes.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import logging
import math
import operator
import sys
from pathlib import Path

import jsonschema
import numpy as np

from .boundedness import SpaceMismatchError, check_same_space
from .convergence import CSV_HEADER as GAP_HEADER
from .convergence import MeasureSequence, catalogue_entry, cross_validate
from .measures import DiscreteMeasure
from .metrics import NotProbabilityError, SizeCapError, finite_measure_dist, prohorov, vague_dist
from .random_measures import CSV_HEADER as LAPLACE_HEADER
from .random_measures import test_convergence_in_distribution
from .serialization import (
    ConfigError,
    battery_from_json,
    measure_from_json,
    model_from_json,
    region_from_json,
    space_from_json,
)

log = logging.getLogger("vaguemeasures")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP, EXIT_MISMATCH, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4, 5
STATUS_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}

# --------------------------------------------------------------------------- schemas

_NUM = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf"]}]}
_SEED = {"type": "integer", "minimum": 0}
_SPACE = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["euclidean", "weak", "punctured", "halfline_hl"]},
        "dim": {"type": "integer", "minimum": 1},
        "cap": {"type": "boolean"},
    },
    "required": ["kind"],
    "additionalProperties": False,
}
_REGION = {
    "type": "object",
    "properties": {
        "type": {"enum": ["interval", "ball", "box", "annulus", "whole", "union"]},
        "lo": {}, "hi": {}, "lo_open": {"type": "boolean"}, "hi_open": {"type": "boolean"},
        "center": {"type": "array"}, "radius": {"type": "number", "minimum": 0},
        "open": {"type": "boolean"}, "dim": {"type": "integer", "minimum": 1},
        "parts": {"type": "array"},
    },
    "required": ["type"],
    "additionalProperties": False,
}
_ATOM = {
    "type": "object",
    "properties": {"x": {"oneOf": [_NUM, {"type": "array", "items": _NUM}]}, "w": {"type": "number", "minimum": 0}},
    "required": ["x"],
    "additionalProperties": False,
}
_MEASURE = {
    "type": "object",
    "properties": {"space": _SPACE, "atoms": {"type": "array", "items": _ATOM},
                   "point_measure": {"type": "boolean"}},
    "required": ["space", "atoms"],
    "additionalProperties": False,
}
_MEASURE_REF = {"oneOf": [{"type": "string"}, _MEASURE]}
_BATTERY = {
    "type": "object",
    "properties": {
        "type": {"enum": ["lipschitz", "multiplicative", "explicit"]},
        "count": {"type": "integer", "minimum": 1},
        "generators": {"type": "integer", "minimum": 1},
        "levels": {"type": "integer", "minimum": 1},
        "size": {"type": "integer", "minimum": 1},
        "seed": _SEED,
        "members": {"type": "array", "items": {"type": "object"}},
    },
    "required": ["type"],
    "additionalProperties": False,
}
_MODEL = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["poisson", "empirical_extremes"]},
        "c": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 1},
    },
    "required": ["kind", "alpha"],
    "additionalProperties": False,
}
_GRID = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1}
_FORMULA = {"oneOf": [{"type": "number"}, {"type": "string"}]}

SCHEMAS = {
    "dist": {
        "type": "object",
        "properties": {
            "mu": _MEASURE_REF, "nu": _MEASURE_REF,
            "metric": {"enum": ["hu", "base"]},
            "distances": {"type": "array", "items": {"enum": ["prohorov", "rho_hat", "rho_tilde"]}},
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "seed": _SEED,
        },
        "required": ["mu", "nu"],
        "additionalProperties": False,
    },
    "converge": {
        "type": "object",
        "properties": {
            "sequence": {
                "type": "object",
                "properties": {
                    "catalogue": {"type": "string"},
                    "space": _SPACE,
                    "atoms": {"type": "array", "items": {
                        "type": "object",
                        "properties": {"x": {"oneOf": [_FORMULA, {"type": "array", "items": _FORMULA}]},
                                       "w": _FORMULA},
                        "required": ["x"],
                        "additionalProperties": False,
                    }},
                    "limit": _MEASURE_REF,
                    "label": {"type": "string"},
                },
                "additionalProperties": False,
            },
            "battery": _BATTERY,
            "regions": {"type": "array", "items": _REGION},
            "n_grid": _GRID,
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "seed": _SEED,
        },
        "required": ["sequence", "n_grid", "tol"],
        "additionalProperties": False,
    },
    "simulate": {
        "type": "object",
        "properties": {
            "model": _MODEL,
            "level": {"type": "integer", "minimum": 1},
            "reps": {"type": "integer", "minimum": 1},
            "seed": _SEED,
        },
        "required": ["model", "level", "reps"],
        "additionalProperties": False,
    },
    "laplace": {
        "type": "object",
        "properties": {
            "sequence": _MODEL,
            "target": _MODEL,
            "battery": _BATTERY,
            "n_grid": _GRID,
            "reps": {"type": "integer", "minimum": 100},
            "z_threshold": {"type": "number", "exclusiveMinimum": 0},
            "seed": _SEED,
        },
        "required": ["sequence", "target", "battery", "n_grid", "reps"],
        "additionalProperties": False,
    },
}
STOCHASTIC = {"simulate", "laplace"}


def validate(command: str, config) -> None:
    _raise_schema_error(SCHEMAS[command], config, "config")


def _raise_schema_error(schema, data, root: str) -> None:
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(data))
    if err is not None:
        where = root + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise ConfigError(f"{where}: {err.message}")


# --------------------------------------------------------------------------- formulas

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow, ast.Mod: operator.mod,
           ast.FloorDiv: operator.floordiv}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"sqrt": math.sqrt, "log": math.log, "exp": math.exp, "sin": math.sin, "cos": math.cos,
          "abs": abs, "floor": math.floor, "ceil": math.ceil, "min": min, "max": max}
_CONSTS = {"pi": math.pi, "e": math.e}


def compile_formula(text, where: str = "formula"):
    """Arithmetic expression in ``n`` evaluated by walking a restricted AST."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        value = float(text)
        return lambda n: value
    try:
        tree = ast.parse(str(text), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"{where}: cannot parse {text!r}") from exc

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return
        if isinstance(node, ast.Name) and (node.id == "n" or node.id in _CONSTS):
            return
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            check(node.left)
            check(node.right)
            return
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            check(node.operand)
            return
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS \
                and not node.keywords:
            for a in node.args:
                check(a)
            return
        raise ConfigError(f"{where}: {ast.dump(node)[:40]} is not allowed in {text!r}")

    check(tree)

    def ev(node, n):
        if isinstance(node, ast.Expression):
            return ev(node.body, n)
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return n if node.id == "n" else _CONSTS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left, n), ev(node.right, n))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](ev(node.operand, n))
        return _FUNCS[node.func.id](*(ev(a, n) for a in node.args))

    def value(n):
        try:
            return float(ev(tree, float(n)))
        except (ArithmeticError, ValueError) as exc:
            raise ConfigError(f"{where}: {text!r} fails at n={n}: {exc}") from exc

    return value


# --------------------------------------------------------------------------- helpers

def _load_json(path: Path, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"{what}: file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _measure(ref, base: Path, where: str) -> DiscreteMeasure:
    if isinstance(ref, str):
        data = _load_json(base / ref, where)
        _raise_schema_error(_MEASURE, data, where)
        return measure_from_json(data, where)
    return measure_from_json(ref, where)


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _write(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


# --------------------------------------------------------------------------- commands

def cmd_dist(config: dict, base: Path, out: Path) -> int:
    mu = _measure(config["mu"], base, "config.mu")
    nu = _measure(config["nu"], base, "config.nu")
    check_same_space(mu.space, nu.space)
    metric = config.get("metric", "hu")
    wanted = config.get("distances", ["prohorov", "rho_hat", "rho_tilde"])
    tol = config.get("tol", 1e-6)
    report: dict = {"space": str(mu.space), "metric": metric}
    if "prohorov" in wanted:
        try:
            value, cert = prohorov(mu, nu, metric, certificate=True)
            report["prohorov"] = {"value": value, "certificate": cert.to_json()}
        except NotProbabilityError as exc:
            report["prohorov"] = {"value": None, "reason": str(exc)}
    if "rho_hat" in wanted:
        report["rho_hat"] = {"value": finite_measure_dist(mu, nu, metric),
                             "masses": [mu.total_mass, nu.total_mass]}
    if "rho_tilde" in wanted:
        value, bound = vague_dist(mu, nu, tol, metric)
        report["rho_tilde"] = {"value": value, "error_bound": bound, "tol": tol}
    for key in ("prohorov", "rho_hat", "rho_tilde"):
        if key in report:
            print(f"{key}: {report[key]['value']}")
    _write(out, {"dist.json": _dump_json(report)})
    return EXIT_PASS


def _inline_sequence(spec: dict, base: Path) -> MeasureSequence:
    for key in ("space", "atoms", "limit"):
        if key not in spec:
            raise ConfigError(f"config.sequence.{key}: missing (needed without 'catalogue')")
    space = space_from_json(spec["space"], "config.sequence.space")
    atoms = []
    for i, atom in enumerate(spec["atoms"]):
        xs = atom["x"] if isinstance(atom["x"], list) else [atom["x"]]
        if len(xs) != space.dim:
            raise ConfigError(f"config.sequence.atoms[{i}].x: expected {space.dim} coordinates")
        fx = [compile_formula(x, f"config.sequence.atoms[{i}].x") for x in xs]
        fw = compile_formula(atom.get("w", 1.0), f"config.sequence.atoms[{i}].w")
        atoms.append((fx, fw))
    limit = _measure(spec["limit"], base, "config.sequence.limit")
    check_same_space(space, limit.space)

    def term(n):
        pts = [[f(n) for f in fx] for fx, _ in atoms]
        return DiscreteMeasure(space, np.array(pts, dtype=float).reshape(-1, space.dim),
                               [fw(n) for _, fw in atoms])

    return MeasureSequence(term, limit, spec.get("label", "inline"))


def cmd_converge(config: dict, base: Path, out: Path) -> int:
    spec = config["sequence"]
    expected = None
    if "catalogue" in spec:
        extra = set(spec) - {"catalogue"}
        if extra:
            raise ConfigError(f"config.sequence.{sorted(extra)[0]}: not allowed with 'catalogue'")
        try:
            seq, expected = catalogue_entry(spec["catalogue"])
        except KeyError as exc:
            raise ConfigError(f"config.sequence.catalogue: {exc.args[0]}") from exc
    else:
        seq = _inline_sequence(spec, base)
    space = seq.space
    regions = None
    if "regions" in config:
        regions = [region_from_json(r, f"config.regions[{i}]") for i, r in enumerate(config["regions"])]
    elif not seq.regions:
        raise ConfigError("config.regions: required for inline sequences")
    battery = battery_from_json(config["battery"], space, "config.battery") if "battery" in config else None
    report = cross_validate(seq, battery, regions, config["n_grid"], config["tol"])
    result = report.to_json()
    if expected is not None:
        result["expected"] = expected
    print(f"{seq.label}: {report.status} "
          + " ".join(f"{k}={v}" for k, v in report.applicable.items())
          + ("" if report.agree else "  (checkers disagree: defect)"))
    _write(out, {"verdict.json": _dump_json(result), "gaps.csv": _csv_text(GAP_HEADER, report.csv_rows())})
    return STATUS_EXIT[report.status]


def cmd_simulate(config: dict, base: Path, out: Path) -> int:
    model = model_from_json(config["model"], "config.model")
    seed, level = config["seed"], config["level"]
    samples, rows = [], []
    for r in range(config["reps"]):
        mu = model.sample(level, (seed, r))
        samples.append([float(x) for x in mu.expanded_points()[:, 0]])
        rows.append([r, int(mu.total_mass)])
    counts = np.array([c for _, c in rows], dtype=float)
    summary = {"model": model.to_json(), "level": level, "reps": config["reps"], "seed": seed,
               "mean_count": float(counts.mean()), "samples": samples}
    print(f"{model.kind}: {config['reps']} samples at level {level}, mean count {counts.mean():.4f}")
    _write(out, {"simulate.json": _dump_json(summary), "counts.csv": _csv_text(["rep", "count"], rows)})
    return EXIT_PASS


def _sequence_models(spec: dict):
    if spec["kind"] == "empirical_extremes":
        if "n" in spec:
            model = model_from_json(spec, "config.sequence")
            return lambda n: model
        return lambda n: model_from_json({**spec, "n": int(n)}, "config.sequence")
    if "n" in spec:
        raise ConfigError("config.sequence.n: only empirical_extremes takes n")
    model = model_from_json(spec, "config.sequence")
    return lambda n: model


def cmd_laplace(config: dict, base: Path, out: Path) -> int:
    seq = _sequence_models(config["sequence"])
    target = model_from_json(config["target"], "config.target")
    battery = battery_from_json(config["battery"], target.space, "config.battery")
    report = test_convergence_in_distribution(seq, target, battery, config["n_grid"], config["reps"],
                                              config.get("z_threshold", 3.0), config["seed"])
    print(f"laplace test: {report.verdict} (max |z| at n={report.n_grid[-1]}: {report.final_max_z():.3f}); "
          + ("consistent with convergence" if report.verdict == "pass" else "see report"))
    _write(out, {"laplace.json": _dump_json({**report.to_json(), "battery": battery.to_json()}),
                 "laplace.csv": _csv_text(LAPLACE_HEADER, report.csv_rows())})
    return STATUS_EXIT[report.verdict]


def cmd_selftest(out: Path, corrupt_bump: bool = False) -> int:
    from .acceptance import corrupted_bump, run_all
    from .boundedness import bump

    results = run_all(bump_fn=corrupted_bump if corrupt_bump else bump)
    report = [{"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
              for r in results]
    _write(out, {"selftest.json": _dump_json(report)})
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_PASS if passed == len(results) else EXIT_FAIL


COMMANDS = {"dist": cmd_dist, "converge": cmd_converge, "simulate": cmd_simulate, "laplace": cmd_laplace}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vaguemeasures", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "selftest"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name != "selftest")
        p.add_argument("--out", type=Path, default=Path("out"))
        p.add_argument("--seed", type=int)
        p.add_argument("--verbose", action="store_true")
        if name == "selftest":
            p.add_argument("--debug-corrupt-bump", action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "selftest":
        return cmd_selftest(args.out, args.debug_corrupt_bump)
    try:
        config = _load_json(args.config, "config")
        if args.seed is not None:
            if not isinstance(config, dict):
                raise ConfigError("config: expected an object")
            config["seed"] = args.seed
        validate(args.command, config)
        if args.command in STOCHASTIC and "seed" not in config:
            raise ConfigError("config.seed: a seed is required for stochastic commands")
        log.debug("validated %s config %s", args.command, args.config)
        return COMMANDS[args.command](config, args.config.parent, args.out)
    except SizeCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except SpaceMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
