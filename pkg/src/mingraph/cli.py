"""Command-line entry point: ``mingraph <command> [flags]``.

Results go to stdout as one JSON object per line; prose goes to stderr.
Exit codes: 0 pass, 1 verification failure, 2 usage, 3 validation, 4 I/O.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import families as fm
from . import geomexport as ge
from . import pipeline as pl
from . import transforms as tr
from . import verify as vf
from .errors import MingraphError
from .report import ResidualReport, _jsonable

__all__ = ["main", "build_parser", "parse_args", "RunConfig", "UsageError"]

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_VALIDATION, EXIT_IO = 0, 1, 2, 3, 4

COMMANDS = ("list", "eval", "verify", "mesh", "singular", "transform", "pipeline", "suite")
FORMATS = ("csv", "obj", "json")
_KIND = {"float": "real", "complex": "complex (re,im)", "int": "sign (+1 or -1)", "Modulus": "modulus in (0, 1)"}


class UsageError(Exception):
    """Malformed command line or config file (exit 2)."""


@dataclasses.dataclass
class RunConfig:
    command: str
    family: str | None = None
    params: dict = dataclasses.field(default_factory=dict)
    window: tuple | None = None
    resolution: int = 128
    seed: int = 0
    tol: float | None = None
    out: str | None = None
    format: str = "json"
    points: list = dataclasses.field(default_factory=list)
    case: str | None = None
    constants: dict = dataclasses.field(default_factory=dict)
    count: int = 2000
    probes: int = 50


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _number(text: str, flag: str):
    """'1.5' -> float, 're,im' -> complex."""
    parts = text.split(",")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"{flag}: cannot read {text!r} as a number or re,im pair") from None
    if len(vals) == 1:
        return vals[0]
    if len(vals) == 2:
        return complex(vals[0], vals[1])
    raise UsageError(f"{flag}: expected a number or re,im pair, got {text!r}")


def _assignments(items, flag: str) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"{flag}: expected key=value, got {item!r}")
        out[key.strip()] = _number(val.strip(), flag)
    return out


def _floats(text: str, n: int, flag: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"{flag}: cannot read {text!r}") from None
    if len(vals) != n:
        raise UsageError(f"{flag}: expected {n} comma-separated numbers, got {text!r}")
    return vals


def _from_json_value(v):
    if isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) for c in v):
        return complex(v[0], v[1])
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mingraph", description="Minimal graph surfaces and their transformations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--family", help="family name (see `mingraph list`)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="family parameter; complex values as re,im (repeatable)")
    p.add_argument("--window", metavar="X0,Y0,X1,Y1", help="sampling rectangle")
    p.add_argument("--res", type=int, metavar="N", help="mesh or contour resolution")
    p.add_argument("--seed", type=int, help="seed of the sampling stream")
    p.add_argument("--tol", type=float, help="residual tolerance")
    p.add_argument("--out", metavar="PATH", help="output file for mesh, singular and pipeline")
    p.add_argument("--format", choices=FORMATS, help="output format")
    p.add_argument("--config", metavar="PATH", help="JSON file with RunConfig fields")
    p.add_argument("--point", action="append", metavar="X,Y", help="evaluation point (repeatable)")
    p.add_argument("--case", help="g-case of a wall family, or 'trivial'")
    p.add_argument("--const", action="append", metavar="KEY=VALUE", help="transformation constant")
    p.add_argument("--count", type=int, help="samples per suite")
    p.add_argument("--probes", type=int, help="probe points per singular curve")
    return p


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError:
        raise
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: {path} is not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise UsageError("--config: top level must be an object")
    names = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(data) - names
    if unknown:
        raise UsageError(f"--config: unknown fields {sorted(unknown)}")
    return data


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Flags override config-file fields; ``params`` and ``constants`` merge key by key."""
    ns = build_parser().parse_args(list(argv))
    base: dict[str, Any] = _load_config(ns.config) if ns.config else {}
    base.pop("command", None)
    params = {k: _from_json_value(v) for k, v in dict(base.pop("params", {}) or {}).items()}
    consts = {k: _from_json_value(v) for k, v in dict(base.pop("constants", {}) or {}).items()}
    params.update(_assignments(ns.param, "--param"))
    consts.update(_assignments(ns.const, "--const"))
    cfg = RunConfig(ns.command, params=params, constants=consts)
    for k, v in base.items():
        setattr(cfg, k, v)
    if cfg.window is not None and not isinstance(cfg.window, str):
        cfg.window = tuple(float(c) for c in cfg.window)
    if isinstance(cfg.window, str):
        cfg.window = _floats(cfg.window, 4, "--window")
    cfg.points = [tuple(float(c) for c in p) for p in cfg.points]
    flags = {"family": ns.family, "resolution": ns.res, "seed": ns.seed, "tol": ns.tol,
             "out": ns.out, "format": ns.format, "case": ns.case, "count": ns.count,
             "probes": ns.probes}
    for k, v in flags.items():
        if v is not None:
            setattr(cfg, k, v)
    if ns.window is not None:
        cfg.window = _floats(ns.window, 4, "--window")
    if ns.point:
        cfg.points = [_floats(p, 2, "--point") for p in ns.point]
    if cfg.format not in FORMATS:
        raise UsageError(f"--format: choose from {FORMATS}")
    for name, low in (("resolution", 2), ("count", 1), ("probes", 1)):
        if not isinstance(getattr(cfg, name), int) or getattr(cfg, name) < low:
            flag = {"resolution": "--res"}.get(name, f"--{name}")
            raise UsageError(f"{flag}: must be an integer >= {low}")
    if cfg.tol is not None and not (cfg.tol > 0 and math.isfinite(cfg.tol)):
        raise UsageError("--tol: must be a positive number")
    return cfg


# ---------------------------------------------------------------------------
# commands


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(_jsonable(obj), allow_nan=False) + "\n")


def _say(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _family(cfg: RunConfig) -> fm.Family:
    if cfg.family is None:
        raise UsageError("--family: required for this command")
    if cfg.family in fm.figure_params() and not cfg.params:
        return fm.figure_params()[cfg.family]
    return fm.make_family(cfg.family, **cfg.params)


def _window(cfg: RunConfig) -> tuple:
    return cfg.window if cfg.window is not None else vf.DEFAULT_REGION


def _report(rep: ResidualReport) -> int:
    _emit(rep.to_dict())
    _say(f"{rep.label}: {'pass' if rep.passed else 'FAIL'} "
         f"(max {rep.max_residual:.3g}, p99 {rep.p99_residual:.3g}, n={rep.sample_count})")
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_list(cfg: RunConfig) -> int:
    for name, cls in fm.FAMILIES.items():
        schema = {f.name: _KIND.get(str(f.type), str(f.type)) for f in dataclasses.fields(cls)}
        _emit({"family": name, "params": schema, "kSign": cls.k_sign, "harmonic": cls.harmonic})
    return EXIT_PASS


def cmd_eval(cfg: RunConfig) -> int:
    fam = _family(cfg)
    if not cfg.points:
        raise UsageError("--point: at least one point is required")
    for x, y in cfg.points:
        xs, ys = np.asarray(x), np.asarray(y)
        with np.errstate(all="ignore"):
            z = float(fam.height(xs, ys))
        inside = bool(fam.in_domain(xs, ys, 0.0)) and math.isfinite(z)
        _emit({"family": fam.name, "point": [x, y], "inDomain": inside,
               "height": z if inside else None,
               "characteristic": float(fam.characteristic(z)) if inside else None})
    return EXIT_PASS


def cmd_verify(cfg: RunConfig) -> int:
    fam = _family(cfg)
    spec = vf.SampleSpec(_window(cfg), cfg.count, cfg.seed)
    return _report(vf.verify_family(fam, spec, cfg.tol or vf.PDE_TOL))


def cmd_mesh(cfg: RunConfig) -> int:
    fam = _family(cfg)
    mesh = ge.sample_mesh(fam, _window(cfg), cfg.resolution, cfg.resolution)
    summary = {"family": fam.to_dict(), "nodes": int(mesh.heights.size),
               "holes": int(np.count_nonzero(mesh.holes)), "faces": int(mesh.faces.shape[0]),
               "format": cfg.format, "out": cfg.out}
    if cfg.format in ("obj", "csv"):
        if cfg.out is None:
            raise UsageError(f"--out: required for --format {cfg.format}")
        (ge.write_obj if cfg.format == "obj" else ge.write_csv)(mesh, cfg.out)
    elif cfg.out is not None:
        X, Y = mesh.coords()
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_jsonable({**summary, "x": X[0].tolist(), "y": Y[:, 0].tolist(),
                                 "heights": [[None if math.isnan(v) else v for v in row]
                                             for row in mesh.heights.tolist()]}), fh)
    _emit(summary)
    _say(f"{fam.name}: {summary['nodes']} nodes, {summary['holes']} holes, {summary['faces']} faces")
    return EXIT_PASS


def cmd_singular(cfg: RunConfig) -> int:
    fam = _family(cfg)
    curves = fam.singular_curves()
    if not curves:
        _say(f"{fam.name} has no singular curves")
    polylines = []
    code = EXIT_PASS
    for i, spec in enumerate(curves):
        pieces = ge.extract_curve(spec, _window(cfg), cfg.resolution)
        polylines += pieces
        rep = vf.verify_singular(fam, spec, cfg.probes, vf.suite_seed(cfg.seed, f"singular:{fam.name}:{i}"),
                                 _window(cfg))
        d = rep.to_dict()
        d["polylines"] = [{"points": len(c), "closed": c.closed} for c in pieces]
        _emit(d)
        _say(f"{spec.label}: {len(pieces)} polylines, blow-up {'pass' if rep.passed else 'FAIL'}")
        if not rep.passed:
            code = EXIT_FAIL
    if cfg.out is not None:
        if cfg.format == "obj":
            raise UsageError("--format: singular curves are written as csv or json")
        if cfg.format == "csv":
            ge.write_csv(polylines, cfg.out)
        else:
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                json.dump([{"label": c.label, "level": c.level, "closed": c.closed,
                            "points": [[p.real, p.imag] for p in c.points]} for c in polylines], fh)
    return code


def cmd_transform(cfg: RunConfig) -> int:
    fam = _family(cfg)
    consts = dict(cfg.constants)
    if cfg.case == "trivial":
        t = tr.trivial(int(consts.get("epsilon", 1)), float(consts.get("C", 0.0)))
    else:
        for k in ("sign",):
            if k in consts:
                consts[k] = int(consts[k])
        t = tr.nmg_for(fam, cfg.case, **consts)
    spec = vf.SampleSpec(_window(cfg), cfg.count, cfg.seed)
    return _report(vf.verify_transformation(fam, t, spec, cfg.tol or vf.PDE_TOL))


def cmd_pipeline(cfg: RunConfig) -> int:
    fam = _family(cfg)
    rep = vf.verify_round_trip(fam, cfg.tol or 1e-5)
    if cfg.out is not None:
        table = pl.closed_form_j(fam).build().table
        rows = zip(table.nodes, table.values, table.derivs)
        if cfg.format == "csv":
            import csv
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\r\n")
                w.writerow(["s", "H", "dH"])
                w.writerows([["%.17g" % v for v in r] for r in rows])
        else:
            with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
                json.dump({"s": table.nodes.tolist(), "H": table.values.tolist(),
                           "dH": table.derivs.tolist()}, fh)
    return _report(rep)


def cmd_suite(cfg: RunConfig) -> int:
    failed = 0
    total = 0
    for rec in vf.run_suites(cfg.seed, cfg.tol, cfg.family, cfg.count, cfg.probes):
        _emit(rec)
        sys.stdout.flush()
        total += 1
        if not rec["passed"]:
            failed += 1
            _say(f"FAIL {rec['suite']}")
    _say(f"{total - failed}/{total} suites passed")
    return EXIT_PASS if failed == 0 else EXIT_FAIL


_COMMANDS = {
    "list": cmd_list, "eval": cmd_eval, "verify": cmd_verify, "mesh": cmd_mesh,
    "singular": cmd_singular, "transform": cmd_transform, "pipeline": cmd_pipeline,
    "suite": cmd_suite,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
        return _COMMANDS[cfg.command](cfg)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _say(f"I/O error: {exc}")
        return EXIT_IO
    except (MingraphError, ValueError, TypeError, ArithmeticError) as exc:
        _say(f"{type(exc).__name__}: {exc}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
