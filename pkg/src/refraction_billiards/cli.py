"""Command-line interface.

Every subcommand reads an optional JSON config (``--config``) and lets flags
override its values.  Exit status is 0 on success, 1 for invalid input and
2 for numerical failures.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources

import jsonschema

from . import io as rio
from . import selftest
from .errors import NumericalError, ParameterError
from .model import EllipseBoundary, PhysParams, make_curve
from .return_map import BoundaryState, find_brake_orbits, iterate_orbit
from .scan import GridSpec, PortraitSpec, bifurcation_root, delta_sign_grid, freefall_profile, phase_portrait
from .stability import stability_report, stability_report_elliptic

PARAM_FLAGS = {"E": "E", "omega": "omega", "h": "h", "mu": "mu"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load_schema() -> dict:
    text = resources.files(__package__).joinpath("config_schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read config {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParameterError(f"config {path!r} is not valid JSON: {exc}") from None
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(x) for x in exc.absolute_path) or "<root>"
        raise ParameterError(f"config {path!r} invalid at {loc}: {exc.message}") from None
    return cfg


# --- Argument parsing ---


def _common(sub):
    sub.add_argument("--config", help="JSON configuration file")
    sub.add_argument("--E", dest="E", type=float, help="reference energy E")
    sub.add_argument("--omega", type=float, help="harmonic frequency (not its square)")
    sub.add_argument("--h", dest="h", type=float, help="inner energy offset")
    sub.add_argument("--mu", type=float, help="Keplerian mass parameter")
    sub.add_argument("--ecc", type=float, help="ellipse eccentricity in [0, 1)")
    sub.add_argument("--threads", type=int, help="worker threads for scans")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="refraction-billiards", description="Kepler/harmonic refraction billiards")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = subs.add_parser("orbit", help="iterate one orbit of the return map (CSV)")
    _common(s)
    s.add_argument("--xi", type=float)
    s.add_argument("--alpha", type=float)
    s.add_argument("--iterations", type=int)
    s.add_argument("--output", "-o")

    s = subs.add_parser("portrait", help="phase portrait over a seed grid (CSV, optional SVG)")
    _common(s)
    s.add_argument("--xi-seeds", type=int)
    s.add_argument("--alpha-seeds", type=int)
    s.add_argument("--alpha-min", type=float)
    s.add_argument("--alpha-max", type=float)
    s.add_argument("--iterations", type=int)
    s.add_argument("--output", "-o")
    s.add_argument("--svg")

    s = subs.add_parser("delta-scan", help="axis discriminants over a parameter grid (CSV)")
    _common(s)
    for axis in ("x", "y"):
        s.add_argument(f"--{axis}-param")
        s.add_argument(f"--{axis}-min", type=float)
        s.add_argument(f"--{axis}-max", type=float)
        s.add_argument(f"--{axis}-n", type=int)
    s.add_argument("--output", "-o")

    s = subs.add_parser("bifurcate", help="root of an axis discriminant in one parameter (JSON)")
    _common(s)
    s.add_argument("--axis", type=int, choices=(0, 1))
    s.add_argument("--param")
    s.add_argument("--lo", type=float)
    s.add_argument("--hi", type=float)

    s = subs.add_parser("freefall", help="free-fall map on [0, pi/2] (CSV)")
    _common(s)
    s.add_argument("--theta-samples", type=int)
    s.add_argument("--output", "-o")

    s = subs.add_parser("brake", help="2-periodic brake orbits (JSON)")
    _common(s)
    s.add_argument("--grid-n", type=int)

    s = subs.add_parser("stability", help="linear stability of a homothetic point (JSON)")
    _common(s)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--axis", type=int, choices=(0, 1))
    g.add_argument("--xi", type=float)

    subs.add_parser("selftest", help="run the reference numerical checks")
    return parser


# --- Resolution of config + flags ---


def _pick(args, name, block: dict, key: str, default=None):
    v = getattr(args, name, None)
    if v is not None:
        return v
    return block.get(key, default)


def resolve_params(args, cfg: dict, optional=()) -> dict:
    block = cfg.get("params", {})
    values = {}
    for key, flag in PARAM_FLAGS.items():
        v = _pick(args, flag, block, key)
        if v is None and key not in optional:
            raise ParameterError(f"missing parameter {key!r} (flag --{flag} or config params.{key})")
        values[key] = v
    return values


def resolve_boundary(args, cfg: dict):
    """``(curve, eccentricity or None)``."""
    block = cfg.get("boundary", {"type": "ellipse"})
    if args.ecc is not None:
        block = {"type": "ellipse", "eccentricity": args.ecc}
    if block.get("type") == "custom":
        return make_curve(block["name"], **block.get("options", {})), None
    e = block.get("eccentricity")
    if e is None:
        raise ParameterError("missing eccentricity (flag --ecc or config boundary.eccentricity)")
    if not 0.0 <= e < 1.0:
        raise ParameterError(f"eccentricity must lie in [0, 1), got {e!r}")
    return EllipseBoundary(e), float(e)


def _require_ellipse(e, command):
    if e is None:
        raise ParameterError(f"{command} needs an ellipse boundary")


def _threads(args, cfg):
    n = _pick(args, "threads", cfg, "threads")
    if n is not None and n < 1:
        raise ParameterError("--threads must be >= 1")
    return n


def _phys(values) -> PhysParams:
    return PhysParams(values["E"], values["omega"], values["h"], values["mu"])


# --- Commands ---


def cmd_orbit(args, cfg):
    p = _phys(resolve_params(args, cfg))
    curve, _ = resolve_boundary(args, cfg)
    block = cfg.get("orbit", {})
    xi = _pick(args, "xi", block, "xi", 0.0)
    alpha = _pick(args, "alpha", block, "alpha", 0.0)
    n = _pick(args, "iterations", block, "iterations", 100)
    if n < 0:
        raise ParameterError("iterations must be >= 0")
    if not abs(alpha) < math.pi / 2:
        raise ParameterError("alpha must lie in (-pi/2, pi/2)")
    rec = iterate_orbit(p, curve, BoundaryState(float(xi), float(alpha)), int(n))
    rio.write_csv(rio.portrait_rows([rec]), rio.PORTRAIT_COLUMNS, args.output)
    return 0


def cmd_portrait(args, cfg):
    p = _phys(resolve_params(args, cfg))
    curve, e = resolve_boundary(args, cfg)
    block = cfg.get("portrait", {})
    spec = PortraitSpec(
        params=p,
        eccentricity=e if e is not None else 0.0,
        xi_seeds=_pick(args, "xi_seeds", block, "xi_seeds", 24),
        alpha_seeds=_pick(args, "alpha_seeds", block, "alpha_seeds", 24),
        alpha_range=(_pick(args, "alpha_min", block, "alpha_min", -0.6), _pick(args, "alpha_max", block, "alpha_max", 0.6)),
        iterations=_pick(args, "iterations", block, "iterations", 500),
    )
    records = phase_portrait(spec, _threads(args, cfg), curve=curve)
    rio.write_csv(rio.portrait_rows(records), rio.PORTRAIT_COLUMNS, args.output)
    if args.svg:
        rio.portrait_svg(records, args.svg, title="phase portrait")
    return 0


def cmd_delta_scan(args, cfg):
    block = cfg.get("scan", {})
    x_param = _pick(args, "x_param", block, "x_param", "mu")
    y_param = _pick(args, "y_param", block, "y_param", "h")
    fixed = resolve_params(args, cfg, optional=(x_param, y_param))
    if x_param != "e" and y_param != "e":
        _, e = resolve_boundary(args, cfg)
        _require_ellipse(e, "delta-scan")
        fixed["e"] = e
    fixed = {k: v for k, v in fixed.items() if k not in (x_param, y_param)}
    ranges = {}
    for axis in ("x", "y"):
        lo = _pick(args, f"{axis}_min", block, f"{axis}_min")
        hi = _pick(args, f"{axis}_max", block, f"{axis}_max")
        if lo is None or hi is None:
            raise ParameterError(f"missing --{axis}-min/--{axis}-max")
        ranges[axis] = (lo, hi)
    spec = GridSpec(
        x_param=x_param, x_range=ranges["x"], x_n=_pick(args, "x_n", block, "x_n", 20),
        y_param=y_param, y_range=ranges["y"], y_n=_pick(args, "y_n", block, "y_n", 20),
        fixed=fixed,
    )
    cells = delta_sign_grid(spec, _threads(args, cfg))
    rio.write_csv(rio.scan_rows(cells), rio.SCAN_COLUMNS, args.output)
    return 0


def cmd_bifurcate(args, cfg):
    block = cfg.get("bifurcate", {})
    param = _pick(args, "param", block, "param", "h")
    axis = _pick(args, "axis", block, "axis", 1)
    lo = _pick(args, "lo", block, "lo")
    hi = _pick(args, "hi", block, "hi")
    if lo is None or hi is None:
        raise ParameterError("missing --lo/--hi")
    fixed = resolve_params(args, cfg, optional=(param,))
    if param != "e":
        _, e = resolve_boundary(args, cfg)
        _require_ellipse(e, "bifurcate")
        fixed["e"] = e
    fixed.pop(param, None)
    root = bifurcation_root(fixed, axis, param, (lo, hi))
    rio.write_json({"axis": axis, "param": param, "bracket": [lo, hi], "root": root}, sys.stdout)
    return 0


def cmd_freefall(args, cfg):
    p = _phys(resolve_params(args, cfg))
    curve, _ = resolve_boundary(args, cfg)
    n = _pick(args, "theta_samples", cfg.get("freefall", {}), "theta_samples", 91)
    if n < 2:
        raise ParameterError(f"--theta-samples must be >= 2, got {n!r}")
    samples = freefall_profile(p, 0.0, n, _threads(args, cfg), curve=curve)
    rio.write_csv(rio.freefall_rows(samples), rio.FREEFALL_COLUMNS, args.output)
    return 0


def cmd_brake(args, cfg):
    p = _phys(resolve_params(args, cfg))
    curve, _ = resolve_boundary(args, cfg)
    n = _pick(args, "grid_n", cfg.get("brake", {}), "grid_n", 200)
    if n < 2:
        raise ParameterError("--grid-n must be >= 2")
    found = find_brake_orbits(p, curve, grid_n=n)
    out = [
        {"theta": b.theta, "xi": b.states[0].xi, "alpha": b.states[0].alpha, "delta": b.delta, "closure": b.closure}
        for b in found
    ]
    rio.write_json({"brake_orbits": out, "count": len(out)}, sys.stdout)
    return 0


def _report_json(rep, extra: dict) -> dict:
    q = rep.quadruple
    out = {
        "xi": rep.xi,
        "quadruple": {"e0": q.E0, "eps_e": q.eps_E, "i0": q.I0, "eps_i": q.eps_I},
        "df": rep.DF,
        "df_xi": rep.DF_xi,
        "trace": rep.trace,
        "det": rep.det,
        "delta": rep.Delta,
        "delta_factors": {"a": rep.factors.A, "b": rep.factors.B, "c": rep.factors.C, "d": rep.factors.D},
        "classification": rep.classification.value,
    }
    out.update(extra)
    return out


def cmd_stability(args, cfg):
    p = _phys(resolve_params(args, cfg))
    curve, e = resolve_boundary(args, cfg)
    block = cfg.get("stability", {})
    xi = _pick(args, "xi", block, "xi")
    axis = None if args.xi is not None else _pick(args, "axis", block, "axis")
    if axis is None and xi is None:
        axis = 0
    if axis is not None:
        _require_ellipse(e, "stability --axis")
        rep = stability_report_elliptic(p, e, axis)
        general = stability_report(p, curve, rep.xi)
        out = _report_json(rep, {"axis": axis, "eccentricity": e, "delta_general": general.Delta})
    else:
        rep = stability_report(p, curve, xi)
        out = _report_json(rep, {"axis": None, "eccentricity": e})
    rio.write_json(out, sys.stdout)
    return 0


COMMANDS = {
    "orbit": cmd_orbit,
    "portrait": cmd_portrait,
    "delta-scan": cmd_delta_scan,
    "bifurcate": cmd_bifurcate,
    "freefall": cmd_freefall,
    "brake": cmd_brake,
    "stability": cmd_stability,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "selftest":
            return 0 if selftest.run() else 2
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ParameterError as exc:
        sys.stderr.write(f"invalid configuration: {exc}\n")
        return 1
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
