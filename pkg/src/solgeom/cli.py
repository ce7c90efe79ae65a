"""Command-line front end: trajectories, invariant tables, distances and sweeps as CSV or JSON.

Exit codes: 0 on success, 2 on argument or domain errors, 3 on solver,
integration or output failures.  Data go to ``--output`` (default standard
output); diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from typing import Iterable, Optional, Sequence

import numpy as np

from .distance import asymptotic_table, distance, shoot_distance, sphere_points
from .errors import DomainError, IntegrationError, SolverError
from .flow import Trajectory, integrate, spec_from_initial, spec_from_kh, time_span
from .group import Point
from .invariants import invariant_row, modulus_grid
from .nil import nil_from_initial, nil_states
from .rendezvous import rendezvous_check

__all__ = ["TRAJECTORY_HEADER", "emit_trajectory", "emit_rows", "build_parser", "run", "main"]

TRAJECTORY_HEADER = "t,x,y,z,zdot,res_speed,res_grayson"
EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 2, 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_json_value(v) for v in value.tolist()]
    return value


def emit_rows(rows: Sequence[dict], fmt: str, meta: Optional[dict] = None) -> bytes:
    """Serialize a list of flat records as CSV (header from the first row) or JSON."""
    if fmt == "json":
        doc = {"meta": {k: _json_value(v) for k, v in (meta or {}).items()}}
        doc["samples"] = [{k: _json_value(v) for k, v in r.items()} for r in rows]
        return (json.dumps(doc, indent=None, separators=(",", ":")) + "\n").encode()
    if not rows:
        return b""
    buf = io.StringIO()
    cols = list(rows[0].keys())
    buf.write(",".join(cols) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(r[c]) for c in cols) + "\n")
    return buf.getvalue().encode()


def emit_trajectory(traj: Trajectory, fmt: str) -> bytes:
    """CSV with header ``t,x,y,z,zdot,res_speed,res_grayson`` or JSON with ``meta`` and ``samples``.

    Floats use the shortest repr that round-trips, so parsing the output
    reproduces every sample bit for bit.
    """
    cols = TRAJECTORY_HEADER.split(",")
    data = np.column_stack([traj.t, traj.states, traj.res_speed, traj.res_grayson])
    if fmt == "json":
        spec = traj.spec
        meta = {
            "a": spec.a,
            "b": spec.b,
            "c": spec.c,
            "k": spec.k,
            "h": spec.h,
            "class": spec.kind,
            "tol": traj.tol,
        }
        samples = [dict(zip(cols, map(float, row))) for row in data]
        return (json.dumps({"meta": meta, "samples": samples}, separators=(",", ":")) + "\n").encode()
    buf = io.StringIO()
    buf.write(TRAJECTORY_HEADER + "\n")
    for row in data:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    return buf.getvalue().encode()


# ----------------------------------------------------------------------------
# argument types


def _triple(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sign(text: str) -> int:
    if text in ("+", "+1", "1"):
        return 1
    if text in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be +1 or -1, got {text!r}")


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default="-", help="output path, '-' for standard output")


def _add_tol(p):
    p.add_argument("--tol", type=float, default=1e-10)


def _add_sampling(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--dt", type=float, help="sample spacing")
    g.add_argument("--num", type=int, default=201, help="number of samples")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="solgeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", help="A, T, M, H and their derivatives")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=float, action="append", help="modulus (repeatable)")
    g.add_argument("--k-grid", type=_float_list, metavar="START,STOP,NUM")
    _add_output(p)

    p = sub.add_parser("geodesic", help="sample a geodesic with residual diagnostics")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=float, help="modulus")
    g.add_argument("--point", type=_triple, help="initial point x,y,z")
    p.add_argument("--velocity", type=_triple, help="unit initial velocity (with --point)")
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--sign-a", type=_sign, default=1)
    p.add_argument("--sign-b", type=_sign, default=1)
    p.add_argument("--z0", type=float)
    p.add_argument("--descending", action="store_true")
    span = p.add_mutually_exclusive_group(required=True)
    span.add_argument("--periods", type=float)
    span.add_argument("--duration", type=float)
    p.add_argument("--t0", type=float)
    _add_sampling(p)
    _add_tol(p)
    _add_output(p)

    p = sub.add_parser("partner", help="rendezvous of a geodesic and its partner")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    _add_tol(p)
    _add_output(p)

    p = sub.add_parser("distance", help="distance between two points")
    p.add_argument("--from", dest="p", type=_triple, required=True)
    p.add_argument("--to", dest="q", type=_triple, required=True)
    p.add_argument("--n-starts", type=int, default=32)
    p.add_argument("--shoot-only", action="store_true", help="skip closed forms")
    _add_tol(p)
    _add_output(p)

    p = sub.add_parser("sphere", help="geodesic sphere point cloud clipped at cut length")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--n-polar", type=int, default=12)
    p.add_argument("--n-azimuth", type=int, default=24)
    _add_tol(p)
    _add_output(p)

    p = sub.add_parser("asymptotic", help="T(k) against 4 log(lambda) in the ground plane")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--lambdas", type=_float_list, required=True)
    _add_output(p)

    p = sub.add_parser("nil", help="closed-form NIL geodesic samples")
    p.add_argument("--point", type=_triple, default=(0.0, 0.0, 0.0))
    p.add_argument("--velocity", type=_triple, required=True)
    p.add_argument("--t1", type=float, required=True)
    _add_sampling(p)
    _add_output(p)
    return parser


# ----------------------------------------------------------------------------
# subcommands


def _cmd_invariants(args) -> bytes:
    if args.k_grid is not None:
        if len(args.k_grid) != 3 or args.k_grid[2] != int(args.k_grid[2]):
            raise DomainError("--k-grid needs START,STOP,NUM with integer NUM")
        ks = modulus_grid(args.k_grid[0], args.k_grid[1], int(args.k_grid[2]))
    else:
        ks = args.k
    return emit_rows([invariant_row(k) for k in ks], args.format)


def _geodesic_spec(args):
    if args.k is not None:
        return spec_from_kh(
            args.k, args.h, args.c, args.sign_a, args.sign_b, args.z0, args.descending
        )
    if args.velocity is None:
        raise DomainError("--point needs --velocity")
    return spec_from_initial(Point(*args.point), args.velocity)


def _cmd_geodesic(args) -> bytes:
    spec = _geodesic_spec(args)
    t0, t1 = time_span(spec, args.periods, args.duration, args.t0)
    traj = integrate(spec, t0, t1, args.tol, dt=args.dt, num=args.num)
    return emit_trajectory(traj, args.format)


def _cmd_partner(args) -> bytes:
    spec = spec_from_kh(args.k, args.h, args.c)
    rep = rendezvous_check(spec, args.t1, args.tol)
    row = {
        "t1": rep.t1,
        "period": rep.period,
        "meet_error": rep.meet_error,
        "distinct": rep.distinct,
        "length_original": rep.length_original,
        "length_partner": rep.length_partner,
        "x_original": rep.end_original[0],
        "y_original": rep.end_original[1],
        "z_original": rep.end_original[2],
        "x_partner": rep.end_partner[0],
        "y_partner": rep.end_partner[1],
        "z_partner": rep.end_partner[2],
    }
    meta = {"a": spec.a, "b": spec.b, "c": spec.c, "k": spec.k, "h": spec.h, "tol": args.tol}
    return emit_rows([row], args.format, meta)


def _cmd_distance(args) -> bytes:
    solver = shoot_distance if args.shoot_only else distance
    res = solver(Point(*args.p), Point(*args.q), args.tol, args.n_starts)
    w = res.witness
    row = {
        "distance": res.value,
        "method": res.method,
        "residual": res.residual,
        "a": w.a,
        "b": w.b,
        "c": w.c,
        "k": w.k,
        "class": w.kind,
    }
    return emit_rows([row], args.format, {"tol": args.tol})


def _cmd_sphere(args) -> bytes:
    rows = sphere_points(args.radius, args.n_polar, args.n_azimuth, args.tol)
    return emit_rows(rows, args.format, {"radius": args.radius, "tol": args.tol})


def _cmd_asymptotic(args) -> bytes:
    rows = asymptotic_table(args.theta, args.lambdas)
    return emit_rows(rows, args.format, {"theta": args.theta})


def _cmd_nil(args) -> bytes:
    g = nil_from_initial(Point(*args.point), args.velocity)
    if not args.t1 > 0.0:
        raise DomainError(f"--t1 must be positive, got {args.t1}")
    if args.dt is not None:
        if not args.dt > 0.0:
            raise DomainError(f"--dt must be positive, got {args.dt}")
        times = np.arange(0.0, args.t1, args.dt)
    else:
        times = np.linspace(0.0, args.t1, args.num)
    cols = ("x", "y", "z", "xdot", "ydot", "zdot")
    rows = [dict(t=float(t), **dict(zip(cols, map(float, r)))) for t, r in zip(times, nil_states(g, times))]
    meta = {"b": g.b, "c": g.c, "amplitude": g.amplitude, "phase": g.phase}
    return emit_rows(rows, args.format, meta)


_COMMANDS = {
    "invariants": _cmd_invariants,
    "geodesic": _cmd_geodesic,
    "partner": _cmd_partner,
    "distance": _cmd_distance,
    "sphere": _cmd_sphere,
    "asymptotic": _cmd_asymptotic,
    "nil": _cmd_nil,
}


def _write(data: bytes, path: str):
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def run(argv: Optional[Iterable[str]] = None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        data = _COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"solgeom {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, IntegrationError, ArithmeticError, RuntimeError) as exc:
        print(f"solgeom {args.command}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        _write(data, args.output)
    except OSError as exc:
        print(f"solgeom {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def main() -> None:
    sys.exit(run())
