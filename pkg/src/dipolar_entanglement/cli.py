"""
Command-line front end.

Subcommands: point, from-physical, sweep, boundary, figure, fit, nspin.
Exit codes: 0 ok, 2 bad flags, 3 domain error, 4 unwritable output,
5 too many spins.

Physical-unit conversion lives here only; the library works in reduced units.
"""

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import tempfile

import numpy as np
from scipy import constants

from . import __version__, analytic
from .entanglement import concurrence
from .errors import DipolarError, DomainError, GeometryMismatch, SiteOutOfRange
from .spin_model import MAX_SPINS, ReducedParams, SpinGeometry, total_hamiltonian
from .sweep import (
    METHODS,
    SweepGrid,
    SweepTable,
    base_metadata,
    boundary_table,
    figure_data,
    fit_concurrence_vs_magnetization,
    run_sweep,
    trace_boundary,
)
from .thermal import gibbs, magnetization, partial_trace_pair

EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_OUTPUT = 4
EXIT_TOO_LARGE = 5

FIT_COLUMNS = ("a", "b", "residual_rms", "beta_min", "beta_max", "n_points")


class OutputError(Exception):
    pass


class TooManySpins(Exception):
    pass


# --------------------------------------------------------------------------
# parsing helpers

_ANGLE_RE = re.compile(r"^\s*(?P<num>[-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*(?P<den>[0-9.eE+-]+))?\s*$")


def parse_angle(text: str) -> float:
    """
    Accept decimals or symbolic multiples of pi: ``pi``, ``pi/2``, ``3pi/4``, ``2*pi/3``.

    ``pi/2`` maps to ``math.pi / 2`` exactly so the analytic path is used.
    """
    t = text.strip().lower()
    m = _ANGLE_RE.match(t)
    if m:
        num = m.group("num")
        factor = 1.0 if num in ("", "+") else (-1.0 if num == "-" else float(num))
        val = factor * math.pi
        if m.group("den"):
            val = val / float(m.group("den"))
        return val
    try:
        return float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def parse_axis(text: str, scalar=float) -> tuple:
    """
    Axis spec: a single value, a comma list, or ``start:stop:count``.

    ``start`` and ``stop`` are inclusive.
    """
    t = text.strip()
    try:
        if ":" in t:
            parts = t.split(":")
            if len(parts) != 3:
                raise ValueError
            lo, hi, n = scalar(parts[0]), scalar(parts[1]), int(parts[2])
            if n < 1:
                raise ValueError
            if n == 1:
                return (lo,)
            vals = list(np.linspace(lo, hi, n))
            # keep the symbolic endpoint bit-exact
            vals[0], vals[-1] = lo, hi
            return tuple(float(v) for v in vals)
        return tuple(scalar(p) for p in t.split(","))
    except (ValueError, argparse.ArgumentTypeError):
        raise argparse.ArgumentTypeError(f"bad axis specification: {text!r}") from None


def angle_axis(text: str) -> tuple:
    return parse_axis(text, parse_angle)


def float_axis(text: str) -> tuple:
    return parse_axis(text, float)


# --------------------------------------------------------------------------
# serialization


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def table_to_csv(table: SweepTable) -> str:
    """CSV with ``#``-prefixed metadata lines, 17 significant digits, ``\\n`` endings."""
    buf = io.StringIO()
    for key in sorted(table.metadata):
        buf.write(f"# {key}: {json.dumps(_jsonable(table.metadata[key]), sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(row.get(c)) for c in table.columns])
    return buf.getvalue()


def table_to_json(table: SweepTable) -> str:
    doc = {
        "meta": _jsonable(table.metadata),
        "rows": [{c: _jsonable(row.get(c)) for c in table.columns} for row in table.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def serialize(table: SweepTable, fmt: str) -> str:
    return table_to_json(table) if fmt == "json" else table_to_csv(table)


def write_atomic(path: str, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    except OSError as exc:
        raise OutputError(f"cannot write to {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise OutputError(f"cannot write to {path}: {exc}") from exc


def emit_table(table: SweepTable, args) -> None:
    text = serialize(table, args.format)
    summary = f"rows={len(table.rows)}"
    if "concurrence" in table.columns:
        summary += f" entangled_fraction={table.entangled_fraction():.6g}"
    errors = sum(1 for r in table.rows if r.get("error"))
    if errors:
        summary += f" errors={errors}"
    if args.out:
        write_atomic(args.out, text)
        print(f"{summary} -> {args.out}")
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


# --------------------------------------------------------------------------
# physical units


def _khz_per_gauss_to_rad_per_s_per_tesla(gamma_khz_per_g: float) -> float:
    return 2.0 * math.pi * gamma_khz_per_g * 1e3 * 1e4


def dipolar_frequency_khz(gamma_khz_per_g: float, distance_nm: float) -> float:
    """
    Dipolar coupling ``mu0/(4 pi) * hbar * gamma^2 / r^3`` as an ordinary frequency in kHz.
    """
    g = _khz_per_gauss_to_rad_per_s_per_tesla(gamma_khz_per_g)
    r = distance_nm * 1e-9
    omega = constants.mu_0 / (4 * math.pi) * constants.hbar * g * g / r**3
    return omega / (2 * math.pi) / 1e3


def reduced_from_frequencies(zeeman_khz: float, dipolar_khz: float, temperature_uk: float):
    """``(beta, d) = h f / (k_B T)`` for the Zeeman and dipolar frequencies."""
    kt = constants.k * temperature_uk * 1e-6
    return (constants.h * zeeman_khz * 1e3 / kt, constants.h * dipolar_khz * 1e3 / kt)


def critical_temperature_uk(zeeman_khz: float, dipolar_khz: float) -> float:
    """
    Temperature below which the pair is entangled at theta = pi/2.

    At fixed field and coupling the reduced point moves along the ray
    ``d / beta = f_dd / f_0``; the crossing with the boundary gives beta_c.
    """
    ray = analytic.boundary_beta_on_ray(dipolar_khz / zeeman_khz)
    return constants.h * zeeman_khz * 1e3 / (constants.k * ray.beta_c) * 1e6


# --------------------------------------------------------------------------
# geometry files


def read_geometry(path: str) -> SpinGeometry:
    """
    Plain text, one site per line as three Cartesian coordinates in units of
    the reference distance; ``#`` starts a comment.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise GeometryMismatch(f"cannot read geometry file {path}: {exc}") from exc
    sites = []
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.replace(",", " ").split()
        if len(parts) != 3:
            raise GeometryMismatch(f"{path}:{lineno}: expected 3 coordinates, got {len(parts)}")
        try:
            sites.append([float(p) for p in parts])
        except ValueError:
            raise GeometryMismatch(f"{path}:{lineno}: non-numeric coordinate") from None
    if not sites:
        raise GeometryMismatch(f"{path}: no sites")
    if len(sites) > MAX_SPINS:
        raise TooManySpins(f"{len(sites)} spins exceeds the limit of {MAX_SPINS}")
    return SpinGeometry.from_positions(sites)


# --------------------------------------------------------------------------
# reports


def point_report(params: ReducedParams, method: str = "both") -> dict:
    """Numeric concurrence and magnetization at one two-spin point, plus closed forms when they apply."""
    st = gibbs(total_hamiltonian(SpinGeometry.pair(), params))
    on_axis = params.theta == math.pi / 2 and params.phi == 0.0
    report = {
        "inputs": {"beta": params.beta, "d": params.d_ref, "theta": params.theta, "phi": params.phi},
        "concurrence_numeric": concurrence(st.rho).concurrence,
        "concurrence_analytic": None,
        "magnetization": magnetization(st.rho, 2),
        "boundary_beta_at_d": None,
    }
    if method in ("analytic", "both") and on_axis and not (params.beta == 0 and params.d_ref == 0):
        report["concurrence_analytic"] = analytic.concurrence_closed(params.beta, params.d_ref)
    if params.d_ref > 0:
        try:
            report["boundary_beta_at_d"] = analytic.boundary_beta_analytic(params.d_ref).beta_c
        except DipolarError:
            report["boundary_beta_at_d"] = None
    report["meta"] = base_metadata()
    return report


def _print_json(obj) -> None:
    print(json.dumps(_jsonable(obj), indent=1))


# --------------------------------------------------------------------------
# subcommands


def cmd_point(args) -> int:
    params = ReducedParams(args.beta, args.d, args.theta, args.phi)
    _print_json(point_report(params, args.method))
    return 0


def cmd_from_physical(args) -> int:
    for name in ("gamma", "field", "temperature"):
        if not getattr(args, name) > 0:
            raise DomainError(f"--{name} must be > 0")
    if args.distance is not None:
        if not args.distance > 0:
            raise DomainError("--distance must be > 0")
        f_dd = dipolar_frequency_khz(args.gamma, args.distance)
    else:
        if not args.dipolar_freq > 0:
            raise DomainError("--dipolar-freq must be > 0")
        f_dd = args.dipolar_freq
    f0 = args.gamma * args.field
    beta, d = reduced_from_frequencies(f0, f_dd, args.temperature)
    out = {
        "inputs": {
            "gamma_khz_per_gauss": args.gamma,
            "field_gauss": args.field,
            "temperature_uk": args.temperature,
            "distance_nm": args.distance,
            "dipolar_freq_khz": f_dd,
        },
        "zeeman_freq_khz": f0,
        "beta": beta,
        "d": d,
        "critical_temperature_uk": critical_temperature_uk(f0, f_dd),
    }
    _print_json(out)
    return 0


def _axis_arg(args, name):
    lo, hi, n = (getattr(args, f"{name}_min"), getattr(args, f"{name}_max"), getattr(args, f"{name}_steps"))
    if lo is None and hi is None and n is None:
        return getattr(args, name)
    if None in (lo, hi, n) or getattr(args, name) is not None:
        args._parser.error(f"use either --{name} or all of --{name}-min/--{name}-max/--{name}-steps")
    try:
        return parse_axis(f"{lo!r}:{hi!r}:{n}")
    except argparse.ArgumentTypeError as exc:
        args._parser.error(str(exc))


def cmd_sweep(args) -> int:
    beta_axis, d_axis = _axis_arg(args, "beta"), _axis_arg(args, "d")
    if beta_axis is None or d_axis is None:
        args._parser.error("both a beta axis and a d axis are required")
    grid = SweepGrid(beta_axis, d_axis, args.theta, args.phi, args.method)
    emit_table(run_sweep(grid, workers=args.workers), args)
    return 0


def cmd_boundary(args) -> int:
    points = trace_boundary(args.d, args.method)
    emit_table(boundary_table(points, args.method), args)
    return 0


def cmd_figure(args) -> int:
    emit_table(figure_data(args.figure_id), args)
    return 0


def cmd_fit(args) -> int:
    fit = fit_concurrence_vs_magnetization(args.d, args.beta_max, args.n_points)
    row = fit.as_dict()
    table = SweepTable(FIT_COLUMNS, [row], base_metadata(d=args.d))
    print(f"a={fit.a:.6g} b={fit.b:.6g} residual_rms={fit.residual_rms:.3g} n_points={fit.n_points}")
    if args.out:
        write_atomic(args.out, serialize(table, args.format))
    return 0


def cmd_nspin(args) -> int:
    geom = read_geometry(args.geometry)
    j, k = args.pair
    if geom.n_spins < 2:
        raise GeometryMismatch("need at least two spins")
    if not 1 <= j < k <= geom.n_spins:
        raise SiteOutOfRange(f"pair ({j}, {k}) invalid for {geom.n_spins} spins")
    if geom.n_spins == 2:
        (p,) = geom.pairs
        params = ReducedParams(args.beta, args.d_ref / p.r**3, p.theta, p.phi)
        report = point_report(params)
    else:
        params = ReducedParams(args.beta, args.d_ref)
        st = gibbs(total_hamiltonian(geom, params))
        pair_rho = partial_trace_pair(st.rho, geom.n_spins, j, k)
        report = {
            "inputs": {"beta": args.beta, "d_ref": args.d_ref},
            "concurrence_numeric": concurrence(pair_rho).concurrence,
            "concurrence_analytic": None,
            "magnetization": magnetization(st.rho, geom.n_spins),
            "boundary_beta_at_d": None,
            "meta": base_metadata(),
        }
    report["n_spins"] = geom.n_spins
    report["pair"] = [j, k]
    _print_json(report)
    return 0


# --------------------------------------------------------------------------
# parser


def _add_output(p):
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dipolar-entanglement",
        description="Thermal entanglement of dipolar-coupled spin-1/2 pairs in reduced units.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", help="evaluate one (beta, d, theta, phi) point")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--theta", type=parse_angle, default=math.pi / 2)
    p.add_argument("--phi", type=parse_angle, default=0.0)
    p.add_argument("--method", choices=METHODS, default="both")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("from-physical", help="convert physical parameters to (beta, d)")
    p.add_argument("--gamma", type=float, required=True, help="gyromagnetic ratio, kHz/G")
    p.add_argument("--field", type=float, required=True, help="external field, G")
    p.add_argument("--temperature", type=float, required=True, help="temperature, microkelvin")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--distance", type=float, help="internuclear distance, nm")
    g.add_argument("--dipolar-freq", type=float, help="dipolar coupling, kHz")
    p.set_defaults(func=cmd_from_physical)

    p = sub.add_parser("sweep", help="grid sweep over beta, d, theta, phi")
    for name in ("beta", "d"):
        p.add_argument(f"--{name}", type=float_axis, help="value, list a,b,c or start:stop:count")
        p.add_argument(f"--{name}-min", type=float)
        p.add_argument(f"--{name}-max", type=float)
        p.add_argument(f"--{name}-steps", type=int)
    p.add_argument("--theta", type=angle_axis, default=(math.pi / 2,))
    p.add_argument("--phi", type=angle_axis, default=(0.0,))
    p.add_argument("--method", choices=METHODS, default="numeric")
    p.add_argument("--workers", type=int, help="worker processes (default: $DIPOLAR_WORKERS or CPU count)")
    _add_output(p)
    p.set_defaults(func=cmd_sweep, _parser=p)

    p = sub.add_parser("boundary", help="critical beta versus d")
    p.add_argument("--d", type=float_axis, required=True)
    p.add_argument("--method", choices=("numeric", "analytic"), default="analytic")
    _add_output(p)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("figure", help="dataset behind a figure (1, 2, 3, 4, 4a, 4b, 5)")
    p.add_argument("figure_id")
    _add_output(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("fit", help="linear fit of concurrence against magnetization")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--beta-max", type=float, required=True)
    p.add_argument("--n-points", type=int, default=200)
    _add_output(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("nspin", help="pair concurrence inside an N-spin cluster")
    p.add_argument("--geometry", required=True, help="file with one 'x y z' site per line")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--d-ref", type=float, required=True)
    p.add_argument("--pair", type=int, nargs=2, default=(1, 2), metavar=("J", "K"))
    p.set_defaults(func=cmd_nspin)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TooManySpins as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT
    except DipolarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
