"""Command line front end.

Machine-readable records are JSON with sorted keys, so equal inputs give
byte-identical output.  Exit codes: 0 success, 1 failure, 2 a requested
quantity is undefined (center of mass or angular momentum with nonzero
linear momentum).  Usage errors exit with 1.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import conserved as cons
from . import verify as ver
from .data import KINDS, BoostVector, DataFormatError, generate, read_data, validate, write_data, write_fields
from .embedding import solve
from .geometry import (
    TRACE_VARIANTS,
    IllConditionedFit,
    NonSpacelikeH,
    coordinate_sphere_expansion,
    extract_expansion,
    sample_mean_curvature,
)

EXIT_OK, EXIT_FAIL, EXIT_UNDEFINED = 0, 1, 2
AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}

CSV_HELP = """CSV columns:
  boost --csv:    rapidity, a0, a1, a2, a3, boost_energy, linear_prediction, abs_error
  extract --csv:  radius, max_abs_residual, r4_weighted_residual
"""


class CliError(Exception):
    def __init__(self, message, code=EXIT_FAIL):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    input: Path | None
    output: Path | None
    band_limit: int | None
    seed: int
    radii: tuple
    tolerances: ver.Tolerances

    @classmethod
    def from_args(cls, args):
        tol = ver.Tolerances(identity=args.tol_identity, momentum=args.tol_momentum,
                             solvable=args.tol_solvable, embedding=args.tol_embedding,
                             fit=args.tol_fit)
        cfg = cls(args.command, args.input, args.output, args.band_limit, args.seed,
                  tuple(getattr(args, "radii", ()) or ()), tol)
        cfg.check()
        return cfg

    def check(self):
        if self.band_limit is not None and not 8 <= self.band_limit <= 128:
            raise CliError(f"--band-limit must lie in [8, 128], got {self.band_limit}")
        if self.input is not None and not self.input.is_file():
            raise CliError(f"input file not found: {self.input}")
        if self.radii:
            if min(self.radii) < 10:
                raise CliError("radii must be at least 10")
            if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
                raise CliError("radii must be strictly increasing")


def _dump(record):
    return json.dumps(record, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _emit(record, path=None):
    text = _dump(record)
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load(cfg):
    if cfg.input is None:
        raise CliError("--input is required")
    try:
        d = read_data(cfg.input)
    except (DataFormatError, OSError) as exc:
        raise CliError(f"{cfg.input}: {exc}") from None
    if cfg.band_limit is not None and cfg.band_limit != d.grid.L:
        raise CliError(f"--band-limit {cfg.band_limit} does not match file band limit {d.grid.L}")
    return d


def _vec(v):
    return [float(x) for x in v]


def _axis(text):
    if text in AXES:
        return AXES[text]
    try:
        v = tuple(float(x) for x in text.split(","))
    except ValueError:
        v = ()
    if len(v) != 3 or not any(v):
        raise argparse.ArgumentTypeError("axis must be x, y, z or three comma-separated numbers")
    return v


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) for x in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


# -- commands ------------------------------------------------------------------


def cmd_gen(cfg, args):
    if cfg.output is None:
        raise CliError("--output is required")
    try:
        d = generate(args.kind, cfg.band_limit or 32, m0=args.m0, seed=cfg.seed, lmax=args.lmax,
                     amplitude=args.amplitude, zero_momentum=args.zero_momentum, matter=args.matter)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    write_data(d, cfg.output)
    return EXIT_OK


def cmd_validate(cfg, args):
    d = _load(cfg)
    report = validate(d)
    _emit({"valid": not report, "violations": report})
    return EXIT_OK if not report else EXIT_FAIL


def cmd_compute(cfg, args):
    d = _load(cfg)
    report = validate(d)
    if report:
        raise CliError(f"invalid data: {report}")
    cs = cons.conserved_set(d, cfg.tolerances.momentum)
    _emit(cs.to_record(), cfg.output)
    if args.require_com and cs.C is None:
        sys.stderr.write(f"center of mass undefined: {cs.undefined['C']}\n")
        return EXIT_UNDEFINED
    return EXIT_OK


def cmd_boost(cfg, args):
    d = _load(cfg)
    E, P = cons.energy_momentum(d)
    rows = []
    for beta in args.rapidity:
        a = BoostVector.from_rapidity(beta, args.axis)
        value = cons.boost_energy(d, a)
        pred = a.a0 * E + float(np.dot(a.a, P))
        rows.append([beta, a.a0, *a.a, value, pred, abs(value - pred)])
    record = {
        "E": float(E), "P": _vec(P), "axis": list(args.axis),
        "rows": [dict(zip(("rapidity", "a0", "a1", "a2", "a3", "boost_energy",
                           "linear_prediction", "abs_error"), map(float, r))) for r in rows],
    }
    try:
        M, astar = cons.rest_frame(d)
        record["M_rest"], record["rest_frame"] = M, [astar.a0, *astar.a]
    except cons.NullOrSpacelikeMomentum as exc:
        record["M_rest"] = record["rest_frame"] = None
        record["undefined"] = {"M_rest": str(exc)}
    if args.csv:
        _write_csv(args.csv, ["rapidity", "a0", "a1", "a2", "a3", "boost_energy",
                              "linear_prediction", "abs_error"], rows)
    _emit(record, cfg.output)
    return EXIT_OK


def cmd_embed(cfg, args):
    d = _load(cfg)
    a = BoostVector.from_rapidity(args.rapidity, args.axis)
    h = coordinate_sphere_expansion(d).h_m2
    sol = solve(h, a, cfg.tolerances.solvable)
    record = {
        "boost": [a.a0, *a.a],
        "obstruction": _vec(sol.obstruction),
        "solvable": sol.solvable,
        "residual": None if math.isnan(sol.residual) else sol.residual,
    }
    if sol.solvable and cfg.output is not None:
        write_fields({"X0_0": sol.X0_0}, cfg.output)
        record["X0_0_file"] = str(cfg.output)
    _emit(record, args.record)
    return EXIT_OK


def cmd_extract(cfg, args):
    d = _load(cfg)
    radii = cfg.radii or (100.0, 200.0, 400.0, 800.0)
    try:
        fit = extract_expansion(sample_mean_curvature(d, radii), args.orders, known={1: 2.0})
    except (IllConditionedFit, NonSpacelikeH, ValueError) as exc:
        raise CliError(str(exc)) from None
    record = {
        "radii": list(fit.radii),
        "orders": list(fit.orders),
        "condition": fit.condition,
        "max_residual": fit.max_residual,
        "coefficient_sup": {str(k): c.sup() for k, c in fit.coefficients.items()},
    }
    ok = True
    if 2 in fit.coefficients:
        err = (fit.coefficients[2] - coordinate_sphere_expansion(d).h_m2).sup()
        record["h_m2_error"] = err
        ok = err <= cfg.tolerances.fit
    if 3 in fit.coefficients:
        errors = {v: (fit.coefficients[3] - coordinate_sphere_expansion(d, v).h_m3_truncated).sup()
                  for v in TRACE_VARIANTS}
        record["h_m3_error"] = errors
        record["trace_variant"] = min(errors, key=errors.get)
    if args.csv:
        _write_csv(args.csv, ["radius", "max_abs_residual", "r4_weighted_residual"],
                   [(r, e, e * r ** 4) for r, e in zip(fit.radii, fit.residuals)])
    _emit(record, cfg.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg, args):
    ctx = ver.Context(seed=cfg.seed, band_limit=cfg.band_limit or 32, tol=cfg.tolerances,
                      fault=args.inject_fault)
    try:
        results = ver.run(ctx, args.only)
    except KeyError as exc:
        raise CliError(str(exc.args[0])) from None
    adjudication = next((r.name for r in results if r.name.startswith("oracle selects")), None)
    record = {
        "seed": cfg.seed,
        "band_limit": ctx.band_limit,
        "tolerances": vars(cfg.tolerances),
        "fault": args.inject_fault,
        "checks": [r.to_record() for r in results],
        "trace_variant_adjudication": adjudication,
        "passed": all(r.passed for r in results),
    }
    if cfg.output is not None:
        _emit(record, cfg.output)
    width = max(len(r.name) for r in results) if results else 0
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        sys.stdout.write(f"{flag}  {r.group:<20} {r.name:<{width}}  "
                         f"observed={r.observed:.3e}  tol={r.tolerance:.1e}\n")
    t = cfg.tolerances
    sys.stdout.write(f"tolerances: identity={t.identity:g} momentum={t.momentum:g} "
                     f"solvable={t.solvable:g} embedding={t.embedding:g} fit={t.fit:g}\n")
    return EXIT_OK if record["passed"] else EXIT_FAIL


COMMANDS = {
    "gen": cmd_gen, "validate": cmd_validate, "compute": cmd_compute, "boost": cmd_boost,
    "embed": cmd_embed, "extract": cmd_extract, "verify": cmd_verify,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="data file to read")
    common.add_argument("--output", type=Path, help="file to write (default: stdout)")
    common.add_argument("--band-limit", type=int, help="band limit L, 8..128")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-identity", type=float, default=1e-10,
                        help="exact identities (default 1e-10)")
    common.add_argument("--tol-momentum", type=float, default=1e-8,
                        help="relative |P| below which C and J are defined (default 1e-8)")
    common.add_argument("--tol-solvable", type=float, default=1e-10,
                        help="relative l<=1 obstruction for solvability (default 1e-10)")
    common.add_argument("--tol-embedding", type=float, default=1e-8,
                        help="embedding identities and center-of-mass routes (default 1e-8)")
    common.add_argument("--tol-fit", type=float, default=1e-6,
                        help="coefficients recovered by radial fits (default 1e-6)")

    parser = argparse.ArgumentParser(
        prog="ahconserved", description="Conserved quantities of asymptotically hyperbolic data.",
        epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic data file")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--m0", type=float, default=1.0)
    p.add_argument("--lmax", type=int, default=6)
    p.add_argument("--amplitude", type=float, default=0.05)
    p.add_argument("--zero-momentum", action="store_true")
    p.add_argument("--matter", action="store_true")

    sub.add_parser("validate", parents=[common], help="check data invariants")

    p = sub.add_parser("compute", parents=[common], help="energy, momentum, C, J, loss rates")
    p.add_argument("--require-com", action="store_true",
                   help="exit 2 if the center of mass is undefined")

    p = sub.add_parser("boost", parents=[common], help="boosted energy over rapidities",
                       epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--rapidity", type=float, nargs="+", default=[0.0])
    p.add_argument("--axis", type=_axis, default=AXES["z"], help="x, y, z or 'a,b,c'")
    p.add_argument("--csv", type=Path)

    p = sub.add_parser("embed", parents=[common], help="solve the optimal embedding equation")
    p.add_argument("--rapidity", type=float, default=0.0)
    p.add_argument("--axis", type=_axis, default=AXES["z"])
    p.add_argument("--record", type=Path, help="write the JSON record here (default: stdout)")

    p = sub.add_parser("extract", parents=[common], help="fit |H| samples in powers of 1/r",
                       epilog=CSV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--radii", type=float, nargs="+")
    p.add_argument("--orders", type=int, nargs="+", default=[2, 3, 4])
    p.add_argument("--csv", type=Path)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--only", nargs="+", metavar="GROUP", help=f"groups: {', '.join(ver.REGISTRY)}")
    p.add_argument("--inject-fault", choices=ver.FAULTS)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; 2 is reserved for the undefined-quantity gate
        return EXIT_OK if exc.code in (0, None) else EXIT_FAIL
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[args.command](cfg, args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
