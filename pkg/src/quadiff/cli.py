"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 not a GMN differential,
3 saddle trajectory present, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
from typing import Sequence

from . import __version__
from .differential import (QuadraticDifferential, differential_from_record, hat_rank,
                           validate_gmn)
from .errors import (InvalidConfiguration, InvalidPeriods, InvalidScheme, NumericalError,
                     QuadiffError, RingDomainSuspected, SaddlePresent, SeedTooCritical)
from .flow import ToleranceSet, trace
from .local_models import double_pole_residue

EXIT_OK, EXIT_INPUT, EXIT_GMN, EXIT_SADDLE, EXIT_NUMERICAL = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


class GmnFailure(Exception):
    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.failures))


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            rec = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from e
    if not isinstance(rec, dict):
        raise InputError(f"{path}: expected a JSON object")
    return rec


def _load_phi(path: str) -> QuadraticDifferential:
    rec = _load_json(path)
    try:
        return differential_from_record(rec)
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as e:
        raise InputError(f"{path}: {e}") from e


def _require_gmn(phi: QuadraticDifferential):
    report = validate_gmn(phi)
    if not report.is_gmn:
        raise GmnFailure(report)
    return report


def _controls(args) -> ToleranceSet:
    return ToleranceSet(delta_zero=args.tol_zero, eps_saddle=args.tol_saddle)


def _strip_controls(args) -> ToleranceSet:
    return ToleranceSet(delta_zero=args.tol_zero, eps_saddle=args.tol_saddle, pole_basin=1e-3)


def _emit(obj, args) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _complex_arg(text: str) -> complex:
    try:
        if "," in text:
            re, im = text.split(",")
            return complex(float(re), float(im))
        return complex(text.replace("i", "j"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"not a complex number: {text}") from e


# -- subcommands ------------------------------------------------------------


def cmd_analyze(args) -> int:
    phi = _load_phi(args.input)
    report = validate_gmn(phi)
    out = phi.to_json()
    out["gmn"] = report.to_json()
    residues = []
    for c in phi.poles:
        if c.order == -2:
            d = double_pole_residue(phi, c.point)
            residues.append({"pole": c.index, "b": [d.b.real, d.b.imag], "regime": d.regime})
    out["double_poles"] = residues
    if report.is_gmn:
        try:
            out["N"] = hat_rank(0, phi.polar_type)
        except InvalidConfiguration:
            out["N"] = None
    _emit(out, args)
    if not report.is_gmn:
        raise GmnFailure(report)
    return EXIT_OK


def cmd_trace(args) -> int:
    phi = _load_phi(args.input)
    sample = trace(phi, args.seed, args.direction, args.phase, _controls(args),
                   branch=args.branch)
    _emit(sample.to_json(), args)
    return EXIT_OK


def cmd_separatrices(args) -> int:
    from .separatrix import separatrices
    phi = _load_phi(args.input)
    _require_gmn(phi)
    seps = separatrices(phi, args.phase, _controls(args))
    _emit([s.to_json() for s in seps], args)
    return EXIT_OK


def _decompose(args):
    from .strips import decompose
    phi = _load_phi(args.input)
    _require_gmn(phi)
    if args.phase:
        # phase-theta strips are the horizontal strips of exp(-2 pi i theta) phi
        phi = phi.scaled(cmath.exp(-2j * math.pi * args.phase))
    return decompose(phi, _strip_controls(args))


def cmd_strips(args) -> int:
    dec = _decompose(args)
    _emit(dec.to_json(), args)
    return EXIT_OK


def cmd_triangulate(args) -> int:
    from .strips import wkb_triangulation
    dec = _decompose(args)
    _emit(wkb_triangulation(dec).to_json(), args)
    return EXIT_OK


def cmd_periods(args) -> int:
    from .periods import period_vector, periods_to_json
    dec = _decompose(args)
    _emit(periods_to_json(dec, period_vector(dec)), args)
    return EXIT_OK


def cmd_scan(args) -> int:
    from .separatrix import scan_saddle_phases
    phi = _load_phi(args.input)
    _require_gmn(phi)
    events = scan_saddle_phases(phi, args.grid, _controls(args))
    _emit([e.to_json() for e in events], args)
    return EXIT_OK


def cmd_glue(args) -> int:
    from .glue import GluingScheme, build_surface, extract_scheme, scheme_record
    rec = _load_json(args.input)
    if "ray_pairing" in rec:
        scheme = GluingScheme.from_json(rec)
        try:
            V = [complex(re, im) for re, im in rec.get("periods", [])]
        except (TypeError, ValueError) as e:
            raise InvalidScheme(f"malformed period list: {e}") from e
        surface = build_surface(scheme, V)
        out = scheme_record(scheme, surface.V)
    else:
        dec = _decompose(args)
        scheme, V = extract_scheme(dec)
        surface = build_surface(scheme, V)
        out = scheme_record(scheme, V)
    out["invariants"] = surface.invariants
    _emit(out, args)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .svg import PlotSpec, plot_differential
    phi = _load_phi(args.input)
    try:
        spec = PlotSpec(region=tuple(args.region), density=args.density,
                        equidistant=args.spacing is not None,
                        spacing=args.spacing or 0.25, width=args.width)
    except ValueError as e:
        raise InputError(str(e)) from e
    arcs = None
    if args.arcs:
        from .strips import decompose
        _require_gmn(phi)
        dec = decompose(phi, _strip_controls(args))
        arcs = [s.generic_witness.points for s in dec.strips]
    svg = plot_differential(phi, spec, args.phase, arcs=arcs, controls=_controls(args))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadiff", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"quadiff {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="differential (or gluing scheme) JSON file")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--phase", type=float, default=0.0, help="phase theta in [0, 1)")
    common.add_argument("--tol-zero", type=float, default=None, help="delta_zero")
    common.add_argument("--tol-saddle", type=float, default=None, help="eps_saddle")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="divisor, GMN check, N").set_defaults(
        func=cmd_analyze)
    t = sub.add_parser("trace", parents=[common], help="trace one trajectory")
    t.add_argument("--seed", type=_complex_arg, required=True, help="re,im")
    t.add_argument("--direction", type=int, choices=(1, -1), default=1)
    t.add_argument("--branch", type=int, choices=(1, -1), default=1)
    t.set_defaults(func=cmd_trace)
    for name, func, text in (
            ("separatrices", cmd_separatrices, "critical trajectories from the zeros"),
            ("strips", cmd_strips, "horizontal strip decomposition"),
            ("triangulate", cmd_triangulate, "WKB triangulation"),
            ("periods", cmd_periods, "strip period vector")):
        sub.add_parser(name, parents=[common], help=text).set_defaults(func=func)
    s = sub.add_parser("scan-saddles", parents=[common], help="phases with saddle connections")
    s.add_argument("--grid", type=int, default=720)
    s.set_defaults(func=cmd_scan)
    sub.add_parser("glue", parents=[common],
                   help="extract a gluing scheme, or rebuild from one").set_defaults(
        func=cmd_glue)
    pl = sub.add_parser("plot", parents=[common], help="SVG foliation plot")
    pl.add_argument("--region", type=float, nargs=4, default=[-2, 2, -2, 2],
                    metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    pl.add_argument("--density", type=int, default=8)
    pl.add_argument("--spacing", type=float, default=None,
                    help="seed leaves at this metric spacing along a vertical leaf")
    pl.add_argument("--width", type=int, default=600)
    pl.add_argument("--arcs", action="store_true", help="overlay WKB triangulation arcs")
    pl.set_defaults(func=cmd_plot)
    return p


def dispatch(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (InvalidScheme, InvalidPeriods) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except GmnFailure as e:
        print(json.dumps(e.report.to_json(), indent=2, sort_keys=True), file=sys.stderr)
        return EXIT_GMN
    except InvalidConfiguration as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GMN
    except SaddlePresent as e:
        event = e.event.to_json() if hasattr(e.event, "to_json") else str(e.event)
        print(json.dumps({"saddle": event}, sort_keys=True), file=sys.stderr)
        return EXIT_SADDLE
    except SeedTooCritical as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, RingDomainSuspected, QuadiffError) as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
