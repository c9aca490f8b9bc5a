"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure, 4 zeros found off the critical line.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import census, paperchecks, specfun
from .errors import ContourThroughZero, NumericalError
from .specfun import EvalOptions, PseudoGammaParams

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC, EXIT_OFFLINE = 0, 1, 2, 3, 4
SAFE_HEIGHT_CAP = 1000.0

log = logging.getLogger("xicensus")


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads (default: $ZETA_CENSUS_THREADS or 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=float, default=1e-12, help="target absolute error")
    common.add_argument("--height-cap", type=float, default=census.HEIGHT_CAP)
    common.add_argument("--unsafe-heights", action="store_true",
                        help=f"allow a height cap above {SAFE_HEIGHT_CAP:g}")
    common.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="xicensus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a special function at one point")
    p.add_argument("--function", required=True, choices=("zeta", "xi", "gamma", "loggamma", "nabla", "B"))
    p.add_argument("--re", type=float, required=True)
    p.add_argument("--im", type=float, default=0.0)
    p.add_argument("--Y", type=float, default=None, help="height parameter of the pseudo Gamma function")

    p = sub.add_parser("zeros", parents=[common], help="critical-line zero census as CSV")
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("count", parents=[common], help="N(T) by the argument principle")
    p.add_argument("--height", type=float, required=True)

    p = sub.add_parser("density", parents=[common], help="zero counts off the critical line")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--height", type=float, required=True)

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--suite", action="append", default=None,
                   help=f"suite name or 'all' (repeatable): {', '.join(paperchecks.SUITES)}")
    p.add_argument("--json", type=Path, default=None, help="write the JSON report here")
    return parser


def _emit(args, payload: dict, plain: str) -> None:
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(plain)


def _check_height(parser, args, T: float) -> None:
    if not T <= args.height_cap:
        parser.error(f"--height {T:g} exceeds --height-cap {args.height_cap:g}")


def _xi_rel_err(s: complex, opts: EvalOptions) -> float:
    """Relative error of xi inherited from the zeta evaluation it uses."""
    w = s if s.real >= 0.5 else 1 - s
    if abs(w - 1) < 1e-6:
        # local expansion about the pole, truncated at second order
        return abs(w - 1) ** 3 + 1e-15
    z, ez = specfun.zeta_with_error(w, opts)
    return float(ez) / max(abs(z), 1e-300) + 1e-15


def cmd_eval(parser, args, opts: EvalOptions) -> int:
    s = complex(args.re, args.im)
    fn = args.function
    if fn in ("nabla", "B") and args.Y is None:
        parser.error(f"--Y is required for {fn}")
    if fn == "zeta":
        value, err = specfun.zeta_with_error(s, opts)
        err = float(err)
    elif fn == "xi":
        value = specfun.xi(s, opts)
        err = abs(value) * _xi_rel_err(s, opts)
    elif fn == "gamma":
        value = specfun.gamma(s, opts)
        err = 1e-14 * abs(value)
    elif fn == "loggamma":
        value = specfun.log_gamma(s, opts)
        err = 1e-14 * max(1.0, abs(value))
    elif fn == "nabla":
        value = specfun.nabla(s, PseudoGammaParams(args.Y))
        err = 4 * math.ulp(abs(value))
    else:
        value = specfun.ratio_B(s, PseudoGammaParams(args.Y), opts)
        err = abs(value) * _xi_rel_err(s, opts)
    value = complex(value)
    _emit(args, {"function": fn, "re": value.real, "im": value.imag, "error": err},
          f"{value.real:.17g} {value.imag:.17g}\nerror {err:.3g}")
    return EXIT_OK


def cmd_zeros(parser, args, opts: EvalOptions) -> int:
    _check_height(parser, args, args.height)
    if not args.height > 2:
        parser.error("--height must exceed 2")
    zeros = census.locate_critical_zeros(args.height, opts, height_cap=args.height_cap)
    if args.out is not None:
        census.write_census_csv(zeros, args.out)
        summary = sys.stdout
    else:
        census.write_census_csv(zeros, sys.stdout)
        summary = sys.stderr
    if args.height > 2 * math.pi:
        main = census.rvm_main_term(args.height)
        print(f"{len(zeros)} zeros up to {args.height:g}; main term {main:.4f}; "
              f"difference {len(zeros) - main:+.4f}", file=summary)
    else:
        print(f"{len(zeros)} zeros up to {args.height:g}", file=summary)
    return EXIT_OK


def cmd_count(parser, args, opts: EvalOptions) -> int:
    _check_height(parser, args, args.height)
    if not args.height > 2:
        parser.error("--height must exceed 2")
    n = census.count_zeros_NT(args.height, opts, height_cap=args.height_cap, threads=args.threads)
    located = len(census.locate_critical_zeros(args.height, opts, height_cap=args.height_cap))
    main = census.rvm_main_term(args.height) if args.height > 2 * math.pi else float("nan")
    _emit(args, {"height": args.height, "count": n, "census": located, "main_term": main},
          f"N({args.height:g}) = {n}\ncensus {located}\nmain term {main:.4f}")
    if n != located:
        log.error("winding count %d differs from the critical-line census %d", n, located)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_density(parser, args, opts: EvalOptions) -> int:
    if not 0.5 < args.lam < 1:
        parser.error("--lambda must satisfy 1/2 < lambda < 1")
    _check_height(parser, args, args.height)
    if not args.height > 2:
        parser.error("--height must exceed 2")
    d = census.count_zeros_density(args.lam, args.height, opts, height_cap=args.height_cap, threads=args.threads)
    status = EXIT_OK
    if d.off_line > 0:
        # re-verify on a shifted contour before reporting
        again = census.count_zeros_density(args.lam, args.height + census.NUDGE, opts,
                                           height_cap=args.height_cap + 1.0, threads=args.threads)
        if again.off_line > 0:
            status = EXIT_OFFLINE
    payload = {"lambda": args.lam, "height": args.height, "epsilon": d.epsilon, "X": d.X, "Y": d.Y,
               "rectangle_count": d.rectangle_count, "critical_count": d.critical_count,
               "off_line": d.off_line, "strip_off_line": d.strip_off_line, "beyond_X": d.beyond_X,
               "nudges": d.nudges, "located": [[z.real, z.imag] for z in d.located]}
    plain = (f"rectangle count {d.rectangle_count}\noff-line count {d.off_line}\n"
             f"epsilon {d.epsilon:.6g} X {d.X:.6g} Y {d.Y:.6g}")
    if d.located:
        plain += "\nlocated " + " ".join(f"{z.real:.6f}{z.imag:+.6f}i" for z in d.located)
    _emit(args, payload, plain)
    return status


def cmd_verify(parser, args, opts: EvalOptions) -> int:
    names = args.suite or ["all"]
    if "all" in names:
        names = list(paperchecks.SUITES)
    unknown = [n for n in names if n not in paperchecks.SUITES]
    if unknown:
        parser.error(f"unknown suite(s): {', '.join(unknown)}")
    reports = paperchecks.run_suites(names, threads=args.threads or 1, seed=args.seed, opts=opts)
    text = paperchecks.reports_to_json(reports)
    if args.json is not None:
        args.json.write_text(text, encoding="utf-8")
    if args.format == "json" and args.json is None:
        sys.stdout.write(text)
    else:
        for r in reports:
            print(f"{r.check_id:20s} {'PASS' if r.passed else 'FAIL'}  max_residual={r.max_residual:.3g}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "zeros": cmd_zeros, "count": cmd_count, "density": cmd_density, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.height_cap > SAFE_HEIGHT_CAP and not args.unsafe_heights:
        parser.error(f"--height-cap above {SAFE_HEIGHT_CAP:g} needs --unsafe-heights")
    if args.height_cap > census.HEIGHT_CAP:
        log.warning("heights above %g: error heuristics are less reliable", census.HEIGHT_CAP)
    try:
        opts = EvalOptions(target_abs_err=args.precision)
    except ValueError as exc:
        parser.error(str(exc))
    census.set_default_threads(args.threads)
    try:
        return COMMANDS[args.command](parser, args, opts)
    except ContourThroughZero as exc:
        print(f"error: {exc}; try --height {exc.suggested_height:.2f}", file=sys.stderr)
        return EXIT_NUMERIC
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        census.set_default_threads(None)


if __name__ == "__main__":
    sys.exit(main())
