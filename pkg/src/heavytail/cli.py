"""Command-line interface.

Every subcommand accepts ``--seed``, ``--output`` and ``--format`` (the
input data format, ``raw`` or ``pairs``). Results go to ``--output`` or to
standard output; progress messages go to standard error unless ``--quiet``
is given. Relative output paths are resolved against
``$HEAVYTAIL_OUTPUT_DIR`` when that variable is set.

Exit status: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io as _stdio
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bayes import TuningConfig, pair_fit, posterior_summary, run_mcmc
from .compare import compare_models, render_table
from .csn import csn_fit
from .dist import (
    DiscreteLogNormal,
    InverseLogistic,
    NoDeviation,
    ParamPoint,
    PowerLaw,
    UnitExpCDF,
    sample,
)
from .errors import (
    ConstraintError,
    DataError,
    DivergentArgumentError,
    DomainError,
    NormalizerError,
    SaturationError,
    TuningFailure,
)
from .io import (
    FORMATS,
    build_fit_report,
    dump_json,
    ecdf_export,
    read_counts,
    write_table_csv,
)
from .missing import impute_missing
from .models import PRESETS, get_model
from .xmin import Unbounded, xmin_from_phi, xmin_posterior

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
OUTPUT_DIR_ENV = "HEAVYTAIL_OUTPUT_DIR"

log = logging.getLogger("heavytail")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage problems with exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _output_path(path):
    if path is None or path == "-":
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _emit_text(text, args):
    path = _output_path(args.output)
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        path.write_text(text if text.endswith("\n") else text + "\n")
        log.info("wrote %s", path)


def _emit_json(obj, args):
    buf = _stdio.StringIO()
    dump_json(obj, buf)
    _emit_text(buf.getvalue(), args)


def _emit_csv(header, rows, args):
    buf = _stdio.StringIO()
    write_table_csv(buf, header, rows)
    _emit_text(buf.getvalue(), args)


def _tuning(args):
    try:
        return TuningConfig(pilot_iters=args.pilot, main_iters=args.iters, burnin=args.burnin,
                            thin=args.thin, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _model(name):
    try:
        return get_model(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _deviation(kind, phi):
    if kind == "none":
        return NoDeviation()
    if phi is None:
        raise UsageError(f"--phi is required with --dev {kind}")
    if kind == "uexp":
        return UnitExpCDF(tuple(phi))
    if len(phi) != 2:
        raise UsageError("--dev logistic takes exactly two coefficients: phi0,phi1")
    return InverseLogistic(phi[0], phi[1])


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args):
    if args.tail == "powerlaw":
        tail = PowerLaw(args.theta)
    else:
        tail = DiscreteLogNormal(args.mu, args.sigma)
    point = ParamPoint(tail, _deviation(args.dev, args.phi))
    draws = sample(args.n, point, seed=args.seed)
    _emit_text("".join(f"{int(v)}\n" for v in draws), args)


def cmd_fit(args):
    data = read_counts(args.data, args.format)
    spec = _model(args.model)
    chain = run_mcmc(data, spec, tuning=_tuning(args), progress=not args.quiet)
    xm = None
    if spec.deviation != "none":
        try:
            xm = xmin_posterior(chain, args.tau)
        except SaturationError as exc:
            log.warning("x_min posterior unavailable: %s", exc)
    csn = csn_fit(data) if args.csn else None
    report = build_fit_report(data, chain, xmin=xm, csn=csn)
    if args.chain_csv:
        chain.to_csv(_output_path(args.chain_csv))
    _emit_json(report, args)


def cmd_xmin(args):
    if args.data is None:
        if args.phi is None:
            raise UsageError("xmin needs either --phi or --data")
        value = xmin_from_phi(_deviation(args.dev, args.phi), args.tau)
        out = {"tau": args.tau, "xmin": "unbounded" if value is Unbounded else int(value)}
        _emit_json(out, args)
        return
    data = read_counts(args.data, args.format)
    spec = _model(args.model)
    if spec.deviation == "none":
        raise UsageError(f"model {spec.name} has no deviation function; x_min is undefined")
    chain = run_mcmc(data, spec, tuning=_tuning(args), progress=not args.quiet)
    _emit_json(xmin_posterior(chain, args.tau).to_dict(), args)


def cmd_compare_models(args):
    data = read_counts(args.data, args.format)
    specs = [_model(m.strip()) for m in args.models.split(",") if m.strip()]
    if len(specs) < 2:
        raise UsageError("--models needs at least two entries")
    rows = compare_models(data, specs, tuning=_tuning(args), progress=not args.quiet)
    if all(r.error for r in rows):
        raise TuningFailure("every model fit failed: " + "; ".join(r.error for r in rows))
    if args.table:
        _emit_text(render_table(rows), args)
    else:
        _emit_json({"n": data.n, "models": [r.to_dict() for r in rows]}, args)


def cmd_compare_datasets(args):
    data_a = read_counts(args.data_a, args.format)
    data_b = read_counts(args.data_b, args.format)
    spec = _model(args.model)
    chain = pair_fit(data_a, data_b, spec, tuning=_tuning(args), progress=not args.quiet)
    summary = posterior_summary(chain)
    offsets = {}
    for name in chain.names:
        if name.startswith("d_"):
            s = summary[name]
            offsets[name] = {**s, "excludes_zero": not (s["q2.5"] <= 0.0 <= s["q97.5"])}
    _emit_json({
        "model": spec.name,
        "n_a": data_a.n,
        "n_b": data_b.n,
        "acceptance_rate": chain.acceptance_rate,
        "posterior": summary,
        "offsets": offsets,
    }, args)


def cmd_predict_missing(args):
    data = read_counts(args.data, args.format)
    spec = _model(args.model)
    chain = run_mcmc(data, spec, tuning=_tuning(args), progress=not args.quiet)
    total = impute_missing(chain, data, draws_per_sample=args.draws_per_sample,
                           seed=args.seed, max_posterior_draws=args.max_posterior_draws)
    out = total.to_dict()
    out["interval_90"] = {"events": total.interval(0.9, "events"),
                          "total_size": total.interval(0.9, "casualties")}
    _emit_json(out, args)


def cmd_ecdf(args):
    data = read_counts(args.data, args.format)
    table = ecdf_export(data)
    _emit_csv(["x", "survival"], [(int(x), s) for x, s in table], args)


def cmd_csn(args):
    data = read_counts(args.data, args.format)
    res = csn_fit(data, min_tail=args.min_tail)
    out = res.to_dict()
    if not args.candidates:
        out.pop("candidates")
    _emit_json(out, args)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--output", "-o", default=None,
                        help=f"output file (default stdout; relative paths use ${OUTPUT_DIR_ENV})")
    common.add_argument("--format", choices=FORMATS, default="raw",
                        help="input data format: one integer per line, or value,count rows")
    common.add_argument("--quiet", "-q", action="store_true", help="suppress progress on stderr")

    mcmc = argparse.ArgumentParser(add_help=False)
    mcmc.add_argument("--model", default="m1", help=f"model preset: {', '.join(sorted(PRESETS))}")
    mcmc.add_argument("--iters", type=int, default=50000, help="main-run iterations")
    mcmc.add_argument("--burnin", type=int, default=10000)
    mcmc.add_argument("--pilot", type=int, default=5000, help="pilot-run iterations")
    mcmc.add_argument("--thin", type=int, default=1)

    parser = _Parser(prog="heavytail", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("simulate", parents=[common], help="draw samples from a model")
    p.add_argument("--tail", choices=("powerlaw", "lognormal"), default="powerlaw")
    p.add_argument("--theta", type=float, default=2.5)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dev", choices=("uexp", "logistic", "none"), default="none")
    p.add_argument("--phi", type=_float_list, default=None)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common, mcmc], help="fit a model and write a JSON report")
    p.add_argument("--data", required=True)
    p.add_argument("--tau", type=float, default=0.95, help="x_min threshold on D")
    p.add_argument("--csn", action="store_true", help="include the KS/MLE baseline")
    p.add_argument("--chain-csv", default=None, help="also write the kept draws as CSV")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("xmin", parents=[common, mcmc],
                       help="x_min from given coefficients, or its posterior from data")
    p.add_argument("--data", default=None)
    p.add_argument("--dev", choices=("uexp", "logistic"), default="uexp")
    p.add_argument("--phi", type=_float_list, default=None)
    p.add_argument("--tau", type=float, default=0.95)
    p.set_defaults(func=cmd_xmin)

    p = sub.add_parser("compare-models", parents=[common, mcmc], help="rank models by BIC")
    p.add_argument("--data", required=True)
    p.add_argument("--models", default="m1,m2,m3")
    p.add_argument("--table", action="store_true", help="aligned text instead of JSON")
    p.set_defaults(func=cmd_compare_models)

    p = sub.add_parser("compare-datasets", parents=[common, mcmc],
                       help="joint fit of two datasets with offset parameters")
    p.add_argument("--data-a", required=True)
    p.add_argument("--data-b", required=True)
    p.set_defaults(func=cmd_compare_datasets)

    p = sub.add_parser("predict-missing", parents=[common, mcmc],
                       help="posterior predictive of unrecorded events")
    p.add_argument("--data", required=True)
    p.add_argument("--draws-per-sample", type=int, default=1)
    p.add_argument("--max-posterior-draws", type=int, default=None)
    p.set_defaults(func=cmd_predict_missing)

    p = sub.add_parser("ecdf", parents=[common], help="empirical survival function as CSV")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_ecdf)

    p = sub.add_parser("csn", parents=[common], help="KS/MLE x_min and exponent baseline")
    p.add_argument("--data", required=True)
    p.add_argument("--min-tail", type=int, default=10)
    p.add_argument("--candidates", action="store_true", help="include the full candidate table")
    p.set_defaults(func=cmd_csn)

    return parser


def _setup_logging(quiet):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.WARNING if quiet else logging.INFO)
    log.propagate = False


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.quiet)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"heavytail {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConstraintError, DomainError, DivergentArgumentError) as exc:
        print(f"heavytail {args.command}: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        print(f"heavytail {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NormalizerError, TuningFailure, SaturationError, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        print(f"heavytail {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
