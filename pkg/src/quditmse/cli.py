"""Command-line interface.

    estimate state   [--config FILE] [overrides...]
    estimate unitary [--config FILE] [overrides...]
    estimate fit --in results.csv [--window lo:hi ...]

The state and unitary commands run the configured Monte Carlo experiment
and write a results CSV; fit reads such a CSV back and prints power-law
fits of the mean MSE against the copy count.  Exit code 0 on success, 2
on configuration errors.
"""

import argparse
import sys

from .errors import ConfigError, EstimationError
from .experiment import (
    build_experiment_config,
    emit_csv,
    fit_report,
    load_config_file,
    read_csv,
    run_experiment,
)

DEFAULT_OUT = "results.csv"
DEFAULT_WINDOWS = ((10, 45), (46, 100))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="estimate",
        description="Adaptive MSE estimation of pure qudit states and unitary gates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for mode in ("state", "unitary"):
        p = sub.add_parser(mode, help="run a %s-mode experiment" % mode)
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--d", type=int, help="system dimension")
        p.add_argument("--shots", help="comma-separated shot counts, e.g. 1000,10000")
        p.add_argument("--iters", type=int, help="iterations per run")
        p.add_argument("--targets", type=int, help="number of random targets")
        p.add_argument("--runs", type=int, help="runs per target")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--noiseless", action="store_true", default=None,
                       help="use the exact SE oracle instead of sampling")
        p.add_argument("--post", choices=["none", "closest", "gs"],
                       help="unitary post-processing variant")
        p.add_argument("--re-update", dest="re_update", action="store_true", default=None,
                       help="feed post-processed columns back into the iteration")
        p.add_argument("--jobs", type=int, help="worker processes (default 1)")
        p.add_argument("--out", help="output CSV path (default %s)" % DEFAULT_OUT)

    f = sub.add_parser("fit", help="fit mse = p / N_T^a over iteration windows")
    f.add_argument("--in", dest="in_path", required=True, help="results CSV to fit")
    f.add_argument("--window", action="append",
                   help="iteration window lo:hi; may repeat (default 10:45 and 46:100)")
    return parser


def _collect_overrides(args):
    mapping = {}
    if args.d is not None:
        mapping["d"] = args.d
    if args.shots is not None:
        mapping["shots"] = args.shots
    if args.iters is not None:
        mapping["iterations"] = args.iters
    if args.targets is not None:
        mapping["targets"] = args.targets
    if args.runs is not None:
        mapping["runs"] = args.runs
    if args.seed is not None:
        mapping["seed"] = args.seed
    if args.noiseless is not None:
        mapping["noiseless"] = args.noiseless
    if args.post is not None:
        mapping["post"] = args.post
    if args.re_update is not None:
        mapping["re_update"] = args.re_update
    if args.jobs is not None:
        mapping["jobs"] = args.jobs
    if args.out is not None:
        mapping["out"] = args.out
    return mapping


def _parse_window(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError("window must look like lo:hi, got %r" % (text,))
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError("window bounds must be integers, got %r" % (text,))


def _run_experiment_command(args):
    mapping = {}
    if args.config:
        mapping.update(load_config_file(args.config))
    mapping.update(_collect_overrides(args))
    mapping["mode"] = args.command
    config = build_experiment_config(mapping)
    table = run_experiment(config)
    out = config.out or DEFAULT_OUT
    emit_csv(table, out)
    print("wrote %d rows to %s" % (len(table.rows), out))
    last_k = max(table.k_values())
    for row in table.rows:
        if row.k == last_k:
            print(
                "%s d=%d N=%d %s: mean MSE %.3e at k=%d (benchmark %.3e)"
                % (row.mode, row.d, row.N, row.variant, row.mean_mse, row.k, row.gm_benchmark)
            )
    return 0


def _run_fit_command(args):
    table = read_csv(args.in_path)
    if args.window:
        windows = [_parse_window(w) for w in args.window]
    else:
        windows = list(DEFAULT_WINDOWS)
    entries = fit_report(table, windows)
    for entry in entries:
        fit = entry.fit
        print(
            "d=%d N=%d %s window %d:%d  p=%.4g  a=%.4f  residual=%.3g"
            % (entry.d, entry.N, entry.variant, fit.window[0], fit.window[1],
               fit.p, fit.a, fit.residual)
        )
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fit":
            return _run_fit_command(args)
        return _run_experiment_command(args)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2
    except EstimationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
