"""Command-line interface.

Subcommands: ``sweep``, ``fit``, ``active-distance``, ``validate`` and
``show-config``. Exit codes: 0 success, 1 validation or domain error,
2 numerical failure.
"""

import argparse
import csv
import sys
import warnings
from pathlib import Path

from . import __version__
from .channel import active_distance, builtin_profile, db_to_linear, snr
from .config import dump_config, load_config
from .exceptions import ConvergenceError, DomainError, NumericalError
from .fitting import TRANSFORMS, GainSeries, fit_gaussian, reliability_gain
from .sweep import format_value, run_sweep, summarize, write_csv
from .validation import VALIDATION_N, concordance_grid

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 1, 2
GROUP_COLUMNS = ("signal", "protocol", "z_db", "gamma")


def _u64(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not an unsigned 64-bit integer")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return value


class _Parser(argparse.ArgumentParser):
    # bad arguments are validation errors; 2 is reserved for numerical failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value configuration file")
    common.add_argument("--out", type=Path, help="output CSV path")
    common.add_argument("--seed", type=_u64, help="Monte Carlo seed (unsigned 64-bit)")
    common.add_argument("--samples", type=_positive_int, help="Monte Carlo sample count")
    common.add_argument("--verify", action="store_true", help="re-check invariants on every row")

    parser = _Parser(
        prog="wireless-consensus",
        description="PBFT and RAFT performance over Rayleigh-faded THz and mmWave links.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="run a parameter sweep and write CSV")
    p.add_argument("--metrics", help="comma-separated subset of metrics (overrides config)")

    p = sub.add_parser("fit", parents=[common], help="fit a Gaussian to reliability gain")
    p.add_argument("input", nargs="?", type=Path, help="sweep CSV; omit to run the default z=4 dB, gamma=5 sweep")
    p.add_argument("--transform", choices=TRANSFORMS, default="log10_of_failure")

    p = sub.add_parser("active-distance", parents=[common], help="distance guaranteeing the SNR threshold")
    p.add_argument("--signal", default="thz")
    p.add_argument("--z-db", type=float, default=6.0)
    p.add_argument("--linear", action="store_true", help="treat --z-db as a linear ratio")
    p.add_argument("--h", type=float, default=1.0, help="fading power gain")

    p = sub.add_parser("validate", parents=[common], help="Monte Carlo concordance suite")
    p.add_argument("--trials", type=_positive_int, default=10_000_000,
                   help="trials per consensus simulation")
    p.add_argument("--n", dest="n_values", help="comma-separated node counts")

    sub.add_parser("show-config", parents=[common], help="print the effective configuration")
    return parser


def _spec_from_args(args):
    spec = load_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if getattr(args, "samples", None) is not None and args.command == "sweep":
        updates["mc_samples"] = args.samples
    if getattr(args, "metrics", None):
        updates["metrics"] = tuple(m.strip().lower() for m in args.metrics.split(",") if m.strip())
    return spec.with_updates(**updates) if updates else spec


def cmd_sweep(args):
    spec = _spec_from_args(args)
    discordant = []
    records = run_sweep(spec, verify=args.verify, discordant=discordant)
    report = sys.stdout if args.out else sys.stderr
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)
    print(summarize(records), file=report)
    if args.verify:
        print("invariants verified on every row", file=report)
        if spec.mc_samples:
            for row in discordant:
                print(
                    f"warning: Monte Carlo estimate beyond 3 standard errors: {row.signal}/"
                    f"{row.protocol} n={row.n} z_db={row.z_db:g} gamma={row.gamma:g}",
                    file=sys.stderr,
                )
            print(f"{len(records) - len(discordant)}/{len(records)} rows concordant with Monte Carlo", file=report)
    if args.out:
        print(f"wrote {args.out}", file=report)
    return EXIT_OK


def _group_key(row):
    return tuple(row.get(c, "") for c in GROUP_COLUMNS)


def _read_series(path, transform):
    """Group a CSV into ``{group: [(n, P or None, gain or None)]}``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or "n" not in reader.fieldnames:
            raise DomainError(f"{path}: CSV needs an 'n' column")
        has_p = "p_consensus" in reader.fieldnames
        if not has_p and "gain" not in reader.fieldnames:
            raise DomainError(f"{path}: CSV needs a 'p_consensus' or 'gain' column")
        if not has_p and transform != "log10_of_failure":
            raise DomainError("a gain-only CSV can only be fitted with log10_of_failure")
        groups = {}
        for line_no, row in enumerate(reader, start=2):
            try:
                n = float(row["n"])
                p = float(row["p_consensus"]) if has_p and row["p_consensus"] else None
                g = float(row["gain"]) if not has_p and row.get("gain") else None
            except ValueError:
                raise DomainError(f"{path}: line {line_no}: non-numeric value") from None
            if p is None and g is None:
                continue
            groups.setdefault(_group_key(row), []).append((n, p, g))
    return groups


def _fit_groups(groups, transform):
    results = []
    for key, points in groups.items():
        if points and points[0][1] is not None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                series = reliability_gain([(n, p) for n, p, _ in points], transform)
            for n, p in series.dropped:
                print(f"dropped n={n:g} P={p!r}: outside the domain of {transform}", file=sys.stderr)
        else:
            series = GainSeries(tuple(n for n, _, _ in points), tuple(g for *_, g in points), transform)
        try:
            fit = fit_gaussian(series)
        except ConvergenceError as exc:
            fit = exc
        results.append((key, series, fit))
    return results


def _write_fit_csv(results, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(GROUP_COLUMNS + ("n", "gain", "fitted"))
        for key, series, fit in results:
            if isinstance(fit, Exception):
                continue
            for n, gain in zip(series.n, series.gain):
                writer.writerow(key + (format_value(float(n)), format_value(gain), format_value(float(fit(n)))))


def cmd_fit(args):
    if args.input is not None:
        groups = _read_series(args.input, args.transform)
        out = args.out or args.input.with_name(args.input.stem + "_fit.csv")
    else:
        spec = _spec_from_args(args).with_updates(
            regimes=((4.0, 5.0),), metrics=("consensus",), mc_samples=0
        )
        groups = {}
        for row in run_sweep(spec):
            key = (row.signal, row.protocol, format_value(row.z_db), format_value(row.gamma))
            groups.setdefault(key, []).append((row.n, row.p_consensus, None))
        out = args.out
    results = _fit_groups(groups, args.transform)
    failed = 0
    for key, series, fit in results:
        label = " ".join(f"{c}={v}" for c, v in zip(GROUP_COLUMNS, key) if v != "")
        if isinstance(fit, ConvergenceError):
            failed += 1
            best = fit.best
            print(
                f"{label or 'series'}: did not converge ({fit}); best iterate "
                f"a={best.a:.6g} b={best.b:.6g} c={best.c:.6g} R2={best.r_squared:.6f}",
                file=sys.stderr,
            )
            continue
        print(
            f"{label or 'series'}: a={fit.a:.10g} b={fit.b:.10g} c={fit.c:.10g} "
            f"R2={fit.r_squared:.12f} points={len(series.n)}"
        )
    if out is not None:
        _write_fit_csv(results, out)
        print(f"wrote {out}")
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_active_distance(args):
    spec = load_config(args.config)
    name = args.signal.lower()
    profile = spec.profiles.get(name) or builtin_profile(name)
    z = args.z_db if args.linear else db_to_linear(args.z_db)
    r = active_distance(profile, z, args.h)
    residual = snr(profile, args.h, r) / z - 1.0
    print(f"signal={profile.name} z_linear={z:.12g} h={args.h:.12g}")
    print(f"active_distance_m={r:.12g}")
    print(f"snr_relative_residual={residual:.3e}")
    return EXIT_OK


def cmd_validate(args):
    spec = load_config(args.config)
    n_values = VALIDATION_N
    if args.n_values:
        n_values = tuple(int(v) for v in args.n_values.split(",") if v.strip())
    results = concordance_grid(
        profiles=tuple(spec.profiles[s] for s in spec.signals),
        n_values=n_values,
        regimes=spec.regimes,
        samples=args.samples or 1_000_000,
        trials=args.trials,
        seed=args.seed if args.seed is not None else spec.seed,
        threshold_mode=spec.threshold_mode,
    )
    for result in results:
        print(result.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} concordant")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            cols = ("signal", "n", "z_db", "gamma", "quantity", "analytic", "mc_mean", "mc_stderr", "samples", "passed")
            writer.writerow(cols)
            for r in results:
                writer.writerow([format_value(getattr(r, c)) for c in cols])
    return EXIT_OK if failed == 0 else EXIT_DOMAIN


def cmd_show_config(args):
    sys.stdout.write(dump_config(_spec_from_args(args)))
    return EXIT_OK


COMMANDS = {
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "active-distance": cmd_active_distance,
    "validate": cmd_validate,
    "show-config": cmd_show_config,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
