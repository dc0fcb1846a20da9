"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 n too large for the
requested mode.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from ofa_polygon import __version__
from ofa_polygon.dihedral import enumerate_canonical_states
from ofa_polygon.exact_dp import (
    DEFAULT_EXACT_LIMIT,
    ExactLimitExceeded,
    per_arrival_expectations,
    save_table,
    value_function,
)
from ofa_polygon.montecarlo import (
    MCDP_DEFAULT_SEED,
    GENERATOR,
    MCDP_MAX_N,
    estimate_total,
    mc_state_dp,
)
from ofa_polygon.validation import run_checks

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_LIMIT = 0, 1, 2, 3

EXACT_FIELDS = ["command", "version", "mode", "n", "orbits", "total", "per_customer", "per_arrival"]
SIMULATE_FIELDS = [
    "command", "version", "generator", "n", "runs", "seed", "mean", "std",
    "ci_low", "ci_high", "per_customer_mean", "per_customer_ci_low", "per_customer_ci_high",
]
SWEEP_FIELDS = [
    "command", "version", "generator", "mode", "n", "runs", "seed", "total", "per_customer",
    "std", "ci_low", "ci_high", "per_customer_ci_low", "per_customer_ci_high",
]
MCDP_FIELDS = ["command", "version", "generator", "n", "samples", "seed", "value", "stderr"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _num(x: float) -> str:
    return format(x, ".17g")


def _cell(x) -> str:
    if isinstance(x, float):
        return _num(x)
    return "" if x is None else str(x)


def render(records: list[dict], fields: list[str], fmt: str) -> str:
    if fmt == "json":
        items = []
        for rec in records:
            parts = []
            for k in fields:
                v = rec.get(k)
                if isinstance(v, float):
                    text = _num(v)
                elif isinstance(v, int) and not isinstance(v, bool):
                    text = str(v)
                else:
                    text = json.dumps(v)
                parts.append(f"{json.dumps(k)}: {text}")
            items.append("  {" + ", ".join(parts) + "}")
        return "[\n" + ",\n".join(items) + "\n]\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rec in records:
        writer.writerow([_cell(rec.get(k)) for k in fields])
    return buf.getvalue()


def _emit(args, records: list[dict], fields: list[str]) -> None:
    text = render(records, fields, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _exact_record(n: int, limit: int, threads: int, command: str) -> dict:
    table = value_function(n, limit, threads)
    per_arrival = per_arrival_expectations(n, limit)
    return {
        "command": command,
        "version": __version__,
        "mode": "exact",
        "n": n,
        "orbits": sum(len(enumerate_canonical_states(n, k)) for k in range(n + 1)),
        "total": table.empty_value,
        "per_customer": table.empty_value / n,
        "per_arrival": ";".join(_num(x) for x in per_arrival),
        "_table": table,
    }


def cmd_exact(args) -> int:
    start = time.perf_counter()
    rec = _exact_record(args.n, args.exact_limit, args.threads, "exact")
    if args.save_table:
        save_table(rec["_table"], args.save_table)
    _emit(args, [rec], EXACT_FIELDS)
    print(f"wall time: {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return EXIT_OK


def _simulate_record(n: int, runs: int, seed: int, threads: int, command: str) -> dict:
    est = estimate_total(n, runs, seed, threads)
    per = est.scaled(1 / n)
    return {
        "command": command,
        "version": __version__,
        "generator": GENERATOR,
        "mode": "simulate",
        "n": n,
        "runs": runs,
        "seed": seed,
        "mean": est.mean,
        "total": est.mean,
        "std": est.std,
        "ci_low": est.ci_low,
        "ci_high": est.ci_high,
        "per_customer_mean": per.mean,
        "per_customer": per.mean,
        "per_customer_ci_low": per.ci_low,
        "per_customer_ci_high": per.ci_high,
    }


def cmd_simulate(args) -> int:
    start = time.perf_counter()
    rec = _simulate_record(args.n, args.runs, args.seed, args.threads, "simulate")
    _emit(args, [rec], SIMULATE_FIELDS)
    print(f"wall time: {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.n_min > args.n_max:
        raise UsageError("ofa-polygon sweep: error: --n-min must not exceed --n-max")
    records = []
    for n in range(args.n_min, args.n_max + 1):
        if n <= args.exact_limit and not args.simulate_all:
            rec = _exact_record(n, args.exact_limit, args.threads, "sweep")
            rec["generator"] = None
        else:
            rec = _simulate_record(n, args.runs, args.seed, args.threads, "sweep")
        records.append(rec)
    _emit(args, records, SWEEP_FIELDS)
    return EXIT_OK


def cmd_mcdp(args) -> int:
    if args.n > MCDP_MAX_N:
        raise ExactLimitExceeded(f"n={args.n} too large for a 2**n table (max {MCDP_MAX_N})")
    table = mc_state_dp(args.n, args.samples, args.seed, args.threads)
    rec = {
        "command": "mcdp",
        "version": __version__,
        "generator": GENERATOR,
        "n": args.n,
        "samples": args.samples,
        "seed": args.seed,
        "value": table.empty_value,
        "stderr": table.empty_stderr,
    }
    _emit(args, [rec], MCDP_FIELDS)
    return EXIT_OK


def cmd_validate(args) -> int:
    checks = run_checks(fast=args.fast, threads=args.threads)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        print("failed: " + "; ".join(c.name for c in failed), file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _positive_int(lo: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ofa-polygon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed_default=42):
        p.add_argument("--seed", type=_positive_int(0), default=seed_default)
        p.add_argument("--threads", type=_positive_int(1), default=1)
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None, help="write report here instead of stdout")
        p.add_argument("--exact-limit", type=_positive_int(3), default=DEFAULT_EXACT_LIMIT)

    p = sub.add_parser("exact", help="symmetry-reduced exact DP")
    p.add_argument("--n", type=_positive_int(3), required=True)
    p.add_argument("--save-table", default=None, help="persist the value table as CSV")
    common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="direct Monte Carlo simulation")
    p.add_argument("--n", type=_positive_int(3), required=True)
    p.add_argument("--runs", type=_positive_int(2), default=20000)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mcdp", help="sampled state-level DP over all 2^n states")
    p.add_argument("--n", type=_positive_int(3), required=True)
    p.add_argument("--samples", type=_positive_int(1), default=5000)
    common(p, seed_default=MCDP_DEFAULT_SEED)
    p.set_defaults(func=cmd_mcdp)

    p = sub.add_parser("sweep", help="one row per n; exact when n <= --exact-limit")
    p.add_argument("--n-min", type=_positive_int(3), default=3)
    p.add_argument("--n-max", type=_positive_int(3), default=9)
    p.add_argument("--runs", type=_positive_int(2), default=10000)
    p.add_argument("--simulate-all", action="store_true", help="simulate even when exact DP is possible")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run the built-in acceptance checks")
    p.add_argument("--fast", action="store_true", help="skip large-n simulation checks")
    p.add_argument("--threads", type=_positive_int(1), default=1)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ExactLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
