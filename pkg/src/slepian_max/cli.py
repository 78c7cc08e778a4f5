"""Command-line front end: formula tables and the validation report.

Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 numerical failure.
Tables go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
import time

import numpy as np

from . import validate
from .dist import joint_cdf, running_max_cdf, running_max_pdf
from .moments import mean, second_moment, second_moment_printed, variance
from .montecarlo import McSpec, ResourceLimitError, default_workers
from .quadrature import QuadratureError
from .special import std_normal_pdf

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_range(text: str) -> np.ndarray:
    """``lo:hi:steps`` -> ``steps`` evenly spaced points from lo to hi inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must look like lo:hi:steps")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"range {text!r} must look like lo:hi:steps") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or n < 1 or hi < lo:
        raise UsageError(f"range {text!r} needs finite lo <= hi and steps >= 1")
    if n == 1 and lo != hi:
        raise UsageError(f"range {text!r} has one step but lo != hi")
    return np.linspace(lo, hi, n)


def _unit(name: str, value: float) -> float:
    if not (0.0 <= value <= 1.0):
        raise UsageError(f"--{name} must lie in [0, 1], got {value!r}")
    return value


def write_records(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r) + "\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(list(records[0]) if records else [])
    for r in records:
        writer.writerow(["%.17g" % v if isinstance(v, float) else v for v in r.values()])


def _evaluate(fn, point: str):
    try:
        value = fn()
    except (QuadratureError, OverflowError, FloatingPointError) as exc:
        raise NumericalFailure(f"numerical failure at {point}: {exc}") from exc
    if not math.isfinite(value):
        raise NumericalFailure(f"non-finite result at {point}")
    return value


def cmd_cdf(args) -> list[dict]:
    s = _unit("s", args.s)
    return [
        {"m": m, "s": s, "analytic": _evaluate(lambda: running_max_cdf(m, s), f"m={m!r}, s={s!r}")}
        for m in parse_range(args.m).tolist()
    ]


def cmd_pdf(args) -> list[dict]:
    s = _unit("s", args.s)
    if s == 0.0:
        fn = std_normal_pdf
    else:
        def fn(m):
            return running_max_pdf(m, s)
    return [
        {"m": m, "s": s, "analytic": _evaluate(lambda: float(fn(m)), f"m={m!r}, s={s!r}")}
        for m in parse_range(args.m).tolist()
    ]


def cmd_joint(args) -> list[dict]:
    s, t = _unit("s", args.s), _unit("t", args.t)
    if s > t:
        raise UsageError(f"need s <= t, got s={s!r}, t={t!r}")
    point = f"m={args.m!r}, M={args.M!r}, s={s!r}, t={t!r}"
    value = _evaluate(lambda: joint_cdf(args.m, args.M, s, t), point)
    return [{"m": args.m, "M": args.M, "s": s, "t": t, "analytic": value}]


def cmd_moments(args) -> list[dict]:
    grid = parse_range(args.s)
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise UsageError("--s range must lie in [0, 1]")
    return [
        {
            "s": float(s),
            "mean": mean(float(s)),
            "second_moment_corrected": second_moment(float(s)),
            "second_moment_paper": second_moment_printed(float(s)),
            "variance": variance(float(s)),
        }
        for s in grid
    ]


def cmd_validate(args) -> int:
    try:
        spec = McSpec(paths=args.paths, grid_step=args.grid_step, master_seed=args.seed, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    scopes = validate.SCOPES if args.scope == "all" else (args.scope,)
    started = time.perf_counter()

    def log(msg):
        print(f"[{time.perf_counter() - started:7.1f}s] {msg}", file=sys.stderr)

    try:
        rows = validate.run(scopes, spec, log=log)
    except (QuadratureError, OverflowError, ResourceLimitError) as exc:
        raise NumericalFailure(f"validation aborted: {exc}") from exc
    sys.stdout.write(validate.format_report(rows))
    return EXIT_OK if all(r.as_expected for r in rows) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slepian-max", description="Running maximum of the Slepian process S(t) = B(t+1) - B(t).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def table(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        return sp

    sp = table("cdf", "P(m_s <= m) over a grid of levels")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--m", required=True, help="levels as lo:hi:steps")
    sp = table("pdf", "density of m_s over a grid of levels")
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--m", required=True, help="levels as lo:hi:steps")
    sp = table("joint", "P(m_s <= m, M_t <= M)")
    for name in ("m", "M", "s", "t"):
        sp.add_argument(f"--{name}", type=float, required=True)
    sp = table("moments", "mean, second moment and variance of m_s")
    sp.add_argument("--s", default="0:1:51", help="horizons as lo:hi:steps")

    sp = sub.add_parser("validate", help="compare formulas with the simulation oracle")
    sp.add_argument("--paths", type=int, default=10**6)
    sp.add_argument("--grid-step", type=float, default=1e-4)
    sp.add_argument("--seed", type=int, default=20170101)
    sp.add_argument("--workers", type=int, default=default_workers())
    sp.add_argument("--scope", choices=(*validate.SCOPES, "all"), default="all")
    return p


def _attach_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-3:4:141" as an option; glue such values to their flag
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and re.match(r"-[0-9.]", tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


TABLES = {"cdf": cmd_cdf, "pdf": cmd_pdf, "joint": cmd_joint, "moments": cmd_moments}


def main(argv=None) -> int:
    try:
        argv = sys.argv[1:] if argv is None else list(argv)
        args = build_parser().parse_args(_attach_negative_values(argv))
        if args.command == "validate":
            return cmd_validate(args)
        records = TABLES[args.command](args)
        write_records(records, args.format, sys.stdout)
        return EXIT_OK
    except UsageError as exc:
        print(f"slepian-max: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"slepian-max: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
