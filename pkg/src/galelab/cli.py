"""Batch command-line front end.

Exit codes: 0 ok, 1 violation or anomaly, 2 parse/config error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import circuits, core, describe, diagonal, dimension, properties

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="galelab", description="Exact gale experiments (batch only).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("--spec", required=True, type=Path, help="experiment document (JSON)")
        sp.add_argument("--out", type=Path, help="directory for output files (default: stdout)")

    v = sub.add_parser("validate", help="check the (super)gale condition exactly")
    common(v)
    v.add_argument("--depth", type=int, help="check every word up to this length (default 8)")

    t = sub.add_parser("trace", help="CSV of gale values along a source or constructor run")
    common(t)
    t.add_argument("--depth", type=int, help="number of bits to trace (default 64)")

    e = sub.add_parser("estimate", help="finite-horizon dimension estimate")
    common(e)
    e.add_argument("--depth", type=int)
    e.add_argument("--threshold-log2", type=int)
    e.add_argument("--precision", type=_rational)

    c = sub.add_parser("circuits", help="circuit census and size-bound report")
    common(c, spec=False)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--t-max", type=int)

    pr = sub.add_parser("properties", help="seeded randomized property suites")
    common(pr, spec=False)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--tables", type=int, default=100)
    pr.add_argument("--covers", type=int, default=50)
    return p


def _emit(out: Path | None, name: str, text: str):
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text, encoding="utf-8", newline="\n")


def _pick(flag, doc: dict, key: str, default):
    if flag is not None:
        return flag
    return doc.get(key, default)


# --------------------------------------------------------------------------


def cmd_validate(args) -> int:
    spec = describe.load_spec(args.spec)
    if spec.gale is None:
        raise CliError("validate needs a 'gale' entry", EXIT_CONFIG)
    depth = int(_pick(args.depth, spec.probe, "depth", 8))
    d = describe.build_gale(spec.gale)
    report = core.validate(d, depth)
    _emit(args.out, "validate.txt", report.summary() + "\n")
    return EXIT_OK if report.valid else EXIT_VIOLATION


def cmd_trace(args) -> int:
    spec = describe.load_spec(args.spec)
    depth = int(_pick(args.depth, spec.probe, "depth", 64))
    if spec.constructor is not None:
        delta = describe.build_constructor(spec.constructor)
        observer = describe.build_gale(spec.gale) if spec.gale is not None else delta.d
        try:
            run = diagonal.run_constructor(delta, depth, observer=observer, keep_blocks=False)
        except diagonal.NoAdmissibleBlock as exc:
            raise CliError(f"constructor stopped: {exc}", EXIT_RUNTIME)
        trace = run.trace
    else:
        if spec.gale is None or not spec.sources:
            raise CliError("trace needs a gale and a source, or a constructor", EXIT_CONFIG)
        d = describe.build_gale(spec.gale)
        src = describe.build_source(spec.sources[0])
        try:
            bits = src.prefix(depth)
        except IndexError as exc:
            raise CliError(str(exc), EXIT_RUNTIME)
        trace = core.trace_along(d, bits)
    _emit(args.out, "trace.csv", trace.to_csv())
    return EXIT_OK


def cmd_estimate(args) -> int:
    spec = describe.load_spec(args.spec)
    if spec.family is None or not spec.sources:
        raise CliError("estimate needs a 'family' and at least one source", EXIT_CONFIG)
    family = describe.build_family(spec.family)
    sources = [describe.build_source(s) for s in spec.sources]
    depth = int(_pick(args.depth, spec.probe, "depth", dimension.DEFAULT_DEPTH))
    threshold = int(_pick(args.threshold_log2, spec.probe, "threshold_log2", dimension.DEFAULT_THRESHOLD_LOG2))
    precision = Fraction(_pick(args.precision, spec.probe, "precision", dimension.DEFAULT_PRECISION))
    method = spec.probe.get("method", dimension.THRESHOLD_SEARCH)
    if depth < 1 or threshold < 1 or precision <= 0:
        raise CliError("depth, threshold-log2 and precision must be positive", EXIT_CONFIG)
    try:
        est = dimension.estimate_dimension(family, sources, depth, precision, method, threshold)
    except dimension.EstimateError as exc:
        raise CliError(str(exc), EXIT_RUNTIME)
    except diagonal.NoAdmissibleBlock as exc:
        raise CliError(f"constructor stopped: {exc}", EXIT_RUNTIME)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_CONFIG)
    _emit(args.out, "estimate.txt", est.report())
    if args.out is not None:
        _emit(args.out, "probes.csv", est.probes_csv())
    return EXIT_OK if est.ok else EXIT_VIOLATION


def cmd_circuits(args) -> int:
    n = args.n
    if not 0 <= n <= circuits.MAX_INPUTS:
        raise CliError(f"n must lie in 0..{circuits.MAX_INPUTS}", EXIT_CONFIG)
    t_max = args.t_max if args.t_max is not None else circuits.default_t_max(n)
    if t_max < 0:
        raise CliError("t-max must be >= 0", EXIT_CONFIG)
    table = circuits.census(n, t_max)
    _emit(args.out, f"census_n{n}.csv", circuits.census_csv(table))
    sat = table.saturation_point
    lines = [
        f"model: {table.model}",
        f"n: {n}",
        f"t_max: {t_max}",
        f"tables_reached: {len(table.size)} of {1 << (1 << n)}",
        f"saturation_point: {sat if sat is not None else 'not reached'}",
    ]
    failures = [t for t in range(n + 1, t_max + 1) if not circuits.shannon_bound_check(n, t, table).passed]
    lines.append(f"bound_check: {'pass' if not failures else 'fail at t=' + ','.join(map(str, failures))}")
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stderr.write(text)
    else:
        _emit(args.out, f"census_n{n}.txt", text)
    return EXIT_OK if not failures else EXIT_VIOLATION


def cmd_properties(args) -> int:
    reports = properties.table_suite(args.seed, args.tables)
    reports.append(properties.cover_suite(args.seed, args.covers))
    lines = [r.line() for r in reports]
    for r in reports:
        lines.extend(f"  {msg}" for msg in r.failures)
    _emit(args.out, "properties.txt", "\n".join(lines) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


COMMANDS = {
    "validate": cmd_validate,
    "trace": cmd_trace,
    "estimate": cmd_estimate,
    "circuits": cmd_circuits,
    "properties": cmd_properties,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except describe.SpecError as exc:
        sys.stderr.write(f"galelab: spec error: {exc}\n")
        return EXIT_CONFIG
    except CliError as exc:
        sys.stderr.write(f"galelab: {exc}\n")
        return exc.code
    except core.ContractError as exc:
        sys.stderr.write(f"galelab: contract violation: {exc}\n")
        return EXIT_VIOLATION
    except (RuntimeError, ValueError, IndexError) as exc:
        sys.stderr.write(f"galelab: runtime error: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
