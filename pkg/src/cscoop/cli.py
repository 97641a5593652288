"""Command-line entry point.

Exit codes: 0 safe or terminated, 1 violation found (trace written),
2 usage or compile error, 3 bound reached or resources exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import benchmarks
from .compiler import compile_sources, initial_configuration
from .dot import export_dot
from .explorer import (
    CHECKS, DEFAULT_CHECKS, BoundReached, CounterexampleFound, ExploreOptions, ResourceExhausted, explore,
)
from .frontend import CompileError, SourceUnit
from .gxl import write_gxl
from .semantics import Semantics
from .simulate import MAX_STEPS, run_single

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

BUILTIN = "builtin:"


class UsageError(Exception):
    pass


def parse_checks(text: str) -> frozenset:
    if text.strip() == "all":
        return frozenset(CHECKS)
    names = {t.strip().replace("-", "_") for t in text.split(",") if t.strip()}
    unknown = names - set(CHECKS)
    if unknown:
        raise UsageError(f"unknown check(s): {', '.join(sorted(unknown))}; "
                         f"choose from {', '.join(c.replace('_', '-') for c in CHECKS)}")
    return frozenset(names)


def parse_params(items: Sequence[str]) -> dict[str, int]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"--set {name}: {value!r} is not an integer") from None
    return out


def load_units(paths: Sequence[str], params: dict[str, int]) -> list[SourceUnit]:
    """Read sources; ``builtin:NAME`` selects a shipped benchmark and
    ``--set`` overrides its ``@param`` constants."""
    units = []
    for path in paths:
        if path.startswith(BUILTIN):
            name = path[len(BUILTIN):]
            if name not in benchmarks.NAMES:
                raise UsageError(f"unknown benchmark {name!r}; choose from {', '.join(benchmarks.NAMES)}")
            text, label = benchmarks.source(name), f"{name}.cscoop"
        else:
            try:
                text, label = Path(path).read_text(encoding="utf-8"), path
            except (OSError, UnicodeDecodeError) as err:
                raise UsageError(f"cannot read {path}: {err}") from None
        if params:
            try:
                text = benchmarks.instantiate(text, **params)
            except KeyError as err:
                raise UsageError(err.args[0]) from None
        units.append(SourceUnit(label, text))
    return units


def _stem(paths: Sequence[str]) -> str:
    first = paths[0]
    return first[len(BUILTIN):] if first.startswith(BUILTIN) else Path(first).stem


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cscoop", description="Verify CoreSCOOP programs by state-space exploration.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("files", nargs="+", help="source files, or builtin:NAME for a shipped benchmark")
        p.add_argument("--set", dest="params", action="append", default=[], metavar="NAME=VALUE",
                       help="override an integer constant tagged '-- @param NAME'")
        p.add_argument("--queue", choices=("fifo", "bag"), default="fifo", help="request queue discipline")
        p.add_argument("--gc", action="store_true", help="collect unreachable idle processors")

    check = sub.add_parser("check", help="explore the state space and report violations")
    common(check)
    check.add_argument("--checks", default=",".join(c for c in CHECKS if c in DEFAULT_CHECKS),
                       help="comma-separated subset of " + ",".join(c.replace("_", "-") for c in CHECKS))
    check.add_argument("--first", action="store_true", help="stop at the first violation")
    check.add_argument("--bound", type=int, help="maximum exploration depth in macro-steps")
    check.add_argument("--max-states", type=int, help="give up after this many states")
    check.add_argument("--trace", help="counterexample trace path (default ./<stem>.trace)")
    check.add_argument("--dot", help="write the state space as DOT")
    check.add_argument("--gxl", help="write the violating (or initial) configuration as GXL")
    check.add_argument("--stats", action="store_true", help="print exploration statistics")

    run = sub.add_parser("run", help="simulate one pseudo-random execution")
    common(run)
    run.add_argument("--seed", type=int, default=0, help="scheduler seed")
    run.add_argument("--max-steps", type=int, default=MAX_STEPS, help="stop after this many steps")
    run.add_argument("--checks", default=",".join(c for c in CHECKS if c in DEFAULT_CHECKS),
                     help="detectors that end the run")
    run.add_argument("--trace", help="write the trace here instead of stdout")
    run.add_argument("--gxl", help="write the final configuration as GXL")

    dump = sub.add_parser("dump", help="export the compiled program and initial configuration")
    common(dump)
    dump.add_argument("--dot", help="method graphs as DOT (default: stdout)")
    dump.add_argument("--gxl", help="initial configuration as GXL")
    return ap


def _check(args, units) -> int:
    checks = parse_checks(args.checks)
    program = compile_sources(*units, postconditions="postcondition" in checks)
    opts = ExploreOptions(checks=checks, bound=args.bound, queue=args.queue, gc=args.gc,
                          first=args.first, max_states=args.max_states)
    try:
        space, verdict = explore(program, opts)
    except ResourceExhausted as err:
        print(f"resource exhausted: {err}", file=sys.stderr)
        if args.stats:
            print(err.stats.format())
        return EXIT_LIMIT
    st = space.stats
    if args.dot:
        _write(args.dot, export_dot(space))
    if isinstance(verdict, CounterexampleFound):
        path = args.trace or f"{_stem(args.files)}.trace"
        _write(path, verdict.trace.format())
        if args.gxl:
            write_gxl(verdict.trace.final, args.gxl)
        print(f"{verdict.kind} found after {len(verdict.trace)} steps ({verdict.trace.footer})")
        print(f"trace written to {path}")
        code = EXIT_VIOLATION
    else:
        if args.gxl:
            write_gxl(space.configs[0], args.gxl)
        if isinstance(verdict, BoundReached):
            print(f"bound {args.bound} reached with {verdict.frontier} unexpanded states")
            code = EXIT_LIMIT
        else:
            print("safe")
            code = EXIT_OK
    print(f"{st.states} states, {st.transitions} transitions")
    if args.stats:
        print(st.format())
    return code


def _run(args, units) -> int:
    checks = parse_checks(args.checks)
    program = compile_sources(*units, postconditions="postcondition" in checks)
    trace = run_single(program, args.seed, max_steps=args.max_steps, queue=args.queue, gc=args.gc,
                       checks=checks)
    text = trace.format()
    if args.trace:
        _write(args.trace, text)
    else:
        sys.stdout.write(text)
    if args.gxl:
        write_gxl(trace.final, args.gxl)
    if trace.footer == "terminated":
        return EXIT_OK
    if trace.footer.startswith("step limit"):
        return EXIT_LIMIT
    return EXIT_VIOLATION


def _dump(args, units) -> int:
    program = compile_sources(*units, postconditions=True)
    text = export_dot(program)
    if args.dot:
        _write(args.dot, text)
    elif not args.gxl:
        sys.stdout.write(text)
    if args.gxl:
        sem = Semantics(program, queue=args.queue, gc=args.gc)
        write_gxl(sem.stabilize(initial_configuration(program)), args.gxl)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_USAGE if exit_.code else EXIT_OK
    try:
        units = load_units(args.files, parse_params(args.params))
        if args.command == "check":
            return _check(args, units)
        if args.command == "run":
            return _run(args, units)
        return _dump(args, units)
    except UsageError as err:
        print(f"cscoop: {err}", file=sys.stderr)
        return EXIT_USAGE
    except CompileError as err:
        for d in err.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
