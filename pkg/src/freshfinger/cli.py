"""Command-line entry point: ``freshfinger {gen,run,audit,compare}``.

Exit codes: 0 success, 1 usage error, 2 invariant violation, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import harness
from .sequences import SequenceError, SequenceSpec, generate, write_file

log = logging.getLogger("freshfinger")

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freshfinger", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a benchmark sequence file")
    gen.add_argument("--kind", required=True,
                     choices=["interleaved", "strided", "warmup-uniform", "uniform", "round-robin"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--K", type=int)
    gen.add_argument("--r", type=int)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", help="replay a sequence through a structure")
    run.add_argument("--structure", required=True, choices=["ff", "ff-p1", "ff-p3", "bst", "splay"])
    run.add_argument("--seq", required=True)
    run.add_argument("--trace", required=True)
    run.add_argument("--summary", required=True)
    run.add_argument("--audit-every", type=int, default=1)
    run.add_argument("--audit-head", type=int, default=0,
                     help="always audit the first N accesses")

    aud = sub.add_parser("audit", help="fit measured cost against the oracle bound")
    aud.add_argument("--trace", required=True)

    cmp_ = sub.add_parser("compare", help="compare run summaries over one sequence")
    cmp_.add_argument("summaries", nargs="+")
    return parser


def _gen(args) -> int:
    spec = SequenceSpec(
        kind=args.kind.replace("-", "_"), n=args.n, m=args.m, K=args.K, r=args.r, seed=args.seed
    )
    try:
        seq = generate(spec)
    except SequenceError as exc:
        raise UsageError(str(exc)) from exc
    write_file(args.out, args.n, seq, spec)
    log.info("wrote %d keys to %s", len(seq), args.out)
    return EXIT_OK


def _run(args) -> int:
    config = harness.RunConfig(
        structure=args.structure.replace("-", "_"),
        seq_path=args.seq,
        audit_every=args.audit_every,
        audit_head=args.audit_head,
        trace_path=args.trace,
        summary_path=args.summary,
    )
    try:
        result = harness.run(config)
    except harness.ConfigError as exc:
        raise UsageError(str(exc)) from exc
    except harness.InvariantViolationError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVARIANT
    print(json.dumps(result.summary["averages"], indent=2))
    return EXIT_OK


def _audit(args) -> int:
    try:
        report = harness.audit(args.trace)
    except harness.InsufficientRowsError as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps(report.as_dict(), indent=2))
    return EXIT_OK


def _compare(args) -> int:
    summaries = []
    for path in args.summaries:
        with open(path, encoding="utf-8") as fh:
            summaries.append(json.load(fh))
    try:
        table = harness.compare(summaries)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(harness.format_table(table))
    return EXIT_OK


COMMANDS = {"gen": _gen, "run": _run, "audit": _audit, "compare": _compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"freshfinger: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, SequenceError, json.JSONDecodeError) as exc:
        print(f"freshfinger: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
