"""Command-line front end: ``simulate``, ``check`` and ``gen-oracle``.

Exit codes: 0 success, 1 failed check, 2 usage/config/parse
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from typing import Sequence

from ..abp import OracleStream, check_all
from ..errors import InvalidConfig, MalformedTrace, TraceParseError
from .trace import RunConfig, read_trace, render_trace, run_config, summary

log = logging.getLogger("streamspec")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_bit(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "t", "yes"):
        return True
    if t in ("0", "false", "f", "no"):
        return False
    raise argparse.ArgumentTypeError(f"not a bit: {text!r}")


def _parse_inputs(text: str) -> tuple:
    if not text.strip():
        return ()
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            out.append(int(tok))
        except ValueError:
            out.append(tok)
    return tuple(out)


def cmd_simulate(config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    try:
        trace = run_config(config)
    except InvalidConfig as e:
        print(f"invalid config: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = render_trace(trace, config)
    if config.output_path:
        try:
            with open(config.output_path, "w", encoding="utf-8", newline="\n") as fp:
                fp.write(text)
        except OSError as e:
            print(f"cannot write {config.output_path}: {e}", file=sys.stderr)
            return EXIT_IO
        dest = out
    else:
        out.write(text)
        dest = sys.stderr
    s = summary(trace)
    print(f"delivered: {s['delivered']}", file=dest)
    print(f"rounds: {s['rounds']}", file=dest)
    print(f"completed: {str(s['completed']).lower()}", file=dest)
    print(f"data drops: {s['drops']['data']}", file=dest)
    print(f"ack drops: {s['drops']['ack']}", file=dest)
    return EXIT_OK


def cmd_check(path: str, out=None) -> int:
    out = out or sys.stdout
    try:
        _, trace, _ = read_trace(path)
    except TraceParseError as e:
        print(f"{path}: parse error at {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"cannot read {path}: {e}", file=sys.stderr)
        return EXIT_IO
    try:
        report = check_all(trace)
    except MalformedTrace as e:
        print(f"{path}: malformed trace: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps({
        "passed": report.passed,
        "verdicts": report.verdicts,
        "failed": report.failed(),
        "details": report.details,
    }, sort_keys=True), file=out)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_gen_oracle(seed: int, theta: float, count: int, out=None) -> int:
    out = out or sys.stdout
    if count < 1:
        print("count must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        oracle = OracleStream.seeded(seed, theta)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_USAGE
    print("".join("T" if b else "F" for b in oracle.prefix(count)), file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="streamspec", description="Alternating bit protocol simulator and trace checker.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run one protocol simulation and write its trace")
    sim.add_argument("--input", default="", help="comma-separated payloads, e.g. 1,2,3")
    sim.add_argument("--seed-data", type=int, default=0)
    sim.add_argument("--seed-ack", type=int, default=1)
    sim.add_argument("--theta-data", type=float, default=1.0)
    sim.add_argument("--theta-ack", type=float, default=1.0)
    sim.add_argument("--initial-bit", type=_parse_bit, default=False)
    sim.add_argument("--max-rounds", type=int, default=10_000)
    sim.add_argument("--from-trace", help="reuse the configuration recorded in an existing trace")
    sim.add_argument("-o", "--output", help="trace file to write (default: standard output)")

    chk = sub.add_parser("check", help="check a recorded trace against the protocol requirements")
    chk.add_argument("trace")

    gen = sub.add_parser("gen-oracle", help="print a seeded oracle prefix as T/F characters")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--theta", type=float, required=True)
    gen.add_argument("--count", type=int, required=True)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    if args.command == "simulate":
        if args.from_trace:
            try:
                config, _, _ = read_trace(args.from_trace)
            except TraceParseError as e:
                print(f"{args.from_trace}: parse error at {e}", file=sys.stderr)
                return EXIT_USAGE
            except OSError as e:
                print(f"cannot read {args.from_trace}: {e}", file=sys.stderr)
                return EXIT_IO
            config = dataclasses.replace(config, output_path=args.output)
        else:
            config = RunConfig(
                inputs=_parse_inputs(args.input),
                seed_data=args.seed_data, seed_ack=args.seed_ack,
                theta_data=args.theta_data, theta_ack=args.theta_ack,
                initial_bit=args.initial_bit, max_rounds=args.max_rounds,
                output_path=args.output,
            )
        return cmd_simulate(config)
    if args.command == "check":
        return cmd_check(args.trace)
    return cmd_gen_oracle(args.seed, args.theta, args.count)


if __name__ == "__main__":
    sys.exit(main())
