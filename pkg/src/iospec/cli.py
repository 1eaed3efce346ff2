"""Command-line front end.

Exit codes: 0 success (or AllPassed / trace accepted), 1 check failure
(violations, Falsified, trace rejected, run-level errors), 2 usage,
parse, or configuration errors and GenerationStuck.
"""

from __future__ import annotations

import argparse
import sys

from .environment import EvalError
from .harness import (
    ConfigError,
    FeedbackMode,
    ReportFormat,
    TestConfig,
    Verdict,
    format_feedback,
    run_test_suite,
)
from .parser import ParseError, StaticError, parse_spec
from .runner import SpawnError, SubprocessConfig
from .semantics import (
    GenerationFailureError,
    InterpretError,
    LimitExceededError,
    SamplingPolicy,
    accept,
    interpret,
    sample_generalized_trace,
)
from .traces import parse_trace, render_trace

USAGE_ERROR = 2


def _load_spec(path: str):
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as err:
        raise SystemExit(_diag(f"cannot read {path}: {err}"))
    return parse_spec(text)


def _diag(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return USAGE_ERROR


def _parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    try:
        return (int(lo), int(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")


def _parse_inputs(text: str) -> list[int]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    try:
        return [int(part) for part in items]
    except ValueError:
        raise argparse.ArgumentTypeError(f"inputs must be integers: {text!r}")


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="iospec",
        description="Check, run, and test console I/O behavior specifications.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="parse a spec file and report violations")
    check.add_argument("spec_file")

    run = sub.add_parser("interpret", help="run a spec on a fixed input sequence")
    run.add_argument("spec_file")
    run.add_argument("--inputs", type=_parse_inputs, required=True,
                     metavar='"v1,v2,..."')

    sample = sub.add_parser("sample", help="print random generalized traces")
    sample.add_argument("spec_file")
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--count", type=int, default=1)

    test = sub.add_parser("test", help="test a program against a spec")
    test.add_argument("spec_file")
    test.add_argument("--program", required=True, help="path to the executable")
    test.add_argument("--args", nargs="*", default=[], help="extra program arguments")
    test.add_argument("--tests", type=int, default=100)
    test.add_argument("--seed", type=int, default=0)
    test.add_argument("--timeout", type=int, default=5000, metavar="MS")
    test.add_argument("--quiescence", type=int, default=50, metavar="MS")
    test.add_argument("--int-range", type=_parse_range, default=(-10, 10),
                      metavar="LO..HI")
    test.add_argument("--nat-range", type=_parse_range, default=(0, 10),
                      metavar="LO..HI")
    test.add_argument("--format", choices=["human", "machine"], default="human")
    test.add_argument("--feedback", choices=["full", "example"], default="full")

    acc = sub.add_parser("accept", help="check one trace against a spec")
    acc.add_argument("spec_file")
    acc.add_argument("--trace", required=True, metavar='"?1 !2 stop"')

    return top


def _cmd_check(args) -> int:
    try:
        _load_spec(args.spec_file)
    except StaticError as err:
        for violation in err.violations:
            print(str(violation))
        return 1
    print("ok")
    return 0


def _cmd_interpret(args) -> int:
    spec = _load_spec(args.spec_file)
    try:
        print(render_trace(interpret(spec, args.inputs)))
    except (InterpretError, LimitExceededError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


def _cmd_sample(args) -> int:
    spec = _load_spec(args.spec_file)
    for i in range(args.count):
        try:
            gt = sample_generalized_trace(spec, policy=SamplingPolicy(seed=args.seed + i))
        except GenerationFailureError as err:
            print(f"error: {err}", file=sys.stderr)
            return 1
        print(render_trace(gt))
    return 0


def _cmd_test(args) -> int:
    spec = _load_spec(args.spec_file)
    try:
        cfg = TestConfig(
            num_tests=args.tests,
            policy=SamplingPolicy(
                integer_range=args.int_range,
                natural_range=args.nat_range,
                seed=args.seed,
            ),
            report_format=ReportFormat(args.format),
            feedback_mode=FeedbackMode(args.feedback),
        )
        target = SubprocessConfig(
            executable=args.program,
            args=tuple(args.args),
            per_run_timeout_ms=args.timeout,
            quiescence_window_ms=args.quiescence,
        )
    except (ConfigError, ValueError) as err:
        return _diag(str(err))
    try:
        report = run_test_suite(spec, target, cfg)
    except SpawnError as err:
        return _diag(str(err))
    print(format_feedback(report, cfg.report_format, cfg.feedback_mode))
    if report.verdict is Verdict.ALL_PASSED:
        return 0
    if report.verdict is Verdict.FALSIFIED:
        return 1
    return USAGE_ERROR  # GenerationStuck


def _cmd_accept(args) -> int:
    spec = _load_spec(args.spec_file)
    trace = parse_trace(args.trace)
    verdict = accept(spec, trace)
    print(verdict)
    return 0 if verdict else 1


_COMMANDS = {
    "check": _cmd_check,
    "interpret": _cmd_interpret,
    "sample": _cmd_sample,
    "test": _cmd_test,
    "accept": _cmd_accept,
}


def main(argv=None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits with 2 on usage errors already
        return int(err.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, StaticError, EvalError, LimitExceededError) as err:
        return _diag(str(err))
    except SystemExit as err:
        return int(err.code or 0)


if __name__ == "__main__":
    sys.exit(main())
