"""The end-to-end test loop: sample, run, check coverage, report.

Each test round samples a generalized trace from the specification,
extracts its input sequence, runs the program under test on those inputs,
and checks that the recorded run is covered.  The first uncovered run (or
abnormal program exit) falsifies; if generation keeps failing, the verdict
is GenerationStuck rather than a failure of the program, since narrow
branching conditions can make random generation hopeless.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace

from .runner import (
    ExitKind,
    RunOutcome,
    ScriptedProgram,
    SubprocessConfig,
    run_scripted,
    run_subprocess,
)
from .semantics import (
    GenerationFailureError,
    GenerationLimits,
    SamplingPolicy,
    extract_inputs,
    sample_generalized_trace,
)
from .syntax import DEFAULT_REGISTRY, FunctionRegistry, Spec
from .traces import (
    AlignmentMismatch,
    CoverageResult,
    Covered,
    GeneralizedTrace,
    GenStep,
    In,
    Out,
    OutputMismatch,
    OutputWordSet,
    Trace,
    covers,
    normalize,
    render_trace,
)


class ConfigError(Exception):
    pass


class ReportFormat(enum.Enum):
    HUMAN = "human"
    MACHINE_LINES = "machine"


class FeedbackMode(enum.Enum):
    FULL = "full"          # show the whole generalized trace
    EXAMPLE = "example"    # show just one valid run for the inputs


@dataclass(frozen=True)
class TestConfig:
    __test__ = False  # domain class, not a pytest suite

    num_tests: int = 100
    policy: SamplingPolicy = SamplingPolicy()
    limits: GenerationLimits = GenerationLimits()
    max_generation_attempts: int = 10
    report_format: ReportFormat = ReportFormat.HUMAN
    feedback_mode: FeedbackMode = FeedbackMode.FULL

    def __post_init__(self) -> None:
        if self.num_tests < 1:
            raise ConfigError("num_tests must be at least 1")
        if self.max_generation_attempts < 1:
            raise ConfigError("max_generation_attempts must be at least 1")


class Verdict(enum.Enum):
    ALL_PASSED = "AllPassed"
    FALSIFIED = "Falsified"
    GENERATION_STUCK = "GenerationStuck"


@dataclass(frozen=True)
class Counterexample:
    inputs: tuple[int, ...]
    expected: GeneralizedTrace
    actual: Trace
    error: CoverageResult
    exit_kind: ExitKind
    run_detail: str = ""


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # domain class, not a pytest suite

    verdict: Verdict
    tests_run: int
    seed: int
    counterexample: Counterexample | None = None
    detail: str = ""


Target = ScriptedProgram | SubprocessConfig


def _run_target(target: Target, inputs) -> RunOutcome:
    if isinstance(target, SubprocessConfig):
        return run_subprocess(target, inputs)
    return run_scripted(target, inputs)


def run_test_suite(
    spec: Spec,
    target: Target,
    cfg: TestConfig = TestConfig(),
    registry: FunctionRegistry = DEFAULT_REGISTRY,
) -> TestReport:
    """Run up to `cfg.num_tests` randomized rounds against the target.

    Deterministic for a given configuration and scripted target: all
    per-round sampling seeds derive from `cfg.policy.seed`.
    """
    rng = random.Random(cfg.policy.seed)
    for test_index in range(cfg.num_tests):
        gt = None
        last_failure = None
        for _ in range(cfg.max_generation_attempts):
            attempt_policy = replace(cfg.policy, seed=rng.getrandbits(64))
            try:
                gt = sample_generalized_trace(
                    spec, registry, attempt_policy, cfg.limits
                )
                break
            except GenerationFailureError as err:
                last_failure = err
        if gt is None:
            return TestReport(
                Verdict.GENERATION_STUCK,
                tests_run=test_index,
                seed=cfg.policy.seed,
                detail=(
                    f"gave up after {cfg.max_generation_attempts} attempts: "
                    f"{last_failure}"
                ),
            )
        inputs = extract_inputs(gt)
        outcome = _run_target(target, inputs)
        result = covers(gt, normalize(outcome.trace))
        if not isinstance(result, Covered) or not outcome.clean:
            return TestReport(
                Verdict.FALSIFIED,
                tests_run=test_index + 1,
                seed=cfg.policy.seed,
                counterexample=Counterexample(
                    inputs=tuple(inputs),
                    expected=gt,
                    actual=outcome.trace,
                    error=result,
                    exit_kind=outcome.exit_kind,
                    run_detail=outcome.detail,
                ),
            )
    return TestReport(Verdict.ALL_PASSED, tests_run=cfg.num_tests, seed=cfg.policy.seed)


# ---------------------------------------------------------------------------
# Feedback


def _render_plain_step(step: GenStep | None) -> str:
    # a step of a *normalized* trace, shown the way the program printed it
    if step is None:
        return "stop"
    if isinstance(step, In):
        return str(step)
    word = next(iter(step.words))
    return " ".join(f"!{v}" for v in word)


def _render_gen_step(step: GenStep | None) -> str:
    return "stop" if step is None else str(step)


def _example_run(gt: GeneralizedTrace) -> Trace:
    # one valid run: the smallest real word of every output set
    steps = []
    for step in gt.steps:
        if isinstance(step, OutputWordSet):
            steps.extend(Out(v) for v in step.non_epsilon()[0])
        else:
            steps.append(step)
    return Trace(tuple(steps))


def format_feedback(
    report: TestReport,
    report_format: ReportFormat = ReportFormat.HUMAN,
    feedback_mode: FeedbackMode = FeedbackMode.FULL,
) -> str:
    if report_format is ReportFormat.MACHINE_LINES:
        return _machine_lines(report)
    if report.verdict is Verdict.ALL_PASSED:
        return f"+++ OK, passed {report.tests_run} tests."
    if report.verdict is Verdict.GENERATION_STUCK:
        return (
            "*** Gave up! Could not generate a test case:\n" + report.detail
        )
    ce = report.counterexample
    lines = ["*** Failed! Falsifiable:"]
    lines.append("Input sequence: " + " ".join(f"?{v}" for v in ce.inputs))
    if feedback_mode is FeedbackMode.EXAMPLE:
        lines.append("Expected run (example): " + render_trace(_example_run(ce.expected)))
    else:
        lines.append("Expected run (generalized): " + render_trace(ce.expected))
    lines.append("Actual run: " + render_trace(ce.actual))
    lines.append("Error:")
    if isinstance(ce.error, AlignmentMismatch):
        lines.append("  AlignmentMismatch:")
        lines.append(f"    Expected: {_render_gen_step(ce.error.expected)}")
        lines.append(f"    Got: {_render_plain_step(ce.error.got)}")
    elif isinstance(ce.error, OutputMismatch):
        lines.append("  OutputMismatch:")
        word = " ".join(str(v) for v in ce.error.word)
        allowed = str(ce.error.allowed)[1:]  # the set without the ! marker
        lines.append(f"    the value {word} is not covered by {allowed}")
    else:
        lines.append(f"  AbnormalExit: {ce.exit_kind.value}")
        if ce.run_detail:
            lines.append(f"    {ce.run_detail}")
    return "\n".join(lines)


def _machine_lines(report: TestReport) -> str:
    lines = [
        f"verdict={report.verdict.value}",
        f"tests={report.tests_run}",
        f"seed={report.seed}",
    ]
    if report.verdict is Verdict.GENERATION_STUCK:
        lines.append(f"error={report.detail}")
    ce = report.counterexample
    if ce is not None:
        lines.append("inputs=" + ",".join(str(v) for v in ce.inputs))
        lines.append("expected=" + render_trace(ce.expected))
        lines.append("actual=" + render_trace(ce.actual))
        if isinstance(ce.error, AlignmentMismatch):
            lines.append("error=AlignmentMismatch")
            lines.append(f"expected_step={_render_gen_step(ce.error.expected)}")
            lines.append(f"got_step={_render_plain_step(ce.error.got)}")
        elif isinstance(ce.error, OutputMismatch):
            lines.append("error=OutputMismatch")
            lines.append("word=" + " ".join(str(v) for v in ce.error.word))
            lines.append(f"allowed={str(ce.error.allowed)[1:]}")
        else:
            lines.append(f"error=AbnormalExit:{ce.exit_kind.value}")
    return "\n".join(lines)
