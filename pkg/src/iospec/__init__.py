"""Specify, interpret, and probabilistically test console I/O behavior."""

from .environment import Environment, EvalError, UnboundCurrentError, eval_output_set, eval_term, store
from .harness import (
    ConfigError,
    Counterexample,
    FeedbackMode,
    ReportFormat,
    TestConfig,
    TestReport,
    Verdict,
    format_feedback,
    run_test_suite,
)
from .parser import ParseError, SourceSpan, StaticError, parse_spec, render_spec, render_term
from .runner import (
    ExitKind,
    OutputParseMode,
    Read,
    RunOutcome,
    SpawnError,
    SubprocessConfig,
    Write,
    run_scripted,
    run_subprocess,
)
from .semantics import (
    GenerationFailureError,
    GenerationLimits,
    InputRejectedError,
    InputsExhaustedError,
    InterpretError,
    LimitExceededError,
    SamplingPolicy,
    SurplusInputsError,
    accept,
    extract_inputs,
    interpret,
    sample_generalized_trace,
)
from .syntax import (
    AllVar,
    Apply,
    Branch,
    CurrentVar,
    DEFAULT_REGISTRY,
    EMPTY,
    ExplicitSet,
    Exit,
    FunctionRegistry,
    FunctionSpec,
    IntConst,
    Integers,
    Naturals,
    ReadInput,
    Sort,
    SortError,
    Spec,
    TillExit,
    Violation,
    ViolationKind,
    WriteOutput,
    node_at,
    normalize_spec,
    variables_of,
    well_formed,
)
from .traces import (
    AlignmentMismatch,
    BoundExceededError,
    Covered,
    EPSILON,
    GeneralizedTrace,
    In,
    Out,
    OutputMismatch,
    OutputWordSet,
    PreconditionViolation,
    Trace,
    concretize,
    covers,
    normalize,
    parse_generalized_trace,
    parse_trace,
    render_trace,
)

__version__ = "0.1.0"
