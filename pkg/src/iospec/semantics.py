"""Interpreters over specifications: trace acceptance and trace generation.

Both walk a specification left to right with an explicit stack of
iteration frames standing in for continuations.  A frame remembers the
loop body (to re-run when the body's sequence ends, the `End` signal) and
the actions following the whole loop (to resume on an exit marker, the
`Exit` signal, which discards whatever else was queued inside the loop).
The explicit stack keeps iteration counts inspectable so runaway loops hit
a configurable limit instead of spinning forever.

:func:`accept` decides whether an ordinary trace is a valid run.
:func:`interpret` runs a specification on a fixed input sequence and
returns the one generalized trace describing every valid run on those
inputs.  :func:`sample_generalized_trace` does the same with randomly
drawn inputs, which is what the test harness feeds on.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .environment import Environment, eval_output_set, eval_term, store
from .syntax import (
    Branch,
    DEFAULT_REGISTRY,
    ExplicitSet,
    Exit,
    FunctionRegistry,
    InputDomain,
    Naturals,
    ReadInput,
    Spec,
    TillExit,
    WriteOutput,
    normalize_spec,
    variables_of,
)
from .traces import (
    GeneralizedTrace,
    GenStep,
    In,
    Out,
    OutputWordSet,
    Trace,
)


@dataclass(frozen=True)
class GenerationLimits:
    """Runtime bounds substituting for static termination checks."""

    max_loop_iterations: int = 1000
    max_trace_length: int = 10000

    def __post_init__(self) -> None:
        if self.max_loop_iterations < 1 or self.max_trace_length < 1:
            raise ValueError("limits must be at least 1")


@dataclass(frozen=True)
class SamplingPolicy:
    """Inclusive ranges inputs are drawn from, plus the generator seed."""

    integer_range: tuple[int, int] = (-10, 10)
    natural_range: tuple[int, int] = (0, 10)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.integer_range[0] > self.integer_range[1]:
            raise ValueError("empty integer range")
        if self.natural_range[0] > self.natural_range[1]:
            raise ValueError("empty natural range")
        if self.natural_range[0] < 0:
            raise ValueError("natural range must not contain negatives")


class LimitExceededError(Exception):
    """A generation limit was hit before the run finished."""


class SpecStructureError(Exception):
    """An exit marker fired with no enclosing iteration (statically
    ruled out for well-formed specifications)."""


class InterpretError(Exception):
    pass


class InputRejectedError(InterpretError):
    def __init__(self, position: int, value: int, domain: InputDomain):
        super().__init__(
            f"input #{position + 1} is {value}, outside the domain {domain}"
        )
        self.position = position
        self.value = value
        self.domain = domain


class InputsExhaustedError(InterpretError):
    def __init__(self, position: int):
        super().__init__(f"the specification demands a {_ordinal(position + 1)} input")
        self.position = position


class SurplusInputsError(InterpretError):
    def __init__(self, count: int):
        super().__init__(f"{count} input(s) left over after the run finished")
        self.count = count


class GenerationFailureError(Exception):
    """Random generation hit a limit before producing a complete trace."""


def _ordinal(n: int) -> str:
    suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10 if n % 100 not in (11, 12, 13) else 0, "th")
    return f"{n}{suffix}"


# ---------------------------------------------------------------------------
# Trace acceptance


def accept(
    spec: Spec,
    trace: Trace,
    registry: FunctionRegistry = DEFAULT_REGISTRY,
    limits: GenerationLimits = GenerationLimits(),
) -> bool:
    """True iff the trace is a valid run of the specification.

    A read step must face a matching input inside its domain; a write step
    must face an output evaluating into its term set, except that a write
    allowing epsilon may also be skipped outright, so both readings are
    explored.  Branches choose by the current environment, loops re-run
    their body when it ends and resume after themselves on an exit marker,
    and the run is valid when specification and trace are exhausted
    together.

    Raises LimitExceededError when some reading re-enters a loop more than
    `limits.max_loop_iterations` times, and propagates evaluation errors.
    """
    spec = normalize_spec(spec)
    steps = trace.steps
    env0 = Environment.initial(variables_of(spec))
    # Alternatives stack: depth-first over the skippable-write choices.
    alternatives = [(spec.actions, (), 0, env0)]
    while alternatives:
        cur, frames, pos, env = alternatives.pop()
        while True:
            if not cur:
                if not frames:
                    if pos == len(steps):
                        return True
                    break
                body, rest, rounds = frames[-1]
                if rounds + 1 > limits.max_loop_iterations:
                    raise LimitExceededError(
                        f"loop ran more than {limits.max_loop_iterations} rounds"
                    )
                frames = frames[:-1] + ((body, rest, rounds + 1),)
                cur = body
                continue
            head = cur[0]
            if isinstance(head, ReadInput):
                if (
                    pos < len(steps)
                    and isinstance(steps[pos], In)
                    and head.domain.contains(steps[pos].value)
                ):
                    env = store(head.var, steps[pos].value, env)
                    pos += 1
                    cur = cur[1:]
                    continue
                break
            if isinstance(head, WriteOutput):
                allowed = {eval_term(t, env, registry) for t in head.terms}
                if head.includes_epsilon:
                    alternatives.append((cur[1:], frames, pos, env))
                if (
                    pos < len(steps)
                    and isinstance(steps[pos], Out)
                    and steps[pos].value in allowed
                ):
                    pos += 1
                    cur = cur[1:]
                    continue
                break
            if isinstance(head, Branch):
                taken = (
                    head.true_branch
                    if eval_term(head.condition, env, registry)
                    else head.false_branch
                )
                cur = taken.actions + cur[1:]
                continue
            if isinstance(head, TillExit):
                frames = frames + ((head.body.actions, cur[1:], 1),)
                cur = head.body.actions
                continue
            if isinstance(head, Exit):
                if not frames:
                    raise SpecStructureError("exit marker outside any loop")
                _, rest, _ = frames[-1]
                frames = frames[:-1]
                cur = rest
                continue
            raise TypeError(f"not an action: {head!r}")
    return False


# ---------------------------------------------------------------------------
# Generalized trace generation


def _concat_words(v1: frozenset, v2: frozenset) -> frozenset:
    return frozenset(a + b for a in v1 for b in v2)


def _generate(spec, draw, registry, limits) -> GeneralizedTrace:
    """Run the specification, pulling each input from `draw(position, domain)`.

    Output sets of back-to-back writes are fused into word sets by
    concatenation, so the result never holds two output steps in a row.
    """
    cur = spec.actions
    frames: list[list] = []  # [body, rest-after-loop, rounds]
    env = Environment.initial(variables_of(spec))
    steps: list[GenStep] = []
    pending: frozenset | None = None
    inputs_used = 0

    def flush() -> None:
        nonlocal pending
        if pending is not None:
            steps.append(OutputWordSet(pending))
            pending = None

    while True:
        if len(steps) > limits.max_trace_length:
            raise LimitExceededError(
                f"trace grew past {limits.max_trace_length} steps"
            )
        if not cur:
            if not frames:
                flush()
                return GeneralizedTrace(tuple(steps))
            frame = frames[-1]
            frame[2] += 1
            if frame[2] > limits.max_loop_iterations:
                raise LimitExceededError(
                    f"loop ran more than {limits.max_loop_iterations} rounds"
                )
            cur = frame[0]
            continue
        head = cur[0]
        if isinstance(head, ReadInput):
            value = draw(inputs_used, head.domain)
            flush()
            steps.append(In(value))
            env = store(head.var, value, env)
            inputs_used += 1
            cur = cur[1:]
        elif isinstance(head, WriteOutput):
            words = eval_output_set(head, env, registry).words
            pending = words if pending is None else _concat_words(pending, words)
            cur = cur[1:]
        elif isinstance(head, Branch):
            taken = (
                head.true_branch
                if eval_term(head.condition, env, registry)
                else head.false_branch
            )
            cur = taken.actions + cur[1:]
        elif isinstance(head, TillExit):
            frames.append([head.body.actions, cur[1:], 1])
            cur = head.body.actions
        elif isinstance(head, Exit):
            if not frames:
                raise SpecStructureError("exit marker outside any loop")
            cur = frames.pop()[1]
        else:
            raise TypeError(f"not an action: {head!r}")


def interpret(
    spec: Spec,
    inputs,
    registry: FunctionRegistry = DEFAULT_REGISTRY,
    limits: GenerationLimits = GenerationLimits(),
) -> GeneralizedTrace:
    """The unique generalized trace of the specification on these inputs.

    Raises InputRejectedError if an input falls outside its read's domain,
    InputsExhaustedError if the specification wants more inputs,
    SurplusInputsError if inputs remain when it finishes, and
    LimitExceededError on runaway iteration.
    """
    values = list(inputs)

    def draw(position: int, domain: InputDomain) -> int:
        if position >= len(values):
            raise InputsExhaustedError(position)
        value = values[position]
        if not domain.contains(value):
            raise InputRejectedError(position, value, domain)
        return value

    gt = _generate(normalize_spec(spec), draw, registry, limits)
    used = len(gt.inputs())
    if used < len(values):
        raise SurplusInputsError(len(values) - used)
    return gt


def sample_generalized_trace(
    spec: Spec,
    registry: FunctionRegistry = DEFAULT_REGISTRY,
    policy: SamplingPolicy = SamplingPolicy(),
    limits: GenerationLimits = GenerationLimits(),
) -> GeneralizedTrace:
    """Generate a random generalized trace; deterministic in `policy.seed`.

    Inputs are drawn uniformly: integer reads from `policy.integer_range`,
    natural-number reads from `policy.natural_range`, and explicit value
    sets as given (ignoring the ranges).  Raises GenerationFailureError
    when a limit is hit first, which for specifications with very narrow
    exit conditions is the expected outcome rather than a defect.
    """
    rng = random.Random(policy.seed)

    def draw(position: int, domain: InputDomain) -> int:
        if isinstance(domain, ExplicitSet):
            return rng.choice(sorted(domain.values))
        lo, hi = (
            policy.natural_range
            if isinstance(domain, Naturals)
            else policy.integer_range
        )
        return rng.randint(lo, hi)

    try:
        return _generate(normalize_spec(spec), draw, registry, limits)
    except LimitExceededError as err:
        raise GenerationFailureError(str(err)) from err


def extract_inputs(gt: GeneralizedTrace) -> list[int]:
    """The input values of a generalized trace, in order."""
    return gt.inputs()
