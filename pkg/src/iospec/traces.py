"""Program run traces, generalized traces, and the covering check.

An ordinary trace records one program run as integer input/output steps.
A generalized trace fixes the inputs but carries, at each output position,
the *set* of output words a correct program may produce there (the empty
word meaning "may print nothing"); consecutive outputs are always fused
into words, since a black-box observer cannot tell where one print ended
and the next began.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Union

from .parser import ParseError, SourceSpan

# An output word: the values of a run of consecutive prints; () is the
# empty word (no output at all).
Word = tuple
EPSILON: Word = ()


@dataclass(frozen=True)
class In:
    value: int

    def __str__(self) -> str:
        return f"?{self.value}"


@dataclass(frozen=True)
class Out:
    value: int

    def __str__(self) -> str:
        return f"!{self.value}"


TraceStep = Union[In, Out]


@dataclass(frozen=True)
class Trace:
    """A finished program run; rendering appends the closing `stop`."""

    steps: tuple[TraceStep, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    def inputs(self) -> list[int]:
        return [s.value for s in self.steps if isinstance(s, In)]


def _word_key(word: Word):
    return (len(word), word)


@dataclass(frozen=True)
class OutputWordSet:
    """Words allowed at one output position; must allow some real output."""

    words: frozenset[Word]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "words", frozenset(tuple(w) for w in self.words)
        )
        if not self.words - {EPSILON}:
            raise ValueError("output word set needs a non-empty word")

    @property
    def includes_epsilon(self) -> bool:
        return EPSILON in self.words

    def non_epsilon(self) -> list[Word]:
        return sorted(self.words - {EPSILON}, key=_word_key)

    def __contains__(self, word: Word) -> bool:
        return tuple(word) in self.words

    def __str__(self) -> str:
        items = (["eps"] if self.includes_epsilon else []) + [
            _render_word(w) for w in self.non_epsilon()
        ]
        return "!{" + ", ".join(items) + "}"


GenStep = Union[In, OutputWordSet]


@dataclass(frozen=True)
class GeneralizedTrace:
    """Inputs interleaved with output word sets; never two sets in a row."""

    steps: tuple[GenStep, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        previous_was_set = False
        for step in self.steps:
            is_set = isinstance(step, OutputWordSet)
            if is_set and previous_was_set:
                raise ValueError("consecutive output sets must be fused")
            previous_was_set = is_set

    def inputs(self) -> list[int]:
        return [s.value for s in self.steps if isinstance(s, In)]


def normalize(trace: Trace) -> GeneralizedTrace:
    """Embed an ordinary trace: fuse each run of outputs into one word.

    The result has only singleton sets of non-empty words.
    """
    steps: list[GenStep] = []
    pending: list[int] = []

    def flush() -> None:
        if pending:
            steps.append(OutputWordSet(frozenset({tuple(pending)})))
            pending.clear()

    for step in trace.steps:
        if isinstance(step, Out):
            pending.append(step.value)
        else:
            flush()
            steps.append(step)
    flush()
    return GeneralizedTrace(tuple(steps))


# ---------------------------------------------------------------------------
# Covering


@dataclass(frozen=True)
class Covered:
    pass


@dataclass(frozen=True)
class AlignmentMismatch:
    """The traces disagree structurally; `position` indexes the normalized
    trace's first step (or its end, at len) that found no counterpart."""

    expected: GenStep | None  # None stands for stop
    got: GenStep | None
    position: int


@dataclass(frozen=True)
class OutputMismatch:
    """Both sides are outputs, but the produced word is not allowed."""

    word: Word
    allowed: OutputWordSet
    position: int


CoverageResult = Union[Covered, AlignmentMismatch, OutputMismatch]


class PreconditionViolation(Exception):
    """covers() was handed a trace outside the image of normalize()."""


def covers(gt: GeneralizedTrace, nt: GeneralizedTrace) -> CoverageResult:
    """Is the normalized run `nt` among the runs `gt` represents?

    Walks both traces left to right: inputs must agree, an output word must
    be an element of the facing word set, and a set containing the empty
    word may be skipped entirely.  Since neither side may hold two output
    steps in a row, a skippable set facing a produced word can never be
    satisfied by skipping (the word would then face an input or the end),
    so the walk needs no backtracking and the reported mismatch is the
    earliest one.  Output mismatches win over alignment mismatches when
    both readings fail at the same step.
    """
    for step in nt.steps:
        if isinstance(step, OutputWordSet) and (
            len(step.words) != 1 or step.includes_epsilon
        ):
            raise PreconditionViolation(
                "left side of the covering check must come from normalize()"
            )

    i = j = 0
    while True:
        expected = gt.steps[j] if j < len(gt.steps) else None
        got = nt.steps[i] if i < len(nt.steps) else None
        if expected is None and got is None:
            return Covered()
        if isinstance(expected, OutputWordSet):
            if isinstance(got, OutputWordSet):
                word = next(iter(got.words))
                if word in expected:
                    i += 1
                    j += 1
                    continue
                return OutputMismatch(word, expected, i)
            if expected.includes_epsilon:
                j += 1
                continue
            return AlignmentMismatch(expected, got, i)
        if isinstance(expected, In) and isinstance(got, In):
            if expected.value == got.value:
                i += 1
                j += 1
                continue
        return AlignmentMismatch(expected, got, i)


class BoundExceededError(Exception):
    def __init__(self, count: int, bound: int):
        super().__init__(f"{count} concretizations exceed the bound of {bound}")
        self.count = count
        self.bound = bound


def concretize(
    gt: GeneralizedTrace, bound: int | None = None
) -> set[GeneralizedTrace]:
    """Every run the generalized trace represents, as normalized traces.

    One word is chosen per output set; choosing the empty word drops the
    step.  Raises BoundExceededError when more than `bound` choices exist.
    """
    choice_points = [
        sorted(s.words, key=_word_key)
        for s in gt.steps
        if isinstance(s, OutputWordSet)
    ]
    count = math.prod(len(words) for words in choice_points)
    if bound is not None and count > bound:
        raise BoundExceededError(count, bound)

    results: set[GeneralizedTrace] = set()
    for choice in itertools.product(*choice_points):
        picked = iter(choice)
        steps: list[GenStep] = []
        for step in gt.steps:
            if isinstance(step, OutputWordSet):
                word = next(picked)
                if word != EPSILON:
                    steps.append(OutputWordSet(frozenset({word})))
            else:
                steps.append(step)
        results.add(GeneralizedTrace(tuple(steps)))
    return results


# ---------------------------------------------------------------------------
# Text format


def _render_word(word: Word) -> str:
    if len(word) == 1:
        return str(word[0])
    return "<" + " ".join(str(v) for v in word) + ">"


def render_trace(trace: Trace | GeneralizedTrace) -> str:
    """`?v` inputs, `!v` outputs, `!{...}` output sets with `eps` for the
    empty word and `<v1 v2>` for fused multi-value words; ends in `stop`."""
    parts = [str(step) for step in trace.steps]
    parts.append("stop")
    return " ".join(parts)


_TRACE_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<in>\?-?\d+)
    | (?P<outset>!\{)
    | (?P<out>!-?\d+)
    | (?P<int>-?\d+)
    | (?P<word>stop|eps)
    | (?P<punct>[<>,}])
    """,
    re.VERBOSE,
)


def _scan_trace(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TRACE_TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                SourceSpan(1, pos + 1, 1, pos + 1),
                f"unexpected character {text[pos]!r} in trace",
            )
        kind = m.lastgroup
        if kind != "ws":
            lexeme = m.group(0)
            tokens.append((kind if kind != "word" and kind != "punct" else lexeme,
                           lexeme, pos + 1))
        pos = m.end()
    tokens.append(("eof", "", pos + 1))
    return tokens


class _TraceParser:
    def __init__(self, text: str):
        self.tokens = _scan_trace(text)
        self.pos = 0

    @property
    def here(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str):
        kind, lexeme, col = self.here
        shown = lexeme or "end of input"
        raise ParseError(SourceSpan(1, col, 1, col), f"{message}, got {shown!r}")

    def expect_stop_end(self) -> None:
        if self.here[0] != "stop":
            self.fail("expected 'stop'")
        self.advance()
        if self.here[0] != "eof":
            self.fail("expected end of input after 'stop'")

    def word_set(self) -> OutputWordSet:
        words: set[Word] = set()
        while True:
            kind, lexeme, _ = self.here
            if kind == "eps":
                self.advance()
                words.add(EPSILON)
            elif kind == "int":
                self.advance()
                words.add((int(lexeme),))
            elif kind == "<":
                self.advance()
                values = []
                while self.here[0] == "int":
                    values.append(int(self.advance()[1]))
                if self.here[0] != ">":
                    self.fail("expected '>' closing the word")
                self.advance()
                if not values:
                    self.fail("empty fused word")
                words.add(tuple(values))
            else:
                self.fail("expected a word")
            if self.here[0] == ",":
                self.advance()
                continue
            if self.here[0] == "}":
                self.advance()
                try:
                    return OutputWordSet(frozenset(words))
                except ValueError as err:
                    self.fail(str(err))
            self.fail("expected ',' or '}'")


def parse_trace(text: str) -> Trace:
    """Parse an ordinary trace such as `?2 ?5 ?3 !8 stop`."""
    parser = _TraceParser(text)
    steps: list[TraceStep] = []
    while parser.here[0] in ("in", "out"):
        kind, lexeme, _ = parser.advance()
        value = int(lexeme[1:])
        steps.append(In(value) if kind == "in" else Out(value))
    parser.expect_stop_end()
    return Trace(tuple(steps))


def parse_generalized_trace(text: str) -> GeneralizedTrace:
    """Parse a generalized trace such as `?1 !{eps, 1} ?4 !{4} stop`."""
    parser = _TraceParser(text)
    steps: list[GenStep] = []
    while parser.here[0] in ("in", "outset"):
        kind, lexeme, _ = parser.advance()
        if kind == "in":
            steps.append(In(int(lexeme[1:])))
        else:
            steps.append(parser.word_set())
    parser.expect_stop_end()
    try:
        return GeneralizedTrace(tuple(steps))
    except ValueError as err:
        raise ParseError(SourceSpan(1, 1, 1, 1), str(err))
