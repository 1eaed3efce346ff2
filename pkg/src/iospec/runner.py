"""Running programs under test on a fixed input sequence, recording traces.

Scripted programs run in-process and give exact traces: a program is a
zero-argument callable returning a generator that yields ``Read()`` to
request the next integer (delivered as the value of the yield) and
``Write(v)`` to emit one, and returns to halt::

    def summer():
        n = yield Read()
        total = 0
        for _ in range(n):
            x = yield Read()
            total += x
        yield Write(total)

External executables speak a line protocol on stdin/stdout (one decimal
integer per line) and are observed best-effort: after writing an input the
runner collects output lines until none arrive for a quiescence window,
then sends the next input.  Programs that delay flushing may get outputs
attributed one input late; trace normalization makes the coverage check
insensitive to exactly that kind of regrouping.
"""

from __future__ import annotations

import enum
import queue
import subprocess
import threading
import time
from dataclasses import dataclass
from typing import Callable, Generator

from .traces import In, Out, Trace, TraceStep


@dataclass(frozen=True)
class Read:
    """Effect: request the next input integer."""


@dataclass(frozen=True)
class Write:
    """Effect: emit one output integer."""

    value: int


ScriptedProgram = Callable[[], Generator]


class ExitKind(enum.Enum):
    CLEAN_HALT = "CleanHalt"
    TIMED_OUT = "TimedOut"
    CRASHED = "Crashed"
    PROTOCOL_ERROR = "ProtocolError"


@dataclass(frozen=True)
class RunOutcome:
    trace: Trace
    exit_kind: ExitKind
    consumed_inputs: int
    detail: str = ""
    exit_code: int | None = None
    stderr: str = ""

    @property
    def clean(self) -> bool:
        return self.exit_kind is ExitKind.CLEAN_HALT


def run_scripted(program: ScriptedProgram, inputs) -> RunOutcome:
    """Drive a scripted program on the inputs; never raises for program
    misbehavior, which lands in the outcome instead.

    Requesting input with none left is a protocol error ending the run;
    halting with inputs left over is tolerated (the trace simply consumes
    fewer inputs, which the coverage check will judge).
    """
    values = list(inputs)
    steps: list[TraceStep] = []
    consumed = 0
    gen = program()
    feed = None
    while True:
        try:
            effect = gen.send(feed)
        except StopIteration:
            return RunOutcome(Trace(tuple(steps)), ExitKind.CLEAN_HALT, consumed)
        except Exception as err:  # the program under test blew up
            return RunOutcome(
                Trace(tuple(steps)), ExitKind.CRASHED, consumed, detail=repr(err)
            )
        feed = None
        if isinstance(effect, Read):
            if consumed == len(values):
                gen.close()
                return RunOutcome(
                    Trace(tuple(steps)),
                    ExitKind.PROTOCOL_ERROR,
                    consumed,
                    detail="InputUnderflow: program wants more input",
                )
            feed = values[consumed]
            steps.append(In(feed))
            consumed += 1
        elif isinstance(effect, Write):
            steps.append(Out(effect.value))
        else:
            gen.close()
            return RunOutcome(
                Trace(tuple(steps)),
                ExitKind.PROTOCOL_ERROR,
                consumed,
                detail=f"BadEffect: yielded {effect!r}",
            )


# ---------------------------------------------------------------------------
# External processes


class OutputParseMode(enum.Enum):
    STRICT_INTEGER = "strictInteger"
    SKIP_BLANK = "skipBlank"


@dataclass(frozen=True)
class SubprocessConfig:
    executable: str
    args: tuple[str, ...] = ()
    per_run_timeout_ms: int = 5000
    quiescence_window_ms: int = 50
    output_parse_mode: OutputParseMode = OutputParseMode.STRICT_INTEGER

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        if not self.per_run_timeout_ms > self.quiescence_window_ms > 0:
            raise ValueError("need timeout > quiescence window > 0")


class SpawnError(Exception):
    """The program under test could not be started at all."""


def _pump(stream, sink: queue.Queue) -> None:
    try:
        for line in stream:
            sink.put(line)
    except ValueError:  # stream closed during shutdown
        pass
    sink.put(None)


def run_subprocess(cfg: SubprocessConfig, inputs) -> RunOutcome:
    """Run an external program on the inputs over the line protocol.

    Inputs are written one per line; every stdout line is parsed as a
    decimal integer output.  The child is always reaped, also on timeout.
    """
    try:
        proc = subprocess.Popen(
            [cfg.executable, *cfg.args],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
    except OSError as err:
        raise SpawnError(f"cannot start {cfg.executable!r}: {err}") from err

    out_lines: queue.Queue = queue.Queue()
    err_chunks: queue.Queue = queue.Queue()
    threading.Thread(target=_pump, args=(proc.stdout, out_lines), daemon=True).start()
    threading.Thread(target=_pump, args=(proc.stderr, err_chunks), daemon=True).start()

    deadline = time.monotonic() + cfg.per_run_timeout_ms / 1000.0
    quiescence = cfg.quiescence_window_ms / 1000.0
    steps: list[TraceStep] = []
    consumed = 0
    eof_seen = False

    def finish(kind: ExitKind, detail: str = "") -> RunOutcome:
        if proc.poll() is None:
            proc.kill()
        proc.wait()
        for f in (proc.stdin, proc.stdout, proc.stderr):
            if f is not None:
                try:
                    f.close()
                except OSError:
                    pass
        stderr_parts = []
        while True:  # the pump always follows EOF with a sentinel
            try:
                chunk = err_chunks.get(timeout=0.25)
            except queue.Empty:
                break
            if chunk is None:
                break
            stderr_parts.append(chunk)
        stderr = "".join(stderr_parts)
        code = proc.returncode
        if kind is ExitKind.CLEAN_HALT and code != 0:
            kind, detail = ExitKind.CRASHED, f"exit code {code}"
        return RunOutcome(
            Trace(tuple(steps)), kind, consumed,
            detail=detail, exit_code=code, stderr=stderr,
        )

    def take_output(line: str) -> str | None:
        # returns an error detail, or None if the line was handled
        text = line.rstrip("\n")
        if not text.strip():
            if cfg.output_parse_mode is OutputParseMode.SKIP_BLANK:
                return None
            return "UnparsableOutput: blank line"
        try:
            steps.append(Out(int(text.strip())))
        except ValueError:
            return f"UnparsableOutput: {text!r}"
        return None

    def collect(until_exit: bool) -> RunOutcome | None:
        # pull output lines until quiescence (or process exit when asked);
        # returns an outcome only to abort the whole run
        nonlocal eof_seen
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return finish(ExitKind.TIMED_OUT, "per-run timeout hit")
            if eof_seen:
                if not until_exit:
                    return None
                try:
                    proc.wait(timeout=remaining)
                    return None
                except subprocess.TimeoutExpired:
                    return finish(ExitKind.TIMED_OUT, "per-run timeout hit")
            try:
                line = out_lines.get(timeout=min(quiescence, remaining))
            except queue.Empty:
                if until_exit:
                    continue
                return None
            if line is None:
                eof_seen = True
                continue
            error = take_output(line)
            if error is not None:
                return finish(ExitKind.PROTOCOL_ERROR, error)

    for value in list(inputs):
        aborted = collect(until_exit=False)
        if aborted is not None:
            return aborted
        if eof_seen:
            break  # output closed: the observable interaction is over
        try:
            proc.stdin.write(f"{value}\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError):
            break
        steps.append(In(value))
        consumed += 1
    aborted = collect(until_exit=True)
    if aborted is not None:
        return aborted
    return finish(ExitKind.CLEAN_HALT)
