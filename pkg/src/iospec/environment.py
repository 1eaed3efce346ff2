"""Variable environments with chronological value histories.

Environments are persistent: :func:`store` returns a successor and never
mutates, because acceptance checking threads the same environment through
alternative matching branches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .syntax import (
    AllVar,
    Apply,
    CurrentVar,
    DEFAULT_REGISTRY,
    FunctionRegistry,
    IntConst,
    Term,
    WriteOutput,
)
from .traces import EPSILON, OutputWordSet, Word


class EvalError(Exception):
    """Term evaluation failed."""


class UnboundCurrentError(EvalError):
    """A current-value access on a variable that was never read.

    Unreachable for specifications that pass the static checks; hitting it
    elsewhere indicates an internal invariant breach.
    """

    def __init__(self, name: str):
        super().__init__(f"{name}_C has no value: nothing was read into {name!r}")
        self.name = name


@dataclass(frozen=True, eq=True)
class Environment:
    """Maps each variable to all values read into it, oldest first."""

    histories: Mapping[str, tuple[int, ...]]

    @classmethod
    def initial(cls, variables: Iterable[str] = ()) -> "Environment":
        return cls({name: () for name in variables})

    def history(self, name: str) -> tuple[int, ...]:
        return self.histories.get(name, ())


def store(name: str, value: int, env: Environment) -> Environment:
    """Successor environment with `value` appended to `name`'s history."""
    histories = dict(env.histories)
    histories[name] = histories.get(name, ()) + (value,)
    return Environment(histories)


def eval_term(
    term: Term,
    env: Environment,
    registry: FunctionRegistry = DEFAULT_REGISTRY,
):
    """Evaluate a sort-correct term to an int, list of ints, or bool."""
    if isinstance(term, IntConst):
        return term.value
    if isinstance(term, CurrentVar):
        history = env.history(term.name)
        if not history:
            raise UnboundCurrentError(term.name)
        return history[-1]
    if isinstance(term, AllVar):
        return list(env.history(term.name))
    if isinstance(term, Apply):
        fn = registry.lookup(term.fn)
        if fn is None:
            raise EvalError(f"unknown function {term.fn!r}")
        args = [eval_term(a, env, registry) for a in term.args]
        return fn.fn(*args)
    raise EvalError(f"not a term: {term!r}")


def eval_output_set(
    write: WriteOutput,
    env: Environment,
    registry: FunctionRegistry = DEFAULT_REGISTRY,
) -> OutputWordSet:
    """All words the write may emit now: one-value words per term, and the
    empty word when the write is skippable.  Equal values collapse."""
    words: set[Word] = {(eval_term(t, env, registry),) for t in write.terms}
    if write.includes_epsilon:
        words.add(EPSILON)
    return OutputWordSet(frozenset(words))
