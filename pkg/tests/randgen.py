"""Seeded random generators: well-formed specs, trace mutations, and
generalized traces for checking the covering relation against brute force.

Generated loops always terminate: every loop is guarded by a condition of
the form len(v_A) >= m whose false branch unconditionally reads v, so each
round makes progress toward the bound no matter what the inputs are.
"""

import random

from iospec import (
    AllVar,
    Apply,
    Branch,
    CurrentVar,
    ExplicitSet,
    Exit,
    GeneralizedTrace,
    In,
    IntConst,
    Integers,
    Naturals,
    Out,
    OutputWordSet,
    ReadInput,
    Spec,
    TillExit,
    Trace,
    WriteOutput,
    normalize_spec,
)

VARS = ("a", "b", "c")


class SpecGen:
    def __init__(self, rng: random.Random, max_vars: int = 3):
        self.rng = rng
        self.vars = VARS[:max_vars]
        # variables read on *every* path to the current point, so that a
        # current-value access can never fail at run time
        self.definite: set[str] = set()

    # -- terms --------------------------------------------------------

    def int_term(self, depth: int):
        opts = ["const", "len", "sum"]
        if self.definite:
            opts.append("cur")
        if depth > 0:
            opts += ["binop", "binop"]
        kind = self.rng.choice(opts)
        if kind == "const":
            return IntConst(self.rng.randint(-5, 5))
        if kind == "cur":
            return CurrentVar(self.rng.choice(sorted(self.definite)))
        if kind in ("len", "sum"):
            return Apply(kind, (AllVar(self.rng.choice(self.vars)),))
        op = self.rng.choice(["+", "-", "*"])
        return Apply(op, (self.int_term(depth - 1), self.int_term(depth - 1)))

    def bool_term(self, depth: int):
        if depth > 0 and self.rng.random() < 0.3:
            kind = self.rng.choice(["and", "or", "not"])
            if kind == "not":
                return Apply("not", (self.bool_term(depth - 1),))
            return Apply(kind, (self.bool_term(depth - 1), self.bool_term(depth - 1)))
        op = self.rng.choice(["==", "<", "<=", ">", ">="])
        return Apply(op, (self.int_term(1), self.int_term(1)))

    # -- actions ------------------------------------------------------

    def domain(self):
        roll = self.rng.random()
        if roll < 0.4:
            return Integers()
        if roll < 0.7:
            return Naturals()
        size = self.rng.randint(1, 4)
        return ExplicitSet(frozenset(self.rng.sample(range(-3, 6), size)))

    def read_action(self):
        var = self.rng.choice(self.vars)
        self.definite.add(var)
        return ReadInput(var, self.domain())

    def write_action(self):
        terms = tuple(self.int_term(1) for _ in range(self.rng.randint(1, 2)))
        return WriteOutput(terms, includes_epsilon=self.rng.random() < 0.5)

    def branch_action(self, depth: int, in_loop: bool):
        condition = self.bool_term(1)
        before = set(self.definite)
        false_branch = Spec(tuple(self.sequence(depth - 1, in_loop)))
        after_false = self.definite
        self.definite = set(before)
        true_branch = Spec(tuple(self.sequence(depth - 1, in_loop)))
        self.definite = before | (after_false & self.definite)
        return Branch(condition, false_branch, true_branch)

    def loop_action(self, depth: int):
        var = self.rng.choice(self.vars)
        bound = self.rng.randint(1, 3)
        condition = Apply(">=", (Apply("len", (AllVar(var),)), IntConst(bound)))
        before = set(self.definite)
        # the staying branch opens with the read that makes the loop progress
        self.definite = before | {var}
        stay_actions = [ReadInput(var, self.domain())]
        if self.rng.random() < 0.5:
            stay_actions.append(self.write_action())
        stay = Spec(tuple(stay_actions + self.sequence(depth - 1, in_loop=True)))
        # leaving requires len(var_A) >= bound >= 1, so var is read by then
        self.definite = before | {var}
        leave = Spec(tuple(self.sequence(depth - 1, in_loop=True) + [Exit()]))
        return TillExit(Spec((Branch(condition, stay, leave),)))

    def sequence(self, depth: int, in_loop: bool = False) -> list:
        actions = []
        for _ in range(self.rng.randint(0, 3)):
            roll = self.rng.random()
            if roll < 0.35:
                actions.append(self.read_action())
            elif roll < 0.7 or depth <= 0:
                actions.append(self.write_action())
            elif roll < 0.9:
                actions.append(self.branch_action(depth, in_loop))
            else:
                actions.append(self.loop_action(depth))
        return actions


def random_spec(rng: random.Random, depth: int = 4, max_vars: int = 3) -> Spec:
    gen = SpecGen(rng, max_vars)
    actions = gen.sequence(depth)
    if not actions:
        actions = [gen.read_action()]
    return normalize_spec(Spec(tuple(actions)))


# ---------------------------------------------------------------------------
# Traces


def concretization_as_trace(rng: random.Random, gt: GeneralizedTrace) -> Trace:
    """One concrete run of a generalized trace, as an ordinary trace."""
    steps = []
    for step in gt.steps:
        if isinstance(step, OutputWordSet):
            word = rng.choice(sorted(step.words, key=lambda w: (len(w), w)))
            steps.extend(Out(v) for v in word)
        else:
            steps.append(step)
    return Trace(tuple(steps))


def mutate_trace(rng: random.Random, trace: Trace, rounds: int = 1) -> Trace:
    """Tweak values and insert or delete steps, `rounds` times."""
    steps = list(trace.steps)
    for _ in range(rounds):
        op = rng.choice(["tweak", "insert", "delete"])
        if op == "tweak" and steps:
            i = rng.randrange(len(steps))
            delta = rng.choice([-2, -1, 1, 2, 100])
            step = steps[i]
            steps[i] = type(step)(step.value + delta)
        elif op == "insert":
            i = rng.randint(0, len(steps))
            value = rng.randint(-10, 10)
            steps.insert(i, rng.choice([In, Out])(value))
        elif steps:  # delete
            del steps[rng.randrange(len(steps))]
    return Trace(tuple(steps))


def _random_word_set(rng: random.Random) -> OutputWordSet:
    words = {
        tuple(rng.randint(-3, 3) for _ in range(rng.randint(1, 2)))
        for _ in range(rng.randint(1, 3))
    }
    if rng.random() < 0.5:
        words.add(())
    return OutputWordSet(frozenset(words))


def random_generalized_trace(
    rng: random.Random, max_concretizations: int = 64
) -> GeneralizedTrace:
    """Random well-typed generalized trace with a bounded choice count."""
    steps = []
    product = 1
    for group in range(rng.randint(1, 5)):
        if group > 0 or rng.random() < 0.7:  # sets need an input in between
            for _ in range(rng.randint(1, 2)):
                steps.append(In(rng.randint(-5, 5)))
        if rng.random() < 0.8:
            word_set = _random_word_set(rng)
            if product * len(word_set.words) > max_concretizations:
                break
            product *= len(word_set.words)
            steps.append(word_set)
            if rng.random() < 0.5:
                steps.append(In(rng.randint(-5, 5)))
    return GeneralizedTrace(tuple(steps))
