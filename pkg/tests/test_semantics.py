import random

import pytest

from iospec import (
    AllVar,
    Apply,
    Branch,
    Covered,
    CurrentVar,
    In,
    Out,
    EMPTY,
    ExplicitSet,
    Exit,
    GenerationFailureError,
    GenerationLimits,
    InputRejectedError,
    InputsExhaustedError,
    IntConst,
    Integers,
    LimitExceededError,
    OutputWordSet,
    ReadInput,
    SamplingPolicy,
    Spec,
    SurplusInputsError,
    TillExit,
    Trace,
    UnboundCurrentError,
    WriteOutput,
    accept,
    covers,
    extract_inputs,
    interpret,
    normalize,
    parse_spec,
    parse_trace,
    render_trace,
    sample_generalized_trace,
)

from conftest import STUCK_SPEC
from randgen import concretization_as_trace, mutate_trace, random_spec

ALWAYS = Apply("==", (IntConst(0), IntConst(0)))


class TestAccept:
    def test_golden_valid_run(self, sum_spec):
        assert accept(sum_spec, parse_trace("?2 ?5 ?3 !8 stop")) is True

    def test_empty_spec_accepts_only_stop(self):
        assert accept(EMPTY, Trace(())) is True
        assert accept(EMPTY, parse_trace("?1 stop")) is False
        assert accept(EMPTY, parse_trace("!1 stop")) is False

    def test_golden_invalid_run(self, sum_spec):
        assert accept(sum_spec, parse_trace("?3 !4 ?-1 !2 ?7 !1 ?4 !10 stop")) is False

    def test_optional_output_both_ways(self, sum_spec):
        assert accept(sum_spec, parse_trace("?1 ?4 !4 stop")) is True
        assert accept(sum_spec, parse_trace("?1 !1 ?4 !4 stop")) is True
        assert accept(sum_spec, parse_trace("?1 !2 ?4 !4 stop")) is False

    def test_domain_respected(self, sum_spec):
        # the first read wants a natural number
        assert accept(sum_spec, parse_trace("?-1 !0 stop")) is False

    def test_incomplete_run_rejected(self, sum_spec):
        assert accept(sum_spec, parse_trace("?2 ?5 stop")) is False
        assert accept(sum_spec, parse_trace("?2 ?5 ?3 stop")) is False

    def test_surplus_trace_rejected(self, sum_spec):
        assert accept(sum_spec, parse_trace("?0 !0 !0 stop")) is False

    def test_trace_length_limit(self):
        # a loop allowed to run long enough must trip the length bound first
        spec = Spec((
            TillExit(Spec((
                Branch(
                    Apply(">=", (Apply("len", (AllVar("x"),)), IntConst(10**9))),
                    Spec((ReadInput("x", Integers()),)),
                    Spec((Exit(),)),
                ),
            ))),
        ))
        limits = GenerationLimits(max_loop_iterations=10**9, max_trace_length=50)
        with pytest.raises(GenerationFailureError):
            sample_generalized_trace(spec, limits=limits)

    def test_runaway_loop_hits_limit(self):
        spec = Spec((
            TillExit(Spec((
                Branch(
                    Apply("==", (IntConst(0), IntConst(1))),
                    Spec((WriteOutput((IntConst(1),), includes_epsilon=True),)),
                    Spec((Exit(),)),
                ),
            ))),
        ))
        with pytest.raises(LimitExceededError):
            accept(spec, Trace(()), limits=GenerationLimits(max_loop_iterations=50))

    def test_eval_error_propagates(self):
        bad = Spec((WriteOutput((CurrentVar("x"),)),))
        with pytest.raises(UnboundCurrentError):
            accept(bad, parse_trace("!1 stop"))


class TestExitDiscard:
    def test_exit_discards_rest_of_loop_round(self):
        # exit reached through two nested satisfied branches skips the
        # trailing write of the same round
        spec = Spec((
            TillExit(Spec((
                Branch(ALWAYS, EMPTY, Spec((Branch(ALWAYS, EMPTY, Spec((Exit(),))),))),
                WriteOutput((IntConst(1),)),
            ))),
        ))
        assert accept(spec, Trace(())) is True
        assert accept(spec, parse_trace("!1 stop")) is False
        assert render_trace(interpret(spec, [])) == "stop"

    def test_trailing_actions_run_until_the_exit_round(self):
        len_x = Apply("len", (AllVar("x"),))
        body = Spec((
            Branch(
                Apply(">=", (len_x, IntConst(1))),
                Spec((ReadInput("x", Integers()),)),
                Spec((Branch(
                    Apply(">=", (len_x, IntConst(2))),
                    Spec((ReadInput("x", Integers()),)),
                    Spec((Exit(),)),
                ),)),
            ),
            WriteOutput((IntConst(7),)),
        ))
        spec = Spec((TillExit(body), WriteOutput((IntConst(9),))))
        # rounds: read a, write 7; read b, write 7; exit; then write 9,
        # where the last 7 and the 9 fuse into one word
        assert render_trace(interpret(spec, [4, -2])) == "?4 !{7} ?-2 !{<7 9>} stop"
        assert accept(spec, parse_trace("?4 !7 ?-2 !7 !9 stop")) is True
        assert accept(spec, parse_trace("?4 !7 ?-2 !9 stop")) is False

    def test_direct_exit_discards_trailing_writes(self):
        spec = Spec((
            TillExit(Spec((Exit(), WriteOutput((IntConst(5),))))),
            WriteOutput((IntConst(3),)),
        ))
        assert render_trace(interpret(spec, [])) == "!{3} stop"
        assert accept(spec, parse_trace("!3 stop")) is True
        assert accept(spec, parse_trace("!5 !3 stop")) is False


class TestInterpret:
    def test_set_shapes(self, sum_spec):
        assert render_trace(interpret(sum_spec, [0])) == "?0 !{0} stop"
        assert render_trace(interpret(sum_spec, [1, 4])) == "?1 !{eps, 1} ?4 !{4} stop"
        assert (
            render_trace(interpret(sum_spec, [2, 3, 7]))
            == "?2 !{eps, 2} ?3 !{eps, 1} ?7 !{10} stop"
        )

    def test_adjacent_writes_fuse(self):
        spec = parse_spec("read x : ints write { eps, x_C } write { eps, x_C }")
        assert render_trace(interpret(spec, [9])) == "?9 !{eps, 9, <9 9>} stop"

    def test_input_rejected(self, sum_spec):
        with pytest.raises(InputRejectedError) as exc:
            interpret(sum_spec, [-3])
        assert exc.value.position == 0
        assert exc.value.value == -3

    def test_inputs_exhausted(self, sum_spec):
        with pytest.raises(InputsExhaustedError):
            interpret(sum_spec, [2, 5])

    def test_surplus_inputs(self, sum_spec):
        with pytest.raises(SurplusInputsError) as exc:
            interpret(sum_spec, [1, 5, 5])
        assert exc.value.count == 1

    def test_no_consecutive_output_sets(self):
        rng = random.Random(17)
        for _ in range(100):
            spec = random_spec(rng)
            gt = sample_generalized_trace(spec, policy=SamplingPolicy(seed=rng.getrandbits(32)))
            previous_was_set = False
            for step in gt.steps:
                is_set = isinstance(step, OutputWordSet)
                assert not (is_set and previous_was_set)
                previous_was_set = is_set

    def test_deterministic(self, sum_spec):
        a = interpret(sum_spec, [3, 1, 2, 3])
        b = interpret(sum_spec, [3, 1, 2, 3])
        assert a == b


class TestSample:
    def test_deterministic_per_seed(self, sum_spec):
        policy = SamplingPolicy(seed=424242)
        a = sample_generalized_trace(sum_spec, policy=policy)
        b = sample_generalized_trace(sum_spec, policy=policy)
        assert a == b

    def test_shape_and_ranges(self, sum_spec):
        for seed in range(300):
            gt = sample_generalized_trace(sum_spec, policy=SamplingPolicy(seed=seed))
            inputs = extract_inputs(gt)
            n, summands = inputs[0], inputs[1:]
            assert 0 <= n <= 10
            assert len(summands) == n
            assert all(-10 <= v <= 10 for v in summands)

    def test_empty_spec(self):
        assert render_trace(sample_generalized_trace(EMPTY)) == "stop"

    def test_custom_ranges(self, sum_spec):
        policy = SamplingPolicy(integer_range=(5, 5), natural_range=(2, 2), seed=0)
        gt = sample_generalized_trace(sum_spec, policy=policy)
        assert extract_inputs(gt) == [2, 5, 5]

    def test_explicit_domain_ignores_ranges(self):
        spec = Spec((ReadInput("x", ExplicitSet(frozenset({77, 78}))),))
        policy = SamplingPolicy(integer_range=(0, 1), seed=3)
        values = {
            extract_inputs(
                sample_generalized_trace(spec, policy=SamplingPolicy(
                    integer_range=(0, 1), seed=s))
            )[0]
            for s in range(50)
        }
        assert values == {77, 78}

    def test_generation_failure_on_narrow_exit(self):
        with pytest.raises(GenerationFailureError):
            sample_generalized_trace(
                STUCK_SPEC,
                policy=SamplingPolicy(seed=1),
                limits=GenerationLimits(max_loop_iterations=1000),
            )

    def test_reproduced_by_interpret(self, sum_spec):
        for seed in range(50):
            gt = sample_generalized_trace(sum_spec, policy=SamplingPolicy(seed=seed))
            assert interpret(sum_spec, extract_inputs(gt)) == gt


class TestConfigTypes:
    def test_limits_must_be_positive(self):
        with pytest.raises(ValueError):
            GenerationLimits(max_loop_iterations=0)
        with pytest.raises(ValueError):
            GenerationLimits(max_trace_length=0)

    def test_policy_ranges_validated(self):
        with pytest.raises(ValueError):
            SamplingPolicy(integer_range=(5, 4))
        with pytest.raises(ValueError):
            SamplingPolicy(natural_range=(-1, 5))


class TestEquivalence:
    """accept agrees with interpret-then-cover on random spec/trace pairs."""

    def test_equivalence_on_random_pairs(self):
        rng = random.Random(20240817)
        checked = 0
        attempts = 0
        while checked < 300 and attempts < 5000:
            attempts += 1
            spec = random_spec(rng, depth=3)
            base_gt = sample_generalized_trace(
                spec, policy=SamplingPolicy(seed=rng.getrandbits(32))
            )
            trace = concretization_as_trace(rng, base_gt)
            if rng.random() < 0.8:
                trace = mutate_trace(rng, trace, rounds=rng.randint(1, 2))
            try:
                gt = interpret(spec, trace.inputs())
            except (InputRejectedError, InputsExhaustedError, SurplusInputsError,
                    UnboundCurrentError):
                continue
            accepted = accept(spec, trace)
            covered = covers(gt, normalize(trace)) == Covered()
            assert accepted == covered, (
                f"disagreement on {spec} with {render_trace(trace)}"
            )
            checked += 1
        assert checked == 300

    def test_equivalence_exhaustive_small_traces(self):
        # every trace over a small alphabet, against a spec that fuses
        # optional outputs across loop rounds and the loop exit
        import itertools

        spec = parse_spec(
            "loop {\n"
            "  if len(x_A) == 2 then { write { eps, 9 } exit write { 5 } }\n"
            "  else { write { eps, len(x_A) } read x : {0, 1} }\n"
            "}\n"
            "write { sum(x_A) }\n"
        )
        alphabet = [In(0), In(1), Out(0), Out(1), Out(2), Out(9)]
        agreed = 0
        for length in range(0, 6):
            for steps in itertools.product(alphabet, repeat=length):
                trace = Trace(steps)
                try:
                    gt = interpret(spec, trace.inputs())
                except (InputRejectedError, InputsExhaustedError,
                        SurplusInputsError):
                    continue
                accepted = accept(spec, trace)
                covered = covers(gt, normalize(trace)) == Covered()
                assert accepted == covered, render_trace(trace)
                agreed += 1
        assert agreed > 1000

    def test_unmutated_samples_always_accepted(self):
        rng = random.Random(7)
        for _ in range(100):
            spec = random_spec(rng, depth=3)
            gt = sample_generalized_trace(
                spec, policy=SamplingPolicy(seed=rng.getrandbits(32))
            )
            trace = concretization_as_trace(rng, gt)
            assert accept(spec, trace) is True
