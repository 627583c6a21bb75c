from __future__ import annotations

from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from belief import (
    Channel,
    Distribution,
    Infer,
    ProgramBuilder,
    SamplerConfig,
    Space,
    build_progs,
    infer_enumerate,
    infer_reject,
    jeffrey_update,
    pearl_update_repeated,
    simulate_jeffrey_policy,
    simulate_pearl_policy,
    single_pearl_update,
)
from belief.errors import DomainError, ResourceLimit, ZeroAccepted, ZeroValidity
from belief.models import club_model, disease_model
from belief.ppl import (
    enumerate_traces,
    program_by_name,
    stream_words,
    total_variation,
    uniform53,
)

from conftest import distributions, models

COIN = Space.of("h", "t")


def two_coins():
    fair = Distribution.uniform(COIN)
    return (
        ProgramBuilder("two-coins")
        .sample("a", fair)
        .sample("b", fair)
        .condition(lambda a, b: a == "h" or b == "h", "a", "b")
        .let("both", lambda a, b: a == b == "h", "a", "b")
        .returns("both")
    )


def test_enumeration_of_a_small_program():
    post = infer_enumerate(two_coins())
    assert post.as_dict() == {True: Fraction(1, 3), False: Fraction(2, 3)}


def test_traces_carry_weights():
    traces = list(enumerate_traces(two_coins()))
    assert len(traces) == 4
    assert sum(t.weight for t in traces) == 1
    rejected = [t for t in traces if not t.accepted]
    assert [t.steps[-1][1] for t in rejected] == ["t"]
    assert sum(t.weight for t in traces if t.accepted) == Fraction(3, 4)


def test_unbound_names_are_rejected():
    with pytest.raises(DomainError):
        ProgramBuilder("bad").sample("a", Distribution.uniform(COIN)).returns("b")
    with pytest.raises(DomainError):
        ProgramBuilder("bad").condition(lambda z: z, "z").returns(lambda: 1)


def test_impossible_condition():
    prog = ProgramBuilder("never").sample("a", Distribution.uniform(COIN)).observe("a", "x").returns("a")
    with pytest.raises(ZeroValidity):
        infer_enumerate(prog)
    with pytest.raises(ZeroAccepted) as info:
        infer_reject(prog, SamplerConfig(sample_count=1000))
    assert info.value.attempts == 1000


def test_trace_cap():
    b = ProgramBuilder("wide")
    for i in range(12):
        b.sample(f"c{i}", Distribution.uniform(COIN))
    with pytest.raises(ResourceLimit):
        infer_enumerate(b.returns("c0"), trace_cap=1000)


def test_deep_programs_do_not_recurse():
    omega, c = disease_model().prior, disease_model().channel
    b = ProgramBuilder("deep").sample("dis", omega)
    for i in range(3000):
        b.sample(f"t{i}", c, "dis").observe(f"t{i}", "p" if i % 3 else "n")
    post = infer_enumerate(b.returns("dis"))
    assert post["d"] > Fraction(999, 1000)


def test_disease_programs_match_update_rules():
    m = disease_model()
    prog1, prog2, prog3 = build_progs(m)
    assert infer_enumerate(prog1) == pearl_update_repeated(m.prior, m.channel, m.data)
    assert infer_enumerate(prog2)["d"] == Fraction(2, 23)
    assert infer_enumerate(prog3) == jeffrey_update(m.prior, m.channel, m.evidence())


def test_programs_use_the_model_target_when_present():
    m = club_model()
    assert infer_enumerate(program_by_name("prog3", m)) == jeffrey_update(m.prior, m.channel, m.target)
    assert infer_enumerate(program_by_name("prog2", m)) == single_pearl_update(m.prior, m.channel, m.target)
    with pytest.raises(DomainError):
        program_by_name("prog1", m)
    with pytest.raises(DomainError):
        program_by_name("prog9")


def test_nested_inference_equals_inlined_posterior():
    m = disease_model()
    prog3 = build_progs(m).nested
    inner = prog3.statements[1].source.program
    posteriors = {y: infer_enumerate(inner, {"target": y}) for y in m.outcomes}
    inlined = (
        ProgramBuilder("inlined")
        .sample("target", prog3.statements[0].source)
        .sample("dis", lambda target: posteriors[target], "target")
        .returns("dis", space=m.states)
    )
    assert infer_enumerate(inlined) == infer_enumerate(prog3)


def test_nested_inference_requires_parameters():
    m = disease_model()
    inner = build_progs(m).nested.statements[1].source.program
    with pytest.raises(DomainError):
        infer_enumerate(inner)
    with pytest.raises(DomainError):
        ProgramBuilder("outer").sample("x", Infer(inner), "nothing-bound").returns("x")


# -- randomness ----------------------------------------------------------------------


def test_stream_words_are_positional():
    whole = stream_words(5, 2, 0, 40)
    for start in (0, 1, 3, 4, 7, 13):
        assert np.array_equal(stream_words(5, 2, start, 10), whole[start : start + 10])
    assert not np.array_equal(stream_words(5, 3, 0, 8), whole[:8])
    assert not np.array_equal(stream_words(6, 2, 0, 8), whole[:8])


def test_uniform53_range():
    u = uniform53(0, 0, 0, 10_000)
    assert u.min() >= 0 and u.max() < 1 << 53


def test_sampler_config_validation():
    with pytest.raises(DomainError):
        SamplerConfig(seed=-1)
    with pytest.raises(DomainError):
        SamplerConfig(count="forever")
    assert SamplerConfig(count="accepted", sample_count=10).attempt_limit == 1_000_000


# -- rejection sampling -------------------------------------------------------------


def test_rejection_is_close_to_exact():
    prog = two_coins()
    run = infer_reject(prog, SamplerConfig(seed=11, sample_count=40_000))
    assert run.attempted == 40_000
    assert total_variation(run.distribution(), infer_enumerate(prog)) < 0.02
    assert run.acceptance_rate == pytest.approx(0.75, abs=0.01)


def test_accepted_mode_stops_at_the_requested_count():
    run = infer_reject(two_coins(), SamplerConfig(seed=2, sample_count=5_000, count="accepted"))
    assert run.accepted == 5_000
    assert run.attempted > 5_000


def test_same_seed_same_run_any_batching():
    prog = build_progs().single
    base = infer_reject(prog, SamplerConfig(seed=42, sample_count=30_000))
    for chunk, workers in [(7, 1), (1000, 2), (30_000, 3)]:
        cfg = SamplerConfig(seed=42, sample_count=30_000, chunk_size=chunk, workers=workers)
        assert infer_reject(prog, cfg) == base
    assert infer_reject(prog, SamplerConfig(seed=43, sample_count=30_000)) != base


def test_report_json_carries_the_seed():
    run = infer_reject(two_coins(), SamplerConfig(seed=9, sample_count=1000))
    doc = run.to_json()
    assert doc["seed"] == 9
    assert doc["attempted"] == 1000
    assert sum(doc["frequencies"].values()) == doc["accepted"]


@settings(max_examples=15, derandomize=True)
@given(st.data())
def test_rejection_converges_on_random_models(data):
    omega, c = data.draw(models(max_x=3, max_y=2))
    y = data.draw(st.sampled_from(c.codomain.elements))
    prog = (
        ProgramBuilder("posterior")
        .sample("x", omega)
        .sample("y", c, "x")
        .observe("y", y)
        .returns("x", space=omega.space)
    )
    exact = infer_enumerate(prog)
    run = infer_reject(prog, SamplerConfig(seed=data.draw(st.integers(0, 2**64 - 1)), sample_count=20_000, count="accepted"))
    assert total_variation(run.distribution(), exact) < 0.05


# -- door policies --------------------------------------------------------------------


def test_pearl_policy_converges_to_single_pearl():
    m = disease_model()
    tau = m.evidence()
    run = simulate_pearl_policy(m.prior, m.channel, tau, SamplerConfig(seed=1))
    assert abs(run.frequency("d") - 2 / 23) < 0.02


def test_jeffrey_policy_converges_on_disease():
    m = disease_model()
    tau = m.evidence()
    run = simulate_jeffrey_policy(m.prior, m.channel, tau, SamplerConfig(seed=1, count="accepted"))
    assert abs(run.frequency("d") - 13142 / 40293) < 0.02
    assert total_variation(run.outcome_distribution(), tau) < 0.02


def test_jeffrey_policy_cycle_mode_hits_target_exactly():
    m = club_model()
    run = simulate_jeffrey_policy(m.prior, m.channel, m.target, SamplerConfig(seed=4, sample_count=4000, count="accepted"), "cycle")
    assert run.outcome_frequencies == {"rock": 3000, "pop": 1000}


def test_jeffrey_policy_needs_predicted_targets():
    xs, ys = Space.of("a"), Space.of(0, 1)
    c = Channel(xs, ys, {"a": {0: 1}})
    with pytest.raises(ZeroValidity):
        simulate_jeffrey_policy(Distribution.uniform(xs), c, Distribution.uniform(ys), SamplerConfig(sample_count=100))


@settings(max_examples=10, derandomize=True)
@given(st.data())
def test_jeffrey_policy_matches_oracle_on_random_models(data):
    omega, c = data.draw(models(max_x=3, max_y=3))
    tau = data.draw(distributions(c.codomain))
    cfg = SamplerConfig(seed=data.draw(st.integers(0, 1000)), sample_count=20_000, count="accepted")
    run = simulate_jeffrey_policy(omega, c, tau, cfg)
    assert total_variation(run.distribution(), jeffrey_update(omega, c, tau)) < 0.05


def test_jeffrey_policy_independent_of_chunking():
    m = club_model()
    runs = [
        simulate_jeffrey_policy(m.prior, m.channel, m.target, SamplerConfig(seed=8, sample_count=20_000, count="accepted", chunk_size=cs))
        for cs in (1 << 16, 777, 5000)
    ]
    assert runs[0] == runs[1] == runs[2]
