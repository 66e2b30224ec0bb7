import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from upmsp.instance import GeneratorSpec, Instance, adjusted_times, generate
from upmsp.schedule import (
    Schedule,
    decode,
    encode,
    evaluate,
    format_schedule,
    makespan,
    parse_schedule,
    reflect,
    validate,
)


def pairwise_completion(schedule: Schedule, instance: Instance) -> list[int]:
    """Smallest completion times satisfying the pairwise big-V constraints.

    Builds the binary precedence variables x[i][j][k] from the schedule and
    relaxes ``C_j >= C_i + sum_k x_ijk (S_ijk + P_jk) + V (sum_k x_ijk - 1)``
    to a fixed point, starting from all zeros.
    """
    m, n = instance.machines, instance.jobs
    x = np.zeros((n + 1, n + 1, m), dtype=int)
    for k, seq in enumerate(schedule.sequences):
        prev = 0
        for j in seq:
            x[prev, j, k] = 1
            prev = j
    V = 10**9
    C = [0] * (n + 1)
    for _ in range(n + 1):
        for i in range(n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                used = int(x[i, j].sum())
                rhs = C[i] + sum(x[i, j, k] * (instance.s(k + 1, i, j) + instance.p(j, k + 1))
                                 for k in range(m)) + V * (used - 1)
                C[j] = max(C[j], rhs)
    return C[1:]


def test_decode_example():
    s = decode([1.7, 0.3, 0.9], 2)
    assert s.assignment == (2, 1, 1)
    assert s.sequences == ((2, 3), (1,))


def test_decode_all_zero_keys_index_order():
    s = decode([0.0] * 5, 3)
    assert s.sequences == ((1, 2, 3, 4, 5), (), ())


def test_decode_ties_within_machine_by_job_index():
    s = decode([1.5, 0.5, 1.5, 1.2], 2)
    assert s.sequences == ((2,), (4, 1, 3))


def test_decode_clamps_key_equal_to_m():
    s = decode([2.0, 0.1], 2)
    assert s.assignment == (2, 1)


def test_decode_checks_length(t1):
    with pytest.raises(ValueError):
        decode([0.1, 0.2], t1)


@settings(max_examples=200, deadline=None)
@given(m=st.integers(1, 5), data=st.data())
def test_decode_total(m, data):
    n = data.draw(st.integers(1, 12))
    keys = data.draw(st.lists(st.floats(0, m, exclude_max=True), min_size=n, max_size=n))
    inst = generate(GeneratorSpec(0, m, n, 1, 9, 1, 9))
    s = decode(keys, inst)
    assert validate(s, inst) == []
    assert sorted(j for seq in s.sequences for j in seq) == list(range(1, n + 1))


@settings(max_examples=100, deadline=None)
@given(m=st.integers(1, 4), data=st.data())
def test_encode_round_trip(m, data):
    n = data.draw(st.integers(1, 10))
    keys = data.draw(st.lists(st.floats(0, m, exclude_max=True), min_size=n, max_size=n))
    s = decode(keys, m)
    enc = encode(s)
    assert decode(enc, m) == s
    assert ((enc >= 0) & (enc < m)).all()


def test_reflect_stays_in_range():
    x = np.array([-0.25, 0.0, 1.5, 2.0, 2.25, 4.0, 5.5, -3.75, 1e6 + 0.3])
    y = reflect(x, 2.0)
    assert ((y >= 0) & (y < 2.0)).all()
    assert y[0] == pytest.approx(0.25)
    assert y[2] == pytest.approx(1.5)
    assert y[4] == pytest.approx(1.75)
    assert y[5] == pytest.approx(0.0)


def test_validate_t1_schedule(t1):
    assert validate(Schedule.from_sequences([(1,), (2, 3)]), t1) == []


def test_validate_job_on_two_machines(t1):
    s = Schedule((1, 2, 2), ((1, 2), (2, 3)))
    problems = validate(s, t1)
    assert any("job multiplicity" in p for p in problems)


def test_validate_repeat_within_sequence(t1):
    s = Schedule((1, 2, 2), ((1, 1), (2, 3)))
    problems = validate(s, t1)
    assert any("repeat within sequence" in p for p in problems)


def test_validate_missing_job_and_bad_machine_count(t1):
    problems = validate(Schedule((1, 1, 1), ((1, 2),)), t1)
    assert any("unscheduled" in p for p in problems)
    assert any("machine count" in p for p in problems)


def test_validate_unknown_job(t1):
    problems = validate(Schedule((1, 2, 2), ((1, 4), (2, 3))), t1)
    assert any("unknown job" in p for p in problems)


def test_evaluate_t1(t1_ap):
    rep = evaluate(Schedule.from_sequences([(1,), (2, 3)]), t1_ap)
    assert rep.per_machine_finish == (5, 10)
    assert rep.makespan == 10
    assert rep.completion == (5, 5, 10)


def test_evaluate_single_machine_chain():
    inst = generate(GeneratorSpec(5, 1, 6))
    ap = adjusted_times(inst)
    s = Schedule.from_sequences([tuple(range(1, 7))])
    expected = ap(1, 0, 1) + sum(ap(1, j - 1, j) for j in range(2, 7))
    assert evaluate(s, ap).makespan == expected


def test_evaluate_setup_free_singletons():
    inst = generate(GeneratorSpec(9, 3, 3, 1, 50, 0, 0))
    s = Schedule.from_sequences([(2,), (3,), (1,)])
    expected = max(inst.p(2, 1), inst.p(3, 2), inst.p(1, 3))
    assert evaluate(s, adjusted_times(inst)).makespan == expected


def test_empty_machine_finishes_at_zero(t1_ap):
    rep = evaluate(Schedule.from_sequences([(1, 2, 3), ()]), t1_ap)
    assert rep.per_machine_finish[1] == 0


@pytest.mark.parametrize("seed", range(30))
def test_chain_sum_matches_pairwise_recursion(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(1, 4)), int(rng.integers(1, 7))
    inst = generate(GeneratorSpec(seed, m, n, 1, 20, 0, 20))
    s = decode(rng.random(n) * m, inst)
    rep = evaluate(s, adjusted_times(inst))
    C = pairwise_completion(s, inst)
    assert list(rep.completion) == C
    assert rep.makespan == max(C)
    assert makespan(s, adjusted_times(inst)) == rep.makespan


@pytest.mark.parametrize("seed", range(20))
def test_monotone_under_time_inflation(seed):
    rng = np.random.default_rng(seed)
    inst = generate(GeneratorSpec(seed, 2, 5, 1, 20, 1, 20))
    s = decode(rng.random(5) * 2, inst)
    base = makespan(s, adjusted_times(inst))
    k = int(rng.integers(2))
    seq = s.sequences[k]
    if not seq:
        seq = s.sequences[1 - k]
        k = 1 - k
    pos = int(rng.integers(len(seq)))
    prev = 0 if pos == 0 else seq[pos - 1]
    setup = inst.setup.copy()
    setup[k, prev, seq[pos] - 1] += int(rng.integers(1, 10))
    bumped = Instance(2, 5, inst.processing, setup)
    assert makespan(s, adjusted_times(bumped)) >= base


def test_schedule_text_round_trip():
    s = Schedule.from_sequences([(3, 1), (), (2,)])
    text = format_schedule(s)
    assert text == "1: 3 1\n2:\n3: 2"
    assert parse_schedule(text) == s
