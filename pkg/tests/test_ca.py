import numpy as np
import pytest
from reference import RULE_110_TABLE, reference_ca

from allagmatic import milieu_of
from allagmatic.ca import (
    INITIAL_STATE,
    TARGET_STATE,
    CAConfig,
    RuleTable,
    build_ca,
    ca_system,
    ca_transition,
    format_rule_table,
    format_state,
    parse_rule_table,
    parse_state_string,
    rule_from_number,
    rule_to_number,
)
from allagmatic.errors import (
    EmptyState,
    IncompleteParameters,
    InvalidCharacter,
    LengthMismatch,
    NonBinaryState,
    OutOfRange,
)


@pytest.mark.parametrize("pattern,expected", sorted(RULE_110_TABLE.items()))
def test_rule_110_truth_table(pattern, expected):
    assert ca_transition(*pattern, rule_from_number(110)) == expected


def test_rule_110_table_number():
    outputs = tuple(RULE_110_TABLE[((b >> 2) & 1, (b >> 1) & 1, b & 1)] for b in range(8))
    assert rule_to_number(RuleTable(outputs)) == 110
    assert rule_from_number(110) == RuleTable(outputs)


def test_extreme_rules():
    assert rule_from_number(0).outputs == (0,) * 8
    assert rule_from_number(255).outputs == (1,) * 8
    assert rule_to_number(RuleTable((0,) * 8)) == 0


def test_rule_number_round_trip():
    for k in range(256):
        assert rule_to_number(rule_from_number(k)) == k


@pytest.mark.parametrize("n", [-1, 256, 1000])
def test_rule_out_of_range(n):
    with pytest.raises(OutOfRange):
        rule_from_number(n)


def test_rule_table_validation():
    with pytest.raises(IncompleteParameters):
        RuleTable((0, 1, 1))
    with pytest.raises(IncompleteParameters):
        RuleTable((0, 1, 1, 1, 0, 1, 1, 2))


def test_rule_table_text():
    text = format_rule_table(rule_from_number(110))
    assert text.splitlines()[0] == "111 -> 0"
    assert text.splitlines()[-1] == "000 -> 0"
    assert parse_rule_table(text) == rule_from_number(110)
    assert parse_rule_table("30") == rule_from_number(30)
    with pytest.raises(IncompleteParameters):
        parse_rule_table("111 -> 0\n110 -> 1\n")
    with pytest.raises(InvalidCharacter):
        parse_rule_table("1x1 -> 0")


def test_parse_state_string():
    e = parse_state_string(INITIAL_STATE)
    assert e.tolist() == [0] * 15 + [1] + [0] * 15
    assert format_state(e) == INITIAL_STATE
    with pytest.raises(EmptyState):
        parse_state_string("")
    with pytest.raises(InvalidCharacter):
        parse_state_string("0102")


def test_format_parse_random_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(100):
        s = "".join(rng.choice(["0", "1"], 31))
        assert format_state(parse_state_string(s)) == s


def test_config():
    with pytest.raises(OutOfRange):
        CAConfig(2)
    with pytest.raises(ValueError):
        CAConfig(31, "fixed")


def test_system_shape():
    s = ca_system(CAConfig(31))
    assert s.size == 31 and s.arity == 3
    assert (s.milieu.degrees == 3).all()
    assert (s.milieu.weight == 1.0).all()
    assert (s.milieu.to_dense().astype(bool).sum(axis=1) == 3).all()


def test_milieu_order():
    ms = build_ca(CAConfig(), 110, INITIAL_STATE)
    assert milieu_of(ms, 0).index.tolist() == [30, 0, 1]
    assert milieu_of(ms, 15).index.tolist() == [14, 15, 16]
    assert milieu_of(ms, 30).index.tolist() == [29, 30, 0]
    assert milieu_of(ms, 15).state.tolist() == [0, 1, 0]


def test_first_step_from_single_cell():
    ms = build_ca(CAConfig(), 110, INITIAL_STATE).step()
    assert np.flatnonzero(ms.states).tolist() == [14, 15]


def test_rule_110_reaches_target():
    trace = build_ca(CAConfig(), 110, INITIAL_STATE).run(15)
    assert format_state(trace.final) == TARGET_STATE
    assert format_state(trace.initial) == INITIAL_STATE
    expected = reference_ca(110, parse_state_string(INITIAL_STATE).tolist(), 15)
    assert trace.snapshots.tolist() == expected


def test_shifted_start_gives_shifted_target():
    start = np.roll(parse_state_string(INITIAL_STATE), 5)
    final = build_ca(CAConfig(), 110, start).run(15).final
    assert format_state(final) == format_state(np.roll(parse_state_string(TARGET_STATE), 5))


def test_ring_of_ones():
    ms = build_ca(CAConfig(3), 110, "111").step()
    assert format_state(ms.states) == "000"


def test_zero_state_under_rule_0():
    ms = build_ca(CAConfig(), 0, "0" * 31)
    assert format_state(ms.run(3).final) == "0" * 31


def test_build_errors():
    with pytest.raises(LengthMismatch):
        build_ca(CAConfig(), 110, "0" * 30)
    with pytest.raises(NonBinaryState):
        build_ca(CAConfig(3), 110, [0, 2, 1])


def test_rule_as_table_or_number():
    a = build_ca(CAConfig(), 30, INITIAL_STATE).run(10)
    b = build_ca(CAConfig(), rule_from_number(30), INITIAL_STATE).run(10)
    np.testing.assert_array_equal(a.snapshots, b.snapshots)
