import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from reference import reference_ca

from allagmatic import step
from allagmatic.ann import LayeredTopology, LearningParams, ann_system, build_ann, forward, train_candidate
from allagmatic.ca import CAConfig, build_ca, format_state, parse_state_string
from allagmatic.experiments import MatchCriterion, matching_positions

CASES = settings(max_examples=120, deadline=None)

rules = st.integers(0, 255)
seeds = st.integers(0, 2**32 - 1)


@st.composite
def ring_states(draw, min_width=3, max_width=40):
    width = draw(st.integers(min_width, max_width))
    return np.array(draw(st.lists(st.integers(0, 1), min_size=width, max_size=width)), dtype=np.uint8)


bits31 = st.lists(st.integers(0, 1), min_size=31, max_size=31).map(lambda b: np.array(b, dtype=np.uint8))


@CASES
@given(rules, ring_states(), st.randoms(use_true_random=False))
def test_update_order_does_not_matter(rule, state, rnd):
    cfg = CAConfig(state.size)
    order = list(range(state.size))
    rnd.shuffle(order)
    forward_ = build_ca(cfg, rule, state).step(vectorized=False)
    backward = build_ca(cfg, rule, state).step(order=list(reversed(range(state.size))))
    shuffled = build_ca(cfg, rule, state).step(order=order)
    batched = build_ca(cfg, rule, state).step()
    for other in (backward, shuffled, batched):
        np.testing.assert_array_equal(forward_.states, other.states)


@CASES
@given(rules, ring_states(), st.integers(0, 40), st.integers(0, 20))
def test_translation_equivariance(rule, state, k, steps):
    cfg = CAConfig(state.size)
    shifted = build_ca(cfg, rule, np.roll(state, k)).run(steps).final
    plain = build_ca(cfg, rule, state).run(steps).final
    np.testing.assert_array_equal(shifted, np.roll(plain, k))


@CASES
@given(ring_states())
def test_rule_0_collapses(state):
    assert not build_ca(CAConfig(state.size), 0, state).step().states.any()


@CASES
@given(st.integers(3, 64), st.integers(0, 30))
def test_rule_110_zero_fixpoint(width, steps):
    trace = build_ca(CAConfig(width), 110, np.zeros(width, dtype=np.uint8)).run(steps)
    assert not trace.snapshots.any()


@CASES
@given(rules, bits31, st.integers(0, 15))
def test_matches_reference_ca(rule, state, steps):
    trace = build_ca(CAConfig(), rule, state).run(steps)
    assert trace.snapshots.tolist() == reference_ca(rule, state.tolist(), steps)


@CASES
@given(rules, bits31)
def test_shape_and_determinism(rule, state):
    a = build_ca(CAConfig(), rule, state)
    b = build_ca(CAConfig(), rule, state)
    milieu = a.milieu.copy()
    ta, tb = a.run(9), b.run(9)
    assert ta.snapshots.tobytes() == tb.snapshots.tobytes()
    assert a.milieu == milieu and a.time == 9 and a.states.size == 31


@CASES
@given(st.text(alphabet="01", min_size=1, max_size=64))
def test_state_string_round_trip(s):
    assert format_state(parse_state_string(s)) == s


@CASES
@given(seeds, bits31)
def test_forward_is_pure(seed, x):
    ms = build_ann(rng=seed)
    weights = ms.milieu.weight.copy()
    first = forward(ms, x)
    np.testing.assert_array_equal(forward(ms, x), first)
    np.testing.assert_array_equal(ms.milieu.weight, weights)


@CASES
@given(seeds, bits31, bits31, st.floats(0.01, 1.0), st.integers(0, 12))
def test_training_only_touches_output_weights(seed, x, y, rate, epochs):
    t = LayeredTopology()
    ms = build_ann(t, rng=seed)
    before = ms.milieu.weight.copy()
    train_candidate(ms, x, y, LearningParams(rate, epochs))
    hidden = slice(0, t.layers * t.width)
    assert ms.milieu.weight[hidden].tobytes() == before[hidden].tobytes()


@CASES
@given(st.integers(3, 40), st.integers(1, 20))
def test_topology_degrees(width, layers):
    t = LayeredTopology(width, layers)
    m = ann_system(t).milieu
    assert (m.degrees[:width] == 0).all() and (m.degrees[width:] == 3).all()
    depth_of = m.index // width
    rows = np.arange(t.size) // width
    assert (depth_of[width:] == rows[width:, None] - 1).all()


@CASES
@given(st.integers(3, 12), st.integers(1, 5), seeds, st.data())
def test_network_local_and_vectorized_steps_agree(width, layers, seed, data):
    t = LayeredTopology(width, layers)
    ms = build_ann(t, rng=seed)
    ms.states[:] = data.draw(st.lists(st.integers(0, 1), min_size=t.size, max_size=t.size))
    twin = ms.copy()
    for _ in range(layers):
        step(ms)
        step(twin, vectorized=False)
        np.testing.assert_array_equal(ms.states, twin.states)


@CASES
@given(bits31, bits31, st.floats(0.0, 1.0))
def test_criterion_arithmetic(a, b, threshold):
    crit = MatchCriterion(threshold, 31)
    hits = matching_positions(a, b)
    assert crit.passes(a, b) == (hits >= crit.min_matches)
    assert crit.min_matches - 1 < threshold * 31 + 1e-9
    assert crit.min_matches >= threshold * 31 - 1e-9
