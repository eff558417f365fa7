"""Decision policies: expected utility, greedy choice, Q-learning, random."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalsim import (
    Action,
    CausalAgentState,
    QAgentState,
    best_action,
    causal_choose,
    causal_learn,
    expected_utility,
    init_uniform,
    posterior_mean,
    q_choose,
    q_learn,
    random_choose,
    update,
)

import oracle

WIN = {"0": 0.0, "1": 1.0}
NO_TREATMENT = Action("no-treatment", {"T": "0"})
TREATMENT = Action("treatment", {"T": "1"})


def causal_state(graph, actions=(NO_TREATMENT, TREATMENT), target="Y", utility=WIN):
    return CausalAgentState(init_uniform(graph), tuple(actions), target, utility)


def test_action_requires_label_and_intervention():
    with pytest.raises(ValueError, match="non-empty label"):
        Action("", {"T": "1"})
    with pytest.raises(ValueError, match="empty-intervention"):
        Action("idle", {})


def test_expected_utility_on_the_truth(medic_model):
    assert expected_utility(medic_model, TREATMENT, "Y", WIN) == pytest.approx(0.87, abs=1e-12)
    assert expected_utility(medic_model, NO_TREATMENT, "Y", WIN) == pytest.approx(0.52, abs=1e-12)


def test_expected_utility_of_constant_utility_is_that_constant(medic_model):
    flat = {"0": 2.5, "1": 2.5}
    assert expected_utility(medic_model, TREATMENT, "Y", flat) == pytest.approx(2.5, abs=1e-12)


def test_expected_utility_input_checks(medic_model):
    with pytest.raises(ValueError, match="target-is-intervened"):
        expected_utility(medic_model, Action("push", {"Y": "1"}), "Y", WIN)
    with pytest.raises(ValueError, match="unknown-variable"):
        expected_utility(medic_model, TREATMENT, "Q", WIN)
    with pytest.raises(ValueError, match="does not cover"):
        expected_utility(medic_model, TREATMENT, "Y", {"1": 1.0})
    with pytest.raises(ValueError, match="must be finite"):
        expected_utility(medic_model, TREATMENT, "Y", {"0": 0.0, "1": float("inf")})


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(0.1, 10.0), shift=st.floats(-5.0, 5.0))
def test_affine_utility_change_never_flips_the_ranking(medic_env, scale, shift):
    model = medic_env.truth
    base = [expected_utility(model, a, "Y", WIN) for a in medic_env.actions]
    moved = {s: scale * u + shift for s, u in WIN.items()}
    transformed = [expected_utility(model, a, "Y", moved) for a in medic_env.actions]
    for eu, t in zip(base, transformed):
        assert t == pytest.approx(scale * eu + shift, abs=1e-9)


def test_best_action_on_the_truth_is_treatment(medic_model):
    assert best_action(medic_model, (NO_TREATMENT, TREATMENT), "Y", WIN) == 1


def test_best_action_breaks_ties_low(medic_model):
    flat = {"0": 1.0, "1": 1.0}
    assert best_action(medic_model, (NO_TREATMENT, TREATMENT), "Y", flat) == 0
    with pytest.raises(ValueError, match="empty-action-set"):
        best_action(medic_model, (), "Y", WIN)


def test_best_action_matches_oracle_on_random_problems():
    rnd = random.Random(202)
    for _ in range(25):
        model, target, interventions = oracle.random_decision_problem(rnd)
        states = model.graph.variable_map[target].states
        actions = tuple(Action(f"a{i}", iv) for i, iv in enumerate(interventions))
        utility = {states[0]: 0.0, states[1]: 1.0}
        scores = [oracle.do_probability(model, iv, {target: states[1]}) for iv in interventions]
        want = max(range(len(scores)), key=lambda i: (scores[i], -i))
        got = best_action(model, actions, target, utility)
        assert scores[got] == pytest.approx(scores[want], abs=1e-9)


def test_causal_choose_under_uniform_prior_takes_index_zero(medic_model):
    # Both arms look identical a priori; the tie goes low.
    assert causal_choose(causal_state(medic_model.graph)) == 0


def test_causal_choose_with_the_truth_takes_treatment(medic_model):
    state = causal_state(medic_model.graph)
    # Pour many decisive observations in so the posterior mean tracks truth.
    b = state.beliefs
    for _ in range(200):
        b = update(b, {"T": "1"}, {"D": "0", "T": "1", "Y": "1"})
        b = update(b, {"T": "0"}, {"D": "0", "T": "0", "Y": "0"})
    taught = CausalAgentState(b, state.actions, state.target, state.utility)
    assert causal_choose(taught) == 1


def test_causal_choose_is_pure(medic_model):
    state = causal_state(medic_model.graph)
    first = causal_choose(state)
    assert all(causal_choose(state) == first for _ in range(5))


def test_causal_learn_returns_new_state_and_checks_action(medic_model):
    state = causal_state(medic_model.graph)
    out = causal_learn(state, TREATMENT, {"D": "1", "T": "1", "Y": "1"})
    assert out is not state
    assert out.beliefs.counts["D"][()] == (1.0, 2.0)
    assert state.beliefs.counts["D"][()] == (1.0, 1.0)
    with pytest.raises(ValueError, match="unknown-action"):
        causal_learn(state, Action("other", {"D": "1"}), {"D": "1", "T": "1", "Y": "1"})


def test_causal_state_validation(medic_model):
    with pytest.raises(ValueError, match="unknown-variable"):
        causal_state(medic_model.graph, target="Q")
    with pytest.raises(ValueError, match="action-intervenes-target"):
        causal_state(medic_model.graph, actions=(Action("push", {"Y": "1"}),))
    with pytest.raises(ValueError, match="duplicate action labels"):
        causal_state(medic_model.graph, actions=(TREATMENT, TREATMENT))
    with pytest.raises(ValueError, match="empty-action-set"):
        causal_state(medic_model.graph, actions=())
    with pytest.raises(ValueError, match="does not cover"):
        causal_state(medic_model.graph, utility={"1": 1.0})


def test_q_state_validation():
    with pytest.raises(ValueError, match="empty-action-set"):
        QAgentState({})
    with pytest.raises(ValueError, match="learning rate"):
        QAgentState({"a": 0.0}, alpha=0.0)
    with pytest.raises(ValueError, match="exploration rate"):
        QAgentState({"a": 0.0}, epsilon=1.5)


def test_q_choose_greedy_when_epsilon_zero():
    state = QAgentState({"a": 0.2, "b": 0.9, "c": 0.4}, epsilon=0.0)
    rng = np.random.default_rng(0)
    assert all(q_choose(state, rng) == 1 for _ in range(20))
    # and the stream is untouched in pure-greedy mode
    assert np.random.default_rng(0).random() == rng.random()


def test_q_choose_tie_goes_to_lowest_index():
    state = QAgentState({"a": 0.5, "b": 0.5}, epsilon=0.0)
    assert q_choose(state, np.random.default_rng(1)) == 0


def test_q_choose_explores_uniformly_when_epsilon_one():
    state = QAgentState({"a": 5.0, "b": 0.0, "c": 0.0}, epsilon=1.0)
    rng = np.random.default_rng(11)
    draws = [q_choose(state, rng) for _ in range(10_000)]
    for i in range(3):
        assert draws.count(i) / 10_000 == pytest.approx(1 / 3, abs=0.02)


def test_q_learn_single_step():
    state = QAgentState({"a": 0.0, "b": 0.0}, alpha=0.1)
    out = q_learn(state, 0, 1.0)
    assert out.q == {"a": 0.1, "b": 0.0}
    assert state.q == {"a": 0.0, "b": 0.0}


def test_q_learn_fixed_point():
    state = QAgentState({"a": 0.7}, alpha=0.3)
    assert q_learn(state, 0, 0.7).q["a"] == pytest.approx(0.7)


def test_q_learn_converges_to_constant_reward():
    state = QAgentState({"a": 0.0}, alpha=0.2)
    for _ in range(200):
        state = q_learn(state, 0, 1.0)
    assert state.q["a"] == pytest.approx(1.0, abs=1e-9)


def test_q_learn_rejects_bad_index():
    state = QAgentState({"a": 0.0})
    with pytest.raises(IndexError, match="bad-index"):
        q_learn(state, 2, 1.0)
    with pytest.raises(IndexError, match="bad-index"):
        q_learn(state, -1, 1.0)


@settings(max_examples=30, deadline=None)
@given(
    rewards=st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=40),
    alpha=st.floats(0.05, 1.0),
)
def test_q_estimate_stays_inside_reward_hull(rewards, alpha):
    state = QAgentState({"a": rewards[0]}, alpha=alpha)
    for r in rewards:
        state = q_learn(state, 0, r)
    assert min(rewards) - 1e-9 <= state.q["a"] <= max(rewards) + 1e-9


def test_random_choose_is_uniform_and_seeded():
    actions = (NO_TREATMENT, TREATMENT)
    rng = np.random.default_rng(21)
    draws = [random_choose(actions, rng) for _ in range(10_000)]
    assert draws.count(1) / 10_000 == pytest.approx(0.5, abs=0.02)
    again = np.random.default_rng(21)
    assert [random_choose(actions, again) for _ in range(100)] == draws[:100]
    with pytest.raises(ValueError, match="empty-action-set"):
        random_choose((), rng)


def test_posterior_mean_feeds_choice_like_a_real_model(medic_model):
    # A belief state whose posterior mean is exactly the truth chooses
    # exactly like the truth does.
    b = init_uniform(medic_model.graph)
    state = CausalAgentState(b, (NO_TREATMENT, TREATMENT), "Y", WIN)
    truth_choice = best_action(medic_model, state.actions, "Y", WIN)
    mean_choice = best_action(posterior_mean(b), state.actions, "Y", WIN)
    assert truth_choice == 1 and mean_choice == 0  # prior hides the gap
