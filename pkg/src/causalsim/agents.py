"""Decision policies over causal models: expected-utility maximization,
stateless Q-learning, and a uniform-random baseline.

The causal policy scores each candidate intervention by the expected
utility of the target variable under that intervention, computed on the
posterior-mean model of its current beliefs, and picks the argmax. The
Q-learning policy ignores the model entirely and keeps one running
value estimate per action. The random policy is the control.

All argmax operations break ties toward the lowest action index, which
keeps every policy deterministic given its inputs and its random
stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .beliefs import BeliefState, posterior_mean, update
from .cgm import Assignment, CausalModel, Intervention, interventional_marginal

__all__ = [
    "Action",
    "UtilityFunction",
    "CausalAgentState",
    "QAgentState",
    "AgentRecord",
    "expected_utility",
    "best_action",
    "causal_choose",
    "causal_learn",
    "q_choose",
    "q_learn",
    "random_choose",
]

# Maps each target-variable state label to a finite real utility.
UtilityFunction = Mapping[str, float]


@dataclass(frozen=True)
class Action:
    """A labeled intervention the decision maker can take."""

    label: str
    intervention: Mapping[str, str]

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("an action needs a non-empty label")
        if not self.intervention:
            raise ValueError("empty-intervention: an action must force at least one variable")


def _check_action_set(actions: Sequence[Action], target: str) -> None:
    if not actions:
        raise ValueError("empty-action-set: at least one action is required")
    labels = [a.label for a in actions]
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate action labels in the action set")
    for a in actions:
        if target in a.intervention:
            raise ValueError(f"action-intervenes-target: {a.label!r} forces {target}")


def _check_utility(utility: UtilityFunction, states: Sequence[str], target: str) -> None:
    for s in states:
        u = utility.get(s)
        if u is None:
            raise ValueError(f"utility does not cover state {s!r} of {target}")
        if not math.isfinite(u):
            raise ValueError(f"utility of {target}={s!r} must be finite")


@dataclass(frozen=True)
class CausalAgentState:
    """Everything the causal policy carries between rounds."""

    beliefs: BeliefState
    actions: tuple[Action, ...]
    target: str
    utility: Mapping[str, float]

    def __post_init__(self) -> None:
        spec = self.beliefs.graph.variable_map.get(self.target)
        if spec is None:
            raise ValueError(f"unknown-variable: target {self.target!r} is not in the graph")
        _check_action_set(self.actions, self.target)
        _check_utility(self.utility, spec.states, self.target)


@dataclass(frozen=True)
class QAgentState:
    """Per-action value estimates for the stateless Q-learner.

    ``q`` is keyed by action label; its insertion order is the action
    order, so index-based operations are well defined.
    """

    q: Mapping[str, float]
    alpha: float = 0.1
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if not self.q:
            raise ValueError("empty-action-set: at least one action is required")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"learning rate must lie in (0, 1], got {self.alpha!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"exploration rate must lie in [0, 1], got {self.epsilon!r}")


@dataclass(frozen=True)
class AgentRecord:
    """One round of one agent's history: what it did and what it got."""

    round: int
    action: str
    reward: float


def expected_utility(
    model: CausalModel, action: Action, target: str, utility: UtilityFunction
) -> float:
    """Expected utility of the target under the action's intervention.

    Sums utility(state) times P(target = state | do(intervention)) over
    the target's states on the given model.
    """
    if target in action.intervention:
        raise ValueError(f"target-is-intervened: {action.label!r} forces {target}")
    spec = model.graph.variable_map.get(target)
    if spec is None:
        raise ValueError(f"unknown-variable: target {target!r} is not in the model")
    _check_utility(utility, spec.states, target)
    dist = interventional_marginal(model, action.intervention, target)
    return sum(utility[s] * p for s, p in zip(spec.states, dist))


def best_action(
    model: CausalModel,
    actions: Sequence[Action],
    target: str,
    utility: UtilityFunction,
) -> int:
    """Index of the expected-utility argmax; ties go to the lowest index."""
    if not actions:
        raise ValueError("empty-action-set: at least one action is required")
    best_i = 0
    best_eu = expected_utility(model, actions[0], target, utility)
    for i in range(1, len(actions)):
        eu = expected_utility(model, actions[i], target, utility)
        if eu > best_eu:
            best_i = i
            best_eu = eu
    return best_i


def causal_choose(state: CausalAgentState) -> int:
    """Greedy choice on the posterior-mean model of the current beliefs.

    Pure: no randomness, no state change, same answer on repeat calls.
    """
    model = posterior_mean(state.beliefs)
    return best_action(model, state.actions, state.target, state.utility)


def causal_learn(
    state: CausalAgentState, action: Action, observed: Assignment
) -> CausalAgentState:
    """Fold the observed outcome of one taken action into the beliefs."""
    if action not in state.actions:
        raise ValueError(f"unknown-action: {action.label!r} is not in the agent's action set")
    return replace(state, beliefs=update(state.beliefs, action.intervention, observed))


def q_choose(state: QAgentState, rng: np.random.Generator) -> int:
    """Epsilon-greedy: explore uniformly with probability epsilon, else
    take the value argmax with lowest-index tie-breaking."""
    n = len(state.q)
    if state.epsilon > 0.0 and rng.random() < state.epsilon:
        return int(rng.integers(n))
    best_i = 0
    best_q = -math.inf
    for i, value in enumerate(state.q.values()):
        if value > best_q:
            best_i = i
            best_q = value
    return best_i


def q_learn(state: QAgentState, index: int, reward: float) -> QAgentState:
    """Move the chosen action's estimate toward the received reward.

    Only the chosen entry changes: q + alpha * (reward - q).
    """
    labels = list(state.q)
    if not 0 <= index < len(labels):
        raise IndexError(f"bad-index: {index} is not an action index (0..{len(labels) - 1})")
    label = labels[index]
    new_q = dict(state.q)
    old = new_q[label]
    new_q[label] = old + state.alpha * (reward - old)
    return replace(state, q=new_q)


def random_choose(actions: Sequence[Action], rng: np.random.Generator) -> int:
    """Uniform choice over action indices from the supplied stream."""
    if not actions:
        raise ValueError("empty-action-set: at least one action is required")
    return int(rng.integers(len(actions)))
