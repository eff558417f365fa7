"""The world the agents act in: a ground-truth causal model, a menu of
interventions, and a utility over one target variable.

Stepping the environment applies the chosen action's surgery to the
truth, draws one full outcome by ancestral sampling, and pays the
utility of the realized target state. The truth model itself is never
modified; surgeries act on cached mutilated copies.

``medic_scenario`` builds the running example used throughout the test
suite and documentation: a binary confounder D (disease severity)
influences both a treatment T and an outcome Y, so the observational
reward of not treating looks better than its interventional reward.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .agents import Action, UtilityFunction, _check_action_set, _check_utility
from .cgm import CausalModel, ensure_valid, intervene, sample
from . import model_io

__all__ = [
    "Environment",
    "StepRecord",
    "step",
    "medic_scenario",
    "load_environment",
    "environment_block_to_dict",
]


@dataclass(frozen=True)
class StepRecord:
    """One environment transition: action label, realized full
    assignment, and the utility paid for the realized target state."""

    action: str
    realized: Mapping[str, str]
    reward: float


@dataclass(frozen=True)
class Environment:
    """An immutable world: truth model, action menu, target, utility."""

    truth: CausalModel
    actions: tuple[Action, ...]
    target: str
    utility: Mapping[str, float]
    _mutilated: dict[str, CausalModel] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _action_by_label: dict[str, Action] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        ensure_valid(self.truth)
        spec = self.truth.graph.variable_map.get(self.target)
        if spec is None:
            raise ValueError(f"unknown-target: {self.target!r} is not in the model")
        _check_action_set(self.actions, self.target)
        _check_utility(self.utility, spec.states, self.target)
        for a in self.actions:
            # Raises on unknown variables or illegal states in the action.
            self._mutilated[a.label] = intervene(self.truth, a.intervention)
            self._action_by_label[a.label] = a


def step(env: Environment, action: Action, rng: np.random.Generator) -> StepRecord:
    """Take one action: surgically force it, sample a world, pay out."""
    known = env._action_by_label.get(action.label)
    if known is None or known != action:
        raise ValueError(f"unknown-action: {action.label!r} is not in this environment")
    realized = sample(env._mutilated[action.label], rng)
    return StepRecord(action.label, realized, env.utility[realized[env.target]])


def medic_scenario() -> Environment:
    """The confounded treatment example.

    Disease severity D raises both the chance of receiving treatment T
    and the damage to outcome Y; treatment helps at every severity.
    Forcing treatment yields P(Y=1) = 0.87 versus 0.52 for withholding
    it, while the observational P(Y=1 | T=0) of about 0.6695 makes
    withholding look misleadingly good.
    """
    truth = model_io.model_from_dict(
        {
            "variables": [
                {"name": "D", "states": ["0", "1"]},
                {"name": "T", "states": ["0", "1"]},
                {"name": "Y", "states": ["0", "1"]},
            ],
            "parents": {"D": [], "T": ["D"], "Y": ["D", "T"]},
            "cpts": {
                "D": [{"p": [0.7, 0.3]}],
                "T": [
                    {"given": {"D": "0"}, "p": [0.8, 0.2]},
                    {"given": {"D": "1"}, "p": [0.1, 0.9]},
                ],
                "Y": [
                    {"given": {"D": "0", "T": "0"}, "p": [0.3, 0.7]},
                    {"given": {"D": "0", "T": "1"}, "p": [0.1, 0.9]},
                    {"given": {"D": "1", "T": "0"}, "p": [0.9, 0.1]},
                    {"given": {"D": "1", "T": "1"}, "p": [0.2, 0.8]},
                ],
            },
        }
    )
    return Environment(
        truth=truth,
        actions=(
            Action("no-treatment", {"T": "0"}),
            Action("treatment", {"T": "1"}),
        ),
        target="Y",
        utility={"0": 0.0, "1": 1.0},
    )


def _environment_block(
    data: Any, doc: str
) -> tuple[str, tuple[Action, ...], dict[str, float] | None, str | None]:
    """Pull (target, actions, explicit utility, desired state) out of an
    experiment document, checking structure only."""
    if not isinstance(data, dict):
        raise model_io.FormatError(doc, "expected an object")
    target = data.get("target")
    if not isinstance(target, str):
        raise model_io.FormatError(f"{doc}: target", "expected a string")

    raw_actions = data.get("actions")
    if not isinstance(raw_actions, list) or not raw_actions:
        raise model_io.FormatError(f"{doc}: actions", "expected a non-empty list")
    actions = []
    for i, item in enumerate(raw_actions):
        where = f"{doc}: actions[{i}]"
        if not isinstance(item, dict) or set(item) != {"label", "do"}:
            raise model_io.FormatError(where, "expected an object with keys 'label' and 'do'")
        label, do = item["label"], item["do"]
        if not isinstance(label, str) or not label:
            raise model_io.FormatError(f"{where}.label", "expected a non-empty string")
        if not isinstance(do, dict) or not do:
            raise model_io.FormatError(f"{where}.do", "expected a non-empty object")
        for k, v in do.items():
            if not isinstance(k, str) or not isinstance(v, str):
                raise model_io.FormatError(f"{where}.do", "expected string-to-string entries")
        actions.append(Action(label, dict(do)))

    utility = None
    raw_utility = data.get("utility")
    if raw_utility is not None:
        if not isinstance(raw_utility, dict):
            raise model_io.FormatError(f"{doc}: utility", "expected an object")
        utility = {}
        for k, v in raw_utility.items():
            if not isinstance(k, str) or not isinstance(v, (int, float)) or isinstance(v, bool):
                raise model_io.FormatError(f"{doc}: utility", "expected string-to-number entries")
            utility[k] = float(v)

    desired = data.get("desired")
    if desired is not None and not isinstance(desired, str):
        raise model_io.FormatError(f"{doc}: desired", "expected a string")
    if utility is None and desired is None:
        raise model_io.FormatError(doc, "one of 'utility' or 'desired' is required")
    return target, tuple(actions), utility, desired


def load_environment(model_path: str, experiment_path: str) -> Environment:
    """Assemble an environment from a model file and an experiment file.

    The experiment file contributes the target, the action menu, and
    the utility. The utility is either explicit under "utility" or, as
    a shorthand, a "desired" target state paying 1 with every other
    state paying 0. Unknown targets, actions that force the target, and
    malformed documents are all rejected.
    """
    truth = model_io.load_model(model_path)
    data = model_io.read_json(experiment_path)
    target, actions, utility, desired = _environment_block(data, experiment_path)
    spec = truth.graph.variable_map.get(target)
    if spec is None:
        raise ValueError(f"unknown-target: {target!r} is not in the model")
    if desired is not None and desired not in spec.state_index:
        raise ValueError(f"illegal-state: desired state {desired!r} is not a state of {target}")
    if utility is None:
        utility = {s: (1.0 if s == desired else 0.0) for s in spec.states}
    return Environment(truth=truth, actions=actions, target=target, utility=utility)


def environment_block_to_dict(env: Environment) -> dict[str, Any]:
    """The experiment-file keys that describe an environment."""
    return {
        "target": env.target,
        "actions": [{"label": a.label, "do": dict(a.intervention)} for a in env.actions],
        "utility": {s: float(u) for s, u in env.utility.items()},
    }
