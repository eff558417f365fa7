"""Replicated, seeded experiment runs comparing agents on one environment.

Each replication pits every configured agent against the same
environment for a fixed number of rounds. Agents live in parallel
worlds: per round, each one chooses an action, the environment steps
once for that agent alone, and the agent learns from its own outcome.
Nothing is shared between agents or between replications.

Randomness is carved into substreams keyed by (master seed, replication
index, agent label), so any execution order over replications, serial
or process-parallel, yields bit-identical trajectories. Aggregation
then averages rewards per round across replications and also reports
the running cumulative mean, which is what the convergence check and
the reports consume.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .agents import (
    AgentRecord,
    CausalAgentState,
    QAgentState,
    causal_choose,
    causal_learn,
    q_choose,
    q_learn,
    random_choose,
)
from .beliefs import init_uniform
from .environment import Environment, step
from . import model_io

__all__ = [
    "CausalAgentConfig",
    "QLearningConfig",
    "RandomConfig",
    "AgentConfig",
    "ExperimentConfig",
    "RoundSeries",
    "ReplicationLog",
    "TrialLog",
    "ExperimentResult",
    "default_agents",
    "config_from_dict",
    "load_experiment_config",
    "run_experiment",
    "convergence_index",
    "apply_overrides",
]

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class CausalAgentConfig:
    """Causal expected-utility agent: uniform Dirichlet prior weight and
    an optional exploration rate (0 means fully greedy)."""

    prior_alpha: float = 1.0
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not self.prior_alpha > 0.0:
            raise ValueError(f"nonpositive-alpha: prior weight must be positive, got {self.prior_alpha!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"exploration rate must lie in [0, 1], got {self.epsilon!r}")


@dataclass(frozen=True)
class QLearningConfig:
    """Stateless Q-learner: step size, exploration rate, initial value."""

    alpha: float = 0.1
    epsilon: float = 0.1
    q0: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"learning rate must lie in (0, 1], got {self.alpha!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"exploration rate must lie in [0, 1], got {self.epsilon!r}")
        if not np.isfinite(self.q0):
            raise ValueError(f"initial value must be finite, got {self.q0!r}")


@dataclass(frozen=True)
class RandomConfig:
    """Uniform-random baseline; nothing to configure."""


AgentConfig = CausalAgentConfig | QLearningConfig | RandomConfig

_AGENT_KINDS: dict[str, type] = {
    "causal": CausalAgentConfig,
    "qlearning": QLearningConfig,
    "random": RandomConfig,
}


def default_agents() -> dict[str, AgentConfig]:
    """All three agents with their default hyperparameters."""
    return {
        "causal": CausalAgentConfig(),
        "qlearning": QLearningConfig(),
        "random": RandomConfig(),
    }


@dataclass(frozen=True)
class ExperimentConfig:
    """Run shape: rounds per replication, replication count, master
    seed, convergence threshold, agent roster, optional output paths.

    The order of ``agents`` is significant: it fixes series order in
    results, reports, and CSV output.
    """

    rounds: int = 200
    replications: int = 1000
    seed: int = 42
    epsilon: float = 0.05
    agents: Mapping[str, AgentConfig] = field(default_factory=default_agents)
    out_csv: str | None = None
    out_svg: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.rounds, int) or isinstance(self.rounds, bool) or self.rounds < 1:
            raise ValueError(f"rounds must be a positive integer, got {self.rounds!r}")
        if (
            not isinstance(self.replications, int)
            or isinstance(self.replications, bool)
            or self.replications < 1
        ):
            raise ValueError(f"replications must be a positive integer, got {self.replications!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed <= MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f"convergence epsilon must be positive, got {self.epsilon!r}")
        if not self.agents:
            raise ValueError("at least one agent must be configured")
        for label, acfg in self.agents.items():
            kind = _AGENT_KINDS.get(label)
            if kind is None:
                raise ValueError(f"unknown agent {label!r}; known: {', '.join(_AGENT_KINDS)}")
            if not isinstance(acfg, kind):
                raise ValueError(f"agent {label!r} requires a {kind.__name__}, got {type(acfg).__name__}")


@dataclass(frozen=True)
class RoundSeries:
    """One agent's aggregate learning curve.

    ``values[t]`` is the mean reward at round t+1 across replications;
    ``cumulative[t]`` is the running mean of ``values`` through t+1.
    """

    label: str
    values: tuple[float, ...]
    cumulative: tuple[float, ...]


@dataclass(frozen=True)
class ReplicationLog:
    """Per-round action labels and rewards of every agent, one replication."""

    replication: int
    actions: Mapping[str, tuple[str, ...]]
    rewards: Mapping[str, tuple[float, ...]]

    def agent_records(self, label: str) -> tuple[AgentRecord, ...]:
        """The replication's history for one agent as round records."""
        pairs = zip(self.actions[label], self.rewards[label])
        return tuple(AgentRecord(t, a, r) for t, (a, r) in enumerate(pairs, start=1))


@dataclass(frozen=True)
class TrialLog:
    """Every replication's full history, ordered by replication index."""

    replications: tuple[ReplicationLog, ...]


@dataclass(frozen=True)
class ExperimentResult:
    """Aggregate series in agent-roster order plus the full trial log."""

    series: tuple[RoundSeries, ...]
    trial_log: TrialLog

    def series_for(self, label: str) -> RoundSeries:
        for s in self.series:
            if s.label == label:
                return s
        raise KeyError(label)


def config_from_dict(data: Any, *, doc: str = "$") -> ExperimentConfig:
    """Parse the run-shape half of an experiment document.

    Environment keys (target, desired, actions, utility) are parsed by
    :func:`~causalsim.environment.load_environment`; they are tolerated
    here so one file can carry both halves. Anything else unknown is
    rejected.
    """
    if not isinstance(data, dict):
        raise model_io.FormatError(doc, "expected an object")
    allowed = {
        "rounds",
        "replications",
        "seed",
        "epsilon",
        "agents",
        "out_csv",
        "out_svg",
        "target",
        "desired",
        "actions",
        "utility",
    }
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise model_io.FormatError(doc, f"unknown keys: {', '.join(unknown)}")

    kwargs: dict[str, Any] = {}
    for key in ("rounds", "replications", "seed"):
        if key in data:
            value = data[key]
            if not isinstance(value, int) or isinstance(value, bool):
                raise model_io.FormatError(f"{doc}.{key}", "expected an integer")
            kwargs[key] = value
    if "epsilon" in data:
        value = data["epsilon"]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise model_io.FormatError(f"{doc}.epsilon", "expected a number")
        kwargs["epsilon"] = float(value)
    for key in ("out_csv", "out_svg"):
        if key in data:
            if not isinstance(data[key], str):
                raise model_io.FormatError(f"{doc}.{key}", "expected a string")
            kwargs[key] = data[key]
    if "agents" in data:
        raw_agents = data["agents"]
        if not isinstance(raw_agents, dict):
            raise model_io.FormatError(f"{doc}.agents", "expected an object")
        agents: dict[str, AgentConfig] = {}
        for label, block in raw_agents.items():
            where = f"{doc}.agents.{label}"
            kind = _AGENT_KINDS.get(label)
            if kind is None:
                raise model_io.FormatError(where, f"unknown agent; known: {', '.join(_AGENT_KINDS)}")
            if not isinstance(block, dict):
                raise model_io.FormatError(where, "expected an object")
            fields = {f for f in kind.__dataclass_fields__}
            bad = sorted(set(block) - fields)
            if bad:
                raise model_io.FormatError(where, f"unknown keys: {', '.join(bad)}")
            params = {}
            for pkey, pval in block.items():
                if not isinstance(pval, (int, float)) or isinstance(pval, bool):
                    raise model_io.FormatError(f"{where}.{pkey}", "expected a number")
                params[pkey] = float(pval)
            agents[label] = kind(**params)
        kwargs["agents"] = agents
    return ExperimentConfig(**kwargs)


def load_experiment_config(path: str) -> ExperimentConfig:
    """Read the run shape from an experiment file on disk."""
    return config_from_dict(model_io.read_json(path), doc=path)


class _CausalDriver:
    """Wraps the functional causal-agent ops in a mutable per-run shell."""

    def __init__(self, cfg: CausalAgentConfig, env: Environment):
        beliefs = init_uniform(env.truth.graph, cfg.prior_alpha)
        self.state = CausalAgentState(beliefs, env.actions, env.target, env.utility)
        self.epsilon = cfg.epsilon

    def choose(self, rng: np.random.Generator) -> int:
        if self.epsilon > 0.0 and rng.random() < self.epsilon:
            return int(rng.integers(len(self.state.actions)))
        return causal_choose(self.state)

    def learn(self, index: int, realized: Mapping[str, str], reward: float) -> None:
        self.state = causal_learn(self.state, self.state.actions[index], realized)


class _QDriver:
    def __init__(self, cfg: QLearningConfig, env: Environment):
        self.state = QAgentState({a.label: cfg.q0 for a in env.actions}, cfg.alpha, cfg.epsilon)

    def choose(self, rng: np.random.Generator) -> int:
        return q_choose(self.state, rng)

    def learn(self, index: int, realized: Mapping[str, str], reward: float) -> None:
        self.state = q_learn(self.state, index, reward)


class _RandomDriver:
    def __init__(self, cfg: RandomConfig, env: Environment):
        self.actions = env.actions

    def choose(self, rng: np.random.Generator) -> int:
        return random_choose(self.actions, rng)

    def learn(self, index: int, realized: Mapping[str, str], reward: float) -> None:
        pass


_DRIVERS = {"causal": _CausalDriver, "qlearning": _QDriver, "random": _RandomDriver}


def _agent_stream(seed: int, rep: int, label: str) -> np.random.Generator:
    """The substream owned by one agent within one replication.

    Keyed by (master seed, replication, hashed label), so trajectories
    do not depend on roster order or on which replications run where.
    """
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, rep, key))))


def _run_replication(env: Environment, cfg: ExperimentConfig, rep: int) -> ReplicationLog:
    # Agents never interact, so running them one after another inside a
    # replication is equivalent to interleaving them round by round.
    actions_out: dict[str, tuple[str, ...]] = {}
    rewards_out: dict[str, tuple[float, ...]] = {}
    env_actions = env.actions
    for label, acfg in cfg.agents.items():
        driver = _DRIVERS[label](acfg, env)
        rng = _agent_stream(cfg.seed, rep, label)
        acts: list[str] = []
        rews: list[float] = []
        for _ in range(cfg.rounds):
            i = driver.choose(rng)
            rec = step(env, env_actions[i], rng)
            driver.learn(i, rec.realized, rec.reward)
            acts.append(rec.action)
            rews.append(rec.reward)
        actions_out[label] = tuple(acts)
        rewards_out[label] = tuple(rews)
    return ReplicationLog(rep, actions_out, rewards_out)


def _run_chunk(args: tuple[Environment, ExperimentConfig, list[int]]) -> list[ReplicationLog]:
    env, cfg, reps = args
    return [_run_replication(env, cfg, r) for r in reps]


def _chunk_indices(n: int, workers: int) -> list[list[int]]:
    chunks = max(1, min(n, workers * 4))
    bounds = np.linspace(0, n, chunks + 1, dtype=int)
    return [list(range(bounds[i], bounds[i + 1])) for i in range(chunks) if bounds[i] < bounds[i + 1]]


def run_experiment(
    env: Environment, cfg: ExperimentConfig, *, workers: int | None = None
) -> ExperimentResult:
    """Run every configured agent for the configured replications.

    ``workers`` > 1 spreads replications over that many processes.
    Because every replication owns its substreams and results are
    merged by replication index, the output is identical to a serial
    run, byte for byte once written.
    """
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise ValueError(f"workers must be a positive integer, got {workers!r}")
    if workers is not None and workers > 1 and cfg.replications > 1:
        tasks = [(env, cfg, chunk) for chunk in _chunk_indices(cfg.replications, workers)]
        logs: list[ReplicationLog] = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk_logs in pool.map(_run_chunk, tasks):
                logs.extend(chunk_logs)
        logs.sort(key=lambda log: log.replication)
    else:
        logs = [_run_replication(env, cfg, r) for r in range(cfg.replications)]

    series = []
    denominators = np.arange(1, cfg.rounds + 1, dtype=np.float64)
    for label in cfg.agents:
        arr = np.array([log.rewards[label] for log in logs], dtype=np.float64)
        values = arr.mean(axis=0)
        cumulative = np.cumsum(values) / denominators
        series.append(
            RoundSeries(label, tuple(float(v) for v in values), tuple(float(c) for c in cumulative))
        )
    return ExperimentResult(tuple(series), TrialLog(tuple(logs)))


def _series_values(series: RoundSeries | Sequence[float] | Iterable[float]) -> tuple[float, ...]:
    if isinstance(series, RoundSeries):
        return series.values
    return tuple(float(v) for v in series)


def convergence_index(
    x: RoundSeries | Sequence[float],
    y: RoundSeries | Sequence[float],
    epsilon: float,
) -> int | None:
    """Smallest N >= 0 with |x_t - y_t| < epsilon for every round t > N.

    Rounds are 1-indexed. Returns None when no N up to length - 1
    works, that is, when even the final round differs by epsilon or
    more. Series that stay close from the start give 0.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    xs = _series_values(x)
    ys = _series_values(y)
    if len(xs) != len(ys):
        raise ValueError(f"length-mismatch: {len(xs)} rounds versus {len(ys)}")
    if not xs:
        raise ValueError("empty-series: nothing to compare")
    last_violation = 0
    for t, (a, b) in enumerate(zip(xs, ys), start=1):
        if not abs(a - b) < epsilon:
            last_violation = t
    if last_violation >= len(xs):
        return None
    return last_violation


def apply_overrides(
    cfg: ExperimentConfig,
    *,
    seed: int | None = None,
    rounds: int | None = None,
    replications: int | None = None,
    out_csv: str | None = None,
    out_svg: str | None = None,
) -> ExperimentConfig:
    """A copy of ``cfg`` with any provided fields replaced."""
    updates: dict[str, Any] = {}
    if seed is not None:
        updates["seed"] = seed
    if rounds is not None:
        updates["rounds"] = rounds
    if replications is not None:
        updates["replications"] = replications
    if out_csv is not None:
        updates["out_csv"] = out_csv
    if out_svg is not None:
        updates["out_svg"] = out_svg
    return replace(cfg, **updates) if updates else cfg
