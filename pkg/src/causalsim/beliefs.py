"""Dirichlet-categorical beliefs over the CPTs of a known causal graph.

The graph structure is taken as given; uncertainty lives only in the
rows of the tables. Each CPT row gets an independent Dirichlet with one
positive pseudo-count per state. Observing a causally produced full
assignment is a conjugate update: for every variable that was not
forced, the pseudo-count of the observed state in the row picked out by
the observed parent configuration grows by one. Forced variables are
deliberately left alone, because surgery overrode their mechanisms and
the observation therefore says nothing about them.

The posterior mean of the rows assembles into an ordinary causal model,
which downstream decision code treats as if it were the truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .cgm import (
    Assignment,
    CausalGraph,
    CausalModel,
    Cpt,
    InvalidModelError,
    Intervention,
    parent_configurations,
    validate_graph,
)
from . import model_io

__all__ = [
    "DirichletRow",
    "BeliefState",
    "init_uniform",
    "posterior_mean",
    "update",
    "total_pseudo_count",
    "beliefs_to_dict",
    "beliefs_from_dict",
]

# Pseudo-counts for one CPT row, aligned with the variable's state order.
DirichletRow = tuple[float, ...]


@dataclass(frozen=True)
class BeliefState:
    """Per-row Dirichlet pseudo-counts over a fixed graph.

    ``counts`` has one inner mapping per variable, keyed exactly like
    the corresponding CPT rows: parent configuration tuple to row.
    """

    graph: CausalGraph
    counts: Mapping[str, Mapping[tuple[str, ...], DirichletRow]]


def init_uniform(graph: CausalGraph, alpha0: float = 1.0) -> BeliefState:
    """Symmetric prior: every pseudo-count in every row is ``alpha0``.

    The graph must be well formed (acyclic, known parents); the prior
    weight must be positive, since a Dirichlet requires it.
    """
    if not alpha0 > 0.0:
        raise ValueError(f"nonpositive-alpha: prior weight must be positive, got {alpha0!r}")
    issues = validate_graph(graph)
    if issues:
        raise InvalidModelError(issues)
    alpha0 = float(alpha0)
    counts: dict[str, dict[tuple[str, ...], DirichletRow]] = {}
    for v in graph.variables:
        row = (alpha0,) * len(v.states)
        counts[v.name] = {config: row for config in parent_configurations(graph, v.name)}
    return BeliefState(graph, counts)


def posterior_mean(beliefs: BeliefState) -> CausalModel:
    """The model whose CPT rows are the normalized pseudo-counts."""
    cpts = {}
    for name, rows in beliefs.counts.items():
        table = {}
        for config, row in rows.items():
            total = sum(row)
            table[config] = tuple(c / total for c in row)
        cpts[name] = Cpt(name, table)
    return CausalModel(beliefs.graph, cpts)


def update(beliefs: BeliefState, intervention: Intervention, observed: Assignment) -> BeliefState:
    """Fold one intervention outcome into the beliefs.

    ``observed`` must be a full assignment consistent with the
    intervention. Returns a new state; the input is never touched, so a
    failed precondition leaves the caller's beliefs intact.
    """
    graph = beliefs.graph
    if not intervention:
        raise ValueError("empty-intervention: at least one variable must be forced")
    for name, state in intervention.items():
        spec = graph.variable_map.get(name)
        if spec is None:
            raise ValueError(f"unknown-variable: intervention names {name!r}")
        if state not in spec.state_index:
            raise ValueError(f"illegal-state: intervention assigns {name}={state!r}")
    for name, state in observed.items():
        spec = graph.variable_map.get(name)
        if spec is None:
            raise ValueError(f"unknown-variable: observation names {name!r}")
        if state not in spec.state_index:
            raise ValueError(f"illegal-state: observation assigns {name}={state!r}")
    missing = [n for n in graph.names if n not in observed]
    if missing:
        raise ValueError(f"partial-observation: missing {', '.join(missing)}")
    clash = sorted(n for n, s in intervention.items() if observed[n] != s)
    if clash:
        raise ValueError(
            f"inconsistent-with-intervention: {', '.join(clash)} observed away from the forced state"
        )

    new_counts: dict[str, Mapping[tuple[str, ...], DirichletRow]] = dict(beliefs.counts)
    for v in graph.variables:
        if v.name in intervention:
            continue
        config = tuple(observed[p] for p in graph.parents_of(v.name))
        rows = dict(new_counts[v.name])
        row = rows[config]
        i = v.state_index[observed[v.name]]
        rows[config] = row[:i] + (row[i] + 1.0,) + row[i + 1 :]
        new_counts[v.name] = rows
    return BeliefState(graph, new_counts)


def total_pseudo_count(beliefs: BeliefState) -> float:
    """Sum of every pseudo-count; grows by (variables - forced) per update."""
    return sum(sum(row) for rows in beliefs.counts.values() for row in rows.values())


def beliefs_to_dict(beliefs: BeliefState) -> dict[str, Any]:
    """Document form: the model JSON layout with "counts" rows."""
    out = model_io.graph_to_dict(beliefs.graph)
    cpts: dict[str, Any] = {}
    for v in beliefs.graph.variables:
        parents = beliefs.graph.parents_of(v.name)
        rows = []
        for config in parent_configurations(beliefs.graph, v.name):
            entry: dict[str, Any] = {}
            if parents:
                entry["given"] = dict(zip(parents, config))
            entry["counts"] = list(beliefs.counts[v.name][config])
            rows.append(entry)
        cpts[v.name] = rows
    out["cpts"] = cpts
    return out


def beliefs_from_dict(data: Any) -> BeliefState:
    """Inverse of :func:`beliefs_to_dict`; counts must be positive."""
    graph = model_io.graph_from_dict(data)
    issues = validate_graph(graph)
    if issues:
        raise InvalidModelError(issues)
    raw = data.get("cpts")
    if not isinstance(raw, dict):
        raise model_io.FormatError("cpts", "expected an object")
    declared = set(graph.names)
    for name in raw:
        if name not in declared:
            raise model_io.FormatError(f"cpts.{name}", "rows for an undeclared variable")
    counts: dict[str, dict[tuple[str, ...], DirichletRow]] = {}
    for v in graph.variables:
        if v.name not in raw:
            raise model_io.FormatError("cpts", f"missing rows for {v.name}")
        rows = model_io.parse_rows(
            raw[v.name], graph, v.name, section="cpts", value_key="counts", normalize=False
        )
        for config, row in rows.items():
            if any(not c > 0.0 for c in row):
                raise model_io.FormatError(
                    f"cpts.{v.name}", "pseudo-counts must be positive in every entry"
                )
        counts[v.name] = rows
    return BeliefState(graph, counts)
