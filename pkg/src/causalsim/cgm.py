"""Discrete causal graphical models with exact interventional inference.

A model couples a directed acyclic graph over finitely many discrete
variables with one conditional probability table (CPT) per variable. The
joint distribution factorizes as the product of the tables. An
intervention is a graph surgery: each forced variable loses its incoming
edges and its table is replaced by a point mass on the forced state.
Interventional queries are then ordinary conditional queries against the
mutilated model, which makes forcing a variable observably different
from conditioning on it whenever confounding is present.

Inference here is exact enumeration over the full joint. That keeps the
semantics obvious and auditable; the price is exponential cost, so
enumeration refuses joints larger than ``MAX_JOINT_STATES`` states.
Sampling is ancestral and does not enumerate, so it has no such cap.

Models are plain dataclasses. Construction is permissive so that
:func:`validate` can report every problem in one pass; the query and
sampling operations assume a model that passes validation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

__all__ = [
    "MAX_JOINT_STATES",
    "ROW_SUM_TOL",
    "Assignment",
    "Intervention",
    "VariableSpec",
    "CausalGraph",
    "Cpt",
    "CausalModel",
    "ValidationIssue",
    "InvalidModelError",
    "validate",
    "validate_graph",
    "ensure_valid",
    "parent_configurations",
    "joint_size",
    "joint_probability",
    "query",
    "intervene",
    "interventional_query",
    "interventional_marginal",
    "sample",
]

# A CPT row must sum to 1 within this tolerance to count as normalized.
ROW_SUM_TOL = 1e-9

# Enumeration refuses models whose full joint exceeds this many states.
MAX_JOINT_STATES = 2**20

# A (possibly partial) mapping from variable name to state label.
Assignment = Mapping[str, str]

# A non-empty assignment whose variables are forced by surgery.
Intervention = Mapping[str, str]


@dataclass(frozen=True)
class VariableSpec:
    """A named discrete variable with an ordered tuple of state labels."""

    name: str
    states: tuple[str, ...]

    @cached_property
    def state_index(self) -> dict[str, int]:
        """Map each state label to its position in the declared order."""
        return {s: i for i, s in enumerate(self.states)}


@dataclass(frozen=True)
class CausalGraph:
    """A directed graph over declared variables, given by parent lists.

    ``parents`` maps a variable name to the ordered tuple of its parent
    names; variables absent from the mapping have no parents. The
    declared variable order is significant: it fixes enumeration order,
    tie-breaking in the topological order, and serialization order.
    """

    variables: tuple[VariableSpec, ...]
    parents: Mapping[str, tuple[str, ...]]

    def parents_of(self, name: str) -> tuple[str, ...]:
        return self.parents.get(name, ())

    @cached_property
    def variable_map(self) -> dict[str, VariableSpec]:
        return {v.name: v for v in self.variables}

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        """Variable names, parents before children, declaration order as
        the tie-break. Raises :class:`InvalidModelError` on a cycle."""
        order, leftover = _kahn_order(self)
        if leftover:
            issue = ValidationIssue(
                "cycle-detected", ", ".join(leftover), "these variables lie on or depend on a directed cycle"
            )
            raise InvalidModelError([issue])
        return tuple(order)


@dataclass(frozen=True)
class Cpt:
    """The conditional probability table of one variable.

    ``rows`` maps a parent configuration, written as a tuple of parent
    state labels in parent-list order, to the probability vector over
    the variable's states in declared state order. A parentless variable
    has a single row keyed by the empty tuple.
    """

    variable: str
    rows: Mapping[tuple[str, ...], tuple[float, ...]]


@dataclass(frozen=True)
class CausalModel:
    """A causal graph plus one CPT per variable, keyed by variable name."""

    graph: CausalGraph
    cpts: Mapping[str, Cpt]

    @cached_property
    def topological_order(self) -> tuple[str, ...]:
        return self.graph.topological_order

    @cached_property
    def _sampler_plan(self) -> tuple[tuple[str, tuple[str, ...], tuple[str, ...], Mapping[tuple[str, ...], tuple[float, ...]]], ...]:
        # Per variable in topological order: (name, states, parent names, rows).
        plan = []
        for name in self.topological_order:
            spec = self.graph.variable_map[name]
            plan.append((name, spec.states, self.graph.parents_of(name), self.cpts[name].rows))
        return tuple(plan)


@dataclass(frozen=True)
class ValidationIssue:
    """One violation found by :func:`validate`."""

    code: str
    where: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code} at {self.where}: {self.detail}"


class InvalidModelError(ValueError):
    """Raised when a model or graph fails validation.

    Carries the full list of issues so callers can report every problem
    at once rather than fixing them one by one.
    """

    def __init__(self, issues: list[ValidationIssue] | tuple[ValidationIssue, ...]):
        self.issues = tuple(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


def _kahn_order(graph: CausalGraph) -> tuple[list[str], list[str]]:
    """Kahn topological sort. Returns (ordered names, names on cycles).

    Parent references to undeclared variables are ignored here; they are
    reported separately by :func:`validate_graph`.
    """
    declared = set(graph.names)
    remaining: dict[str, set[str]] = {
        v.name: {p for p in graph.parents_of(v.name) if p in declared and p != v.name}
        for v in graph.variables
    }
    # Self-loops are cycles; keep them so the vertex never becomes ready.
    for v in graph.variables:
        if v.name in graph.parents_of(v.name):
            remaining[v.name].add(v.name)
    order: list[str] = []
    placed: set[str] = set()
    while True:
        ready = [n for n in graph.names if n not in placed and not (remaining[n] - placed)]
        if not ready:
            break
        for n in ready:
            order.append(n)
            placed.add(n)
    leftover = [n for n in graph.names if n not in placed]
    return order, leftover


def parent_configurations(graph: CausalGraph, name: str) -> Iterator[tuple[str, ...]]:
    """Yield every parent configuration of ``name`` in row order.

    Row order is the cross product of the parents' state tuples with the
    rightmost parent varying fastest, matching ``itertools.product``.
    """
    state_sets = [graph.variable_map[p].states for p in graph.parents_of(name)]
    return itertools.product(*state_sets)


def _row_key(where_var: str, config: tuple[str, ...], parents: tuple[str, ...]) -> str:
    inside = ", ".join(f"{p}={s}" for p, s in zip(parents, config))
    return f"{where_var}[{inside}]"


def validate_graph(graph: CausalGraph) -> list[ValidationIssue]:
    """Check the graph portion of the model contract.

    Reports duplicate or underspecified variables, unknown or duplicate
    parents, and cycles (a self-loop counts as a cycle).
    """
    issues: list[ValidationIssue] = []
    seen: set[str] = set()
    for v in graph.variables:
        if v.name in seen:
            issues.append(ValidationIssue("duplicate-variable", v.name, "declared more than once"))
        seen.add(v.name)
        if len(v.states) < 2:
            issues.append(ValidationIssue("too-few-states", v.name, "a variable needs at least two states"))
        if len(set(v.states)) != len(v.states):
            issues.append(ValidationIssue("duplicate-state", v.name, "state labels must be unique"))
    declared = set(graph.names)
    for name, plist in graph.parents.items():
        if name not in declared:
            issues.append(ValidationIssue("unknown-variable", name, "parent list for an undeclared variable"))
            continue
        for p in plist:
            if p not in declared:
                issues.append(ValidationIssue("unknown-parent", name, f"parent {p!r} is not a declared variable"))
        if len(set(plist)) != len(plist):
            issues.append(ValidationIssue("duplicate-parent", name, "parent list repeats a variable"))
    _, leftover = _kahn_order(graph)
    if leftover:
        issues.append(
            ValidationIssue("cycle-detected", ", ".join(leftover), "these variables lie on or depend on a directed cycle")
        )
    return issues


def validate(model: CausalModel) -> list[ValidationIssue]:
    """Check the whole model contract; an empty list means valid.

    Every violation is reported, so one pass suffices to see all
    problems. CPT row checks are skipped for variables whose parent
    lists are already broken, which avoids cascading noise.
    """
    issues = validate_graph(model.graph)
    graph = model.graph
    broken = {i.where for i in issues}
    declared = set(graph.names)
    for name in model.cpts:
        if name not in declared:
            issues.append(ValidationIssue("unexpected-cpt-table", name, "table for an undeclared variable"))
    for v in graph.variables:
        if v.name in broken:
            continue
        cpt = model.cpts.get(v.name)
        if cpt is None:
            issues.append(ValidationIssue("missing-cpt-table", v.name, "no table for this variable"))
            continue
        parents = graph.parents_of(v.name)
        expected = set(parent_configurations(graph, v.name))
        for config in sorted(expected - set(cpt.rows)):
            issues.append(
                ValidationIssue("missing-cpt-row", _row_key(v.name, config, parents), "no row for this parent configuration")
            )
        for config in cpt.rows:
            where = _row_key(v.name, config, parents)
            if config not in expected:
                issues.append(ValidationIssue("unexpected-cpt-row", where, "no such parent configuration"))
                continue
            row = cpt.rows[config]
            if len(row) != len(v.states):
                issues.append(
                    ValidationIssue("bad-row-length", where, f"{len(row)} entries for {len(v.states)} states")
                )
                continue
            if any(not (0.0 <= p <= 1.0) or not math.isfinite(p) for p in row):
                issues.append(ValidationIssue("entry-out-of-range", where, "entries must lie in [0, 1]"))
                continue
            if abs(sum(row) - 1.0) > ROW_SUM_TOL:
                issues.append(
                    ValidationIssue("row-not-normalized", where, f"row sums to {sum(row):.12g}")
                )
    return issues


def ensure_valid(model: CausalModel) -> None:
    """Raise :class:`InvalidModelError` listing every violation, if any."""
    issues = validate(model)
    if issues:
        raise InvalidModelError(issues)


def joint_size(model: CausalModel) -> int:
    """Number of full assignments in the model's joint distribution."""
    n = 1
    for v in model.graph.variables:
        n *= len(v.states)
    return n


def _check_names_and_states(model: CausalModel, mapping: Assignment, role: str) -> None:
    vmap = model.graph.variable_map
    for name, state in mapping.items():
        spec = vmap.get(name)
        if spec is None:
            raise ValueError(f"unknown-variable: {role} names {name!r}, which is not in the model")
        if state not in spec.state_index:
            raise ValueError(f"illegal-state: {role} assigns {name}={state!r}, not one of its states")


def joint_probability(model: CausalModel, assignment: Assignment) -> float:
    """Probability of one full assignment under the factorized joint.

    The assignment must cover every model variable exactly; a partial
    assignment is rejected because its probability is a marginal, not a
    joint entry.
    """
    _check_names_and_states(model, assignment, "assignment")
    missing = [n for n in model.graph.names if n not in assignment]
    if missing:
        raise ValueError(f"partial-assignment: missing {', '.join(missing)}")
    p = 1.0
    graph = model.graph
    for v in graph.variables:
        config = tuple(assignment[q] for q in graph.parents_of(v.name))
        p *= model.cpts[v.name].rows[config][v.state_index[assignment[v.name]]]
    return p


def _check_enumerable(model: CausalModel, max_states: int) -> None:
    n = joint_size(model)
    if n > max_states:
        raise ValueError(
            f"joint too large to enumerate: {n} states exceeds the cap of {max_states}"
        )


def query(
    model: CausalModel,
    target: Assignment,
    evidence: Assignment | None = None,
    *,
    max_states: int = MAX_JOINT_STATES,
) -> float:
    """Exact conditional probability P(target | evidence) by enumeration.

    ``target`` must be non-empty and disjoint from ``evidence``; empty
    evidence asks for a marginal. Evidence of probability zero has no
    conditional and is rejected.
    """
    evidence = {} if evidence is None else evidence
    if not target:
        raise ValueError("empty-target: at least one target variable is required")
    _check_names_and_states(model, target, "target")
    _check_names_and_states(model, evidence, "evidence")
    overlap = sorted(set(target) & set(evidence))
    if overlap:
        raise ValueError(f"overlapping-target-evidence: {', '.join(overlap)}")
    _check_enumerable(model, max_states)

    graph = model.graph
    names = graph.names
    position = {n: i for i, n in enumerate(names)}
    choices = [(evidence[n],) if n in evidence else graph.variable_map[n].states for n in names]
    factors = []
    for v in graph.variables:
        ppos = tuple(position[q] for q in graph.parents_of(v.name))
        factors.append((position[v.name], v.state_index, ppos, model.cpts[v.name].rows))
    target_pos = [(position[n], s) for n, s in target.items()]

    numerator = 0.0
    denominator = 0.0
    for assignment in itertools.product(*choices):
        w = 1.0
        for pos, sindex, ppos, rows in factors:
            w *= rows[tuple(assignment[i] for i in ppos)][sindex[assignment[pos]]]
        denominator += w
        if all(assignment[i] == s for i, s in target_pos):
            numerator += w
    if denominator <= 0.0:
        raise ValueError("zero-probability-evidence: the evidence has probability zero")
    return numerator / denominator


def intervene(model: CausalModel, intervention: Intervention) -> CausalModel:
    """Graph surgery: force each intervened variable to one state.

    Returns a new model in which every intervened variable has no
    parents and a point-mass CPT on its forced state; everything else is
    shared with the input, which is left untouched. Applying the same
    intervention twice is a no-op, and a later surgery on the same
    variable simply replaces the earlier one.
    """
    if not intervention:
        raise ValueError("empty-intervention: at least one variable must be forced")
    _check_names_and_states(model, intervention, "intervention")
    new_parents = dict(model.graph.parents)
    new_cpts = dict(model.cpts)
    for name, state in intervention.items():
        spec = model.graph.variable_map[name]
        new_parents[name] = ()
        row = tuple(1.0 if s == state else 0.0 for s in spec.states)
        new_cpts[name] = Cpt(name, {(): row})
    return CausalModel(CausalGraph(model.graph.variables, new_parents), new_cpts)


def interventional_query(
    model: CausalModel,
    intervention: Intervention,
    target: Assignment,
    *,
    max_states: int = MAX_JOINT_STATES,
) -> float:
    """P(target | do(intervention)): query the surgically mutilated model.

    A variable cannot be both forced and queried; forcing fixes it by
    fiat, so the query would be trivial or contradictory.
    """
    overlap = sorted(set(target) & set(intervention))
    if overlap:
        raise ValueError(f"target-is-intervened: {', '.join(overlap)}")
    return query(intervene(model, intervention), target, {}, max_states=max_states)


def interventional_marginal(
    model: CausalModel,
    intervention: Intervention,
    variable: str,
    *,
    max_states: int = MAX_JOINT_STATES,
) -> tuple[float, ...]:
    """Distribution of one variable under an intervention, in state order.

    Evaluates the truncated factorization directly: intervened variables
    are pinned to their forced states and their factors dropped. Agrees
    with calling :func:`interventional_query` once per state, but does
    the enumeration in a single pass and never builds the mutilated
    model. An empty intervention yields the plain marginal.
    """
    if intervention:
        _check_names_and_states(model, intervention, "intervention")
    if variable in intervention:
        raise ValueError(f"target-is-intervened: {variable}")
    graph = model.graph
    spec = graph.variable_map.get(variable)
    if spec is None:
        raise ValueError(f"unknown-variable: target names {variable!r}, which is not in the model")
    _check_enumerable(model, max_states)

    names = graph.names
    position = {n: i for i, n in enumerate(names)}
    choices = [(intervention[n],) if n in intervention else graph.variable_map[n].states for n in names]
    factors = []
    for v in graph.variables:
        if v.name in intervention:
            continue
        ppos = tuple(position[q] for q in graph.parents_of(v.name))
        factors.append((position[v.name], v.state_index, ppos, model.cpts[v.name].rows))
    vpos = position[variable]
    vindex = spec.state_index

    totals = [0.0] * len(spec.states)
    for assignment in itertools.product(*choices):
        w = 1.0
        for pos, sindex, ppos, rows in factors:
            w *= rows[tuple(assignment[i] for i in ppos)][sindex[assignment[pos]]]
        totals[vindex[assignment[vpos]]] += w
    mass = sum(totals)
    if mass <= 0.0:
        raise ValueError("zero-probability-evidence: the intervened joint has no mass")
    return tuple(t / mass for t in totals)


def sample(model: CausalModel, rng: np.random.Generator) -> dict[str, str]:
    """Draw one full assignment by ancestral sampling.

    Variables are visited in the cached topological order; each is drawn
    from its CPT row given the already-sampled parents. All randomness
    comes from ``rng``, so a given generator state fixes the draw.
    """
    out: dict[str, str] = {}
    for name, states, pnames, rows in model._sampler_plan:
        row = rows[tuple(out[p] for p in pnames)]
        u = rng.random()
        acc = 0.0
        idx = len(states) - 1  # guard against rounding in the row sum
        for i, p in enumerate(row):
            acc += p
            if u < acc:
                idx = i
                break
        out[name] = states[idx]
    return out
