"""Read and write causal models as JSON documents.

The document layout mirrors the in-memory model:

.. code-block:: json

    {
      "variables": [{"name": "D", "states": ["0", "1"]}, ...],
      "parents": {"D": [], "T": ["D"], "Y": ["D", "T"]},
      "cpts": {
        "Y": [{"given": {"D": "0", "T": "0"}, "p": [0.3, 0.7]}, ...],
        ...
      }
    }

Each "p" vector aligns with the variable's declared state order, every
parent configuration appears exactly once, and "given" is omitted (or
empty) for parentless variables. Variables missing from "parents" have
no parents.

Structural problems raise :class:`FormatError` at the first violation,
with a path into the document such as ``cpts.Y[2].p``. Row sums within
``ROW_SUM_TOL`` of one are renormalized on load; rows further out are
rejected. After parsing, the assembled model is validated semantically
and any violations raise :class:`~causalsim.cgm.InvalidModelError`.
"""

from __future__ import annotations

import json
from typing import Any

from .cgm import (
    ROW_SUM_TOL,
    CausalGraph,
    CausalModel,
    Cpt,
    VariableSpec,
    ensure_valid,
    parent_configurations,
)

__all__ = [
    "FormatError",
    "load_model",
    "save_model",
    "model_from_dict",
    "model_to_dict",
    "graph_from_dict",
    "graph_to_dict",
    "read_json",
]


class FormatError(ValueError):
    """A structurally malformed document; the message starts with a path."""

    def __init__(self, path: str, detail: str):
        self.path = path
        super().__init__(f"{path}: {detail}")


def read_json(path: str) -> Any:
    """Load a JSON file, reporting unreadable or unparseable input as
    :class:`FormatError` under the ``parse-error`` banner."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise FormatError(path, f"parse-error: {e}") from e
    except json.JSONDecodeError as e:
        raise FormatError(path, f"parse-error: {e}") from e


def _expect(condition: bool, path: str, detail: str) -> None:
    if not condition:
        raise FormatError(path, detail)


def _string_list(value: Any, path: str) -> tuple[str, ...]:
    _expect(isinstance(value, list), path, "expected a list of strings")
    for i, s in enumerate(value):
        _expect(isinstance(s, str), f"{path}[{i}]", "expected a string")
    return tuple(value)


def graph_from_dict(data: Any, *, path: str = "$") -> CausalGraph:
    """Parse the "variables" and "parents" sections into a graph."""
    _expect(isinstance(data, dict), path, "expected an object")
    _expect("variables" in data, path, "missing key 'variables'")
    raw_vars = data["variables"]
    _expect(isinstance(raw_vars, list) and raw_vars, "variables", "expected a non-empty list")
    specs = []
    for i, item in enumerate(raw_vars):
        where = f"variables[{i}]"
        _expect(isinstance(item, dict), where, "expected an object")
        _expect(set(item) <= {"name", "states"}, where, "unknown keys present")
        _expect(isinstance(item.get("name"), str), f"{where}.name", "expected a string")
        states = _string_list(item.get("states"), f"{where}.states")
        _expect(len(states) >= 2, f"{where}.states", "a variable needs at least two states")
        specs.append(VariableSpec(item["name"], states))

    declared = {s.name for s in specs}
    raw_parents = data.get("parents", {})
    _expect(isinstance(raw_parents, dict), "parents", "expected an object")
    parents: dict[str, tuple[str, ...]] = {}
    for name, plist in raw_parents.items():
        where = f"parents.{name}"
        _expect(name in declared, where, "parent list for an undeclared variable")
        entries = _string_list(plist, where)
        for j, p in enumerate(entries):
            _expect(p in declared, f"{where}[{j}]", f"parent {p!r} is not a declared variable")
        parents[name] = entries
    return CausalGraph(tuple(specs), parents)


def graph_to_dict(graph: CausalGraph) -> dict[str, Any]:
    return {
        "variables": [{"name": v.name, "states": list(v.states)} for v in graph.variables],
        "parents": {v.name: list(graph.parents_of(v.name)) for v in graph.variables},
    }


def parse_rows(
    raw_rows: Any,
    graph: CausalGraph,
    name: str,
    *,
    section: str,
    value_key: str,
    normalize: bool,
) -> dict[tuple[str, ...], tuple[float, ...]]:
    """Parse one variable's row list; shared by model and belief loaders.

    ``value_key`` selects the per-row vector ("p" for probabilities,
    "counts" for pseudo-counts); only probability rows are normalized.
    """
    where = f"{section}.{name}"
    spec = graph.variable_map[name]
    parents = graph.parents_of(name)
    _expect(isinstance(raw_rows, list), where, "expected a list of rows")
    rows: dict[tuple[str, ...], tuple[float, ...]] = {}
    for i, item in enumerate(raw_rows):
        rw = f"{where}[{i}]"
        _expect(isinstance(item, dict), rw, "expected an object")
        _expect(set(item) <= {"given", value_key}, rw, "unknown keys present")
        given = item.get("given", {})
        _expect(isinstance(given, dict), f"{rw}.given", "expected an object")
        _expect(
            set(given) == set(parents),
            f"{rw}.given",
            f"expected exactly the parents of {name}: {', '.join(parents) or '(none)'}",
        )
        config = []
        for p in parents:
            s = given[p]
            _expect(isinstance(s, str), f"{rw}.given.{p}", "expected a string")
            _expect(
                s in graph.variable_map[p].state_index,
                f"{rw}.given.{p}",
                f"{s!r} is not a state of {p}",
            )
            config.append(s)
        key = tuple(config)
        _expect(key not in rows, f"{rw}.given", "duplicate parent configuration")
        vec = item.get(value_key)
        _expect(isinstance(vec, list), f"{rw}.{value_key}", "expected a list of numbers")
        _expect(
            len(vec) == len(spec.states),
            f"{rw}.{value_key}",
            f"{len(vec)} entries for {len(spec.states)} states",
        )
        values = []
        for j, x in enumerate(vec):
            _expect(
                isinstance(x, (int, float)) and not isinstance(x, bool),
                f"{rw}.{value_key}[{j}]",
                "expected a number",
            )
            values.append(float(x))
        if normalize:
            for j, x in enumerate(values):
                _expect(0.0 <= x <= 1.0, f"{rw}.{value_key}[{j}]", "probabilities must lie in [0, 1]")
            total = sum(values)
            _expect(
                abs(total - 1.0) <= ROW_SUM_TOL,
                f"{rw}.{value_key}",
                f"row sums to {total:.12g}, beyond tolerance {ROW_SUM_TOL:g}",
            )
            values = [x / total for x in values]
        rows[key] = tuple(values)

    expected = set(parent_configurations(graph, name))
    missing = sorted(expected - set(rows))
    if missing:
        shown = ", ".join("(" + ", ".join(c) + ")" for c in missing[:3])
        raise FormatError(where, f"missing parent configurations: {shown}")
    return rows


def model_from_dict(data: Any) -> CausalModel:
    """Assemble and validate a model from its document form."""
    graph = graph_from_dict(data)
    _expect(set(data) <= {"variables", "parents", "cpts"}, "$", "unknown top-level keys present")
    _expect("cpts" in data, "$", "missing key 'cpts'")
    raw_cpts = data["cpts"]
    _expect(isinstance(raw_cpts, dict), "cpts", "expected an object")
    declared = set(graph.names)
    for name in raw_cpts:
        _expect(name in declared, f"cpts.{name}", "table for an undeclared variable")
    cpts: dict[str, Cpt] = {}
    for v in graph.variables:
        _expect(v.name in raw_cpts, "cpts", f"missing table for {v.name}")
        rows = parse_rows(
            raw_cpts[v.name], graph, v.name, section="cpts", value_key="p", normalize=True
        )
        cpts[v.name] = Cpt(v.name, rows)
    model = CausalModel(graph, cpts)
    ensure_valid(model)
    return model


def model_to_dict(model: CausalModel) -> dict[str, Any]:
    """Document form of a model; inverse of :func:`model_from_dict`.

    Rows are emitted in cross-product order; "given" is omitted for
    parentless variables.
    """
    out = graph_to_dict(model.graph)
    cpts: dict[str, Any] = {}
    for v in model.graph.variables:
        parents = model.graph.parents_of(v.name)
        rows = []
        for config in parent_configurations(model.graph, v.name):
            entry: dict[str, Any] = {}
            if parents:
                entry["given"] = dict(zip(parents, config))
            entry["p"] = list(model.cpts[v.name].rows[config])
            rows.append(entry)
        cpts[v.name] = rows
    out["cpts"] = cpts
    return out


def load_model(path: str) -> CausalModel:
    """Read a model document from disk; see module docstring for errors."""
    return model_from_dict(read_json(path))


def save_model(model: CausalModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_dict(model), f, indent=2)
        f.write("\n")
