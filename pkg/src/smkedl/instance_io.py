"""Instance JSON files.

One object per file::

    {"n": int, "budget": number, "costs": [...], "label": str,
     "objective": {"kind": "cut" | "coverage" | "revenue" | "table", ...}}

Kind payloads: ``cut`` -> ``{"edges": [[u, v, w], ...]}``; ``coverage`` ->
``{"item_weights": [...], "covers": [[item ids], ...]}``; ``revenue`` ->
``{"weights": [[...]], "alpha": number}``; ``table`` -> ``{"values": [2^n
numbers in subset-mask order]}``.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

from .objectives import CoverageObjective, CutObjective, RevenueObjective, TableObjective
from .oracle import Instance, InstanceFormatError, InvalidObjectiveError


def instance_to_dict(instance: Instance) -> dict:
    return {"n": instance.n, "budget": instance.budget,
            "costs": [float(c) for c in instance.costs],
            "objective": instance.objective.payload(), "label": instance.label}


def dumps_instance(instance: Instance) -> str:
    """Canonical serialization: sorted keys, compact separators."""
    return json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))


def instance_digest(instance: Instance) -> str:
    return hashlib.sha256(dumps_instance(instance).encode()).hexdigest()


def _number(x, what):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise InstanceFormatError(f"{what} must be a finite number, got {x!r}")
    return float(x)


def _objective_from_payload(n, obj, validate):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InstanceFormatError("objective must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "cut":
            objective = CutObjective(n, obj["edges"])
        elif kind == "coverage":
            objective = CoverageObjective(obj["item_weights"], obj["covers"])
        elif kind == "revenue":
            objective = RevenueObjective(obj["weights"], obj.get("alpha", 0.5))
        elif kind == "table":
            objective = TableObjective(obj["values"], validate=False)
        else:
            raise InstanceFormatError(f"unknown objective kind {kind!r}")
    except KeyError as exc:
        raise InstanceFormatError(f"{kind} objective is missing field {exc}") from exc
    except InstanceFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"bad {kind} payload: {exc}") from exc
    if objective.n != n:
        raise InstanceFormatError(f"objective has {objective.n} elements, header says n={n}")
    if validate and kind == "table":
        # raises InvalidObjectiveError: well-formed data that breaks an invariant
        TableObjective(objective.values, validate=True)
    return objective


def instance_from_dict(data: dict, validate: bool = True) -> Instance:
    """Build an instance; ``validate=False`` defers table submodularity checks."""
    if not isinstance(data, dict):
        raise InstanceFormatError("instance must be a JSON object")
    for key in ("n", "budget", "costs", "objective"):
        if key not in data:
            raise InstanceFormatError(f"missing field {key!r}")
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InstanceFormatError(f"n must be a positive integer, got {n!r}")
    costs = data["costs"]
    if not isinstance(costs, list) or len(costs) != n:
        raise InstanceFormatError(f"costs must be a list of {n} numbers")
    costs = [_number(c, "cost") for c in costs]
    if any(c <= 0 for c in costs):
        raise InstanceFormatError("every cost must be strictly positive")
    budget = _number(data["budget"], "budget")
    objective = _objective_from_payload(n, data["objective"], validate)
    return Instance(objective, costs, budget, str(data.get("label", "")),
                    dict(data.get("metadata", {})))


def loads_instance(text: str, validate: bool = True) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"malformed JSON: {exc}") from exc
    return instance_from_dict(data, validate)


def load_instance(path, validate: bool = True) -> Instance:
    return loads_instance(Path(path).read_text(), validate)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_instance(instance) + "\n")
