"""Frame and event files for the multi-agent CLI commands.

A frame file describes a closed-mode shared frame explicitly:

    {
      "predicates": [0, 1],
      "partitions": {"1": [["00", "01"], ["10", "11"]],
                     "2": [["00", "10"], ["01", "11"]]},
      "ground": ["00", "01", "10", "11"]        // optional, defaults to all
    }

States are bitstrings over the sorted predicate list.  An event file holds
either {"formula": "p0"} or {"states": ["00", "11"]}.
"""

from __future__ import annotations

import json
from itertools import product

from .epistemics import partition_from_classes
from .harness import SchemaError
from .multiagent import SharedFrame, frame_from_partitions
from .universe import State


def state_from_bits(bits: str, predicates) -> State:
    preds = sorted(predicates)
    if len(bits) != len(preds) or any(b not in "01" for b in bits):
        raise SchemaError("state", f"expected {len(preds)} bits, got {bits!r}")
    return State(
        frozenset(preds), frozenset(p for p, b in zip(preds, bits) if b == "1")
    )


def full_cube(predicates) -> frozenset[State]:
    preds = sorted(predicates)
    return frozenset(
        State(frozenset(preds), frozenset(p for p, v in zip(preds, vals) if v))
        for vals in product((False, True), repeat=len(preds))
    )


def load_frame(path) -> SharedFrame:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}")
    if not isinstance(data, dict):
        raise SchemaError("$", "frame must be an object")
    predicates = data.get("predicates")
    if not isinstance(predicates, list) or not all(isinstance(p, int) for p in predicates):
        raise SchemaError("predicates", "must be a list of predicate indices")
    raw_partitions = data.get("partitions")
    if not isinstance(raw_partitions, dict) or not raw_partitions:
        raise SchemaError("partitions", "must map agent ids to class lists")
    if "ground" in data:
        ground = frozenset(
            state_from_bits(b, predicates) for b in data["ground"]
        )
    else:
        ground = full_cube(predicates)
    partitions = {}
    for key, classes in raw_partitions.items():
        try:
            agent = int(key)
        except ValueError:
            raise SchemaError(f"partitions.{key}", "agent id must be an integer")
        if not isinstance(classes, list):
            raise SchemaError(f"partitions.{key}", "must be a list of state lists")
        built = [
            frozenset(state_from_bits(b, predicates) for b in cls) for cls in classes
        ]
        try:
            partitions[agent] = partition_from_classes(ground, built)
        except ValueError as exc:
            raise SchemaError(f"partitions.{key}", str(exc))
    return frame_from_partitions(predicates, ground, partitions)


def load_event(path, frame: SharedFrame) -> frozenset[State]:
    from .formula import parse
    from .multiagent import _event_of_formula

    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}")
    if isinstance(data, dict) and "states" in data:
        return frozenset(
            state_from_bits(b, frame.shared_predicates) for b in data["states"]
        )
    if isinstance(data, dict) and "formula" in data:
        return _event_of_formula(frame, parse(data["formula"]))
    raise SchemaError("$", "event must carry 'states' or 'formula'")
