"""JSON instance, plan, scenario and report files.

Infinite bounds are written as ``null``.  Instance files look like::

    {"schema_version": 1, "T": 3,
     "costs": {"c_p": 0, "c_i": 1, "c_b": 2, "b_p": 0},
     "d_hat": [3, 4, 5], "delta": [3, 2, 1],
     "budget": {"kind": "continuous", "value": 4},
     "feasible": {"u": [10, 10, 10]}}
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .core import Continuous, CostParams, Discrete, FeasibleSet, Instance, ProductionPlan, Scenario
from .errors import FormatError

SCHEMA_VERSION = 1
_COSTS = ("c_p", "c_i", "c_b", "b_p")
_BOUNDS = ("l", "u", "L", "U")


def jsonable(obj):
    """Recursively convert numpy values and infinities to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2, sort_keys=False, allow_nan=False)


def instance_to_dict(instance):
    fs = instance.feasible
    return jsonable({
        "schema_version": SCHEMA_VERSION,
        "T": instance.T,
        "costs": {k: getattr(instance.costs, k) for k in _COSTS},
        "d_hat": instance.d_hat,
        "delta": instance.delta,
        "budget": {"kind": instance.budget.kind, "value": instance.budget.value},
        "feasible": {"l": fs.l, "u": fs.u, "L": fs.L, "U": fs.U},
    })


def _number(v, where, allow_null=False):
    if v is None and allow_null:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise FormatError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _array(d, key, T, where, allow_null=False):
    v = d.get(key)
    if not isinstance(v, list) or len(v) != T:
        raise FormatError(f"{where}.{key}: expected a list of length {T}")
    return [_number(e, f"{where}.{key}[{i}]", allow_null) for i, e in enumerate(v)]


def instance_from_dict(d):
    if not isinstance(d, dict):
        raise FormatError("instance file must hold a JSON object")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema_version {version!r}")
    T = d.get("T")
    if isinstance(T, bool) or not isinstance(T, int) or T < 1:
        raise FormatError("T must be a positive integer")
    costs = d.get("costs", {})
    if not isinstance(costs, dict) or set(costs) - set(_COSTS):
        raise FormatError(f"costs must be an object with keys among {_COSTS}")
    costs = CostParams(**{k: _number(costs.get(k, 0.0), f"costs.{k}") for k in _COSTS})
    d_hat = _array(d, "d_hat", T, "instance")
    delta = _array(d, "delta", T, "instance")
    b = d.get("budget")
    if not isinstance(b, dict) or b.get("kind") not in ("discrete", "continuous"):
        raise FormatError('budget must be {"kind": "discrete"|"continuous", "value": number}')
    value = _number(b.get("value"), "budget.value")
    if b["kind"] == "discrete":
        if value != int(value):
            raise FormatError("discrete budget must be an integer")
        budget = Discrete(int(value))
    else:
        budget = Continuous(value)
    feas = d.get("feasible", {}) or {}
    if not isinstance(feas, dict) or set(feas) - set(_BOUNDS):
        raise FormatError(f"feasible must be an object with keys among {_BOUNDS}")
    bounds = {k: _array(feas, k, T, "feasible", allow_null=True) for k in _BOUNDS if feas.get(k) is not None}
    for k in ("l", "L"):
        if k in bounds:
            bounds[k] = [0.0 if v is None else v for v in bounds[k]]
    return Instance(T, costs, FeasibleSet.box(T, **bounds), d_hat, delta, budget)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def load_instance(path):
    return instance_from_dict(_read_json(path))


def save_instance(instance, path):
    Path(path).write_text(dumps(instance_to_dict(instance)) + "\n", encoding="utf-8")


def instance_digest(instance):
    """SHA-256 of the canonical JSON encoding."""
    blob = json.dumps(instance_to_dict(instance), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def plan_from_dict(d):
    """Accepts ``{"x": [...]}`` (per period) or ``{"X": [...]}`` (cumulative)."""
    if isinstance(d, dict) and isinstance(d.get("result"), dict) and "plan" in d["result"]:
        d = d["result"]["plan"]  # a minmax report
    if isinstance(d, dict) and "x" in d:
        return ProductionPlan([_number(v, "x") for v in d["x"]])
    if isinstance(d, dict) and "X" in d:
        return ProductionPlan.from_cumulative([_number(v, "X") for v in d["X"]])
    raise FormatError('plan file must hold {"x": [...]} or {"X": [...]}')


def load_plan(path):
    return plan_from_dict(_read_json(path))


def save_plan(plan, path):
    Path(path).write_text(dumps({"x": plan.x, "X": plan.X}) + "\n", encoding="utf-8")


def load_scenario(path):
    d = _read_json(path)
    if not isinstance(d, dict) or not isinstance(d.get("D"), list):
        raise FormatError('scenario file must hold {"D": [...]}')
    return Scenario([_number(v, "D") for v in d["D"]])


def plan_dict(plan):
    return {"x": plan.x, "X": plan.X}
