"""Loading and saving JSON instances under a strict schema.

Unknown keys are rejected everywhere; each error names the offending field.
"""
from __future__ import annotations

import json
from typing import Union

from matchforge.errors import InstanceError
from matchforge.matroid import matroid_from_spec, matroid_to_spec
from matchforge.model import NULL, Contract, InstitutionSpec, Preference, Problem, to_mask

TOP_KEYS = {"contracts", "preferences", "institutions"}
CONTRACT_KEYS = {"id", "agent", "institution", "label"}
INSTITUTION_KEYS = {"capacity", "priority", "returning", "types", "traits", "reserves", "matroid", "uniquePairs"}
INSTITUTION_REQUIRED = {"capacity", "priority", "returning"}


def _int(v, where):
    if not isinstance(v, int) or isinstance(v, bool):
        raise InstanceError(where, f"expected an integer, got {v!r}")
    return v


def _keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise InstanceError(where, "expected an object")
    extra = set(obj) - allowed
    if extra:
        raise InstanceError(where, f"unknown keys {sorted(extra)}")
    missing = required - set(obj)
    if missing:
        raise InstanceError(where, f"missing keys {sorted(missing)}")


def _id_list(v, where):
    if not isinstance(v, list):
        raise InstanceError(where, "expected an array of contract ids")
    return [_int(x, where) for x in v]


def problem_from_dict(data: dict) -> Problem:
    _keys(data, TOP_KEYS, TOP_KEYS, "instance")
    raw = data["contracts"]
    if not isinstance(raw, list):
        raise InstanceError("contracts", "expected an array")
    contracts = []
    for k, c in enumerate(raw):
        where = f"contracts[{k}]"
        _keys(c, CONTRACT_KEYS, CONTRACT_KEYS - {"label"}, where)
        for key in ("agent", "institution"):
            if not isinstance(c[key], str):
                raise InstanceError(f"{where}.{key}", "expected a string")
        label = c.get("label")
        if label is not None and not isinstance(label, str):
            raise InstanceError(f"{where}.label", "expected a string")
        contracts.append(Contract(_int(c["id"], f"{where}.id"), c["agent"], c["institution"], label))
    ids = [c.id for c in contracts]
    if len(ids) != len(set(ids)):
        raise InstanceError("contracts.id", "duplicate contract ids")
    contracts.sort(key=lambda c: c.id)
    n = len(contracts)
    if sorted(ids) != list(range(n)):
        raise InstanceError("contracts.id", "ids must be exactly 0..n-1")

    prefs_raw = data["preferences"]
    if not isinstance(prefs_raw, dict):
        raise InstanceError("preferences", "expected an object")
    preferences = {}
    for agent, listing in prefs_raw.items():
        where = f"preferences.{agent}"
        if not isinstance(listing, list):
            raise InstanceError(where, "expected an array")
        prefix = []
        for item in listing:
            if item == "null":
                prefix.append(NULL)
            else:
                x = _int(item, where)
                if not 0 <= x < n or contracts[x].agent != agent:
                    raise InstanceError(where, f"contract {x} does not belong to agent {agent!r}")
                prefix.append(x)
        if prefix.count(NULL) > 1:
            raise InstanceError(where, "null must appear at most once")
        own = [c.id for c in contracts if c.agent == agent]
        preferences[agent] = Preference.from_prefix(agent, prefix, own)

    inst_raw = data["institutions"]
    if not isinstance(inst_raw, dict):
        raise InstanceError("institutions", "expected an object")
    institutions = {}
    for name, spec in inst_raw.items():
        where = f"institutions.{name}"
        _keys(spec, INSTITUTION_KEYS, INSTITUTION_REQUIRED, where)
        capacity = _int(spec["capacity"], f"{where}.capacity")
        priority = tuple(_id_list(spec["priority"], f"{where}.priority"))
        returning = _id_list(spec["returning"], f"{where}.returning")
        if len(returning) != len(set(returning)):
            raise InstanceError(f"{where}.returning", "duplicate contract ids")
        types = spec.get("types", [])
        if not isinstance(types, list) or not all(isinstance(t, str) for t in types):
            raise InstanceError(f"{where}.types", "expected an array of strings")
        traits = {}
        for key, ts in spec.get("traits", {}).items():
            try:
                x = int(key)
            except ValueError:
                raise InstanceError(f"{where}.traits", f"key {key!r} is not a contract id") from None
            if not isinstance(ts, list) or not all(isinstance(t, str) for t in ts):
                raise InstanceError(f"{where}.traits.{key}", "expected an array of type strings")
            traits[x] = frozenset(ts)
        reserves = spec.get("reserves", {})
        if not isinstance(reserves, dict):
            raise InstanceError(f"{where}.reserves", "expected an object")
        unique = spec.get("uniquePairs", False)
        if not isinstance(unique, bool):
            raise InstanceError(f"{where}.uniquePairs", "expected a boolean")
        matroid = None
        if "matroid" in spec:
            ground = to_mask(c.id for c in contracts if c.institution == name)
            matroid = matroid_from_spec(spec["matroid"], ground, f"{where}.matroid")
        institutions[name] = InstitutionSpec(capacity, priority, frozenset(returning), tuple(types),
                                             traits, dict(reserves), matroid, unique)
    return Problem(tuple(contracts), preferences, institutions)


def problem_to_dict(problem: Problem) -> dict:
    contracts = []
    for c in problem.contracts:
        entry = {"id": c.id, "agent": c.agent, "institution": c.institution}
        if c.label is not None:
            entry["label"] = c.label
        contracts.append(entry)
    preferences = {a: ["null" if x is NULL else x for x in p.order] for a, p in problem.preferences.items()}
    institutions = {}
    for name, spec in problem.institutions.items():
        out = {"capacity": spec.capacity, "priority": list(spec.priority), "returning": sorted(spec.returning)}
        if spec.types:
            out["types"] = list(spec.types)
        if spec.traits:
            out["traits"] = {str(x): sorted(ts) for x, ts in sorted(spec.traits.items())}
        if spec.reserves:
            out["reserves"] = dict(spec.reserves)
        if spec.matroid is not None:
            out["matroid"] = matroid_to_spec(spec.matroid)
        if spec.unique_pairs:
            out["uniquePairs"] = True
        institutions[name] = out
    return {"contracts": contracts, "preferences": preferences, "institutions": institutions}


def load_instance(source: Union[bytes, str]) -> Problem:
    """Parse a JSON instance.

    Raises:
        InstanceError: malformed JSON or a schema or model violation.
    """
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise InstanceError("instance", f"invalid JSON: {exc}") from None
    return problem_from_dict(data)


def save_instance(problem: Problem) -> bytes:
    return (json.dumps(problem_to_dict(problem), indent=2) + "\n").encode()


def read_instance(path: str) -> Problem:
    with open(path, "rb") as fh:
        return load_instance(fh.read())
