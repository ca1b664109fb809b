import json

import pytest
from hypothesis import given, strategies as st

from matchforge.errors import InstanceError
from matchforge.generators import GenConfig, chile_fixture, generate, matroid_fixture
from matchforge.io import load_instance, save_instance

MINIMAL = {
    "contracts": [{"id": 0, "agent": "a", "institution": "i"}],
    "preferences": {"a": [0, "null"]},
    "institutions": {"i": {"capacity": 1, "priority": [0], "returning": []}},
}


def _load(data):
    return load_instance(json.dumps(data))


def test_minimal_instance_round_trips():
    p = _load(MINIMAL)
    assert load_instance(save_instance(p)) == p


def test_acceptable_prefix_shorthand_is_completed():
    data = json.loads(json.dumps(MINIMAL))
    data["contracts"].append({"id": 1, "agent": "a", "institution": "i", "label": "alt"})
    data["institutions"]["i"]["priority"] = [1, 0]
    data["preferences"]["a"] = [1]
    p = _load(data)
    assert p.preferences["a"].order == (1, None, 0)


def test_two_returning_over_unit_capacity_is_rejected():
    data = json.loads(json.dumps(MINIMAL))
    data["contracts"].append({"id": 1, "agent": "b", "institution": "i"})
    data["preferences"]["b"] = [1]
    data["institutions"]["i"].update(priority=[0, 1], returning=[0, 1])
    with pytest.raises(InstanceError) as info:
        _load(data)
    assert info.value.field == "institutions.i.returning"


@pytest.mark.parametrize("mutate,field", [
    (lambda d: d.update(extra=1), "instance"),
    (lambda d: d["contracts"][0].update(colour="red"), "contracts[0]"),
    (lambda d: d["institutions"]["i"].update(quota=3), "institutions.i"),
    (lambda d: d["contracts"].append({"id": 0, "agent": "b", "institution": "i"}), "contracts.id"),
    (lambda d: d["institutions"]["i"].update(priority=[0, 0]), "institutions.i.priority"),
    (lambda d: d["institutions"]["i"].update(reserves={"D": -2}), "institutions.i.reserves"),
    (lambda d: d["institutions"]["i"].pop("returning"), "institutions.i"),
    (lambda d: d["institutions"]["i"].update(matroid={"kind": "uniform", "q": 1, "z": 0}), "institutions.i.matroid"),
    (lambda d: d["institutions"]["i"].update(matroid={"kind": "explicit", "independent": [[0]]}),
     "matroid.independent"),
    (lambda d: d["preferences"].update(a=[3]), "preferences.a"),
])
def test_schema_violations_name_the_field(mutate, field):
    data = json.loads(json.dumps(MINIMAL))
    mutate(data)
    with pytest.raises(InstanceError) as info:
        _load(data)
    assert info.value.field == field


def test_invalid_json():
    with pytest.raises(InstanceError):
        load_instance(b"{not json")


@given(seed=st.integers(0, 10**6), agents=st.integers(0, 3), insts=st.integers(1, 3),
       per_pair=st.integers(1, 2))
def test_generated_instances_round_trip(seed, agents, insts, per_pair):
    p = generate(GenConfig(agents=agents, institutions=insts, contracts_per_pair=per_pair), seed)
    assert load_instance(save_instance(p)) == p


@given(seed=st.integers(0, 10**6))
def test_fixtures_with_matroids_round_trip(seed):
    for p in (chile_fixture(seed), matroid_fixture(seed)):
        assert load_instance(save_instance(p)) == p
