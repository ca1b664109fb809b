import pytest
from hypothesis import given, strategies as st

import oracles
from matchforge.choice import ChoiceFunction, build_profile, check_path_independence, responsive
from matchforge.engine import (ProfileSpace, check_individual_rationality, check_strategy_proofness,
                               cumulative_offers_check, da_rule, enumerate_stable, immediate_acceptance,
                               is_stable, run_da)
from matchforge.errors import ContractViolation, GuardError
from matchforge.generators import GenConfig, generate, shape_fixture
from matchforge.io import read_instance
from matchforge.model import NULL, Contract, InstitutionSpec, Preference, Problem, members

RULES = ("responsive", "matroid", "guaranteed-enrollment", "greedy")


def crossed():
    p = read_instance("fixtures/crossed_market.json")
    return p, build_profile(p, "responsive")


def brute_force_stable(p):
    """Stable matchings under responsive rules, computed without the library."""
    contracts = {c.id: (c.agent, c.institution) for c in p.contracts}
    prefs = {a: [x for x in p.preferences[a].order[:p.preferences[a].order.index(NULL)]] for a in p.agents}

    def choose(i, S):
        spec = p.institutions[i]
        return frozenset(sorted(S, key=spec.priority.index)[:spec.capacity])

    return sorted(sorted(X) for X in oracles.stable_matchings(list(p.agents), contracts, prefs, choose))


def test_crossed_market_deferred_acceptance():
    p, choices = crossed()
    trace = run_da(p, choices)
    assert members(trace.matching) == [1, 2]
    assert len(trace.steps) == 2
    assert brute_force_stable(p) == [[1, 2]]
    assert [members(X) for X in enumerate_stable(p, choices)] == [[1, 2]]


def test_crossed_market_trace_json():
    p, choices = crossed()
    doc = run_da(p, choices).to_json()
    first = doc["steps"][0]
    assert first == {"step": 1, "proposals": [0, 2],
                     "perInstitution": {"i": {"considered": [0, 2], "accepted": [2], "rejected": [0]},
                                        "j": {"considered": [], "accepted": [], "rejected": []}}}
    assert doc["steps"][1]["proposals"] == [1]
    assert doc["matching"] == [1, 2]


def test_nobody_acceptable_gives_empty_matching_in_one_step():
    p, choices = crossed()
    prefs = {a: Preference(a, (NULL,) + tuple(x for x in pr.order if x is not NULL)) for a, pr in p.preferences.items()}
    q = Problem(p.contracts, prefs, p.institutions)
    trace = run_da(q, choices)
    assert trace.matching == 0 and len(trace.steps) == 1


def test_single_agent_gets_their_contract():
    p = Problem((Contract(0, "a", "i"),), {"a": Preference("a", (0, NULL))},
                {"i": InstitutionSpec(1, (0,))})
    choices = build_profile(p, "responsive")
    assert run_da(p, choices).matching == 1
    assert check_strategy_proofness(da_rule(choices), p)


def test_contract_violation_carries_the_step():
    p, choices = crossed()
    rogue = dict(choices)
    # j misbehaves once a's contract reaches it, at step 2
    rogue["j"] = ChoiceFunction("j", 0b1010, lambda X: X | 0b1000 if X & 0b0010 else X, "rogue")
    with pytest.raises(ContractViolation) as info:
        run_da(p, rogue)
    assert info.value.step == 2


def test_crossed_market_stability_witnesses():
    p, choices = crossed()
    assert is_stable(p, 0b0110, choices)
    blocked = is_stable(p, 0b1001, choices)
    assert not blocked
    assert blocked.witness == {"clause": "blocking-contract", "institution": "i", "agent": "b", "contract": 2}
    empty = is_stable(p, 0, choices)
    assert not empty and empty.witness["clause"] == "blocking-contract"


def test_stability_clauses():
    p, choices = crossed()
    two_at_i = is_stable(p, 0b0101, choices)
    assert two_at_i.witness["clause"] == "institution-rationality"
    prefs = dict(p.preferences)
    prefs["a"] = Preference("a", (NULL, 0, 1))
    q = Problem(p.contracts, prefs, p.institutions)
    assert is_stable(q, 0b0110, choices).witness == {"clause": "individual-rationality", "agent": "a", "contract": 1}


def test_empty_market_has_only_the_empty_stable_matching():
    p = read_instance("fixtures/empty.json")
    assert enumerate_stable(p, {}) == [0]
    assert run_da(p, {}).matching == 0


@given(seed=st.integers(0, 10**6), agents=st.integers(1, 4), insts=st.integers(1, 3))
def test_da_matches_brute_force_stable_matchings(seed, agents, insts):
    p = generate(GenConfig(agents=agents, institutions=insts, returning=False, reserves=False), seed)
    choices = build_profile(p, "responsive")
    outcome = run_da(p, choices).matching
    stable = brute_force_stable(p)
    assert members(outcome) in stable
    assert [members(X) for X in enumerate_stable(p, choices)] == stable


@given(seed=st.integers(0, 10**6), rule=st.sampled_from(RULES), labels=st.integers(1, 2))
def test_da_is_stable_terminates_and_matches_cumulative_offers(seed, rule, labels):
    p = generate(GenConfig(agents=3, institutions=2, contracts_per_pair=labels), seed)
    choices = build_profile(p, rule)
    assert all(check_path_independence(C) for C in choices.values())
    trace = run_da(p, choices)
    assert len(trace.steps) <= len(p.contracts) + 1
    proposed = [x for s in trace.steps for x in s.proposals]
    assert len(proposed) == len(set(proposed))
    assert is_stable(p, trace.matching, choices)
    assert cumulative_offers_check(p, choices, trace)


def test_da_is_strategy_proof_on_two_by_two():
    for seed in range(3):
        p = shape_fixture(2, 2, seed)
        report = check_strategy_proofness(da_rule(build_profile(p, "responsive")), p)
        assert report and report.details["deviations"] > 0


def _confirm_witness(p, rule, w):
    """Re-run the rule on the witness profiles and compare the agent's outcomes."""
    space = ProfileSpace(p)
    orders = {a: tuple(NULL if x == "null" else x for x in order) for a, order in w["profile"].items()}
    truth = Problem(p.contracts, {a: Preference(a, o) for a, o in orders.items()}, p.institutions)
    lie = dict(orders)
    lie[w["agent"]] = tuple(NULL if x == "null" else x for x in w["deviation"])
    lied = Problem(p.contracts, {a: Preference(a, o) for a, o in lie.items()}, p.institutions)
    got, could = truth.assignment(rule(truth), w["agent"]), truth.assignment(rule(lied), w["agent"])
    assert truth.preferences[w["agent"]].prefers(could, got)
    assert len(space) > 0


@pytest.mark.parametrize("config, seed", [
    (GenConfig(agents=2, institutions=2, contracts_per_pair=2, returning=False, reserves=False), 0),
    (GenConfig(agents=3, institutions=2, returning=False, reserves=False), 4),
])
def test_immediate_acceptance_is_manipulable(config, seed):
    p = generate(config, seed)
    rule = immediate_acceptance()
    report = check_strategy_proofness(rule, p)
    assert not report
    _confirm_witness(p, rule, report.witness)
    assert check_individual_rationality(rule, p)


def test_profile_guard():
    p = generate(GenConfig(agents=5, institutions=3), 0)
    with pytest.raises(GuardError):
        ProfileSpace(p)
    with pytest.raises(GuardError):
        check_strategy_proofness(da_rule(build_profile(p, "responsive")), p, limit=100)


def test_focused_check_sees_the_same_witness_as_the_full_check():
    p = generate(GenConfig(agents=3, institutions=2, returning=False, reserves=False), 4)
    full = check_strategy_proofness(immediate_acceptance(), p)
    space = ProfileSpace(p)
    idx = tuple(space.orders[k].index(Preference(a, tuple(NULL if x == "null" else x for x in full.witness["profile"][a])))
                for k, a in enumerate(space.agents))
    focused = check_strategy_proofness(immediate_acceptance(), p, focus=[idx])
    assert not focused
    _confirm_witness(p, immediate_acceptance(), focused.witness)
    # every focused deviation starts or ends at the focus profile
    assert full.witness["profile"] in (focused.witness["profile"], _with(focused.witness))


def _with(w):
    lied = dict(w["profile"])
    lied[w["agent"]] = w["deviation"]
    return lied
