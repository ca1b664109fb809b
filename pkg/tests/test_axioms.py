import random

import pytest
from hypothesis import given, strategies as st

from matchforge.axioms import (AXIOM_SETS, MATCHING_AXIOMS, InstitutionData, builtin_axiom, builtin_axioms,
                               direct_axiom, extend, extended_axioms, matching_axiom_library,
                               matroidal_objectives_by_quantifier, satisfies_punctual,
                               verify_extension_equivalence)
from matchforge.choice import ChoiceTable, build_profile, build_rule, combine, responsive
from matchforge.engine import run_da
from matchforge.errors import SpecError
from matchforge.generators import GenConfig, chile_fixture, generate, matroid_fixture, shape_fixture
from matchforge.io import read_instance
from matchforge.kernels import u64_array
from matchforge.model import compress, demand, expand, members, submasks
from matchforge.spaces import enumerate_matchings

CHILE = AXIOM_SETS["chile"] + AXIOM_SETS["responsive"]
MATROID = AXIOM_SETS["matroid"] + AXIOM_SETS["greedy"]


def _data(q=1, priority=(0, 1), ground=0b11):
    return InstitutionData("i", ground, q, priority)


def test_non_wastefulness_membership():
    nw = builtin_axiom("non-wastefulness", _data(q=1))
    assert nw(0b11, 0b01) and nw(0b11, 0b10)
    assert not nw(0b11, 0) and not nw(0b11, 0b11)
    assert nw(0, 0)


def test_no_justified_envy_membership():
    ne = builtin_axiom("no-justified-envy", _data(priority=(1, 0)))
    assert ne(0b11, 0b10) and not ne(0b11, 0b01)
    assert ne(0b11, 0)  # rejecting everyone envies no one


def test_missing_institution_data_is_a_spec_error():
    with pytest.raises(SpecError):
        builtin_axiom("non-wastefulness", InstitutionData("i", 0b11))
    with pytest.raises(SpecError):
        builtin_axiom("feasibility", _data())
    with pytest.raises(ValueError):
        builtin_axiom("kindness", _data())


def test_axiom_sets_expand():
    p = chile_fixture(3)
    names = [a.name for a in builtin_axioms(["chile"], InstitutionData.of(p, "i"))]
    assert names == list(AXIOM_SETS["chile"])


def test_punctual_satisfaction_witness():
    nw = builtin_axiom("non-wastefulness", _data(q=2, ground=0b111))
    report = satisfies_punctual(responsive(1, [0, 1, 2]), nw)
    assert not report and report.witness == {"X": [0, 1], "C(X)": [0]}


def _random_selection(phi, ground, rng):
    """A choice table picking a random allowed set at each X, or None."""
    n = ground.bit_count()
    ids = members(ground)
    values = []
    for local in range(1 << n):
        X = expand(local, ids)
        allowed = [Y for Y in submasks(X) if phi(X, Y)]
        if not allowed:
            return None
        values.append(compress(rng.choice(allowed), ids))
    return ChoiceTable(tuple(ids), u64_array(values)).to_rule("i", "selection")


@given(seed=st.integers(0, 10**6))
def test_combining_selections_preserves_every_builtin_axiom(seed):
    rng = random.Random(seed)
    for p, names in ((chile_fixture(seed, rng.randint(1, 5)), CHILE),
                     (matroid_fixture(seed, rng.randint(1, 5)), MATROID)):
        data = InstitutionData.of(p, "i")
        for name in names:
            phi = builtin_axiom(name, data)
            C1, C2 = _random_selection(phi, data.ground, rng), _random_selection(phi, data.ground, rng)
            if C1 is None:
                continue
            selector = {X for X in submasks(data.ground) if rng.random() < 0.5}
            assert satisfies_punctual(combine(C1, C2, selector), phi)


@given(seed=st.integers(0, 10**6))
def test_matroidal_objectives_matches_its_quantified_form(seed):
    p = matroid_fixture(seed, bounded=False)
    data = InstitutionData.of(p, "i")
    short, literal = builtin_axiom("matroidal-objectives", data), matroidal_objectives_by_quantifier(data)
    for X in submasks(data.ground):
        for Y in submasks(X):
            assert short(X, Y) == literal(X, Y)


@given(seed=st.integers(0, 10**6))
def test_returning_extension_reduces_to_demanded_returning_held(seed):
    p = generate(GenConfig(agents=3, institutions=2), seed)
    for i in p.institutions:
        ext = extend(builtin_axiom("guaranteed-enrollment", InstitutionData.of(p, i)))
        ret = p.institutions[i].returning_mask
        for X in enumerate_matchings(p):
            Xi = X & p.institution_mask(i)
            assert ext.holds(p, X) == (demand(p, X, i) & ret & ~Xi == 0)


@pytest.mark.parametrize("rule", ["responsive", "matroid", "guaranteed-enrollment", "greedy"])
@pytest.mark.parametrize("seed", range(6))
def test_da_outcome_meets_extended_axioms(rule, seed):
    from matchforge.axioms import CHARACTERIZING_SET
    p = shape_fixture(3, 2, seed, rule)
    X = run_da(p, build_profile(p, rule)).matching
    for ax in extended_axioms(p, AXIOM_SETS[CHARACTERIZING_SET[rule]]):
        assert ax.holds(p, X), (ax.name, ax.check(p, X))


def _small_fixtures():
    for seed in range(2):
        for agents, insts in ((2, 2), (3, 2)):
            yield generate(GenConfig(agents=agents, institutions=insts), seed)


@pytest.mark.parametrize("name", MATCHING_AXIOMS[1:])
def test_extension_agrees_with_direct_checker(name):
    report = verify_extension_equivalence(name, _small_fixtures())
    assert report, report.witness
    assert report.details["compared"] > 0


def test_crossed_market_matching_library():
    p = read_instance("fixtures/crossed_market.json")
    outcome = 0b0110  # contracts 1 and 2
    for name in ("individual-rationality", "non-wastefulness", "no-justified-envy"):
        assert direct_axiom(name).holds(p, outcome)
    # b would rather sign with i, which ranks b above a
    assert direct_axiom("no-justified-envy").check(p, 0b1001) == {"institution": "i", "contract": 2, "over": 0}
    # full schools with nobody demanding outside contracts are not wasteful
    assert direct_axiom("non-wastefulness").holds(p, 0b1001)


def test_empty_matching_with_willing_agents_is_wasteful():
    p = read_instance("fixtures/crossed_market.json")
    assert direct_axiom("non-wastefulness").check(p, 0) == {"institution": "i", "contract": 0}


def test_matching_library_names():
    assert [ax.name for ax in matching_axiom_library()] == list(MATCHING_AXIOMS)
    assert all(ax.title for ax in matching_axiom_library())


def test_demand_at_e4_is_frozen():
    p = read_instance("fixtures/crossed_market.json")
    assert members(demand(p, 0b0110, "i")) == [0, 2]
