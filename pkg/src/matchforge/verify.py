"""Exhaustive verifiers built from the choice, axiom and engine layers."""
from __future__ import annotations

import itertools
import random
from typing import Iterable, Mapping, Optional, Sequence

from matchforge.axioms import (AXIOM_SETS, CHARACTERIZING_SET, InstitutionData, MatchingAxiom,
                               PunctualAxiom, builtin_axioms, extend, extended_axioms,
                               individual_rationality, satisfies_punctual)
from matchforge.choice import (ChoiceFunction, ChoiceTable, build_profile, build_rule, check_path_independence,
                               check_size_monotonicity, nonwasteful_matroid)
from matchforge.matroid import TransversalMatroid, minor, truncate
from matchforge.engine import (ProfileSpace, RuleUnderTest, check_individual_rationality,
                               check_strategy_proofness, da_rule, enumerate_stable, is_stable, run_da,
                               profile_key)
from matchforge.guards import MAX_PROFILES, max_ground, require
from matchforge.kernels import u64_array
from matchforge.model import Contract, InstitutionSpec, Preference, Problem, members, submasks
from matchforge.reports import Report
from matchforge.spaces import enumerate_matchings

# cheap predicates first so most candidates are rejected before any rank query
_COST = {"non-wastefulness": 0, "guaranteed-enrollment": 1, "no-justified-envy": 2, "feasibility": 3}


def verify_characterization(axioms: Sequence[PunctualAxiom], target: ChoiceFunction, guard: int = None) -> Report:
    """Check that at every X the axioms allow exactly one choice, namely target(X).

    Statuses: ``characterized``; ``not-unique`` (two allowed choices at X);
    ``incompatible`` (nothing allowed at X); ``mismatch`` (one allowed choice,
    but not target(X)).
    """
    require(target.ground.bit_count(), max_ground() if guard is None else guard, "characterization check")
    ordered = sorted(axioms, key=lambda a: _COST.get(a.name, 9))
    names = [a.name for a in axioms]
    for X in submasks(target.ground):
        allowed = []
        for Y in submasks(X):
            if all(a.member(X, Y) for a in ordered):
                allowed.append(Y)
                if len(allowed) > 1:
                    break
        if not allowed:
            return Report("characterization", False, {"X": members(X)}, "incompatible", {"axioms": names})
        if len(allowed) > 1:
            return Report("characterization", False,
                          {"X": members(X), "choices": [members(Y) for Y in allowed]}, "not-unique", {"axioms": names})
        if allowed[0] != target(X):
            return Report("characterization", False,
                          {"X": members(X), "allowed": members(allowed[0]), "target": members(target(X))},
                          "mismatch", {"axioms": names})
    return Report("characterization", True, status="characterized", details={"axioms": names, "target": target.name})


def characterization_for(problem: Problem, institution: str, rule: str, guard: int = None) -> Report:
    """The rule's characterizing axiom set versus the rule, at one institution."""
    data = InstitutionData.of(problem, institution)
    axioms = builtin_axioms(AXIOM_SETS[CHARACTERIZING_SET[rule]], data)
    return verify_characterization(axioms, build_rule(problem, institution, rule), guard)


def _extended(problem: Problem, rule: str) -> list[MatchingAxiom]:
    return extended_axioms(problem, AXIOM_SETS[CHARACTERIZING_SET[rule]])


def verify_lemma_chain(problem: Problem, rule: str, *, limit: int = MAX_PROFILES) -> Report:
    """Over every profile of the shape: (a) any matching meeting individual
    rationality and every extended axiom is stable; (b) the DA outcome meets
    individual rationality and every extended axiom."""
    choices = build_profile(problem, rule)
    axioms = _extended(problem, rule)
    space = ProfileSpace(problem, limit)
    matchings = enumerate_matchings(problem)
    counted = 0
    for idx in space.indices():
        p = space.problem_at(idx)
        outcome = run_da(p, choices).matching
        for X in matchings:
            if individual_rationality(p, X) is not None:
                continue
            failed = next((ax for ax in axioms if not ax.holds(p, X)), None)
            if failed is None:
                counted += 1
                report = is_stable(p, X, choices)
                if not report:
                    return Report("lemma-chain", False, {"part": "axioms-imply-stability", "profile": space.describe(idx),
                                                         "matching": members(X), "stability": report.witness})
            elif X == outcome:
                return Report("lemma-chain", False, {"part": "da-meets-axioms", "profile": space.describe(idx),
                                                     "matching": members(X), "axiom": failed.name,
                                                     "institution": failed.institution})
        if individual_rationality(p, outcome) is not None:
            return Report("lemma-chain", False, {"part": "da-meets-axioms", "profile": space.describe(idx),
                                                 "matching": members(outcome), "axiom": "individual-rationality"})
    return Report("lemma-chain", True, details={"profiles": len(space), "axiom-satisfying-matchings": counted})


def verify_da_properties(problem: Problem, rule: str, *, limit: int = MAX_PROFILES) -> Report:
    """Check DA based on the rule against every profile of the shape.

    Each outcome must be individually rational and stable and must meet the
    extended axioms of the characterizing set. DA must also be strategy-proof.
    """
    choices = build_profile(problem, rule)
    axioms = _extended(problem, rule)
    space = ProfileSpace(problem, limit)
    for idx in space.indices():
        p = space.problem_at(idx)
        X = run_da(p, choices).matching
        hit = individual_rationality(p, X)
        if hit is not None:
            return Report("da-properties", False, {"profile": space.describe(idx), "axiom": "individual-rationality", **hit})
        for ax in axioms:
            hit = ax.check(p, X)
            if hit is not None:
                return Report("da-properties", False, {"profile": space.describe(idx), "axiom": ax.name, **hit})
        stable = is_stable(p, X, choices)
        if not stable:
            return Report("da-properties", False, {"profile": space.describe(idx), "axiom": "stability", **stable.witness})
    sp = check_strategy_proofness(da_rule(choices), problem, limit=limit)
    if not sp:
        return Report("da-properties", False, {"axiom": "strategy-proofness", **sp.witness})
    return Report("da-properties", True, details={"profiles": len(space), "deviations": sp.details["deviations"]})


# -- stable selectors ----------------------------------------------------------

def stable_choice_points(problem: Problem, choices: Mapping[str, ChoiceFunction], limit: int = MAX_PROFILES):
    """Per profile index: the DA outcome and the stable matchings other than it.

    Also returns the profile indices where the DA outcome is not stable.
    """
    space = ProfileSpace(problem, limit)
    da_out, alternatives, unstable = {}, {}, []
    for idx in space.indices():
        p = space.problem_at(idx)
        X = run_da(p, choices).matching
        da_out[idx] = X
        stable = enumerate_stable(p, choices)
        if X not in stable:
            unstable.append(idx)
        others = [Y for Y in stable if Y != X]
        if others:
            alternatives[idx] = others
    return space, da_out, alternatives, unstable


def sample_stable_selectors(problem: Problem, choices: Mapping[str, ChoiceFunction], count: int,
                            rng: random.Random, *, max_changes: int = 3, limit: int = MAX_PROFILES):
    """Distinct stable-selector rules that differ from DA somewhere.

    Each rule returns a stable matching at every profile: the DA outcome,
    except at 1..``max_changes`` randomly drawn profiles where it returns
    another stable matching. Yields ``(rule, changed)`` with ``changed`` the
    profile indices where the rule departs from DA.
    """
    space, da_out, alternatives, _ = stable_choice_points(problem, choices, limit)
    points = sorted(alternatives)
    if not points:
        return
    index = {_key(space, idx): idx for idx in space.indices()}
    seen = set()
    attempts = 0
    while len(seen) < count and attempts < 100 * count:
        attempts += 1
        k = rng.randint(1, min(max_changes, len(points)))
        picks = {idx: rng.choice(alternatives[idx]) for idx in rng.sample(points, k)}
        key = tuple(sorted(picks.items()))
        if key in seen:
            continue
        seen.add(key)

        def evaluate(p, picks=picks):
            idx = index[profile_key(p)]
            return picks.get(idx, da_out[idx])

        yield RuleUnderTest(f"stable-selector-{len(seen)}", evaluate), sorted(picks)


def stable_selector_report(problem: Problem, choices: Mapping[str, ChoiceFunction], count: int,
                           seed: int, limit: int = MAX_PROFILES) -> Report:
    """Sample non-DA stable selectors; each must fail strategy-proofness.

    The search only examines deviations into or out of the changed profiles.
    Elsewhere the selector agrees with DA, which is strategy-proof, so no
    witness can lie between two unchanged profiles.
    """
    space, _, _, unstable = stable_choice_points(problem, choices, limit)
    if unstable:
        return Report("stable-selectors", False, {"da-unstable-at": space.describe(unstable[0])})
    sampled = 0
    for rule, changed in sample_stable_selectors(problem, choices, count, random.Random(seed), limit=limit):
        sampled += 1
        report = check_strategy_proofness(rule, problem, limit=limit, focus=changed)
        if report:
            return Report("stable-selectors", False, {"selector": rule.name, "changed": [list(c) for c in changed]},
                          details={"sampled": sampled})
    return Report("stable-selectors", True, details={"sampled": sampled})


def _key(space, idx):
    return tuple(space.orders[k][j].order for k, j in enumerate(idx))


# -- the two-contract regression ------------------------------------------------

def _two_contract_problem(a_accepts: bool = True, b_accepts: bool = True) -> Problem:
    contracts = (Contract(0, "a", "i"), Contract(1, "b", "i"))
    prefs = {"a": Preference("a", (0, None) if a_accepts else (None, 0)),
             "b": Preference("b", (1, None) if b_accepts else (None, 1))}
    return Problem(contracts, prefs, {"i": InstitutionSpec(capacity=1, priority=(0, 1))})


def two_contract_regression() -> Report:
    """Five checks on a two-contract instance where a punctual axiom plus path
    independence and size monotonicity pin down a rule, yet a non-DA matching
    rule meets individual rationality, strategy-proofness and the extension.

    Contract 0 is x (agent a), contract 1 is y (agent b), both at institution i.
    """
    x, y = 1, 2
    allowed = {0: {0}, x: {x, 0}, y: {0}, x | y: {x}}
    phi = PunctualAxiom("two-contract-axiom", "i", lambda X, Y: Y in allowed[X])
    C = ChoiceTable((0, 1), _table({0: 0, x: x, y: 0, x | y: x})).to_rule("i", "C")
    results = {}

    results["rule-satisfies-axiom"] = bool(satisfies_punctual(C, phi))

    multi = [X for X in allowed if len(allowed[X]) > 1]
    results["axiom-not-characterizing"] = multi == [x]

    passing = []
    for combo in itertools.product(*(sorted(allowed[X]) for X in range(4))):
        rule = ChoiceTable((0, 1), _table(dict(enumerate(combo)))).to_rule("i", "selection")
        if check_path_independence(rule) and check_size_monotonicity(rule):
            passing.append(combo)
    results["unique-pi-sm-selection"] = passing == [(0, x, 0, x)]

    def phi_rule(p):
        both = p.preferences["a"].acceptable(0) and p.preferences["b"].acceptable(1)
        return x if both else 0

    rule = RuleUnderTest("two-contract-rule", phi_rule)
    base = _two_contract_problem()
    ext = extend(phi)
    ext_ok = all(ext.holds(p, phi_rule(p)) for p in
                 (_two_contract_problem(s, t) for s in (True, False) for t in (True, False)))
    results["rule-ir-sp-extension"] = bool(check_individual_rationality(rule, base)) and \
        bool(check_strategy_proofness(rule, base)) and ext_ok

    cited = _two_contract_problem(True, False)
    da_out = run_da(cited, {"i": C}).matching
    results["differs-from-da"] = cited.assignment(da_out, "a") == 0 and cited.assignment(phi_rule(cited), "a") is None

    ok = all(results.values())
    failed = [k for k, v in results.items() if not v]
    return Report("two-contract-regression", ok, None if ok else {"failed": failed}, details={"checks": results})


def _table(mapping):
    return u64_array(mapping[k] for k in range(len(mapping)))


# -- the returning-students decomposition ------------------------------------------

def ge_decomposition(problem: Problem, institution: str, seats: str = "rank"):
    """Guaranteed enrollment rebuilt as X^ge plus a non-wasteful matroid rule on
    the minor by X^ge.

    ``seats="rank"`` truncates at capacity ``q - r(X^ge)``; ``seats="free"``
    uses the physically free seats ``q - |X^ge|``.
    """
    if seats not in ("rank", "free"):
        raise ValueError("seats must be 'rank' or 'free'")
    spec = problem.institutions[institution]
    C = build_rule(problem, institution, "guaranteed-enrollment")
    m = spec.oracle(C.ground) or TransversalMatroid(C.ground, {}, {})
    ret = spec.returning_mask

    def choose(X):
        fixed = X & ret
        cap = spec.capacity - (m.rank(fixed) if seats == "rank" else fixed.bit_count())
        inner = nonwasteful_matroid(truncate(minor(m, fixed), cap), cap, spec.priority, institution)
        return fixed | inner(X & ~ret)

    return ChoiceFunction(institution, C.ground, choose, "ge-decomposition")


def ge_decomposition_report(problem: Problem, institution: str, guard: int = None, seats: str = "rank") -> Report:
    """Compare the step-by-step rule with its decomposition at every X.

    Disagreements are reported, never raised: the decomposition's capacity
    constant ``q - r(X^ge)`` can exceed the free seats ``q - |X^ge|``.
    """
    C = build_rule(problem, institution, "guaranteed-enrollment")
    require(C.ground.bit_count(), max_ground() if guard is None else guard, "decomposition comparison")
    D = ge_decomposition(problem, institution, seats)
    diffs = [X for X in submasks(C.ground) if C(X) != D(X)]
    first = None
    if diffs:
        X = diffs[0]
        first = {"X": members(X), "rule": members(C(X)), "decomposition": members(D(X))}
    return Report("ge-decomposition", not diffs, first,
                  details={"seats": seats, "subsets": 1 << C.ground.bit_count(), "disagreements": len(diffs)})
