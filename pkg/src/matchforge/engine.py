"""Deferred acceptance plus exhaustive stability and incentive checks."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from matchforge.choice import ChoiceFunction
from matchforge.errors import ContractViolation
from matchforge.guards import MAX_MATCHINGS, MAX_PROFILES, require
from matchforge.model import NULL, Problem, members
from matchforge.reports import Report
from matchforge.spaces import agent_orders, enumerate_matchings, fast_with_preferences, profile_count


@dataclass(frozen=True)
class StepRecord:
    step: int
    proposals: tuple
    considered: Mapping[str, int]
    accepted: Mapping[str, int]

    @property
    def rejected(self) -> dict:
        return {i: self.considered[i] & ~self.accepted[i] for i in self.considered}

    def to_dict(self) -> dict:
        rejected = self.rejected
        return {
            "step": self.step,
            "proposals": list(self.proposals),
            "perInstitution": {
                i: {"considered": members(self.considered[i]),
                    "accepted": members(self.accepted[i]),
                    "rejected": members(rejected[i])}
                for i in self.considered
            },
        }


@dataclass(frozen=True)
class DATrace:
    steps: tuple
    matching: int

    def to_json(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps], "matching": members(self.matching)}


def run_da(problem: Problem, choices: Mapping[str, ChoiceFunction]) -> DATrace:
    """Agent-proposing deferred acceptance with simultaneous rounds.

    Each step, every agent whose contract was just rejected (all agents at step
    1) proposes their next acceptable contract. Each institution applies its
    rule to the contracts it holds plus this step's proposals.

    Raises:
        ContractViolation: a rule chose outside the set it was offered.
    """
    lists = {a: problem.preferences[a].acceptable_list() for a in problem.agents}
    cursor = dict.fromkeys(problem.agents, 0)
    held = dict.fromkeys(problem.institutions, 0)
    movers = list(problem.agents)
    steps = []
    limit = len(problem.contracts) + 1
    for s in itertools.count(1):
        if s > limit:
            raise ContractViolation(f"deferred acceptance did not stop within {limit} steps", s)
        proposals = []
        offered = dict.fromkeys(problem.institutions, 0)
        for a in movers:
            k = cursor[a]
            if k < len(lists[a]):
                x = lists[a][k]
                cursor[a] = k + 1
                proposals.append(x)
                offered[problem.contracts[x].institution] |= 1 << x
        considered = {i: held[i] | offered[i] for i in problem.institutions}
        accepted = {}
        movers = []
        for i, X in considered.items():
            try:
                Y = choices[i](X)
            except ContractViolation as err:
                raise ContractViolation(str(err), s) from None
            accepted[i] = Y
            for x in members(X & ~Y):
                movers.append(problem.contracts[x].agent)
        steps.append(StepRecord(s, tuple(sorted(proposals)), considered, accepted))
        held = accepted
        if not movers:
            break
        # keep agent order stable across steps
        moving = set(movers)
        movers = [a for a in problem.agents if a in moving]
    matching = 0
    for Y in held.values():
        matching |= Y
    return DATrace(tuple(steps), matching)


def da(problem: Problem, choices: Mapping[str, ChoiceFunction]) -> int:
    return run_da(problem, choices).matching


def cumulative_offers_check(problem: Problem, choices: Mapping[str, ChoiceFunction], trace: DATrace) -> bool:
    """Each rule, fed every contract ever proposed to it, picks the DA outcome."""
    pool = dict.fromkeys(problem.institutions, 0)
    for step in trace.steps:
        for i, X in step.considered.items():
            pool[i] |= X
    return all(choices[i](pool[i]) == trace.matching & problem.institution_mask(i) for i in problem.institutions)


# -- stability ----------------------------------------------------------------

def is_stable(problem: Problem, X: int, choices: Mapping[str, ChoiceFunction]) -> Report:
    """Check the three stability clauses in order.

    The witness names the first failing clause, scanning agents, then
    institutions, then contracts in ascending id order.
    """
    for agent in problem.agents:
        x = problem.assignment(X, agent)
        if x is not None and not problem.preferences[agent].acceptable(x):
            return Report("stability", False, {"clause": "individual-rationality", "agent": agent, "contract": x})
    for i in problem.institutions:
        Xi = X & problem.institution_mask(i)
        if choices[i](Xi) != Xi:
            return Report("stability", False, {"clause": "institution-rationality", "institution": i,
                                               "X_i": members(Xi), "C(X_i)": members(choices[i](Xi))})
    for x in range(len(problem.contracts)):
        if X >> x & 1:
            continue
        c = problem.contracts[x]
        if not problem.preferences[c.agent].prefers(x, problem.assignment(X, c.agent)):
            continue
        Xi = X & problem.institution_mask(c.institution)
        if choices[c.institution](Xi | 1 << x) >> x & 1:
            return Report("stability", False, {"clause": "blocking-contract", "institution": c.institution,
                                               "agent": c.agent, "contract": x})
    return Report("stability", True)


def enumerate_stable(problem: Problem, choices: Mapping[str, ChoiceFunction], limit: int = MAX_MATCHINGS) -> list[int]:
    """All stable matchings, in the canonical matching enumeration order."""
    return [X for X in enumerate_matchings(problem, limit) if is_stable(problem, X, choices)]


# -- matching rules and strategy-proofness --------------------------------------

@dataclass(frozen=True)
class RuleUnderTest:
    """A matching rule: problem -> matching."""

    name: str
    evaluator: Callable[[Problem], int] = field(repr=False)

    def __call__(self, problem: Problem) -> int:
        return self.evaluator(problem)


def da_rule(choices: Mapping[str, ChoiceFunction], name: str = "deferred-acceptance") -> RuleUnderTest:
    return RuleUnderTest(name, lambda p: run_da(p, choices).matching)


def immediate_acceptance(name: str = "immediate-acceptance") -> RuleUnderTest:
    """Boston-style rule: acceptances are final each round.

    In round k every unassigned agent applies to their k-th acceptable
    contract; each institution admits applicants by priority into its
    remaining capacity.
    """

    def evaluate(problem):
        lists = {a: problem.preferences[a].acceptable_list() for a in problem.agents}
        free = {i: spec.capacity for i, spec in problem.institutions.items()}
        matched = 0
        waiting = list(problem.agents)
        rounds = max((len(v) for v in lists.values()), default=0)
        for k in range(rounds):
            applicants = {}
            for a in waiting:
                if k < len(lists[a]):
                    x = lists[a][k]
                    applicants.setdefault(problem.contracts[x].institution, []).append(x)
            for i, xs in applicants.items():
                spec = problem.institutions[i]
                xs.sort(key=spec.priority_rank.__getitem__)
                for x in xs[:free[i]]:
                    matched |= 1 << x
                free[i] -= min(free[i], len(xs))
            waiting = [a for a in waiting if problem.assignment(matched, a) is None]
        return matched

    return RuleUnderTest(name, evaluate)


def table_rule(outcomes: Mapping[tuple, int], name: str) -> RuleUnderTest:
    """A rule given by an explicit outcome per preference profile."""
    return RuleUnderTest(name, lambda p: outcomes[profile_key(p)])


def profile_key(problem: Problem) -> tuple:
    return tuple(problem.preferences[a].order for a in problem.agents)


class ProfileSpace:
    """All preference profiles of a problem's shape, indexed by per-agent order numbers."""

    def __init__(self, problem: Problem, limit: int = MAX_PROFILES):
        require(profile_count(problem), limit, "preference-profile enumeration")
        self.problem = problem
        self.agents = problem.agents
        self.orders = [agent_orders(problem, a) for a in self.agents]

    def __len__(self):
        n = 1
        for o in self.orders:
            n *= len(o)
        return n

    def indices(self):
        return itertools.product(*(range(len(o)) for o in self.orders))

    def problem_at(self, idx: tuple) -> Problem:
        prefs = {a: self.orders[k][j] for k, (a, j) in enumerate(zip(self.agents, idx))}
        return fast_with_preferences(self.problem, prefs)

    def describe(self, idx: tuple) -> dict:
        return {a: ["null" if x is NULL else x for x in self.orders[k][j].order]
                for k, (a, j) in enumerate(zip(self.agents, idx))}


def check_strategy_proofness(rule: RuleUnderTest, problem: Problem, *, limit: int = MAX_PROFILES,
                             focus: Optional[Iterable[tuple]] = None) -> Report:
    """No agent gains by a unilateral misreport, over every profile of the shape.

    ``focus`` restricts the search to deviations that start or end at the given
    profile indices; this is exact for a rule that agrees with a known
    strategy-proof rule outside ``focus``.
    """
    space = ProfileSpace(problem, limit)
    outcomes: dict = {}

    def outcome(idx):
        X = outcomes.get(idx)
        if X is None:
            X = outcomes[idx] = rule(space.problem_at(idx))
        return X

    def witness(idx, k, dev):
        agent = space.agents[k]
        truth = space.orders[k][idx[k]]
        lied = idx[:k] + (dev,) + idx[k + 1:]
        got, could = problem.assignment(outcome(idx), agent), problem.assignment(outcome(lied), agent)
        if truth.prefers(could, got):
            return {"profile": space.describe(idx), "agent": agent,
                    "deviation": space.describe(lied)[agent], "truthful": got, "misreport": could}
        return None

    checked = 0
    if focus is None:
        pairs = ((idx, k, dev) for idx in space.indices()
                 for k in range(len(space.agents)) for dev in range(len(space.orders[k])) if dev != idx[k])
    else:
        pairs = _focus_pairs(space, focus)
    for idx, k, dev in pairs:
        checked += 1
        hit = witness(idx, k, dev)
        if hit is not None:
            return Report("strategy-proofness", False, hit, details={"deviations": checked, "rule": rule.name})
    return Report("strategy-proofness", True, details={"deviations": checked, "profiles": len(outcomes), "rule": rule.name})


def _focus_pairs(space, focus):
    seen = set()
    for idx in sorted(set(focus)):
        for k in range(len(space.agents)):
            for other in range(len(space.orders[k])):
                if other == idx[k]:
                    continue
                moved = idx[:k] + (other,) + idx[k + 1:]
                for pair in ((idx, k, other), (moved, k, idx[k])):
                    if pair not in seen:
                        seen.add(pair)
                        yield pair


def check_individual_rationality(rule: RuleUnderTest, problem: Problem, limit: int = MAX_PROFILES) -> Report:
    space = ProfileSpace(problem, limit)
    for idx in space.indices():
        p = space.problem_at(idx)
        X = rule(p)
        for agent in p.agents:
            x = p.assignment(X, agent)
            if x is not None and not p.preferences[agent].acceptable(x):
                return Report("individual-rationality", False, {"profile": space.describe(idx), "agent": agent, "contract": x})
    return Report("individual-rationality", True)
