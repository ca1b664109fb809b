"""Enumeration of matchings and preference profiles under explicit guards."""
from __future__ import annotations

import itertools
import math
from typing import Iterator

from matchforge.guards import MAX_MATCHINGS, MAX_PROFILES, require
from matchforge.model import NULL, Preference, Problem, members


def matching_count(problem: Problem) -> int:
    return math.prod(problem.agent_mask(a).bit_count() + 1 for a in problem.agents)


def enumerate_matchings(problem: Problem, limit: int = MAX_MATCHINGS) -> list[int]:
    """Every matching, agents in instance order, null option first."""
    require(matching_count(problem), limit, "matching enumeration")
    options = [[0] + [1 << x for x in members(problem.agent_mask(a))] for a in problem.agents]
    return [sum(combo) for combo in itertools.product(*options)]


def agent_orders(problem: Problem, agent: str) -> list[Preference]:
    """All strict orders over the agent's contracts plus null."""
    items = members(problem.agent_mask(agent)) + [NULL]
    return [Preference(agent, perm) for perm in itertools.permutations(items)]


def profile_count(problem: Problem) -> int:
    return math.prod(math.factorial(problem.agent_mask(a).bit_count() + 1) for a in problem.agents)


def enumerate_profiles(problem: Problem, limit: int = MAX_PROFILES) -> Iterator[Problem]:
    """The problem under every preference profile (instance data fixed)."""
    require(profile_count(problem), limit, "preference-profile enumeration")
    agents = problem.agents
    per_agent = [agent_orders(problem, a) for a in agents]
    for combo in itertools.product(*per_agent):
        yield fast_with_preferences(problem, dict(zip(agents, combo)))


def fast_with_preferences(problem: Problem, preferences: dict) -> Problem:
    """Swap in a preference profile known to be valid, sharing cached layout."""
    clone = object.__new__(Problem)
    object.__setattr__(clone, "contracts", problem.contracts)
    object.__setattr__(clone, "preferences", preferences)
    object.__setattr__(clone, "institutions", problem.institutions)
    for key in ("agents", "_agent_masks", "_institution_masks"):
        clone.__dict__[key] = getattr(problem, key)
    return clone
