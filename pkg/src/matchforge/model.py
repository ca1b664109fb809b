"""Contracts, preferences, institutions and matching problems.

Contract sets are plain ``int`` bitmasks over contract ids (bit ``k`` set
means contract ``k`` is in the set). Instances are capped at 64 contracts.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from matchforge.errors import DomainError, InstanceError
from matchforge.guards import MAX_CONTRACTS

NULL = None


def to_mask(ids: Iterable[int]) -> int:
    mask = 0
    for i in ids:
        mask |= 1 << i
    return mask


def members(mask: int) -> list[int]:
    """Contract ids in ``mask``, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def submasks(mask: int):
    """All subsets of ``mask`` in ascending numeric order."""
    subs = []
    sub = mask
    while True:
        subs.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    subs.reverse()
    return subs


def compress(mask: int, ground_ids: Sequence[int]) -> int:
    """Map a global mask to a local one over ``ground_ids`` (position = local bit)."""
    local = 0
    for pos, cid in enumerate(ground_ids):
        if mask >> cid & 1:
            local |= 1 << pos
    return local


def expand(local: int, ground_ids: Sequence[int]) -> int:
    mask = 0
    pos = 0
    while local:
        if local & 1:
            mask |= 1 << ground_ids[pos]
        local >>= 1
        pos += 1
    return mask


@dataclass(frozen=True)
class Contract:
    id: int
    agent: str
    institution: str
    label: Optional[str] = None

    def __str__(self):
        suffix = f":{self.label}" if self.label else ""
        return f"x[{self.agent},{self.institution}{suffix}]"


@dataclass(frozen=True)
class Preference:
    """A strict order over an agent's contracts and the null contract.

    ``order`` runs from most to least preferred; ``None`` is the null contract.
    """

    agent: str
    order: tuple

    @cached_property
    def _position(self) -> dict:
        return {x: k for k, x in enumerate(self.order)}

    def position(self, x: Optional[int]) -> int:
        return self._position[x]

    def acceptable(self, x: int) -> bool:
        return self._position[x] < self._position[NULL]

    def weakly_prefers(self, x: Optional[int], y: Optional[int]) -> bool:
        return self._position[x] <= self._position[y]

    def prefers(self, x: Optional[int], y: Optional[int]) -> bool:
        return self._position[x] < self._position[y]

    def acceptable_list(self) -> tuple:
        cut = self._position[NULL]
        return self.order[:cut]

    @classmethod
    def from_prefix(cls, agent: str, prefix: Sequence, own_ids: Iterable[int]) -> "Preference":
        """Complete an acceptable-prefix listing.

        Contracts listed before ``None`` are acceptable in the given order;
        if ``None`` is missing it is placed right after the listed ids.
        Unlisted contracts go below null in ascending id order.
        """
        listed = list(prefix)
        if NULL not in listed:
            listed.append(NULL)
        rest = sorted(set(own_ids) - {x for x in listed if x is not NULL})
        return cls(agent, tuple(listed) + tuple(rest))


@dataclass(frozen=True)
class InstitutionSpec:
    """Everything an institution's choice rule may need.

    ``matroid`` is an explicit matroid spec; when absent and ``reserves`` are
    given, the transversal reserve matroid is built from types/traits/reserves.
    """

    capacity: int
    priority: tuple
    returning: frozenset = frozenset()
    types: tuple = ()
    traits: Mapping[int, frozenset] = field(default_factory=dict)
    reserves: Mapping[str, int] = field(default_factory=dict)
    matroid: object = None
    unique_pairs: bool = False

    @cached_property
    def priority_rank(self) -> dict:
        return {x: k for k, x in enumerate(self.priority)}

    @property
    def returning_mask(self) -> int:
        return to_mask(self.returning)

    def oracle(self, ground: int):
        """The institution's matroid rank oracle, or None if it has none.

        Built once per ground set and reused, so rank memos survive
        across preference profiles.
        """
        from matchforge.matroid import TransversalMatroid

        if self.matroid is not None:
            return self.matroid
        built = self.__dict__.setdefault("_oracles", {})
        if ground not in built:
            if self.reserves or self.traits:
                built[ground] = TransversalMatroid(ground, self.traits, self.reserves, self.types)
            else:
                built[ground] = None
        return built[ground]


@dataclass(frozen=True)
class Problem:
    """A market: contracts and agent preferences plus per-institution data."""

    contracts: tuple
    preferences: Mapping[str, Preference]
    institutions: Mapping[str, InstitutionSpec]

    def __post_init__(self):
        validate(self)

    @cached_property
    def agents(self) -> tuple:
        seen = dict.fromkeys(c.agent for c in self.contracts)
        seen.update(dict.fromkeys(self.preferences))
        return tuple(seen)

    @cached_property
    def _agent_masks(self) -> dict:
        masks = dict.fromkeys(self.agents, 0)
        for c in self.contracts:
            masks[c.agent] |= 1 << c.id
        return masks

    @cached_property
    def _institution_masks(self) -> dict:
        masks = dict.fromkeys(self.institutions, 0)
        for c in self.contracts:
            masks[c.institution] |= 1 << c.id
        return masks

    @property
    def universe(self) -> int:
        return (1 << len(self.contracts)) - 1

    def agent_mask(self, agent: str) -> int:
        try:
            return self._agent_masks[agent]
        except KeyError:
            raise InstanceError("agent", f"unknown agent {agent!r}") from None

    def institution_mask(self, institution: str) -> int:
        try:
            return self._institution_masks[institution]
        except KeyError:
            raise InstanceError("institution", f"unknown institution {institution!r}") from None

    def agent_of(self, x: int) -> str:
        return self.contracts[x].agent

    def institution_of(self, x: int) -> str:
        return self.contracts[x].institution

    def with_preferences(self, preferences: Mapping[str, Preference]) -> "Problem":
        return replace(self, preferences=preferences)

    def assignment(self, matching: int, agent: str) -> Optional[int]:
        """The agent's contract in ``matching`` or None."""
        own = matching & self.agent_mask(agent)
        return None if own == 0 else own.bit_length() - 1


def restrict(problem: Problem, X: int, *, agent: str = None, institution: str = None) -> int:
    """Contracts of ``X`` that belong to the given agent or institution."""
    if (agent is None) == (institution is None):
        raise ValueError("give exactly one of agent= or institution=")
    if X & ~problem.universe:
        raise DomainError("contract set is not a subset of the instance universe")
    if agent is not None:
        return X & problem.agent_mask(agent)
    return X & problem.institution_mask(institution)


def is_matching(problem: Problem, X: int) -> bool:
    if X & ~problem.universe:
        return False
    return all((X & m).bit_count() <= 1 for m in problem._agent_masks.values())


def check_matching(problem: Problem, X: int) -> None:
    if X & ~problem.universe:
        raise DomainError("matching contains contracts outside the instance")
    for agent, m in problem._agent_masks.items():
        if (X & m).bit_count() > 1:
            raise DomainError(f"agent {agent!r} holds more than one contract")


def demand(problem: Problem, X: int, institution: str) -> int:
    """Contracts of the institution that their agent weakly prefers to their match."""
    check_matching(problem, X)
    out = 0
    for x in members(problem.institution_mask(institution)):
        agent = problem.contracts[x].agent
        if problem.preferences[agent].weakly_prefers(x, problem.assignment(X, agent)):
            out |= 1 << x
    return out


def validate(problem: Problem) -> None:
    """Check model invariants; raise InstanceError naming the offending field."""
    contracts = problem.contracts
    if len(contracts) > MAX_CONTRACTS:
        raise InstanceError("contracts", f"{len(contracts)} contracts exceed the {MAX_CONTRACTS}-contract cap")
    triples = set()
    for k, c in enumerate(contracts):
        if c.id != k:
            raise InstanceError("contracts.id", f"ids must be 0..n-1 in order; found {c.id} at position {k}")
        key = (c.agent, c.institution, c.label)
        if key in triples:
            raise InstanceError("contracts", f"duplicate (agent, institution, label) {key}")
        triples.add(key)
        if c.institution not in problem.institutions:
            raise InstanceError("contracts.institution", f"contract {k} names unknown institution {c.institution!r}")

    by_agent: dict = {}
    for c in contracts:
        by_agent.setdefault(c.agent, set()).add(c.id)
    for agent in set(by_agent) - set(problem.preferences):
        raise InstanceError(f"preferences.{agent}", "missing preference for agent with contracts")
    for agent, pref in problem.preferences.items():
        if pref.agent != agent:
            raise InstanceError(f"preferences.{agent}", "preference stored under the wrong agent")
        own = by_agent.get(agent, set())
        items = list(pref.order)
        if items.count(NULL) != 1:
            raise InstanceError(f"preferences.{agent}", "null must appear exactly once")
        ids = [x for x in items if x is not NULL]
        if len(ids) != len(set(ids)) or set(ids) != own:
            raise InstanceError(f"preferences.{agent}", "order must list each of the agent's contracts exactly once")

    for name, spec in problem.institutions.items():
        own = {c.id for c in contracts if c.institution == name}
        if spec.capacity < 0:
            raise InstanceError(f"institutions.{name}.capacity", "capacity must be nonnegative")
        if len(spec.priority) != len(set(spec.priority)) or set(spec.priority) != own:
            raise InstanceError(f"institutions.{name}.priority", "priority must be a strict total order on the institution's contracts")
        if not set(spec.returning) <= own:
            raise InstanceError(f"institutions.{name}.returning", "returning contracts must belong to the institution")
        if len(spec.returning) > spec.capacity:
            raise InstanceError(f"institutions.{name}.returning", f"{len(spec.returning)} returning contracts exceed capacity {spec.capacity}")
        for t, count in spec.reserves.items():
            if not isinstance(count, int) or count < 0:
                raise InstanceError(f"institutions.{name}.reserves", f"reserve for type {t!r} must be a nonnegative integer")
            if spec.types and t not in spec.types:
                raise InstanceError(f"institutions.{name}.reserves", f"unknown type {t!r}")
        for cid, traits in spec.traits.items():
            if cid not in own:
                raise InstanceError(f"institutions.{name}.traits", f"contract {cid} does not belong to the institution")
            if spec.types and not set(traits) <= set(spec.types):
                raise InstanceError(f"institutions.{name}.traits", f"contract {cid} has traits outside the declared types")
        if spec.unique_pairs:
            pairs = [contracts[x].agent for x in own]
            if len(pairs) != len(set(pairs)):
                raise InstanceError(f"institutions.{name}.uniquePairs", "an agent has more than one contract with the institution")
