"""Seeded random instances for tests, benchmarks and the ``gen`` command.

All randomness flows through ``random.Random(seed)``, so a seed and a
configuration always produce the same instance.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from matchforge.errors import InstanceError
from matchforge.guards import MAX_CONTRACTS
from matchforge.matroid import PartitionMatroid, TransversalMatroid, UniformMatroid
from matchforge.model import NULL, Contract, InstitutionSpec, Preference, Problem

TYPE_NAMES = "DHPQRSTU"


@dataclass(frozen=True)
class GenConfig:
    agents: int = 3
    institutions: int = 2
    types: int = 2
    contracts_per_pair: int = 1
    max_capacity: Optional[int] = None
    returning: bool = True
    reserves: bool = True
    truncate_preferences: bool = True


def _agent_names(n):
    return [f"a{k}" for k in range(n)]


def _institution_names(n):
    return [f"i{k}" for k in range(n)]


def _reserve_vector(rng, types, limit):
    """Random nonnegative seat counts per type with total at most ``limit``."""
    counts = dict.fromkeys(types, 0)
    budget = rng.randint(0, limit)
    for _ in range(budget):
        counts[rng.choice(types)] += 1
    return counts


def generate(config: GenConfig, seed: int) -> Problem:
    """A random instance with strict preferences, priorities, traits and reserves.

    Reserves at each institution total at most its capacity, and every agent
    is a returning applicant at no more than one institution.
    """
    rng = random.Random(seed)
    n_contracts = config.agents * config.institutions * config.contracts_per_pair
    if n_contracts > MAX_CONTRACTS:
        raise InstanceError("contracts", f"{n_contracts} contracts exceed the {MAX_CONTRACTS}-contract cap")
    agents = _agent_names(config.agents)
    insts = _institution_names(config.institutions)
    types = list(TYPE_NAMES[:config.types])
    labeled = config.contracts_per_pair > 1
    contracts = []
    for a in agents:
        for i in insts:
            for k in range(config.contracts_per_pair):
                contracts.append(Contract(len(contracts), a, i, f"l{k}" if labeled else None))

    traits_of = {a: frozenset(t for t in types if rng.random() < 0.5) for a in agents}
    preferences = {}
    for a in agents:
        own = [c.id for c in contracts if c.agent == a]
        order = own + [NULL]
        rng.shuffle(order)
        if not config.truncate_preferences:
            order.remove(NULL)
            order.append(NULL)
        preferences[a] = Preference(a, tuple(order))

    returning_at = {a: (rng.choice(insts) if config.returning and rng.random() < 0.4 else None) for a in agents}
    specs = {}
    cap_limit = config.max_capacity or config.agents
    for i in insts:
        own = [c for c in contracts if c.institution == i]
        capacity = rng.randint(1, max(1, cap_limit))
        priority = [c.id for c in own]
        rng.shuffle(priority)
        returning = []
        for c in own:
            if returning_at[c.agent] == i and not any(contracts[x].agent == c.agent for x in returning):
                returning.append(c.id)
        rng.shuffle(returning)
        returning = frozenset(returning[:capacity])
        traits = {c.id: traits_of[c.agent] for c in own if traits_of[c.agent]} if types else {}
        reserves = _reserve_vector(rng, types, capacity) if config.reserves and types else {}
        specs[i] = InstitutionSpec(capacity, tuple(priority), returning, tuple(types), traits, reserves,
                                   unique_pairs=not labeled)
    return Problem(tuple(contracts), preferences, specs)


def chile_fixture(seed: int, size: int = None) -> Problem:
    """One school, one contract per student, with reserves, traits and returning students.

    Total reserves may exceed the capacity.
    """
    rng = random.Random(seed)
    n = size if size is not None else rng.randint(1, 8)
    types = list(TYPE_NAMES[:rng.randint(1, 3)])
    capacity = rng.randint(1, n)
    contracts = tuple(Contract(k, f"s{k}", "i") for k in range(n))
    priority = list(range(n))
    rng.shuffle(priority)
    returning = frozenset(rng.sample(range(n), rng.randint(0, min(capacity, n))))
    traits = {}
    for k in range(n):
        ts = frozenset(t for t in types if rng.random() < 0.45)
        if ts:
            traits[k] = ts
    # reserves may exceed capacity here; the rule does not need them bounded
    reserves = _reserve_vector(rng, types, n)
    spec = InstitutionSpec(capacity, tuple(priority), returning, tuple(types), traits, reserves, unique_pairs=True)
    prefs = {c.agent: Preference(c.agent, (c.id, NULL)) for c in contracts}
    return Problem(contracts, prefs, {"i": spec})


def random_matroid(rng: random.Random, ground: int, max_rank: int = None):
    """A uniform, partition or transversal matroid on ``ground``.

    With ``max_rank`` set, the matroid has no independent set larger than it.
    """
    ids = [x for x in range(ground.bit_length()) if ground >> x & 1]
    n = len(ids)
    cap = n if max_rank is None else max_rank
    kind = rng.choice(("uniform", "partition", "transversal"))
    if kind == "uniform":
        return UniformMatroid(ground, rng.randint(0, cap))
    if kind == "partition":
        classes = {x: f"c{rng.randrange(3)}" for x in ids}
        quotas = {}
        budget = cap
        for c in sorted(set(classes.values())):
            quotas[c] = rng.randint(0, budget)
            budget -= quotas[c]
        return PartitionMatroid(ground, classes, quotas)
    types = list(TYPE_NAMES[:rng.randint(1, 3)])
    traits = {x: frozenset(t for t in types if rng.random() < 0.5) for x in ids}
    return TransversalMatroid(ground, traits, _reserve_vector(rng, types, cap), tuple(types))


def matroid_fixture(seed: int, size: int = None, bounded: bool = True) -> Problem:
    """One institution with a uniform, partition or transversal matroid.

    With ``bounded`` the matroid's rank is at most the capacity, as the
    non-wasteful matroid rule requires.
    """
    rng = random.Random(seed)
    n = size if size is not None else rng.randint(1, 8)
    capacity = rng.randint(1, n)
    ground = (1 << n) - 1
    m = random_matroid(rng, ground, capacity if bounded else None)
    priority = list(range(n))
    rng.shuffle(priority)
    contracts = tuple(Contract(k, f"s{k}", "i") for k in range(n))
    prefs = {c.agent: Preference(c.agent, (c.id, NULL)) for c in contracts}
    if isinstance(m, TransversalMatroid):
        # reserve data lives on the institution; the oracle is derived from it
        traits = {x: ts for x, ts in m.traits.items() if ts}
        spec = InstitutionSpec(capacity, tuple(priority), types=m.types, traits=traits, reserves=dict(m.reserves))
    else:
        spec = InstitutionSpec(capacity, tuple(priority), matroid=m)
    return Problem(contracts, prefs, {"i": spec})


def shape_fixture(agents: int, institutions: int, seed: int, rule: str = "responsive") -> Problem:
    """A small market whose institutions carry data for ``rule``."""
    config = GenConfig(agents=agents, institutions=institutions, types=2,
                       returning=rule == "guaranteed-enrollment",
                       reserves=rule in ("guaranteed-enrollment", "matroid", "greedy"))
    return generate(config, seed)
