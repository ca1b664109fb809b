"""Matroid rank oracles over an institution's contract ground set.

Independence and rank take global contract bitmasks; a query outside the
oracle's ground raises :class:`DomainError`. Rank values are memoized per
oracle unless ``memo=None``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from matchforge import kernels
from matchforge.errors import DomainError, GuardError, InstanceError
from matchforge.guards import TABULATION_LIMIT
from matchforge.model import compress, expand, members, to_mask
from matchforge.reports import Report


class Matroid:
    """Shared behaviour; subclasses define ``ground`` and ``_independent``."""

    ground: int
    memo: Optional[dict]

    def _domain(self, X: int) -> None:
        if X & ~self.ground:
            raise DomainError(f"set {members(X)} is not within the ground set {members(self.ground)}")

    def is_independent(self, X: int) -> bool:
        self._domain(X)
        return self._independent(X)

    def rank(self, X: int) -> int:
        self._domain(X)
        memo = self.memo
        if memo is None:
            return self._rank(X)
        r = memo.get(X)
        if r is None:
            r = memo[X] = self._rank(X)
        return r

    def _rank(self, X: int) -> int:
        return greedy_rank(self, X)

    def _independent(self, X: int) -> bool:
        raise NotImplementedError


def greedy_rank(m: Matroid, X: int) -> int:
    """Rank by growing a maximal independent subset in id order."""
    kept = 0
    for x in members(X):
        if m._independent(kept | 1 << x):
            kept |= 1 << x
    return kept.bit_count()


@dataclass(frozen=True)
class UniformMatroid(Matroid):
    ground: int
    q: int
    memo: Optional[dict] = field(default_factory=dict, compare=False, repr=False)

    def _independent(self, X):
        return X.bit_count() <= self.q

    def _rank(self, X):
        return min(X.bit_count(), self.q)


@dataclass(frozen=True)
class PartitionMatroid(Matroid):
    """At most ``quotas[c]`` elements from each class ``c``."""

    ground: int
    classes: Mapping[int, str]
    quotas: Mapping[str, int]
    memo: Optional[dict] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        missing = [x for x in members(self.ground) if x not in self.classes]
        if missing:
            raise InstanceError("matroid.classes", f"elements {missing} have no class")
        unknown = {c for c in self.classes.values()} - set(self.quotas)
        if unknown:
            raise InstanceError("matroid.quotas", f"classes {sorted(unknown)} have no quota")

    def _counts(self, X):
        counts: dict = {}
        for x in members(X):
            c = self.classes[x]
            counts[c] = counts.get(c, 0) + 1
        return counts

    def _independent(self, X):
        return all(n <= self.quotas[c] for c, n in self._counts(X).items())

    def _rank(self, X):
        return sum(min(n, self.quotas[c]) for c, n in self._counts(X).items())


@dataclass(frozen=True)
class TransversalMatroid(Matroid):
    """Reserve-graph matroid: type ``t`` offers ``reserves[t]`` seats, and an
    element may take a seat of any type among its traits. A set is independent
    iff its elements can occupy distinct seats."""

    ground: int
    traits: Mapping[int, frozenset]
    reserves: Mapping[str, int]
    types: tuple = ()
    memo: Optional[dict] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        order = list(self.types) or sorted(self.reserves)
        declared = set(order)
        for x, ts in self.traits.items():
            if self.types and not set(ts) <= declared:
                raise InstanceError("traits", f"contract {x} has traits outside the type universe")
        seats = {}
        start = 0
        for t in order:
            count = self.reserves.get(t, 0)
            seats[t] = ((1 << count) - 1) << start
            start += count
        if start > 64:
            raise InstanceError("reserves", f"{start} reserved seats exceed the 64-seat limit")
        adj = kernels.u64_array([0] * max(self.ground.bit_length(), 1))
        for x in members(self.ground):
            bits = 0
            for t in self.traits.get(x, ()):
                bits |= seats.get(t, 0)
            adj[x] = bits
        object.__setattr__(self, "_adj", adj)
        object.__setattr__(self, "seat_count", start)

    def _rank(self, X):
        return kernels.transversal_rank(X, self._adj)

    def _independent(self, X):
        return kernels.transversal_rank(X, self._adj) == X.bit_count()

    def matching_rank(self, X: int) -> int:
        """Rank via maximum bipartite matching (never memoized)."""
        self._domain(X)
        return self._rank(X)


@dataclass(frozen=True)
class ExplicitMatroid(Matroid):
    """A matroid given by its full family of independent sets (validated)."""

    ground: int
    independent: frozenset
    memo: Optional[dict] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "independent", frozenset(self.independent))
        for s in self.independent:
            if s & ~self.ground:
                raise InstanceError("matroid.independent", f"set {members(s)} leaves the ground set")
        report = check_matroid_axioms(self)
        if not report.ok:
            raise InstanceError("matroid.independent", f"not a matroid: {report.witness}")

    def _independent(self, X):
        return X in self.independent


@dataclass(frozen=True)
class Minor(Matroid):
    """Contraction of ``base`` by ``fixed``: rank(Y) = r(Y | fixed) - r(fixed)."""

    base: Matroid
    fixed: int
    memo: Optional[dict] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.fixed & ~self.base.ground:
            raise DomainError("fixed set is not within the ground set")
        object.__setattr__(self, "ground", self.base.ground & ~self.fixed)
        object.__setattr__(self, "_offset", self.base._rank(self.fixed))

    def _rank(self, X):
        return self.base._rank(X | self.fixed) - self._offset

    def _independent(self, X):
        return self._rank(X) == X.bit_count()


@dataclass(frozen=True)
class Truncation(Matroid):
    """Independent sets of ``base`` with at most ``cap`` elements."""

    base: Matroid
    cap: int
    memo: Optional[dict] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.cap < 0:
            raise ValueError("cap must be nonnegative")
        object.__setattr__(self, "ground", self.base.ground)

    def _rank(self, X):
        return min(self.base._rank(X), self.cap)

    def _independent(self, X):
        return X.bit_count() <= self.cap and self.base._independent(X)


def minor(m: Matroid, fixed: int) -> Minor:
    return Minor(m, fixed)


def truncate(m: Matroid, cap: int) -> Truncation:
    return Truncation(m, cap)


def greedy_base(m: Matroid, X: int, priority: Sequence[int]) -> int:
    """Scan ``X`` from highest priority down, keeping each element that
    leaves the kept set independent."""
    m._domain(X)
    kept = 0
    seen = 0
    for x in priority:
        bit = 1 << x
        if X & bit:
            seen |= bit
            if m._independent(kept | bit):
                kept |= bit
    if seen != X:
        raise DomainError(f"priority does not rank {members(X & ~seen)}")
    return kept


def is_base(m: Matroid, Y: int, X: int) -> bool:
    """Y is a maximal independent subset of X."""
    if Y & ~X or not m._independent(Y):
        return False
    return all(not m._independent(Y | 1 << x) for x in members(X & ~Y))


def independence_table(m: Matroid) -> tuple[list[int], bytearray]:
    ids = members(m.ground)
    n = len(ids)
    table = bytearray(1 << n)
    for local in range(1 << n):
        table[local] = m._independent(expand(local, ids))
    return ids, table


def check_matroid_axioms(m: Matroid, *, guard: int = TABULATION_LIMIT, b1_guard: int = 10) -> Report:
    """Exhaustively verify I1-I3, R1-R3 and base exchange (B1).

    R2 and R3 are checked in their single-element local forms, which are
    equivalent to the pairwise statements. B1 is checked for every subset
    when the ground has at most ``b1_guard`` elements and skipped above that
    (it follows from I1-I3); the report says so. Rank memo is bypassed.
    """
    ids = members(m.ground)
    n = len(ids)
    if n > guard:
        raise GuardError(f"ground of {n} elements exceeds axiom-check guard {guard}")
    _, indep = independence_table(m)
    ranks = kernels.rank_table(indep, n)
    g = lambda local: members(expand(local, ids))  # noqa: E731
    hit = kernels.independence_witness(indep, ranks, n)
    if hit is not None:
        code, a, b = hit
        if code == 1:
            return Report("matroid-axioms", False, {"axiom": "I1", "set": []})
        if code == 2:
            return Report("matroid-axioms", False, {"axiom": "I2", "subset": g(a), "of": g(b)})
        return Report("matroid-axioms", False, {"axiom": "I3", "smaller": g(a), "larger": g(b)})

    # Rank values of the oracle itself must agree with the max-independent-subset table.
    for local in range(1 << n):
        if m._rank(expand(local, ids)) != ranks[local]:
            return Report("matroid-axioms", False, {"axiom": "rank", "set": g(local),
                                                    "oracle": m._rank(expand(local, ids)), "expected": ranks[local]})
    hit = kernels.rank_witness(ranks, n)
    if hit is not None:
        code, a, b = hit
        axiom = {1: "R1", 2: "R2", 3: "R3"}[code]
        return Report("matroid-axioms", False, {"axiom": axiom, "X": g(a), "X'": g(b)})
    details = {"ground": ids, "B1": "checked"}
    if n <= b1_guard:
        hit = kernels.base_exchange_witness(indep, ranks, n)
        if hit is not None:
            s, y, y2, x = hit
            return Report("matroid-axioms", False, {"axiom": "B1", "X": g(s), "Y": g(y), "Y'": g(y2), "x": g(x)[0]})
    else:
        details["B1"] = f"skipped (ground > {b1_guard}; implied by I1-I3)"
    return Report("matroid-axioms", True, details=details)


def matroid_to_spec(m: Matroid) -> dict:
    if isinstance(m, UniformMatroid):
        return {"kind": "uniform", "q": m.q}
    if isinstance(m, PartitionMatroid):
        return {"kind": "partition",
                "classes": {str(x): c for x, c in sorted(m.classes.items())},
                "quotas": dict(m.quotas)}
    if isinstance(m, TransversalMatroid):
        return {"kind": "transversal",
                "reserves": dict(m.reserves),
                "traits": {str(x): sorted(ts) for x, ts in sorted(m.traits.items())}}
    if isinstance(m, ExplicitMatroid):
        return {"kind": "explicit", "independent": sorted(members(s) for s in m.independent)}
    raise TypeError(f"{type(m).__name__} has no JSON form")


_SPEC_KEYS = {
    "uniform": {"kind", "q"},
    "partition": {"kind", "classes", "quotas"},
    "transversal": {"kind", "reserves", "traits"},
    "explicit": {"kind", "independent"},
}


def matroid_from_spec(spec: dict, ground: int, where: str = "matroid") -> Matroid:
    if not isinstance(spec, dict) or spec.get("kind") not in _SPEC_KEYS:
        raise InstanceError(f"{where}.kind", "must be one of uniform, partition, transversal, explicit")
    kind = spec["kind"]
    extra = set(spec) - _SPEC_KEYS[kind]
    if extra:
        raise InstanceError(where, f"unknown keys {sorted(extra)}")
    missing = _SPEC_KEYS[kind] - set(spec)
    if missing:
        raise InstanceError(where, f"missing keys {sorted(missing)}")
    try:
        if kind == "uniform":
            return UniformMatroid(ground, _nonneg(spec["q"], f"{where}.q"))
        if kind == "partition":
            classes = {int(k): v for k, v in spec["classes"].items()}
            quotas = {k: _nonneg(v, f"{where}.quotas") for k, v in spec["quotas"].items()}
            return PartitionMatroid(ground, classes, quotas)
        if kind == "transversal":
            traits = {int(k): frozenset(v) for k, v in spec["traits"].items()}
            reserves = {k: _nonneg(v, f"{where}.reserves") for k, v in spec["reserves"].items()}
            for x in traits:
                if not ground >> x & 1:
                    raise InstanceError(f"{where}.traits", f"contract {x} is not in the ground set")
            return TransversalMatroid(ground, traits, reserves)
        family = frozenset(to_mask(s) for s in spec["independent"])
        return ExplicitMatroid(ground, family)
    except (TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, InstanceError):
            raise
        raise InstanceError(where, str(exc)) from None


def _nonneg(v, where):
    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
        raise InstanceError(where, "must be a nonnegative integer")
    return v


def local_rank_table(m: Matroid) -> tuple[list[int], bytearray]:
    """Rank of every subset of the ground, indexed by local mask."""
    ids, indep = independence_table(m)
    return ids, kernels.rank_table(indep, len(ids))


__all__ = [
    "Matroid", "UniformMatroid", "PartitionMatroid", "TransversalMatroid", "ExplicitMatroid",
    "Minor", "Truncation", "minor", "truncate", "greedy_base", "greedy_rank", "is_base",
    "check_matroid_axioms", "independence_table", "local_rank_table",
    "matroid_to_spec", "matroid_from_spec", "compress",
]
