"""Institutional choice rules and exhaustive checks of their classical axioms."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Collection, Optional, Sequence, Union

from matchforge import kernels
from matchforge.errors import ContractViolation, DomainError, SpecError
from matchforge.guards import TABULATION_LIMIT, max_ground, require
from matchforge.matroid import Matroid, TransversalMatroid, greedy_base
from matchforge.model import Problem, compress, expand, members, to_mask
from matchforge.reports import Report


@dataclass(frozen=True)
class ChoiceFunction:
    """C: subsets of ``ground`` -> chosen subsets, with evaluations cached."""

    institution: str
    ground: int
    evaluator: Callable[[int], int] = field(repr=False)
    name: str = "choice"
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, X: int) -> int:
        Y = self.cache.get(X)
        if Y is not None:
            return Y
        if X & ~self.ground:
            raise DomainError(f"{self.name}: {members(X & ~self.ground)} not in the ground set")
        Y = self.evaluator(X)
        if Y & ~X:
            raise ContractViolation(f"{self.name} chose {members(Y)} from {members(X)}")
        self.cache[X] = Y
        return Y

    @property
    def ground_ids(self) -> list[int]:
        return members(self.ground)

    def tabulate(self, guard: int = TABULATION_LIMIT) -> "ChoiceTable":
        ids = self.ground_ids
        require(len(ids), min(guard, TABULATION_LIMIT), f"tabulating {self.name}")
        values = kernels.u64_array(compress(self(expand(local, ids)), ids) for local in range(1 << len(ids)))
        return ChoiceTable(tuple(ids), values)


@dataclass(frozen=True)
class ChoiceTable:
    """Local tabulation: ``values[local]`` is the chosen local mask."""

    ids: tuple
    values: object

    @property
    def n(self) -> int:
        return len(self.ids)

    def to_rule(self, institution: str = "i", name: str = "tabulated") -> ChoiceFunction:
        ids, values = self.ids, self.values
        return ChoiceFunction(institution, to_mask(ids),
                              lambda X: expand(values[compress(X, ids)], ids), name)

    def to_json(self, institution: str = None) -> dict:
        out = {"ground": self.n, "contracts": list(self.ids)}
        if institution is not None:
            out["institution"] = institution
        out["choices"] = {str(k): int(v) for k, v in enumerate(self.values)}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ChoiceTable":
        allowed = {"ground", "contracts", "institution", "choices"}
        if set(data) - allowed:
            raise ValueError(f"unknown keys {sorted(set(data) - allowed)}")
        n = data["ground"]
        if not isinstance(n, int) or not 0 <= n <= TABULATION_LIMIT:
            raise ValueError(f"ground must be an integer in 0..{TABULATION_LIMIT}")
        ids = tuple(data.get("contracts", range(n)))
        if len(ids) != n:
            raise ValueError("contracts list does not match ground size")
        choices = data["choices"]
        values = kernels.u64_array([0] * (1 << n))
        for k in range(1 << n):
            try:
                v = choices[str(k)]
            except KeyError:
                raise ValueError(f"choices: missing entry for subset {k}") from None
            if v & ~k:
                raise ValueError(f"choices: entry {k} chooses {v}, not a subset")
            values[k] = v
        return cls(ids, values)


def _ground_of(priority: Sequence[int], ground: Optional[int]) -> int:
    return to_mask(priority) if ground is None else ground


def responsive(q: int, priority: Sequence[int], institution: str = "i", ground: int = None) -> ChoiceFunction:
    """Top ``min(|X|, q)`` contracts of X by priority."""
    order = tuple(priority)

    def choose(X):
        out = 0
        taken = 0
        for x in order:
            if taken >= q:
                break
            if X >> x & 1:
                out |= 1 << x
                taken += 1
        return out

    return ChoiceFunction(institution, _ground_of(order, ground), choose, "responsive")


def greedy(m: Matroid, priority: Sequence[int], institution: str = "i") -> ChoiceFunction:
    order = tuple(priority)
    return ChoiceFunction(institution, m.ground, lambda X: greedy_base(m, X, order), "greedy")


def _fill(X: int, chosen: int, limit: int, order) -> int:
    for x in order:
        if chosen.bit_count() >= limit:
            break
        bit = 1 << x
        if X & bit and not chosen & bit:
            chosen |= bit
    return chosen


def nonwasteful_matroid(m: Matroid, q: int, priority: Sequence[int], institution: str = "i") -> ChoiceFunction:
    """Greedy base of X, then the best remaining contracts up to ``min(|X|, q)``."""
    if m.rank(m.ground) > q:
        raise SpecError(f"matroid has an independent set of size {m.rank(m.ground)} > capacity {q}")
    order = tuple(priority)

    def choose(X):
        base = greedy_base(m, X, order)
        return _fill(X, base, min(X.bit_count(), q), order)

    return ChoiceFunction(institution, m.ground, choose, "matroid")


def guaranteed_enrollment(q: int, priority: Sequence[int], returning: int, m: Matroid,
                          institution: str = "i") -> ChoiceFunction:
    """Returning contracts first, then rank-raising contracts by priority, then fill.

    Step 2 runs at most ``seat_count`` rounds (the total number of reserved
    seats); for a non-transversal oracle the bound is the rank of the ground.
    """
    if returning.bit_count() > q:
        raise SpecError(f"{returning.bit_count()} returning contracts exceed capacity {q}")
    if returning & ~m.ground:
        raise SpecError("returning contracts must lie in the ground set")
    order = tuple(priority)
    rounds = m.seat_count if isinstance(m, TransversalMatroid) else m.rank(m.ground)

    def choose(X):
        chosen = X & returning
        if chosen.bit_count() == q:
            return chosen
        for _ in range(rounds):
            current = m.rank(chosen)
            pick = None
            for x in order:
                bit = 1 << x
                if X & bit and not chosen & bit and m.rank(chosen | bit) == current + 1:
                    pick = bit
                    break
            if pick is None:
                break
            chosen |= pick
            if chosen.bit_count() == q:
                return chosen
        return _fill(X, chosen, q, order)

    return ChoiceFunction(institution, m.ground, choose, "guaranteed-enrollment")


def combine(C1: ChoiceFunction, C2: ChoiceFunction,
            selector: Union[Callable[[int], bool], Collection[int]], name: str = "combined") -> ChoiceFunction:
    """Pointwise mix: C2 where ``selector`` picks the subset, C1 elsewhere."""
    if C1.ground != C2.ground:
        raise ValueError("combine needs rules over the same ground set")
    pick = selector if callable(selector) else (lambda X, s=frozenset(selector): X in s)
    return ChoiceFunction(C1.institution, C1.ground, lambda X: C2(X) if pick(X) else C1(X), name)


def constant_empty(ground: int, institution: str = "i") -> ChoiceFunction:
    return ChoiceFunction(institution, ground, lambda X: 0, "empty")


def identity(ground: int, institution: str = "i") -> ChoiceFunction:
    return ChoiceFunction(institution, ground, lambda X: X, "identity")


RULES = ("responsive", "greedy", "matroid", "guaranteed-enrollment")


def build_rule(problem: Problem, institution: str, rule: str) -> ChoiceFunction:
    """The named rule for one institution, from its instance data."""
    spec = problem.institutions[institution]
    ground = problem.institution_mask(institution)
    if rule == "responsive":
        return responsive(spec.capacity, spec.priority, institution, ground)
    oracle = spec.oracle(ground)
    if rule == "guaranteed-enrollment":
        if oracle is None:
            oracle = TransversalMatroid(ground, {}, {})
        return guaranteed_enrollment(spec.capacity, spec.priority, spec.returning_mask, oracle, institution)
    if oracle is None:
        raise SpecError(f"institution {institution!r} has no matroid or reserve data for rule {rule!r}")
    if rule == "greedy":
        return greedy(oracle, spec.priority, institution)
    if rule == "matroid":
        return nonwasteful_matroid(oracle, spec.capacity, spec.priority, institution)
    raise ValueError(f"unknown rule {rule!r}; choose from {', '.join(RULES)}")


def build_profile(problem: Problem, rule: str) -> dict:
    return {i: build_rule(problem, i, rule) for i in problem.institutions}


def _table_for(C, guard):
    if isinstance(C, ChoiceTable):
        return C
    limit = max_ground() if guard is None else guard
    require(len(C.ground_ids), limit, f"exhaustive check of {C.name}")
    return C.tabulate()


def _ids(table, local):
    return members(expand(local, table.ids))


def check_path_independence(C, guard: int = None) -> Report:
    """C(X | X') == C(C(X) | X') for every ordered pair of subsets."""
    t = _table_for(C, guard)
    hit = kernels.path_independence_witness(t.values, t.n)
    if hit is None:
        return Report("path-independence", True)
    a, b = hit
    v = t.values
    return Report("path-independence", False, {
        "X": _ids(t, a), "X'": _ids(t, b),
        "C(X|X')": _ids(t, v[a | b]), "C(C(X)|X')": _ids(t, v[v[a] | b]),
    })


def check_size_monotonicity(C, guard: int = None) -> Report:
    """|C(X)| <= |C(X')| whenever X is a subset of X' (checked one element at a time)."""
    t = _table_for(C, guard)
    hit = kernels.size_monotonicity_witness(t.values, t.n)
    if hit is None:
        return Report("size-monotonicity", True)
    a, b = hit
    return Report("size-monotonicity", False, {
        "X": _ids(t, a), "X'": _ids(t, b),
        "|C(X)|": int(t.values[a]).bit_count(), "|C(X')|": int(t.values[b]).bit_count(),
    })


def check_substitutability(C, guard: int = None) -> Report:
    """C(X) minus x is within C(X minus x), for every X and x in X."""
    t = _table_for(C, guard)
    hit = kernels.substitutability_witness(t.values, t.n)
    if hit is None:
        return Report("substitutability", True)
    a, low = hit
    return Report("substitutability", False, {
        "X": _ids(t, a), "x": _ids(t, low)[0],
        "C(X)": _ids(t, t.values[a]), "C(X-x)": _ids(t, t.values[a ^ low]),
    })


def check_irc(C, guard: int = None) -> Report:
    """Removing a rejected contract leaves the choice unchanged."""
    t = _table_for(C, guard)
    hit = kernels.irc_witness(t.values, t.n)
    if hit is None:
        return Report("irrelevance-of-rejected-contracts", True)
    a, low = hit
    return Report("irrelevance-of-rejected-contracts", False, {
        "X": _ids(t, a), "x": _ids(t, low)[0],
        "C(X)": _ids(t, t.values[a]), "C(X-x)": _ids(t, t.values[a ^ low]),
    })


CHOICE_CHECKS = {
    "path-independence": check_path_independence,
    "size-monotonicity": check_size_monotonicity,
    "substitutability": check_substitutability,
    "irc": check_irc,
}
