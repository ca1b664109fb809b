"""Punctual choice axioms with their matching-level extensions.

Direct matching checkers live here too, for comparison with the extensions.

A punctual axiom is a membership predicate ``member(X, Y)``: is ``Y`` an
allowed choice from problem ``X``? (``Y`` is a subset of ``X`` by contract.)
Its extension holds at matching ``X`` when ``member(D_i(X), X_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from matchforge.choice import ChoiceFunction
from matchforge.errors import SpecError
from matchforge.guards import TABULATION_LIMIT, require
from matchforge.matroid import Matroid
from matchforge.model import Problem, demand, members, submasks
from matchforge.reports import Report
from matchforge.spaces import enumerate_matchings


@dataclass(frozen=True)
class InstitutionData:
    """What the built-in axioms may consult about one institution."""

    name: str
    ground: int
    capacity: Optional[int] = None
    priority: Optional[tuple] = None
    returning: int = 0
    oracle: Optional[Matroid] = None

    @classmethod
    def of(cls, problem: Problem, institution: str) -> "InstitutionData":
        spec = problem.institutions[institution]
        ground = problem.institution_mask(institution)
        return cls(institution, ground, spec.capacity, tuple(spec.priority),
                   spec.returning_mask, spec.oracle(ground))


@dataclass(frozen=True)
class PunctualAxiom:
    name: str
    institution: str
    member: Callable[[int, int], bool]
    title: str = ""

    def __call__(self, X: int, Y: int) -> bool:
        return self.member(X, Y)


@dataclass(frozen=True)
class MatchingAxiom:
    """``check(problem, X)`` returns None when satisfied, else a witness dict."""

    name: str
    check: Callable[[Problem, int], Optional[dict]]
    title: str = ""
    institution: Optional[str] = None

    def holds(self, problem: Problem, X: int) -> bool:
        return self.check(problem, X) is None


TITLES = {
    "non-wastefulness": "non-wastefulness",
    "no-justified-envy": "no justified envy",
    "guaranteed-enrollment": "guaranteed enrollment for returning students",
    "maximal-utilization": "maximal utilization of reservations",
    "no-justified-envy-under-reserves": "no justified envy under reserves",
    "feasibility": "feasibility",
    "rank-maximality": "rank maximality",
    "no-justified-envy-under-rank": "no justified envy under rank",
    "matroidal-objectives": "matroidal objectives",
    "individual-rationality": "individual rationality",
    "stability": "stability",
    "strategy-proofness": "strategy-proofness",
}

AXIOM_SETS = {
    "responsive": ("non-wastefulness", "no-justified-envy"),
    "chile": ("guaranteed-enrollment", "maximal-utilization", "no-justified-envy-under-reserves", "non-wastefulness"),
    "greedy": ("feasibility", "rank-maximality", "no-justified-envy-under-rank"),
    "matroid": ("matroidal-objectives", "no-justified-envy-under-rank", "non-wastefulness"),
}

# choice rule -> name of the axiom set that characterizes it
CHARACTERIZING_SET = {
    "responsive": "responsive",
    "guaranteed-enrollment": "chile",
    "greedy": "greedy",
    "matroid": "matroid",
}

_NEEDS = {
    "non-wastefulness": ("capacity",),
    "no-justified-envy": ("priority",),
    "guaranteed-enrollment": (),
    "maximal-utilization": ("capacity", "oracle"),
    "no-justified-envy-under-reserves": ("priority", "oracle"),
    "feasibility": ("oracle",),
    "rank-maximality": ("oracle",),
    "no-justified-envy-under-rank": ("priority", "oracle"),
    "matroidal-objectives": ("oracle",),
}


def _require(name, data):
    if name not in _NEEDS:
        raise ValueError(f"unknown punctual axiom {name!r}")
    for attr in _NEEDS[name]:
        if getattr(data, attr) is None:
            raise SpecError(f"axiom {name!r} needs institution {attr} for {data.name!r}")


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def builtin_axiom(name: str, data: InstitutionData) -> PunctualAxiom:
    """Construct one of the library's punctual axioms for an institution."""
    _require(name, data)
    q = data.capacity
    ret = data.returning
    r = data.oracle.rank if data.oracle is not None else None
    if data.priority is not None:
        pos = {x: k for k, x in enumerate(data.priority)}
        prio = {1 << x: k for x, k in pos.items()}
    else:
        prio = None

    if name == "non-wastefulness":
        def member(X, Y):
            return Y.bit_count() == min(X.bit_count(), q)

    elif name == "no-justified-envy":
        def member(X, Y):
            rejected = X & ~Y
            if not Y or not rejected:
                return True
            return max(prio[b] for b in _bits(Y)) < min(prio[b] for b in _bits(rejected))

    elif name == "guaranteed-enrollment":
        def member(X, Y):
            return X & ret & ~Y == 0

    elif name == "maximal-utilization":
        def member(X, Y):
            size = Y.bit_count()
            if size > q:
                return False
            rY = r(Y)
            rejected = X & ~Y
            if size < q:
                return all(r(Y | x) == rY for x in _bits(rejected))
            for x in _bits(rejected):
                for y in _bits(Y & ~ret):
                    if r((Y ^ y) | x) > rY:
                        return False
            return True

    elif name == "no-justified-envy-under-reserves":
        def member(X, Y):
            rY = None
            for x in _bits(Y & ~ret):
                for y in _bits(X & ~Y):
                    if prio[y] < prio[x]:
                        if rY is None:
                            rY = r(Y)
                        if r((Y ^ x) | y) >= rY:
                            return False
            return True

    elif name == "feasibility":
        indep = data.oracle.is_independent

        def member(X, Y):
            return indep(Y)

    elif name in ("rank-maximality", "matroidal-objectives"):
        # matroidal objectives asks r(Y) >= r(X') for all X' within X, which by
        # monotonicity of rank is r(Y) >= r(X); Y within X makes it equality.
        def member(X, Y):
            return r(Y) == r(X)

    elif name == "no-justified-envy-under-rank":
        def member(X, Y):
            rY = None
            for x in _bits(Y):
                for y in _bits(X & ~Y):
                    if prio[y] < prio[x]:
                        if rY is None:
                            rY = r(Y)
                        if r((Y ^ x) | y) >= rY:
                            return False
            return True

    return PunctualAxiom(name, data.name, member, TITLES[name])


def matroidal_objectives_by_quantifier(data: InstitutionData) -> PunctualAxiom:
    """Matroidal objectives with its literal inner quantifier over subsets of X."""
    r = data.oracle.rank
    return PunctualAxiom("matroidal-objectives", data.name,
                         lambda X, Y: all(r(Y) >= r(sub) for sub in submasks(X)),
                         TITLES["matroidal-objectives"])


def builtin_axioms(names: Iterable[str], data: InstitutionData) -> list[PunctualAxiom]:
    """Axioms by name or by set name (``chile``, ``greedy``, ``matroid``, ``responsive``)."""
    out = []
    for name in names:
        for n in AXIOM_SETS.get(name, (name,)):
            out.append(builtin_axiom(n, data))
    return out


def satisfies_punctual(C: ChoiceFunction, phi: PunctualAxiom, guard: int = TABULATION_LIMIT) -> Report:
    """C(X) is an allowed choice at every X (first failing X is the witness)."""
    require(C.ground.bit_count(), guard, f"punctual check of {C.name}")
    for X in submasks(C.ground):
        Y = C(X)
        if not phi.member(X, Y):
            return Report(phi.name, False, {"X": members(X), "C(X)": members(Y)})
    return Report(phi.name, True)


# -- extensions --------------------------------------------------------------

def extend(phi: PunctualAxiom) -> MatchingAxiom:
    """The matching axiom: X_i is an allowed choice from the demand D_i(X)."""
    i = phi.institution

    def check(problem, X):
        D = demand(problem, X, i)
        Xi = X & problem.institution_mask(i)
        if phi.member(D, Xi):
            return None
        return {"institution": i, "demand": members(D), "X_i": members(Xi)}

    return MatchingAxiom(phi.name, check, phi.title, i)


def extended_axioms(problem: Problem, names: Iterable[str]) -> list[MatchingAxiom]:
    """Extensions of the named punctual axioms at every institution."""
    out = []
    for i in problem.institutions:
        data = InstitutionData.of(problem, i)
        out.extend(extend(phi) for phi in builtin_axioms(names, data))
    return out


# -- direct matching axioms ---------------------------------------------------

def _improvers(problem: Problem, X: int, i: str):
    """Contracts of i outside X that their agent strictly prefers to their match."""
    for x in members(problem.institution_mask(i) & ~X):
        agent = problem.contracts[x].agent
        if problem.preferences[agent].prefers(x, problem.assignment(X, agent)):
            yield x


def individual_rationality(problem: Problem, X: int) -> Optional[dict]:
    for agent in problem.agents:
        x = problem.assignment(X, agent)
        if x is not None and not problem.preferences[agent].acceptable(x):
            return {"agent": agent, "contract": x}
    return None


def _per_institution(fn):
    def check(problem, X, institution=None):
        names = problem.institutions if institution is None else (institution,)
        for i in names:
            hit = fn(problem, X, InstitutionData.of(problem, i))
            if hit is not None:
                return {"institution": i, **hit}
        return None

    check.__name__ = fn.__name__
    check.__doc__ = fn.__doc__
    return check


@_per_institution
def non_wastefulness(problem, X, d):
    """|X_i| <= q_i, and an agent preferring i's contract implies i is full."""
    Xi = X & d.ground
    if Xi.bit_count() > d.capacity:
        return {"over-capacity": members(Xi)}
    if Xi.bit_count() < d.capacity:
        for x in _improvers(problem, X, d.name):
            return {"contract": x}
    return None


@_per_institution
def no_justified_envy(problem, X, d):
    pos = {x: k for k, x in enumerate(d.priority)}
    Xi = members(X & d.ground)
    for x in _improvers(problem, X, d.name):
        for y in Xi:
            if pos[x] < pos[y]:
                return {"contract": x, "over": y}
    return None


@_per_institution
def guaranteed_enrollment(problem, X, d):
    for x in members(d.returning & ~X):
        agent = problem.contracts[x].agent
        if not problem.preferences[agent].prefers(problem.assignment(X, agent), x):
            return {"contract": x}
    return None


@_per_institution
def maximal_utilization(problem, X, d):
    """Demanded outside contracts cannot raise the rank by taking an empty seat
    or by replacing a non-returning contract. Also requires |X_i| <= q_i."""
    r = d.oracle.rank
    Xi = X & d.ground
    size = Xi.bit_count()
    if size > d.capacity:
        return {"over-capacity": members(Xi)}
    rX = r(Xi)
    for x in _improvers(problem, X, d.name):
        bit = 1 << x
        if size < d.capacity:
            if r(Xi | bit) != rX:
                return {"contract": x, "case": "empty-seat"}
        else:
            for y in members(Xi & ~d.returning):
                if r((Xi & ~(1 << y)) | bit) > rX:
                    return {"contract": x, "replacing": y}
    return None


@_per_institution
def no_justified_envy_under_reserves(problem, X, d):
    r = d.oracle.rank
    pos = {x: k for k, x in enumerate(d.priority)}
    Xi = X & d.ground
    rX = r(Xi)
    for x in _improvers(problem, X, d.name):
        for y in members(Xi & ~d.returning):
            if pos[x] < pos[y] and r((Xi & ~(1 << y)) | 1 << x) >= rX:
                return {"contract": x, "over": y}
    return None


@_per_institution
def feasibility(problem, X, d):
    Xi = X & d.ground
    if not d.oracle.is_independent(Xi):
        return {"X_i": members(Xi)}
    return None


@_per_institution
def rank_maximality(problem, X, d):
    r = d.oracle.rank
    Xi = X & d.ground
    rX = r(Xi)
    for x in _improvers(problem, X, d.name):
        if r(Xi | 1 << x) != rX:
            return {"contract": x}
    return None


@_per_institution
def no_justified_envy_under_rank(problem, X, d):
    r = d.oracle.rank
    pos = {x: k for k, x in enumerate(d.priority)}
    Xi = X & d.ground
    rX = r(Xi)
    for y in _improvers(problem, X, d.name):
        for x in members(Xi):
            if pos[y] < pos[x] and r((Xi & ~(1 << x)) | 1 << y) >= rX:
                return {"contract": y, "over": x}
    return None


@_per_institution
def matroidal_objectives(problem, X, d):
    r = d.oracle.rank
    Xi = X & d.ground
    rX = r(Xi)
    for x in _improvers(problem, X, d.name):
        if r(Xi | 1 << x) != rX:
            return {"contract": x}
    return None


_DIRECT = {
    "non-wastefulness": non_wastefulness,
    "no-justified-envy": no_justified_envy,
    "guaranteed-enrollment": guaranteed_enrollment,
    "maximal-utilization": maximal_utilization,
    "no-justified-envy-under-reserves": no_justified_envy_under_reserves,
    "feasibility": feasibility,
    "rank-maximality": rank_maximality,
    "no-justified-envy-under-rank": no_justified_envy_under_rank,
    "matroidal-objectives": matroidal_objectives,
}


def direct_axiom(name: str, institution: str = None) -> MatchingAxiom:
    if name == "individual-rationality":
        return MatchingAxiom(name, individual_rationality, TITLES[name])
    fn = _DIRECT[name]
    return MatchingAxiom(name, lambda p, X: fn(p, X, institution), TITLES[name], institution)


def matching_axiom_library() -> list[MatchingAxiom]:
    return [direct_axiom("individual-rationality")] + [direct_axiom(n) for n in _DIRECT]


MATCHING_AXIOMS = ("individual-rationality",) + tuple(_DIRECT)


def verify_extension_equivalence(name: str, fixtures: Iterable[Problem]) -> Report:
    """extend(phi_i) and the direct checker agree at every institution, on every
    matching of every fixture problem."""
    compared = 0
    for problem in fixtures:
        matchings = enumerate_matchings(problem)
        for i in problem.institutions:
            data = InstitutionData.of(problem, i)
            ext = extend(builtin_axiom(name, data))
            direct = direct_axiom(name, i)
            for X in matchings:
                a = ext.holds(problem, X)
                b = direct.holds(problem, X)
                compared += 1
                if a != b:
                    return Report(f"extension-equivalence:{name}", False,
                                  {"institution": i, "matching": members(X), "extension": a, "direct": b},
                                  details={"compared": compared})
    return Report(f"extension-equivalence:{name}", True, details={"compared": compared})
