"""Independent brute-force oracles.

Nothing here calls the package's kernels or rule code: sets are Python
frozensets and every quantity is computed by plain enumeration.
"""
import itertools


def subsets(items):
    items = sorted(items)
    for k in range(len(items) + 1):
        for combo in itertools.combinations(items, k):
            yield frozenset(combo)


def seats_of(reserves):
    """One seat token per reserved position, as (type, k)."""
    return [(t, k) for t in sorted(reserves) for k in range(reserves[t])]


def has_seat_assignment(elements, traits, reserves):
    """Can every element take a distinct seat of one of its traits?"""
    elements = sorted(elements)
    seats = seats_of(reserves)
    if len(elements) > len(seats):
        return False
    for chosen in itertools.permutations(seats, len(elements)):
        if all(seat[0] in traits.get(e, ()) for e, seat in zip(elements, chosen)):
            return True
    return False


def transversal_rank(X, traits, reserves):
    return max(len(S) for S in subsets(X) if has_seat_assignment(S, traits, reserves))


def rank_from(independent, X):
    return max(len(S) for S in subsets(X) if independent(S))


def greedy_choice(independent, priority, X):
    kept = frozenset()
    for x in priority:
        if x in X and independent(kept | {x}):
            kept = kept | {x}
    return kept


def chile_allowed(X, q, priority, returning, rank):
    """Every Y within X meeting the four returning-student/reserve axioms,
    written straight from their definitions."""
    pos = {x: k for k, x in enumerate(priority)}
    out = []
    for Y in subsets(X):
        if len(Y) != min(len(X), q):
            continue
        if not (X & returning) <= Y:
            continue
        rY = rank(Y)
        rejected = X - Y
        if len(Y) < q and any(rank(Y | {x}) == rY + 1 for x in rejected):
            continue
        if len(Y) == q and any(rank((Y - {y}) | {x}) > rY for x in rejected for y in Y - returning):
            continue
        if any(pos[y] < pos[x] and rank((Y - {x}) | {y}) >= rY for x in Y - returning for y in rejected):
            continue
        out.append(Y)
    return out


def stable_matchings(agents, contracts, prefs, choose):
    """Brute-force stable matchings.

    ``contracts``: id -> (agent, institution); ``prefs``: agent -> list
    (best first, acceptable only); ``choose(institution, frozenset)``.
    """
    options = [[None] + [x for x, (a, _) in contracts.items() if a == agent] for agent in agents]
    found = []
    for combo in itertools.product(*options):
        X = frozenset(x for x in combo if x is not None)
        held = {a: x for a, x in zip(agents, combo)}

        def rank(agent, x):
            order = prefs[agent]
            if x is None:
                return len(order)
            return order.index(x) if x in order else len(order) + 1

        if any(x is not None and x not in prefs[a] for a, x in held.items()):
            continue
        insts = {i for _, i in contracts.values()}
        Xi = {i: frozenset(x for x in X if contracts[x][1] == i) for i in insts}
        if any(choose(i, Xi[i]) != Xi[i] for i in insts):
            continue
        blocked = False
        for x, (a, i) in contracts.items():
            if x not in X and rank(a, x) < rank(a, held[a]) and x in choose(i, Xi[i] | {x}):
                blocked = True
                break
        if not blocked:
            found.append(X)
    return found


def hall_independent(S, traits, reserves):
    """Hall's condition: every T within S sees at least |T| seats."""
    for T in subsets(S):
        types = set().union(*(traits.get(e, ()) for e in T)) if T else set()
        if sum(reserves.get(t, 0) for t in types) < len(T):
            return False
    return True


def rank_table(ground, independent):
    """frozenset -> rank for every subset of ``ground``, by max independent subset."""
    indep = {S: independent(S) for S in subsets(ground)}
    ranks = {}
    for X in subsets(ground):
        ranks[X] = max(len(S) for S in subsets(X) if indep[S])
    return indep, ranks


def matroid_allowed(X, q, priority, rank):
    """Every Y within X meeting matroidal objectives, no justified envy
    under rank, and non-wastefulness, straight from the definitions."""
    pos = {x: k for k, x in enumerate(priority)}
    out = []
    for Y in subsets(X):
        if len(Y) != min(len(X), q):
            continue
        rY = rank(Y)
        if any(rY < rank(Z) for Z in subsets(X)):
            continue
        if any(pos[y] < pos[x] and rank((Y - {x}) | {y}) >= rY for x in Y for y in X - Y):
            continue
        out.append(Y)
    return out
