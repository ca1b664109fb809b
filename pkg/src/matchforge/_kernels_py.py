"""Pure-Python kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and the same scan order, so witnesses agree between backends.
Tables are indexed by *local* bitmasks over an n-element ground set.
"""


def transversal_rank(mask, adj):
    """Maximum matching size between the elements of ``mask`` and seats.

    ``adj[e]`` is the bitmask of seats element ``e`` may occupy.
    Augmenting paths (Kuhn) over seat bitsets; at most 64 seats.
    """
    owner = {}

    def augment(e, visited):
        avail = adj[e] & ~visited[0]
        while avail:
            low = avail & -avail
            avail ^= low
            visited[0] |= low
            holder = owner.get(low)
            if holder is None or augment(holder, visited):
                owner[low] = e
                return True
        return False

    size = 0
    rest = mask
    while rest:
        low = rest & -rest
        rest ^= low
        e = low.bit_length() - 1
        if adj[e] and augment(e, [0]):
            size += 1
    return size


def path_independence_witness(table, n):
    full = (1 << n) - 1
    for a in range(full + 1):
        ca = table[a]
        for b in range(full + 1):
            if table[a | b] != table[ca | b]:
                return a, b
    return None


def size_monotonicity_witness(table, n):
    full = (1 << n) - 1
    for a in range(full + 1):
        size = table[a].bit_count()
        free = full & ~a
        while free:
            low = free & -free
            free ^= low
            if table[a | low].bit_count() < size:
                return a, a | low
    return None


def substitutability_witness(table, n):
    full = (1 << n) - 1
    for a in range(full + 1):
        chosen = table[a]
        rest = a
        while rest:
            low = rest & -rest
            rest ^= low
            if (chosen & ~low) & ~table[a ^ low]:
                return a, low
    return None


def irc_witness(table, n):
    full = (1 << n) - 1
    for a in range(full + 1):
        chosen = table[a]
        rejected = a & ~chosen
        while rejected:
            low = rejected & -rejected
            rejected ^= low
            if table[a ^ low] != chosen:
                return a, low
    return None


def rank_table(indep, n):
    """Largest independent subset size of every subset (no matroid assumed)."""
    size = 1 << n
    ranks = bytearray(size)
    for s in range(size):
        if indep[s]:
            ranks[s] = s.bit_count()
            continue
        best = 0
        rest = s
        while rest:
            low = rest & -rest
            rest ^= low
            r = ranks[s ^ low]
            if r > best:
                best = r
        ranks[s] = best
    return ranks


def independence_witness(indep, ranks, n):
    """First violation of I1/I2/I3 as ``(code, a, b)`` or None.

    code 1: I1, empty set dependent.
    code 2: I2, ``a`` is a subset of independent ``b`` but dependent.
    code 3: I3, independent ``a`` and ``b`` with |a| < |b| and no element of
    b \\ a extends a.
    """
    size = 1 << n
    full = size - 1
    if not indep[0]:
        return 1, 0, 0
    for s in range(size):
        if not indep[s]:
            continue
        rest = s
        while rest:
            low = rest & -rest
            rest ^= low
            if not indep[s ^ low]:
                return 2, s ^ low, s
    for s in range(size):
        if not indep[s]:
            continue
        closure = s
        free = full & ~s
        while free:
            low = free & -free
            free ^= low
            if not indep[s | low]:
                closure |= low
        if ranks[closure] > s.bit_count():
            target = s.bit_count() + 1
            sub = 0
            # smallest mask J within the closure, independent, |J| = |s| + 1
            for j in range(size):
                if j & ~closure == 0 and indep[j] and j.bit_count() == target:
                    sub = j
                    break
            return 3, s, sub
    return None


def rank_witness(ranks, n):
    """First violation of R1/R2/R3 (local forms) as ``(code, a, b)`` or None.

    code 1: R1 fails at ``a``. code 2: R2 fails for ``a`` within ``b``.
    code 3: R3 fails for the pair ``(a, b)``.
    """
    size = 1 << n
    full = size - 1
    for s in range(size):
        if ranks[s] > s.bit_count():
            return 1, s, 0
    for s in range(size):
        free = full & ~s
        while free:
            low = free & -free
            free ^= low
            if ranks[s] > ranks[s | low]:
                return 2, s, s | low
    for s in range(size):
        free = full & ~s
        while free:
            lo_a = free & -free
            free ^= lo_a
            others = free
            while others:
                lo_b = others & -others
                others ^= lo_b
                if ranks[s | lo_a | lo_b] + ranks[s] > ranks[s | lo_a] + ranks[s | lo_b]:
                    return 3, s | lo_a, s | lo_b
    return None


def base_exchange_witness(indep, ranks, n):
    """First violation of base exchange as ``(x_set, y, y2, elem)`` or None."""
    size = 1 << n
    for s in range(size):
        r = ranks[s]
        bases = []
        sub = s
        while True:
            if indep[sub] and sub.bit_count() == r:
                bases.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & s
        bases.reverse()
        for y in bases:
            for y2 in bases:
                out = y & ~y2
                while out:
                    lo_x = out & -out
                    out ^= lo_x
                    ok = False
                    into = y2 & ~y
                    while into:
                        lo_y = into & -into
                        into ^= lo_y
                        if indep[(y ^ lo_x) | lo_y]:
                            ok = True
                            break
                    if not ok:
                        return s, y, y2, lo_x
    return None
