# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int popcount(u64 x) nogil:
    return __builtin_popcountll(x)


cdef inline int lowbit_index(u64 x) nogil:
    return __builtin_ctzll(x)


cdef bint _augment(int e, const u64[:] adj, u64* visited, int* owner) noexcept nogil:
    cdef u64 avail = adj[e] & ~visited[0]
    cdef u64 low
    cdef int seat
    while avail:
        low = avail & (~avail + 1)
        avail ^= low
        visited[0] |= low
        seat = lowbit_index(low)
        if owner[seat] < 0 or _augment(owner[seat], adj, visited, owner):
            owner[seat] = e
            return True
    return False


def transversal_rank(u64 mask, const u64[:] adj):
    cdef int owner[64]
    cdef int i, e
    cdef int size = 0
    cdef u64 rest = mask
    cdef u64 low
    cdef u64 visited
    for i in range(64):
        owner[i] = -1
    with nogil:
        while rest:
            low = rest & (~rest + 1)
            rest ^= low
            e = lowbit_index(low)
            visited = 0
            if adj[e] and _augment(e, adj, &visited, owner):
                size += 1
    return size


def path_independence_witness(const u64[:] table, int n):
    cdef u64 full = (<u64>1 << n) - 1
    cdef u64 a, b, ca
    for a in range(full + 1):
        ca = table[a]
        for b in range(full + 1):
            if table[a | b] != table[ca | b]:
                return a, b
    return None


def size_monotonicity_witness(const u64[:] table, int n):
    cdef u64 full = (<u64>1 << n) - 1
    cdef u64 a, free, low
    cdef int size
    for a in range(full + 1):
        size = popcount(table[a])
        free = full & ~a
        while free:
            low = free & (~free + 1)
            free ^= low
            if popcount(table[a | low]) < size:
                return a, a | low
    return None


def substitutability_witness(const u64[:] table, int n):
    cdef u64 full = (<u64>1 << n) - 1
    cdef u64 a, rest, low, chosen
    for a in range(full + 1):
        chosen = table[a]
        rest = a
        while rest:
            low = rest & (~rest + 1)
            rest ^= low
            if (chosen & ~low) & ~table[a ^ low]:
                return a, low
    return None


def irc_witness(const u64[:] table, int n):
    cdef u64 full = (<u64>1 << n) - 1
    cdef u64 a, rejected, low, chosen
    for a in range(full + 1):
        chosen = table[a]
        rejected = a & ~chosen
        while rejected:
            low = rejected & (~rejected + 1)
            rejected ^= low
            if table[a ^ low] != chosen:
                return a, low
    return None


def rank_table(const unsigned char[:] indep, int n):
    cdef Py_ssize_t size = (<Py_ssize_t>1) << n
    ranks = bytearray(size)
    cdef unsigned char[:] out = ranks
    cdef Py_ssize_t s
    cdef u64 rest, low
    cdef unsigned char best, r
    for s in range(size):
        if indep[s]:
            out[s] = popcount(<u64>s)
            continue
        best = 0
        rest = <u64>s
        while rest:
            low = rest & (~rest + 1)
            rest ^= low
            r = out[<u64>s ^ low]
            if r > best:
                best = r
        out[s] = best
    return ranks


def independence_witness(const unsigned char[:] indep, const unsigned char[:] ranks, int n):
    cdef u64 size = (<u64>1) << n
    cdef u64 full = size - 1
    cdef u64 s, rest, low, closure, free, j
    cdef int target
    if not indep[0]:
        return 1, 0, 0
    for s in range(size):
        if not indep[s]:
            continue
        rest = s
        while rest:
            low = rest & (~rest + 1)
            rest ^= low
            if not indep[s ^ low]:
                return 2, s ^ low, s
    for s in range(size):
        if not indep[s]:
            continue
        closure = s
        free = full & ~s
        while free:
            low = free & (~free + 1)
            free ^= low
            if not indep[s | low]:
                closure |= low
        if ranks[closure] > popcount(s):
            target = popcount(s) + 1
            for j in range(size):
                if (j & ~closure) == 0 and indep[j] and popcount(j) == target:
                    return 3, s, j
            return 3, s, 0
    return None


def rank_witness(const unsigned char[:] ranks, int n):
    cdef u64 size = (<u64>1) << n
    cdef u64 full = size - 1
    cdef u64 s, free, low, others, lo_a, lo_b
    for s in range(size):
        if ranks[s] > popcount(s):
            return 1, s, 0
    for s in range(size):
        free = full & ~s
        while free:
            low = free & (~free + 1)
            free ^= low
            if ranks[s] > ranks[s | low]:
                return 2, s, s | low
    for s in range(size):
        free = full & ~s
        while free:
            lo_a = free & (~free + 1)
            free ^= lo_a
            others = free
            while others:
                lo_b = others & (~others + 1)
                others ^= lo_b
                if <int>ranks[s | lo_a | lo_b] + ranks[s] > <int>ranks[s | lo_a] + ranks[s | lo_b]:
                    return 3, s | lo_a, s | lo_b
    return None


def base_exchange_witness(const unsigned char[:] indep, const unsigned char[:] ranks, int n):
    cdef u64 size = (<u64>1) << n
    cdef u64 s, sub, y, y2, out, into, lo_x, lo_y
    cdef int r, count, p, q
    cdef bint ok
    cdef u64[:] bases
    from array import array
    buf = array("Q", bytes(8 * size))
    bases = buf
    for s in range(size):
        r = ranks[s]
        count = 0
        sub = s
        while True:
            if indep[sub] and popcount(sub) == r:
                bases[count] = sub
                count += 1
            if sub == 0:
                break
            sub = (sub - 1) & s
        for p in range(count - 1, -1, -1):
            y = bases[p]
            for q in range(count - 1, -1, -1):
                y2 = bases[q]
                out = y & ~y2
                while out:
                    lo_x = out & (~out + 1)
                    out ^= lo_x
                    ok = False
                    into = y2 & ~y
                    while into:
                        lo_y = into & (~into + 1)
                        into ^= lo_y
                        if indep[(y ^ lo_x) | lo_y]:
                            ok = True
                            break
                    if not ok:
                        return s, y, y2, lo_x
    return None
