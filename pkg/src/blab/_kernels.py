"""Compiled inner loops.

All kernels work on plain int64 arrays.  A map is ``(twin, nxt, origin)``,
optionally with ``prv`` (the inverse of ``nxt``) when it is being mutated.
The face permutation is ``phi(d) = nxt[twin[d]]``.
"""
import numpy as np
from numba import njit

# ---------------------------------------------------------------- canonical


@njit(cache=True)
def _code_from_root(twin, nxt, root, label, order, code):
    m = twin.shape[0]
    for i in range(m):
        label[i] = -1
    label[root] = 0
    order[0] = root
    head = 0
    tail = 1
    while head < tail:
        d = order[head]
        head += 1
        a = nxt[d]
        if label[a] < 0:
            label[a] = tail
            order[tail] = a
            tail += 1
        b = twin[d]
        if label[b] < 0:
            label[b] = tail
            order[tail] = b
            tail += 1
    for i in range(m):
        d = order[i]
        code[2 * i] = label[twin[d]]
        code[2 * i + 1] = label[nxt[d]]
    return tail


@njit(cache=True)
def canonical_code(twin, nxt):
    """Lexicographically smallest BFS code over all root darts.

    Returns ``(code, n_best)`` where ``n_best`` counts the roots attaining the
    minimum, i.e. the order of the orientation-preserving automorphism group.
    """
    m = twin.shape[0]
    label = np.empty(m, np.int64)
    order = np.empty(m, np.int64)
    best = np.empty(2 * m, np.int64)
    cur = np.empty(2 * m, np.int64)
    n_best = 0
    for root in range(m):
        _code_from_root(twin, nxt, root, label, order, cur)
        if n_best == 0:
            best[:] = cur
            n_best = 1
            continue
        cmp = 0
        for i in range(2 * m):
            if cur[i] != best[i]:
                cmp = -1 if cur[i] < best[i] else 1
                break
        if cmp < 0:
            best[:] = cur
            n_best = 1
        elif cmp == 0:
            n_best += 1
    return best, n_best


@njit(cache=True)
def reachable_darts(twin, nxt):
    m = twin.shape[0]
    label = np.empty(m, np.int64)
    order = np.empty(m, np.int64)
    code = np.empty(2 * m, np.int64)
    if m == 0:
        return 0
    return _code_from_root(twin, nxt, 0, label, order, code)


# -------------------------------------------------------------------- flips

FLIP_OK = 0
FLIP_SAME_FACE = 1
FLIP_LOOP = 2
FLIP_EXISTING = 3
FLIP_NOT_TRIANGLE = 4


@njit(cache=True)
def flip_check(twin, nxt, origin, d, simple):
    t = twin[d]
    g1 = nxt[twin[d]]
    g2 = nxt[twin[g1]]
    if nxt[twin[g2]] != d:
        return FLIP_NOT_TRIANGLE
    h1 = nxt[twin[t]]
    h2 = nxt[twin[h1]]
    if nxt[twin[h2]] != t:
        return FLIP_NOT_TRIANGLE
    if t == g1 or t == g2:
        return FLIP_SAME_FACE
    if simple:
        x = origin[h2]
        w = origin[g2]
        if x == w:
            return FLIP_LOOP
        e = h2
        while True:
            if origin[twin[e]] == w:
                return FLIP_EXISTING
            e = nxt[e]
            if e == h2:
                break
    return FLIP_OK


@njit(cache=True)
def flip_apply(twin, nxt, prv, origin, d):
    """Rewire edge ``d`` into the other diagonal of its quadrilateral.

    After the call ``d`` runs from the apex of the face of ``twin[d]`` to the
    apex of the face of ``d``; ``twin[d]`` runs the other way.
    """
    t = twin[d]
    g1 = nxt[t]
    g2 = nxt[twin[g1]]
    h1 = nxt[d]
    h2 = nxt[twin[h1]]
    x = origin[h2]
    w = origin[g2]
    # unlink d and t from their rotations
    p = prv[d]
    q = nxt[d]
    nxt[p] = q
    prv[q] = p
    p = prv[t]
    q = nxt[t]
    nxt[p] = q
    prv[q] = p
    # d goes right after x->u at x, t right after w->v at w
    a = twin[h1]
    b = nxt[a]
    nxt[a] = d
    prv[d] = a
    nxt[d] = b
    prv[b] = d
    a = twin[g1]
    b = nxt[a]
    nxt[a] = t
    prv[t] = a
    nxt[t] = b
    prv[b] = t
    origin[d] = x
    origin[t] = w


@njit(cache=True, nogil=True)
def run_flips(twin, nxt, prv, origin, proposals, simple):
    """Lazy flip chain: each proposed dart is flipped iff it is flippable."""
    accepted = 0
    for k in range(proposals.shape[0]):
        d = proposals[k]
        if flip_check(twin, nxt, origin, d, simple) == FLIP_OK:
            flip_apply(twin, nxt, prv, origin, d)
            accepted += 1
    return accepted


# ---------------------------------------------------------------- distances


@njit(cache=True)
def adjacency(twin, origin, n):
    m = twin.shape[0]
    indptr = np.zeros(n + 1, np.int64)
    for d in range(m):
        indptr[origin[d] + 1] += 1
    for v in range(n):
        indptr[v + 1] += indptr[v]
    fill = indptr[:-1].copy()
    indices = np.empty(m, np.int64)
    for d in range(m):
        u = origin[d]
        indices[fill[u]] = origin[twin[d]]
        fill[u] += 1
    return indptr, indices


@njit(cache=True, nogil=True)
def bfs(indptr, indices, src, dist, queue):
    """Hop distances from ``src`` into ``dist``; returns the eccentricity."""
    n = indptr.shape[0] - 1
    for v in range(n):
        dist[v] = -1
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = dv
                queue[tail] = w
                tail += 1
    return dist[queue[tail - 1]]


@njit(cache=True, nogil=True)
def all_pairs(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.empty((n, n), np.int64)
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(n):
        bfs(indptr, indices, s, dist, queue)
        out[s, :] = dist
    return out


@njit(cache=True, nogil=True)
def exact_diameter(indptr, indices):
    """Hop diameter by eccentricity bounding.

    Keeps lower/upper eccentricity bounds for every vertex and runs BFS only
    from vertices that can still change the answer.  Returns
    ``(diameter, bfs_count)``.
    """
    n = indptr.shape[0] - 1
    if n <= 1:
        return 0, 0
    lo = np.zeros(n, np.int64)
    hi = np.full(n, n, np.int64)
    active = np.ones(n, np.bool_)
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    dlow = 0
    dhigh = n
    n_bfs = 0
    pick_high = True
    n_active = n
    while n_active > 0 and dlow < dhigh:
        v = -1
        for u in range(n):
            if not active[u]:
                continue
            if v < 0:
                v = u
            elif pick_high:
                if hi[u] > hi[v] or (hi[u] == hi[v] and lo[u] < lo[v]):
                    v = u
            else:
                if lo[u] < lo[v] or (lo[u] == lo[v] and hi[u] > hi[v]):
                    v = u
        pick_high = not pick_high
        ecc = bfs(indptr, indices, v, dist, queue)
        n_bfs += 1
        if ecc > dlow:
            dlow = ecc
        dhigh = 0
        for u in range(n):
            du = dist[u]
            l = ecc - du
            if du > l:
                l = du
            if l > lo[u]:
                lo[u] = l
            if lo[u] > dlow:
                dlow = lo[u]
            h = ecc + du
            if h < hi[u]:
                hi[u] = h
            if hi[u] > dhigh:
                dhigh = hi[u]
        lo[v] = ecc
        hi[v] = ecc
        active[v] = False
        n_active = 0
        for u in range(n):
            if active[u]:
                if hi[u] <= dlow or lo[u] == hi[u]:
                    active[u] = False
                else:
                    n_active += 1
    return dlow, n_bfs


@njit(cache=True, nogil=True)
def ball_counts(indptr, indices, centers, rmax):
    """Sum over centers of |B(c, r)| for r = 0..rmax."""
    n = indptr.shape[0] - 1
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    total = np.zeros(rmax + 1, np.float64)
    shell = np.zeros(rmax + 1, np.int64)
    for c in centers:
        bfs(indptr, indices, c, dist, queue)
        shell[:] = 0
        for v in range(n):
            dv = dist[v]
            if dv <= rmax:
                shell[dv] += 1
        acc = 0
        for r in range(rmax + 1):
            acc += shell[r]
            total[r] += acc
    return total
