"""Compiled inner loops.

Graphs reach these functions as a padded neighbour table ``nbr`` of shape
``(n, cap)`` (int32, unused slots = -1) plus a degree vector ``deg``; the
first ``deg[v]`` entries of row ``v`` are sorted ascending.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


# ---------------------------------------------------------------------------
# counter-based random numbers


@njit(cache=True)
def mix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def counter_uniform(key, a, b):
    """Uniform double in [0, 1) for counter (a, b) under ``key``."""
    z = mix64(mix64(mix64(np.uint64(key)) ^ np.uint64(a)) ^ np.uint64(b))
    return np.float64(z >> np.uint64(11)) * _INV53


# ---------------------------------------------------------------------------
# adjacency primitives


@njit(cache=True)
def has_edge(nbr, deg, u, v):
    lo = 0
    hi = deg[u]
    while lo < hi:
        mid = (lo + hi) >> 1
        x = nbr[u, mid]
        if x < v:
            lo = mid + 1
        elif x > v:
            hi = mid
        else:
            return True
    return False


@njit(cache=True)
def count_common(nbr, deg, u, v):
    a = 0
    b = 0
    c = 0
    du = deg[u]
    dv = deg[v]
    while a < du and b < dv:
        x = nbr[u, a]
        y = nbr[v, b]
        if x < y:
            a += 1
        elif x > y:
            b += 1
        else:
            c += 1
            a += 1
            b += 1
    return c


@njit(cache=True)
def row_insert(nbr, deg, u, v):
    d = deg[u]
    pos = d
    while pos > 0 and nbr[u, pos - 1] > v:
        nbr[u, pos] = nbr[u, pos - 1]
        pos -= 1
    nbr[u, pos] = v
    deg[u] = d + 1


@njit(cache=True)
def row_delete(nbr, deg, u, v):
    d = deg[u]
    pos = 0
    while nbr[u, pos] != v:
        pos += 1
    while pos < d - 1:
        nbr[u, pos] = nbr[u, pos + 1]
        pos += 1
    nbr[u, d - 1] = -1
    deg[u] = d - 1


@njit(cache=True)
def row_replace(nbr, deg, u, old, new):
    """Swap neighbour ``old`` of ``u`` for ``new`` keeping the row sorted."""
    d = deg[u]
    pos = 0
    while nbr[u, pos] != old:
        pos += 1
    nbr[u, pos] = new
    while pos > 0 and nbr[u, pos - 1] > new:
        nbr[u, pos] = nbr[u, pos - 1]
        nbr[u, pos - 1] = new
        pos -= 1
    while pos < d - 1 and nbr[u, pos + 1] < new:
        nbr[u, pos] = nbr[u, pos + 1]
        nbr[u, pos + 1] = new
        pos += 1


# ---------------------------------------------------------------------------
# breadth-first search


@njit(cache=True)
def bfs(nbr, deg, source, dist, queue):
    """Fill ``dist`` with hop counts from ``source`` (-1 = unreachable).

    Returns the number of reached nodes (source included).
    """
    dist[:] = -1
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for a in range(deg[u]):
            w = nbr[u, a]
            if dist[w] < 0:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True)
def connected(nbr, deg):
    n = deg.shape[0]
    if n <= 1:
        return True
    dist = np.empty(n, np.int32)
    queue = np.empty(n, np.int32)
    return bfs(nbr, deg, 0, dist, queue) == n


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def distance_counts(nbr, deg):
    """Ordered-pair distance histogram of the whole graph.

    Bit-parallel BFS: 64 sources advance together, one bit per source in a
    word per node. ``counts[d]`` is the number of ordered pairs (s, t), s != t,
    at distance d. Returns ``(counts, unreached)`` where ``unreached`` counts
    ordered pairs with no path.
    """
    n = deg.shape[0]
    counts = np.zeros(n + 1, np.int64)
    visited = np.empty(n, np.uint64)
    frontier = np.empty(n, np.uint64)
    nxt = np.empty(n, np.uint64)
    unreached = np.int64(0)
    one = np.uint64(1)
    for base in range(0, n, 64):
        width = min(64, n - base)
        visited[:] = 0
        frontier[:] = 0
        for b in range(width):
            bit = one << np.uint64(b)
            visited[base + b] = bit
            frontier[base + b] = bit
        reached = np.int64(width)
        level = 0
        while True:
            level += 1
            grew = np.int64(0)
            for v in range(n):
                acc = np.uint64(0)
                for a in range(deg[v]):
                    acc |= frontier[nbr[v, a]]
                acc &= ~visited[v]
                nxt[v] = acc
                if acc != 0:
                    grew += _popcount(acc)
            if grew == 0:
                break
            counts[level] += grew
            reached += grew
            for v in range(n):
                visited[v] |= nxt[v]
                frontier[v] = nxt[v]
        unreached += np.int64(width) * n - reached
    return counts, unreached


@njit(cache=True)
def sampled_distance_sum(nbr, deg, sources):
    """Sum of distances and number of reached targets from ``sources``."""
    n = deg.shape[0]
    dist = np.empty(n, np.int32)
    queue = np.empty(n, np.int32)
    total = np.int64(0)
    pairs = np.int64(0)
    for s in sources:
        reached = bfs(nbr, deg, s, dist, queue)
        for t in range(reached):
            total += dist[queue[t]]
        pairs += reached - 1
    return total, pairs


# ---------------------------------------------------------------------------
# triangles


@njit(cache=True)
def triangles_per_node(nbr, deg):
    n = deg.shape[0]
    tri = np.zeros(n, np.int64)
    for u in range(n):
        for a in range(deg[u]):
            v = nbr[u, a]
            if v > u:
                c = count_common(nbr, deg, u, v)
                tri[u] += c
                tri[v] += c
    # each triangle at u is seen through both of its edges at u
    return tri // 2


# ---------------------------------------------------------------------------
# rewiring move


@njit(cache=True)
def _qualifying(nbr, deg, u, other, out):
    """Neighbours w of ``u`` whose edge (u, w) lies in no triangle."""
    m = 0
    for a in range(deg[u]):
        w = nbr[u, a]
        if w == other:
            continue
        if count_common(nbr, deg, u, w) == 0:
            out[m] = w
            m += 1
    return m


@njit(cache=True)
def move_is_valid(nbr, deg, i, i1, j, j1):
    if i == i1 or i == j or i == j1 or i1 == j or i1 == j1 or j == j1:
        return False
    if not has_edge(nbr, deg, i, i1) or not has_edge(nbr, deg, j, j1):
        return False
    if has_edge(nbr, deg, i, j) or has_edge(nbr, deg, i1, j1):
        return False
    if count_common(nbr, deg, i, j) != 0:
        return False
    if count_common(nbr, deg, i, i1) != 0 or count_common(nbr, deg, j, j1) != 0:
        return False
    if count_common(nbr, deg, i1, j1) != 0:
        return False
    return True


@njit(cache=True)
def propose(nbr, deg, key, budget):
    """Draw a valid move by rejection; ``(-1, -1, -1, -1, tries)`` on failure.

    Draw ``t`` uses counters (t, 0..3) of the stream ``key``: two for the node
    pair and one for the choice among qualifying (i1, j1) pairs.
    """
    n = deg.shape[0]
    cap = nbr.shape[1]
    qi = np.empty(cap, np.int32)
    qj = np.empty(cap, np.int32)
    pi = np.empty(cap * cap, np.int32)
    pj = np.empty(cap * cap, np.int32)
    for t in range(budget):
        i = int(counter_uniform(key, t, 0) * n)
        j = int(counter_uniform(key, t, 1) * n)
        if i == j or has_edge(nbr, deg, i, j):
            continue
        if count_common(nbr, deg, i, j) != 0:
            continue
        mi = _qualifying(nbr, deg, i, j, qi)
        if mi == 0:
            continue
        mj = _qualifying(nbr, deg, j, i, qj)
        if mj == 0:
            continue
        m = 0
        for a in range(mi):
            x = qi[a]
            for b in range(mj):
                y = qj[b]
                if x == y or has_edge(nbr, deg, x, y):
                    continue
                if count_common(nbr, deg, x, y) != 0:
                    continue
                pi[m] = x
                pj[m] = y
                m += 1
        if m == 0:
            continue
        c = int(counter_uniform(key, t, 2) * m)
        return i, pi[c], j, pj[c], t + 1
    return -1, -1, -1, -1, budget


@njit(cache=True)
def apply_swap(nbr, deg, i, i1, j, j1):
    """Remove (i,i1),(j,j1); add (i,j),(i1,j1). Degrees are unchanged."""
    row_replace(nbr, deg, i, i1, j)
    row_replace(nbr, deg, j, j1, i)
    row_replace(nbr, deg, i1, i, j1)
    row_replace(nbr, deg, j1, j, i1)


@njit(cache=True)
def revert_swap(nbr, deg, i, i1, j, j1):
    row_replace(nbr, deg, i, j, i1)
    row_replace(nbr, deg, j, i, j1)
    row_replace(nbr, deg, i1, j1, i)
    row_replace(nbr, deg, j1, i1, j)


# ---------------------------------------------------------------------------
# majority rule


@njit(cache=True)
def activation_probability(active, sigma, k, any_active_neighbour, eps):
    """Probability that a node is active after one update."""
    majority = 2 * sigma > k + 1
    if active:
        return 1.0 - eps if majority else eps
    if majority:
        return 1.0 - eps
    if any_active_neighbour:
        return eps
    return 0.0


@njit(cache=True)
def _node_update(nbr, deg, states, v, eps, u):
    s = np.int64(0)
    for a in range(deg[v]):
        s += states[nbr[v, a]]
    active = states[v] == 1
    p = activation_probability(active, s + states[v], deg[v], s > 0, eps)
    return np.int8(1) if u < p else np.int8(0)


@njit(cache=True)
def majority_sync_step(nbr, deg, states, eps, key, t):
    n = deg.shape[0]
    out = np.empty(n, np.int8)
    for v in range(n):
        out[v] = _node_update(nbr, deg, states, v, eps, counter_uniform(key, t, v))
    return out


@njit(cache=True)
def majority_async_step(nbr, deg, states, eps, key, t):
    n = deg.shape[0]
    out = states.copy()
    for r in range(n):
        v = int(counter_uniform(key, t, 2 * r) * n)
        out[v] = _node_update(nbr, deg, out, v, eps, counter_uniform(key, t, 2 * r + 1))
    return out


@njit(cache=True)
def majority_run(nbr, deg, states, eps, key, steps, asynchronous, snap_every, snaps):
    """Advance ``steps`` steps; returns active counts per step (t = 0..steps)."""
    counts = np.empty(steps + 1, np.int64)
    counts[0] = states.sum()
    row = 0
    if snap_every > 0:
        snaps[0, :] = states
        row = 1
    for t in range(steps):
        if asynchronous:
            states = majority_async_step(nbr, deg, states, eps, key, t)
        else:
            states = majority_sync_step(nbr, deg, states, eps, key, t)
        counts[t + 1] = states.sum()
        if snap_every > 0 and (t + 1) % snap_every == 0:
            snaps[row, :] = states
            row += 1
    return counts, states
