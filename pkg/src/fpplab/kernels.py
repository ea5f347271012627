"""Hot inner loops on dense lattice windows.

A window of side ``n`` in dimension ``d`` is stored in C order with ``N = n**d``
sites.  Edge weights live in an array ``W`` of shape ``(d, N)``: ``W[k, i]`` is
the weight of the edge from site ``i`` to its ``+e_k`` neighbour (``inf`` on
the top face, where that neighbour is outside the window).

Every kernel has a numba implementation and a numpy/Python fallback with the
same contract.  The dispatching names at the bottom pick one according to
``fpplab._accel.USE_NUMBA``.
"""

import heapq

import numpy as np

from ._accel import USE_NUMBA, njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


# ---------------------------------------------------------------------------
# counter-based edge hashing
# ---------------------------------------------------------------------------


def splitmix64_np(x):
    """splitmix64 finaliser on a uint64 array (wraps modulo 2**64)."""
    z = x + GOLDEN
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def _splitmix64_scalar(x):
    z = x + np.uint64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _edge_uniforms_nb(seed, corner, n, d):
    N = n**d
    out = np.empty((d, N), dtype=np.float64)
    coords = np.empty(d, dtype=np.int64)
    h0 = _splitmix64_scalar(seed)
    for i in range(N):
        rem = i
        for k in range(d - 1, -1, -1):
            coords[k] = corner[k] + rem % n
            rem //= n
        h = h0
        for k in range(d):
            h = _splitmix64_scalar(h ^ np.uint64(coords[k]))
        for k in range(d):
            hk = _splitmix64_scalar(h ^ np.uint64(k))
            out[k, i] = (np.float64(hk >> np.uint64(11)) + 0.5) * (1.0 / 9007199254740992.0)
    return out


def _edge_uniforms_np(seed, corner, n, d):
    grids = np.indices((n,) * d).reshape(d, -1).astype(np.int64)
    coords = grids + np.asarray(corner, dtype=np.int64)[:, None]
    N = grids.shape[1]
    h = splitmix64_np(np.full(N, np.uint64(seed), dtype=np.uint64))
    for k in range(d):
        h = splitmix64_np(h ^ coords[k].view(np.uint64))
    out = np.empty((d, N), dtype=np.float64)
    for k in range(d):
        hk = splitmix64_np(h ^ np.uint64(k))
        out[k] = ((hk >> _S11).astype(np.float64) + 0.5) * _INV53
    return out


def edge_uniforms_at(seed, lower, axes):
    """Uniforms for explicit edges given by lower endpoints ``(M, d)`` and axes ``(M,)``."""
    lower = np.atleast_2d(np.asarray(lower, dtype=np.int64))
    axes = np.asarray(axes, dtype=np.uint64).reshape(-1)
    h = splitmix64_np(np.full(lower.shape[0], np.uint64(seed), dtype=np.uint64))
    for k in range(lower.shape[1]):
        h = splitmix64_np(h ^ np.ascontiguousarray(lower[:, k]).view(np.uint64))
    hk = splitmix64_np(h ^ axes)
    return ((hk >> _S11).astype(np.float64) + 0.5) * _INV53


# ---------------------------------------------------------------------------
# single/multi-source shortest paths on a window
# ---------------------------------------------------------------------------


@njit(cache=True)
def _dijkstra_nb(W, n, d, sources, target, stop_dist, stop_at_boundary):
    N = n**d
    dist = np.full(N, np.inf)
    parent = np.full(N, -1, dtype=np.int64)
    settled = np.zeros(N, dtype=np.bool_)
    strides = np.empty(d, dtype=np.int64)
    s = 1
    for k in range(d - 1, -1, -1):
        strides[k] = s
        s *= n
    cap = 2 * d * N + sources.shape[0] + 1
    hkey = np.empty(cap, dtype=np.float64)
    hval = np.empty(cap, dtype=np.int64)
    size = 0
    for j in range(sources.shape[0]):
        src = sources[j]
        if dist[src] > 0.0:
            dist[src] = 0.0
            # push
            pos = size
            size += 1
            while pos > 0:
                par = (pos - 1) >> 1
                if hkey[par] <= 0.0:
                    break
                hkey[pos] = hkey[par]
                hval[pos] = hval[par]
                pos = par
            hkey[pos] = 0.0
            hval[pos] = src
    boundary_min = np.inf
    boundary_hit = False
    stopped_at = np.inf
    while size > 0:
        du = hkey[0]
        u = hval[0]
        # pop root
        size -= 1
        lk = hkey[size]
        lv = hval[size]
        pos = 0
        while True:
            c = 2 * pos + 1
            if c >= size:
                break
            if c + 1 < size and hkey[c + 1] < hkey[c]:
                c += 1
            if hkey[c] >= lk:
                break
            hkey[pos] = hkey[c]
            hval[pos] = hval[c]
            pos = c
        if size > 0:
            hkey[pos] = lk
            hval[pos] = lv
        if settled[u] or du > dist[u]:
            continue
        if du > stop_dist:
            stopped_at = du
            break
        settled[u] = True
        on_boundary = False
        rem = u
        for k in range(d - 1, -1, -1):
            ck = rem % n
            rem //= n
            if ck == 0 or ck == n - 1:
                on_boundary = True
        if on_boundary and not boundary_hit:
            boundary_hit = True
            boundary_min = du
        if stop_at_boundary and boundary_hit and (target < 0 or settled[target]):
            break
        rem = u
        for k in range(d - 1, -1, -1):
            ck = rem % n
            rem //= n
            st = strides[k]
            if ck < n - 1:
                v = u + st
                nd = du + W[k, u]
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = u
                    pos = size
                    size += 1
                    while pos > 0:
                        par = (pos - 1) >> 1
                        if hkey[par] <= nd:
                            break
                        hkey[pos] = hkey[par]
                        hval[pos] = hval[par]
                        pos = par
                    hkey[pos] = nd
                    hval[pos] = v
            if ck > 0:
                v = u - st
                nd = du + W[k, v]
                if nd < dist[v]:
                    dist[v] = nd
                    parent[v] = u
                    pos = size
                    size += 1
                    while pos > 0:
                        par = (pos - 1) >> 1
                        if hkey[par] <= nd:
                            break
                        hkey[pos] = hkey[par]
                        hval[pos] = hval[par]
                        pos = par
                    hkey[pos] = nd
                    hval[pos] = v
    if not boundary_hit:
        # every boundary site is at least as far as the first unsettled key
        boundary_min = stopped_at
    return dist, settled, parent, boundary_min, boundary_hit


def _axis_slices(d, k, n):
    lo = [slice(None)] * d
    hi = [slice(None)] * d
    lo[k] = slice(0, n - 1)
    hi[k] = slice(1, n)
    return tuple(lo), tuple(hi)


def _boundary_mask(n, d):
    mask = np.zeros((n,) * d, dtype=bool)
    for k in range(d):
        idx = [slice(None)] * d
        idx[k] = 0
        mask[tuple(idx)] = True
        idx[k] = n - 1
        mask[tuple(idx)] = True
    return mask


def _dijkstra_np(W, n, d, sources, target, stop_dist, stop_at_boundary):
    """Vectorised Bellman-Ford sweeps; same outputs as the heap version.

    Early-stop flags are accepted but the sweep always runs to convergence,
    so every reachable site comes back settled up to ``stop_dist``.
    """
    shape = (n,) * d
    Wg = W.reshape((d,) + shape)
    dist = np.full(shape, np.inf)
    flat = dist.reshape(-1)
    flat[np.asarray(sources, dtype=np.int64)] = 0.0
    slices = [_axis_slices(d, k, n) for k in range(d)]
    while True:
        changed = False
        for k in range(d):
            lo, hi = slices[k]
            wk = Wg[k][lo]
            cand = dist[lo] + wk
            upd = cand < dist[hi]
            if upd.any():
                dist[hi] = np.where(upd, cand, dist[hi])
                changed = True
            cand = dist[hi] + wk
            upd = cand < dist[lo]
            if upd.any():
                dist[lo] = np.where(upd, cand, dist[lo])
                changed = True
        if not changed:
            break

    # hop counts along tight edges give an acyclic parent choice even with zero weights
    hops = np.full(shape, np.iinfo(np.int64).max // 2, dtype=np.int64)
    hops.reshape(-1)[np.asarray(sources, dtype=np.int64)] = 0
    while True:
        changed = False
        for k in range(d):
            lo, hi = slices[k]
            wk = Wg[k][lo]
            tight = dist[lo] + wk == dist[hi]
            cand = np.where(tight, hops[lo] + 1, hops[hi])
            upd = cand < hops[hi]
            if upd.any():
                hops[hi] = np.where(upd, cand, hops[hi])
                changed = True
            tight = dist[hi] + wk == dist[lo]
            cand = np.where(tight, hops[hi] + 1, hops[lo])
            upd = cand < hops[lo]
            if upd.any():
                hops[lo] = np.where(upd, cand, hops[lo])
                changed = True
        if not changed:
            break
    idx = np.arange(n**d, dtype=np.int64).reshape(shape)
    parent = np.full(shape, -1, dtype=np.int64)
    strides = [n ** (d - 1 - k) for k in range(d)]
    for k in range(d):
        lo, hi = slices[k]
        wk = Wg[k][lo]
        ok = (dist[lo] + wk == dist[hi]) & (hops[lo] == hops[hi] - 1) & (parent[hi] < 0)
        parent[hi] = np.where(ok, idx[hi] - strides[k], parent[hi])
        ok = (dist[hi] + wk == dist[lo]) & (hops[hi] == hops[lo] - 1) & (parent[lo] < 0)
        parent[lo] = np.where(ok, idx[lo] + strides[k], parent[lo])

    flat = dist.reshape(-1)
    settled = flat <= stop_dist
    bmask = _boundary_mask(n, d).reshape(-1)
    boundary_min = float(flat[bmask].min()) if bmask.any() else np.inf
    boundary_hit = boundary_min <= stop_dist
    return flat, settled, parent.reshape(-1), boundary_min, boundary_hit


# ---------------------------------------------------------------------------
# minimal self-avoiding walk time, branch and bound
# ---------------------------------------------------------------------------


@njit(cache=True)
def _saw_min_nb(W, n, d, start, m, budget):
    N = n**d
    visited = np.zeros(N, dtype=np.bool_)
    node = np.empty(m + 1, dtype=np.int64)
    nxt = np.zeros(m + 1, dtype=np.int64)
    part = np.zeros(m + 1, dtype=np.float64)
    strides = np.empty(d, dtype=np.int64)
    s = 1
    for k in range(d - 1, -1, -1):
        strides[k] = s
        s *= n
    best = np.inf
    expansions = 0
    depth = 0
    node[0] = start
    visited[start] = True
    while depth >= 0:
        u = node[depth]
        if depth == m:
            if part[m] < best:
                best = part[m]
            visited[u] = False
            depth -= 1
            continue
        j = nxt[depth]
        if j == 2 * d:
            visited[u] = False
            depth -= 1
            continue
        nxt[depth] = j + 1
        k = j >> 1
        ck = (u // strides[k]) % n
        if j & 1 == 0:
            if ck == n - 1:
                continue
            v = u + strides[k]
            w = W[k, u]
        else:
            if ck == 0:
                continue
            v = u - strides[k]
            w = W[k, v]
        if visited[v]:
            continue
        p = part[depth] + w
        if p >= best:
            continue
        expansions += 1
        if expansions > budget:
            return best, False
        depth += 1
        node[depth] = v
        part[depth] = p
        nxt[depth] = 0
        visited[v] = True
    return best, True


def _saw_min_py(W, n, d, start, m, budget):
    strides = [n ** (d - 1 - k) for k in range(d)]
    Wl = W.tolist()
    visited = set([start])
    best = float("inf")
    expansions = 0
    node = [start] + [0] * m
    nxt = [0] * (m + 1)
    part = [0.0] * (m + 1)
    depth = 0
    while depth >= 0:
        u = node[depth]
        if depth == m:
            best = min(best, part[m])
            visited.discard(u)
            depth -= 1
            continue
        j = nxt[depth]
        if j == 2 * d:
            visited.discard(u)
            depth -= 1
            continue
        nxt[depth] = j + 1
        k = j >> 1
        ck = (u // strides[k]) % n
        if j & 1 == 0:
            if ck == n - 1:
                continue
            v = u + strides[k]
            w = Wl[k][u]
        else:
            if ck == 0:
                continue
            v = u - strides[k]
            w = Wl[k][v]
        if v in visited:
            continue
        p = part[depth] + w
        if p >= best:
            continue
        expansions += 1
        if expansions > budget:
            return best, False
        depth += 1
        node[depth] = v
        part[depth] = p
        nxt[depth] = 0
        visited.add(v)
    return best, True


# ---------------------------------------------------------------------------
# small-graph heap Dijkstra (edge lists; used for local boxes)
# ---------------------------------------------------------------------------


def graph_dijkstra(n_nodes, adj, sources):
    """Plain heap Dijkstra on an adjacency list ``adj[u] = [(v, w), ...]``."""
    dist = [float("inf")] * n_nodes
    heap = []
    for s in sources:
        dist[s] = 0.0
        heap.append((0.0, s))
    heapq.heapify(heap)
    done = [False] * n_nodes
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adj[u]:
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def edge_uniforms(seed, corner, n, d, use_numba=None):
    use = USE_NUMBA if use_numba is None else use_numba
    corner = np.asarray(corner, dtype=np.int64)
    if use:
        return _edge_uniforms_nb(np.uint64(seed), corner, np.int64(n), np.int64(d))
    return _edge_uniforms_np(np.uint64(seed), corner, n, d)


def dijkstra(W, n, d, sources, target=-1, stop_dist=np.inf, stop_at_boundary=False, use_numba=None):
    use = USE_NUMBA if use_numba is None else use_numba
    sources = np.asarray(sources, dtype=np.int64).reshape(-1)
    W = np.ascontiguousarray(W, dtype=np.float64)
    fn = _dijkstra_nb if use else _dijkstra_np
    dist, settled, parent, bmin, bhit = fn(
        W, np.int64(n), np.int64(d), sources, np.int64(target), float(stop_dist), bool(stop_at_boundary)
    )
    return dist, settled, parent, float(bmin), bool(bhit)


def saw_min(W, n, d, start, m, budget, use_numba=None):
    use = USE_NUMBA if use_numba is None else use_numba
    W = np.ascontiguousarray(W, dtype=np.float64)
    if use:
        best, ok = _saw_min_nb(W, np.int64(n), np.int64(d), np.int64(start), np.int64(m), np.int64(budget))
    else:
        best, ok = _saw_min_py(W, int(n), int(d), int(start), int(m), int(budget))
    return float(best), bool(ok)
