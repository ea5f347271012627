"""Independent brute-force oracles.

None of these import the package's shortest-path or search code: they walk
every simple path, every self-avoiding walk, or integrate a tail directly.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate


def adjacency(edges):
    adj = {}
    for j, (a, b) in enumerate(edges):
        adj.setdefault(a, []).append((b, j))
        adj.setdefault(b, []).append((a, j))
    return adj


def simple_paths(edges, s, t):
    """Every simple path from s to t as a tuple of edge ids."""
    adj = adjacency(edges)
    out = []

    def walk(v, seen, path):
        if v == t:
            out.append(tuple(path))
            return
        for w, j in adj.get(v, ()):
            if w not in seen:
                seen.add(w)
                path.append(j)
                walk(w, seen, path)
                path.pop()
                seen.discard(w)

    walk(s, {s}, [])
    return out


def brute_force_time(edges, weights, s, t) -> float:
    if s == t:
        return 0.0
    paths = simple_paths(edges, s, t)
    return min((sum(weights[j] for j in p) for p in paths), default=math.inf)


def brute_force_geodesics(edges, weights, s, t, tol=1e-9):
    """(T, list of geodesic edge sets, pivotal edge ids) by exhaustive search."""
    paths = simple_paths(edges, s, t)
    costs = [sum(weights[j] for j in p) for p in paths]
    T = min(costs)
    geos = [frozenset(p) for p, c in zip(paths, costs) if c <= T + tol * max(1.0, T)]
    piv = frozenset.intersection(*geos) if geos else frozenset()
    return T, geos, piv


def grid_system(side, d=2):
    sites = list(itertools.product(range(side), repeat=d))
    site_set = set(sites)
    edges = []
    for s in sites:
        for k in range(d):
            t = list(s)
            t[k] += 1
            if tuple(t) in site_set:
                edges.append((s, tuple(t)))
    return sites, edges


def all_saws(m, d=2):
    """Every self-avoiding walk of m steps from the origin, as site tuples (no pruning)."""
    steps = []
    for k in range(d):
        for sgn in (1, -1):
            v = [0] * d
            v[k] = sgn
            steps.append(tuple(v))
    origin = tuple([0] * d)
    walks = [[origin]]
    for _ in range(m):
        nxt = []
        for w in walks:
            seen = set(w)
            last = w[-1]
            for st in steps:
                n = tuple(a + b for a, b in zip(last, st))
                if n not in seen:
                    nxt.append(w + [n])
        walks = nxt
    return walks


def saw_min_bruteforce(weight_fn, m, d=2) -> float:
    best = math.inf
    for w in all_saws(m, d):
        c = sum(weight_fn(a, b) for a, b in zip(w[:-1], w[1:]))
        best = min(best, c)
    return best


def moment_integral_finite(survival, k: int, beta: float, U: float = 100.0, piece: float = 10.0) -> bool:
    """Decide E[Y^beta] < inf for Y the min of k copies by integrating the tail.

    E Y^beta = int_0^inf beta l^(beta-1) P(Y >= l) dl.  The part on [0, 1] is
    always finite; beyond it we substitute l = e^u and compare the mass on
    [0, U] with the mass on [U, 2U].
    """

    def f(u):
        s = survival(math.exp(u))
        if s <= 0.0:
            return 0.0
        return beta * math.exp(beta * u + k * math.log(s))

    def mass(a, b):
        total = 0.0
        for lo in np.arange(a, b, piece):
            try:
                val, _ = integrate.quad(f, lo, min(lo + piece, b), limit=200)
            except OverflowError:
                return math.inf
            total += val
            if not math.isfinite(total):
                return math.inf
        return total

    try:
        head = mass(0.0, U)
        tail = mass(U, 2 * U)
    except OverflowError:
        return False
    if not (math.isfinite(head) and math.isfinite(tail)):
        return False
    return tail <= 1e-6 * max(1.0, head)
