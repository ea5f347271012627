"""Passage times on finite windows, with certificates for the infinite lattice.

Truncation is controlled by a simple fact: weights are nonnegative, so a path
from A to B that leaves a window first pays at least ``min_b tau_win(A, b)``
to reach the boundary and, after its last boundary visit, at least
``min_b tau_win(B, b)`` to come back.  Whenever the in-window time is no
larger than that sum, it is the true lattice value.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .lattice import Edge, LocalBox, MacroBox, Site, Window, as_site, l1, window_around

DEFAULT_MAX_RADIUS = 2048


class CertificationError(RuntimeError):
    """A window-restricted value could not be certified.  ``value`` is the upper bound found."""

    def __init__(self, message, value=math.nan):
        super().__init__(message)
        self.value = value


class SawBudgetError(RuntimeError):
    pass


def tie_tolerance(T: float, exact: bool) -> float:
    return 0.0 if exact else 1e-9 * max(1.0, abs(T))


def _exact_ties(field_) -> bool:
    dist = getattr(field_, "dist", None)
    return bool(dist is not None and dist.is_integer_valued)


# ---------------------------------------------------------------------------
# single/multi-source fields
# ---------------------------------------------------------------------------


@dataclass
class PassageField:
    window: Window
    sources: tuple[Site, ...]
    dist: np.ndarray
    settled: np.ndarray
    parent: np.ndarray
    boundary_min: float
    boundary_exact: bool
    weights: np.ndarray = field(repr=False)
    exact_ties: bool = False

    @property
    def source(self) -> Site:
        return self.sources[0]

    def at(self, site: Sequence[int]) -> float:
        i = self.window.index(site)
        if not self.settled[i]:
            raise KeyError(f"{tuple(site)} was not settled")
        return float(self.dist[i])

    def dist_grid(self) -> np.ndarray:
        return self.dist.reshape((self.window.side,) * self.window.d)

    def path_to(self, site: Sequence[int]) -> list[Site]:
        """Sites of the parent chain from a source to ``site``."""
        i = self.window.index(site)
        chain = [i]
        while self.parent[i] >= 0:
            i = int(self.parent[i])
            chain.append(i)
            if len(chain) > self.window.size:
                raise RuntimeError("parent chain does not terminate")
        return [self.window.site(j) for j in reversed(chain)]

    def edge_weight(self, a: Site, b: Site) -> float:
        e = Edge(a, b)
        return float(self.weights[e.axis, self.window.index(e.u)])

    def path_time(self, path: Sequence[Site]) -> float:
        total = 0.0
        for a, b in zip(path[:-1], path[1:]):
            total += self.edge_weight(a, b)
        return total


def dijkstra(
    field_,
    source,
    window: Window,
    *,
    target=None,
    stop_dist: float = math.inf,
    stop_at_boundary: bool = False,
    weights: np.ndarray | None = None,
) -> PassageField:
    """Shortest paths from ``source`` (a site or a list of sites) inside ``window``.

    Without early-stop options every window site is settled and
    ``boundary_min`` is exact.
    """
    if len(source) and isinstance(source[0], (int, np.integer)):
        sources = (as_site(source),)
    else:
        sources = tuple(as_site(s) for s in source)
    for s in sources:
        if not window.contains(s):
            raise ValueError(f"source {s} outside {window}")
    W = field_.window_weights(window) if weights is None else weights
    src_idx = window.indices(sources)
    tgt = -1 if target is None else window.index(target)
    dist, settled, parent, bmin, bhit = kernels.dijkstra(
        W, window.side, window.d, src_idx, tgt, stop_dist, stop_at_boundary
    )
    return PassageField(
        window=window,
        sources=sources,
        dist=dist,
        settled=settled,
        parent=parent,
        boundary_min=bmin,
        boundary_exact=bhit,
        weights=W,
        exact_ties=_exact_ties(field_),
    )


@dataclass
class PassageResult:
    value: float
    window: Window
    certified: bool
    margin: float
    fwd: PassageField = field(repr=False)
    bwd: PassageField = field(repr=False)


def default_radius(sites: Sequence[Site]) -> int:
    arr = np.asarray(sites)
    span = int((arr.max(axis=0) - arr.min(axis=0)).sum())
    return 3 + span // 2 + math.ceil(2.0 * math.sqrt(span))


def certified_time(
    field_,
    A: Sequence[Site],
    B: Sequence[Site],
    *,
    initial_margin: int | None = None,
    growth_factor: float = 1.5,
    max_radius: int = DEFAULT_MAX_RADIUS,
) -> PassageResult:
    """tau(A, B) on the lattice, growing a cube until the exit certificate holds."""
    if growth_factor <= 1:
        raise ValueError("growth_factor must exceed 1")
    A = [as_site(a) for a in A]
    B = [as_site(b) for b in B]
    margin = default_radius(A + B) if initial_margin is None else max(1, int(initial_margin))
    while True:
        win = window_around(A + B, margin)
        W = field_.window_weights(win)
        single = len(B) == 1
        fwd = dijkstra(field_, A, win, target=B[0] if single else None, stop_at_boundary=single, weights=W)
        b_idx = win.indices(B)
        T = float(fwd.dist[b_idx].min())
        if set(A) & set(B):
            T = 0.0
        bwd = dijkstra(field_, B, win, stop_at_boundary=True, weights=W)
        bound = fwd.boundary_min + bwd.boundary_min
        if T <= bound:
            return PassageResult(T, win, True, bound - T, fwd, bwd)
        if win.radius >= max_radius:
            return PassageResult(T, win, False, bound - T, fwd, bwd)
        new_margin = max(margin + 1, math.ceil(margin * growth_factor))
        margin = min(new_margin, margin + max_radius - win.radius)


def exact_passage_time(
    field_,
    x: Sequence[int],
    *,
    source: Sequence[int] | None = None,
    initial_radius: int | None = None,
    growth_factor: float = 1.5,
    max_radius: int = DEFAULT_MAX_RADIUS,
) -> PassageResult:
    """Certified tau(source, x); ``certified`` is False only when ``max_radius`` was hit."""
    x = as_site(x)
    src = tuple([0] * len(x)) if source is None else as_site(source)
    return certified_time(
        field_, [src], [x], initial_margin=initial_radius, growth_factor=growth_factor, max_radius=max_radius
    )


# ---------------------------------------------------------------------------
# geodesics and pivotal edges
# ---------------------------------------------------------------------------


class _DSU:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        p = self.p
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[rb] = ra


@dataclass
class GeodesicStructure:
    """Tight edges of a finite graph and exact geodesic counts.

    Edges with weight zero that are tight in both orientations ("level" edges)
    are contracted; counts are numbers of paths in the contracted DAG, which
    equal geodesic counts whenever no level edge is present.
    """

    arcs: list[tuple[int, int, int]]  # (edge id, tail node, head node)
    level: list[int]  # edge ids
    comp: dict[int, int]
    fwd: dict[int, int]
    bwd: dict[int, int]
    total: int
    pivotal: frozenset[int]
    near_ties: int


def geodesic_structure(eu, ev, ew, d0, dx, T, s, t, tol) -> GeodesicStructure:
    eu = np.asarray(eu, dtype=np.int64)
    ev = np.asarray(ev, dtype=np.int64)
    ew = np.asarray(ew, dtype=np.float64)
    d0 = np.asarray(d0, dtype=np.float64)
    dx = np.asarray(dx, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        r1 = d0[eu] + ew + dx[ev] - T
        r2 = d0[ev] + ew + dx[eu] - T
    f1 = np.abs(r1) <= tol
    f2 = np.abs(r2) <= tol
    near = int(((np.abs(r1) > 0) & f1).sum() + ((np.abs(r2) > 0) & f2).sum())
    both = f1 & f2
    nodes = sorted(set(np.concatenate([eu[f1 | f2], ev[f1 | f2]]).tolist()) | {int(s), int(t)})
    local = {v: j for j, v in enumerate(nodes)}
    dsu = _DSU(len(nodes))
    level = np.flatnonzero(both).tolist()
    for e in level:
        dsu.union(local[int(eu[e])], local[int(ev[e])])
    comp = {v: dsu.find(local[v]) for v in nodes}
    arcs = []
    for e in np.flatnonzero(f1 & ~both).tolist():
        arcs.append((e, int(eu[e]), int(ev[e])))
    for e in np.flatnonzero(f2 & ~both).tolist():
        arcs.append((e, int(ev[e]), int(eu[e])))

    out_arcs = defaultdict(list)
    in_arcs = defaultdict(list)
    indeg = defaultdict(int)
    comps = set(comp.values())
    for e, a, b in arcs:
        ca, cb = comp[a], comp[b]
        if ca == cb:
            raise RuntimeError("tie tolerance collapsed distinct levels into a cycle")
        out_arcs[ca].append((e, a, b, cb))
        in_arcs[cb].append((e, a, b, ca))
        indeg[cb] += 1
    order = []
    queue = deque(sorted(c for c in comps if indeg[c] == 0))
    while queue:
        c = queue.popleft()
        order.append(c)
        for _, _, _, cb in out_arcs[c]:
            indeg[cb] -= 1
            if indeg[cb] == 0:
                queue.append(cb)
    if len(order) != len(comps):
        raise RuntimeError("tight graph is not acyclic after contracting level edges")
    cs, ct = comp[int(s)], comp[int(t)]
    fwd = {c: 0 for c in comps}
    bwd = {c: 0 for c in comps}
    fwd[cs] = 1
    for c in order:
        if fwd[c]:
            for _, _, _, cb in out_arcs[c]:
                fwd[cb] += fwd[c]
    bwd[ct] = 1
    for c in reversed(order):
        if bwd[c]:
            for _, _, _, ca in in_arcs[c]:
                bwd[ca] += bwd[c]
    total = fwd[ct]

    piv = set()
    if total > 0:
        for e, a, b in arcs:
            if fwd[comp[a]] * bwd[comp[b]] == total:
                piv.add(e)
        by_comp = defaultdict(list)
        for e in level:
            by_comp[comp[int(eu[e])]].append(e)
        for c, edges in by_comp.items():
            if fwd[c] * bwd[c] != total:
                continue
            entries = {int(s)} if c == cs else {b for _, _, b, ca in in_arcs[c] if fwd[ca] > 0}
            exits = {int(t)} if c == ct else {a for _, a, _, cb in out_arcs[c] if bwd[cb] > 0}
            for e in edges:
                if not _connected_without(edges, eu, ev, e, entries, exits):
                    piv.add(e)
    return GeodesicStructure(arcs, level, comp, fwd, bwd, total, frozenset(piv), near)


def _connected_without(edges, eu, ev, skip, entries, exits) -> bool:
    adj = defaultdict(list)
    for e in edges:
        if e == skip:
            continue
        a, b = int(eu[e]), int(ev[e])
        adj[a].append(b)
        adj[b].append(a)
    seen = set(entries)
    stack = list(entries)
    while stack:
        a = stack.pop()
        if a in exits:
            return True
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return False


@dataclass
class GeodesicDag:
    source: Site
    target: Site
    T: float
    window: Window
    tol: float
    edges: tuple[Edge, ...]
    structure: GeodesicStructure = field(repr=False)
    edge_ids: np.ndarray = field(repr=False)
    certified: bool = True
    margin: float = math.inf
    _edge_list: tuple = field(default=(), repr=False)

    @property
    def n_geodesics(self) -> int:
        return self.structure.total

    @property
    def has_level_edges(self) -> bool:
        return bool(self.structure.level)

    @property
    def near_ties(self) -> int:
        return self.structure.near_ties

    def fwd_count(self, site) -> int:
        i = self.window.index(site)
        return self.structure.fwd.get(self.structure.comp.get(i, -1), 0)

    def bwd_count(self, site) -> int:
        i = self.window.index(site)
        return self.structure.bwd.get(self.structure.comp.get(i, -1), 0)

    def arcs(self) -> list[tuple[Site, Site]]:
        """Oriented positive-weight DAG edges (tail, head)."""
        return [(self.window.site(a), self.window.site(b)) for _, a, b in self.structure.arcs]


def _window_edge_arrays(window: Window, W: np.ndarray):
    d, n = window.d, window.side
    idx = np.arange(window.size, dtype=np.int64)
    strides = window.strides
    grid = np.indices((n,) * d).reshape(d, -1)
    us, vs, ws, ks = [], [], [], []
    for k in range(d):
        ok = grid[k] < n - 1
        us.append(idx[ok])
        vs.append(idx[ok] + strides[k])
        ws.append(W[k][ok])
        ks.append(np.full(int(ok.sum()), k))
    return np.concatenate(us), np.concatenate(vs), np.concatenate(ws), np.concatenate(ks)


def geodesic_dag(pf_fwd: PassageField, pf_bwd: PassageField, T: float | None = None) -> GeodesicDag:
    """Union of all geodesics between the sources of two fields on one window."""
    win = pf_fwd.window
    if pf_bwd.window != win:
        raise ValueError("fields must share a window")
    s_site, t_site = pf_fwd.source, pf_bwd.source
    s, t = win.index(s_site), win.index(t_site)
    if T is None:
        T = float(pf_fwd.dist[t])
    tol = tie_tolerance(T, pf_fwd.exact_ties)
    for pf in (pf_fwd, pf_bwd):
        unsettled = ~pf.settled & (pf.dist <= T + tol)
        if unsettled.any():
            raise ValueError("fields must settle every site within passage time T")
    d0 = np.where(pf_fwd.settled, pf_fwd.dist, np.inf)
    dx = np.where(pf_bwd.settled, pf_bwd.dist, np.inf)
    eu, ev, ew, ek = _window_edge_arrays(win, pf_fwd.weights)
    keep = np.isfinite(d0[eu] + dx[ev]) | np.isfinite(d0[ev] + dx[eu])
    keep &= np.minimum(d0[eu], d0[ev]) <= T + tol
    sel = np.flatnonzero(keep)
    st = geodesic_structure(eu[sel], ev[sel], ew[sel], d0, dx, T, s, t, tol)
    used = sorted(set(e for e, _, _ in st.arcs) | set(st.level))
    edges = tuple(Edge(win.site(int(eu[sel[e]])), win.site(int(ev[sel[e]]))) for e in used)
    all_edges = tuple(Edge(win.site(int(eu[j])), win.site(int(ev[j]))) for j in sel)
    margin = pf_fwd.boundary_min + pf_bwd.boundary_min - T
    return GeodesicDag(
        source=s_site,
        target=t_site,
        T=T,
        window=win,
        tol=tol,
        edges=edges,
        structure=st,
        edge_ids=sel,
        certified=bool(margin > tol),
        margin=margin,
        _edge_list=all_edges,
    )


def pivotal_edges(dag: GeodesicDag) -> frozenset[Edge]:
    """Edges lying on every geodesic (exact integer path counting)."""
    return frozenset(dag._edge_list[e] for e in dag.structure.pivotal)


def geodesics_to(field_, x: Sequence[int], *, source=None, **kw) -> tuple[PassageResult, GeodesicDag]:
    """Certified T plus the geodesic DAG on the certifying window."""
    res = exact_passage_time(field_, x, source=source, **kw)
    T = res.value
    stop = T + tie_tolerance(T, _exact_ties(field_)) + 1e-12
    W = res.fwd.weights
    src = res.fwd.source
    fwd = dijkstra(field_, src, res.window, stop_dist=stop, weights=W)
    bwd = dijkstra(field_, as_site(x), res.window, stop_dist=stop, weights=W)
    dag = geodesic_dag(fwd, bwd, T)
    if not res.certified:
        dag.certified = False
    return res, dag


# ---------------------------------------------------------------------------
# balls
# ---------------------------------------------------------------------------


@dataclass
class Ball:
    """Sublevel set ``{x : tau(0, x) <= t}``; fattened by unit cubes when ``fattened``."""

    t: float
    sites: np.ndarray
    window: Window
    mask: np.ndarray = field(repr=False)
    fattened: bool = True

    def __contains__(self, site) -> bool:
        return self.window.contains(site) and bool(self.mask[self.window.index(site)])

    def __len__(self) -> int:
        return int(self.mask.sum())

    def issubset(self, other: "Ball") -> bool:
        return all(tuple(s) in other for s in self.sites.tolist())


def ball(pf: PassageField, t: float, fattened: bool = True) -> Ball:
    if not pf.boundary_min > t:
        raise CertificationError(f"window boundary reached at {pf.boundary_min} <= t={t}")
    mask = pf.settled & (pf.dist <= t)
    return Ball(float(t), pf.window.coords()[mask], pf.window, mask, fattened)


# ---------------------------------------------------------------------------
# set-to-set times, macro boxes, local boxes
# ---------------------------------------------------------------------------


def box_to_box_time(field_, A: Iterable[Site], B: Iterable[Site], window: Window, weights=None) -> float:
    """min over a in A, b in B of the in-window passage time."""
    A = [as_site(a) for a in A]
    B = [as_site(b) for b in B]
    if not A or not B:
        raise ValueError("A and B must be nonempty")
    if set(A) & set(B):
        return 0.0
    pf = dijkstra(field_, A, window, weights=weights)
    return float(pf.dist[window.indices(B)].min())


@dataclass
class DiameterResult:
    value: float
    certified: bool
    margin: float


def box_diameter(field_, box: MacroBox, window: Window, weights=None) -> DiameterResult:
    sites = box.sites()
    for s in sites:
        if not window.contains(s):
            raise ValueError("macro box must lie inside the window")
    W = field_.window_weights(window) if weights is None else weights
    idx = window.indices(sites)
    best = 0.0
    bmins = []
    rows = []
    for s in sites:
        pf = dijkstra(field_, s, window, weights=W)
        rows.append(pf.dist[idx])
        bmins.append(pf.boundary_min)
    D = np.array(rows)
    bm = np.array(bmins)
    best = float(D.max()) if D.size else 0.0
    slack = (bm[:, None] + bm[None, :]) - D
    margin = float(slack.min())
    return DiameterResult(best, margin >= 0, margin)


def box_diameter_time(field_, box: MacroBox, window: Window, *, require_certified: bool = True, weights=None) -> float:
    """J = max over pairs z1, z2 in the box of tau(z1, z2)."""
    res = box_diameter(field_, box, window, weights=weights)
    if require_certified and not res.certified:
        raise CertificationError("window margin too small for the box diameter", res.value)
    return res.value


def _local_graph(edges: Sequence[Edge], weights: Sequence[float]):
    verts = sorted({e.u for e in edges} | {e.v for e in edges})
    pos = {v: j for j, v in enumerate(verts)}
    adj = [[] for _ in verts]
    for e, w in zip(edges, weights):
        a, b = pos[e.u], pos[e.v]
        adj[a].append((b, float(w)))
        adj[b].append((a, float(w)))
    return pos, adj


def _box_edges(box: LocalBox, allowed) -> list[Edge]:
    if allowed is None:
        return list(box.edges)
    allowed = set(allowed)
    return [e for e in box.edges if e in allowed]


def restricted_time(field_, box: LocalBox, u, v, allowed: Iterable[Edge] | None = None) -> float:
    """Passage time from u to v using only edges of the box (optionally a subset)."""
    u, v = as_site(u), as_site(v)
    if not (box.contains(u) and box.contains(v)):
        raise ValueError("u and v must lie in the box")
    if u == v:
        return 0.0
    edges = _box_edges(box, allowed)
    w = field_.weights_of(edges)
    pos, adj = _local_graph(edges, w)
    if u not in pos or v not in pos:
        return math.inf
    return kernels.graph_dijkstra(len(adj), adj, [pos[u]])[pos[v]]


def restricted_sum(field_, box: LocalBox, allowed: Iterable[Edge] | None = None) -> float:
    """Sum over edges {u, v} of the box of the box-restricted time T_i(u, v)."""
    edges = _box_edges(box, allowed)
    if not edges:
        return 0.0
    w = field_.weights_of(edges)
    pos, adj = _local_graph(edges, w)
    total = 0.0
    cache = {}
    for e in edges:
        a = pos[e.u]
        if a not in cache:
            cache[a] = kernels.graph_dijkstra(len(adj), adj, [a])
        total += cache[a][pos[e.v]]
    return total


def resample_region(field_, edges, rng: np.random.Generator):
    """Copy of ``field_`` with fresh i.i.d. weights on ``edges`` (a LocalBox or edge list)."""
    from .weights import OverlayField

    edges = list(edges.edges) if isinstance(edges, LocalBox) else list(edges)
    fresh = field_.dist.ppf(rng.random(len(edges)))
    return OverlayField(field_, dict(zip(edges, fresh.tolist())))


# ---------------------------------------------------------------------------
# self-avoiding walks
# ---------------------------------------------------------------------------


def min_saw_time(
    field_, m: int, window: Window | None = None, *, origin=None, d: int = 2, budget: int = 50_000_000, weights=None
) -> float:
    """Minimum of tau(gamma) over self-avoiding paths from the origin with exactly m edges."""
    if m < 1:
        raise ValueError("m must be positive")
    if window is None:
        origin = tuple([0] * d) if origin is None else as_site(origin)
        window = Window(origin, m)
    origin = window.center if origin is None else as_site(origin)
    if any(abs(a - c) + m > window.radius for a, c in zip(origin, window.center)):
        raise ValueError("window must contain every walk of length m from the origin")
    W = field_.window_weights(window) if weights is None else weights
    best, ok = kernels.saw_min(W, window.side, window.d, window.index(origin), m, budget)
    if not ok:
        raise SawBudgetError(f"self-avoiding walk search for m={m} exceeded {budget} expansions")
    return best


def l1_dist(a, b) -> int:
    return l1(np.subtract(a, b))
