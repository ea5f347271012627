"""Exact entropy bookkeeping on tiny lattice graphs.

Every configuration of a small system is enumerated as one cell of a dense
tensor whose axis ``j`` indexes the support of edge ``j``.  Expectations,
conditional entropies and resampling averages are then finite sums, so the
inequalities below are checked exactly (up to float rounding) rather than
sampled.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lattice import Edge, Site, as_site, local_box
from .passage import geodesic_structure
from .weights import Distribution

DEFAULT_CAP = 2**20
DEFAULT_LAMBDAS = (-1.0, -0.5, -0.1, -0.01)
SLACK = 1e-9


class CapExceeded(ValueError):
    pass


# ---------------------------------------------------------------------------
# systems and tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactSystem:
    sites: tuple[Site, ...]
    edges: tuple[Edge, ...]
    laws: tuple[Distribution, ...]
    source: Site
    target: Site
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if len(self.edges) != len(self.laws):
            raise ValueError("one law per edge")
        if any(lam > 0 for lam in self.lambdas):
            raise ValueError("lambda grid must be nonpositive")
        site_set = set(self.sites)
        for e in self.edges:
            if e.u not in site_set or e.v not in site_set:
                raise ValueError(f"edge {e} leaves the system")
        if self.source not in site_set or self.target not in site_set:
            raise ValueError("terminals must be system sites")

    @property
    def n_configs(self) -> int:
        return math.prod(len(law.support()[0]) for law in self.laws)

    @property
    def d(self) -> int:
        return len(self.source)

    def site_index(self) -> dict[Site, int]:
        return {s: j for j, s in enumerate(self.sites)}

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        pos = self.site_index()
        return (
            np.array([pos[e.u] for e in self.edges], dtype=np.int64),
            np.array([pos[e.v] for e in self.edges], dtype=np.int64),
        )

    @property
    def box_multiplicity(self) -> int:
        """Each anchor is the chosen endpoint of d lattice edges, so its box enters the sum d times."""
        return self.d

    def boxes(self) -> list[tuple[Site, tuple[int, ...]]]:
        """Distinct local boxes meeting the system: (anchor, ids of system edges inside)."""
        out = []
        index = {e: j for j, e in enumerate(self.edges)}
        anchors = set()
        for s in self.sites:
            for off in itertools.product((-1, 0, 1), repeat=self.d):
                anchors.add(tuple(a + b for a, b in zip(s, off)))
        for anchor in sorted(anchors):
            box = local_box(anchor)
            ids = tuple(sorted(index[f] for f in box.edges if f in index))
            if ids:
                out.append((anchor, ids))
        return out

    def covering_multiplicity(self) -> int:
        """Largest number of boxes (counted with multiplicity) that contain a single edge."""
        counts = [0] * len(self.edges)
        for _, ids in self.boxes():
            for j in ids:
                counts[j] += 1
        return self.box_multiplicity * max(counts) if counts else 0

    @property
    def diameter(self) -> int:
        return sum(abs(a - b) for a, b in zip(self.source, self.target))

    @classmethod
    def line(cls, m: int, law: Distribution, d: int = 2, **kw) -> "ExactSystem":
        sites = tuple(tuple([i] + [0] * (d - 1)) for i in range(m + 1))
        edges = tuple(Edge(sites[i], sites[i + 1]) for i in range(m))
        return cls(sites, edges, (law,) * m, sites[0], sites[-1], **kw)

    @classmethod
    def grid(cls, side: int, law: Distribution, d: int = 2, **kw) -> "ExactSystem":
        """Sites {0..side-1}^d with all nearest-neighbour edges; terminals at opposite corners."""
        sites = tuple(itertools.product(range(side), repeat=d))
        site_set = set(sites)
        edges = []
        for s in sites:
            for k in range(d):
                t = list(s)
                t[k] += 1
                if tuple(t) in site_set:
                    edges.append(Edge(s, tuple(t)))
        return cls(sites, tuple(edges), (law,) * len(edges), sites[0], sites[-1], **kw)

    def with_terminals(self, source, target) -> "ExactSystem":
        return ExactSystem(self.sites, self.edges, self.laws, as_site(source), as_site(target), self.lambdas, self.cap)


def shortest_times(n_sites: int, eu, ev, wcols, sources) -> list[np.ndarray]:
    """Vectorised Bellman-Ford: one column of distances per site, rows are configurations."""
    rows = next((len(w) for w in wcols if w is not None), 1)
    dist = [np.full(rows, np.inf) for _ in range(n_sites)]
    for s in sources:
        dist[s] = np.zeros(rows)
    for _ in range(n_sites):
        changed = False
        for a, b, w in zip(eu, ev, wcols):
            if w is None:
                continue
            cand = dist[a] + w
            m = cand < dist[b]
            if m.any():
                dist[b] = np.where(m, cand, dist[b])
                changed = True
            cand = dist[b] + w
            m = cand < dist[a]
            if m.any():
                dist[a] = np.where(m, cand, dist[a])
                changed = True
        if not changed:
            break
    return dist


@dataclass
class ConfigTable:
    """All configurations of a system as tensors of shape ``sizes``."""

    system: ExactSystem
    sizes: tuple[int, ...]
    probs: list[np.ndarray]  # per-edge masses
    values: list[np.ndarray]  # per-edge atoms
    P: np.ndarray  # joint probability
    T: np.ndarray
    piv: np.ndarray = field(repr=False)  # (n_edges,) + sizes, bool
    _cache: dict = field(default_factory=dict, repr=False)

    def box_sums(self, axes: tuple[int, ...]) -> np.ndarray:
        key = ("R", axes)
        if key not in self._cache:
            self._cache[key] = box_restricted_sums(self, axes)
        return self._cache[key]

    def piv_meets(self, axes: tuple[int, ...]) -> np.ndarray:
        key = ("meets", axes)
        if key not in self._cache:
            m = np.zeros(self.sizes, dtype=bool)
            for j in axes:
                m |= self.piv[j]
            self._cache[key] = m
        return self._cache[key]

    @property
    def n_rows(self) -> int:
        return int(self.P.size)

    @property
    def piv_count(self) -> np.ndarray:
        return self.piv.sum(axis=0)

    def weight_columns(self) -> list[np.ndarray]:
        return [np.broadcast_to(_axis_view(v, j, len(self.sizes)), self.sizes).reshape(-1) for j, v in enumerate(self.values)]

    def rows(self):
        """Yield (config id, probability, T, #Piv)."""
        P, T, C = self.P.reshape(-1), self.T.reshape(-1), self.piv_count.reshape(-1)
        for i in range(P.size):
            yield i, float(P[i]), float(T[i]), int(C[i])

    def expect(self, Y) -> float:
        return _fsum(self.P * Y)


def _axis_view(v: np.ndarray, j: int, ndim: int) -> np.ndarray:
    shape = [1] * ndim
    shape[j] = len(v)
    return np.asarray(v).reshape(shape)


def _fsum(arr) -> float:
    # pairwise summation in extended precision; fsum over 10^6 terms is too slow
    return float(np.sum(np.asarray(arr, dtype=np.longdouble)))


def enumerate_configs(system: ExactSystem) -> ConfigTable:
    """Every configuration once, with product probability, T and pivotal edges."""
    if system.n_configs > system.cap:
        raise CapExceeded(f"{system.n_configs} configurations exceed the cap {system.cap}")
    supports = [law.support() for law in system.laws]
    values = [np.asarray(v, dtype=float) for v, _ in supports]
    probs = [np.asarray(p, dtype=float) for _, p in supports]
    sizes = tuple(len(v) for v in values)
    ndim = len(sizes)
    P = np.ones(sizes)
    for j, p in enumerate(probs):
        P = P * _axis_view(p, j, ndim)
    wcols = [np.broadcast_to(_axis_view(v, j, ndim), sizes).reshape(-1) for j, v in enumerate(values)]
    eu, ev = system.endpoints()
    pos = system.site_index()
    s, t = pos[system.source], pos[system.target]
    n = len(system.sites)
    T = shortest_times(n, eu, ev, wcols, [s])[t]
    piv = np.zeros((len(wcols),) + sizes, dtype=bool)
    tol = SLACK * np.maximum(1.0, T)
    for j in range(len(wcols)):
        cols = list(wcols)
        cols[j] = None
        Tj = shortest_times(n, eu, ev, cols, [s])[t]
        piv[j] = (Tj > T + tol).reshape(sizes)
    if abs(_fsum(P) - 1.0) > 1e-12:
        raise ValueError("configuration probabilities do not sum to one")
    return ConfigTable(system, sizes, probs, values, P, T.reshape(sizes), piv)


def table_pivotal_sets(table: ConfigTable, config: int) -> frozenset[Edge]:
    """Pivotal edges of one row, via path counting on the system graph."""
    system = table.system
    cols = [c[config] for c in table.weight_columns()]
    eu, ev = system.endpoints()
    pos = system.site_index()
    n = len(system.sites)
    s, t = pos[system.source], pos[system.target]
    wc = [np.array([w]) for w in cols]
    d0 = np.array([c[0] for c in shortest_times(n, eu, ev, wc, [s])])
    dx = np.array([c[0] for c in shortest_times(n, eu, ev, wc, [t])])
    T = d0[t]
    st = geodesic_structure(eu, ev, np.array(cols), d0, dx, T, s, t, SLACK * max(1.0, T))
    return frozenset(system.edges[e] for e in st.pivotal)


# ---------------------------------------------------------------------------
# entropy primitives
# ---------------------------------------------------------------------------


def xlogx(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def entropy(values, probs) -> float:
    """Ent X = E X log X - E X log E X for a finite nonnegative X."""
    x = np.asarray(values, dtype=np.float64)
    p = np.asarray(probs, dtype=np.float64)
    if (x < 0).any():
        raise ValueError("entropy needs nonnegative values")
    if (p < 0).any() or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("probs must be a distribution")
    mean = _fsum(p * x)
    ent = _fsum(p * xlogx(x)) - float(xlogx(mean))
    return max(ent, 0.0)


def expected_cond_entropy(X: np.ndarray, table: ConfigTable, axes: Sequence[int]) -> float:
    """E Ent_S X: entropy in the coordinates ``axes`` averaged over the rest."""
    axes = tuple(axes)
    if not axes:
        return 0.0
    pS = np.ones([1] * X.ndim)
    for j in axes:
        pS = pS * _axis_view(table.probs[j], j, X.ndim)
    cond = (X * pS).sum(axis=axes, keepdims=True) / pS.sum()
    cond = np.broadcast_to(cond, X.shape)
    # x log(x/c) - x + c >= 0 termwise; the extra terms integrate to zero
    pos = X > 0
    term = cond - X
    term[pos] += X[pos] * np.log(X[pos] / cond[pos])
    return max(_fsum(table.P * np.maximum(term, 0.0)), 0.0)


def full_entropy(X: np.ndarray, table: ConfigTable) -> float:
    return expected_cond_entropy(X, table, tuple(range(X.ndim)))


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


@dataclass
class TensorizationReport:
    lam: float
    ent: float
    sum_edges: float
    sum_boxes: float

    @property
    def slack_edges(self) -> float:
        return self.sum_edges - self.ent

    @property
    def slack_boxes(self) -> float:
        return self.sum_boxes - self.sum_edges

    @property
    def passed(self) -> bool:
        return self.slack_edges >= -SLACK and self.slack_boxes >= -SLACK and self.ent >= -SLACK


def tensorization_check(table: ConfigTable, lam: float) -> TensorizationReport:
    if lam > 0:
        raise ValueError("lambda must be nonpositive")
    X = np.exp(lam * table.T)
    ent = full_entropy(X, table)
    per_edge = sum(expected_cond_entropy(X, table, (j,)) for j in range(X.ndim))
    per_box = table.system.box_multiplicity * sum(expected_cond_entropy(X, table, ids) for _, ids in table.system.boxes())
    return TensorizationReport(lam, ent, per_edge, per_box)


def _split(A: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Reshape to (outside configs, inside configs) with ``axes`` inside."""
    rest = [j for j in range(A.ndim) if j not in axes]
    B = np.transpose(A, rest + list(axes))
    n_in = math.prod(A.shape[j] for j in axes)
    return B.reshape(-1, n_in)


def _inside_probs(table: ConfigTable, axes: Sequence[int]) -> np.ndarray:
    p = np.ones(1)
    for j in axes:
        p = np.multiply.outer(p, table.probs[j]).reshape(-1)
    return p


def _outside_probs(table: ConfigTable, axes: Sequence[int]) -> np.ndarray:
    rest = [j for j in range(len(table.sizes)) if j not in axes]
    p = np.ones(1)
    for j in rest:
        p = np.multiply.outer(p, table.probs[j]).reshape(-1)
    return p


def box_restricted_sums(table: ConfigTable, axes: Sequence[int]) -> np.ndarray:
    """For each inside configuration of the box, the sum over its edges {u,v} of T_i(u, v)."""
    system = table.system
    edges = [system.edges[j] for j in axes]
    verts = sorted({e.u for e in edges} | {e.v for e in edges})
    pos = {v: i for i, v in enumerate(verts)}
    eu = [pos[e.u] for e in edges]
    ev = [pos[e.v] for e in edges]
    sizes = [table.sizes[j] for j in axes]
    cols = [
        np.broadcast_to(_axis_view(table.values[j], k, len(axes)), sizes).reshape(-1) for k, j in enumerate(axes)
    ]
    total = np.zeros(len(cols[0]))
    cache = {}
    for a, b in zip(eu, ev):
        if a not in cache:
            cache[a] = shortest_times(len(verts), eu, ev, cols, [a])
        total = total + cache[a][b]
    return total


@dataclass
class BLMReport:
    lam: float
    box: Site
    lhs: float  # E Ent_{S_i} e^{lam T}
    rhs: float  # lam^2 E E'[e^{lam T} (T_i - T)_+^2]
    pointwise_ok: bool
    worst_pointwise_slack: float
    difference_ok: bool
    new_ok: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.pointwise_ok and self.margin >= -SLACK


def resampling_inner(T_in: np.ndarray, p_in: np.ndarray) -> np.ndarray:
    """Row-wise sum_{s'} p(s') (T(s') - T(s))_+^2, via sorting and suffix sums."""
    order = np.argsort(T_in, axis=1, kind="stable")
    Ts = np.take_along_axis(T_in, order, axis=1)
    ps = p_in[order]
    S0 = np.cumsum(ps[:, ::-1], axis=1)[:, ::-1]
    S1 = np.cumsum((ps * Ts)[:, ::-1], axis=1)[:, ::-1]
    S2 = np.cumsum((ps * Ts * Ts)[:, ::-1], axis=1)[:, ::-1]
    inner_sorted = np.maximum(S2 - 2 * Ts * S1 + Ts * Ts * S0, 0.0)
    out = np.empty_like(inner_sorted)
    np.put_along_axis(out, order, inner_sorted, axis=1)
    return out


def resampling_inner_pairs(T_in: np.ndarray, p_in: np.ndarray) -> np.ndarray:
    """Same quantity by enumerating (configuration, copy) pairs directly."""
    diff = np.maximum(T_in[:, None, :] - T_in[:, :, None], 0.0)
    return (diff**2 * p_in[None, None, :]).sum(axis=2)


def pathwise_box_check(table: ConfigTable, axes: tuple[int, ...]) -> tuple[bool, bool]:
    """Over every (configuration, resampled copy) pair of the box coordinates:
    Piv misses S_i implies T_i <= T, and (T_i - T)_+ <= sum_{S_i} T_i(u, v)."""
    key = ("pathwise", axes)
    if key in table._cache:
        return table._cache[key]
    T_in = _split(table.T, axes)
    piv_in = _split(table.piv_meets(axes), axes)
    tol = SLACK * np.maximum(1.0, T_in)
    row_max = T_in.max(axis=1, keepdims=True)
    difference_ok = bool(np.all(piv_in | (row_max <= T_in + tol)))
    R = table.box_sums(axes)
    row_min = T_in.min(axis=1, keepdims=True)
    new_ok = bool(np.all(T_in - row_min <= R[None, :] + tol))
    table._cache[key] = (difference_ok, new_ok)
    return difference_ok, new_ok


def blm_resampling_check(table: ConfigTable, lam: float, box: int, method: str = "sorted") -> BLMReport:
    """Entropy of e^{lam T} in the box coordinates against the resampling bound."""
    if lam > 0:
        raise ValueError("lambda must be nonpositive")
    anchor, axes = table.system.boxes()[box]
    p_in = _inside_probs(table, axes)
    p_out = _outside_probs(table, axes)
    T_in = _split(table.T, axes)
    if method == "pairs":
        doubled = T_in.shape[0] * T_in.shape[1] ** 2
        if doubled > table.system.cap:
            raise CapExceeded(f"doubled space of {doubled} exceeds the cap {table.system.cap}")
        inner = resampling_inner_pairs(T_in, p_in)
    else:
        inner = resampling_inner(T_in, p_in)
    X = np.exp(lam * T_in)
    mean_in = X @ p_in
    lhs_rows = xlogx(X) @ p_in - xlogx(mean_in)
    rhs_rows = lam * lam * ((X * inner) @ p_in)
    slack = rhs_rows - lhs_rows
    lhs = _fsum(p_out * lhs_rows)
    rhs = _fsum(p_out * rhs_rows)

    difference_ok, new_ok = pathwise_box_check(table, axes)
    return BLMReport(
        lam=lam,
        box=anchor,
        lhs=lhs,
        rhs=rhs,
        pointwise_ok=bool(slack.min() >= -SLACK),
        worst_pointwise_slack=float(slack.min()),
        difference_ok=difference_ok,
        new_ok=new_ok,
    )


def variational_margin(table: ConfigTable, X: np.ndarray, W: np.ndarray, ent: float | None = None) -> float:
    """Ent X + E X log E e^W - E[XW]  (nonnegative)."""
    EX = table.expect(X)
    ent = full_entropy(X, table) if ent is None else ent
    return ent + EX * math.log(table.expect(np.exp(W))) - table.expect(X * W)


def variational_check(table: ConfigTable, X: np.ndarray, W: np.ndarray, ent: float | None = None) -> bool:
    """E[XW] <= Ent X + E X log E e^W, plus equality at the witness Z = log(X / E X)."""
    X = np.asarray(X, dtype=float)
    if (X < 0).any():
        raise ValueError("X must be nonnegative")
    ent = full_entropy(X, table) if ent is None else ent
    ok = variational_margin(table, X, W, ent) >= -SLACK
    EX = table.expect(X)
    if EX > 0 and (X > 0).all():
        Z = np.log(X / EX)
        ok &= abs(table.expect(np.exp(Z)) - 1.0) <= 1e-12
        ok &= abs(table.expect(X * Z) - ent) <= SLACK * max(1.0, ent)
    return bool(ok)


@dataclass
class PivotalReport:
    lam: float
    ent: float
    e_x_piv: float
    e_x: float
    c_hat: float | None
    c4_bound: float
    intermediate: float  # lam^2 sum_i E[e^{lam T} 1{Piv meets S_i}] * E'(sum T_i(u,v))^2
    diameter_ratio: float  # Ent / (lam^2 E e^{lam T} |x|_1)

    @property
    def degenerate(self) -> bool:
        return self.c_hat is None

    @property
    def passed(self) -> bool:
        if self.c_hat is None:
            return self.ent <= SLACK
        chain = self.ent <= self.intermediate + SLACK
        return chain and self.c_hat <= self.c4_bound * (1 + 1e-9) + SLACK and math.isfinite(self.c_hat)


def pivotal_entropy_check(table: ConfigTable, lam: float) -> PivotalReport:
    """Ratio Ent e^{lam T} / (lam^2 E[e^{lam T} #Piv]) and an explicit bound for it.

    The bound is max_i E(sum_{S_i} T_i(u,v))^2 times the largest number of
    boxes covering a single edge, which follows from chaining the box
    tensorization, the resampling bound and the two pathwise facts.
    """
    if lam >= 0:
        raise ValueError("lambda must be negative")
    system = table.system
    X = np.exp(lam * table.T)
    ent = full_entropy(X, table)
    e_x = table.expect(X)
    e_x_piv = table.expect(X * table.piv_count)
    qs = []
    inter = 0.0
    for _, axes in system.boxes():
        R = table.box_sums(axes)
        q = _fsum(_inside_probs(table, axes) * R * R)
        qs.append(q)
        inter += table.expect(X * table.piv_meets(axes)) * q
    inter *= lam * lam * system.box_multiplicity
    bound = max(qs) * system.covering_multiplicity() if qs else 0.0
    denom = lam * lam * e_x_piv
    c_hat = ent / denom if denom > 0 else None
    diameter_ratio = ent / (lam * lam * e_x * max(1, system.diameter))
    return PivotalReport(lam, ent, e_x_piv, e_x, c_hat, bound, inter, diameter_ratio)


@dataclass
class AssociationReport:
    lam: float
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + SLACK * max(1.0, abs(self.rhs))


def association_check(table: ConfigTable, lam: float) -> AssociationReport:
    """E[e^{lam T} T] <= E e^{lam T} * E T for lam <= 0."""
    if lam > 0:
        raise ValueError("lambda must be nonpositive")
    X = np.exp(lam * table.T)
    return AssociationReport(lam, table.expect(X * table.T), table.expect(X) * table.expect(table.T))


# ---------------------------------------------------------------------------
# Monte Carlo side
# ---------------------------------------------------------------------------


@dataclass
class PhiEstimate:
    mean_exp: float
    stderr: float
    ci: tuple[float, float]
    n_grid: tuple[int, ...]
    tail: tuple[float, ...]
    tail_ci: tuple[tuple[float, float], ...]


def phi_values(T, piv, c: float) -> np.ndarray:
    T = np.asarray(T, dtype=float)
    piv = np.asarray(piv, dtype=float)
    return np.where(c * T < piv, piv, 0.0)


def phi_moment_estimate(T, piv, c: float, alpha: float, n_grid: Sequence[int] | None = None) -> PhiEstimate:
    """Empirical E exp(alpha * phi) with phi = #Piv 1{cT < #Piv}, and P(phi >= n)."""
    from .stats import binomial_ci, mean_stderr

    if c <= 0 or alpha <= 0:
        raise ValueError("c and alpha must be positive")
    phi = phi_values(T, piv, c)
    vals = np.exp(alpha * phi)
    m, se = mean_stderr(vals)
    if n_grid is None:
        top = int(phi.max()) if phi.size else 0
        n_grid = tuple(range(1, max(top, 1) + 1))
    tail, cis = [], []
    for n in n_grid:
        k = int((phi >= n).sum())
        tail.append(k / len(phi))
        cis.append(binomial_ci(k, len(phi)))
    return PhiEstimate(m, se, (m - 1.96 * se, m + 1.96 * se), tuple(n_grid), tuple(tail), tuple(cis))


@dataclass
class MCEntropy:
    value: float
    ci: tuple[float, float]
    n: int


def mc_entropy(lam: float, T, n_boot: int = 500, seed: int = 0, level: float = 0.95) -> MCEntropy:
    """Plug-in Ent e^{lam T} = E[lam T e^{lam T}] - E e^{lam T} log E e^{lam T} with a bootstrap CI."""
    from .rng import generator

    if lam > 0:
        raise ValueError("lambda must be nonpositive")
    T = np.asarray(T, dtype=float)
    if T.size < 1000:
        raise ValueError("need at least 1000 samples")

    def plug(t):
        x = np.exp(lam * t)
        ex = x.mean()
        return float(np.mean(lam * t * x) - ex * math.log(ex))

    value = plug(T)
    if lam == 0 or np.all(T == T[0]):
        return MCEntropy(0.0 if lam == 0 else value, (value, value), T.size)
    rng = generator(seed)
    boots = np.array([plug(T[rng.integers(0, T.size, T.size)]) for _ in range(n_boot)])
    a = (1 - level) / 2
    lo, hi = np.quantile(boots, [a, 1 - a])
    return MCEntropy(value, (float(lo), float(hi)), T.size)


# ---------------------------------------------------------------------------
# full report
# ---------------------------------------------------------------------------


@dataclass
class EntropyReport:
    lam: float
    tensorization: TensorizationReport
    blm: list[BLMReport]
    association: AssociationReport
    pivotal: PivotalReport | None
    variational_ok: bool

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "tensorization": self.tensorization.passed,
            "blm": all(b.passed for b in self.blm),
            "association": self.association.passed,
            "pivotal": True if self.pivotal is None else self.pivotal.passed,
            "variational": self.variational_ok,
        }

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    @property
    def pathwise(self) -> dict[str, bool]:
        """Pathwise facts behind the pivotal bound; the first can fail when geodesics tie."""
        return {
            "difference": all(b.difference_ok for b in self.blm),
            "new": all(b.new_ok for b in self.blm),
        }


def random_w(table: ConfigTable, rng: np.random.Generator, scale: float = 2.0) -> np.ndarray:
    return rng.normal(0.0, scale, size=table.sizes)


def exact_report(system: ExactSystem, n_random_w: int = 50, seed: int = 0, table: ConfigTable | None = None) -> list[EntropyReport]:
    from .rng import generator

    table = enumerate_configs(system) if table is None else table
    rng = generator(seed)
    out = []
    for lam in system.lambdas:
        X = np.exp(lam * table.T)
        ent = full_entropy(X, table)
        var_ok = all(variational_check(table, X, random_w(table, rng), ent) for _ in range(n_random_w))
        var_ok &= variational_check(table, X, np.zeros(table.sizes), ent)
        blm = [blm_resampling_check(table, lam, i) for i in range(len(system.boxes()))]
        piv = pivotal_entropy_check(table, lam) if lam < 0 else None
        out.append(
            EntropyReport(
                lam=lam,
                tensorization=tensorization_check(table, lam),
                blm=blm,
                association=association_check(table, lam),
                pivotal=piv,
                variational_ok=bool(var_ok),
            )
        )
    return out
