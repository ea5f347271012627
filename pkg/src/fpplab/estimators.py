"""Monte Carlo estimators built on certified passage times.

Every sample ``k`` of an experiment uses its own weight field seeded by
``sample_seed(master_seed, experiment, k)``, so results do not depend on how
samples are scheduled across processes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .lattice import Site, Window, as_site, l1, macro_box
from .passage import (
    CertificationError,
    box_diameter,
    certified_time,
    dijkstra,
    exact_passage_time,
    geodesics_to,
    min_saw_time,
    pivotal_edges,
)
from .rng import sample_seed
from .stats import ExponentFit, FitError, binomial_ci, mean_stderr, wls_fit, z_value
from .weights import Distribution, WeightField, validate_assumptions


class AssumptionError(ValueError):
    """(A1) or (A2) fails for the requested law and dimension."""


def check_assumptions(dist: Distribution, d: int, force: bool = False):
    report = validate_assumptions(dist, d)
    if not report.ok and not force:
        raise AssumptionError(report.diagnostic())
    return report


def worker_count(default: int = 1) -> int:
    env = os.environ.get("FPP_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("FPP_WORKERS must be positive")
        return n
    return default


def parallel_map(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Ordered map; results are returned in input order whatever the worker count."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


# ---------------------------------------------------------------------------
# time constant
# ---------------------------------------------------------------------------


@dataclass
class TimeConstantEstimate:
    direction: Site
    n_grid: tuple[int, ...]
    means: tuple[float, ...]  # of tau(0, n x) / n
    stderrs: tuple[float, ...]
    variances: tuple[float, ...]
    n_samples: int
    n_uncertified: int
    mu_upper: float
    mu_point: float
    mu_point_stderr: float
    monotone_violations: int
    raw: np.ndarray = field(repr=False)  # (K, len(n_grid)) passage times

    @property
    def certified(self) -> bool:
        return self.n_uncertified == 0

    @property
    def monotone_ok(self) -> bool:
        steps = max(len(self.n_grid) - 1, 1)
        return self.monotone_violations <= 0.05 * steps

    def per_unit(self) -> tuple[float, float]:
        """(mu_upper, stderr at largest n) per unit L1 length of the direction."""
        norm = l1(self.direction)
        return self.mu_upper / norm, self.mu_point_stderr / norm


def _mu_sample(args):
    dist, seed, x, n_grid, max_radius = args
    fld = WeightField(dist, seed)
    out, ok = [], True
    for n in n_grid:
        res = exact_passage_time(fld, tuple(n * c for c in x), max_radius=max_radius)
        out.append(res.value)
        ok &= res.certified
    return out, ok


def estimate_mu(
    dist: Distribution,
    x: Sequence[int],
    n_grid: Sequence[int],
    K: int,
    *,
    master_seed: int = 0,
    experiment: str = "mu",
    workers: int = 1,
    force: bool = False,
    z: float | None = None,
    max_radius: int = 2048,
) -> TimeConstantEstimate:
    x = as_site(x)
    n_grid = tuple(int(n) for n in n_grid)
    if any(b <= a for a, b in zip(n_grid, n_grid[1:])) or n_grid[0] < 1:
        raise ValueError("n grid must be positive and increasing")
    if K < 2:
        raise ValueError("need at least two samples")
    check_assumptions(dist, len(x), force)
    z = z_value() if z is None else z
    tasks = [(dist, sample_seed(master_seed, experiment, k), x, n_grid, max_radius) for k in range(K)]
    results = parallel_map(_mu_sample, tasks, workers)
    raw = np.array([r[0] for r in results], dtype=float)
    bad = sum(not r[1] for r in results)
    scaled = raw / np.asarray(n_grid, dtype=float)
    means = scaled.mean(axis=0)
    variances = scaled.var(axis=0, ddof=1)
    ses = np.sqrt(variances / K)
    upper = float(np.min(means + z * ses))
    violations = 0
    for j in range(len(n_grid) - 1):
        pooled = math.sqrt(ses[j] ** 2 + ses[j + 1] ** 2)
        if means[j + 1] > means[j] + 3 * pooled + 1e-12:
            violations += 1
    return TimeConstantEstimate(
        direction=x,
        n_grid=n_grid,
        means=tuple(means.tolist()),
        stderrs=tuple(ses.tolist()),
        variances=tuple(variances.tolist()),
        n_samples=K,
        n_uncertified=bad,
        mu_upper=upper,
        mu_point=float(means[-1]),
        mu_point_stderr=float(ses[-1]),
        monotone_violations=violations,
        raw=raw,
    )


# ---------------------------------------------------------------------------
# nonrandom fluctuations
# ---------------------------------------------------------------------------


@dataclass
class FluctuationFit:
    estimate: TimeConstantEstimate
    mu_hat: float
    gaps: tuple[float, ...]
    gap_stderrs: tuple[float, ...]
    fit: ExponentFit | None
    degenerate: bool
    lower_bound_ok: bool  # mean T_n >= n * mu_lower on the whole grid
    reference_a: float = 0.5

    @property
    def sublinear(self) -> bool:
        return self.fit is not None and self.fit.slope_below(1.0)

    def reference_curve(self, n) -> np.ndarray:
        """C (n log n)^(1/2), scaled to match the first positive gap."""
        n = np.asarray(n, dtype=float)
        shape = np.sqrt(n * np.log(n))
        pos = [(m, g) for m, g in zip(self.estimate.n_grid, self.gaps) if g > 0]
        if not pos:
            return np.zeros_like(n)
        m0, g0 = pos[0]
        return g0 * shape / math.sqrt(m0 * math.log(m0))


def nonrandom_fluctuation_fit(
    dist: Distribution,
    x: Sequence[int],
    n_grid: Sequence[int],
    K: int,
    *,
    estimate: TimeConstantEstimate | None = None,
    **kw,
) -> FluctuationFit:
    """Fit log(mean T_n - n mu_hat) = log C + a log n with mu_hat = mu_upper."""
    est = estimate_mu(dist, x, n_grid, K, experiment=kw.pop("experiment", "fluctuation"), **kw) if estimate is None else estimate
    n = np.asarray(est.n_grid, dtype=float)
    mean_T = np.asarray(est.means) * n
    se_T = np.asarray(est.stderrs) * n
    mu_hat = est.mu_upper
    # the uncertainty of mu_hat is taken as the stderr of the mean at the largest n
    mu_se = est.mu_point_stderr
    gaps = mean_T - n * mu_hat
    gap_se = np.sqrt(se_T**2 + (n * mu_se) ** 2)
    mu_lower = mu_hat - 2 * z_value() * mu_se
    lower_ok = bool(np.all(mean_T >= n * mu_lower - 1e-9 * np.maximum(1.0, mean_T)))
    tol = 1e-12 * np.maximum(1.0, mean_T)
    keep = gaps > tol
    fit = None
    if keep.sum() >= 4:
        fit = wls_fit(np.log(n[keep]), np.log(gaps[keep]), sigma=gap_se[keep] / gaps[keep] + 1e-300)
        fit = ExponentFit(fit.x, fit.y, fit.slope, fit.slope_ci, fit.intercept, fit.r2, fit.level, tuple(n[~keep].tolist()))
    return FluctuationFit(
        estimate=est,
        mu_hat=mu_hat,
        gaps=tuple(gaps.tolist()),
        gap_stderrs=tuple(gap_se.tolist()),
        fit=fit,
        degenerate=fit is None,
        lower_bound_ok=lower_ok,
    )


# ---------------------------------------------------------------------------
# lower tail
# ---------------------------------------------------------------------------


@dataclass
class TailFit:
    t: tuple[float, ...]
    tail: tuple[float, ...]
    counts: tuple[int, ...]
    ci: tuple[tuple[float, float], ...]
    n_samples: int
    rate: float  # c in log P ~ -c t^2; inf when every tail point is zero
    rate_ci: tuple[float, float]
    fit: ExponentFit | None
    mean: float = math.nan
    samples: np.ndarray | None = field(default=None, repr=False)

    @property
    def monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.tail, self.tail[1:]))


def _passage_sample(args):
    dist, seed, x, max_radius = args
    res = exact_passage_time(WeightField(dist, seed), x, max_radius=max_radius)
    return res.value, res.certified


def passage_samples(
    dist: Distribution,
    x: Sequence[int],
    K: int,
    *,
    master_seed: int = 0,
    experiment: str = "tau-sample",
    workers: int = 1,
    max_radius: int = 2048,
) -> tuple[np.ndarray, int]:
    """K certified samples of tau(0, x); returns (values, uncertified count)."""
    x = as_site(x)
    tasks = [(dist, sample_seed(master_seed, experiment, k), x, max_radius) for k in range(K)]
    res = parallel_map(_passage_sample, tasks, workers)
    return np.array([r[0] for r in res]), sum(not r[1] for r in res)


def _pivotal_sample(args):
    dist, seed, x, max_radius = args
    res, dag = geodesics_to(WeightField(dist, seed), x, max_radius=max_radius)
    return res.value, len(pivotal_edges(dag)), res.certified and dag.certified


def pivotal_samples(
    dist: Distribution,
    x: Sequence[int],
    K: int,
    *,
    master_seed: int = 0,
    experiment: str = "pivotal-stats",
    workers: int = 1,
    max_radius: int = 2048,
) -> tuple[np.ndarray, np.ndarray, int]:
    """K samples of (T, #Piv(0, x)); returns (T, counts, uncertified count)."""
    x = as_site(x)
    tasks = [(dist, sample_seed(master_seed, experiment, k), x, max_radius) for k in range(K)]
    res = parallel_map(_pivotal_sample, tasks, workers)
    T = np.array([r[0] for r in res])
    piv = np.array([r[1] for r in res], dtype=np.int64)
    return T, piv, sum(not r[2] for r in res)


def tail_fit_from_samples(T: np.ndarray, norm: float, t_grid: Sequence[float] | None = None, n_grid_points: int = 8) -> TailFit:
    """Empirical P(T - mean <= -t sqrt(norm)) and a weighted fit of log P against t^2."""
    T = np.asarray(T, dtype=float)
    K = T.size
    mean = float(T.mean())
    z = (mean - T) / math.sqrt(norm)
    if t_grid is None:
        srt = np.sort(z)[::-1]
        top = float(srt[min(19, K - 1)])  # keep at least ~20 events at the largest t
        t_grid = np.linspace(top / n_grid_points, top, n_grid_points) if top > 0 else np.linspace(0.1, 1.0, n_grid_points)
    t_grid = np.asarray(t_grid, dtype=float)
    counts = np.array([int((z >= t).sum()) for t in t_grid])
    tail = counts / K
    cis = tuple(binomial_ci(int(k), K) for k in counts)
    pos = (counts > 0) & (t_grid > 0)
    fit = None
    rate, rate_ci = math.inf, (math.inf, math.inf)
    if pos.sum() >= 4:
        k = counts[pos]
        sigma = np.sqrt((1 - tail[pos]) / k) + 1e-12
        fit = wls_fit(t_grid[pos] ** 2, np.log(tail[pos]), sigma=sigma)
        rate = -fit.slope
        rate_ci = (-fit.slope_ci[1], -fit.slope_ci[0])
    elif pos.any():
        rate, rate_ci = math.nan, (math.nan, math.nan)
    return TailFit(
        t=tuple(t_grid.tolist()),
        tail=tuple(tail.tolist()),
        counts=tuple(int(c) for c in counts),
        ci=cis,
        n_samples=K,
        rate=rate,
        rate_ci=rate_ci,
        fit=fit,
        mean=mean,
        samples=T,
    )


def lower_tail_fit(
    dist: Distribution,
    x: Sequence[int],
    K: int,
    *,
    t_grid: Sequence[float] | None = None,
    master_seed: int = 0,
    workers: int = 1,
    force: bool = False,
    experiment: str = "lower-tail",
) -> TailFit:
    if K < 1000:
        raise ValueError("lower-tail fits need K >= 1000")
    x = as_site(x)
    check_assumptions(dist, len(x), force)
    T, bad = passage_samples(dist, x, K, master_seed=master_seed, experiment=experiment, workers=workers)
    if bad:
        raise CertificationError(f"{bad} of {K} passage times were not certified")
    return tail_fit_from_samples(T, l1(x), t_grid)


# ---------------------------------------------------------------------------
# shape
# ---------------------------------------------------------------------------


def direction_fan(F: int, d: int = 2) -> list[tuple[int, ...]]:
    """F lattice directions in the first quadrant of the (e1, e2) plane, evenly spread in L1 angle.

    The fan always contains e1 and the main diagonal (1, ..., 1).
    """
    if F < 2:
        raise ValueError("fan needs at least two directions")
    out: list[tuple[int, ...]] = []
    steps = F - 1 if d == 2 else F - 2
    for j in range(steps + 1):
        frac = Fraction(j, max(steps, 1))
        a, b = (1 - frac), frac
        den = math.lcm(a.denominator, b.denominator)
        v = [int(a * den), int(b * den)] + [0] * (d - 2)
        g = math.gcd(*v)
        out.append(tuple(c // g for c in v))
    diag = tuple([1] * d)
    if diag not in out:
        out.append(diag)
    seen = []
    for v in out:
        if v not in seen:
            seen.append(v)
    return seen


def unit_l1(v: Sequence[int]) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.abs(v).sum()


def ray_radii(mask_fn: Callable[[tuple[int, ...]], bool], xi: np.ndarray, k_max: float) -> tuple[float, float]:
    """Outer and inner radii of a union of closed unit cubes along the ray k * xi.

    The ray is walked cell by cell.  The outer radius is the largest k whose
    cell is in the set and the inner radius is where the first cell outside
    the set is entered.
    """
    xi = np.asarray(xi, dtype=float)
    d = xi.size
    cell = [0] * d
    k = 0.0
    next_k, step, delta = [], [], []
    for c in xi:
        if c > 0:
            step.append(1)
            next_k.append(0.5 / c)
            delta.append(1.0 / c)
        elif c < 0:
            step.append(-1)
            next_k.append(0.5 / -c)
            delta.append(-1.0 / c)
        else:
            step.append(0)
            next_k.append(math.inf)
            delta.append(math.inf)
    outer = 0.0
    inner = None
    while k <= k_max:
        exit_k = min(next_k)
        if mask_fn(tuple(cell)):
            outer = exit_k
        elif inner is None:
            inner = k
        j = int(np.argmin(next_k))
        k = exit_k
        cell[j] += step[j]
        next_k[j] += delta[j]
    if inner is None:
        inner = k_max
    return outer, inner


@dataclass
class ShapeDeviation:
    t: float
    directions: tuple[tuple[int, ...], ...]
    angles: tuple[float, ...]
    outer_radii: tuple[float, ...]  # mean over samples of r_t(xi)
    inner_radii: tuple[float, ...]
    reference_radii: tuple[float, ...]  # 1 / mu_hat(xi)
    outer_excess: float
    inner_deficit: float
    excess_stderr: float
    deficit_stderr: float
    n_used: int
    n_excluded: int

    @property
    def outer_envelope(self) -> float:
        return self.t**-0.5 * math.log(self.t) ** 0.5

    @property
    def inner_envelope(self) -> float:
        return self.t**-0.5 * math.log(self.t) ** 4


def _shape_sample(args):
    dist, seed, t_grid, dirs, mus, d = args
    fld = WeightField(dist, seed)
    t_max = max(t_grid)
    mu_min = min(mus)
    radius = int(math.ceil(1.5 * t_max / mu_min)) + 3
    while True:
        win = Window(tuple([0] * d), radius)
        pf = dijkstra(fld, tuple([0] * d), win, stop_dist=t_max, stop_at_boundary=False)
        if pf.boundary_min > t_max or radius > 4096:
            break
        radius = int(radius * 1.5) + 1
    out = []
    for t in t_grid:
        if not pf.boundary_min > t:
            out.append(None)
            continue
        inside = pf.settled & (pf.dist <= t)

        def mask_fn(c, inside=inside):
            return win.contains(c) and bool(inside[win.index(c)])

        row = []
        for v, mu in zip(dirs, mus):
            xi = unit_l1(v)
            o, i = ray_radii(mask_fn, xi, win.radius)
            row.append((o / t, i / t))
        out.append(row)
    return out


def shape_deviation(
    dist: Distribution,
    t_grid: Sequence[float],
    F: int,
    K: int,
    *,
    d: int = 2,
    mu_hat: dict | None = None,
    mu_n_grid: Sequence[int] = (8, 16, 32),
    mu_K: int = 200,
    master_seed: int = 0,
    workers: int = 1,
    force: bool = False,
    experiment: str = "shape",
) -> list[ShapeDeviation]:
    """Directional radii of B(t)/t against 1/mu_hat over a fan of directions."""
    check_assumptions(dist, d, force)
    dirs = direction_fan(F, d)
    if mu_hat is None:
        mu_hat = {}
        for v in dirs:
            if dist.is_deterministic:
                mu_hat[v] = float(dist.ppf(0.5))
            else:
                est = estimate_mu(dist, v, mu_n_grid, mu_K, master_seed=master_seed, experiment=f"{experiment}-mu-{v}", workers=workers, force=True)
                mu_hat[v] = est.per_unit()[0]
    mus = [float(mu_hat[v]) for v in dirs]
    if any(m <= 0 for m in mus):
        raise ValueError("mu_hat must be positive on the fan")
    tasks = [(dist, sample_seed(master_seed, experiment, k), tuple(t_grid), dirs, mus, d) for k in range(K)]
    results = parallel_map(_shape_sample, tasks, workers)
    out = []
    for j, t in enumerate(t_grid):
        rows = [r[j] for r in results if r[j] is not None]
        excluded = sum(r[j] is None for r in results)
        if not rows:
            raise CertificationError(f"no certified ball at t={t}")
        arr = np.array(rows)  # (n, F, 2)
        mu = np.asarray(mus)
        exc = np.maximum(arr[:, :, 0] * mu - 1, 0).max(axis=1)
        dfc = np.maximum(1 - arr[:, :, 1] * mu, 0).max(axis=1)
        e_m, e_se = mean_stderr(exc)
        f_m, f_se = mean_stderr(dfc)
        out.append(
            ShapeDeviation(
                t=float(t),
                directions=tuple(dirs),
                angles=tuple(math.atan2(v[1], v[0]) for v in dirs),
                outer_radii=tuple(arr[:, :, 0].mean(axis=0).tolist()),
                inner_radii=tuple(arr[:, :, 1].mean(axis=0).tolist()),
                reference_radii=tuple((1 / mu).tolist()),
                outer_excess=e_m,
                inner_deficit=f_m,
                excess_stderr=e_se,
                deficit_stderr=f_se,
                n_used=len(rows),
                n_excluded=excluded,
            )
        )
    return out


# ---------------------------------------------------------------------------
# Kesten event
# ---------------------------------------------------------------------------


@dataclass
class KestenFit:
    a: float
    m_grid: tuple[int, ...]
    probs: tuple[float, ...]
    counts: tuple[int, ...]
    ci: tuple[tuple[float, float], ...]
    n_samples: int
    fit: ExponentFit | None
    used_m: tuple[int, ...]
    geodesic_fraction: float  # samples with a * #pi <= tau(pi) for the chosen geodesic

    @property
    def degenerate(self) -> bool:
        return self.fit is None


def _kesten_sample(args):
    dist, seed, m_grid, d, x = args
    fld = WeightField(dist, seed)
    m_max = max(m_grid)
    win = Window(tuple([0] * d), m_max)
    W = fld.window_weights(win)
    mins = [min_saw_time(fld, m, win, weights=W) for m in m_grid]
    res = exact_passage_time(fld, x)
    path = res.fwd.path_to(x)
    return mins, len(path) - 1, res.value


def kesten_decay_fit(
    dist: Distribution,
    a: float,
    m_grid: Sequence[int],
    K: int,
    *,
    d: int = 2,
    x: Sequence[int] | None = None,
    master_seed: int = 0,
    workers: int = 1,
    force: bool = False,
    experiment: str = "kesten",
) -> KestenFit:
    """P(some self-avoiding path from 0 with exactly m edges has passage time < a m), fitted log-linearly in m."""
    if a <= 0:
        raise ValueError("a must be positive")
    check_assumptions(dist, d, force)
    m_grid = tuple(int(m) for m in m_grid)
    x = tuple([max(m_grid)] + [0] * (d - 1)) if x is None else as_site(x)
    tasks = [(dist, sample_seed(master_seed, experiment, k), m_grid, d, x) for k in range(K)]
    results = parallel_map(_kesten_sample, tasks, workers)
    mins = np.array([r[0] for r in results])
    counts = [(mins[:, j] < a * m).sum() for j, m in enumerate(m_grid)]
    counts = [int(c) for c in counts]
    probs = [c / K for c in counts]
    cis = tuple(binomial_ci(c, K) for c in counts)
    # drop the tail of the grid once counts hit zero
    used = []
    for m, c in zip(m_grid, counts):
        if c == 0:
            break
        used.append(m)
    fit = None
    if len(used) >= 4:
        sel = slice(0, len(used))
        p = np.asarray(probs[sel])
        k = np.asarray(counts[sel], dtype=float)
        try:
            fit = wls_fit(used, np.log(p), sigma=np.sqrt((1 - p) / k) + 1e-12)
        except FitError:
            fit = None
    geo = float(np.mean([a * n_edges <= tau + 1e-12 for _, n_edges, tau in results]))
    return KestenFit(a, m_grid, tuple(probs), tuple(counts), cis, K, fit, tuple(used), geo)


# ---------------------------------------------------------------------------
# macro-box concentration
# ---------------------------------------------------------------------------


@dataclass
class BoxConcentration:
    m: int
    scale: float  # m^(1/2) (log m)^4
    mean: float
    tail: float
    tail_ci: tuple[float, float]
    n_samples: int
    n_uncertified: int
    sandwich_ok: int  # samples where tau_m <= tau(0, v) <= tau_m + J_m(0) + J_m(v)
    values: np.ndarray = field(repr=False)


def _box_sample(args):
    dist, seed, m, c7, xi = args
    fld = WeightField(dist, seed)
    d = len(xi)
    origin = tuple([0] * d)
    v = tuple(m * c for c in xi)
    D0 = macro_box(origin, m, c7)
    Dv = macro_box(v, m, c7)
    res = certified_time(fld, D0.sites(), Dv.sites())
    direct = exact_passage_time(fld, v)
    cert = res.certified and direct.certified
    Js = []
    for box in (D0, Dv):
        margin = box.radius + 4
        while True:
            win = Window(box.center, box.radius + margin)
            dr = box_diameter(fld, box, win)
            if dr.certified or margin > 512:
                break
            margin *= 2
        cert &= dr.certified
        Js.append(dr.value)
    tol = 1e-9 * max(1.0, direct.value)
    ok = res.value <= direct.value + tol and direct.value <= res.value + Js[0] + Js[1] + tol
    return res.value, cert, ok


def box_concentration_fit(
    dist: Distribution,
    m_grid: Sequence[int],
    C7: float,
    K: int,
    *,
    xi: Sequence[int] | None = None,
    master_seed: int = 0,
    workers: int = 1,
    force: bool = False,
    d: int = 2,
    experiment: str = "box-sandwich",
) -> list[BoxConcentration]:
    """Descriptive tails of tau(D_m(0), D_m(m xi)) at the scale m^(1/2) (log m)^4."""
    xi = tuple([1] + [0] * (d - 1)) if xi is None else as_site(xi)
    check_assumptions(dist, len(xi), force)
    out = []
    for m in m_grid:
        tasks = [(dist, sample_seed(master_seed, f"{experiment}-{m}", k), int(m), C7, xi) for k in range(K)]
        res = parallel_map(_box_sample, tasks, workers)
        vals = np.array([r[0] for r in res])
        scale = math.sqrt(m) * math.log(m) ** 4
        mean = float(vals.mean())
        k = int((np.abs(vals - mean) >= scale).sum())
        out.append(
            BoxConcentration(
                m=int(m),
                scale=scale,
                mean=mean,
                tail=k / K,
                tail_ci=binomial_ci(k, K),
                n_samples=K,
                n_uncertified=sum(not r[1] for r in res),
                sandwich_ok=sum(bool(r[2]) for r in res),
                values=vals,
            )
        )
    return out


# ---------------------------------------------------------------------------
# norm equivalence and moments
# ---------------------------------------------------------------------------


@dataclass
class NormEquivalence:
    c9: float
    c9_range: tuple[float, float]
    mu_unit: tuple[float, ...]
    mu_unit_ci: tuple[tuple[float, float], ...]
    a2_risk: tuple[bool, ...]

    @property
    def ok(self) -> bool:
        return math.isfinite(self.c9) and not any(self.a2_risk) and all(m > 0 for m in self.mu_unit)


def _c9(mus) -> float:
    mus = np.asarray(mus, dtype=float)
    if (mus <= 0).any():
        return math.inf
    return float(max(mus.max(), (1 / mus).max()))


def norm_equivalence_report(estimates: Iterable[TimeConstantEstimate], level: float = 0.95) -> NormEquivalence:
    """C9 = max(max mu(xi), max 1/mu(xi)) over unit-L1 directions."""
    estimates = list(estimates)
    if len(estimates) < 8:
        raise ValueError("norm-equivalence needs at least 8 directions")
    z = z_value(level)
    mus, cis, risk = [], [], []
    for est in estimates:
        norm = l1(est.direction)
        m = est.mu_point / norm
        se = est.mu_point_stderr / norm
        mus.append(m)
        cis.append((m - z * se, m + z * se))
        risk.append(m - z * se <= 0)
    c9 = _c9(mus)
    # smallest and largest C9 compatible with every per-direction interval
    best = [max(v, 1 / v) for v in (min(max(1.0, lo), hi) for lo, hi in cis)] if not any(risk) else [math.inf]
    worst = [max(hi, 1 / lo) if lo > 0 else math.inf for lo, hi in cis]
    return NormEquivalence(c9, (float(max(best)), float(max(worst))), tuple(mus), tuple(cis), tuple(risk))


@dataclass(frozen=True)
class ZMomentReport:
    d: int
    z_order: float  # moments of Z (min of 2d copies) finite exactly below this order
    needed: float  # 2d + 2
    tail_exponent: float
    inner_hypothesis: bool  # tail exponent > 1 + 1/d
    condition_met: bool  # E Z^(2d+2+delta) < inf for some delta > 0
    delta_max: float


def z_moment_report(dist: Distribution, d: int) -> ZMomentReport:
    from .weights import moment_order

    if d < 2:
        raise ValueError("d must be at least 2")
    order = moment_order(dist, 2 * d)
    needed = 2 * d + 2
    alpha = dist.tail_exponent
    return ZMomentReport(
        d=d,
        z_order=order,
        needed=float(needed),
        tail_exponent=alpha,
        inner_hypothesis=alpha > 1 + 1 / d,
        condition_met=order > needed,
        delta_max=max(order - needed, 0.0),
    )
