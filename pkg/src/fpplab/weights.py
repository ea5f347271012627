"""Edge-weight laws, moment/assumption checks, and the lazy seeded weight field."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .lattice import Edge, Window

KINDS = ("constant", "atom-mixture", "finite-discrete", "uniform", "exponential", "pareto")


@dataclass(frozen=True)
class Distribution:
    """Law of a single edge weight.

    ``p0`` is an extra atom at zero mixed into the base law (for
    ``finite-discrete`` it is read off the support instead).  Pareto laws use
    the survival function ``(x/scale)**-alpha`` for ``x >= scale``.
    """

    kind: str
    value: float = 1.0
    values: tuple[float, ...] = ()
    probs: tuple[float, ...] = ()
    low: float = 0.0
    high: float = 1.0
    rate: float = 1.0
    alpha: float = 1.0
    scale: float = 1.0
    p0: float = 0.0
    _cum: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "finite-discrete":
            vals = tuple(float(v) for v in self.values)
            probs = tuple(float(p) for p in self.probs)
            if not vals or len(vals) != len(probs):
                raise ValueError("finite-discrete needs matching values and probs")
            if min(vals) < 0 or min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
                raise ValueError("finite-discrete needs values >= 0 and probs summing to 1")
            order = sorted(range(len(vals)), key=vals.__getitem__)
            vals = tuple(vals[i] for i in order)
            probs = tuple(probs[i] for i in order)
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "probs", probs)
            object.__setattr__(self, "_cum", tuple(np.cumsum(probs).tolist()))
            object.__setattr__(self, "p0", float(sum(p for v, p in zip(vals, probs) if v == 0.0)))
        if not 0.0 <= self.p0 < 1.0:
            raise ValueError("p0 must lie in [0, 1)")
        if self.kind in ("constant", "atom-mixture") and self.value < 0:
            raise ValueError("weights must be nonnegative")
        if self.kind == "uniform" and not 0 <= self.low < self.high:
            raise ValueError("uniform needs 0 <= low < high")
        if self.kind == "exponential" and self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.kind == "pareto" and (self.alpha <= 0 or self.scale <= 0):
            raise ValueError("pareto needs alpha > 0 and scale > 0")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> "Distribution":
        return cls("constant", value=float(c))

    @classmethod
    def atom_mixture(cls, p0: float, a: float = 1.0) -> "Distribution":
        return cls("atom-mixture", value=float(a), p0=float(p0))

    @classmethod
    def finite_discrete(cls, values: Sequence[float], probs: Sequence[float]) -> "Distribution":
        return cls("finite-discrete", values=tuple(values), probs=tuple(probs))

    @classmethod
    def uniform(cls, low: float = 0.0, high: float = 1.0) -> "Distribution":
        return cls("uniform", low=float(low), high=float(high))

    @classmethod
    def exponential(cls, rate: float = 1.0, p0: float = 0.0) -> "Distribution":
        return cls("exponential", rate=float(rate), p0=float(p0))

    @classmethod
    def pareto(cls, alpha: float, scale: float = 1.0, p0: float = 0.0) -> "Distribution":
        return cls("pareto", alpha=float(alpha), scale=float(scale), p0=float(p0))

    # -- law ------------------------------------------------------------------

    def _base_ppf(self, u: np.ndarray) -> np.ndarray:
        k = self.kind
        if k in ("constant", "atom-mixture"):
            return np.full_like(u, self.value)
        if k == "uniform":
            return self.low + (self.high - self.low) * u
        if k == "exponential":
            return -np.log1p(-u) / self.rate
        if k == "pareto":
            return self.scale * np.power(1.0 - u, -1.0 / self.alpha)
        raise AssertionError(k)

    def ppf(self, u) -> np.ndarray:
        """Quantile transform of uniforms in (0, 1)."""
        u = np.asarray(u, dtype=np.float64)
        if self.kind == "finite-discrete":
            idx = np.searchsorted(np.asarray(self._cum), u, side="right")
            idx = np.minimum(idx, len(self.values) - 1)
            return np.asarray(self.values)[idx]
        if self.p0 == 0.0:
            return self._base_ppf(u)
        out = np.zeros_like(u)
        pos = u >= self.p0
        out[pos] = self._base_ppf((u[pos] - self.p0) / (1.0 - self.p0))
        return out

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        x = self.ppf(np.atleast_1d(u))
        return float(x[0]) if size is None else x

    def _base_survival(self, lam: float) -> float:
        k = self.kind
        if k in ("constant", "atom-mixture"):
            return 1.0 if lam <= self.value else 0.0
        if k == "uniform":
            if lam <= self.low:
                return 1.0
            if lam >= self.high:
                return 0.0
            return (self.high - lam) / (self.high - self.low)
        if k == "exponential":
            return math.exp(-self.rate * lam)
        if k == "pareto":
            return 1.0 if lam <= self.scale else (lam / self.scale) ** (-self.alpha)
        raise AssertionError(k)

    def survival(self, lam: float) -> float:
        """P(t_e >= lam)."""
        if lam <= 0:
            return 1.0
        if self.kind == "finite-discrete":
            return float(sum(p for v, p in zip(self.values, self.probs) if v >= lam))
        return (1.0 - self.p0) * self._base_survival(lam)

    def cdf(self, x) -> np.ndarray:
        """P(t_e <= x), vectorised."""
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "finite-discrete":
            vals = np.asarray(self.values)
            cum = np.concatenate([[0.0], np.asarray(self._cum)])
            return cum[np.searchsorted(vals, x, side="right")]
        k = self.kind
        if k in ("constant", "atom-mixture"):
            base = (x >= self.value).astype(float)
        elif k == "uniform":
            base = np.clip((x - self.low) / (self.high - self.low), 0.0, 1.0)
        elif k == "exponential":
            base = np.where(x < 0, 0.0, -np.expm1(-self.rate * np.maximum(x, 0.0)))
        else:
            base = np.where(x < self.scale, 0.0, 1.0 - np.power(np.maximum(x, self.scale) / self.scale, -self.alpha))
        return np.where(x < 0, 0.0, self.p0 + (1.0 - self.p0) * base)

    def mean(self) -> float:
        k = self.kind
        if k == "finite-discrete":
            return float(np.dot(self.values, self.probs))
        if k in ("constant", "atom-mixture"):
            base = self.value
        elif k == "uniform":
            base = 0.5 * (self.low + self.high)
        elif k == "exponential":
            base = 1.0 / self.rate
        else:
            base = math.inf if self.alpha <= 1 else self.alpha * self.scale / (self.alpha - 1)
        return (1.0 - self.p0) * base

    @property
    def tail_exponent(self) -> float:
        """Sup of the moment orders that are finite; ``inf`` for light tails."""
        return self.alpha if self.kind == "pareto" else math.inf

    @property
    def is_deterministic(self) -> bool:
        if self.kind == "constant":
            return self.p0 == 0.0
        if self.kind == "finite-discrete":
            return len([p for p in self.probs if p > 0]) == 1
        return False

    @property
    def is_integer_valued(self) -> bool:
        if self.kind in ("constant", "atom-mixture"):
            return float(self.value).is_integer()
        if self.kind == "finite-discrete":
            return all(float(v).is_integer() for v in self.values)
        return False

    @property
    def is_discrete(self) -> bool:
        return self.kind in ("constant", "atom-mixture", "finite-discrete")

    def support(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Atoms and masses of a discrete law."""
        if self.kind == "finite-discrete":
            return self.values, self.probs
        if self.kind in ("constant", "atom-mixture"):
            if self.p0 == 0.0:
                return (self.value,), (1.0,)
            return (0.0, self.value), (self.p0, 1.0 - self.p0)
        raise ValueError(f"{self.kind} has no finite support")

    # -- text form ------------------------------------------------------------

    def to_dict(self) -> dict[str, str]:
        k = self.kind
        out = {"kind": k}
        if k in ("constant", "atom-mixture"):
            out["value"] = repr(self.value)
        elif k == "finite-discrete":
            out["values"] = ",".join(repr(v) for v in self.values)
            out["probs"] = ",".join(repr(p) for p in self.probs)
        elif k == "uniform":
            out["low"], out["high"] = repr(self.low), repr(self.high)
        elif k == "exponential":
            out["rate"] = repr(self.rate)
        else:
            out["alpha"], out["scale"] = repr(self.alpha), repr(self.scale)
        if k != "finite-discrete":
            out["p0"] = repr(self.p0)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, str]) -> "Distribution":
        data = dict(data)
        kind = data.pop("kind").strip()
        kw = {}
        for key, raw in data.items():
            if key in ("values", "probs"):
                kw[key] = tuple(float(x) for x in str(raw).split(",") if x.strip())
            elif key in ("value", "low", "high", "rate", "alpha", "scale", "p0"):
                kw[key] = float(raw)
            elif key == "a":
                kw["value"] = float(raw)
            else:
                raise ValueError(f"unknown distribution parameter {key!r}")
        return cls(kind, **kw)

    def __str__(self) -> str:
        body = ", ".join(f"{k}={v}" for k, v in self.to_dict().items() if k != "kind")
        return f"{self.kind}({body})"


def sample(dist: Distribution, rng: np.random.Generator) -> float:
    return dist.sample(rng)


# ---------------------------------------------------------------------------
# weight fields
# ---------------------------------------------------------------------------


class WeightField:
    """Deterministic i.i.d. weights on every edge of Z^d.

    ``weight_at`` hashes ``(seed, lower endpoint, axis)`` into a uniform and
    pushes it through the quantile function, so the value on an edge never
    depends on which window it is read through.
    """

    def __init__(self, dist: Distribution, seed: int):
        self.dist = dist
        self.seed = int(seed) & ((1 << 64) - 1)

    def __repr__(self):
        return f"WeightField({self.dist}, seed={self.seed})"

    def weight_at(self, e: Edge) -> float:
        u = kernels.edge_uniforms_at(self.seed, [e.u], [e.axis])
        return float(self.dist.ppf(u)[0])

    def weights_of(self, edges: Sequence[Edge]) -> np.ndarray:
        if not edges:
            return np.zeros(0)
        lower = np.array([e.u for e in edges], dtype=np.int64)
        axes = np.array([e.axis for e in edges], dtype=np.int64)
        return self.dist.ppf(kernels.edge_uniforms_at(self.seed, lower, axes))

    def window_weights(self, window: Window) -> np.ndarray:
        """Array ``(d, N)``; entry ``[k, i]`` is the edge from site i towards +e_k."""
        n, d = window.side, window.d
        U = kernels.edge_uniforms(self.seed, window.corner, n, d)
        W = self.dist.ppf(U.reshape(-1)).reshape(d, -1)
        _mask_top_faces(W, n, d)
        return W


class OverlayField:
    """A field equal to ``base`` except on a finite set of replaced edges."""

    def __init__(self, base, replaced: Mapping[Edge, float]):
        self.base = base
        self.replaced = dict(replaced)
        self.dist = base.dist

    def weight_at(self, e: Edge) -> float:
        if e in self.replaced:
            return self.replaced[e]
        return self.base.weight_at(e)

    def weights_of(self, edges: Sequence[Edge]) -> np.ndarray:
        out = np.asarray(self.base.weights_of(edges), dtype=float).copy()
        for j, e in enumerate(edges):
            if e in self.replaced:
                out[j] = self.replaced[e]
        return out

    def window_weights(self, window: Window) -> np.ndarray:
        W = self.base.window_weights(window).copy()
        for e, w in self.replaced.items():
            if window.contains(e.u) and window.contains(e.v):
                W[e.axis, window.index(e.u)] = w
        return W


class ArrayField:
    """Explicit weights for a finite set of edges (everything else ``default``)."""

    def __init__(self, weights: Mapping[Edge, float], default: float = math.inf, dist: Distribution | None = None):
        self.weights = dict(weights)
        self.default = default
        self.dist = dist

    def weight_at(self, e: Edge) -> float:
        return self.weights.get(e, self.default)

    def weights_of(self, edges: Sequence[Edge]) -> np.ndarray:
        return np.array([self.weight_at(e) for e in edges], dtype=float)

    def window_weights(self, window: Window) -> np.ndarray:
        W = np.full((window.d, window.size), self.default, dtype=float)
        for e, w in self.weights.items():
            if window.contains(e.u) and window.contains(e.v):
                W[e.axis, window.index(e.u)] = w
        _mask_top_faces(W, window.side, window.d)
        return W


def _mask_top_faces(W: np.ndarray, n: int, d: int) -> None:
    shape = (n,) * d
    for k in range(d):
        idx = [slice(None)] * d
        idx[k] = n - 1
        W[k].reshape(shape)[tuple(idx)] = np.inf


# ---------------------------------------------------------------------------
# moments and assumptions
# ---------------------------------------------------------------------------

# p_c for bond percolation; d = 2 is exact, the rest are numerical estimates.
PC_TABLE: dict[int, tuple[float, str]] = {
    2: (0.5, "exact (Kesten 1980)"),
    3: (0.2488126, "numerical estimate, Monte Carlo literature"),
    4: (0.1601314, "numerical estimate, Monte Carlo literature"),
    5: (0.1181718, "numerical estimate, Monte Carlo literature"),
    6: (0.0942019, "numerical estimate, Monte Carlo literature"),
}


@dataclass(frozen=True)
class PcValue:
    value: float
    provenance: str


def pc_value(d: int, override: float | None = None) -> PcValue:
    if d < 2:
        raise ValueError("d must be at least 2")
    if override is not None:
        if not 0.0 < override < 1.0:
            raise ValueError("p_c override must lie in (0, 1)")
        return PcValue(float(override), "user")
    if d not in PC_TABLE:
        raise ValueError(f"no tabulated bond-percolation threshold for d={d}; pass an override")
    value, prov = PC_TABLE[d]
    return PcValue(value, prov)


def min_of_copies_survival(dist: Distribution, k: int, lam: float) -> float:
    """P(min of k i.i.d. copies >= lam) = P(t_e >= lam)**k."""
    if k < 1 or lam < 0:
        raise ValueError("need k >= 1 and lam >= 0")
    return dist.survival(lam) ** k


def moment_order(dist: Distribution, k: int = 1) -> float:
    """E[(min of k copies)^beta] < inf exactly for beta below this order."""
    return k * dist.tail_exponent


def moment_finite(dist: Distribution, k: int, beta: float) -> bool:
    if beta <= 0:
        raise ValueError("beta must be positive")
    return beta < moment_order(dist, k)


@dataclass(frozen=True)
class MomentReport:
    d: int
    a1_holds: bool
    a2_holds: bool
    tail_exponent: float
    y_moment_order: float
    z_moment_order: float
    p0: float
    pc: float
    pc_provenance: str

    @property
    def ok(self) -> bool:
        return self.a1_holds and self.a2_holds

    def diagnostic(self) -> str:
        parts = []
        if not self.a1_holds:
            parts.append(
                f"(A1) fails: min of {self.d} copies has finite moments only below order {self.y_moment_order:g} (need 2)"
            )
        if not self.a2_holds:
            parts.append(f"(A2) fails: P(t_e=0)={self.p0:g} >= p_c({self.d})={self.pc:g} [{self.pc_provenance}]")
        return "; ".join(parts) or "assumptions hold"


def validate_assumptions(dist: Distribution, d: int, pc_override: float | None = None) -> MomentReport:
    pc = pc_value(d, pc_override)
    return MomentReport(
        d=d,
        a1_holds=moment_finite(dist, d, 2.0),
        a2_holds=dist.p0 < pc.value,
        tail_exponent=dist.tail_exponent,
        y_moment_order=moment_order(dist, d),
        z_moment_order=moment_order(dist, 2 * d),
        p0=dist.p0,
        pc=pc.value,
        pc_provenance=pc.provenance,
    )
