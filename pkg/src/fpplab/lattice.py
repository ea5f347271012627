"""Geometry of Z^d: sites, edges, cubic windows, local 3^d boxes and macro boxes."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

Site = tuple[int, ...]


def as_site(coords: Sequence[int]) -> Site:
    s = tuple(int(c) for c in coords)
    if len(s) < 2:
        raise ValueError(f"sites need dimension >= 2, got {s!r}")
    return s


def l1(s: Sequence[int]) -> int:
    return sum(abs(int(c)) for c in s)


def neighbors(s: Sequence[int]) -> list[Site]:
    """The 2d nearest neighbours of ``s``."""
    s = as_site(s)
    out = []
    for k in range(len(s)):
        for step in (1, -1):
            t = list(s)
            t[k] += step
            out.append(tuple(t))
    return out


@dataclass(frozen=True, order=True)
class Edge:
    """Nearest-neighbour edge with the lexicographically smaller endpoint first."""

    u: Site
    v: Site

    def __post_init__(self):
        if len(self.u) != len(self.v):
            raise ValueError("endpoints of different dimension")
        if sum(abs(a - b) for a, b in zip(self.u, self.v)) != 1:
            raise ValueError(f"{self.u} and {self.v} are not nearest neighbours")
        if self.v < self.u:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    @classmethod
    def of(cls, a: Sequence[int], b: Sequence[int]) -> "Edge":
        return cls(as_site(a), as_site(b))

    @property
    def axis(self) -> int:
        for k, (a, b) in enumerate(zip(self.u, self.v)):
            if a != b:
                return k
        raise AssertionError("degenerate edge")

    @property
    def dim(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class Window:
    """L-infinity ball ``center + [-radius, radius]^d``, stored densely in C order."""

    center: Site
    radius: int

    def __post_init__(self):
        object.__setattr__(self, "center", as_site(self.center))
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def side(self) -> int:
        return 2 * self.radius + 1

    @property
    def size(self) -> int:
        return self.side**self.d

    @property
    def corner(self) -> Site:
        return tuple(c - self.radius for c in self.center)

    @property
    def strides(self) -> tuple[int, ...]:
        n = self.side
        return tuple(n ** (self.d - 1 - k) for k in range(self.d))

    def contains(self, s: Sequence[int]) -> bool:
        return len(s) == self.d and all(abs(a - c) <= self.radius for a, c in zip(s, self.center))

    def index(self, s: Sequence[int]) -> int:
        if not self.contains(s):
            raise KeyError(f"{tuple(s)} outside {self}")
        return sum((a - c) * st for a, c, st in zip(s, self.corner, self.strides))

    def indices(self, sites) -> np.ndarray:
        arr = np.atleast_2d(np.asarray(sites, dtype=np.int64)) - np.asarray(self.corner, dtype=np.int64)
        if (arr < 0).any() or (arr >= self.side).any():
            raise KeyError("site outside window")
        return arr @ np.asarray(self.strides, dtype=np.int64)

    def site(self, i: int) -> Site:
        n = self.side
        out = []
        for k in range(self.d - 1, -1, -1):
            out.append(self.corner[k] + i % n)
            i //= n
        return tuple(reversed(out))

    def coords(self) -> np.ndarray:
        """Absolute coordinates of every site, shape ``(N, d)``."""
        grid = np.indices((self.side,) * self.d).reshape(self.d, -1).T
        return grid + np.asarray(self.corner, dtype=np.int64)

    def boundary_mask(self) -> np.ndarray:
        rel = np.abs(self.coords() - np.asarray(self.center))
        return (rel == self.radius).any(axis=1)

    def sites(self) -> Iterator[Site]:
        ranges = [range(c - self.radius, c + self.radius + 1) for c in self.center]
        return itertools.product(*ranges)

    def edges(self) -> list[Edge]:
        out = []
        for s in self.sites():
            for k in range(self.d):
                t = list(s)
                t[k] += 1
                if self.contains(t):
                    out.append(Edge(s, tuple(t)))
        return out

    def edge_count(self) -> int:
        n = self.side
        return self.d * (n - 1) * n ** (self.d - 1)


def window_around(sites: Sequence[Sequence[int]], margin: int) -> Window:
    """Smallest cube (plus ``margin``) centred at the rounded midpoint of the bounding box."""
    arr = np.asarray(sites, dtype=np.int64)
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    center = tuple(int(c) for c in (lo + hi) // 2)
    need = int(max((hi - np.asarray(center)).max(), (np.asarray(center) - lo).max()))
    return Window(center, need + margin)


@dataclass(frozen=True)
class LocalBox:
    """Box ``B_i`` of radius 1 around an anchor and the edge set ``S_i`` inside it."""

    anchor: Site
    vertices: tuple[Site, ...] = field(repr=False)
    edges: tuple[Edge, ...] = field(repr=False)

    def contains(self, s: Sequence[int]) -> bool:
        return all(abs(a - c) <= 1 for a, c in zip(s, self.anchor))


def local_box(anchor: Sequence[int]) -> LocalBox:
    anchor = as_site(anchor)
    win = Window(anchor, 1)
    return LocalBox(anchor, tuple(win.sites()), tuple(win.edges()))


def box_anchor(e: Edge) -> Site:
    """Anchor choice for an edge's box: its lexicographically smaller endpoint."""
    return e.u


@dataclass(frozen=True)
class MacroBox:
    center: Site
    m: int
    c7: float
    radius: int

    def window(self) -> Window:
        return Window(self.center, self.radius)

    def sites(self) -> list[Site]:
        return list(self.window().sites())


def macro_box(v: Sequence[int], m: int, c7: float) -> MacroBox:
    """Lattice box of integer radius ``ceil(c7 * log(m)**2)`` around ``v``."""
    if m < 2:
        raise ValueError("macro boxes need m >= 2")
    if c7 <= 0:
        raise ValueError("c7 must be positive")
    r = math.ceil(c7 * math.log(m) ** 2)
    return MacroBox(as_site(v), int(m), float(c7), int(r))
