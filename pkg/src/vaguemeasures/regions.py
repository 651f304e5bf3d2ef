"""Closed catalogue of regions in R^k.

Every region answers membership, closure/interior/boundary membership and
Euclidean distance exactly. Regions know nothing about the ground space; the
subspace topology of punctured spaces is handled in :mod:`boundedness`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


def as_points(x, dim: int | None = None) -> np.ndarray:
    """Coerce scalars, vectors or stacks of vectors to a float array ``(n, k)``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        # a bare vector is a stack of scalars on the line, otherwise one point
        arr = arr.reshape(-1, 1) if dim == 1 else arr.reshape(1, -1)
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got {arr.shape[1]}")
    return arr


def _norms(points: np.ndarray) -> np.ndarray:
    if points.shape[1] == 1:
        return np.abs(points[:, 0])
    return np.linalg.norm(points, axis=1)


class Region:
    """Base class. Subclasses are frozen dataclasses."""

    def contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def closure_contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def interior_contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def boundary_contains(self, points) -> np.ndarray:
        return self.closure_contains(points) & ~self.interior_contains(points)

    def closure(self) -> "Region":
        raise NotImplementedError

    def is_empty(self) -> bool:
        return False

    def base_distance(self, points) -> np.ndarray:
        """Euclidean distance from each point to the region."""
        raise NotImplementedError

    def base_depth(self, points) -> np.ndarray:
        """Euclidean distance to the complement of the interior (0 outside)."""
        raise NotImplementedError

    def norm_range(self) -> tuple[float, bool, float, bool]:
        """``(inf |y|, attained, sup |y|, attained)`` over the region."""
        raise NotImplementedError

    def intervals(self) -> list["Interval"]:
        """Decomposition into intervals; only valid in dimension one."""
        raise NotImplementedError(f"{type(self).__name__} has no interval form")

    def radial_ranges(self) -> list[tuple[float, float]] | None:
        """Closed ranges of |y| if the closure is rotation invariant, else None."""
        return None

    def complement_radial_ranges(self) -> list[tuple[float, float]] | None:
        """Closed |y| ranges covering the complement of the interior, or None."""
        return None


@dataclass(frozen=True)
class Interval(Region):
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")

    def _x(self, points):
        return as_points(points, 1)[:, 0]

    def contains(self, points):
        x = self._x(points)
        left = x > self.lo if self.lo_open else x >= self.lo
        right = x < self.hi if self.hi_open else x <= self.hi
        return left & right

    def closure_contains(self, points):
        if self.is_empty():
            return np.zeros(len(self._x(points)), dtype=bool)
        x = self._x(points)
        return (x >= self.lo) & (x <= self.hi)

    def interior_contains(self, points):
        x = self._x(points)
        return (x > self.lo) & (x < self.hi)

    def closure(self):
        if self.is_empty():
            return self
        return Interval(self.lo, self.hi, False, False)

    def is_empty(self):
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    def base_distance(self, points):
        x = self._x(points)
        if self.is_empty():
            return np.full(len(x), np.inf)
        return np.maximum(0.0, np.maximum(self.lo - x, x - self.hi))

    def base_depth(self, points):
        x = self._x(points)
        inside = self.interior_contains(points)
        return np.where(inside, np.minimum(x - self.lo, self.hi - x), 0.0)

    def norm_range(self):
        lo_att, hi_att = not self.lo_open, not self.hi_open
        if self.lo > 0:
            inf, inf_att = self.lo, lo_att
        elif self.hi < 0:
            inf, inf_att = -self.hi, hi_att
        elif self.lo == 0:
            inf, inf_att = 0.0, lo_att
        elif self.hi == 0:
            inf, inf_att = 0.0, hi_att
        else:
            inf, inf_att = 0.0, True
        a, b = abs(self.lo), abs(self.hi)
        if a > b:
            sup, sup_att = a, lo_att
        elif b > a:
            sup, sup_att = b, hi_att
        else:
            sup, sup_att = a, lo_att or hi_att
        if math.isinf(sup):
            sup_att = False
        return inf, inf_att, sup, sup_att

    def intervals(self):
        return [] if self.is_empty() else [self]


@dataclass(frozen=True)
class Ball(Region):
    center: tuple[float, ...]
    radius: float
    open: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")

    @property
    def dim(self):
        return len(self.center)

    def _d(self, points):
        p = as_points(points, self.dim)
        return _norms(p - np.asarray(self.center))

    def contains(self, points):
        d = self._d(points)
        return d < self.radius if self.open else d <= self.radius

    def closure_contains(self, points):
        if self.is_empty():
            return np.zeros(len(self._d(points)), dtype=bool)
        return self._d(points) <= self.radius

    def interior_contains(self, points):
        return self._d(points) < self.radius

    def closure(self):
        return self if self.is_empty() else Ball(self.center, self.radius, open=False)

    def is_empty(self):
        return self.open and self.radius == 0

    def base_distance(self, points):
        d = self._d(points)
        if self.is_empty():
            return np.full(len(d), np.inf)
        return np.maximum(0.0, d - self.radius)

    def base_depth(self, points):
        d = self._d(points)
        return np.maximum(0.0, self.radius - d)

    def norm_range(self):
        c = float(np.linalg.norm(self.center))
        att = not self.open
        if c > self.radius:
            inf, inf_att = c - self.radius, att
        elif c == self.radius:
            inf, inf_att = 0.0, att
        else:
            inf, inf_att = 0.0, True
        return inf, inf_att, c + self.radius, att

    def intervals(self):
        if self.dim != 1:
            return super().intervals()
        c = self.center[0]
        return Interval(c - self.radius, c + self.radius, self.open, self.open).intervals()

    def radial_ranges(self):
        if any(self.center) or self.is_empty():
            return None
        return [(0.0, self.radius)]

    def complement_radial_ranges(self):
        if any(self.center):
            return None
        return [(self.radius, math.inf)]


@dataclass(frozen=True)
class Box(Region):
    """Closed box ``[lo_1, hi_1] x ... x [lo_k, hi_k]``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        if len(lo) != len(hi):
            raise ValueError("box corners must have equal length")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    def _p(self, points):
        return as_points(points, self.dim)

    def contains(self, points):
        p = self._p(points)
        return np.all((p >= self.lo) & (p <= self.hi), axis=1)

    closure_contains = contains

    def interior_contains(self, points):
        p = self._p(points)
        return np.all((p > self.lo) & (p < self.hi), axis=1)

    def closure(self):
        return self

    def is_empty(self):
        return any(a > b for a, b in zip(self.lo, self.hi))

    def base_distance(self, points):
        p = self._p(points)
        if self.is_empty():
            return np.full(len(p), np.inf)
        gap = np.maximum(0.0, np.maximum(np.asarray(self.lo) - p, p - np.asarray(self.hi)))
        return _norms(gap)

    def base_depth(self, points):
        p = self._p(points)
        depth = np.minimum(p - np.asarray(self.lo), np.asarray(self.hi) - p).min(axis=1)
        return np.where(self.interior_contains(p), depth, 0.0)

    def norm_range(self):
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        nearest = np.clip(0.0, lo, hi)
        far = np.maximum(np.abs(lo), np.abs(hi))
        sup = float(np.linalg.norm(far))
        return float(np.linalg.norm(nearest)), True, sup, not math.isinf(sup)

    def intervals(self):
        if self.dim != 1:
            return super().intervals()
        return Interval(self.lo[0], self.hi[0]).intervals()


@dataclass(frozen=True)
class Annulus(Region):
    """``{y : lo < |y| <= hi}`` about the origin; the open/closed ends are flags."""

    lo: float
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = False
    dim: int = 1

    def _r(self, points):
        return _norms(as_points(points, self.dim))

    def contains(self, points):
        r = self._r(points)
        left = r > self.lo if self.lo_open else r >= self.lo
        right = r < self.hi if self.hi_open else r <= self.hi
        return left & right

    def closure_contains(self, points):
        r = self._r(points)
        if self.is_empty():
            return np.zeros(len(r), dtype=bool)
        return (r >= self.lo) & (r <= self.hi)

    def interior_contains(self, points):
        r = self._r(points)
        return (r > self.lo) & (r < self.hi)

    def closure(self):
        if self.is_empty():
            return self
        return Annulus(self.lo, self.hi, False, False, self.dim)

    def is_empty(self):
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    def base_distance(self, points):
        r = self._r(points)
        if self.is_empty():
            return np.full(len(r), np.inf)
        return np.maximum(0.0, np.maximum(self.lo - r, r - self.hi))

    def base_depth(self, points):
        r = self._r(points)
        return np.where(self.interior_contains(points), np.minimum(r - self.lo, self.hi - r), 0.0)

    def norm_range(self):
        hi_att = not self.hi_open and not math.isinf(self.hi)
        return self.lo, not self.lo_open, self.hi, hi_att

    def intervals(self):
        if self.dim != 1:
            return super().intervals()
        if self.is_empty():
            return []
        return [
            Interval(-self.hi, -self.lo, self.hi_open, self.lo_open),
            Interval(self.lo, self.hi, self.lo_open, self.hi_open),
        ]

    def radial_ranges(self):
        return [] if self.is_empty() else [(self.lo, self.hi)]

    def complement_radial_ranges(self):
        return [(0.0, self.lo), (self.hi, math.inf)]


@dataclass(frozen=True)
class Whole(Region):
    dim: int = 1

    def contains(self, points):
        return np.ones(len(as_points(points, self.dim)), dtype=bool)

    closure_contains = contains
    interior_contains = contains

    def closure(self):
        return self

    def base_distance(self, points):
        return np.zeros(len(as_points(points, self.dim)))

    def base_depth(self, points):
        return np.full(len(as_points(points, self.dim)), np.inf)

    def norm_range(self):
        return 0.0, True, math.inf, False

    def intervals(self):
        if self.dim != 1:
            return super().intervals()
        return [Interval(-math.inf, math.inf)]

    def radial_ranges(self):
        return [(0.0, math.inf)]

    def complement_radial_ranges(self):
        return []


@dataclass(frozen=True)
class Union(Region):
    """Finite union.

    In dimension one the interior and boundary are exact (touching parts are
    merged). In higher dimension the interior is taken as the union of the
    parts' interiors, which is exact when the parts' closures are disjoint.
    """

    parts: tuple[Region, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def _dim1(self):
        dims = {_region_dim(p) for p in self.parts} - {None}
        return dims == {1} or not dims

    def contains(self, points):
        p = np.asarray(points, dtype=float)
        out = None
        for part in self.parts:
            m = part.contains(p)
            out = m if out is None else out | m
        return out if out is not None else np.zeros(len(np.atleast_1d(p)), dtype=bool)

    def closure_contains(self, points):
        out = None
        for part in self.parts:
            m = part.closure_contains(points)
            out = m if out is None else out | m
        return out if out is not None else np.zeros(len(np.atleast_1d(points)), dtype=bool)

    def interior_contains(self, points):
        if self._dim1():
            merged = merge_intervals(self.intervals())
            out = np.zeros(len(as_points(points, 1)), dtype=bool)
            for iv in merged:
                out |= iv.interior_contains(points)
            return out
        out = None
        for part in self.parts:
            m = part.interior_contains(points)
            out = m if out is None else out | m
        return out

    def closure(self):
        return Union(tuple(p.closure() for p in self.parts))

    def is_empty(self):
        return all(p.is_empty() for p in self.parts)

    def base_distance(self, points):
        dists = [p.base_distance(points) for p in self.parts if not p.is_empty()]
        if not dists:
            return np.full(len(np.atleast_1d(points)), np.inf)
        return np.min(dists, axis=0)

    def base_depth(self, points):
        if self._dim1():
            return np.max([iv.base_depth(points) for iv in merge_intervals(self.intervals())]
                          or [np.zeros(len(as_points(points, 1)))], axis=0)
        raise NotImplementedError("depth inside unions is only available in dimension one")

    def norm_range(self):
        parts = [p.norm_range() for p in self.parts if not p.is_empty()]
        if not parts:
            return math.inf, False, 0.0, False
        inf = min(p[0] for p in parts)
        sup = max(p[2] for p in parts)
        inf_att = any(p[1] for p in parts if p[0] == inf)
        sup_att = any(p[3] for p in parts if p[2] == sup)
        return inf, inf_att, sup, sup_att

    def intervals(self):
        out = []
        for p in self.parts:
            out.extend(p.intervals())
        return out

    def radial_ranges(self):
        ranges = []
        for p in self.parts:
            r = p.radial_ranges()
            if r is None:
                return None
            ranges.extend(r)
        return ranges


def _region_dim(region: Region) -> int | None:
    if isinstance(region, (Ball, Box)):
        return region.dim
    if isinstance(region, (Annulus, Whole)):
        return region.dim
    if isinstance(region, Interval):
        return 1
    return None


def merge_intervals(intervals: Sequence[Interval]) -> list[Interval]:
    """Canonical disjoint, sorted form of a union of intervals.

    Two intervals merge when they overlap or share an endpoint that one of
    them contains; ``[0,1) U (1,2]`` stays split since 1 is in neither.
    """
    ivs = sorted((iv for iv in intervals if not iv.is_empty()),
                 key=lambda iv: (iv.lo, iv.lo_open))
    merged: list[Interval] = []
    for iv in ivs:
        if merged:
            last = merged[-1]
            touching = iv.lo < last.hi or (iv.lo == last.hi and not (iv.lo_open and last.hi_open))
            if touching:
                if iv.hi > last.hi or (iv.hi == last.hi and not iv.hi_open):
                    merged[-1] = Interval(last.lo, iv.hi, last.lo_open, iv.hi_open)
                continue
        merged.append(iv)
    return merged


def complement_intervals(intervals: Sequence[Interval]) -> list[Interval]:
    """Closed intervals whose union is the closure of the complement of the interior."""
    merged = merge_intervals(intervals)
    out = []
    left = -math.inf
    for iv in merged:
        if iv.lo > left or (iv.lo == left and left > -math.inf):
            out.append(Interval(left, iv.lo))
        left = iv.hi
    if left < math.inf:
        out.append(Interval(left, math.inf))
    return out
