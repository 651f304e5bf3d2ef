"""Atomic measures: finite ones and locally finite ones materialised level by level."""
from __future__ import annotations

import threading
from typing import Callable

import numpy as np

from .boundedness import GroundSpace, bump, check_same_space, in_level, localizing_set
from .regions import Region, as_points


class DiscreteMeasure:
    """Finite measure ``sum_i w_i delta_{x_i}`` on a ground space.

    Atoms at identical coordinates are merged and zero weights dropped at
    construction; atoms are kept in lexicographic coordinate order, so two
    measures are equal exactly when their atom arrays are.
    """

    __slots__ = ("space", "points", "weights")

    def __init__(self, space: GroundSpace, points=None, weights=None):
        if points is None or len(np.atleast_1d(points)) == 0:
            pts = np.zeros((0, space.dim))
            w = np.zeros(0)
        else:
            pts = space.points(points)
            w = np.ones(len(pts)) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
            if len(w) != len(pts):
                raise ValueError("one weight per atom is required")
            if np.any(~np.isfinite(w)) or np.any(w < 0):
                raise ValueError("weights must be finite and nonnegative")
            keep = w > 0
            pts, w = pts[keep], w[keep]
            if len(pts):
                pts, inverse = np.unique(pts, axis=0, return_inverse=True)
                w = np.bincount(inverse.reshape(-1), weights=w, minlength=len(pts))
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteMeasure is immutable")

    @classmethod
    def zero(cls, space: GroundSpace) -> "DiscreteMeasure":
        return cls(space)

    @classmethod
    def dirac(cls, space: GroundSpace, x, weight: float = 1.0) -> "DiscreteMeasure":
        return cls(space, as_points(x, space.dim)[:1], [weight])

    def __len__(self):
        return len(self.weights)

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            self.space == other.space
            and self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.space, self.points.tobytes(), self.weights.tobytes()))

    def __repr__(self):
        atoms = ", ".join(
            f"{w:g}*d{tuple(float(c) for c in p) if len(p) > 1 else float(p[0])}"
            for p, w in zip(self.points[:6], self.weights[:6])
        )
        more = ", ..." if len(self) > 6 else ""
        return f"DiscreteMeasure({self.space}, [{atoms}{more}])"

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def is_point_measure(self) -> bool:
        """True when every (merged) weight is a positive integer."""
        return bool(np.all(self.weights == np.round(self.weights)))

    def expanded_points(self) -> np.ndarray:
        """Atoms repeated by multiplicity; only meaningful for point measures."""
        if not self.is_point_measure():
            raise ValueError("not a point measure")
        return np.repeat(self.points, self.weights.astype(int), axis=0)

    def _select(self, mask) -> "DiscreteMeasure":
        return DiscreteMeasure(self.space, self.points[mask], self.weights[mask])

    def restrict(self, region: Region) -> "DiscreteMeasure":
        if len(self) == 0:
            return self
        return self._select(region.contains(self.points))

    def mass(self, region: Region) -> float:
        if len(self) == 0:
            return 0.0
        return float(self.weights[region.contains(self.points)].sum())

    def boundary_mass(self, region: Region) -> float:
        if len(self) == 0:
            return 0.0
        return float(self.weights[region.boundary_contains(self.points)].sum())

    def integrate(self, f) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.dot(self.weights, np.asarray(f(self.points), dtype=float)))

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        check_same_space(self.space, other.space)
        return DiscreteMeasure(
            self.space,
            np.vstack([self.points, other.points]),
            np.concatenate([self.weights, other.weights]),
        )

    def scale(self, c: float) -> "DiscreteMeasure":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return DiscreteMeasure(self.space, self.points, self.weights * c)

    def normalized(self) -> "DiscreteMeasure":
        total = self.total_mass
        if total == 0:
            raise ValueError("cannot normalise the zero measure")
        return DiscreteMeasure(self.space, self.points, self.weights / total)


def restrict(mu: DiscreteMeasure, region: Region) -> DiscreteMeasure:
    return mu.restrict(region)


def integrate(mu, f) -> float:
    """``mu(f) = sum_i w_i f(x_i)``; for locally finite measures f must carry ``support_level``."""
    if isinstance(mu, LocallyFiniteMeasure):
        return mu.integrate(f)
    return mu.integrate(f)


def mass(mu: DiscreteMeasure, region: Region) -> float:
    return mu.mass(region)


def boundary_mass(mu: DiscreteMeasure, region: Region) -> float:
    return mu.boundary_mass(region)


def add(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    return mu + nu


def scale(mu: DiscreteMeasure, c: float) -> DiscreteMeasure:
    return mu.scale(c)


class LocallyFiniteMeasure:
    """Measure finite on every ``K_m``, given by its restrictions to the levels.

    ``generator(m)`` must be pure and return a measure supported in ``K_m``
    whose restriction to ``K_l`` equals ``generator(l)`` for ``l <= m``. Levels
    are cached; concurrent fills are safe because the generator is pure.
    """

    def __init__(self, space: GroundSpace, generator: Callable[[int], DiscreteMeasure],
                 label: str = "", validate: bool = True):
        self.space = space
        self.label = label
        self._generator = generator
        self._validate = validate
        self._cache: dict[int, DiscreteMeasure] = {}
        self._lock = threading.Lock()

    @classmethod
    def from_discrete(cls, mu: DiscreteMeasure, label: str = "") -> "LocallyFiniteMeasure":
        space = mu.space
        return cls(space, lambda m: mu.restrict(localizing_set(space, m)), label, validate=False)

    @classmethod
    def zero(cls, space: GroundSpace) -> "LocallyFiniteMeasure":
        return cls.from_discrete(DiscreteMeasure.zero(space), "null")

    @property
    def max_level(self) -> int:
        with self._lock:
            return max(self._cache, default=0)

    def level(self, m: int) -> DiscreteMeasure:
        if m < 1:
            raise ValueError("levels start at 1")
        with self._lock:
            cached = self._cache.get(m)
        if cached is not None:
            return cached
        mu = self._generator(m)
        if not isinstance(mu, DiscreteMeasure):
            raise TypeError("level generator must return a DiscreteMeasure")
        check_same_space(mu.space, self.space)
        if self._validate and len(mu) and not np.all(in_level(self.space, m, mu.points)):
            raise ValueError(f"level {m} representative has atoms outside K_{m}")
        with self._lock:
            return self._cache.setdefault(m, mu)

    def integrate(self, f) -> float:
        level = getattr(f, "support_level", None)
        if level is None:
            raise ValueError("integrating a locally finite measure needs a support level")
        return self.level(level).integrate(f)

    def is_point_measure(self, upto: int = 1) -> bool:
        return all(self.level(m).is_point_measure() for m in range(1, upto + 1))

    def __repr__(self):
        return f"LocallyFiniteMeasure({self.space}, {self.label or 'anonymous'})"


def as_locally_finite(mu) -> LocallyFiniteMeasure:
    if isinstance(mu, LocallyFiniteMeasure):
        return mu
    return LocallyFiniteMeasure.from_discrete(mu)


def truncate(mu, m: int) -> DiscreteMeasure:
    """``T_m(mu)``: the level ``m+1`` atoms reweighted by the bump ``g_m``."""
    lf = as_locally_finite(mu)
    top = lf.level(m + 1)
    if len(top) == 0:
        return top
    return DiscreteMeasure(lf.space, top.points, top.weights * bump(lf.space, m, top.points))
