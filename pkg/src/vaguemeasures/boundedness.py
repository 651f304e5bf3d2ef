"""Ground spaces, their boundedness structures and the metrics that generate them.

Four kinds of space are supported:

``euclidean``  R^k, bounded = relatively compact, ``K_m`` the open ball of radius m.
``weak``       R^k, every set bounded, ``K_m = R^k``.
``punctured``  R^k minus the origin, bounded = bounded away from 0,
               ``K_m = {|x| > 1/m}`` (optionally also ``|x| < m``).
``halfline``   (0, inf), bounded = bounded away from 0, ``K_m = (1/m, inf)``.

The ``hu`` metric of a space generates both its topology and its bounded sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .regions import (
    Annulus,
    Ball,
    Interval,
    Region,
    Union,
    Whole,
    as_points,
    complement_intervals,
    merge_intervals,
)

KINDS = ("euclidean", "weak", "punctured", "halfline_hl")
METRICS = ("base", "hu")


class SpaceMismatchError(ValueError):
    """Two objects live on different ground spaces."""


@dataclass(frozen=True)
class GroundSpace:
    kind: str
    dim: int = 1
    cap: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}; expected one of {KINDS}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.kind == "halfline_hl" and self.dim != 1:
            raise ValueError("the half-line is one-dimensional")
        if self.cap and self.kind != "punctured":
            raise ValueError("the radial cap only applies to punctured spaces")

    @classmethod
    def euclidean(cls, dim: int = 1) -> "GroundSpace":
        return cls("euclidean", dim)

    @classmethod
    def weak(cls, dim: int = 1) -> "GroundSpace":
        return cls("weak", dim)

    @classmethod
    def punctured(cls, dim: int = 1, cap: bool = False) -> "GroundSpace":
        return cls("punctured", dim, cap)

    @classmethod
    def halfline(cls) -> "GroundSpace":
        return cls("halfline_hl", 1)

    @property
    def has_forbidden_set(self) -> bool:
        return self.kind in ("punctured", "halfline_hl")

    def points(self, x) -> np.ndarray:
        """Validate coordinates and return them as an ``(n, dim)`` array."""
        p = as_points(x, self.dim)
        if not np.all(np.isfinite(p)):
            raise ValueError("points must have finite coordinates")
        if self.kind == "halfline_hl" and np.any(p[:, 0] <= 0):
            raise ValueError("half-line points must be strictly positive")
        if self.kind == "punctured" and np.any(np.all(p == 0, axis=1)):
            raise ValueError("the origin is excluded from a punctured space")
        return p

    def forbidden_set_dist(self, x) -> np.ndarray:
        p = as_points(x, self.dim)
        if not self.has_forbidden_set:
            return np.full(len(p), np.inf)
        return _norms(p)

    def __str__(self):
        if self.kind == "halfline_hl":
            return "halfline_hl"
        suffix = ",cap" if self.cap else ""
        return f"{self.kind}({self.dim}{suffix})"


def _norms(p: np.ndarray) -> np.ndarray:
    return np.abs(p[:, 0]) if p.shape[1] == 1 else np.linalg.norm(p, axis=1)


def check_same_space(a: GroundSpace, b: GroundSpace) -> None:
    if a != b:
        raise SpaceMismatchError(f"space mismatch: {a} vs {b}")


# --------------------------------------------------------------------------- metrics


def _cap(t, space):
    # the capped punctured boundedness also bounds |x|, so d' is not truncated
    return t if space.cap else np.minimum(t, 1.0)


def hu_metric(space: GroundSpace, x, y) -> np.ndarray:
    """Elementwise Hu metric between matching rows of ``x`` and ``y``.

    For spaces with a forbidden set this is
    ``(d'(x,y) ^ 1) v |1/d'(x,C) - 1/d'(y,C)|``; euclidean spaces use the plain
    distance and weak spaces the distance truncated at 1.
    """
    px, py = as_points(x, space.dim), as_points(y, space.dim)
    base = _norms(px - py)
    if space.kind == "euclidean":
        return base
    if space.kind == "weak":
        return np.minimum(base, 1.0)
    with np.errstate(divide="ignore"):
        inv = np.abs(1.0 / _norms(px) - 1.0 / _norms(py))
    return np.maximum(_cap(base, space), inv)


def base_metric(space: GroundSpace, x, y) -> np.ndarray:
    px, py = as_points(x, space.dim), as_points(y, space.dim)
    return _norms(px - py)


def pairwise(space: GroundSpace, x, y, metric: str = "hu") -> np.ndarray:
    """Distance matrix ``D[i, j] = d(x_i, y_j)``."""
    px, py = as_points(x, space.dim), as_points(y, space.dim)
    if len(px) == 0 or len(py) == 0:
        return np.zeros((len(px), len(py)))
    diff = px[:, None, :] - py[None, :, :]
    base = np.sqrt(np.sum(diff * diff, axis=-1)) if space.dim > 1 else np.abs(diff[..., 0])
    if metric == "base" or space.kind == "euclidean":
        return base
    if metric != "hu":
        raise ValueError(f"unknown metric {metric!r}")
    if space.kind == "weak":
        return np.minimum(base, 1.0)
    inv = np.abs(1.0 / _norms(px)[:, None] - 1.0 / _norms(py)[None, :])
    return np.maximum(_cap(base, space), inv)


# --------------------------------------------------------------------------- localizing sequence


def localizing_set(space: GroundSpace, m: int) -> Region:
    """The open set ``K_m`` of the space's proper localizing sequence."""
    if m < 1:
        raise ValueError("localizing levels start at 1")
    if space.kind == "euclidean":
        return Ball((0.0,) * space.dim, float(m), open=True)
    if space.kind == "weak":
        return Whole(space.dim)
    if space.kind == "halfline_hl":
        return Interval(1.0 / m, math.inf, lo_open=True)
    if space.cap:
        return Annulus(1.0 / m, float(m), lo_open=True, hi_open=True, dim=space.dim)
    return Annulus(1.0 / m, math.inf, lo_open=True, dim=space.dim)


def in_level(space: GroundSpace, m: int, x) -> np.ndarray:
    """Membership of points in ``K_m``."""
    return localizing_set(space, m).contains(as_points(x, space.dim))


def in_level_closure(space: GroundSpace, m: int, x) -> np.ndarray:
    """Membership in the closure of ``K_m`` taken inside the space."""
    return localizing_set(space, m).closure_contains(as_points(x, space.dim))


def bump(space: GroundSpace, m: int, x) -> np.ndarray:
    """Piecewise-linear ``g_m`` with ``1{cl K_m} <= g_m <= 1{K_{m+1}}``.

    The ramp is linear in ``|x|`` (euclidean) or in ``1/|x|`` (forbidden-set
    kinds); the two plateaus are decided by the same comparisons that define
    ``K_m`` so the sandwich holds exactly in floating point.
    """
    p = as_points(x, space.dim)
    if space.kind == "weak":
        return np.ones(len(p))
    r = _norms(p)
    out = np.ones(len(p))
    if space.kind == "euclidean" or space.cap:
        ramp = np.clip((m + 1) - r, 0.0, 1.0)
        out = np.minimum(out, np.where(r <= m, 1.0, np.where(r >= m + 1, 0.0, ramp)))
    if space.has_forbidden_set:
        lo_m, lo_next = 1.0 / m, 1.0 / (m + 1)
        with np.errstate(divide="ignore"):
            ramp = np.clip((m + 1) - 1.0 / r, 0.0, 1.0)
        out = np.minimum(out, np.where(r >= lo_m, 1.0, np.where(r <= lo_next, 0.0, ramp)))
    return out


def _restrict_to_space_1d(space: GroundSpace, intervals: list[Interval]) -> list[Interval]:
    out = []
    for iv in intervals:
        if iv.is_empty():
            continue
        if space.kind == "halfline_hl":
            if iv.hi <= 0:
                continue
            if iv.lo <= 0:
                iv = Interval(0.0, iv.hi, True, iv.hi_open)
        elif space.kind == "punctured" and iv.lo == 0 and iv.hi == 0:
            continue
        out.append(iv)
    return out


def _region_norm_range(space: GroundSpace, region: Region):
    if space.dim == 1:
        ivs = _restrict_to_space_1d(space, region.intervals())
        return Union(tuple(ivs)).norm_range()
    return region.norm_range()


def is_bounded(space: GroundSpace, region: Region) -> tuple[bool, int | None]:
    """Whether ``region`` lies in some ``K_m``; the smallest such m is the witness."""
    if space.kind == "weak" or region.is_empty():
        return True, 1
    inf, inf_att, sup, sup_att = _region_norm_range(space, region)
    if math.isinf(inf):  # empty after intersecting with the space
        return True, 1
    needs_sup = space.kind == "euclidean" or space.cap
    needs_inf = space.has_forbidden_set
    if needs_sup and math.isinf(sup):
        return False, None
    if needs_inf and inf <= 0:
        return False, None

    def fits(m):
        ok = True
        if needs_sup:
            ok &= sup < m or (sup == m and not sup_att)
        if needs_inf:
            lo = 1.0 / m
            ok &= inf > lo or (inf == lo and not inf_att)
        return ok

    start = 1
    if needs_sup:
        start = max(start, int(math.floor(sup)) - 1)
    if needs_inf:
        start = max(start, int(math.floor(1.0 / inf)) - 1)
    m = max(1, start)
    while not fits(m):
        m += 1
    return True, m


def level_for_norms(space: GroundSpace, inf: float, sup: float) -> int:
    """Smallest m with ``{inf <= |y| <= sup}``-type sets strictly inside ``K_m``.

    Used for certified support levels; a relative safety margin keeps the
    answer valid under rounding.
    """
    m = 1
    if space.kind == "weak":
        return 1
    if space.kind == "euclidean" or space.cap:
        if math.isinf(sup):
            raise ValueError("set is not bounded")
        m = max(m, math.floor(sup * (1 + 1e-12)) + 1)
    if space.has_forbidden_set:
        if inf <= 0:
            raise ValueError("set is not bounded away from the forbidden set")
        m = max(m, math.floor((1.0 / inf) * (1 + 1e-12)) + 1)
    return m


# --------------------------------------------------------------------------- region distances


def _hu_radial(space, r, s, same_side=True):
    """Hu distance between a point of norm r and a point of norm s.

    ``same_side`` means the Euclidean gap is |r - s| (aligned points); otherwise
    it is r + s (antipodal on the line).
    """
    gap = np.abs(r - s) if same_side else r + s
    with np.errstate(divide="ignore"):
        return np.maximum(_cap(gap, space), np.abs(1.0 / r - 1.0 / s))


def _antipodal_argmin(space, r):
    """Minimiser over s > 0 of max(cap(r + s), |1/r - 1/s|).

    The first term increases in s; the second decreases on (0, r), so the
    minimum sits where they cross.
    """
    b = r + 1.0 / r
    # root of s^2 + b s - 1 in the stable form 2 / (b + sqrt(b^2 + 4)), with b >= 2
    s_quad = 2.0 / (b * (1.0 + np.sqrt(1.0 + (2.0 / b) ** 2)))
    if space.cap:
        return s_quad
    return np.where(r + s_quad <= 1.0, s_quad, r / (r + 1.0))


def _hu_to_interval_1d(space, x, lo, hi):
    """Exact Hu distance from 1-d points to the closed interval [lo, hi] within X."""
    r = np.abs(x)
    best = np.full(len(x), np.inf)
    inside = (x >= lo) & (x <= hi)
    parts = []
    if hi > 0:
        parts.append((1.0, max(lo, 0.0), hi))
    if lo < 0:
        parts.append((-1.0, max(-hi, 0.0), -lo))
    for sign, s_lo, s_hi in parts:
        if s_hi <= 0:
            continue
        same = np.sign(x) == sign
        s_same = np.clip(r, s_lo, s_hi)
        s_anti = np.clip(_antipodal_argmin(space, r), s_lo, s_hi)
        s = np.where(same, s_same, s_anti)
        # s can only hit 0 when s_lo == 0 and the clip is degenerate
        s = np.where(s <= 0, s_hi, s)
        val = np.where(same, _hu_radial(space, r, s, True), _hu_radial(space, r, s, False))
        best = np.minimum(best, val)
    return np.where(inside, 0.0, best)


def _base_to_interval_1d(x, lo, hi):
    return np.maximum(0.0, np.maximum(lo - x, x - hi))


def _dist_to_intervals(space, p, intervals, metric):
    x = p[:, 0]
    best = np.full(len(x), np.inf)
    for iv in _restrict_to_space_1d(space, list(intervals)):
        if metric == "hu" and space.has_forbidden_set:
            d = _hu_to_interval_1d(space, x, iv.lo, iv.hi)
        else:
            d = _base_to_interval_1d(x, iv.lo, iv.hi)
        best = np.minimum(best, d)
    if metric == "hu" and space.kind == "weak":
        best = np.minimum(best, 1.0)
    return best


def _dist_to_radial(space, p, ranges, metric):
    r = _norms(p)
    best = np.full(len(r), np.inf)
    for a, b in ranges:
        if b < a or (space.has_forbidden_set and b <= 0):
            continue
        s = np.clip(r, a, b)
        if metric == "hu" and space.has_forbidden_set:
            d = _hu_radial(space, r, s, True)
        else:
            d = np.abs(r - s)
        best = np.minimum(best, d)
    if metric == "hu" and space.kind == "weak":
        best = np.minimum(best, 1.0)
    return best


def region_distance(space: GroundSpace, x, region: Region, metric_choice: str = "hu") -> np.ndarray:
    """``inf_{y in B} d(x, y)`` in closed form; zero exactly on the closure of B."""
    if metric_choice not in METRICS:
        raise ValueError(f"unknown metric {metric_choice!r}")
    if region.is_empty():
        raise ValueError("distance to an empty region is undefined")
    p = as_points(x, space.dim)
    if space.dim == 1:
        ivs = region.intervals()
        if not _restrict_to_space_1d(space, ivs):
            raise ValueError("region does not meet the space")
        return _dist_to_intervals(space, p, ivs, metric_choice)
    if metric_choice == "base" or not space.has_forbidden_set:
        d = region.base_distance(p)
        return np.minimum(d, 1.0) if (metric_choice == "hu" and space.kind == "weak") else d
    ranges = region.radial_ranges()
    if ranges is None:
        raise NotImplementedError(
            f"Hu distance to {type(region).__name__} in {space} has no closed form; "
            "use annuli or origin-centred balls"
        )
    return _dist_to_radial(space, p, ranges, metric_choice)


def interior_depth(space: GroundSpace, x, region: Region, metric_choice: str = "hu") -> np.ndarray:
    """``d(x, (B°)^c)`` with the complement taken inside the space."""
    p = as_points(x, space.dim)
    inside = region.interior_contains(p)
    if space.dim == 1:
        comp = complement_intervals(region.intervals())
        if not _restrict_to_space_1d(space, comp):
            depth = np.full(len(p), np.inf)
        else:
            depth = _dist_to_intervals(space, p, comp, metric_choice)
        return np.where(inside, depth, 0.0)
    ranges = region.complement_radial_ranges()
    if ranges is not None and space.has_forbidden_set:
        ranges = [(a, b) for a, b in ranges if b > 0]
        depth = _dist_to_radial(space, p, ranges, metric_choice) if ranges else np.full(len(p), np.inf)
        return np.where(inside, depth, 0.0)
    if metric_choice == "hu" and space.has_forbidden_set:
        raise NotImplementedError(
            f"Hu depth inside {type(region).__name__} in {space} has no closed form"
        )
    depth = region.base_depth(p)
    if metric_choice == "hu" and space.kind == "weak":
        depth = np.minimum(depth, 1.0)
    return np.where(inside, depth, 0.0)


__all__ = [
    "GroundSpace",
    "SpaceMismatchError",
    "bump",
    "base_metric",
    "check_same_space",
    "hu_metric",
    "in_level",
    "in_level_closure",
    "interior_depth",
    "is_bounded",
    "level_for_norms",
    "localizing_set",
    "merge_intervals",
    "pairwise",
    "region_distance",
]
