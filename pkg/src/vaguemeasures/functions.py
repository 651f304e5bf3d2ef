"""Nonnegative test functions with certified metadata.

Every function knows its sup bound, a Lipschitz constant with respect to a
declared metric (``hu`` unless stated), and its support level: a level m with
``f = 0`` outside ``K_m``, so that integrating a locally finite measure needs
only that level. Families are finite lists of formal cone and product
combinations, and serialise as JSON expression trees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .boundedness import (
    GroundSpace,
    bump,
    interior_depth,
    is_bounded,
    level_for_norms,
    localizing_set,
    region_distance,
    _region_norm_range,
)
from .regions import Annulus, Ball, Interval, Region, as_points


class UnboundedThickeningError(ValueError):
    """The 1/m-thickening of a region is not a bounded set; increase m."""


class TestFunction:
    __test__ = False  # keep pytest from collecting this class

    space: GroundSpace
    lipschitz: float
    support_level: int
    sup_bound: float
    metric: str = "hu"

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(as_points(points, self.space.dim))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    # formal combinations
    def __mul__(self, other: "TestFunction") -> "Product":
        return Product(self, other)

    def __add__(self, other: "TestFunction") -> "Cone":
        return Cone(1.0, self, 1.0, other)


def _closure_norms(space, region):
    inf, _, sup, _ = _region_norm_range(space, region.closure())
    return inf, sup


@dataclass(frozen=True, eq=False)
class UpperApprox(TestFunction):
    """``1 - (m d(x, cl B) ^ 1)``: equals 1 on cl B, vanishes off the 1/m-thickening."""

    space: GroundSpace
    region: Region
    m: int
    metric: str = "hu"
    support_level: int = field(init=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if not is_bounded(self.space, self.region)[0]:
            raise ValueError(f"region {self.region} is not bounded in {self.space}")
        object.__setattr__(self, "support_level", self._support_level())

    lipschitz = property(lambda self: float(self.m))
    sup_bound = property(lambda self: 1.0)

    def _support_level(self):
        space, reach = self.space, 1.0 / self.m
        if space.kind == "weak":
            return 1
        rho, sup = _closure_norms(space, self.region)
        sup_t = sup + reach
        if not space.has_forbidden_set:
            return level_for_norms(space, 0.0, sup_t)
        if self.metric == "hu":
            inf_t = 1.0 / (1.0 / rho + reach)
        else:
            inf_t = rho - reach
            if inf_t <= 0:
                raise UnboundedThickeningError(
                    f"the {reach:g}-thickening of {self.region} reaches the forbidden set; "
                    "use a larger m"
                )
        return level_for_norms(space, inf_t, sup_t)

    def evaluate(self, points):
        d = region_distance(self.space, points, self.region, self.metric)
        return 1.0 - np.minimum(self.m * d, 1.0)

    def to_json(self):
        from .serialization import region_to_json

        out = {"op": "upper", "region": region_to_json(self.region), "m": self.m}
        if self.metric != "hu":
            out["metric"] = self.metric
        return out


@dataclass(frozen=True, eq=False)
class LowerApprox(TestFunction):
    """``m d(x, (B°)^c) ^ 1``: vanishes off the interior, 1 at depth >= 1/m."""

    space: GroundSpace
    region: Region
    m: int
    metric: str = "hu"
    support_level: int = field(init=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        ok, level = is_bounded(self.space, self.region)
        if not ok:
            raise ValueError(f"region {self.region} is not bounded in {self.space}")
        object.__setattr__(self, "support_level", level)

    lipschitz = property(lambda self: float(self.m))
    sup_bound = property(lambda self: 1.0)

    def evaluate(self, points):
        depth = interior_depth(self.space, points, self.region, self.metric)
        return np.minimum(self.m * depth, 1.0)

    def to_json(self):
        from .serialization import region_to_json

        out = {"op": "lower", "region": region_to_json(self.region), "m": self.m}
        if self.metric != "hu":
            out["metric"] = self.metric
        return out


@dataclass(frozen=True, eq=False)
class Bump(TestFunction):
    """The bump ``g_m`` of the localizing sequence; at least 1 on ``K_m``."""

    space: GroundSpace
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be a positive integer")

    lipschitz = property(lambda self: 0.0 if self.space.kind == "weak" else 1.0)
    sup_bound = property(lambda self: 1.0)
    support_level = property(lambda self: 1 if self.space.kind == "weak" else self.m + 1)
    domination = 1.0  # h_m >= domination * 1{K_m}

    def evaluate(self, points):
        return bump(self.space, self.m, points)

    def to_json(self):
        return {"op": "bump", "m": self.m}


@dataclass(frozen=True, eq=False)
class Zero(TestFunction):
    space: GroundSpace
    lipschitz = 0.0
    sup_bound = 0.0
    support_level = 1

    def evaluate(self, points):
        return np.zeros(len(points))

    def to_json(self):
        return {"op": "zero"}


@dataclass(frozen=True, eq=False)
class Cone(TestFunction):
    alpha: float
    f: TestFunction
    beta: float
    g: TestFunction

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("cone coefficients must be nonnegative")
        if self.f.space != self.g.space:
            raise ValueError("cone members live on different spaces")
        if self.f.metric != self.g.metric:
            raise ValueError("cone members certified in different metrics")

    space = property(lambda self: self.f.space)
    metric = property(lambda self: self.f.metric)
    lipschitz = property(lambda self: self.alpha * self.f.lipschitz + self.beta * self.g.lipschitz)
    sup_bound = property(lambda self: self.alpha * self.f.sup_bound + self.beta * self.g.sup_bound)
    support_level = property(lambda self: max(self.f.support_level, self.g.support_level))

    def evaluate(self, points):
        return self.alpha * self.f.evaluate(points) + self.beta * self.g.evaluate(points)

    def to_json(self):
        return {"op": "cone", "alpha": self.alpha, "f": self.f.to_json(),
                "beta": self.beta, "g": self.g.to_json()}


@dataclass(frozen=True, eq=False)
class Product(TestFunction):
    f: TestFunction
    g: TestFunction

    def __post_init__(self):
        if self.f.space != self.g.space:
            raise ValueError("product members live on different spaces")
        if self.f.metric != self.g.metric:
            raise ValueError("product members certified in different metrics")

    space = property(lambda self: self.f.space)
    metric = property(lambda self: self.f.metric)
    lipschitz = property(
        lambda self: self.f.sup_bound * self.g.lipschitz + self.g.sup_bound * self.f.lipschitz
    )
    sup_bound = property(lambda self: self.f.sup_bound * self.g.sup_bound)
    support_level = property(lambda self: min(self.f.support_level, self.g.support_level))

    def evaluate(self, points):
        return self.f.evaluate(points) * self.g.evaluate(points)

    def to_json(self):
        return {"op": "prod", "f": self.f.to_json(), "g": self.g.to_json()}


def upper_approx(space: GroundSpace, region: Region, m: int, metric: str = "hu") -> UpperApprox:
    return UpperApprox(space, region, m, metric)


def lower_approx(space: GroundSpace, region: Region, m: int, metric: str = "hu") -> LowerApprox:
    return LowerApprox(space, region, m, metric)


@dataclass(frozen=True)
class FunctionFamily:
    members: tuple[TestFunction, ...]
    cone: bool = False
    multiplicative: bool = False

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @property
    def closure_flags(self) -> dict:
        return {"cone": self.cone, "multiplicative": self.multiplicative}

    @property
    def max_support_level(self) -> int:
        return max(f.support_level for f in self.members)

    def to_json(self) -> dict:
        return {"members": [f.to_json() for f in self.members], **self.closure_flags}


def seeded_region(space: GroundSpace, level: int, gen: np.random.Generator) -> Region:
    """A closed region with nonempty interior sitting inside ``K_level``."""
    u1, u2, u3 = gen.random(3)
    if space.has_forbidden_set:
        a = (1.0 / level) * (1.25 + 1.5 * u1)
        b = a * (1.4 + 1.6 * u2)
        if space.cap:
            b = min(b, 0.5 * (a + level))
        if space.dim == 1 and space.kind == "punctured" and u3 < 0.5:
            return Interval(-b, -a)
        if space.dim == 1:
            return Interval(a, b)
        return Annulus(a, b, lo_open=False, dim=space.dim)
    if space.kind == "weak":
        centre = 4.0 * (gen.random(space.dim) - 0.5)
        radius = 0.25 + u2
    else:
        centre = (gen.random(space.dim) - 0.5) * level
        slack = level - float(np.linalg.norm(centre))
        radius = slack * (0.2 + 0.5 * u2)
    if space.dim == 1:
        return Interval(float(centre[0]) - radius, float(centre[0]) + radius)
    return Ball(tuple(centre.tolist()), radius, open=False)


def _battery_level(space, m):
    # capped punctured spaces have an empty K_1
    return m + 1 if space.cap else m


def lipschitz_battery(space: GroundSpace, count: int, seed: int = 0) -> FunctionFamily:
    """Deterministic finite battery of Lipschitz test functions.

    Level m contributes the pair ``f-`` and ``f+`` (with m as steepness) for a
    seeded region inside ``K_m``; at even levels the upper member is the cone
    combination ``f+_m + f-_{m-1}``.
    """
    if count < 1:
        raise ValueError("count must be positive")
    members: list[TestFunction] = []
    regions: list[Region] = []
    for m in range(1, math.ceil(count / 2) + 1):
        level = _battery_level(space, m)
        region = seeded_region(space, level, rng.stream(seed, 1, m))
        regions.append(region)
        lower = LowerApprox(space, region, m)
        upper: TestFunction = UpperApprox(space, region, m)
        if m % 2 == 0:
            upper = Cone(1.0, upper, 1.0, LowerApprox(space, regions[-2], m - 1))
        members.extend([lower, upper])
    return FunctionFamily(tuple(members[:count]), cone=False, multiplicative=False)


def multiplicative_family(space: GroundSpace, generator_count: int, seed: int = 0,
                          levels: int | None = None, size: int | None = None) -> FunctionFamily:
    """Cone-and-product combinations over bumps ``h_1..h_L`` and seeded approximants.

    The bumps certify domination ``h_m >= 1{K_m}``; the remaining generators
    are upper approximants of seeded regions. Members are listed as the
    generators, then products ``h_i * u_i``, then squares ``h_i^2``, then convex
    combinations of consecutive generators, so every member takes values in
    [0, 1].
    """
    if levels is None:
        levels = max(1, generator_count // 2)
    if generator_count < levels:
        raise ValueError("generator_count must cover the requested levels")
    bumps = [Bump(space, m) for m in range(1, levels + 1)]
    others: list[TestFunction] = []
    for j in range(generator_count - levels):
        level = _battery_level(space, j % levels + 1)
        region = seeded_region(space, level, rng.stream(seed, 2, j))
        others.append(UpperApprox(space, region, 1 + j % 3))
    gens = bumps + others
    members: list[TestFunction] = list(gens)
    for i, u in enumerate(others):
        members.append(Product(bumps[i % levels], u))
    members.extend(Product(h, h) for h in bumps)
    members.extend(Cone(0.5, a, 0.5, b) for a, b in zip(gens, gens[1:]))
    if size is not None:
        members = members[:size]
    return FunctionFamily(tuple(members), cone=True, multiplicative=True)


def induced_metric(family: FunctionFamily, x, y, tol: float | None = None) -> np.ndarray:
    """``sum_i 2^-i |f_i(x) - f_i(y)|`` over the (finite) family.

    The sum is exact, so ``tol`` is accepted for interface symmetry only. With
    finitely many members this is a pseudo-metric: distinct points may sit at
    distance 0.
    """
    if any(f.sup_bound > 1 for f in family):
        raise ValueError("induced metric needs members bounded by 1")
    total = 0.0
    for i, f in enumerate(family, start=1):
        total = total + np.abs(f(x) - f(y)) / 2.0**i
    return np.asarray(total, dtype=float)
