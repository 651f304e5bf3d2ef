"""Acceptance suite: nine end-to-end criteria with runtime budgets.

Each criterion returns a ``CriterionResult``; ``run_all`` prints one line per
criterion. The same functions back ``vaguemeasures selftest`` and the
pytest acceptance module.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng
from .boundedness import (
    GroundSpace,
    bump,
    hu_metric,
    in_level,
    in_level_closure,
    interior_depth,
    region_distance,
)
from .convergence import CATALOGUE, EXTRA_SEQUENCES, check_portmanteau, cross_validate
from .functions import lipschitz_battery, lower_approx, multiplicative_family, upper_approx
from .measures import DiscreteMeasure
from .metrics import finite_measure_dist, prohorov, prohorov_oracle, vague_dist
from .random_measures import (
    IntensityMeasure,
    extremes_model,
    laplace_mc_many,
    laplace_poisson_exact,
    poisson_model,
    sample_poisson,
    test_convergence_in_distribution,
)
from .regions import Interval

SPACES = (
    GroundSpace.euclidean(1),
    GroundSpace.euclidean(2),
    GroundSpace.weak(1),
    GroundSpace.punctured(1),
    GroundSpace.punctured(2),
    GroundSpace.halfline(),
)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    budget: float | None

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        budget = f" (budget {self.budget:.0f}s)" if self.budget else ""
        return f"[{flag}] {self.number}. {self.name}: {self.detail}; {self.seconds:.2f}s{budget}"


def _timed(number, name, budget, body):
    t0 = time.perf_counter()
    ok, detail = body()
    dt = time.perf_counter() - t0
    if budget is not None and dt > budget:
        ok, detail = False, f"{detail}; over the runtime budget"
    return CriterionResult(number, name, bool(ok), detail, dt, budget)


def random_points(space: GroundSpace, gen: np.random.Generator, k: int, grid: bool = False) -> np.ndarray:
    """k seeded points of the space; with ``grid`` they are snapped so ties occur."""
    if space.has_forbidden_set:
        r = np.exp(gen.uniform(math.log(0.2), math.log(5.0), k))
        if grid:
            r = np.maximum(0.25, np.round(r * 4) / 4)
        if space.kind == "halfline_hl":
            return r[:, None]
        if space.dim == 1:
            return (r * gen.choice([-1.0, 1.0], k))[:, None]
        u = gen.normal(size=(k, space.dim))
        return r[:, None] * u / np.linalg.norm(u, axis=1, keepdims=True)
    p = 2.0 * gen.normal(size=(k, space.dim))
    if space.cap is False and space.kind in ("euclidean", "weak") and grid:
        p = np.round(p * 2) / 2
    return p


def random_measure(space, gen, k, grid=False, probability=True) -> DiscreteMeasure:
    w = gen.dirichlet(np.ones(k)) if probability else gen.uniform(0.1, 2.0, k)
    return DiscreteMeasure(space, random_points(space, gen, k, grid), w)


# 1 -------------------------------------------------------------------------

def criterion_prohorov_oracle(seed: int = 1, instances: int = 200) -> CriterionResult:
    def body():
        worst = 0.0
        for i in range(instances):
            gen = rng.stream(seed, 1, i)
            space = SPACES[i % len(SPACES)]
            grid = bool(i % 3 == 0)
            mu = random_measure(space, gen, int(gen.integers(1, 9)), grid)
            nu = random_measure(space, gen, int(gen.integers(1, 9)), grid)
            worst = max(worst, abs(prohorov(mu, nu) - prohorov_oracle(mu, nu)))
        return worst <= 1e-12, f"{instances} instances, max |exact - oracle| = {worst:.1e}"

    return _timed(1, "Prohorov oracle equivalence", 10.0, body)


# 2 -------------------------------------------------------------------------

def _axioms_on_matrix(d: np.ndarray, slack: float):
    n = len(d)
    sym = float(np.max(np.abs(d - d.T)))  # symmetry must hold exactly
    diag = float(np.max(np.abs(np.diag(d))))
    off = d[~np.eye(n, dtype=bool)]
    tri = 0.0
    for i, j, k in itertools.permutations(range(n), 3):
        tri = max(tri, d[i, k] - d[i, j] - d[j, k])
    ok = sym == 0.0 and diag <= slack and bool(np.all(off > 0)) and tri <= slack
    return ok, n * (n - 1) * (n - 2) // 6, tri


def _same_up_to_rounding(a: DiscreteMeasure, b: DiscreteMeasure) -> bool:
    return (a.points.shape == b.points.shape and bool(np.all(a.points == b.points))
            and bool(np.allclose(a.weights, b.weights, rtol=0, atol=1e-9)))


def _distance_matrix(items, dist):
    n = len(items)
    d = np.zeros((n, n))
    for i in range(n):
        d[i, i] = dist(items[i], items[i])
        for j in range(i + 1, n):
            d[i, j] = dist(items[i], items[j])
            d[j, i] = dist(items[j], items[i])
    return d


def criterion_metric_axioms(seed: int = 2, pool: int = 12, point_triples: int = 10_000) -> CriterionResult:
    slack = 1e-9

    def body():
        parts, triples, ok_all = [], 0, True
        # hu metric: independent random triples
        for s, space in enumerate(SPACES):
            gen = rng.stream(seed, 2, 0, s)
            x, y, z = (random_points(space, gen, point_triples) for _ in range(3))
            dxy, dyz, dxz = hu_metric(space, x, y), hu_metric(space, y, z), hu_metric(space, x, z)
            ok = (np.array_equal(dxy, hu_metric(space, y, x))
                  and np.all(hu_metric(space, x, x) == 0)
                  and np.all(dxy > 0)
                  and np.all(dxz <= dxy + dyz + slack))
            ok_all &= bool(ok)
            triples += point_triples
        parts.append(f"hu_metric {'ok' if ok_all else 'VIOLATED'}")
        # measure metrics: all triples from a seeded pool per space
        metrics = {
            "prohorov": (True, lambda a, b: prohorov(a, b)),
            "finite_measure_dist": (False, lambda a, b: finite_measure_dist(a, b)),
            "vague_dist": (False, lambda a, b: vague_dist(a, b, tol=1e-3)[0]),
        }
        for name, (prob, dist) in metrics.items():
            ok_metric, worst = True, 0.0
            for s, space in enumerate(SPACES):
                gen = rng.stream(seed, 2, 1, s)
                items: list[DiscreteMeasure] = []
                while len(items) < pool:  # distinct measures only
                    mu = random_measure(space, gen, int(gen.integers(1, 5)), len(items) % 2 == 0, prob)
                    if all(not _same_up_to_rounding(mu, other) for other in items):
                        items.append(mu)
                ok, count, tri = _axioms_on_matrix(_distance_matrix(items, dist), slack)
                ok_metric &= ok
                worst = max(worst, tri)
                triples += count
            ok_all &= ok_metric
            parts.append(f"{name} {'ok' if ok_metric else 'VIOLATED'}")
        return ok_all, ", ".join(parts) + f" ({triples} triples)"

    return _timed(2, "Metric axioms", 30.0, body)


# 3 -------------------------------------------------------------------------

def hu_diameter_bound(space: GroundSpace, m: int) -> float:
    """Supremum of the hu distance over ``K_m``: ``1 v m`` (not attained)."""
    return max(1.0, float(m))


def criterion_boundedness(seed: int = 3, samples: int = 400) -> CriterionResult:
    def body():
        ok, worst = True, 0.0
        for space in (GroundSpace.halfline(), GroundSpace.punctured(2)):
            for m in range(1, 11):
                gen = rng.stream(seed, 3, m, space.dim)
                r = np.concatenate([1.0 / m + np.exp(gen.uniform(-12, 0, samples // 2)),
                                    np.exp(gen.uniform(math.log(1.0 / m), 4, samples // 2))])
                r = r[r > 1.0 / m]
                if space.dim == 1:
                    pts = r[:, None]
                else:
                    u = gen.normal(size=(len(r), 2))
                    pts = r[:, None] * u / np.linalg.norm(u, axis=1, keepdims=True)
                assert np.all(in_level(space, m, pts))
                i, j = np.triu_indices(len(pts), 1)
                diam = float(np.max(hu_metric(space, pts[i], pts[j])))
                bound = hu_diameter_bound(space, m)
                worst = max(worst, diam / bound)
                ok &= math.isfinite(diam) and diam <= bound
            base = np.ones((1, space.dim))
            approach = (2.0 ** -np.arange(1, 21))[:, None] * base / np.linalg.norm(base)
            d = hu_metric(space, approach, np.repeat(base, 20, axis=0))
            ok &= bool(np.all(np.diff(d) > 0)) and d[-1] > 1e5
        return ok, f"max sampled diameter / (1 v m) = {worst:.4f}; approach to C strictly increasing"

    return _timed(3, "Boundedness coincidence", None, body)


# 4 -------------------------------------------------------------------------

def criterion_equivalence(n_grid=(10, 100, 1000, 10000), tol: float = 1e-3) -> CriterionResult:
    def body():
        bad = []
        for name, factory in {**CATALOGUE, **EXTRA_SEQUENCES}.items():
            seq, expected = factory()
            report = cross_validate(seq, n_grid=n_grid, tol=tol)
            if not report.agree or report.status != expected:
                bad.append(f"{name}: {report.applicable} (expected {expected})")
        seq, _ = EXTRA_SEQUENCES["vanish_weak"]()
        weak_delta = check_portmanteau(seq, seq.regions, n_grid, tol).converged
        seq, _ = EXTRA_SEQUENCES["vanish_weak_null"]()
        weak_null = check_portmanteau(seq, seq.regions, n_grid, tol).converged
        if (weak_delta, weak_null) != ("pass", "fail"):
            bad.append(f"weak(1) Portmanteau: to delta_0 {weak_delta}, to null {weak_null}")
        count = len(CATALOGUE) + len(EXTRA_SEQUENCES)
        return not bad, "; ".join(bad) if bad else f"{count} sequences, all checkers agree"

    return _timed(4, "Criterion equivalence", 60.0, body)


# 5 -------------------------------------------------------------------------

def bump_sandwich_violations(bump_fn: Callable = bump, levels=range(1, 11), points: int = 1000) -> int:
    """Count grid points where ``1{cl K_m} <= g_m <= 1{K_{m+1}}`` fails."""
    bad = 0
    for space in SPACES:
        if space.dim != 1:
            continue
        x = np.linspace(-12.0, 12.0, points)
        if space.kind == "halfline_hl":
            x = np.concatenate([np.linspace(1e-3, 12.0, points), 1.0 / np.arange(1, 13)])
        elif space.has_forbidden_set:
            x = np.concatenate([x[x != 0], 1.0 / np.arange(1, 13), -1.0 / np.arange(1, 13)])
        else:
            x = np.concatenate([x, np.arange(-12.0, 13.0)])
        for m in levels:
            g = np.asarray(bump_fn(space, m, x))
            lo = in_level_closure(space, m, x).astype(float)
            hi = in_level(space, m + 1, x).astype(float)
            bad += int(np.sum((g < lo) | (g > hi)))
    return bad


def criterion_approximants(bump_fn: Callable = bump, points: int = 1000) -> CriterionResult:
    ms = [2 ** k for k in range(11)]
    cases = [
        (GroundSpace.euclidean(1), Interval(1.0, 2.0), np.linspace(-1.0, 4.0, points)),
        (GroundSpace.halfline(), Interval(1.0, 2.0), np.linspace(0.05, 4.0, points)),
        (GroundSpace.punctured(1), Interval(-2.0, -0.5), np.linspace(-4.0, 4.0, points + 1)[:-1] + 1e-3),
        (GroundSpace.weak(1), Interval(-0.5, 0.5), np.linspace(-3.0, 3.0, points)),
    ]

    def body():
        ok, notes = True, []
        for space, region, x in cases:
            inner = region.interior_contains(x).astype(float)
            outer = region.closure_contains(x).astype(float)
            lowers = [lower_approx(space, region, m)(x) for m in ms]
            uppers = [upper_approx(space, region, m)(x) for m in ms]
            ok &= all(np.all(lo <= inner) and np.all(up >= outer) for lo, up in zip(lowers, uppers))
            ok &= all(np.all(a <= b) for a, b in zip(lowers, lowers[1:]))
            ok &= all(np.all(a >= b) for a, b in zip(uppers, uppers[1:]))
            # distance to the boundary: depth inside, distance outside
            dist_b = np.where(region.interior_contains(x), interior_depth(space, x, region),
                              region_distance(space, x, region.closure()))
            far = dist_b >= 0.1
            gap = uppers[-1][far] - lowers[-1][far]
            ok &= bool(np.all(gap == 0.0))
        bad = bump_sandwich_violations(bump_fn)
        if bad:
            ok = False
            notes.append(f"bump sandwich violated at {bad} points")
        detail = "; ".join(notes) if notes else (
            f"sandwich, monotonicity and zero off-boundary gap at m = 1..{ms[-1]}, bump sandwich exact")
        return ok, detail

    return _timed(5, "Monotone approximants", None, body)


# 6 -------------------------------------------------------------------------

def criterion_poisson(seed: int = 6, seeds: int = 10_000) -> CriterionResult:
    def body():
        ok, notes = True, []
        for lam in (0.5, 1.0, 5.0):
            intensity = IntensityMeasure(lam, 1.0)  # mass of K_1 is c / alpha = lam
            counts = np.array([sample_poisson(intensity, 1, (seed, int(2 * lam), s)).total_mass
                               for s in range(seeds)])
            mean, var = counts.mean(), counts.var(ddof=1)
            ok &= abs(mean - lam) <= 4 * math.sqrt(lam / seeds) and abs(var - lam) <= 0.1 * lam
            notes.append(f"lambda={lam}: mean {mean:.4f}, var {var:.4f}")
        intensity = IntensityMeasure(1.0, 1.0)
        outer = np.zeros(seeds)
        inner = np.zeros(seeds)
        for s in range(seeds):
            x = sample_poisson(intensity, 2, (seed, 99, s)).expanded_points()[:, 0]
            outer[s], inner[s] = np.sum(x > 1.0), np.sum(x <= 1.0)
        cov = float(np.cov(outer, inner)[0, 1])
        joint = math.sqrt(outer.var(ddof=1) * inner.var(ddof=1) / seeds)
        ok &= abs(cov) <= 4 * joint
        notes.append(f"annulus covariance {cov:.4f} (4 se = {4 * joint:.4f})")
        return ok, "; ".join(notes)

    return _timed(6, "Poisson sampler statistics", 30.0, body)


# 7 -------------------------------------------------------------------------

def criterion_laplace_quadrature(seed: int = 7, reps: int = 10_000) -> CriterionResult:
    space = GroundSpace.halfline()

    def body():
        battery = list(lipschitz_battery(space, 10, seed))
        intensity = IntensityMeasure(1.0, 1.0)
        est, se = laplace_mc_many(poisson_model(1.0, 1.0), battery, reps, seed)
        exact = np.array([laplace_poisson_exact(intensity, f) for f in battery])
        hits = int(np.sum(np.abs(est - exact) <= 3 * se))
        return hits >= 9, f"{hits}/10 within 3 stderr at reps={reps}"

    return _timed(7, "Laplace MC vs quadrature", 30.0, body)


# 8 and 9 -----------------------------------------------------------------

def _laplace_route(battery, seed, reps, n_grid):
    good = test_convergence_in_distribution(lambda n: extremes_model(n, 1.0), poisson_model(1.0, 1.0),
                                            battery, n_grid, reps, seed=seed)
    bad = test_convergence_in_distribution(lambda n: poisson_model(2.0, 1.0), poisson_model(1.0, 1.0),
                                           battery, n_grid, reps, seed=seed)
    z_good, z_bad = good.final_max_z(), bad.final_max_z()
    ok = good.verdict == "pass" and z_good <= 3 and bad.verdict == "fail" and z_bad > 5
    return ok, (f"extremes vs Poisson {good.verdict} (max |z| {z_good:.2f}); "
                f"perturbed intensity {bad.verdict} (max |z| {z_bad:.1f})"), (good.verdict, bad.verdict)


def criterion_distribution(seed: int = 8, reps: int = 10_000, n_grid=(100, 1000, 10000)) -> CriterionResult:
    battery = lipschitz_battery(GroundSpace.halfline(), 8, seed)
    return _timed(8, "Convergence in distribution (Lipschitz battery)", 60.0,
                  lambda: _laplace_route(battery, seed, reps, n_grid)[:2])


def criterion_family(seed: int = 9, reps: int = 10_000, n_grid=(100, 1000, 10000)) -> CriterionResult:
    family = multiplicative_family(GroundSpace.halfline(), 4, seed, levels=2, size=8)

    def body():
        ok, detail, verdicts = _laplace_route(family, seed, reps, n_grid)
        ok &= verdicts == ("pass", "fail")  # same verdicts as criterion 8
        return ok, f"{len(family)} members: " + detail

    return _timed(9, "Multiplicative family route", 60.0, body)


CRITERIA: dict[int, Callable[..., CriterionResult]] = {
    1: criterion_prohorov_oracle,
    2: criterion_metric_axioms,
    3: criterion_boundedness,
    4: criterion_equivalence,
    5: criterion_approximants,
    6: criterion_poisson,
    7: criterion_laplace_quadrature,
    8: criterion_distribution,
    9: criterion_family,
}


def run_all(bump_fn: Callable = bump, echo: Callable[[str], None] | None = print) -> list[CriterionResult]:
    results = []
    for number, crit in CRITERIA.items():
        res = crit(bump_fn=bump_fn) if number == 5 else crit()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results


def corrupted_bump(space, m, x):
    """A bump that dips below 1 on the closure of K_m (fault injection)."""
    return 0.9 * np.asarray(bump(space, m, x))

