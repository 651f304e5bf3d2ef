"""Random point measures on the half-line and their Laplace functionals.

Samples live on ``halfline_hl`` with levels ``K_m = (1/m, inf)``. Level m is
the union of the annuli ``A_0 = (1, inf)`` and ``A_j = (1/(j+1), 1/j]`` for
``j < m``. Each annulus is drawn from its own stream ``(seed, ..., j)``, so a
level-m sample is literally the first m annuli of any higher level sample.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import rng
from .boundedness import GroundSpace
from .measures import DiscreteMeasure, as_locally_finite
from .quadrature import adaptive_simpson

HALFLINE = GroundSpace.halfline()
MIN_REPS = 100
CAVEAT = ("a finite battery can refute but never confirm convergence in distribution; "
          "a pass means the estimates are consistent with convergence")


def _key(seed) -> tuple[int, ...]:
    if seed is None:
        raise ValueError("a seed is required")
    if isinstance(seed, (tuple, list)):
        if not seed:
            raise ValueError("empty seed key")
        return tuple(int(s) for s in seed)
    return (int(seed),)


def _annulus(j: int) -> tuple[float, float]:
    return (1.0, math.inf) if j == 0 else (1.0 / (j + 1), 1.0 / j)


def _power_tail_draw(gen, count, lo, hi, alpha, floor=0.0):
    """Inverse-CDF draw from density ~ x^(-alpha-1) on ``(max(lo, floor), hi]``."""
    lo_eff = max(lo, floor)
    u_hi = lo_eff ** -alpha
    u_lo = 0.0 if math.isinf(hi) else hi ** -alpha
    u = u_lo + gen.random(count) * (u_hi - u_lo)
    u = np.maximum(u, np.finfo(float).tiny)
    x = u ** (-1.0 / alpha)
    x = np.minimum(x, hi)
    # a strict lower endpoint must stay excluded after rounding
    return np.maximum(x, np.nextafter(lo_eff, math.inf) if lo >= floor else lo_eff)


@dataclass(frozen=True)
class IntensityMeasure:
    """``c x^(-alpha-1) dx`` on the half-line."""

    c: float
    alpha: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError("intensity constant c must be positive and finite")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be positive and finite")

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.c * x ** (-self.alpha - 1.0)

    def mass(self, m: int) -> float:
        """Mass of ``K_m = (1/m, inf)``."""
        return self.c * float(m) ** self.alpha / self.alpha

    def annulus_mass(self, j: int) -> float:
        if j == 0:
            return self.c / self.alpha
        return self.c / self.alpha * ((j + 1.0) ** self.alpha - float(j) ** self.alpha)


def sample_poisson(intensity: IntensityMeasure, m: int, seed) -> DiscreteMeasure:
    """Poisson point process with the given intensity, restricted to ``K_m``."""
    pts = _poisson_points(intensity, m, _key(seed))
    return DiscreteMeasure(HALFLINE, pts)


def _poisson_points(intensity, m, key):
    parts = []
    for j in range(m):
        gen = rng.stream(key[0], *key[1:], j)
        count = gen.poisson(intensity.annulus_mass(j))
        if count:
            lo, hi = _annulus(j)
            parts.append(_power_tail_draw(gen, count, lo, hi, intensity.alpha))
    return np.concatenate(parts) if parts else np.zeros(0)


def _extremes_tail(n, alpha, x):
    """``P(X / n^(1/alpha) > x)`` for standard Pareto X."""
    if math.isinf(x):
        return 0.0
    return min(1.0, x ** -alpha / n)


def sample_empirical_extremes(n: int, alpha: float, m: int, seed,
                              method: str = "annuli") -> DiscreteMeasure:
    """``sum_i delta_{X_i / n^(1/alpha)}`` restricted to ``K_m``, X_i iid Pareto(alpha).

    ``method="direct"`` draws all n variables as ``X = U^(-1/alpha)``.
    ``method="annuli"`` (default) draws the multinomial cell counts of the
    annuli one after another as conditional binomials, then the locations by
    inverse CDF inside each annulus. Both give the same law; the second costs
    O(count in K_m) rather than O(n).
    """
    pts = _extremes_points(n, alpha, m, _key(seed), method)
    return DiscreteMeasure(HALFLINE, pts)


def _extremes_points(n, alpha, m, key, method="annuli"):
    if n < 1:
        raise ValueError("n must be at least 1")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if method == "direct":
        gen = rng.stream(key[0], *key[1:])
        x = (1.0 - gen.random(n)) ** (-1.0 / alpha) / n ** (1.0 / alpha)
        return x[x > 1.0 / m]
    if method != "annuli":
        raise ValueError(f"unknown method {method!r}")
    floor = n ** (-1.0 / alpha)
    remaining = n
    parts = []
    for j in range(m):
        lo, hi = _annulus(j)
        gen = rng.stream(key[0], *key[1:], j)
        above = _extremes_tail(n, alpha, hi)  # mass already assigned to outer annuli
        cell = _extremes_tail(n, alpha, lo) - above
        if remaining == 0 or cell <= 0:
            continue
        p = min(1.0, cell / (1.0 - above)) if above < 1.0 else 1.0
        count = int(gen.binomial(remaining, p))
        remaining -= count
        if count:
            parts.append(_power_tail_draw(gen, count, lo, hi, alpha, floor))
    return np.concatenate(parts) if parts else np.zeros(0)


@dataclass(frozen=True)
class RandomMeasureModel:
    """A random measure given by a pure sampler ``(level, seed key) -> atoms``.

    ``draw(m, key)`` returns plain ``(points, weights)`` arrays and is what the
    Monte Carlo loops use; ``sample`` wraps it into a ``DiscreteMeasure``.
    """

    kind: str
    space: GroundSpace
    draw: Callable[[int, tuple], tuple[np.ndarray, np.ndarray]]
    laplace_exact: Callable | None = None
    params: dict = field(default_factory=dict)

    def sample(self, m: int, seed) -> DiscreteMeasure:
        pts, w = self.draw(m, _key(seed))
        return DiscreteMeasure(self.space, pts, w)

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}


def _unit(points):
    return points, np.ones(len(points))


def poisson_model(c: float, alpha: float) -> RandomMeasureModel:
    lam = IntensityMeasure(c, alpha)
    return RandomMeasureModel(
        "poisson", HALFLINE,
        lambda m, key: _unit(_poisson_points(lam, m, key)),
        lambda f, quad_tol=1e-8: laplace_poisson_exact(lam, f, quad_tol),
        {"c": float(c), "alpha": float(alpha)},
    )


def extremes_model(n: int, alpha: float, method: str = "annuli") -> RandomMeasureModel:
    return RandomMeasureModel(
        "empirical_extremes", HALFLINE,
        lambda m, key: _unit(_extremes_points(n, alpha, m, key, method)),
        lambda f, quad_tol=1e-8: laplace_extremes_exact(n, alpha, f, quad_tol),
        {"n": int(n), "alpha": float(alpha)},
    )


def deterministic_model(mu, label: str = "deterministic") -> RandomMeasureModel:
    lf = as_locally_finite(mu)

    def draw(m, key):
        level = lf.level(m)
        return level.points, level.weights

    return RandomMeasureModel("deterministic", lf.space, draw,
                              lambda f, quad_tol=None: math.exp(-lf.integrate(f)),
                              {"label": label})


def custom_model(space: GroundSpace, sampler: Callable[[int, tuple], DiscreteMeasure],
                 laplace_exact=None, label: str = "custom") -> RandomMeasureModel:
    def draw(m, key):
        mu = sampler(m, key)
        return mu.points, mu.weights

    return RandomMeasureModel("custom", space, draw, laplace_exact, {"label": label})


def _transformed_integral(f, alpha, top, quad_tol):
    """``int_0^top (1 - exp(-f(u^(-1/alpha)))) du``, i.e. the tail integral after u = x^-alpha."""

    def g(u):
        u = np.maximum(u, 1e-300)
        x = np.minimum(u ** (-1.0 / alpha), 1e300)
        return -np.expm1(-f(x))

    return adaptive_simpson(g, 0.0, top, rel_tol=quad_tol, panels=512)


def _support_level(f):
    level = getattr(f, "support_level", None)
    if level is None or not math.isfinite(level):
        raise ValueError("the test function needs a finite support level")
    return int(level)


def laplace_poisson_exact(intensity: IntensityMeasure, f, quad_tol: float = 1e-8) -> float:
    """``exp(-int (1 - e^-f) c x^(-alpha-1) dx)`` by adaptive Simpson quadrature."""
    if f.space != HALFLINE:
        raise ValueError("the Poisson intensity lives on the half-line")
    top = float(_support_level(f)) ** intensity.alpha
    integral = intensity.c / intensity.alpha * _transformed_integral(f, intensity.alpha, top, quad_tol)
    return math.exp(-integral)


def laplace_extremes_exact(n: int, alpha: float, f, quad_tol: float = 1e-8) -> float:
    """``(1 - E[1 - e^{-f(X/n^(1/alpha))}])^n`` for iid Pareto X."""
    if f.space != HALFLINE:
        raise ValueError("the extremes model lives on the half-line")
    top = min(float(_support_level(f)) ** alpha, float(n))
    p = _transformed_integral(f, alpha, top, quad_tol) / n
    return float((1.0 - p) ** n)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("VAGUE_MEASURES_THREADS", "1")))
    except ValueError:
        return 1


def _functionals(model, functions, reps, key, level):
    """``N_r(f)`` for every function and replication, shape ``(len(functions), reps)``."""

    def chunk(bounds):
        a, b = bounds
        pts, wts, idx = [], [], []
        for r in range(a, b):
            p, w = model.draw(level, (*key, r))
            pts.append(np.asarray(p, dtype=float))
            wts.append(np.asarray(w, dtype=float))
            idx.append(np.full(len(w), r - a))
        if not pts or sum(len(w) for w in wts) == 0:
            return np.zeros((len(functions), b - a))
        pts_all = np.concatenate(pts)
        w_all, i_all = np.concatenate(wts), np.concatenate(idx)
        return np.stack([np.bincount(i_all, weights=w_all * f.evaluate(
            pts_all.reshape(-1, model.space.dim)), minlength=b - a) for f in functions])

    workers = _threads()
    size = max(1, -(-reps // (4 * workers)))
    bounds = [(a, min(reps, a + size)) for a in range(0, reps, size)]
    if workers == 1:
        parts = [chunk(b) for b in bounds]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(chunk, bounds))  # map keeps replication order
    return np.concatenate(parts, axis=1)


def laplace_mc_many(model: RandomMeasureModel, functions, reps: int, seed):
    """Monte Carlo ``E[exp(-N(f))]`` for several functions on shared realisations.

    Returns arrays ``(estimates, stderrs)``. Replication r uses the stream key
    ``(*seed, r)``, so results do not depend on the number of workers.
    """
    if reps < MIN_REPS:
        raise ValueError(f"at least {MIN_REPS} replications are required")
    functions = list(functions)
    level = max(_support_level(f) for f in functions)
    vals = np.exp(-_functionals(model, functions, reps, _key(seed), level))
    est = vals.mean(axis=1)
    se = vals.std(axis=1, ddof=1) / math.sqrt(reps)
    return est, se


def laplace_mc(model: RandomMeasureModel, f, reps: int, seed) -> tuple[float, float]:
    """Monte Carlo Laplace functional: ``(mean of exp(-N(f)), std / sqrt(reps))``."""
    est, se = laplace_mc_many(model, [f], reps, seed)
    return float(est[0]), float(se[0])


def _z(estimate, stderr, target, target_se=0.0):
    scale = math.sqrt(stderr ** 2 + target_se ** 2)
    diff = estimate - target
    if scale > 0:
        return diff / scale
    return 0.0 if diff == 0 else math.copysign(math.inf, diff)


@dataclass
class LaplaceReport:
    rows: list[dict]
    verdict: str
    z_threshold: float
    n_grid: list[int]
    reps: int
    target_kind: str
    caveat: str = CAVEAT

    def final_max_z(self) -> float:
        last = self.n_grid[-1]
        return max(abs(r["z"]) for r in self.rows if r["n"] == last)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "statement": (f"{self.verdict}: " + ("consistent with convergence"
                          if self.verdict == "pass" else "not consistent with convergence"
                          if self.verdict == "fail" else "undecided")),
            "caveat": self.caveat,
            "z_threshold": self.z_threshold,
            "n_grid": list(self.n_grid),
            "reps": self.reps,
            "target": self.target_kind,
            "rows": self.rows,
        }

    def csv_rows(self) -> list[list]:
        return [[r["f_id"], r["n"], r["estimate"], r["stderr"], r["exact"], r["z"]] for r in self.rows]


CSV_HEADER = ["f_id", "n", "estimate", "stderr", "exact", "z"]


def test_convergence_in_distribution(seq, target: RandomMeasureModel, battery, n_grid, reps: int,
                                     z_threshold: float = 3.0, seed: int = 0,
                                     trend_slack: float = 2.0) -> LaplaceReport:
    """Compare Laplace functionals of ``seq(n)`` with those of ``target``.

    Verdict: ``fail`` if some ``|z| > z_threshold`` at the largest n;
    ``pass`` if all are within the threshold and the largest ``|z|`` did not
    grow by more than ``trend_slack`` from the previous grid point (sampling
    noise alone moves the maximum of several |z| by about one unit);
    ``inconclusive`` otherwise.
    """
    functions = list(battery)
    n_grid = sorted(int(n) for n in n_grid)
    if not n_grid:
        raise ValueError("empty n grid")
    if target.laplace_exact is not None:
        exact = [float(target.laplace_exact(f)) for f in functions]
        exact_se = [0.0] * len(functions)
    else:
        est, se = laplace_mc_many(target, functions, 10 * reps, (seed, 1))
        exact, exact_se = est.tolist(), se.tolist()
    rows = []
    for i, n in enumerate(n_grid):
        est, se = laplace_mc_many(seq(n), functions, reps, (seed, 0, i))
        for k in range(len(functions)):
            rows.append({
                "f_id": k, "n": n, "estimate": float(est[k]), "stderr": float(se[k]),
                "exact": exact[k], "exact_stderr": exact_se[k],
                "z": _z(float(est[k]), float(se[k]), exact[k], exact_se[k]),
            })
    by_n = {n: max(abs(r["z"]) for r in rows if r["n"] == n) for n in n_grid}
    last = by_n[n_grid[-1]]
    if last > z_threshold:
        verdict = "fail"
    elif len(n_grid) > 1 and last > by_n[n_grid[-2]] + trend_slack:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return LaplaceReport(rows, verdict, z_threshold, n_grid, reps, target.kind)


test_convergence_in_distribution.__test__ = False
