"""Diagnostics for vague convergence of deterministic measure sequences.

Four checkers look at the same sequence from different angles:

``check_vague_functions``  |mu_n(f) - mu(f)| over a battery of test functions
``check_portmanteau``      |mu_n(B) - mu(B)| over continuity regions
``check_point_matching``   bottleneck displacement of matched atoms in B
``check_vague_metric``     the series metric rho~(mu_n, mu)

Each grid value n is probed at n and n + 1 and the larger gap is kept, so a
sequence alternating with the parity of n cannot hide behind an even grid.
A finite grid is evidence, not proof; the verdict is three-valued with a
factor 10 band between pass and fail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .boundedness import GroundSpace, check_same_space, is_bounded, pairwise
from .flow import bottleneck_matching
from .functions import FunctionFamily, lipschitz_battery, lower_approx, upper_approx
from .measures import DiscreteMeasure, LocallyFiniteMeasure, as_locally_finite
from .metrics import vague_dist
from .regions import Interval, Region

PASS, FAIL, INCONCLUSIVE, NA = "pass", "fail", "inconclusive", "n/a"
FAIL_FACTOR = 10.0
CSV_HEADER = ["probe_id", "n", "value", "limit", "gap"]


class CountMismatchError(ValueError):
    """Different numbers of atoms in B: the point-convergence criterion fails."""


class BoundaryMassError(ValueError):
    """The limit charges the boundary of B, so B is not a continuity region."""


@dataclass(frozen=True)
class MeasureSequence:
    """``n -> mu_n`` (pure) together with its claimed limit and probe regions."""

    generator: Callable[[int], object]
    limit: object
    label: str = ""
    regions: tuple[Region, ...] = ()

    def at(self, n: int) -> LocallyFiniteMeasure:
        return as_locally_finite(self.generator(int(n)))

    @property
    def limit_measure(self) -> LocallyFiniteMeasure:
        return as_locally_finite(self.limit)

    @property
    def space(self) -> GroundSpace:
        return self.limit_measure.space


@dataclass
class Probe:
    probe_id: str
    ns: list[int]
    values: list[float]
    limit: float
    gaps: list[float]
    grid: list[int] = field(default_factory=list)

    def rows(self):
        return [[self.probe_id, n, v, self.limit, g] for n, v, g in zip(self.ns, self.values, self.gaps)]


@dataclass
class Verdict:
    checker: str
    converged: str
    tol: float
    probes: list[Probe] = field(default_factory=list)
    excluded: list[dict] = field(default_factory=list)
    largest_n: int | None = None
    note: str = ""

    def csv_rows(self) -> list[list]:
        return [row for p in self.probes for row in p.rows()]

    def final_gaps(self) -> dict[str, float]:
        return {p.probe_id: _paired(p)[-1] for p in self.probes}

    def to_json(self) -> dict:
        return {
            "checker": self.checker,
            "converged": self.converged,
            "tol": self.tol,
            "largest_n": self.largest_n,
            "final_gaps": {k: _finite_or_str(v) for k, v in self.final_gaps().items()},
            "excluded": self.excluded,
            "note": self.note,
        }


def _finite_or_str(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _probe_ns(n_grid) -> list[int]:
    return sorted({int(k) for n in n_grid for k in (n, n + 1)})


def _paired(probe: Probe) -> list[float]:
    """Gap per grid point: the larger of the gaps at n and n + 1."""
    by_n = dict(zip(probe.ns, probe.gaps))
    return [max(by_n[n], by_n[n + 1]) for n in probe.grid]


def decide(probes: list[Probe], tol: float) -> str:
    """Tri-state rule.

    fail: some probe's final gap is at least ``10 tol``.
    pass: every final gap is at most ``tol`` and, over the last two grid
    points, each probe's gap is non-increasing or already below ``tol``.
    inconclusive: everything else, including an empty probe list.
    """
    if not probes:
        return INCONCLUSIVE
    paired = [_paired(p) for p in probes]
    finals = [g[-1] for g in paired]
    if any(g >= FAIL_FACTOR * tol for g in finals):
        return FAIL
    settled = all(len(g) < 2 or g[-1] <= g[-2] or g[-1] <= tol for g in paired)
    if all(g <= tol for g in finals) and settled:
        return PASS
    return INCONCLUSIVE


def _verdict(checker, probes, tol, n_grid, excluded=(), note=""):
    for p in probes:
        p.grid = sorted(int(n) for n in n_grid)
    return Verdict(checker, decide(probes, tol), tol, probes, list(excluded),
                   max(int(n) for n in n_grid), note)


def check_vague_functions(seq: MeasureSequence, battery, n_grid, tol: float) -> Verdict:
    mu = seq.limit_measure
    ns = _probe_ns(n_grid)
    probes = []
    for i, f in enumerate(battery):
        lim = mu.integrate(f)
        vals = [seq.at(n).integrate(f) for n in ns]
        probes.append(Probe(f"functions:f{i}", ns, vals, lim, [abs(v - lim) for v in vals]))
    return _verdict("functions", probes, tol, n_grid)


def _region_level(space, region):
    ok, m = is_bounded(space, region)
    if not ok:
        return None
    return m + 1  # closure of K_m lies in K_{m+1}


def check_portmanteau(seq: MeasureSequence, regions, n_grid, tol: float) -> Verdict:
    mu = seq.limit_measure
    space = mu.space
    ns = _probe_ns(n_grid)
    probes, excluded = [], []
    for i, region in enumerate(regions):
        level = _region_level(space, region)
        if level is None:
            excluded.append({"probe_id": f"portmanteau:B{i}", "reason": "region not bounded"})
            continue
        base = mu.level(level)
        if base.boundary_mass(region) > 0:
            excluded.append({"probe_id": f"portmanteau:B{i}",
                             "reason": "limit puts mass on the boundary"})
            continue
        lim = base.mass(region)
        vals = [seq.at(n).level(level).mass(region) for n in ns]
        probes.append(Probe(f"portmanteau:B{i}", ns, vals, lim, [abs(v - lim) for v in vals]))
    return _verdict("portmanteau", probes, tol, n_grid, excluded)


@dataclass
class Matching:
    region: Region
    count: int
    pairs: list[tuple[np.ndarray, np.ndarray]]
    max_displacement: float


def _restricted(mu, region):
    lf = as_locally_finite(mu)
    level = _region_level(lf.space, region)
    if level is None:
        raise ValueError(f"region {region} is not bounded")
    return lf.level(level).restrict(region)


def match_points(mu_n, mu, region: Region) -> Matching:
    """Bottleneck matching of the atoms of ``mu_n|_B`` with those of ``mu|_B``.

    Atoms are expanded with multiplicity and matched to minimise the largest
    hu-displacement; among optimal matchings the first one in lexicographic
    atom order is returned.
    """
    a, b = _restricted(mu_n, region), _restricted(mu, region)
    check_same_space(a.space, b.space)
    lf = as_locally_finite(mu)
    if lf.level(_region_level(lf.space, region)).boundary_mass(region) > 0:
        raise BoundaryMassError(f"the limit charges the boundary of {region}")
    if not (a.is_point_measure() and b.is_point_measure()):
        raise ValueError("point matching needs integer-valued measures")
    pa, pb = a.expanded_points(), b.expanded_points()
    if len(pa) != len(pb):
        raise CountMismatchError(f"{len(pa)} atoms in the sequence term, {len(pb)} in the limit")
    if len(pa) == 0:
        return Matching(region, 0, [], 0.0)
    cost = pairwise(a.space, pa, pb, "hu")
    value, assign = bottleneck_matching(cost)
    pairs = [(pa[i], pb[j]) for i, j in enumerate(assign)]
    return Matching(region, len(pa), pairs, value)


def _is_point(lf: LocallyFiniteMeasure, level: int) -> bool:
    return lf.level(level).is_point_measure()


def check_point_matching(seq: MeasureSequence, regions, n_grid, tol: float) -> Verdict:
    """Gap = bottleneck displacement, or infinity when the counts differ."""
    mu = seq.limit_measure
    space = mu.space
    ns = _probe_ns(n_grid)
    probes, excluded = [], []
    for i, region in enumerate(regions):
        pid = f"matching:B{i}"
        level = _region_level(space, region)
        if level is None:
            excluded.append({"probe_id": pid, "reason": "region not bounded"})
            continue
        if mu.level(level).boundary_mass(region) > 0:
            excluded.append({"probe_id": pid, "reason": "limit puts mass on the boundary"})
            continue
        terms = [seq.at(n) for n in ns]
        if not (_is_point(mu, level) and all(_is_point(t, level) for t in terms)):
            return Verdict("matching", NA, tol, [], excluded, max(n_grid),
                           "not a sequence of point measures")
        gaps = []
        for t in terms:
            try:
                gaps.append(match_points(t, mu, region).max_displacement)
            except CountMismatchError:
                gaps.append(math.inf)
        probes.append(Probe(pid, ns, gaps, 0.0, gaps))
    return _verdict("matching", probes, tol, n_grid, excluded)


def check_vague_metric(seq: MeasureSequence, n_grid, tol: float, metric: str = "hu") -> Verdict:
    """Gap = ``rho~(mu_n, mu)`` plus its truncation bound (at most tol / 2)."""
    mu = seq.limit_measure
    ns = _probe_ns(n_grid)
    vals = []
    for n in ns:
        value, bound = vague_dist(seq.at(n), mu, tol / 2.0, metric)
        vals.append(value + bound)
    return _verdict("metric", [Probe("metric:rho", ns, vals, 0.0, vals)], tol, n_grid)


@dataclass
class CrossReport:
    label: str
    verdicts: dict[str, Verdict]

    @property
    def applicable(self) -> dict[str, str]:
        return {k: v.converged for k, v in self.verdicts.items() if v.converged != NA}

    @property
    def agree(self) -> bool:
        return len(set(self.applicable.values())) <= 1

    @property
    def status(self) -> str:
        states = set(self.applicable.values())
        return states.pop() if len(states) == 1 else INCONCLUSIVE

    def agreement_matrix(self) -> dict[str, dict[str, bool]]:
        s = self.applicable
        return {a: {b: s[a] == s[b] for b in s} for a in s}

    def csv_rows(self) -> list[list]:
        return [row for v in self.verdicts.values() for row in v.csv_rows()]

    def to_json(self) -> dict:
        return {
            "sequence": self.label,
            "converged": self.status,
            "agree": self.agree,
            "defect": not self.agree,
            "agreement": self.agreement_matrix(),
            "verdicts": {k: v.to_json() for k, v in self.verdicts.items()},
            "note": ("a finite grid cannot certify the limit; "
                     f"largest n checked: {max(v.largest_n or 0 for v in self.verdicts.values())}"),
        }


def cross_validate(seq: MeasureSequence, battery=None, regions=None, n_grid=(10, 100, 1000, 10000),
                   tol: float = 1e-3) -> CrossReport:
    """Run every applicable checker; disagreement is reported as a defect."""
    regions = list(seq.regions if regions is None else regions)
    battery = default_battery(seq) if battery is None else battery
    return CrossReport(seq.label, {
        "functions": check_vague_functions(seq, battery, n_grid, tol),
        "portmanteau": check_portmanteau(seq, regions, n_grid, tol),
        "matching": check_point_matching(seq, regions, n_grid, tol),
        "metric": check_vague_metric(seq, n_grid, tol),
    })


def default_battery(seq: MeasureSequence, m_values=(2, 8), extra: int = 4, seed: int = 0) -> FunctionFamily:
    """Approximants of the probe regions plus a few seeded Lipschitz functions."""
    space = seq.space
    members = []
    for region in seq.regions:
        for m in m_values:
            members += [lower_approx(space, region, m), upper_approx(space, region, m)]
    if extra:
        members += list(lipschitz_battery(space, extra, seed))
    return FunctionFamily(tuple(members))


# the catalogue

E1 = GroundSpace.euclidean(1)
H = GroundSpace.halfline()
W1 = GroundSpace.weak(1)


def _dirac(space, x, w=1.0):
    return DiscreteMeasure.dirac(space, x, w)


def _lattice_limit():
    return LocallyFiniteMeasure(E1, lambda m: DiscreteMeasure(E1, np.arange(-m + 1, m, dtype=float)),
                                "integers")


def _lattice_term(n):
    k = np.arange(-n, n + 1, dtype=float)
    return DiscreteMeasure(E1, k + 1.0 / n)


def _cat(label, gen, limit, regions, expected):
    return MeasureSequence(gen, limit, label, tuple(regions)), expected


CATALOGUE: dict[str, Callable[[], tuple[MeasureSequence, str]]] = {
    "delta_shift": lambda: _cat("delta_shift", lambda n: _dirac(E1, 1 + 1 / n), _dirac(E1, 1.0),
                                [Interval(0.5, 1.5), Interval(1.75, 3.0), Interval(-1.0, 0.5)], PASS),
    "vanish": lambda: _cat("vanish", lambda n: _dirac(H, 1 / n), DiscreteMeasure.zero(H),
                           [Interval(0.5, 2.0, lo_open=True), Interval(0.25, 4.0)], PASS),
    "mass_ramp": lambda: _cat("mass_ramp", lambda n: _dirac(E1, 1.0, 1 - 1 / n), _dirac(E1, 1.0),
                              [Interval(0.5, 1.5), Interval(-2.0, 0.5)], PASS),
    "lattice": lambda: _cat("lattice", _lattice_term, _lattice_limit(),
                            [Interval(-2.5, 2.5), Interval(0.5, 3.5)], PASS),
    "escape": lambda: _cat("escape", lambda n: _dirac(E1, float(n)), _dirac(E1, 0.0),
                           [Interval(-1.0, 1.0), Interval(-3.0, 3.0)], FAIL),
    "wrong_limit": lambda: _cat("wrong_limit", lambda n: _dirac(H, 1 / n), _dirac(H, 1.0),
                                [Interval(0.5, 2.0), Interval(0.25, 4.0)], FAIL),
    "oscillate": lambda: _cat("oscillate", lambda n: _dirac(E1, float((-1) ** n)), _dirac(E1, 1.0),
                              [Interval(0.5, 1.5), Interval(-1.5, -0.5)], FAIL),
    "blowup": lambda: _cat("blowup", lambda n: _dirac(E1, 1.0, float(n)), _dirac(E1, 1.0),
                           [Interval(0.5, 1.5)], FAIL),
}

# delta_{1/n} seen in weak(1): it now converges to delta_0 and not to the null measure
EXTRA_SEQUENCES: dict[str, Callable[[], tuple[MeasureSequence, str]]] = {
    "vanish_weak": lambda: _cat("vanish_weak", lambda n: _dirac(W1, 1 / n), _dirac(W1, 0.0),
                                [Interval(-0.5, 0.5), Interval(0.5, 2.0)], PASS),
    "vanish_weak_null": lambda: _cat("vanish_weak_null", lambda n: _dirac(W1, 1 / n),
                                     DiscreteMeasure.zero(W1),
                                     [Interval(-0.5, 0.5), Interval(0.5, 2.0)], FAIL),
}


def catalogue_entry(name: str) -> tuple[MeasureSequence, str]:
    """``(sequence, expected verdict)`` for a named built-in sequence."""
    table = {**CATALOGUE, **EXTRA_SEQUENCES}
    if name not in table:
        raise KeyError(f"unknown catalogue sequence {name!r}; known: {sorted(table)}")
    return table[name]()
