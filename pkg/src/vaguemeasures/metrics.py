"""Exact Prohorov distance between atomic measures and the metrics built on it.

``prohorov``             Levy-Prohorov distance of probability measures.
``finite_measure_dist``  mass gap plus mass-weighted Prohorov distance of the shapes.
``vague_dist``           series over bump truncations; metrises vague convergence.

Deficiencies ``sup_A mu(A) - nu(A^eps)`` (closed thickening) are computed by
max-flow; the distance is then found among the pairwise-distance breakpoints.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .boundedness import check_same_space, pairwise
from .flow import bipartite_max_flow
from .measures import DiscreteMeasure, as_locally_finite, truncate

MAX_ATOMS = 10_000
ORACLE_MAX_ATOMS = 16
FLOW_SLACK = 1e-12
PROBABILITY_TOL = 1e-9


class SizeCapError(ValueError):
    """Instance too large for the exact algorithm."""


class NotProbabilityError(ValueError):
    pass


@dataclass(frozen=True)
class DeficiencyCertificate:
    epsilon: float
    witness: tuple[int, ...]
    deficiency_value: float
    flow_value: float

    def witness_value(self, mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str = "hu") -> float:
        """``mu(A) - nu(A^eps)`` recomputed directly for the witness set A."""
        idx = list(self.witness)
        if not idx or len(nu) == 0:
            return float(mu.weights[idx].sum())
        near = pairwise(mu.space, mu.points[idx], nu.points, metric) <= self.epsilon
        return float(mu.weights[idx].sum() - nu.weights[near.any(axis=0)].sum())

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "witness": list(self.witness),
            "deficiency": self.deficiency_value,
            "flow": self.flow_value,
        }


def _check_size(*measures):
    if sum(len(m) for m in measures) > MAX_ATOMS:
        raise SizeCapError(
            f"more than {MAX_ATOMS} atoms in total; subsample the measures before "
            "computing exact distances"
        )


def _deficiency_from_matrix(mu, nu, dist, eps):
    flow, reach = bipartite_max_flow(mu.weights, nu.weights, dist <= eps, FLOW_SLACK)
    value = mu.total_mass - flow
    if value < FLOW_SLACK:
        value = 0.0
    return DeficiencyCertificate(float(eps), tuple(np.nonzero(reach)[0].tolist()), value, flow)


def deficiency(mu: DiscreteMeasure, nu: DiscreteMeasure, eps: float, metric: str = "hu",
               check: bool = False) -> DeficiencyCertificate:
    """``max_A mu(A) - nu(A^eps)`` with its min-cut witness.

    With ``check=True`` the witness is re-evaluated and compared to the flow
    value (used by the test-suite).
    """
    check_same_space(mu.space, nu.space)
    _check_size(mu, nu)
    if eps < 0:
        raise ValueError("epsilon must be nonnegative")
    dist = pairwise(mu.space, mu.points, nu.points, metric)
    cert = _deficiency_from_matrix(mu, nu, dist, eps)
    if check:
        direct = cert.witness_value(mu, nu, metric)
        if abs(direct - cert.deficiency_value) > 1e-12 * max(1.0, mu.total_mass):
            raise AssertionError(f"witness value {direct} disagrees with flow deficiency {cert}")
    return cert


def _as_probability(mu: DiscreteMeasure) -> DiscreteMeasure:
    if abs(mu.total_mass - 1.0) > PROBABILITY_TOL:
        raise NotProbabilityError(f"total mass {mu.total_mass} is not 1")
    return mu.normalized()


def _canonical_key(mu: DiscreteMeasure):
    return (len(mu), mu.points.tobytes(), mu.weights.tobytes())


def prohorov(mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str = "hu",
             certificate: bool = False):
    """Levy-Prohorov distance between two atomic probability measures.

    The deficiency ``D(eps)`` is a non-increasing step function with jumps at
    the pairwise distances; on each step the smallest admissible eps is
    ``max(d_k, D(d_k))``, and since that quantity is quasi-convex in k a
    binary search over the sorted breakpoints finds the minimum.

    The pair is processed in a canonical order so the value is exactly
    symmetric; the certificate always refers to the atoms of ``mu``.
    """
    check_same_space(mu.space, nu.space)
    _check_size(mu, nu)
    if _canonical_key(nu) < _canonical_key(mu):
        value = prohorov(nu, mu, metric)
        if not certificate:
            return value
        mu, nu = _as_probability(mu), _as_probability(nu)
        dist = pairwise(mu.space, mu.points, nu.points, metric)
        return value, _deficiency_from_matrix(mu, nu, dist, value)
    mu, nu = _as_probability(mu), _as_probability(nu)
    if mu == nu:
        value = 0.0
        cert = DeficiencyCertificate(0.0, (), 0.0, 1.0)
        return (value, cert) if certificate else value
    dist = pairwise(mu.space, mu.points, nu.points, metric)
    cands = np.unique(np.concatenate([[0.0], dist.ravel()]))
    cands = cands[cands <= 1.0]
    cache: dict[int, DeficiencyCertificate] = {}

    def D(k):
        if k not in cache:
            cache[k] = _deficiency_from_matrix(mu, nu, dist, cands[k])
        return cache[k]

    lo, hi = 0, len(cands)
    while lo < hi:  # first k with D(c_k) <= c_k
        mid = (lo + hi) // 2
        if D(mid).deficiency_value <= cands[mid]:
            hi = mid
        else:
            lo = mid + 1
    options = [(1.0, None)]
    if lo < len(cands):
        options.append((float(cands[lo]), D(lo)))
    if lo > 0:
        options.append((D(lo - 1).deficiency_value, D(lo - 1)))
    value, cert = min(options, key=lambda t: t[0])
    value = min(value, 1.0)
    if cert is None or cert.epsilon != value:
        cert = _deficiency_from_matrix(mu, nu, dist, value)
    return (value, cert) if certificate else value


def prohorov_oracle(mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str = "hu") -> float:
    """Brute-force Prohorov distance by enumerating every subset of mu's atoms.

    The answer is the smallest candidate eps (a pairwise distance, a subset
    deficiency at a pairwise distance, or 1) at which every subset satisfies
    ``mu(A) <= nu(A^eps) + eps``.
    """
    check_same_space(mu.space, nu.space)
    if len(mu) + len(nu) > ORACLE_MAX_ATOMS:
        raise SizeCapError(f"the oracle handles at most {ORACLE_MAX_ATOMS} atoms")
    mu, nu = _as_probability(mu), _as_probability(nu)
    n = len(mu)
    subsets = np.array(list(itertools.product([0, 1], repeat=n)), dtype=float).reshape(-1, n)
    dist = pairwise(mu.space, mu.points, nu.points, metric)
    mu_mass = subsets @ mu.weights

    def worst(eps):
        reach = (subsets @ (dist <= eps).astype(float)) > 0
        return float(np.max(mu_mass - reach.astype(float) @ nu.weights))

    breaks = np.unique(np.concatenate([[0.0], dist.ravel()]))
    cands = set(breaks.tolist()) | {worst(b) for b in breaks} | {1.0}
    cands = sorted(c for c in cands if 0.0 <= c <= 1.0)
    for c in cands:
        if worst(c) <= c:
            return float(c)
    return 1.0


def finite_measure_dist(mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str = "hu") -> float:
    """``|mu(X) - nu(X)| + (mu(X) ^ nu(X)) * prohorov(mu/mu(X), nu/nu(X))``.

    The second term is taken to be 0 when either measure is null.
    """
    check_same_space(mu.space, nu.space)
    a, b = mu.total_mass, nu.total_mass
    gap = abs(a - b)
    if a == 0 or b == 0:
        return gap
    if mu == nu:
        return 0.0
    return gap + min(a, b) * prohorov(mu.normalized(), nu.normalized(), metric)


def levels_for_tol(tol: float) -> int:
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    return max(1, math.ceil(math.log2(1.0 / tol))) if tol < 1 else 1


def vague_dist(mu, nu, tol: float = 1e-6, metric: str = "hu") -> tuple[float, float]:
    """Partial sum of ``sum_m 2^-m (1 ^ finite_measure_dist(T_m mu, T_m nu))``.

    Returns ``(value, error_bound)``; the true series lies in
    ``[value, value + error_bound]`` and ``error_bound <= tol``.
    """
    lmu, lnu = as_locally_finite(mu), as_locally_finite(nu)
    check_same_space(lmu.space, lnu.space)
    levels = levels_for_tol(tol)
    total = 0.0
    for m in range(1, levels + 1):
        term = min(1.0, finite_measure_dist(truncate(lmu, m), truncate(lnu, m), metric))
        total += term / 2.0**m
    return total, 2.0**-levels
