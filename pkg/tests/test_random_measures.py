import math

import numpy as np
import pytest

from vaguemeasures import rng
from vaguemeasures.boundedness import GroundSpace, localizing_set
from vaguemeasures.functions import Bump, LowerApprox, UpperApprox, Zero, lipschitz_battery
from vaguemeasures.measures import DiscreteMeasure
from vaguemeasures.random_measures import (
    CAVEAT,
    CSV_HEADER,
    IntensityMeasure,
    custom_model,
    deterministic_model,
    extremes_model,
    laplace_extremes_exact,
    laplace_mc,
    laplace_mc_many,
    laplace_poisson_exact,
    poisson_model,
    sample_empirical_extremes,
    sample_poisson,
    test_convergence_in_distribution as run_laplace_test,
)
from vaguemeasures.regions import Interval

H = GroundSpace.halfline()
UNIT = IntensityMeasure(1.0, 1.0)


# samplers

def test_intensity_masses():
    assert UNIT.mass(1) == 1.0
    lam = IntensityMeasure(2.0, 1.5)
    assert sum(lam.annulus_mass(j) for j in range(7)) == pytest.approx(lam.mass(7))
    for c, a in [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (math.inf, 1.0)]:
        with pytest.raises(ValueError):
            IntensityMeasure(c, a)


def test_poisson_purity_and_support():
    a, b = sample_poisson(UNIT, 3, 5), sample_poisson(UNIT, 3, 5)
    assert a == b and a.is_point_measure()
    assert np.all(a.points > 1 / 3)
    with pytest.raises(ValueError):
        sample_poisson(UNIT, 3, None)


@pytest.mark.parametrize("sampler", [
    lambda m, s: sample_poisson(IntensityMeasure(3.0, 1.0), m, s),
    lambda m, s: sample_empirical_extremes(1000, 1.0, m, s),
    lambda m, s: sample_empirical_extremes(50, 2.0, m, s),
])
def test_level_consistency(sampler):
    for s in range(100):
        for m in (1, 2, 5):
            assert sampler(m + 1, s).restrict(localizing_set(H, m)) == sampler(m, s)


def test_poisson_mean_count():
    counts = [sample_poisson(UNIT, 1, (1, s)).total_mass for s in range(4000)]
    assert abs(np.mean(counts) - 1.0) <= 4 * math.sqrt(1 / 4000)


def test_extremes_examples():
    for s in range(50):
        assert sample_empirical_extremes(1, 1.0, 1, s).total_mass in (0.0, 1.0)
    counts = np.array([sample_empirical_extremes(10_000, 1.0, 1, s).total_mass for s in range(1000)])
    sd = counts.std(ddof=1)
    assert abs(counts.mean() - 1.0) <= 3 * sd / math.sqrt(1000)
    # m^alpha atoms expected in K_m when n^(1/alpha) >= m
    counts = [sample_empirical_extremes(400, 2.0, 3, (2, s)).total_mass for s in range(2000)]
    assert abs(np.mean(counts) - 9.0) <= 4 * math.sqrt(9.0 / 2000)
    with pytest.raises(ValueError):
        sample_empirical_extremes(0, 1.0, 1, 0)
    with pytest.raises(ValueError):
        sample_empirical_extremes(10, 1.0, 1, 0, method="other")


def test_extremes_methods_agree_in_law():
    f = UpperApprox(H, Interval(0.5, 2.0), 2)
    a = extremes_model(200, 1.0, method="annuli")
    b = extremes_model(200, 1.0, method="direct")
    ea, sa = laplace_mc(a, f, 4000, 3)
    eb, sb = laplace_mc(b, f, 4000, 4)
    assert abs(ea - eb) <= 4 * math.hypot(sa, sb)
    exact = laplace_extremes_exact(200, 1.0, f)
    assert abs(ea - exact) <= 4 * sa and abs(eb - exact) <= 4 * sb


# Laplace functionals

def test_laplace_mc_examples():
    assert laplace_mc(poisson_model(1.0, 1.0), Zero(H), 200, 0) == (1.0, 0.0)
    det = deterministic_model(DiscreteMeasure.dirac(H, 2.0))
    est, se = laplace_mc(det, Bump(H, 1), 200, 0)
    assert est == pytest.approx(math.exp(-1), abs=1e-15) and se == 0.0
    with pytest.raises(ValueError):
        laplace_mc(det, Bump(H, 1), 99, 0)


def test_laplace_mc_deterministic_in_seed():
    model, f = poisson_model(2.0, 1.0), UpperApprox(H, Interval(0.5, 2.0), 2)
    assert laplace_mc(model, f, 300, 9) == laplace_mc(model, f, 300, 9)
    assert laplace_mc(model, f, 300, 9) != laplace_mc(model, f, 300, 10)


def test_laplace_mc_independent_of_thread_count(monkeypatch):
    model, fs = poisson_model(2.0, 1.0), list(lipschitz_battery(H, 4))
    one = laplace_mc_many(model, fs, 400, 5)
    monkeypatch.setenv("VAGUE_MEASURES_THREADS", "3")
    three = laplace_mc_many(model, fs, 400, 5)
    np.testing.assert_array_equal(one[0], three[0])
    np.testing.assert_array_equal(one[1], three[1])


def test_laplace_poisson_exact_examples():
    assert laplace_poisson_exact(UNIT, Zero(H)) == 1.0
    b = Interval(2.0, 3.0)
    target = math.exp(-(1 - math.exp(-1)) / 6)
    vals = [laplace_poisson_exact(UNIT, LowerApprox(H, b, m)) for m in (4, 64, 1024)]
    assert all(v >= target for v in vals)
    assert vals[-1] - target < 1e-3 and vals[0] > vals[1] > vals[2]
    f = UpperApprox(H, b, 3)
    l1 = laplace_poisson_exact(UNIT, f)
    l2 = laplace_poisson_exact(IntensityMeasure(2.0, 1.0), f)
    assert math.log(l2) == pytest.approx(2 * math.log(l1), rel=1e-9)


def test_laplace_poisson_exact_indicator_like():
    # f = 1 on (1, inf) exactly has L = exp(-(1 - 1/e) * mass)
    class Step:
        space = H
        support_level = 1

        def __call__(self, x):
            return (np.asarray(x).reshape(-1) > 1).astype(float)

    assert laplace_poisson_exact(UNIT, Step()) == pytest.approx(math.exp(-(1 - math.exp(-1))), rel=1e-9)


def test_extremes_exact_approaches_poisson():
    f = UpperApprox(H, Interval(0.5, 2.0), 2)
    p = laplace_poisson_exact(UNIT, f)
    gaps = [abs(laplace_extremes_exact(n, 1.0, f) - p) for n in (10, 100, 1000, 10_000)]
    assert all(b < a for a, b in zip(gaps, gaps[1:])) and gaps[-1] < 1e-3


def test_mc_matches_quadrature():
    model = poisson_model(1.0, 1.0)
    fam = list(lipschitz_battery(H, 10, seed=2))
    est, se = laplace_mc_many(model, fam, 10_000, 11)
    exact = np.array([laplace_poisson_exact(UNIT, f) for f in fam])
    # each agreement holds with probability ~0.997; at least 9 of 10 required
    assert np.sum(np.abs(est - exact) <= 3 * se) >= 9
    f = LowerApprox(H, Interval(2.0, 3.0), 1)
    e, s = laplace_mc(model, f, 10_000, 12)
    assert abs(e - laplace_poisson_exact(UNIT, f)) <= 3 * s


def test_laplace_monotone_in_function():
    model, lam = poisson_model(3.0, 1.0), IntensityMeasure(3.0, 1.0)
    for b in (Interval(0.5, 1.0), Interval(1.0, 4.0)):
        for m in (1, 3):
            lo, up = LowerApprox(H, b, m), UpperApprox(H, b, m)
            (el, eu), (sl, su) = laplace_mc_many(model, [lo, up], 2000, 13)
            assert eu <= el + 4 * math.hypot(sl, su)
            assert laplace_poisson_exact(lam, up) <= laplace_poisson_exact(lam, lo)


def test_sandwich_around_indicator():
    b = Interval(1.0, 2.0)
    indicator = math.exp(-(1 - math.exp(-1)) * 0.5)  # lambda([1, 2]) = 1/2
    gaps = []
    for m in (1, 2, 4, 8, 16):
        tol = 1e-6 if m == 16 else 1e-8
        up = laplace_poisson_exact(UNIT, UpperApprox(H, b, m), tol)
        lo = laplace_poisson_exact(UNIT, LowerApprox(H, b, m), tol)
        assert up <= indicator <= lo
        gaps.append(lo - up)
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < gaps[0] / 8


# the distributional tester

def test_tester_constant_sequence_passes():
    target = poisson_model(1.0, 1.0)
    report = run_laplace_test(lambda n: target, target, lipschitz_battery(H, 4), (10, 100), 2000, seed=1)
    assert report.verdict == "pass"
    assert "consistent with convergence" in report.to_json()["statement"]
    assert report.caveat == CAVEAT


def test_tester_extremes_to_poisson_passes():
    report = run_laplace_test(lambda n: extremes_model(n, 1.0), poisson_model(1.0, 1.0),
                              lipschitz_battery(H, 6), (100, 1000, 10_000), 10_000, seed=2)
    assert report.verdict == "pass", report.final_max_z()


def test_tester_offset_intensity_fails():
    report = run_laplace_test(lambda n: poisson_model(2.0, 1.0), poisson_model(1.0, 1.0),
                              lipschitz_battery(H, 4), (100, 1000), 2000, seed=3)
    assert report.verdict == "fail"
    bigger = run_laplace_test(lambda n: poisson_model(2.0, 1.0), poisson_model(1.0, 1.0),
                              lipschitz_battery(H, 4), (100, 1000), 8000, seed=3)
    assert bigger.final_max_z() > report.final_max_z()


def test_tester_mc_fallback_and_outputs():
    inner = poisson_model(1.0, 1.0)
    target = custom_model(H, lambda m, key: inner.sample(m, key))
    report = run_laplace_test(lambda n: inner, target, lipschitz_battery(H, 3), (10, 20), 500, seed=4)
    assert report.verdict == "pass"
    assert all(r["exact_stderr"] > 0 for r in report.rows)
    assert len(report.csv_rows()) == 6 and len(report.csv_rows()[0]) == len(CSV_HEADER)
    with pytest.raises(ValueError):
        run_laplace_test(lambda n: inner, inner, lipschitz_battery(H, 3), (), 500)
