import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaguemeasures import rng
from vaguemeasures.acceptance import SPACES, random_points
from vaguemeasures.boundedness import GroundSpace, hu_metric, in_level, in_level_closure
from vaguemeasures.functions import (
    Bump,
    Cone,
    FunctionFamily,
    LowerApprox,
    Product,
    UnboundedThickeningError,
    UpperApprox,
    Zero,
    induced_metric,
    lipschitz_battery,
    multiplicative_family,
)
from vaguemeasures.measures import DiscreteMeasure
from vaguemeasures.regions import Annulus, Interval
from vaguemeasures.serialization import function_from_json

E1 = GroundSpace.euclidean(1)
H = GroundSpace.halfline()
P1 = GroundSpace.punctured(1)


def test_upper_approx_examples():
    f = UpperApprox(E1, Interval(1, 2), 2)
    np.testing.assert_allclose(f(np.array([2.25, 1.5, 3.0])), [0.5, 1.0, 0.0])


def test_lower_approx_examples():
    b = Interval(1, 2)
    np.testing.assert_allclose(LowerApprox(E1, b, 4)(np.array([1.5, 1.0])), [1.0, 0.0])
    assert LowerApprox(E1, b, 1)(np.array([1.25]))[0] == pytest.approx(0.25)


def test_approximants_reject_bad_input():
    with pytest.raises(ValueError):
        UpperApprox(E1, Interval(1, 2), 0)
    with pytest.raises(ValueError):
        LowerApprox(H, Interval(0, 1, lo_open=True), 1)


def test_unbounded_thickening_in_base_metric():
    # the base-metric 1-thickening of [0.5, 1] reaches 0 on the half-line
    with pytest.raises(UnboundedThickeningError):
        UpperApprox(H, Interval(0.5, 1.0), 1, metric="base")
    assert UpperApprox(H, Interval(0.5, 1.0), 1).support_level >= 2


REGIONS = [
    (E1, Interval(1, 2)),
    (E1, Interval(-3, 0.5, lo_open=True)),
    (H, Interval(0.5, 2.0)),
    (P1, Interval(-2.0, -0.4)),
    (GroundSpace.punctured(2), Annulus(0.5, 1.5, lo_open=False, dim=2)),
]


@pytest.mark.parametrize("space,region", REGIONS, ids=lambda v: str(v))
def test_monotone_approximation(space, region):
    pts = random_points(space, rng.stream(20), 1000)
    ind = region.contains(pts).astype(float)
    for m in range(1, 12):
        up, up2 = UpperApprox(space, region, m)(pts), UpperApprox(space, region, m + 1)(pts)
        lo, lo2 = LowerApprox(space, region, m)(pts), LowerApprox(space, region, m + 1)(pts)
        assert np.all(up2 <= up) and np.all(lo2 >= lo)
        assert np.all(lo <= ind) and np.all(ind <= up)
    # pointwise limits off the boundary
    off = ~region.boundary_contains(pts)
    m = 2**10
    far = off & (np.abs(UpperApprox(space, region, m)(pts) - ind) > 0)
    assert not np.any(far & (UpperApprox(space, region, 4 * m)(pts) != ind))
    np.testing.assert_array_equal(UpperApprox(space, region, 2**40)(pts)[off], region.closure_contains(pts)[off])
    np.testing.assert_array_equal(LowerApprox(space, region, 2**40)(pts)[off], ind[off])


@pytest.mark.parametrize("space,region", REGIONS, ids=lambda v: str(v))
def test_lipschitz_certificate(space, region):
    gen = rng.stream(21)
    x, y = random_points(space, gen, 5000), random_points(space, gen, 5000)
    d = hu_metric(space, x, y)
    for m in (1, 3, 10):
        for f in (UpperApprox(space, region, m), LowerApprox(space, region, m)):
            assert np.all(np.abs(f(x) - f(y)) <= f.lipschitz * d + 1e-12)


@pytest.mark.parametrize("space", SPACES, ids=str)
def test_battery_support_and_bounds(space):
    fam = lipschitz_battery(space, 8, seed=3)
    assert len(fam) == 8
    pts = random_points(space, rng.stream(22), 2000)
    gen = rng.stream(23)
    x, y = random_points(space, gen, 2000), random_points(space, gen, 2000)
    d = hu_metric(space, x, y)
    for f in fam:
        v = f(pts)
        assert np.all((0 <= v) & (v <= f.sup_bound))
        if space.kind != "weak":
            assert np.isfinite(f.support_level)
            assert np.all(v[~in_level(space, f.support_level, pts)] == 0)
        assert np.all(np.abs(f(x) - f(y)) <= f.lipschitz * d + 1e-12)
        assert DiscreteMeasure.zero(space).integrate(f) == 0.0


def test_battery_determinism_and_smallest():
    a, b = lipschitz_battery(H, 6, seed=7), lipschitz_battery(H, 6, seed=7)
    assert a.to_json() == b.to_json() and len(a) == 6
    assert all(np.isfinite(f.support_level) for f in a)
    one = lipschitz_battery(H, 1)
    assert len(one) == 1 and isinstance(one[0], LowerApprox) and one[0].m == 1
    assert lipschitz_battery(H, 6, seed=8).to_json() != a.to_json()
    with pytest.raises(ValueError):
        lipschitz_battery(H, 0)


def test_multiplicative_family_examples():
    fam = multiplicative_family(H, 6, seed=1, levels=3)
    assert fam.closure_flags == {"cone": True, "multiplicative": True}
    h1, h2 = Bump(H, 1), Bump(H, 2)
    assert h1(np.array([1.0, 3.0])).tolist() == [1.0, 1.0]
    pts = random_points(H, rng.stream(24), 500)
    np.testing.assert_array_equal(Product(h1, h1)(pts), h1(pts) ** 2)
    outside = np.array([0.1, 0.2, 0.25])
    assert np.all(Cone(2.0, h1, 3.0, h2)(outside) == 0)
    for f in fam:
        v = f(pts)
        assert np.all((0 <= v) & (v <= 1))
    with pytest.raises(ValueError):
        multiplicative_family(H, 2, levels=3)


@pytest.mark.parametrize("space", SPACES, ids=str)
def test_bump_domination(space):
    pts = random_points(space, rng.stream(25), 2000)
    for m in range(1, 8):
        h = Bump(space, m)
        assert np.all(h(pts) >= h.domination * in_level(space, m, pts))
        assert np.all(h(pts) >= in_level_closure(space, m, pts))


def test_induced_metric_examples():
    fam = multiplicative_family(H, 6)
    x = np.array([[0.7], [1.3]])
    assert np.all(induced_metric(fam, x, x) == 0)
    one = FunctionFamily((UpperApprox(E1, Interval(0, 1), 1),))
    assert induced_metric(one, np.array([0.5]), np.array([3.0]))[0] == 0.5
    with pytest.raises(ValueError):
        induced_metric(FunctionFamily((Cone(1.0, Bump(H, 1), 1.0, Bump(H, 2)),)), x, x)


def test_induced_metric_symmetry_and_pseudo():
    fam = multiplicative_family(H, 6, seed=2)
    gen = rng.stream(26)
    x, y = random_points(H, gen, 1000), random_points(H, gen, 1000)
    np.testing.assert_array_equal(induced_metric(fam, x, y), induced_metric(fam, y, x))
    # a finite family cannot separate points far outside every support
    far = induced_metric(fam, np.array([[1e-6]]), np.array([[2e-6]]))
    assert far[0] == 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.05, 20.0))
def test_cone_and_product_evaluate_consistently(a, b, x):
    f, g = UpperApprox(H, Interval(0.5, 2.0), 2), LowerApprox(H, Interval(1.0, 3.0), 3)
    p = np.array([x])
    assert Cone(a, f, b, g)(p)[0] == pytest.approx(a * f(p)[0] + b * g(p)[0])
    assert Product(f, g)(p)[0] == f(p)[0] * g(p)[0]
    assert Cone(a, f, b, g).support_level == max(f.support_level, g.support_level)


def test_zero_function():
    z = Zero(H)
    assert z(np.array([1.0, 2.0])).tolist() == [0.0, 0.0]


def test_json_roundtrip():
    fam = multiplicative_family(H, 5, seed=4)
    pts = random_points(H, rng.stream(27), 300)
    for f in list(fam) + list(lipschitz_battery(H, 6)):
        g = function_from_json(f.to_json(), H)
        assert g.to_json() == f.to_json()
        np.testing.assert_array_equal(g(pts), f(pts))
