import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaguemeasures import rng
from vaguemeasures.boundedness import GroundSpace
from vaguemeasures.flow import bipartite_max_flow, bottleneck_matching, perfect_matching
from vaguemeasures.measures import DiscreteMeasure
from vaguemeasures.quadrature import QuadratureError, adaptive_simpson
from vaguemeasures.regions import Annulus, Ball, Box, Interval, Union, Whole
from vaguemeasures.serialization import (
    ConfigError,
    battery_from_json,
    measure_from_json,
    measure_to_json,
    model_from_json,
    num_from_json,
    region_from_json,
    region_to_json,
    space_from_json,
    space_to_json,
)

# quadrature

def test_simpson_polynomials_and_smooth():
    assert adaptive_simpson(lambda x: x**3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-12)
    assert adaptive_simpson(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-9)
    assert adaptive_simpson(lambda x: np.exp(-x), 0.0, 30.0) == pytest.approx(1 - math.exp(-30), rel=1e-9)
    assert adaptive_simpson(np.sin, 1.0, 1.0) == 0.0


def test_simpson_kinks_and_halving_self_check():
    f = lambda x: np.minimum(np.abs(x - 0.3137) * 7.0, 1.0)
    a = adaptive_simpson(f, 0.0, 1.0, rel_tol=1e-10)
    b = adaptive_simpson(f, 0.0, 1.0, rel_tol=1e-12, panels=1024)
    exact = 1.0 - (1 / 7.0) + 0.0  # the dip has area 1/7 under the clip level
    assert abs(a - b) < 1e-9 and a == pytest.approx(exact, abs=1e-9)


def test_simpson_depth_cap():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: np.sin(1e7 * x), 0.0, 1.0, max_depth=8)


# flow and matching

def _brute_flow(supply, demand, adj):
    # min over subsets A of supply(A^c) + demand(N(A)) (max-flow = min-cut)
    n = len(supply)
    best = math.inf
    for mask in itertools.product([0, 1], repeat=n):
        a = np.array(mask, dtype=bool)
        best = min(best, supply[~a].sum() + demand[adj[a].any(axis=0)].sum())
    return best


def test_max_flow_against_min_cut():
    for s in range(60):
        gen = rng.stream(40, s)
        n, k = gen.integers(1, 7, 2)
        supply, demand = gen.uniform(0, 1, n), gen.uniform(0, 1, k)
        adj = gen.random((n, k)) < 0.4
        value, reach = bipartite_max_flow(supply, demand, adj)
        assert value == pytest.approx(_brute_flow(supply, demand, adj), abs=1e-12)
        # the reachable set is a minimum cut
        cut = supply[~reach].sum() + demand[adj[reach].any(axis=0)].sum()
        assert cut == pytest.approx(value, abs=1e-12)


def test_perfect_and_bottleneck_matching():
    assert perfect_matching(np.eye(3, dtype=bool)) == [0, 1, 2]
    assert perfect_matching(np.array([[1, 1], [1, 0]], dtype=bool)) == [1, 0]
    assert perfect_matching(np.array([[1, 0], [1, 0]], dtype=bool)) is None
    assert bottleneck_matching(np.zeros((0, 0))) == (0.0, [])
    value, assign = bottleneck_matching(np.array([[1.0, 5.0], [2.0, 9.0]]))
    assert (value, assign) == (5.0, [1, 0])
    with pytest.raises(ValueError):
        bottleneck_matching(np.zeros((2, 3)))


# rng

def test_streams_reproducible_and_distinct():
    a = rng.stream(1, 2, 3).random(4)
    np.testing.assert_array_equal(a, rng.stream(1, 2, 3).random(4))
    assert not np.array_equal(a, rng.stream(1, 2, 4).random(4))
    assert not np.array_equal(a, rng.stream(2, 2, 3).random(4))
    with pytest.raises(ValueError):
        rng.stream(None)


# serialization

E1 = GroundSpace.euclidean(1)
REGIONS = [Interval(-math.inf, 2.0, hi_open=True), Ball((0.0, 1.0), 2.0), Box((0.0, 0.0), (1.0, 2.0)),
           Annulus(0.5, math.inf, dim=2), Whole(3), Union((Interval(0.0, 1.0), Interval(2.0, 3.0)))]


@pytest.mark.parametrize("region", REGIONS, ids=repr)
def test_region_roundtrip(region):
    assert region_from_json(region_to_json(region)) == region


@pytest.mark.parametrize("space", [E1, GroundSpace.weak(2), GroundSpace.punctured(1, cap=True),
                                   GroundSpace.halfline()], ids=str)
def test_space_roundtrip(space):
    assert space_from_json(space_to_json(space)) == space


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(0.0, 10.0)), max_size=8))
def test_measure_roundtrip(pairs):
    mu = DiscreteMeasure(E1, [[p] for p, _ in pairs] if pairs else None, [w for _, w in pairs] or None)
    assert measure_from_json(measure_to_json(mu)) == mu


def test_config_errors_name_the_field():
    with pytest.raises(ConfigError, match="measure.atoms\\[0\\].w"):
        measure_from_json({"space": {"kind": "euclidean", "dim": 1}, "atoms": [{"x": 1, "w": "a"}]})
    with pytest.raises(ConfigError, match="positive integers"):
        measure_from_json({"space": {"kind": "euclidean"}, "atoms": [{"x": 1, "w": 2.5}],
                           "point_measure": True})
    with pytest.raises(ConfigError, match="coordinates"):
        measure_from_json({"space": {"kind": "euclidean", "dim": 2}, "atoms": [{"x": [1]}]})
    with pytest.raises(ConfigError, match="region.type"):
        region_from_json({"type": "blob"})
    with pytest.raises(ConfigError):
        space_from_json({"kind": "sphere"})
    with pytest.raises(ConfigError):
        num_from_json(True, "x")
    with pytest.raises(ConfigError, match="model.kind"):
        model_from_json({"kind": "cox"})
    with pytest.raises(ConfigError):
        model_from_json({"kind": "poisson", "c": -1, "alpha": 1})
    with pytest.raises(ConfigError, match="battery.type"):
        battery_from_json({"type": "magic"}, E1)


def test_battery_and_model_descriptors():
    h = GroundSpace.halfline()
    assert len(battery_from_json({"type": "lipschitz", "count": 5, "seed": 1}, h)) == 5
    fam = battery_from_json({"type": "multiplicative", "generators": 4, "size": 6}, h)
    assert len(fam) == 6 and fam.multiplicative
    fam = battery_from_json({"type": "explicit", "members": [{"op": "bump", "m": 2}]}, h)
    assert fam[0].support_level == 3
    assert model_from_json({"kind": "poisson", "c": 1, "alpha": 1}).to_json() == \
        {"kind": "poisson", "c": 1.0, "alpha": 1.0}
    assert model_from_json({"kind": "empirical_extremes", "n": 10, "alpha": 2}).params["n"] == 10
