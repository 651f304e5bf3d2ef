import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vaguemeasures import rng
from vaguemeasures.boundedness import GroundSpace, localizing_set
from vaguemeasures.functions import UpperApprox
from vaguemeasures.measures import (
    DiscreteMeasure,
    LocallyFiniteMeasure,
    add,
    boundary_mass,
    integrate,
    mass,
    restrict,
    scale,
    truncate,
)
from vaguemeasures.regions import Interval

E1 = GroundSpace.euclidean(1)
H = GroundSpace.halfline()


def atoms(space, xs, ws=None):
    return DiscreteMeasure(space, np.asarray(xs, dtype=float).reshape(-1, space.dim), ws)


def test_restrict_examples():
    assert restrict(atoms(E1, [1, 3]), Interval(0, 2)) == atoms(E1, [1])
    assert len(restrict(atoms(E1, [1], [2.0]), Interval(1, 2, lo_open=True))) == 0
    assert restrict(atoms(H, [0.1, 0.9]), localizing_set(H, 2)) == atoms(H, [0.9])


def test_integrate_examples():
    one = lambda x: np.ones(len(x))
    assert integrate(atoms(E1, [1, 3]), one) == 2.0
    assert integrate(atoms(E1, [2], [0.5]), lambda x: np.clip(x[:, 0], 0, 10)) == 1.0
    f = UpperApprox(E1, Interval(1, 2), 2)
    assert integrate(atoms(E1, [1, 2]), f) == 2.0


def test_mass_and_boundary_mass_examples():
    b = Interval(1, 2)
    mu = atoms(E1, [1, 3])
    assert (mass(mu, b), boundary_mass(mu, b)) == (1.0, 1.0)
    mu = atoms(E1, [1.5])
    assert (mass(mu, b), boundary_mass(mu, b)) == (1.0, 0.0)
    mu = atoms(E1, [1, 2, 3])
    b = Interval(1, 3, lo_open=True)
    # both endpoints 1 and 3 carry an atom
    assert (mass(mu, b), boundary_mass(mu, b)) == (2.0, 2.0)


def test_truncate_examples():
    mu = atoms(H, [2.0, 5.0])
    assert truncate(mu, 1) == mu
    assert len(truncate(atoms(H, [0.4]), 1)) == 0
    t = truncate(atoms(H, [2 / 3]), 1)
    assert t.points[0, 0] == 2 / 3 and t.weights[0] == pytest.approx(0.5)


def test_add_and_scale_examples():
    assert add(atoms(E1, [1]), atoms(E1, [1])) == atoms(E1, [1], [2.0])
    assert len(scale(atoms(E1, [1, 2]), 0)) == 0
    s = add(atoms(E1, [1], [2.0]), atoms(E1, [2], [3.0]))
    assert s.points[:, 0].tolist() == [1.0, 2.0] and s.weights.tolist() == [2.0, 3.0]


def test_zero_measure_and_errors():
    z = DiscreteMeasure.zero(E1)
    assert z.total_mass == 0 and z.integrate(lambda x: x) == 0.0
    with pytest.raises(ValueError):
        atoms(E1, [1], [-1.0])
    with pytest.raises(ValueError):
        scale(atoms(E1, [1]), -2)
    with pytest.raises(AttributeError):
        z.points = None


def test_point_measure_detection():
    assert atoms(E1, [1, 1, 2]).is_point_measure()
    assert not atoms(E1, [1], [0.5]).is_point_measure()
    assert atoms(E1, [1, 1, 2]).expanded_points()[:, 0].tolist() == [1.0, 1.0, 2.0]


def _poisson_like(seed):
    # pure level generator: a fixed seeded cloud on the half-line
    gen = rng.stream(seed)
    cloud = np.exp(gen.uniform(-4, 4, 60))

    def level(m):
        return atoms(H, cloud[cloud > 1 / m])

    return LocallyFiniteMeasure(H, level)


def test_locally_finite_restriction_consistency():
    for seed in range(20):
        lf = _poisson_like(seed)
        for m in range(1, 8):
            assert lf.level(m + 1).restrict(localizing_set(H, m)) == lf.level(m)


def test_locally_finite_rejects_out_of_level_atoms():
    lf = LocallyFiniteMeasure(H, lambda m: atoms(H, [0.01]))
    with pytest.raises(ValueError):
        lf.level(1)


def test_truncate_mass_bound():
    for seed in range(20):
        lf = _poisson_like(seed)
        for m in range(1, 8):
            t = truncate(lf, m)
            assert lf.level(m).total_mass <= t.total_mass + 1e-12
            assert t.total_mass <= lf.level(m + 1).total_mass + 1e-12


weights = st.lists(st.floats(0.0, 5.0), min_size=1, max_size=6)


@settings(max_examples=100, deadline=None)
@given(weights, weights, st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_integration_linearity(w1, w2, a, b):
    x1 = np.arange(len(w1), dtype=float) + 0.5
    x2 = np.arange(len(w2), dtype=float) * 0.7 + 0.1
    mu, nu = atoms(E1, x1, w1), atoms(E1, x2, w2)
    f = UpperApprox(E1, Interval(0.0, 2.0), 2)
    lhs = integrate(add(scale(mu, a), scale(nu, b)), f)
    rhs = a * integrate(mu, f) + b * integrate(nu, f)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(weights, st.floats(-1.0, 6.0), st.floats(0.0, 3.0))
def test_mass_additivity(w, cut, width):
    mu = atoms(E1, np.arange(len(w), dtype=float), w)
    left = Interval(cut - width, cut)
    right = Interval(cut, cut + width, lo_open=True)
    whole = Interval(cut - width, cut + width)
    assert mass(mu, whole) == pytest.approx(mass(mu, left) + mass(mu, right), abs=1e-12)
