import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epimc.errors import FeasibilityError, TieError
from epimc.paths import (
    CompartmentView,
    EventPath,
    InitialState,
    count_at,
    integrate_product,
    left_limit_at,
    merge_events,
)


def test_eventpath_validates_order_and_window():
    with pytest.raises(ValueError):
        EventPath([2.0, 1.0], 5.0)
    with pytest.raises(ValueError):
        EventPath([1.0, 1.0], 5.0)
    with pytest.raises(ValueError):
        EventPath([0.0], 5.0)
    with pytest.raises(ValueError):
        EventPath([6.0], 5.0)
    p = EventPath([1.0, 2.5], 5.0)
    assert p.n == 2 and len(p) == 2
    with pytest.raises(ValueError):
        p.times[0] = 3.0


def test_initial_state_sum():
    with pytest.raises(ValueError):
        InitialState(10, 5, 1)
    s = InitialState.sir(10, 2)
    assert (s.S0, s.I0, s.R0) == (8, 2, 0)


def test_count_right_continuous():
    p = EventPath([1.0, 2.0, 3.0], 4.0)
    assert count_at(p, 2.0) == 2
    assert left_limit_at(p, 2.0) == 1
    assert count_at(p, 0.0) == 0
    assert count_at(p, 4.0) == 3
    with pytest.raises(ValueError):
        count_at(p, 4.5)


def test_merge_events_and_ties():
    a = EventPath([1.0, 3.0], 5.0)
    b = EventPath([2.0], 5.0)
    assert merge_events({"x": a, "y": b}) == [(1.0, "x"), (2.0, "y"), (3.0, "x")]
    with pytest.raises(TieError):
        merge_events([("x", a), ("y", EventPath([3.0], 5.0))])


def test_compartments_sir_and_seir():
    init = InitialState(10, 8, 2)
    v = CompartmentView(init, EventPath([1.0], 4.0), EventPath([2.0, 3.0], 4.0))
    assert v.S(0.5) == 8 and v.S(1.0) == 7
    assert v.I(1.0) == 3 and v.I(3.5) == 1
    assert v.feasible()
    init = InitialState(10, 8, 1, E0=1)
    v = CompartmentView(init, EventPath([1.0], 4.0), EventPath([2.0], 4.0), EventPath([3.0], 4.0))
    assert v.E(1.5) == 2 and v.I(2.5) == 2 and v.I(3.5) == 1


def test_integrate_product_against_riemann(rng):
    init = InitialState(50, 45, 5)
    x = EventPath(np.sort(rng.uniform(0, 10, 8)), 10.0)
    y = EventPath(np.sort(rng.uniform(0, 10, 6)), 10.0)
    v = CompartmentView(init, x, y)
    exact = integrate_product(v, lambda S, E, I: S * I)
    grid = np.linspace(0, 10, 400_001)
    mids = 0.5 * (grid[1:] + grid[:-1])
    S = 45 - np.searchsorted(x.times, mids, side="right")
    I = 5 + (45 - S) - np.searchsorted(y.times, mids, side="right")
    riemann = np.sum(S * I) * (grid[1] - grid[0])
    assert abs(exact - riemann) < 1e-3 * abs(exact)


def test_integrate_product_rejects_infeasible():
    init = InitialState(5, 4, 1)
    v = CompartmentView(init, EventPath([], 3.0), EventPath([1.0, 2.0], 3.0))
    assert not v.feasible()
    with pytest.raises(FeasibilityError):
        integrate_product(v, lambda S, E, I: I)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.01, 9.99), min_size=0, max_size=30, unique=True))
def test_count_matches_definition(ts):
    p = EventPath(sorted(ts), 10.0)
    for t in np.linspace(0, 10, 23):
        assert count_at(p, t) == sum(1 for s in ts if s <= t)
