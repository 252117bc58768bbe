"""The compiled kernels and the pure-Python fallback must agree bit for bit."""
import numpy as np
import pytest

from conftest import random_intensity
from epimc import _kernels_py as pyk
from epimc import kernels
from epimc.simulate import RngStream, gillespie_seir, gillespie_sir
from epimc.likelihood import SeirParams, SirParams
from epimc.paths import InitialState

try:
    from epimc import _kernels as ck
except ImportError:  # pragma: no cover - extension not built
    ck = None

needs_ext = pytest.mark.skipif(ck is None, reason="compiled extension not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
@pytest.mark.parametrize("seed", range(15))
def test_sweeps_agree(seed):
    g = RngStream(seed).generator()
    init = InitialState.sir(200, 3)
    x, y = gillespie_sir(init, SirParams(1.2, 0.4), 6.0, g)
    a = ck.sir_sweep(x.times, y.times, init.S0, init.I0, 0.0, 6.0)
    b = pyk.sir_sweep(x.times, y.times, init.S0, init.I0, 0.0, 6.0)
    assert a == b
    init = InitialState(200, 196, 2, E0=2)
    x, y, z = gillespie_seir(init, SeirParams(1.5, 0.5, 0.3, 0.2, 3.0), 6.0, g)
    a = ck.seir_sweep(x.times, y.times, z.times, 196, 2, 2, 0.0, 6.0, 3.0)
    b = pyk.seir_sweep(x.times, y.times, z.times, 196, 2, 2, 0.0, 6.0, 3.0)
    assert a == b


@needs_ext
@pytest.mark.parametrize("seed", range(30))
def test_birth_kernels_agree(seed):
    g = RngStream(seed, 1).generator()
    spec = random_intensity(g)
    u = g.standard_exponential(64)
    ta, ua, da = ck.coords_to_path(u, *spec.args)
    tb, ub, db = pyk.coords_to_path(u, *spec.args)
    assert np.array_equal(ta, tb) and ua == ub and da == db
    assert ck.birth_loglik(ta, *spec.args) == pyk.birth_loglik(tb, *spec.args)
    assert np.array_equal(ck.path_to_coords(ta, *spec.args), pyk.path_to_coords(tb, *spec.args))


@pytest.mark.parametrize("mod", [pyk] + ([ck] if ck is not None else []))
def test_out_of_window_events_rejected(mod):
    with pytest.raises(ValueError):
        mod.sir_sweep(np.array([7.0]), np.empty(0), 5, 1, 0.0, 6.0)
