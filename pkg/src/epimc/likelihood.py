"""Exact path log-likelihoods for SIR/SEIR and their birth-process factors.

The joint SIR density of infection path ``x`` and recovery path ``y`` is::

    exp(-int beta S I / N) prod_x beta S(t-) I(t-) / N
  * exp(-int gamma I)      prod_y gamma I(t-)

Read as a function of one path with the other held fixed, each line is the
density of a time-inhomogeneous birth process, so the joint factorises into
``f_X(x | y) * f_Y(y | x)``. The SEIR joint splits into three such factors.
All functions work in log space and return ``-inf`` for configurations with
a jump at zero rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .paths import EventPath, InitialState

__all__ = [
    "SirParams",
    "SeirParams",
    "IntensitySpec",
    "sir_loglik",
    "seir_loglik",
    "birth_loglik",
    "sir_factors",
    "seir_factors",
    "sir_intensity_x",
    "sir_intensity_y",
    "seir_intensity_x",
    "seir_intensity_y",
    "seir_intensity_z",
]

NEG_INF = -math.inf


@dataclass(frozen=True)
class SirParams:
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("beta", "gamma"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative")

    @property
    def r0(self):
        return self.beta / self.gamma


@dataclass(frozen=True)
class SeirParams:
    beta1: float
    alpha: float
    gamma: float
    beta2: float | None = None
    change_point: float | None = None

    def __post_init__(self):
        for name in ("beta1", "alpha", "gamma", "beta2"):
            v = getattr(self, name)
            if v is None:
                continue
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative")
        if self.change_point is not None and self.beta2 is None:
            raise ValueError("a change point needs beta2")

    def beta_at(self, t):
        if self.change_point is None or t < self.change_point:
            return self.beta1
        return self.beta2


@dataclass(frozen=True)
class IntensitySpec:
    """Clamped intensity of a birth process, piecewise constant in time.

    On segment ``j`` of the window ``[t0, T]`` (segments are delimited by
    ``breaks``) and with own count ``k``, the intensity is::

        rate[j] * [offset[j] + slope*k]^+ * [cap + cap_slope*k]^+

    One clamped affine factor carries the dependence on the companion paths
    through ``offset``; the second, time-independent factor holds the
    susceptible depletion ``S0 - k`` of infection processes.
    """

    breaks: np.ndarray
    rate: np.ndarray
    offset: np.ndarray
    slope: float
    t0: float
    T: float
    cap: float = 1.0
    cap_slope: float = 0.0

    def __post_init__(self):
        breaks = np.ascontiguousarray(self.breaks, dtype=float).reshape(-1)
        rate = np.ascontiguousarray(
            np.broadcast_to(np.asarray(self.rate, dtype=float), (breaks.size + 1,))
        )
        offset = np.ascontiguousarray(
            np.broadcast_to(np.asarray(self.offset, dtype=float), (breaks.size + 1,))
        )
        if breaks.size and (np.any(np.diff(breaks) < 0) or breaks[0] < self.t0 or breaks[-1] > self.T):
            raise ValueError("breaks must be sorted and inside the window")
        if np.any(rate < 0):
            raise ValueError("rates must be non-negative")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "offset", offset)

    @property
    def args(self):
        return (
            self.breaks,
            self.rate,
            self.offset,
            float(self.slope),
            float(self.cap),
            float(self.cap_slope),
            float(self.t0),
            float(self.T),
        )

    def segment(self, t):
        return int(np.searchsorted(self.breaks, t, side="right"))

    def segment_bounds(self, j):
        lo = self.t0 if j == 0 else self.breaks[j - 1]
        hi = self.T if j == self.breaks.size else self.breaks[j]
        return lo, hi

    def value(self, k, t):
        """Intensity with own count ``k`` at time ``t``."""
        return self.segment_value(k, self.segment(t))

    def segment_value(self, k, j):
        a = self.offset[j] + self.slope * k
        c = self.cap + self.cap_slope * k
        if a <= 0 or c <= 0:
            return 0.0
        return float(self.rate[j] * a * c)


def _times(p):
    if isinstance(p, EventPath):
        return np.ascontiguousarray(p.times)
    return np.ascontiguousarray(p, dtype=float)


def birth_loglik(events, intensity: IntensitySpec) -> float:
    """``sum_i log lambda_{i-1}(t_i) - int lambda_{count(t)}(t) dt``."""
    return kernels.birth_loglik(_times(events), *intensity.args)


def _log_rate(rate, n):
    if n == 0:
        return 0.0
    if rate <= 0:
        return NEG_INF
    return n * math.log(rate)


def _window(paths):
    for p in paths:
        if isinstance(p, EventPath):
            return p.start, p.T
    raise ValueError("need at least one EventPath to fix the window")


def _check_shared(paths):
    ps = [p for p in paths if isinstance(p, EventPath)]
    if len({(p.start, p.T) for p in ps}) > 1:
        raise ValueError("paths must share one horizon")


def sir_loglik(x, y, init: InitialState, p: SirParams, window=None) -> float:
    """Joint log-likelihood of an SIR infection/recovery configuration.

    ``x`` and ``y`` are EventPaths (or raw time arrays together with
    ``window=(t0, T)``).
    """
    _check_shared((x, y))
    t0, T = window if window is not None else _window((x, y))
    xt, yt = _times(x), _times(y)
    int_SI, int_I, log_x, log_y, ok = kernels.sir_sweep(
        xt, yt, init.S0, init.I0, t0, T
    )
    if not ok:
        return NEG_INF
    nx, ny = xt.size, yt.size
    ll = (
        -p.beta * int_SI / init.N
        + _log_rate(p.beta / init.N, nx)
        + log_x
        - p.gamma * int_I
        + _log_rate(p.gamma, ny)
        + log_y
    )
    return ll


def sir_intensity_y(x, init: InitialState, gamma: float, window) -> IntensitySpec:
    """Recovery intensity ``[gamma (I0 + x(t) - k)]^+`` given infections."""
    t0, T = window
    xt = _times(x)
    return IntensitySpec(
        breaks=xt,
        rate=gamma,
        offset=init.I0 + np.arange(xt.size + 1, dtype=float),
        slope=-1.0,
        t0=t0,
        T=T,
    )


def sir_intensity_x(y, init: InitialState, beta: float, window) -> IntensitySpec:
    """Infection intensity ``[beta (S0 - k)(I0 + k - y(t)) / N]^+``."""
    t0, T = window
    yt = _times(y)
    return IntensitySpec(
        breaks=yt,
        rate=beta / init.N,
        offset=init.I0 - np.arange(yt.size + 1, dtype=float),
        slope=1.0,
        t0=t0,
        T=T,
        cap=float(init.S0),
        cap_slope=-1.0,
    )


def sir_factors(x, y, init: InitialState, p: SirParams, window=None):
    """``(log f_X(x|y), log f_Y(y|x))``; their sum is :func:`sir_loglik`."""
    _check_shared((x, y))
    window = window if window is not None else _window((x, y))
    fx = birth_loglik(x, sir_intensity_x(y, init, p.beta, window))
    fy = birth_loglik(y, sir_intensity_y(x, init, p.gamma, window))
    return fx, fy


def _beta_pieces(p: SeirParams, window):
    t0, T = window
    cp = p.change_point
    if cp is None or cp >= T:
        return T, p.beta1, p.beta1 if p.beta2 is None else p.beta2
    return max(cp, t0), p.beta1, p.beta2


def seir_loglik(x, y, z, init: InitialState, p: SeirParams, window=None) -> float:
    """Joint log-likelihood of an SEIR configuration with optional change point."""
    _check_shared((x, y, z))
    t0, T = window if window is not None else _window((x, y, z))
    xt, yt, zt = _times(x), _times(y), _times(z)
    cp, b1, b2 = _beta_pieces(p, (t0, T))
    int1, int2, int_E, int_I, nx1, log_x, log_y, log_z, ok = kernels.seir_sweep(
        xt, yt, zt, init.S0, init.E0, init.I0, t0, T, cp
    )
    if not ok:
        return NEG_INF
    nx2 = xt.size - nx1
    return (
        -(b1 * int1 + b2 * int2) / init.N
        + _log_rate(b1 / init.N, nx1)
        + _log_rate(b2 / init.N, nx2)
        + log_x
        - p.alpha * int_E
        + _log_rate(p.alpha, yt.size)
        + log_y
        - p.gamma * int_I
        + _log_rate(p.gamma, zt.size)
        + log_z
    )


def _merge_labelled(*arrays):
    """Sorted union of jump times with, per segment, the running count of each input."""
    times = np.concatenate(arrays) if arrays else np.empty(0)
    labels = np.concatenate([np.full(a.size, i) for i, a in enumerate(arrays)])
    order = np.argsort(times, kind="stable")
    times, labels = times[order], labels[order]
    counts = []
    for i in range(len(arrays)):
        counts.append(np.concatenate([[0], np.cumsum(labels == i)]))
    return times, counts


def seir_intensity_x(y, z, init: InitialState, p: SeirParams, window) -> IntensitySpec:
    """Exposure intensity ``beta(t) (S0 - k) I(t) / N`` given y and z."""
    t0, T = window
    yt, zt = _times(y), _times(z)
    cp, b1, b2 = _beta_pieces(p, window)
    cpa = np.array([cp]) if cp < T else np.empty(0)
    times, (cy, cz, ccp) = _merge_labelled(yt, zt, cpa)
    I = init.I0 + cy - cz
    beta = np.where(ccp > 0, b2, b1)
    return IntensitySpec(
        breaks=times,
        rate=beta / init.N,
        offset=I.astype(float),
        slope=0.0,
        t0=t0,
        T=T,
        cap=float(init.S0),
        cap_slope=-1.0,
    )


def seir_intensity_y(x, init: InitialState, p: SeirParams, window) -> IntensitySpec:
    """Onset intensity ``[alpha (E0 + x(t) - k)]^+`` given exposures."""
    t0, T = window
    xt = _times(x)
    return IntensitySpec(
        breaks=xt,
        rate=p.alpha,
        offset=init.E0 + np.arange(xt.size + 1, dtype=float),
        slope=-1.0,
        t0=t0,
        T=T,
    )


def seir_intensity_z(y, init: InitialState, p: SeirParams, window) -> IntensitySpec:
    """Removal intensity ``[gamma (I0 + y(t) - k)]^+`` given onsets."""
    t0, T = window
    yt = _times(y)
    return IntensitySpec(
        breaks=yt,
        rate=p.gamma,
        offset=init.I0 + np.arange(yt.size + 1, dtype=float),
        slope=-1.0,
        t0=t0,
        T=T,
    )


def seir_factors(x, y, z, init: InitialState, p: SeirParams, window=None):
    """``(log f_X(x|y,z), log f_Y(y|x,z), log f_Z(z|x,y))``."""
    _check_shared((x, y, z))
    window = window if window is not None else _window((x, y, z))
    fx = birth_loglik(x, seir_intensity_x(y, z, init, p, window))
    fy = birth_loglik(y, seir_intensity_y(x, init, p, window))
    fz = birth_loglik(z, seir_intensity_z(y, init, p, window))
    return fx, fy, fz
