"""Forward simulation and birth-process sampling by inverse integrated intensity.

A birth path with intensity ``lambda_k(t)`` is the image of i.i.d. unit
exponentials ``u_0, u_1, ...``: the waiting time after the ``i``-th jump solves
``Lambda_i(w) = u_i``. :func:`path_to_coords` inverts that map, which is what
the partial-refresh proposal in :mod:`epimc.samplers.birthprop` relies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .likelihood import IntensitySpec, SeirParams, SirParams
from .paths import EventPath, InitialState

__all__ = [
    "RngStream",
    "ExpCoords",
    "as_generator",
    "gillespie_sir",
    "gillespie_seir",
    "lambda_integral",
    "lambda_inverse",
    "sample_birth_path",
    "path_to_coords",
    "coords_to_path",
]


@dataclass(frozen=True)
class RngStream:
    """Counter-based (Philox) random stream keyed by ``(seed, stream)``."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"cannot make a generator from {type(rng).__name__}")


@dataclass(frozen=True)
class ExpCoords:
    """Unit-exponential coordinates of a birth path.

    ``u[:-1]`` are the exact coordinates of the observed waiting times;
    ``u[-1]`` is the mass between the last jump and ``T``, a lower bound on
    the censored coordinate.
    """

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.ndim != 1 or u.size < 1:
            raise ValueError("need at least the censored coordinate")
        if np.any(u[:-1] <= 0) or u[-1] < 0:
            raise ValueError("coordinates must be positive")
        object.__setattr__(self, "u", u)

    @property
    def n(self):
        return self.u.size - 1

    @property
    def waiting(self):
        return self.u[:-1]

    @property
    def censored(self):
        return float(self.u[-1])


def gillespie_sir(init: InitialState, p: SirParams, T: float, rng, max_events=None):
    """Exact CTMC draw of the SIR infection and recovery paths on ``(0, T]``."""
    g = as_generator(rng)
    S, I = init.S0, init.I0
    t = 0.0
    xs, ys = [], []
    N = init.N
    while max_events is None or len(xs) + len(ys) < max_events:
        rx = p.beta * S * I / N
        ry = p.gamma * I
        total = rx + ry
        if total <= 0:
            break
        t += g.standard_exponential() / total
        if t > T:
            break
        if g.random() * total < rx:
            xs.append(t)
            S -= 1
            I += 1
        else:
            ys.append(t)
            I -= 1
    return EventPath(xs, T), EventPath(ys, T)


def gillespie_seir(init: InitialState, p: SeirParams, T: float, rng):
    """Exact CTMC draw of SEIR exposure, onset and removal paths on ``(0, T]``."""
    g = as_generator(rng)
    S, E, I = init.S0, init.E0, init.I0
    N = init.N
    t = 0.0
    xs, ys, zs = [], [], []
    cp = p.change_point
    while True:
        beta = p.beta_at(t)
        rx = beta * S * I / N
        ry = p.alpha * E
        rz = p.gamma * I
        total = rx + ry + rz
        if total <= 0:
            break
        tn = t + g.standard_exponential() / total
        if cp is not None and t < cp < tn and p.beta2 != p.beta1:
            # rates change at the change point; restart the clock there
            t = cp
            continue
        t = tn
        if t > T:
            break
        r = g.random() * total
        if r < rx:
            xs.append(t)
            S -= 1
            E += 1
        elif r < rx + ry:
            ys.append(t)
            E -= 1
            I += 1
        else:
            zs.append(t)
            I -= 1
    return EventPath(xs, T), EventPath(ys, T), EventPath(zs, T)


def lambda_integral(intensity: IntensitySpec, k: int, start: float, stop: float) -> float:
    """``int_start^stop lambda_k(s) ds`` with the own count frozen at ``k``."""
    if stop < start:
        raise ValueError("stop < start")
    total = 0.0
    j = intensity.segment(start)
    t = start
    while t < stop:
        lo, hi = intensity.segment_bounds(j)
        end = min(hi, stop)
        total += intensity.segment_value(k, j) * (end - t)
        t = end
        if j == intensity.breaks.size:
            break
        j += 1
    return total


def lambda_inverse(intensity: IntensitySpec, k: int, start: float, u: float) -> float:
    """Smallest waiting time ``w`` with ``Lambda_k(start, start + w) = u``.

    Returns ``inf`` when the mass left before ``T`` is below ``u``.
    """
    if not u > 0:
        raise ValueError("u must be positive")
    j = intensity.segment(start)
    t = start
    rem = u
    while True:
        _, hi = intensity.segment_bounds(j)
        lam = intensity.segment_value(k, j)
        mass = lam * (hi - t)
        if lam > 0 and mass >= rem:
            return min(t + rem / lam, hi) - start
        rem -= mass
        t = hi
        if j == intensity.breaks.size:
            return math.inf
        j += 1


def coords_to_path(u, intensity: IntensitySpec, rng=None, chunk=16, max_events=10_000_000):
    """Birth times generated by coordinates ``u``, extended with fresh draws.

    Returns ``(times, u_used)`` where ``u_used`` holds every coordinate
    consumed, including the one that crossed ``T`` and any fresh exponentials
    drawn from ``rng`` when ``u`` ran out. Raises RuntimeError past
    ``max_events`` jumps (an explosive intensity).
    """
    u = np.ascontiguousarray(u, dtype=float)
    while True:
        times, used, done = kernels.coords_to_path(u, *intensity.args)
        if done:
            return times, u[:used]
        if rng is None:
            raise ValueError("coordinates exhausted before T and no rng given")
        if u.size > max_events:
            raise RuntimeError(f"more than {max_events} jumps before T")
        g = as_generator(rng)
        extra = g.standard_exponential(max(chunk, u.size))
        u = np.concatenate([u, extra])
        rng = g


def sample_birth_path(intensity: IntensitySpec, T: float | None = None, rng=None):
    """Exact draw from the birth process with the given intensity.

    Returns ``(EventPath, ExpCoords)``; the coordinates are those of the
    returned path (censored entry is the accumulated tail mass).
    """
    if T is not None and not math.isclose(T, intensity.T):
        raise ValueError("T disagrees with the intensity window")
    g = as_generator(rng)
    times, _ = coords_to_path(np.empty(0), intensity, g)
    path = EventPath(times, intensity.T, intensity.t0)
    return path, path_to_coords(path, intensity)


def path_to_coords(events, intensity: IntensitySpec) -> ExpCoords:
    """Exponential coordinates of an existing birth path."""
    t = events.times if isinstance(events, EventPath) else events
    u = kernels.path_to_coords(np.ascontiguousarray(t, dtype=float), *intensity.args)
    return ExpCoords(u)
