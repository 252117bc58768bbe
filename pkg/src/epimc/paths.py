"""Counting paths and the compartment trajectories they induce.

A counting path on ``(start, T]`` is stored as its sorted jump times. The
path value at time ``t`` counts the jumps at or before ``t`` (right
continuity), so ``count_at(path, t_i)`` already includes jump ``i``.

Compartment trajectories are step functions of the merged jump times of the
transition processes, so every integral of a function of the compartment
counts is a finite sum over segments.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FeasibilityError, TieError

__all__ = [
    "EventPath",
    "InitialState",
    "CompartmentView",
    "count_at",
    "left_limit_at",
    "merge_events",
    "integrate_product",
]


@dataclass(frozen=True)
class EventPath:
    """Sorted jump times of one counting process on ``(start, T]``."""

    times: np.ndarray
    T: float
    start: float = 0.0

    def __post_init__(self):
        times = np.array(self.times, dtype=float).reshape(-1)
        if times.size:
            if np.any(np.diff(times) <= 0):
                raise ValueError("event times must be strictly increasing")
            if times[0] <= self.start or times[-1] > self.T:
                raise ValueError(
                    f"event times must lie in ({self.start}, {self.T}]"
                )
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "T", float(self.T))

    @property
    def n(self) -> int:
        return int(self.times.size)

    def __len__(self):
        return self.n

    @classmethod
    def empty(cls, T, start=0.0):
        return cls(np.empty(0), T, start)


@dataclass(frozen=True)
class InitialState:
    """Compartment sizes at the start of the observation window."""

    N: int
    S0: int
    I0: int
    E0: int = 0
    R0: int = 0

    def __post_init__(self):
        for name in ("N", "S0", "I0", "E0", "R0"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ValueError(f"{name} must be an integer")
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.N <= 0:
            raise ValueError("N must be positive")
        if self.S0 + self.E0 + self.I0 + self.R0 != self.N:
            raise ValueError("S0 + E0 + I0 + R0 must equal N")

    @classmethod
    def sir(cls, N, I0, R0=0):
        return cls(N=N, S0=N - I0 - R0, I0=I0, R0=R0)


def _check_time(path: EventPath, t: float, closed_left: bool):
    lo_ok = t >= path.start if closed_left else t > path.start
    if not (lo_ok and t <= path.T):
        raise ValueError(f"t={t} outside the path window [{path.start}, {path.T}]")


def count_at(path: EventPath, t: float) -> int:
    """Number of jumps at or before ``t``."""
    _check_time(path, t, closed_left=True)
    return int(np.searchsorted(path.times, t, side="right"))


def left_limit_at(path: EventPath, t: float) -> int:
    """Number of jumps strictly before ``t``."""
    _check_time(path, t, closed_left=False)
    return int(np.searchsorted(path.times, t, side="left"))


def merge_events(paths) -> list[tuple[float, str]]:
    """Globally sorted ``(time, label)`` sequence of several labelled paths.

    ``paths`` is a mapping ``label -> EventPath`` or a sequence of
    ``(label, EventPath)`` pairs. Raises TieError if two different paths
    share a jump time.
    """
    items = list(paths.items()) if hasattr(paths, "items") else list(paths)
    if not items:
        return []
    horizons = {p.T for _, p in items}
    if len(horizons) > 1:
        raise ValueError("all paths must share the same horizon")
    times = np.concatenate([p.times for _, p in items])
    codes = np.concatenate(
        [np.full(p.n, i, dtype=np.intp) for i, (_, p) in enumerate(items)]
    )
    order = np.argsort(times, kind="stable")
    times, codes = times[order], codes[order]
    dup = np.flatnonzero(np.diff(times) == 0)
    if dup.size:
        t = times[dup[0]]
        raise TieError(f"two processes jump at the same time t={t!r}")
    return [(float(t), items[c][0]) for t, c in zip(times, codes)]


@dataclass(frozen=True)
class CompartmentView:
    """S, E, I trajectories induced by transition paths and an initial state.

    With two paths (x, y) the model is SIR: ``S = S0 - x``, ``I = I0 + x - y``.
    With three paths (x, y, z) it is SEIR: ``E = E0 + x - y``,
    ``I = I0 + y - z``.
    """

    init: InitialState
    x: EventPath
    y: EventPath
    z: EventPath | None = None
    _seg: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labelled = [("x", self.x), ("y", self.y)]
        if self.z is not None:
            labelled.append(("z", self.z))
        else:
            if self.init.E0 != 0:
                raise ValueError("SIR view needs E0 == 0")
        if len({p.T for _, p in labelled}) > 1 or len({p.start for _, p in labelled}) > 1:
            raise ValueError("paths must share one window")
        events = merge_events(labelled)
        start, T = self.x.start, self.x.T
        ts = np.array([start] + [t for t, _ in events])
        dx = np.array([0] + [lab == "x" for _, lab in events], dtype=np.int64)
        dy = np.array([0] + [lab == "y" for _, lab in events], dtype=np.int64)
        dz = np.array([0] + [lab == "z" for _, lab in events], dtype=np.int64)
        xs, ys, zs = np.cumsum(dx), np.cumsum(dy), np.cumsum(dz)
        S = self.init.S0 - xs
        if self.z is None:
            E = np.zeros_like(S)
            I = self.init.I0 + xs - ys
        else:
            E = self.init.E0 + xs - ys
            I = self.init.I0 + ys - zs
        ends = np.append(ts[1:], T)
        object.__setattr__(self, "_seg", (ts, ends, S, E, I))

    @property
    def is_seir(self) -> bool:
        return self.z is not None

    def segments(self):
        """``(starts, ends, S, E, I)`` arrays, one entry per constant piece."""
        return self._seg

    def feasible(self) -> bool:
        _, _, S, E, I = self._seg
        return bool(S.min() >= 0 and E.min() >= 0 and I.min() >= 0)

    def _value(self, arr, t, left):
        ts = self._seg[0]
        if not (self.x.start <= t <= self.x.T):
            raise ValueError(f"t={t} outside the window")
        side = "left" if left else "right"
        idx = max(int(np.searchsorted(ts[1:], t, side=side)), 0)
        return int(arr[idx])

    def S(self, t):
        return self._value(self._seg[2], t, left=False)

    def E(self, t):
        return self._value(self._seg[3], t, left=False)

    def I(self, t):
        return self._value(self._seg[4], t, left=False)

    def S_left(self, t):
        return self._value(self._seg[2], t, left=True)

    def E_left(self, t):
        return self._value(self._seg[3], t, left=True)

    def I_left(self, t):
        return self._value(self._seg[4], t, left=True)


def integrate_product(
    view: CompartmentView,
    f: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray],
    T: float | None = None,
    lower: float | None = None,
) -> float:
    """Exact integral of ``f(S, E, I)`` over the window of ``view``.

    ``f`` is applied to the per-segment compartment arrays and must be
    vectorised. ``lower`` and ``T`` optionally restrict the integral to a
    sub-interval of the window.
    """
    if not view.feasible():
        raise FeasibilityError("a compartment count is negative")
    starts, ends, S, E, I = view.segments()
    if T is not None:
        if T > view.x.T or T < view.x.start:
            raise ValueError("T outside the window")
        ends = np.minimum(ends, T)
    if lower is not None:
        if lower < view.x.start or lower > view.x.T:
            raise ValueError("lower outside the window")
        starts = np.maximum(starts, lower)
    lengths = np.clip(ends - starts, 0.0, None)
    vals = np.broadcast_to(np.asarray(f(S, E, I), dtype=float), lengths.shape)
    return float(np.sum(vals * lengths))
