"""What is known about each transition process."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .paths import EventPath, InitialState

__all__ = [
    "FullPath",
    "DailyCounts",
    "EndpointCount",
    "Unobserved",
    "Observation",
]


@dataclass(frozen=True)
class FullPath:
    """Every jump time is observed."""

    path: EventPath


@dataclass(frozen=True)
class DailyCounts:
    """Number of jumps in each reporting interval ``(start + d L, start + (d+1) L]``."""

    counts: np.ndarray
    day_length: float = 1.0
    start: float = 0.0

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.size == 0:
            raise ValueError("daily counts must be a non-empty 1-d sequence")
        if np.any(counts < 0) or np.any(counts != np.round(counts)):
            raise ValueError("daily counts must be non-negative integers")
        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        if self.day_length <= 0:
            raise ValueError("day_length must be positive")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def end(self) -> float:
        return self.start + self.counts.size * self.day_length

    def day_bounds(self, d):
        lo = self.start + d * self.day_length
        return lo, lo + self.day_length

    def day_of(self, t):
        """Index of the reporting interval containing ``t`` (right-closed)."""
        return int(np.ceil((t - self.start) / self.day_length)) - 1


@dataclass(frozen=True)
class EndpointCount:
    """Only the number of jumps on the whole window is known."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("endpoint count must be non-negative")


@dataclass(frozen=True)
class Unobserved:
    """Nothing is known; the number of jumps is latent too."""


@dataclass(frozen=True)
class Observation:
    """Per-process observations plus the initial state and window.

    ``start`` is the window start; ``None`` means the start is the latent
    time of the first infection (as for the smallpox data).
    """

    init: InitialState
    T: float
    processes: dict = field(default_factory=dict)
    start: float | None = 0.0

    def __post_init__(self):
        for name, obs in self.processes.items():
            if isinstance(obs, FullPath) and obs.path.T != self.T:
                raise ValueError(f"process {name}: horizon {obs.path.T} != {self.T}")
            if isinstance(obs, DailyCounts) and not np.isclose(obs.end, self.T):
                raise ValueError(f"process {name}: daily counts end at {obs.end}, not {self.T}")

    def kind(self, name):
        return self.processes.get(name, Unobserved())
