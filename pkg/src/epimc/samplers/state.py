"""Chain state, traces, and the update steps shared by both samplers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..observation import DailyCounts, EndpointCount, FullPath, Observation, Unobserved
from .models import SEIRModel, SIRModel

__all__ = [
    "GammaPrior",
    "Problem",
    "AugmentedState",
    "ChainTrace",
    "draw_rate_conditional",
    "draw_t0",
    "initialize",
    "update_params",
    "update_t0",
    "mh_move_event_time",
    "single_site_sweep",
    "trace_row",
]

MAX_INIT_TRIES = 100


@dataclass(frozen=True)
class GammaPrior:
    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise ValueError("Gamma prior needs positive shape and rate")

    @property
    def mean(self):
        return self.shape / self.rate


@dataclass
class Problem:
    """Model, data and priors for one inference run.

    ``theta0`` switches on the latent first-infection time: the window then
    starts at ``t0 < first event`` with prior ``theta0 exp(theta0 t0)`` on
    ``t0 < obs_origin``.
    """

    model: SIRModel | SEIRModel
    observation: Observation
    priors: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)
    theta0: float | None = None
    obs_origin: float = 0.0
    init_counts: dict = field(default_factory=dict)
    init_params: dict = field(default_factory=dict)
    init_t0: float | None = None

    def __post_init__(self):
        for name in self.model.param_names:
            if name not in self.fixed and name not in self.priors:
                raise ValueError(f"parameter {name} needs a prior or a fixed value")
        if self.theta0 is None and self.observation.start is None:
            raise ValueError("latent window start needs theta0")
        if self.theta0 is not None and getattr(self.model, "kind", None) != "sir":
            raise ValueError("latent first-infection time is only supported for SIR")

    @property
    def free_params(self):
        return [n for n in self.model.param_names if n not in self.fixed]

    def obs(self, name):
        return self.observation.kind(name)

    def latent(self, kind):
        return [n for n in self.model.processes if isinstance(self.obs(n), kind)]

    @property
    def unobserved(self):
        return self.latent(Unobserved)


@dataclass
class AugmentedState:
    params: dict
    paths: dict
    t0: float
    T: float
    loglik: float = -math.inf

    @property
    def window(self):
        return (self.t0, self.T)

    def counts(self):
        return {n: int(p.size) for n, p in self.paths.items()}

    def copy(self):
        return AugmentedState(
            dict(self.params), {k: v.copy() for k, v in self.paths.items()}, self.t0, self.T, self.loglik
        )


class ChainTrace:
    """Column store with one row per iteration."""

    def __init__(self, columns=None):
        self.columns = {c: [] for c in (columns or [])}

    def append(self, row: dict):
        if not self.columns:
            self.columns = {c: [] for c in row}
        if set(row) != set(self.columns):
            raise ValueError("trace row has different columns")
        for k, v in row.items():
            self.columns[k].append(v)

    def __len__(self):
        if not self.columns:
            return 0
        return len(next(iter(self.columns.values())))

    def __getitem__(self, name):
        return np.asarray(self.columns[name], dtype=float)

    def __contains__(self, name):
        return name in self.columns

    @property
    def names(self):
        return list(self.columns)

    def as_array(self):
        return np.column_stack([self[c] for c in self.columns])


def draw_rate_conditional(n_events, exposure, prior: GammaPrior, rng):
    """One draw from ``Gamma(n_events + a, exposure + b)`` (rate parametrisation)."""
    if exposure < 0:
        raise ValueError("exposure must be non-negative")
    rate = exposure + prior.rate
    if rate <= 0:
        raise ValueError("posterior rate must be positive")
    return float(rng.gamma(n_events + prior.shape, 1.0 / rate))


def draw_t0(theta0, p, S0, N, t1, rng, I0=1):
    """First-infection time from ``theta exp(theta (t0 - t1))`` on ``t0 < t1``.

    ``theta = theta0 + I0 (gamma + beta S0 / N)``; ``p`` is a SirParams or
    a mapping with ``beta`` and ``gamma``.
    """
    beta = p["beta"] if isinstance(p, dict) else p.beta
    gamma = p["gamma"] if isinstance(p, dict) else p.gamma
    theta = theta0 + I0 * (gamma + beta * S0 / N)
    if not theta > 0:
        raise ValueError("theta must be positive")
    return t1 + math.log(rng.random()) / theta


def _sorted_insert(arr, t):
    i = int(np.searchsorted(arr, t))
    return np.insert(arr, i, t)


def _uniform_path(n, lo, hi, rng):
    return np.sort(rng.uniform(lo, hi, size=n))


def _daily_path(obs: DailyCounts, rng, stagger=None):
    parts = []
    for d, c in enumerate(obs.counts):
        if c == 0:
            continue
        lo, hi = obs.day_bounds(d)
        if stagger is not None:
            pos, npos = stagger
            width = (hi - lo) / npos
            lo, hi = lo + pos * width, lo + (pos + 1) * width
        parts.append(rng.uniform(lo, hi, size=int(c)))
    if not parts:
        return np.empty(0)
    return np.sort(np.concatenate(parts))


def _initial_params(problem: Problem, rng):
    vals = dict(problem.fixed)
    for name in problem.free_params:
        if name in problem.init_params:
            vals[name] = float(problem.init_params[name])
        else:
            vals[name] = problem.priors[name].mean
    return vals


def _draw_latent(problem, name, window, rng, stagger):
    obs = problem.obs(name)
    t0, T = window
    if isinstance(obs, FullPath):
        return np.array(obs.path.times, dtype=float)
    if isinstance(obs, EndpointCount):
        return _uniform_path(obs.n, t0, T, rng)
    if isinstance(obs, DailyCounts):
        if stagger:
            pos = problem.model.processes.index(name)
            return _daily_path(obs, rng, (pos, len(problem.model.processes)))
        return _daily_path(obs, rng)
    lo, hi = problem.init_counts.get(name, (0, 0))
    n = int(rng.integers(lo, hi + 1))
    return _uniform_path(n, t0, T, rng)


def _gap_fill(problem, paths, window, rng):
    """Put one free feeder event in the gap before each event that needs it.

    For SIR with observed removals this is one infection between
    consecutive removals, which keeps ``I >= I0`` throughout.
    """
    free = set(problem.unobserved)
    t0, _ = window
    fixed = np.sort(np.concatenate([paths[n] for n in paths if n not in free] + [np.empty(0)]))
    for proc, (_, feeder) in problem.model.feeders.items():
        if proc in free or feeder not in free:
            continue
        times = paths[proc]
        prev_idx = np.searchsorted(fixed, times, side="left") - 1
        lo = np.where(prev_idx >= 0, fixed[np.maximum(prev_idx, 0)], t0)
        new = rng.uniform(lo, times)
        new = new[new > lo]
        paths[feeder] = np.unique(np.concatenate([paths[feeder], new]))
    return paths


def _repair(problem, paths, window, rng, max_steps):
    """Make a configuration feasible by adding/removing free events."""
    model = problem.model
    free = set(problem.unobserved)
    drains = getattr(model, "drains", {})
    t0, _ = window
    for _ in range(max_steps):
        blocked = model.blocking_jump(paths, window)
        if blocked is None:
            return paths
        proc, t = blocked
        comp, feeder = model.feeders.get(proc, (None, None))
        drain = drains.get(comp)
        if feeder is not None and feeder in free:
            prev = max([t0] + [float(p[p < t].max()) for p in paths.values() if np.any(p < t)])
            paths[feeder] = _sorted_insert(paths[feeder], rng.uniform(prev, t))
        elif drain is not None and drain in free and np.any(paths[drain] < t):
            arr = paths[drain]
            paths[drain] = np.delete(arr, int(np.flatnonzero(arr < t)[-1]))
        elif proc in free:
            arr = paths[proc]
            paths[proc] = np.delete(arr, int(np.flatnonzero(arr == t)[0]))
        else:
            return None
    return None


def _window_start(problem, rng):
    obs = problem.observation
    if problem.theta0 is None:
        return obs.start
    if problem.init_t0 is not None:
        return problem.init_t0
    first = min(
        (float(o.path.times[0]) for o in obs.processes.values() if isinstance(o, FullPath) and o.path.n),
        default=problem.obs_origin,
    )
    return min(first, problem.obs_origin) - rng.exponential(1.0 / problem.theta0)


def initialize(problem: Problem, rng) -> AugmentedState:
    """Feasible starting state.

    The first half of the attempts draws latent counts uniformly on the
    configured range with uniform times. The second half builds a start
    constructively (staggered daily times, one latent feeder event before
    each observed event needing it) and repairs what remains by adding or
    removing unobserved events.
    """
    params = _initial_params(problem, rng)
    T = problem.observation.T
    for attempt in range(MAX_INIT_TRIES):
        window = (_window_start(problem, rng), T)
        constructive = attempt >= MAX_INIT_TRIES // 2
        paths = {n: _draw_latent(problem, n, window, rng, constructive) for n in problem.model.processes}
        if constructive:
            for n in problem.unobserved:
                paths[n] = np.empty(0)
            paths = _gap_fill(problem, paths, window, rng)
        ll = problem.model.loglik(paths, params, window)
        if not np.isfinite(ll) and constructive:
            budget = 10 * (sum(p.size for p in paths.values()) + 10)
            fixed = _repair(problem, paths, window, rng, budget)
            if fixed is not None:
                paths = fixed
                ll = problem.model.loglik(paths, params, window)
        if np.isfinite(ll):
            return AugmentedState(params, paths, window[0], T, ll)
    raise RuntimeError("could not find a feasible initial configuration")


def update_params(state: AugmentedState, problem: Problem, rng):
    """Conjugate Gamma draws for every free rate, then refresh the log-likelihood."""
    if not problem.free_params:
        return
    stats = problem.model.rate_stats(state.paths, state.window)
    for name in problem.free_params:
        n, exposure = stats[name]
        state.params[name] = draw_rate_conditional(n, exposure, problem.priors[name], rng)
    state.loglik = problem.model.loglik(state.paths, state.params, state.window)


def update_t0(state: AugmentedState, problem: Problem, rng):
    """Exact Gibbs draw of the latent first-infection time."""
    firsts = [p[0] for p in state.paths.values() if p.size]
    t1 = min(firsts + [problem.obs_origin])
    init = problem.model.init
    state.t0 = draw_t0(problem.theta0, state.params, init.S0, init.N, t1, rng, I0=init.I0)
    state.loglik = problem.model.loglik(state.paths, state.params, state.window)


def _proposal_interval(problem, state, name, t):
    obs = problem.obs(name)
    if isinstance(obs, DailyCounts):
        return obs.day_bounds(obs.day_of(t))
    return state.window


def mh_move_event_time(state: AugmentedState, problem: Problem, name, index, rng):
    """Redraw one latent jump time uniformly on its allowed interval.

    The interval is the window for endpoint-count processes and the reporting
    day for daily counts. Returns True on acceptance.
    """
    arr = state.paths[name]
    lo, hi = _proposal_interval(problem, state, name, arr[index])
    t_new = rng.uniform(lo, hi)
    if t_new <= lo:
        return False
    moved = np.delete(arr, index)
    moved = _sorted_insert(moved, t_new)
    paths = dict(state.paths)
    paths[name] = moved
    ll = problem.model.loglik(paths, state.params, state.window)
    if math.log(rng.random()) < ll - state.loglik:
        state.paths = paths
        state.loglik = ll
        return True
    return False


def single_site_sweep(state: AugmentedState, problem: Problem, rng):
    """One single-site move per latent jump of every fixed-count process.

    Returns ``{process: fraction accepted}``.
    """
    out = {}
    for name in problem.latent((EndpointCount, DailyCounts)):
        n = state.paths[name].size
        acc = 0
        for _ in range(n):
            acc += mh_move_event_time(state, problem, name, int(rng.integers(n)), rng)
        out[name] = acc / n if n else 0.0
    return out


def trace_row(it, state: AugmentedState, problem: Problem, acc: dict, moves: dict | None = None):
    """One ChainTrace record; ``acc`` maps process to acceptance indicator or rate."""
    row = {"iteration": it}
    for name in problem.model.param_names:
        row[name] = state.params[name]
    for name, arr in state.paths.items():
        row[f"n_{name}"] = arr.size
    if problem.theta0 is not None:
        row["t0"] = state.t0
    row["loglik"] = state.loglik
    for name in problem.model.processes:
        if isinstance(problem.obs(name), FullPath):
            continue
        row[f"acc_{name}"] = float(acc.get(name, math.nan))
        if moves is not None and name in problem.unobserved:
            row[f"move_{name}"] = moves.get(name, -1)
    return row
