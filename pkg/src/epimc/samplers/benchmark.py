"""Data-augmentation MCMC with reversible-jump updates for latent paths.

Each iteration is a systematic Gibbs scan: conjugate rate draws, the latent
first-infection time when configured, single-site moves of latent times whose
count is known, and one add/remove/move step per process of unknown size.
"""
from __future__ import annotations

import math

import numpy as np

from ..simulate import as_generator
from .state import (
    AugmentedState,
    ChainTrace,
    Problem,
    draw_rate_conditional,
    initialize,
    mh_move_event_time,
    single_site_sweep,
    trace_row,
    update_params,
    update_t0,
)

__all__ = [
    "ADD",
    "REMOVE",
    "MOVE",
    "rj_step",
    "run_benchmark_chain",
    "draw_rate_conditional",
    "mh_move_event_time",
]

ADD, REMOVE, MOVE = 0, 1, 2


def _accept(state, problem, name, new, log_extra, rng):
    paths = dict(state.paths)
    paths[name] = new
    ll = problem.model.loglik(paths, state.params, state.window)
    if not np.isfinite(ll):
        return False
    if math.log(rng.random()) < ll - state.loglik + log_extra:
        state.paths = paths
        state.loglik = ll
        return True
    return False


def rj_step(state: AugmentedState, problem: Problem, name, rng, move=None):
    """One add/remove/move update of a latent process of unknown size.

    Returns ``(move, accepted)``. New times are uniform on the window, so the
    add and remove ratios carry ``|window| / (n + 1)`` and ``n / |window|``.
    """
    arr = state.paths[name]
    n = arr.size
    t0, T = state.window
    length = T - t0
    if move is None:
        move = int(rng.integers(3))
    if move == ADD:
        t = rng.uniform(t0, T)
        if t <= t0 or np.any(arr == t):
            return move, False
        i = int(np.searchsorted(arr, t))
        new = np.insert(arr, i, t)
        return move, _accept(state, problem, name, new, math.log(length / (n + 1)), rng)
    if n == 0:
        return move, False
    i = int(rng.integers(n))
    if move == REMOVE:
        new = np.delete(arr, i)
        return move, _accept(state, problem, name, new, math.log(n / length), rng)
    if move == MOVE:
        t = rng.uniform(t0, T)
        if t <= t0:
            return move, False
        new = np.delete(arr, i)
        if np.any(new == t):
            return move, False
        new = np.insert(new, int(np.searchsorted(new, t)), t)
        return move, _accept(state, problem, name, new, 0.0, rng)
    raise ValueError(f"unknown move {move}")


def run_benchmark_chain(problem: Problem, iters: int, rng, state: AugmentedState | None = None):
    """Run the reversible-jump sampler; returns ``(ChainTrace, final state)``."""
    if iters < 0:
        raise ValueError("iters must be non-negative")
    g = as_generator(rng)
    if state is None:
        state = initialize(problem, g)
    trace = ChainTrace()
    unobserved = problem.unobserved
    for it in range(iters):
        update_params(state, problem, g)
        if problem.theta0 is not None:
            update_t0(state, problem, g)
        acc = single_site_sweep(state, problem, g)
        moves = {}
        for name in unobserved:
            moves[name], ok = rj_step(state, problem, name, g)
            acc[name] = float(ok)
        trace.append(trace_row(it, state, problem, acc, moves))
    return trace, state
