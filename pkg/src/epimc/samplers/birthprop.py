"""MCMC with birth-process proposals for latent paths.

A latent path ``p`` is proposed from its own birth-process factor
``f_P(. | others)``. The proposal density cancels against the same factor in
the joint, so the acceptance ratio is the product of the remaining factors
whose intensity depends on ``p``.

Partial refreshes work on the unit-exponential coordinates of ``p``: a subset
of them is redrawn and the path rebuilt with the inverse integrated
intensity. The last coordinate of a path is censored at ``T``; it is
completed with a fresh exponential beyond the observed mass, and coordinates
past it are fresh draws, which is exact by memorylessness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..simulate import as_generator, coords_to_path, path_to_coords
from .state import (
    AugmentedState,
    ChainTrace,
    Problem,
    draw_t0,
    initialize,
    single_site_sweep,
    trace_row,
    update_params,
    update_t0,
)

__all__ = [
    "NewSamplerConfig",
    "complementary_logratio",
    "full_proposal",
    "partial_proposal",
    "propose_full_path",
    "propose_partial_path",
    "select_subset",
    "draw_t0",
    "run_new_chain",
]

SUBSET_RULES = ("fixed", "bernoulli")


@dataclass
class NewSamplerConfig:
    """Settings of the birth-proposal sampler.

    ``subset="fixed"`` redraws ``max(1, round(c (n+1)))`` coordinates chosen
    uniformly; ``"bernoulli"`` redraws each coordinate independently with
    probability ``c``. ``tune_target`` switches on a Robbins-Monro update of
    ``logit(c)`` during burn-in only.
    """

    c: float = 1.0
    targets: tuple | None = None
    iters: int = 1000
    burn_in: int = 0
    seed: int = 0
    subset: str = "bernoulli"
    tune_target: float | None = None
    c_per_target: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in [self.c, *self.c_per_target.values()]:
            if not (0 < v <= 1):
                raise ValueError("update fraction c must lie in (0, 1]")
        if self.subset not in SUBSET_RULES:
            raise ValueError(f"subset must be one of {SUBSET_RULES}")
        if self.iters < 0 or self.burn_in < 0:
            raise ValueError("iters and burn_in must be non-negative")
        if self.tune_target is not None and not (0 < self.tune_target < 1):
            raise ValueError("tune_target must lie in (0, 1)")


def complementary_logratio(problem: Problem, name, paths_old, paths_new, params, window):
    """Log of the product of factors that depend on ``name``, new over old."""
    model = problem.model
    out = 0.0
    for dep in model.dependents[name]:
        new = model.factor(dep, paths_new, params, window)
        if not np.isfinite(new):
            return -math.inf
        out += new - model.factor(dep, paths_old, params, window)
    return out


def select_subset(n_coords, c, rule, rng):
    """Boolean mask of coordinates to redraw."""
    if rule == "fixed":
        m = max(1, int(round(c * n_coords)))
        mask = np.zeros(n_coords, dtype=bool)
        mask[rng.choice(n_coords, size=m, replace=False)] = True
        return mask
    if rule == "bernoulli":
        return rng.random(n_coords) < c
    raise ValueError(f"unknown subset rule {rule}")


def _finish(state, problem, name, new_times, rng):
    paths = dict(state.paths)
    paths[name] = new_times
    logr = complementary_logratio(problem, name, state.paths, paths, state.params, state.window)
    if logr == -math.inf:
        return False
    if logr >= 0 or math.log(rng.random()) < logr:
        state.paths = paths
        state.loglik = problem.model.loglik(paths, state.params, state.window)
        return True
    return False


def full_proposal(state: AugmentedState, problem: Problem, name, rng):
    """Fresh path drawn from the birth-process factor of ``name``."""
    intensity = problem.model.intensity(name, state.paths, state.params, state.window)
    times, _ = coords_to_path(np.empty(0), intensity, rng)
    return times


def partial_proposal(state: AugmentedState, problem: Problem, name, c, rng, subset="bernoulli"):
    """Path rebuilt after redrawing a random subset of its exponential coordinates."""
    if not (0 < c <= 1):
        raise ValueError("update fraction c must lie in (0, 1]")
    intensity = problem.model.intensity(name, state.paths, state.params, state.window)
    u = path_to_coords(state.paths[name], intensity).u.copy()
    # complete the censored coordinate from its conditional law
    u[-1] += rng.standard_exponential()
    mask = select_subset(u.size, c, subset, rng)
    u[mask] = rng.standard_exponential(int(mask.sum()))
    times, _ = coords_to_path(u, intensity, rng)
    return times


def propose_full_path(state: AugmentedState, problem: Problem, name, rng):
    """Independence proposal of the whole path from its birth-process factor."""
    return _finish(state, problem, name, full_proposal(state, problem, name, rng), rng)


def propose_partial_path(state: AugmentedState, problem: Problem, name, c, rng, subset="bernoulli"):
    """Redraw a random subset of the exponential coordinates and rebuild the path."""
    times = partial_proposal(state, problem, name, c, rng, subset)
    return _finish(state, problem, name, times, rng)


def _logit(p):
    return math.log(p / (1 - p))


def _expit(x):
    return 1.0 / (1.0 + math.exp(-x))


def run_new_chain(problem: Problem, cfg: NewSamplerConfig, rng=None, state: AugmentedState | None = None):
    """Run the birth-proposal sampler for ``cfg.iters`` iterations.

    Burn-in iterations are included in the trace; ``cfg.burn_in`` only
    bounds the window in which ``c`` may be tuned. Returns
    ``(ChainTrace, final state, c per target)``.
    """
    g = as_generator(cfg.seed if rng is None else rng)
    if state is None:
        state = initialize(problem, g)
    targets = tuple(cfg.targets) if cfg.targets is not None else tuple(problem.unobserved)
    for name in targets:
        if name not in problem.model.processes:
            raise ValueError(f"unknown process {name}")
        if name not in problem.unobserved:
            raise ValueError(f"process {name} is not fully latent")
    cs = {name: cfg.c_per_target.get(name, cfg.c) for name in targets}
    trace = ChainTrace()
    for it in range(cfg.iters):
        update_params(state, problem, g)
        acc = single_site_sweep(state, problem, g)
        for name in targets:
            c = cs[name]
            if c >= 1:
                ok = propose_full_path(state, problem, name, g)
            else:
                ok = propose_partial_path(state, problem, name, c, g, cfg.subset)
            acc[name] = float(ok)
            if cfg.tune_target is not None and it < cfg.burn_in:
                step = (float(ok) - cfg.tune_target) / (it + 1) ** 0.6
                cs[name] = min(_expit(_logit(min(c, 1 - 1e-9)) + step), 1.0)
        if problem.theta0 is not None:
            update_t0(state, problem, g)
        trace.append(trace_row(it, state, problem, acc))
    return trace, state, cs
