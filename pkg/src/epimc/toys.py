"""Small models with closed-form posteriors, used as exactness oracles.

``PoissonPairModel``: ``Y`` is a Poisson process of rate ``gamma`` and ``X``
is a birth process of intensity ``beta0 + eps Y(t)``. Given that ``X`` has no
jump on ``(0, T]`` the posterior of ``Y`` is a Poisson process with intensity
``gamma exp(-eps (T - t))``.

``removal_only_posterior``: SIR with ``beta = 0`` and nothing observed, where
``n_y`` given ``gamma`` is Binomial(I0, 1 - exp(-gamma T)).
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, stats

from .likelihood import IntensitySpec, birth_loglik

__all__ = ["PoissonPairModel", "poisson_pair_posterior_mean", "removal_only_posterior"]


class PoissonPairModel:
    kind = "poisson-pair"
    processes = ("x", "y")
    param_names = ("gamma", "beta0", "eps")
    dependents = {"x": (), "y": ("x",)}
    feeders = {}
    drains = {}

    def intensity(self, name, paths, values, window):
        t0, T = window
        if name == "y":
            return IntensitySpec(np.empty(0), values["gamma"], 1.0, 0.0, t0, T)
        if name == "x":
            y = paths["y"]
            offset = values["beta0"] + values["eps"] * np.arange(y.size + 1, dtype=float)
            return IntensitySpec(y, 1.0, offset, 0.0, t0, T)
        raise KeyError(name)

    def factor(self, name, paths, values, window):
        return birth_loglik(paths[name], self.intensity(name, paths, values, window))

    def loglik(self, paths, values, window):
        return sum(self.factor(n, paths, values, window) for n in self.processes)

    def rate_stats(self, paths, window):
        return {}

    def blocking_jump(self, paths, window):
        return None


def poisson_pair_posterior_mean(gamma, eps, T):
    """Posterior mean of ``n_y`` given a jump-free ``X`` on ``(0, T]``."""
    if eps == 0:
        return gamma * T
    return gamma * (1.0 - math.exp(-eps * T)) / eps


def removal_only_posterior(I0, T, a, b, kmax=None):
    """``P(n_y = k)`` for ``k = 0..kmax`` with ``gamma ~ Gamma(a, b)``.

    Integrates the Binomial(I0, 1 - exp(-gamma T)) mass against the prior by
    adaptive quadrature.
    """
    kmax = I0 if kmax is None else min(kmax, I0)
    prior = stats.gamma(a, scale=1.0 / b)
    out = np.empty(kmax + 1)
    for k in range(kmax + 1):

        def f(g, k=k):
            return stats.binom.pmf(k, I0, -math.expm1(-g * T)) * prior.pdf(g)

        out[k] = integrate.quad(f, 0, np.inf, limit=200, epsabs=1e-13)[0]
    return out
