"""Distance between proposal and target on the Poisson pair model.

``Y`` is a Poisson process of rate ``gamma`` on ``[0, T]`` and the target
reweights it by ``f(Y) = exp(-int (beta0 + eps Y_t) dt)`` given a jump-free
``X``. With proposal ``q`` (the Poisson law) and target ``p = f q / E f``::

    H^2 = 1 - E[sqrt f]^2 / E[f]

For this model ``E f`` and ``E sqrt f`` are available in closed form; the
discrete-time product below converges to them and serves as an oracle.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .simulate import as_generator

__all__ = [
    "hellinger_exact",
    "hellinger_mc",
    "discrete_expectation",
    "continuum_expectation",
    "acceptance_bound",
]


def _check(gamma, beta0, eps, T):
    for name, v in (("gamma", gamma), ("beta0", beta0), ("eps", eps), ("T", T)):
        if not (np.isfinite(v) and v >= 0):
            raise ValueError(f"{name} must be finite and non-negative")


def _phi(eps, T):
    """``int_0^T (1 - exp(-eps t)) dt``."""
    if eps == 0:
        return 0.0
    if eps * T < 1e-6:
        return eps * T * T / 2 - eps * eps * T**3 / 6
    return T + math.expm1(-eps * T) / eps


def continuum_expectation(gamma, beta0, eps, T):
    """``E f = exp(-beta0 T - gamma int_0^T (1 - e^{-eps t}) dt)``."""
    _check(gamma, beta0, eps, T)
    return math.exp(-beta0 * T - gamma * _phi(eps, T))


def hellinger_exact(gamma, eps, T) -> float:
    """Squared Hellinger distance ``H^2`` between target and proposal of ``Y``.

    ``H^2 = 1 - exp(-gamma [T - (e^{-eps T} - 4 e^{-eps T/2} + 3) / eps])``;
    ``beta0`` cancels. Small ``eps T`` uses the series
    ``gamma eps^2 T^3 (1 - 3 eps T / 8) / 12``.
    """
    _check(gamma, 0.0, eps, T)
    if eps == 0 or T == 0:
        return 0.0
    if eps * T < 1e-4:
        z = gamma * eps * eps * T**3 / 12 * (1 - 3 * eps * T / 8)
    else:
        z = gamma * (2 * _phi(eps / 2, T) - _phi(eps, T))
    return -math.expm1(-z)


def _discrete_log(n, gamma, beta0, eps, T):
    h = T / n
    p = gamma * h
    if p >= 1:
        warnings.warn("gamma h >= 1; discrete jump probability clipped to 1", RuntimeWarning, stacklevel=3)
        p = 1.0
    k = np.arange(1, n, dtype=float)
    # log(1 - p (1 - e^{-k eps h}))
    terms = np.log1p(p * np.expm1(-k * eps * h))
    return -n * beta0 * h + terms.sum()


def discrete_expectation(n, gamma, beta0, eps, T):
    """``(E f, E sqrt f)`` with ``Y`` jumping on an ``n``-point grid.

    ``Y`` may jump at ``k h`` (``h = T / n``) with probability ``gamma h``;
    a jump at step ``k`` contributes ``exp(-eps h (n - k))`` to ``f``. The
    product over steps is exact for the discrete chain and tends to the
    continuum value as ``n`` grows. ``sqrt f`` is the same product with
    ``beta0`` and ``eps`` halved.
    """
    _check(gamma, beta0, eps, T)
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    ef = math.exp(_discrete_log(n, gamma, beta0, eps, T))
    esf = math.exp(_discrete_log(n, gamma, beta0 / 2, eps / 2, T))
    return ef, esf


def hellinger_mc(gamma, beta0, eps, T, nsim, rng, chunk=100_000):
    """Monte-Carlo ``H^2`` with a delta-method standard error.

    Returns ``(estimate, se)``. Draws ``Y`` from the Poisson proposal and
    averages ``f`` and ``sqrt f`` over ``nsim`` paths.
    """
    _check(gamma, beta0, eps, T)
    nsim = int(nsim)
    if nsim < 100:
        raise ValueError("nsim must be at least 100")
    g = as_generator(rng)
    s1 = s2 = s11 = s12 = s22 = 0.0
    done = 0
    while done < nsim:
        m = min(chunk, nsim - done)
        counts = g.poisson(gamma * T, size=m)
        times = g.uniform(0.0, T, size=int(counts.sum()))
        owner = np.repeat(np.arange(m), counts)
        area = np.bincount(owner, weights=T - times, minlength=m)
        logf = -beta0 * T - eps * area
        f = np.exp(logf)
        r = np.exp(0.5 * logf)
        s1 += r.sum()
        s2 += f.sum()
        s11 += (r * r).sum()
        s12 += (r * f).sum()
        s22 += (f * f).sum()
        done += m
    n = float(nsim)
    a, b = s1 / n, s2 / n
    vaa = s11 / n - a * a
    vab = s12 / n - a * b
    vbb = s22 / n - b * b
    est = 1.0 - a * a / b
    # gradient of 1 - a^2/b
    ga, gb = -2 * a / b, a * a / (b * b)
    var = (ga * ga * vaa + 2 * ga * gb * vab + gb * gb * vbb) / n
    return est, math.sqrt(max(var, 0.0))


def acceptance_bound(h2) -> float:
    """Upper bound ``sqrt(2) H`` on the expected rejection probability."""
    if h2 < 0 or h2 > 1:
        raise ValueError("H^2 must lie in [0, 1]")
    return math.sqrt(2.0 * h2)
