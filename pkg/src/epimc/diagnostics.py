"""Chain diagnostics: batch-means ESS, summaries, split R-hat."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = ["ess_batch_means", "chi2_discrete", "SummaryStats", "summarize", "summarize_trace", "split_rhat", "autocorrelation"]


def ess_batch_means(series) -> float:
    """Effective sample size by non-overlapping batch means, batch size floor(sqrt(n)).

    ``ESS = n var(x) / (b var(batch means))`` clipped to ``[1, n]``. A
    constant series has no long-run variance; it returns ``n`` with a
    warning.
    """
    x = np.asarray(series, dtype=float).ravel()
    n = x.size
    if n < 16:
        raise ValueError("need at least 16 samples")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    b = int(math.isqrt(n))
    a = n // b
    if np.ptp(x) == 0:
        warnings.warn("constant series; ESS set to n", RuntimeWarning, stacklevel=2)
        return float(n)
    var = x.var(ddof=1)
    means = x[: a * b].reshape(a, b).mean(axis=1)
    sigma2 = b * means.var(ddof=1)
    if sigma2 <= 0:
        return float(n)
    return float(min(max(n * var / sigma2, 1.0), n))


def chi2_discrete(samples, pmf, min_expected=5.0):
    """Pearson goodness of fit of integer MCMC draws against ``pmf``.

    The chain is thinned by ``ceil(n / ESS)`` so the retained draws are
    close to independent. Cells with expected count below ``min_expected``
    are pooled into their neighbour. Returns ``(statistic, dof, p-value,
    thinning)``.
    """
    x = np.asarray(samples).astype(int)
    pmf = np.asarray(pmf, dtype=float)
    if np.any(x < 0) or np.any(x >= pmf.size):
        raise ValueError("samples outside the support of pmf")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        thin = int(math.ceil(x.size / ess_batch_means(x)))
    x = x[::thin]
    obs = np.bincount(x, minlength=pmf.size).astype(float)
    exp = pmf / pmf.sum() * x.size
    # pool sparse cells into the next one; a sparse tail joins the last cell
    o_cells, e_cells, o_acc, e_acc = [], [], 0.0, 0.0
    for o, e in zip(obs, exp):
        o_acc, e_acc = o_acc + o, e_acc + e
        if e_acc >= min_expected:
            o_cells.append(o_acc)
            e_cells.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 and e_cells:
        o_cells[-1] += o_acc
        e_cells[-1] += e_acc
    if len(e_cells) < 2:
        raise ValueError("too few cells with enough expected mass")
    o_cells, e_cells = np.array(o_cells), np.array(e_cells)
    stat = float(((o_cells - e_cells) ** 2 / e_cells).sum())
    dof = len(e_cells) - 1
    return stat, dof, float(stats.chi2.sf(stat, dof)), thin


def autocorrelation(series, max_lag=50):
    """Sample autocorrelation at lags ``0..max_lag`` via FFT."""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    n = x.size
    max_lag = min(max_lag, n - 1)
    f = np.fft.rfft(x, 2 * n)
    acov = np.fft.irfft(f * np.conj(f))[: max_lag + 1]
    if acov[0] == 0:
        return np.r_[1.0, np.zeros(max_lag)]
    return acov / acov[0]


def split_rhat(chains) -> float:
    """Split-chain potential scale reduction for equal-length chains."""
    arr = np.asarray(chains, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    half = arr.shape[1] // 2
    if half < 2:
        raise ValueError("chains too short")
    parts = np.concatenate([arr[:, :half], arr[:, half : 2 * half]])
    w = parts.var(axis=1, ddof=1).mean()
    bvar = half * parts.mean(axis=1).var(ddof=1)
    if w == 0:
        return 1.0 if bvar == 0 else math.inf
    return float(math.sqrt(((half - 1) / half * w + bvar / half) / w))


@dataclass(frozen=True)
class SummaryStats:
    name: str
    mean: float
    variance: float
    q025: float
    q50: float
    q975: float
    ess: float
    mcse: float
    acceptance: float | None = None

    def as_row(self):
        return {
            "name": self.name,
            "mean": self.mean,
            "variance": self.variance,
            "q2.5": self.q025,
            "q50": self.q50,
            "q97.5": self.q975,
            "ess": self.ess,
            "mcse": self.mcse,
            "acceptance": math.nan if self.acceptance is None else self.acceptance,
        }


def summarize(name, series, acceptance=None) -> SummaryStats:
    x = np.asarray(series, dtype=float)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        ess = ess_batch_means(x)
    if x.size and np.ptp(x) == 0:
        mean, var = float(x[0]), 0.0
    else:
        mean, var = float(x.mean()), float(x.var(ddof=1))
    q = np.quantile(x, [0.025, 0.5, 0.975])
    return SummaryStats(
        name, mean, var, float(q[0]), float(q[1]), float(q[2]), ess,
        math.sqrt(var / ess), acceptance,
    )


def summarize_trace(trace, burn_in=0):
    """Summaries of parameters, counts and t0 after burn-in, keyed by column."""
    if burn_in < 0 or burn_in >= len(trace):
        raise ValueError("burn-in leaves no samples")
    skip = {"chain", "iteration", "loglik"}
    acc_cols = [c for c in trace.names if c.startswith("acc_")]
    out = {}
    for col in trace.names:
        if col in skip or col.startswith(("acc_", "move_")):
            continue
        out[col] = summarize(col, trace[col][burn_in:])
    for col in acc_cols:
        vals = trace[col][burn_in:]
        out[col] = summarize(col, vals, acceptance=float(np.nanmean(vals)))
    return out
