"""Pure-Python inner loops. Mirrors ``_kernels.pyx`` operation for operation.

Intensity layout shared by the birth-process kernels: ``breaks`` holds the
sorted companion jump times inside the window ``[t0, T]``; segment ``j`` is
``[breaks[j-1], breaks[j])`` (with ``breaks[-1] := t0`` and the last segment
closed at ``T``). On segment ``j`` with own count ``k`` the intensity is::

    rate[j] * max(0, offset[j] + slope * k) * max(0, cap + cap_slope * k)
"""
import math

import numpy as np

from .errors import InversionError

NEG_INF = -math.inf


def _check_window(arr, t0, T, name):
    if len(arr) and (arr[0] < t0 or arr[len(arr) - 1] > T):
        raise ValueError(f"{name} events outside the window [{t0}, {T}]")


def sir_sweep(x, y, S0, I0, t0, T):
    """Exposures and log jump-rate sums of an SIR configuration.

    Returns ``(int_SI, int_I, log_x, log_y, ok)`` where ``log_x`` sums
    ``log(S(t-) I(t-))`` over infections and ``log_y`` sums ``log I(t-)`` over
    recoveries. ``ok`` is False when some jump happens at zero rate.
    """
    _check_window(x, t0, T, "x")
    _check_window(y, t0, T, "y")
    nx, ny = len(x), len(y)
    i = j = 0
    t = t0
    S, I = S0, I0
    int_SI = 0.0
    int_I = 0.0
    log_x = 0.0
    log_y = 0.0
    ok = True
    while i < nx or j < ny:
        if j >= ny or (i < nx and x[i] < y[j]):
            tn = x[i]
            dt = tn - t
            int_SI += S * I * dt
            int_I += I * dt
            if S <= 0 or I <= 0:
                ok = False
                log_x = NEG_INF
            else:
                log_x += math.log(S * I)
            S -= 1
            I += 1
            i += 1
        else:
            tn = y[j]
            dt = tn - t
            int_SI += S * I * dt
            int_I += I * dt
            if I <= 0:
                ok = False
                log_y = NEG_INF
            else:
                log_y += math.log(I)
            I -= 1
            j += 1
        t = tn
    dt = T - t
    int_SI += S * I * dt
    int_I += I * dt
    return int_SI, int_I, log_x, log_y, ok


def seir_sweep(x, y, z, S0, E0, I0, t0, T, cp):
    """SEIR analogue of :func:`sir_sweep` with the S*I exposure split at ``cp``.

    Returns ``(int_SI_1, int_SI_2, int_E, int_I, nx_1, log_x, log_y, log_z,
    ok)``; ``nx_1`` counts infections strictly before ``cp``.
    """
    _check_window(x, t0, T, "x")
    _check_window(y, t0, T, "y")
    _check_window(z, t0, T, "z")
    nx, ny, nz = len(x), len(y), len(z)
    i = j = m = 0
    t = t0
    S, E, I = S0, E0, I0
    int1 = 0.0
    int2 = 0.0
    int_E = 0.0
    int_I = 0.0
    nx1 = 0
    log_x = 0.0
    log_y = 0.0
    log_z = 0.0
    ok = True
    inf = math.inf
    while i < nx or j < ny or m < nz:
        tx = x[i] if i < nx else inf
        ty = y[j] if j < ny else inf
        tz = z[m] if m < nz else inf
        if tx <= ty and tx <= tz:
            tn = tx
            kind = 0
        elif ty <= tz:
            tn = ty
            kind = 1
        else:
            tn = tz
            kind = 2
        dt = tn - t
        pre = min(tn, cp) - t
        if pre < 0.0:
            pre = 0.0
        int1 += S * I * pre
        int2 += S * I * (dt - pre)
        int_E += E * dt
        int_I += I * dt
        if kind == 0:
            if S <= 0 or I <= 0:
                ok = False
                log_x = NEG_INF
            else:
                log_x += math.log(S * I)
            if tn < cp:
                nx1 += 1
            S -= 1
            E += 1
            i += 1
        elif kind == 1:
            if E <= 0:
                ok = False
                log_y = NEG_INF
            else:
                log_y += math.log(E)
            E -= 1
            I += 1
            j += 1
        else:
            if I <= 0:
                ok = False
                log_z = NEG_INF
            else:
                log_z += math.log(I)
            I -= 1
            m += 1
        t = tn
    dt = T - t
    pre = min(T, cp) - t
    if pre < 0.0:
        pre = 0.0
    int1 += S * I * pre
    int2 += S * I * (dt - pre)
    int_E += E * dt
    int_I += I * dt
    return int1, int2, int_E, int_I, nx1, log_x, log_y, log_z, ok


def _lam(rate, offset, slope, cap, cap_slope, j, k):
    a = offset[j] + slope * k
    if a <= 0.0:
        return 0.0
    c = cap + cap_slope * k
    if c <= 0.0:
        return 0.0
    return rate[j] * a * c


def birth_loglik(events, breaks, rate, offset, slope, cap, cap_slope, t0, T):
    """Log-density of a birth path under a piecewise-constant intensity."""
    _check_window(events, t0, T, "birth")
    B = len(breaks)
    j = 0
    k = 0
    t = t0
    ll = 0.0
    for i in range(len(events)):
        te = events[i]
        while j < B and breaks[j] <= te:
            ll -= _lam(rate, offset, slope, cap, cap_slope, j, k) * (breaks[j] - t)
            t = breaks[j]
            j += 1
        lam = _lam(rate, offset, slope, cap, cap_slope, j, k)
        ll -= lam * (te - t)
        t = te
        if lam <= 0.0:
            return NEG_INF
        ll += math.log(lam)
        k += 1
    while j < B:
        ll -= _lam(rate, offset, slope, cap, cap_slope, j, k) * (breaks[j] - t)
        t = breaks[j]
        j += 1
    ll -= _lam(rate, offset, slope, cap, cap_slope, j, k) * (T - t)
    return ll


def path_to_coords(events, breaks, rate, offset, slope, cap, cap_slope, t0, T):
    """Integrated intensity over each waiting interval.

    Entry ``i < n`` is the exact unit-exponential coordinate of jump ``i``;
    the final entry is the mass accumulated between the last jump and ``T``
    (a lower bound for the censored coordinate).
    """
    _check_window(events, t0, T, "birth")
    n = len(events)
    B = len(breaks)
    out = np.empty(n + 1)
    j = 0
    k = 0
    t = t0
    for i in range(n):
        te = events[i]
        mass = 0.0
        while j < B and breaks[j] <= te:
            mass += _lam(rate, offset, slope, cap, cap_slope, j, k) * (breaks[j] - t)
            t = breaks[j]
            j += 1
        lam = _lam(rate, offset, slope, cap, cap_slope, j, k)
        if lam <= 0.0:
            raise InversionError(f"jump {i} at t={te} has zero intensity")
        mass += lam * (te - t)
        t = te
        out[i] = mass
        k += 1
    mass = 0.0
    while j < B:
        mass += _lam(rate, offset, slope, cap, cap_slope, j, k) * (breaks[j] - t)
        t = breaks[j]
        j += 1
    mass += _lam(rate, offset, slope, cap, cap_slope, j, k) * (T - t)
    out[n] = mass
    return out


def coords_to_path(u, breaks, rate, offset, slope, cap, cap_slope, t0, T):
    """Map unit-exponential coordinates to birth times via inverse Lambda.

    Returns ``(times, used, done)``. ``done`` is True when coordinate
    ``used - 1`` carried the path past ``T``; otherwise the coordinates ran
    out first and the caller must supply more.
    """
    B = len(breaks)
    nu = len(u)
    out = np.empty(nu)
    n = 0
    j = 0
    k = 0
    t = t0
    for idx in range(nu):
        rem = u[idx]
        while True:
            end = breaks[j] if j < B else T
            lam = _lam(rate, offset, slope, cap, cap_slope, j, k)
            mass = lam * (end - t)
            if lam > 0.0 and mass >= rem:
                t = t + rem / lam
                if t > end:
                    t = end
                out[n] = t
                n += 1
                k += 1
                break
            rem -= mass
            t = end
            if j == B:
                return out[:n].copy(), idx + 1, True
            j += 1
    return out[:n].copy(), nu, False
