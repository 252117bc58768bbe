# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, INFINITY

from .errors import InversionError

cnp.import_array()


cdef inline void _check_window(const double[::1] arr, double t0, double T, str name) except *:
    cdef Py_ssize_t n = arr.shape[0]
    if n and (arr[0] < t0 or arr[n - 1] > T):
        raise ValueError(f"{name} events outside the window [{t0}, {T}]")


def sir_sweep(const double[::1] x, const double[::1] y, long S0, long I0,
              double t0, double T):
    _check_window(x, t0, T, "x")
    _check_window(y, t0, T, "y")
    cdef Py_ssize_t nx = x.shape[0], ny = y.shape[0], i = 0, j = 0
    cdef double t = t0, tn, dt
    cdef long S = S0, I = I0
    cdef double int_SI = 0.0, int_I = 0.0, log_x = 0.0, log_y = 0.0
    cdef bint ok = True
    while i < nx or j < ny:
        if j >= ny or (i < nx and x[i] < y[j]):
            tn = x[i]
            dt = tn - t
            int_SI += S * I * dt
            int_I += I * dt
            if S <= 0 or I <= 0:
                ok = False
                log_x = -INFINITY
            else:
                log_x += log(<double>(S * I))
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
                log_y = -INFINITY
            else:
                log_y += log(<double>I)
            I -= 1
            j += 1
        t = tn
    dt = T - t
    int_SI += S * I * dt
    int_I += I * dt
    return int_SI, int_I, log_x, log_y, ok


def seir_sweep(const double[::1] x, const double[::1] y, const double[::1] z,
               long S0, long E0, long I0, double t0, double T, double cp):
    _check_window(x, t0, T, "x")
    _check_window(y, t0, T, "y")
    _check_window(z, t0, T, "z")
    cdef Py_ssize_t nx = x.shape[0], ny = y.shape[0], nz = z.shape[0]
    cdef Py_ssize_t i = 0, j = 0, m = 0
    cdef double t = t0, tn, dt, pre, tx, ty, tz
    cdef long S = S0, E = E0, I = I0, nx1 = 0
    cdef int kind
    cdef double int1 = 0.0, int2 = 0.0, int_E = 0.0, int_I = 0.0
    cdef double log_x = 0.0, log_y = 0.0, log_z = 0.0
    cdef bint ok = True
    while i < nx or j < ny or m < nz:
        tx = x[i] if i < nx else INFINITY
        ty = y[j] if j < ny else INFINITY
        tz = z[m] if m < nz else INFINITY
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
        pre = (tn if tn < cp else cp) - t
        if pre < 0.0:
            pre = 0.0
        int1 += S * I * pre
        int2 += S * I * (dt - pre)
        int_E += E * dt
        int_I += I * dt
        if kind == 0:
            if S <= 0 or I <= 0:
                ok = False
                log_x = -INFINITY
            else:
                log_x += log(<double>(S * I))
            if tn < cp:
                nx1 += 1
            S -= 1
            E += 1
            i += 1
        elif kind == 1:
            if E <= 0:
                ok = False
                log_y = -INFINITY
            else:
                log_y += log(<double>E)
            E -= 1
            I += 1
            j += 1
        else:
            if I <= 0:
                ok = False
                log_z = -INFINITY
            else:
                log_z += log(<double>I)
            I -= 1
            m += 1
        t = tn
    dt = T - t
    pre = (T if T < cp else cp) - t
    if pre < 0.0:
        pre = 0.0
    int1 += S * I * pre
    int2 += S * I * (dt - pre)
    int_E += E * dt
    int_I += I * dt
    return int1, int2, int_E, int_I, nx1, log_x, log_y, log_z, ok


cdef inline double _lam(const double[::1] rate, const double[::1] offset,
                        double slope, double cap, double cap_slope,
                        Py_ssize_t j, long k) nogil:
    cdef double a = offset[j] + slope * k
    if a <= 0.0:
        return 0.0
    cdef double c = cap + cap_slope * k
    if c <= 0.0:
        return 0.0
    return rate[j] * a * c


def birth_loglik(const double[::1] events, const double[::1] breaks,
                 const double[::1] rate, const double[::1] offset,
                 double slope, double cap, double cap_slope, double t0, double T):
    _check_window(events, t0, T, "birth")
    cdef Py_ssize_t B = breaks.shape[0], n = events.shape[0], i, j = 0
    cdef long k = 0
    cdef double t = t0, te, lam, ll = 0.0
    for i in range(n):
        te = events[i]
        while j < B and breaks[j] <= te:
            ll -= _lam(rate, offset, slope, cap, cap_slope, j, k) * (breaks[j] - t)
            t = breaks[j]
            j += 1
        lam = _lam(rate, offset, slope, cap, cap_slope, j, k)
        ll -= lam * (te - t)
        t = te
        if lam <= 0.0:
            return -INFINITY
        ll += log(lam)
        k += 1
    while j < B:
        ll -= _lam(rate, offset, slope, cap, cap_slope, j, k) * (breaks[j] - t)
        t = breaks[j]
        j += 1
    ll -= _lam(rate, offset, slope, cap, cap_slope, j, k) * (T - t)
    return ll


def path_to_coords(const double[::1] events, const double[::1] breaks,
                   const double[::1] rate, const double[::1] offset,
                   double slope, double cap, double cap_slope, double t0, double T):
    _check_window(events, t0, T, "birth")
    cdef Py_ssize_t B = breaks.shape[0], n = events.shape[0], i, j = 0
    cdef long k = 0
    cdef double t = t0, te, lam, mass
    out_arr = np.empty(n + 1)
    cdef double[::1] out = out_arr
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
    return out_arr


def coords_to_path(const double[::1] u, const double[::1] breaks,
                   const double[::1] rate, const double[::1] offset,
                   double slope, double cap, double cap_slope, double t0, double T):
    cdef Py_ssize_t B = breaks.shape[0], nu = u.shape[0], n = 0, j = 0, idx
    cdef long k = 0
    cdef double t = t0, rem, end, lam, mass
    out_arr = np.empty(nu)
    cdef double[::1] out = out_arr
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
                return out_arr[:n].copy(), idx + 1, True
            j += 1
    return out_arr[:n].copy(), nu, False
