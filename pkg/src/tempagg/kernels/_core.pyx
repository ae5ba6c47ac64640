# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_fallback``; same signatures and results."""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()

cdef enum:
    NA = 0
    NOA = 1
    OA = 2


cdef double _geo(double phi, int m) nogil:
    cdef double total = 0.0, term = 1.0
    cdef int i
    for i in range(m):
        total += term
        term *= phi
    return total


def mse_grid(double g0, double g1, double phi, int n, int m, int code, const double[::1] alphas):
    cdef Py_ssize_t n_alpha = alphas.shape[0]
    cdef double geo = _geo(phi, m)
    cdef double var_d = m * g0
    cdef double pk = 1.0
    cdef int k, i, d, length
    for k in range(1, m):
        var_d += g1 * 2.0 * (m - k) * pk
        pk *= phi

    if code == NA:
        length = n
    elif code == NOA:
        length = n // m
    elif code == OA:
        length = n - m + 1
    else:
        raise ValueError(f"unknown approach code {code}")
    if length < 1:
        raise ValueError("history too short for the requested aggregation level")

    cdef double[::1] c = np.empty(length)
    cdef double[::1] x = np.empty(length)
    cdef double[::1] gam
    cdef double ratio = phi if code != NOA else pow(phi, m)
    cdef double lead = g1 * geo if code == NA else g1 * geo * geo
    cdef double acc

    pk = 1.0
    for k in range(length):
        x[k] = lead * pk
        pk *= ratio
    if code == NA:
        c[0] = g0
        pk = 1.0
        for k in range(1, length):
            c[k] = g1 * pk
            pk *= phi
    elif code == NOA:
        c[0] = var_d
        for k in range(1, length):
            c[k] = x[k - 1]
    else:
        gam = np.empty(length + m)
        gam[0] = g0
        pk = 1.0
        for k in range(1, length + m):
            gam[k] = g1 * pk
            pk *= phi
        for k in range(length):
            acc = 0.0
            for d in range(-(m - 1), m):
                acc += (m - (d if d >= 0 else -d)) * gam[k + d if k + d >= 0 else -(k + d)]
            c[k] = acc

    out = np.empty(n_alpha)
    cdef double[::1] res = out
    # qp[i] = q**i for i in 0..2L, rebuilt per constant by repeated multiplication
    cdef double[::1] qp = np.empty(2 * length + 1)
    cdef double a, q, q2L, var, within, with_init, cov, c0 = c[0]
    cdef Py_ssize_t j
    with nogil:
        for j in range(n_alpha):
            a = alphas[j]
            q = 1.0 - a
            qp[0] = 1.0
            for i in range(1, 2 * length + 1):
                qp[i] = qp[i - 1] * q
            q2L = qp[2 * length]
            var = a * c0 * (1.0 - q2L) / (2.0 - a) + 2.0 * a * qp[2 * length - 1] * c0 + q2L * c0
            within = 0.0
            with_init = 0.0
            for i in range(1, length):
                within += qp[i] * c[i] * (1.0 - qp[2 * (length - i)])
                with_init += qp[length + i - 1] * c[length - i]
            var += 2.0 * a / (2.0 - a) * within + 2.0 * a * with_init
            cov = 0.0
            for k in range(length):
                cov += a * qp[k] * x[k]
            cov += qp[length] * x[length - 1]
            if code == NA:
                res[j] = var_d + m * m * var - 2.0 * m * cov
            else:
                res[j] = var_d + var - 2.0 * cov
    return out


def ses_fit_windows(const double[:, ::1] windows, const double[::1] alphas):
    cdef Py_ssize_t rows = windows.shape[0], cols = windows.shape[1]
    cdef Py_ssize_t n_alpha = alphas.shape[0]
    forecast = np.empty(rows)
    chosen = np.empty(rows)
    cdef double[::1] f_out = forecast
    cdef double[::1] a_out = chosen
    cdef Py_ssize_t r, j, t
    cdef double a, level, err, sse, best_sse, best_level, best_alpha
    with nogil:
        for r in range(rows):
            best_sse = -1.0
            best_level = 0.0
            best_alpha = 0.0
            for j in range(n_alpha):
                a = alphas[j]
                level = windows[r, 0]
                sse = 0.0
                for t in range(1, cols):
                    err = windows[r, t] - level
                    sse += err * err
                    level += a * err
                if best_sse < 0.0 or sse < best_sse:
                    best_sse = sse
                    best_level = level
                    best_alpha = a
            f_out[r] = best_level
            a_out[r] = best_alpha
    return forecast, chosen
