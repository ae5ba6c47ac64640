"""Pure numpy implementations of the hot loops, used when the extension is absent."""

from __future__ import annotations

import numpy as np

NA, NOA, OA = 0, 1, 2


def _inputs(g0, g1, phi, n, m, code):
    """Bucket count, lag covariances c[0..L-1] and target cross-covariances x[1..L]."""
    geo = float(np.sum(phi ** np.arange(m)))
    var_d = m * g0 + g1 * float(np.sum(2.0 * (m - np.arange(1, m)) * phi ** np.arange(m - 1)))
    if code == NA:
        length = n
        c = np.empty(length)
        c[0] = g0
        c[1:] = g1 * phi ** np.arange(length - 1)
        x = g1 * geo * phi ** np.arange(length)
    elif code == NOA:
        length = n // m
        c = np.empty(length)
        c[0] = var_d
        c[1:] = g1 * geo * geo * (phi**m) ** np.arange(length - 1)
        x = g1 * geo * geo * (phi**m) ** np.arange(length)
    elif code == OA:
        length = n - m + 1
        gam = np.empty(length + m)
        gam[0] = g0
        gam[1:] = g1 * phi ** np.arange(length + m - 1)
        d = np.arange(-(m - 1), m)
        k = np.arange(length)[:, None]
        c = ((m - np.abs(d)) * gam[np.abs(k + d)]).sum(axis=1)
        x = g1 * geo * geo * phi ** np.arange(length)
    else:
        raise ValueError(f"unknown approach code {code}")
    if length < 1:
        raise ValueError("history too short for the requested aggregation level")
    return var_d, length, c, x


def mse_grid(g0, g1, phi, n, m, code, alphas):
    a = np.asarray(alphas, dtype=float)[:, None]
    var_d, length, c, x = _inputs(g0, g1, phi, n, m, code)
    q = 1.0 - a
    c0 = c[0]
    var = (
        a * c0 * (1.0 - q ** (2 * length)) / (2.0 - a)
        + 2.0 * a * q ** (2 * length - 1) * c0
        + q ** (2 * length) * c0
    )
    if length > 1:
        i = np.arange(1, length)
        within = (q**i * c[1:] * (1.0 - q ** (2 * (length - i)))).sum(axis=1, keepdims=True)
        with_init = (q ** (length + i - 1) * c[length - i]).sum(axis=1, keepdims=True)
        var = var + 2.0 * a / (2.0 - a) * within + 2.0 * a * with_init
    k = np.arange(length)
    cov = (a * q**k * x).sum(axis=1, keepdims=True) + q**length * x[-1]
    if code == NA:
        out = var_d + m * m * var - 2.0 * m * cov
    else:
        out = var_d + var - 2.0 * cov
    return out[:, 0]


def ses_fit_windows(windows, alphas):
    """Fit SES per row by in-sample one-step SSE over ``alphas``; return (forecast, alpha).

    Rows are independent windows; the level starts at each row's first value.
    Ties in SSE go to the smaller (earlier) alpha.
    """
    w = np.asarray(windows, dtype=float)
    a = np.asarray(alphas, dtype=float)
    level = np.repeat(w[:, :1], a.size, axis=1)
    sse = np.zeros_like(level)
    for j in range(1, w.shape[1]):
        err = w[:, j:j + 1] - level
        sse += err * err
        level += a * err
    best = np.argmin(sse, axis=1)
    rows = np.arange(w.shape[0])
    return level[rows, best], a[best]
