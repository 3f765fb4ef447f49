"""Shared numerical helpers: quadrature grids, 1-D maximization, scaled Ei."""

from __future__ import annotations

import numpy as np
from scipy.special import expi

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def panel_gauss_nodes(edges, npts):
    """Composite Gauss-Legendre nodes/weights over consecutive [edges] panels."""
    g, gw = np.polynomial.legendre.leggauss(npts)
    edges = np.asarray(edges, dtype=float)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs.append(0.5 * (hi - lo) * g + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * gw)
    return np.concatenate(xs), np.concatenate(ws)


def graded_halfline_nodes(inner=1e-4, outer=60.0, panels=60, npts=12):
    """Geometrically graded panels on (0, outer] for integrands decaying like e^-x."""
    edges = np.concatenate([[0.0], np.geomspace(inner, outer, panels)])
    return panel_gauss_nodes(edges, npts)


def exp_measure_nodes(n):
    """Gauss-Legendre nodes for integrals against the Exp(1) measure.

    Substitutes u = 1 - e^-x, returning x-nodes and weights such that
    sum w_i f(x_i) approximates the integral of f(x) e^-x dx over (0, inf).
    """
    u, w = np.polynomial.legendre.leggauss(n)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    return -np.log1p(-u), w


def maximize_log_grid(f, lo, hi, ngrid=512, tol=1e-8, vectorized=False):
    """Maximize f over [lo, hi]: log-spaced grid scan + golden-section refinement.

    Returns (max value, argmax).  The returned value is never below the best
    grid value.  f must accept scalars; with vectorized=True the grid scan is
    done in one call.
    """
    ts = np.geomspace(lo, hi, ngrid)
    vs = f(ts) if vectorized else np.array([f(t) for t in ts])
    i = int(np.argmax(vs))
    best_grid_v, best_grid_t = float(vs[i]), float(ts[i])
    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, ngrid - 1)]
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1 = float(f(np.array([x1]))[0] if vectorized else f(x1))
    f2 = float(f(np.array([x2]))[0] if vectorized else f(x2))
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = float(f(np.array([x1]))[0] if vectorized else f(x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = float(f(np.array([x2]))[0] if vectorized else f(x2))
    if f1 >= f2 and f1 > best_grid_v:
        return f1, x1
    if f2 > f1 and f2 > best_grid_v:
        return f2, x2
    return best_grid_v, best_grid_t


def ei_scaled(z):
    """e^-z Ei(z) for z > 0, stable for large z via the asymptotic series."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = z < 50.0
    out[small] = np.exp(-z[small]) * expi(z[small])
    zz = z[~small]
    acc = np.zeros_like(zz)
    term = 1.0 / zz
    for k in range(30):
        acc = acc + term
        term = term * (k + 1) / zz
    out[~small] = acc
    return out if out.ndim else float(out)
