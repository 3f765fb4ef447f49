"""Null calibration and asymptotic machinery for the Laplace-transform tests.

Contents:

* the exponential integral Ei and the degenerate second-projection kernel
  h2_tilde(u, v; a) of the pair-minimum V-statistic under Exp(1);
* the closed-form covariance K(s, t; a) of the limiting Gaussian process of
  the supremum statistic, and its maximal variance sup_t K(t, t);
* eigenvalue approximation for the integral operator with kernel h2_tilde on
  L2(Exp(1)): an equal-width discretization with exponential cell masses
  (the matrix route) and a Gauss-Legendre Nystrom ladder used as the primary
  estimate of the largest eigenvalue delta1;
* Monte Carlo calibration of critical values and p-values.

Tail coefficients: the L2 statistic nMD converges to 6 sum delta_k W_k^2, so
its Bahadur tail coefficient is 1/(6 delta1); the supremum statistic's is
1/sup_t K(t,t).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expi

from .core import RngStream
from .errors import DomainError, NumericsError
from .numeric import exp_measure_nodes, maximize_log_grid
from .statistics import StatisticId, evaluate_many


# ---------------------------------------------------------------------------
# Special functions and kernels
# ---------------------------------------------------------------------------

def expint_Ei(x):
    """Exponential integral Ei(x); poles at x = 0 are rejected."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr == 0.0):
        raise DomainError("Ei has a pole at x = 0")
    out = expi(arr)
    return out if out.ndim else float(out)


def h2_tilde(u, v, a):
    """Second projection of the symmetrized pair-minimum kernel under Exp(1).

    Symmetric in (u, v); its first projection integrates to zero against
    Exp(1), which makes the V-statistic degenerate of order 2.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    Ei = expi
    e = np.exp
    return (1.0 / 6.0) * (
        3.0 + 1.0 / (a + u + v) - 2 * e(-u) / (a + 2 * u + v)
        - 2 * e(-v) / (a + u + 2 * v)
        - (4 - a) * e(a) * Ei(-a)
        + e((a + v) / 2) * (Ei(-(a + v) / 2) - Ei(-(a + 2 * u + v) / 2))
        + e(a + u) * (4 * Ei(-a - 2 * u) - Ei(-a - u))
        + e((a + u) / 2) * (Ei(-(a + u) / 2) - Ei(-(a + u + 2 * v) / 2))
        + e(a + v) * (4 * Ei(-a - 2 * v) - Ei(-a - v))
        + e(-u - v) / (a + 2 * (u + v)) * (2 * a + 4 * (1 + u + v))
        - 2 * (e(-u) + e(-v))
        + e(a / 2) * (-(4 + a + 2 * u) * Ei(-a / 2 - u) + (a + 4) * Ei(-a / 2)
                      + (a + 2 * (2 + u + v)) * Ei(-a / 2 - u - v)
                      - (4 + a + 2 * v) * Ei(-a / 2 - v))
    )


def covariance_K(s, t, a):
    """Covariance of the limiting Gaussian process of the supremum statistic."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    num = s * t * (4 + 8 * s + 4 * s**2 + 8 * t + 15 * s * t
                   + 6 * s**2 * t + 4 * t**2 + 6 * s * t**2)
    den = (4 * (1 + s) * (1 + t) * (1 + s + t) * (2 + 2 * s + t)
           * (2 + s + 2 * t) * (3 + 2 * s + 2 * t))
    out = np.exp(-a * (s + t)) * num / den
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CovarianceHandle:
    a: float
    sup_variance: float
    argmax_t: float


def sup_variance(a: float) -> CovarianceHandle:
    """Maximize K(t, t; a) over t > 0 (grid scan + golden section)."""
    if not (a > 0):
        raise DomainError(f"tuning parameter a must be positive, got {a}")
    hi = max(40.0 / a, 4.0)
    val, argt = maximize_log_grid(lambda t: covariance_K(t, t, a), 1e-4, hi,
                                  ngrid=512, tol=1e-10, vectorized=True)
    return CovarianceHandle(a=a, sup_variance=float(val), argmax_t=float(argt))


def tail_coefficient(stat: StatisticId) -> float:
    """Bahadur tail coefficient a_T for the two new statistics."""
    if stat.name == "MD":
        return 1.0 / (6.0 * largest_eigenvalue_delta1(stat.a).delta1)
    if stat.name == "LD":
        return 1.0 / sup_variance(stat.a).sup_variance
    raise DomainError(f"tail coefficient tracked only for MD/LD, not {stat.name}")


# ---------------------------------------------------------------------------
# Eigenvalue approximation
# ---------------------------------------------------------------------------

@dataclass
class EigenApproximation:
    a: float
    m: int
    B: float
    matrix: np.ndarray
    delta1: Optional[float] = None
    trace: list = field(default_factory=list)


def eigen_matrix(a: float, m: int, B: float, kernel=None) -> EigenApproximation:
    """Discretize the kernel operator on L2(Exp(1)) by an (m+1)x(m+1) matrix.

    Equal-width cells [Bi/m, B(i+1)/m) carry Exp(1) masses
    p_i = e^{-Bi/m} - e^{-B(i+1)/m}; the kernel is evaluated at cell
    midpoints (midpoint evaluation converges at second order, left endpoints
    only at first), and the matrix is

        m_ij = kernel(x_i, x_j; a) sqrt(p_i p_j) / (1 - e^{-B}).
    """
    if m < 100:
        raise DomainError("grid size m must be at least 100")
    if not (B > 0) or math.exp(-B) >= 1e-8:
        raise DomainError("truncation point B too small: need e^{-B} < 1e-8")
    if kernel is None:
        kernel = h2_tilde
    i = np.arange(m + 1, dtype=float)
    h = B / m
    nodes = (i + 0.5) * h
    p = np.exp(-i * h) - np.exp(-(i + 1) * h)
    sq = np.sqrt(p / (-np.expm1(-B)))
    mat = kernel(nodes[:, None], nodes[None, :], a) * np.outer(sq, sq)
    mat = 0.5 * (mat + mat.T)
    return EigenApproximation(a=a, m=m, B=B, matrix=mat)


def matrix_largest_eigenvalue(approx: EigenApproximation) -> float:
    """Largest eigenvalue of the discretized operator (dense symmetric solve)."""
    vals = np.linalg.eigvalsh(approx.matrix)
    approx.delta1 = float(vals[-1])
    approx.trace.append((approx.m, approx.B, approx.delta1))
    return approx.delta1


def grid_ladder_delta1(a: float,
                       rungs: Sequence[Tuple[int, float]] = ((500, 25.0),
                                                             (1000, 25.0),
                                                             (2000, 30.0)),
                       kernel=None) -> Tuple[float, list]:
    """delta1 by the equal-width matrix route over an (m, B) ladder, with
    Richardson extrapolation of the second-order midpoint error."""
    trace = []
    for m, B in rungs:
        approx = eigen_matrix(a, m, B, kernel=kernel)
        trace.append((m, B, matrix_largest_eigenvalue(approx)))
    hs = np.array([B / m for m, B in rungs])
    ds = np.array([d for _, _, d in trace])
    if len(rungs) >= 2:
        # eliminate the h^2 term using the two finest rungs
        h1, h2 = hs[-2], hs[-1]
        extr = ds[-1] + (ds[-1] - ds[-2]) * h2**2 / (h1**2 - h2**2)
    else:
        extr = ds[-1]
    return float(extr), trace


@dataclass(frozen=True)
class EigenDelta:
    a: float
    delta1: float
    trace: tuple  # ((n_nodes, estimate), ...)


_DELTA1_CACHE: Dict[float, EigenDelta] = {}


def gl_nystrom_delta1(a: float, n_nodes: int) -> float:
    """Nystrom approximation of delta1 with Gauss-Legendre nodes in the
    Exp(1) probability scale (u = 1 - e^{-x}); spectrally convergent."""
    x, w = exp_measure_nodes(n_nodes)
    mat = h2_tilde(x[:, None], x[None, :], a) * np.sqrt(np.outer(w, w))
    return float(np.linalg.eigvalsh(mat)[-1])


def largest_eigenvalue_delta1(a: float,
                              ladder: Sequence[int] = (120, 240, 480),
                              rel_tol: float = 1e-4) -> EigenDelta:
    """Largest eigenvalue delta1 of the h2_tilde operator on L2(Exp(1)).

    Runs the Gauss-Legendre Nystrom ladder and requires the two finest rungs
    to agree within rel_tol relative; raises NumericsError with the trace on
    non-convergence.  Results are cached per tuning parameter.
    """
    if not (a > 0):
        raise DomainError(f"tuning parameter a must be positive, got {a}")
    key = float(a)
    cached = _DELTA1_CACHE.get(key)
    if cached is not None and len(cached.trace) >= len(ladder):
        return cached
    trace = tuple((n, gl_nystrom_delta1(a, n)) for n in ladder)
    est = trace[-1][1]
    prev = trace[-2][1] if len(trace) > 1 else est
    if est <= 0 or abs(est - prev) > rel_tol * abs(est):
        raise NumericsError(
            f"delta1 ladder did not converge for a={a}: "
            f"{[(n, f'{d:.8g}') for n, d in trace]}", trace=trace)
    result = EigenDelta(a=key, delta1=est, trace=trace)
    _DELTA1_CACHE[key] = result
    return result


# ---------------------------------------------------------------------------
# Monte Carlo calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NullCalibration:
    statistic: StatisticId
    n: int
    alphas: tuple
    critical_values: dict  # alpha -> threshold
    standard_errors: dict  # alpha -> binomial SE of the rejection frequency
    replicates: int
    seed: RngStream


def simulate_null_statistics(stat: StatisticId, n: int, replicates: int,
                             rng: RngStream, threads: int = 1) -> np.ndarray:
    """Simulate `replicates` values of the statistic under Exp(1).

    Replicates are split into fixed-size blocks with disjoint substreams, so
    the result is identical for any thread count.
    """
    block = 5000
    nblocks = (replicates + block - 1) // block
    sizes = [min(block, replicates - k * block) for k in range(nblocks)]

    def run(k):
        gen = rng.substream(k).generator()
        x = gen.standard_exponential((sizes[k], n))
        return evaluate_many(stat, x)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(nblocks)))
    else:
        parts = [run(k) for k in range(nblocks)]
    return np.concatenate(parts)


def calibrate_critical_value(stat: StatisticId, n: int, alpha=0.05,
                             replicates: int = 10_000,
                             rng: RngStream = RngStream(0),
                             threads: int = 1) -> NullCalibration:
    """Empirical upper critical values from a null Monte Carlo run.

    Quantiles are type-7 (linear interpolation); the standard error reported
    per alpha is the binomial SE sqrt(alpha(1-alpha)/replicates) of the
    rejection frequency at the returned threshold.
    """
    if n < 2:
        raise DomainError("sample size must be at least 2")
    alphas = tuple(np.atleast_1d(np.asarray(alpha, dtype=float)))
    for al in alphas:
        if not (0.0 < al < 1.0):
            raise DomainError(f"alpha must lie in (0,1), got {al}")
    if replicates < 10_000:
        raise DomainError("calibration requires at least 10^4 replicates")
    values = simulate_null_statistics(stat, n, replicates, rng, threads=threads)
    crit = {al: float(np.quantile(values, 1.0 - al)) for al in alphas}
    ses = {al: float(math.sqrt(al * (1 - al) / replicates)) for al in alphas}
    return NullCalibration(statistic=stat, n=n, alphas=alphas,
                           critical_values=crit, standard_errors=ses,
                           replicates=replicates, seed=rng)


def p_value_mc(stat: StatisticId, raw, replicates: int = 10_000,
               rng: RngStream = RngStream(0), threads: int = 1,
               observed: Optional[float] = None) -> float:
    """Monte Carlo p-value (1 + #{null >= observed}) / (replicates + 1).

    `observed` overrides the statistic value (used for sentinel checks);
    by default it is computed from the sample.
    """
    from .statistics import evaluate
    x = np.asarray(raw, dtype=float)
    if observed is None:
        observed = evaluate(stat, x).value
    null_values = simulate_null_statistics(stat, x.size, replicates, rng,
                                           threads=threads)
    return float((1 + np.count_nonzero(null_values >= observed))
                 / (replicates + 1))


# ---------------------------------------------------------------------------
# CSV persistence of calibration tables
# ---------------------------------------------------------------------------

CALIBRATION_COLUMNS = ("statistic", "a", "n", "alpha", "critical_value",
                       "se", "replicates", "seed")


def save_calibrations(path, calibrations: Sequence[NullCalibration]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CALIBRATION_COLUMNS)
        for cal in calibrations:
            for al in cal.alphas:
                writer.writerow([cal.statistic.name,
                                 "" if cal.statistic.a is None else repr(cal.statistic.a),
                                 cal.n, repr(float(al)),
                                 repr(cal.critical_values[al]),
                                 repr(cal.standard_errors[al]),
                                 cal.replicates, cal.seed.seed])


def load_calibrations(path) -> list:
    out: Dict[tuple, dict] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            a = float(row["a"]) if row["a"] else None
            stat = StatisticId(row["statistic"], a)
            key = (stat, int(row["n"]), int(row["replicates"]), int(row["seed"]))
            rec = out.setdefault(key, {})
            rec[float(row["alpha"])] = (float(row["critical_value"]),
                                        float(row["se"]))
    cals = []
    for (stat, n, reps, seed), rec in out.items():
        alphas = tuple(sorted(rec))
        cals.append(NullCalibration(
            statistic=stat, n=n, alphas=alphas,
            critical_values={al: rec[al][0] for al in alphas},
            standard_errors={al: rec[al][1] for al in alphas},
            replicates=reps, seed=RngStream(seed)))
    return cals
