"""Test statistics for exponentiality on the scaled sample.

Two groups live here:

* the pair-minimum Laplace-transform statistics MD (weighted L2 distance)
  and LD (weighted supremum distance) built on the characterization that
  X and 2 min(X1, X2) are equidistributed iff X is exponential;
* a battery of classical and Laplace-transform competitors (EP, CO, GINI,
  MO, KS, CVM, AD, BH, HE, W, HM1, HM2, MP, JP, JD) used for power and
  efficiency comparisons.

Every statistic is scale-free: it is computed from Y_i = X_i / mean(X).
Integral-type statistics are evaluated through exact closed forms or O(n^2)
kernel sums; numeric quadrature of the defining integrals is kept only as a
test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expi

from .core import ScaledSample, min_pair_weights, scale_sample
from .errors import DomainError
from .numeric import GOLDEN, maximize_log_grid

EULER_GAMMA = float(np.euler_gamma)

TUNED_STATISTICS = frozenset({"MD", "LD", "BH", "HE", "W", "HM1", "HM2",
                              "MP", "JP", "JD"})
PLAIN_STATISTICS = frozenset({"EP", "CO", "GINI", "MO", "KS", "CVM", "AD"})
ALL_STATISTICS = TUNED_STATISTICS | PLAIN_STATISTICS


@dataclass(frozen=True)
class StatisticId:
    """A statistic name plus its tuning parameter where one is required."""

    name: str
    a: Optional[float] = None

    def __post_init__(self):
        name = self.name.upper()
        object.__setattr__(self, "name", name)
        if name not in ALL_STATISTICS:
            raise DomainError(f"unknown statistic {self.name!r}; "
                              f"choose from {sorted(ALL_STATISTICS)}")
        if name in TUNED_STATISTICS:
            if self.a is None:
                raise DomainError(f"statistic {name} requires tuning parameter a")
            if not (self.a > 0):
                raise DomainError(f"tuning parameter must be positive, got {self.a}")
        elif self.a is not None:
            raise DomainError(f"statistic {name} takes no tuning parameter")

    def label(self) -> str:
        return self.name if self.a is None else f"{self.name}[a={self.a:g}]"


@dataclass(frozen=True)
class StatValue:
    value: float
    n: int
    rejection_side: str = "upper"


# ---------------------------------------------------------------------------
# MD / LD: pair-minimum Laplace transform statistics
# ---------------------------------------------------------------------------

def stat_MD(s: ScaledSample, a: float) -> float:
    """Weighted L2 distance between the sample Laplace transform and the
    V-empirical transform of 2 min(Y_i, Y_j), integrated against e^{-at}.

    Closed form via int_0^inf e^{-(a+c)t} dt = 1/(a+c); O(n^2).
    """
    _check_a(a)
    y = s.values
    z = s.sorted_values
    w = s.min_weights
    n = y.size
    t1 = np.sum(1.0 / (y[:, None] + y[None, :] + a)) / n**2
    t2 = np.sum(w[None, :] / (y[:, None] + 2.0 * z[None, :] + a)) / n
    t3 = np.sum(np.outer(w, w) / (2.0 * z[:, None] + 2.0 * z[None, :] + a))
    return float(t1 - 2.0 * t2 + t3)


def vn_process(s: ScaledSample, a: float, t) -> float:
    """Difference of the two empirical transforms at t, damped by e^{-at}."""
    _check_a(a)
    t = np.asarray(t, dtype=float)
    l1 = np.exp(-np.multiply.outer(t, s.values)).mean(axis=-1)
    l2 = np.exp(-2.0 * np.multiply.outer(t, s.sorted_values)) @ s.min_weights
    out = (l1 - l2) * np.exp(-a * t)
    return out if out.ndim else float(out)


def ld_upper_bound(a: float) -> float:
    """Upper end of the LD search interval; the damping e^{-at} makes any
    maximum beyond a*t = 40 numerically impossible."""
    return max(40.0 / a, 4.0)


def stat_LD(s: ScaledSample, a: float) -> float:
    """Supremum over t > 0 of |vn_process|, by 512-point log-spaced grid scan
    plus golden-section refinement of the best bracket to |dt| < 1e-8."""
    _check_a(a)
    samples = s.values[None, :]
    return float(_ld_many(samples, a)[0])


def _ld_many(samples: np.ndarray, a: float, grid_points: int = 512,
             tol: float = 1e-8) -> np.ndarray:
    """Vectorized LD over rows of `samples` (already positive; scaled here)."""
    y = samples / samples.mean(axis=1, keepdims=True)
    z = np.sort(y, axis=1)
    r, n = y.shape
    w = min_pair_weights(n)
    ts = np.geomspace(1e-4, ld_upper_bound(a), grid_points)

    def value_at(tvec):
        # tvec: (r,) candidate t per replicate
        e1 = np.exp(-tvec[:, None] * y).mean(axis=1)
        e2 = np.exp(-2.0 * tvec[:, None] * z) @ w
        return np.abs(e1 - e2) * np.exp(-a * tvec)

    best_v = np.full(r, -np.inf)
    best_i = np.zeros(r, dtype=np.intp)
    # chunk the grid to bound the (r, chunk, n) temporaries
    chunk = max(1, int(2_000_000 // max(r * n, 1)) or 1)
    for k0 in range(0, grid_points, chunk):
        tk = ts[k0:k0 + chunk]
        e1 = np.exp(-tk[None, :, None] * y[:, None, :]).mean(axis=2)
        e2 = np.einsum("rkn,n->rk", np.exp(-2.0 * tk[None, :, None] * z[:, None, :]), w)
        vals = np.abs(e1 - e2) * np.exp(-a * tk)[None, :]
        i = np.argmax(vals, axis=1)
        v = np.take_along_axis(vals, i[:, None], axis=1)[:, 0]
        upd = v > best_v
        best_v[upd] = v[upd]
        best_i[upd] = i[upd] + k0

    lo = ts[np.maximum(best_i - 1, 0)]
    hi = ts[np.minimum(best_i + 1, grid_points - 1)]
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = value_at(x1)
    f2 = value_at(x2)
    for _ in range(_golden_iterations(lo, hi, tol)):
        take1 = f1 >= f2
        hi = np.where(take1, x2, hi)
        lo = np.where(take1, lo, x1)
        x1n = np.where(take1, hi - GOLDEN * (hi - lo), x2)
        x2n = np.where(take1, x1, lo + GOLDEN * (hi - lo))
        probe = np.where(take1, x1n, x2n)
        fp = value_at(probe)
        f1, f2 = np.where(take1, fp, f2), np.where(take1, f1, fp)
        x1, x2 = x1n, x2n
    refined = np.maximum(f1, f2)
    return np.maximum(best_v, refined)


def _golden_iterations(lo, hi, tol):
    width = float(np.max(hi - lo))
    if width <= tol:
        return 0
    return int(np.ceil(np.log(tol / width) / np.log(GOLDEN))) + 1


# ---------------------------------------------------------------------------
# Classical battery
# ---------------------------------------------------------------------------

def kernel_cvm(x, y, mu=1.0):
    """Lilliefors Cramer-von Mises kernel at estimated mean mu."""
    u, v = np.asarray(x) / mu, np.asarray(y) / mu
    return 1.0 / 3.0 + 0.5 * (np.exp(-2 * u) + np.exp(-2 * v)) - np.exp(-np.minimum(u, v))


def kernel_ad(x, y, mu=1.0):
    """Lilliefors Anderson-Darling kernel at estimated mean mu."""
    u, v = np.asarray(x) / mu, np.asarray(y) / mu
    mx = np.maximum(u, v)
    # u+v-1-log(e^max - 1), written to avoid overflow for large max
    return u + v - 1.0 - (mx + np.log1p(-np.exp(-mx)))


def compute_classical(name: str, raw) -> float:
    name = name.upper()
    s = raw if isinstance(raw, ScaledSample) else scale_sample(raw)
    y = s.values
    n = s.n
    if name == "EP":
        return float(np.sqrt(48.0) * (np.mean(np.exp(-y)) - 0.5))
    if name == "CO":
        return float(1.0 + np.mean((1.0 - y) * np.log(y)))
    if name == "GINI":
        if n < 2:
            raise DomainError("GINI requires n >= 2")
        diffs = np.abs(y[:, None] - y[None, :]).sum()
        return float(abs(diffs / (2.0 * n * (n - 1)) - 0.5))
    if name == "MO":
        return float(abs(EULER_GAMMA + np.mean(np.log(y))))
    if name == "KS":
        z = s.sorted_values
        f0 = -np.expm1(-z)
        i = np.arange(1, n + 1, dtype=float)
        return float(max(np.max(i / n - f0), np.max(f0 - (i - 1) / n)))
    if name == "CVM":
        return float(kernel_cvm(y[:, None], y[None, :]).mean())
    if name == "AD":
        return float(kernel_ad(y[:, None], y[None, :]).mean())
    raise DomainError(f"unsupported classical statistic {name!r}")


# ---------------------------------------------------------------------------
# Laplace-transform competitors (order-2 kernels and closed forms)
# ---------------------------------------------------------------------------

def kernel_bh(x, y, mu=1.0, a=1.0):
    u, v = np.asarray(x) / mu, np.asarray(y) / mu
    s = a + u + v
    return (1 - u) * (1 - v) / s - (u + v - 2 * u * v) / s**2 + 2 * u * v / s**3


def kernel_he(x, y, mu=1.0, a=1.0):
    u, v = np.asarray(x) / mu, np.asarray(y) / mu
    return (1.0 / (a + u + v) + np.exp(a + u) * expi(-(a + u))
            + np.exp(a + v) * expi(-(a + v)) + 1.0 + a * np.exp(a) * expi(-a))


def kernel_w(x, y, mu=1.0, a=1.0):
    u, v = np.asarray(x) / mu, np.asarray(y) / mu
    s = a + u + v
    return (1.0 / a - (1 / (a + u) + 1 / (a + u)**2) - (1 / (a + v) + 1 / (a + v)**2)
            + 1 / s + 2 / s**2 + 2 / s**3)


def kernel_hm1(x, y, mu=1.0, a=1.0):
    u, v = np.asarray(x) / mu, np.asarray(y) / mu
    d, s = u - v, u + v
    return (a / (2 * (a * a + d * d)) - a / (2 * (a * a + s * s))
            + a * (a * a - 3 * d * d) / (a * a + d * d)**3
            + a * (a * a - 3 * s * s) / (a * a + s * s)**3
            - 2 * a * s / (a * a + s * s)**2)


def kernel_hm2(x, y, mu=1.0, a=1.0):
    u, v = np.asarray(x) / mu, np.asarray(y) / mu
    d, s = u - v, u + v
    pref = np.sqrt(np.pi / a) / 4.0
    return pref * ((1 + 1 / (2 * a) - d * d / (4 * a * a)) * np.exp(-d * d / (4 * a))
                   + (1 / (2 * a) - s / a - s * s / (4 * a * a) - 1.0)
                   * np.exp(-s * s / (4 * a)))


_ORDER2_KERNELS = {"BH": kernel_bh, "HE": kernel_he, "W": kernel_w,
                   "HM1": kernel_hm1, "HM2": kernel_hm2}


def _stat_mp(y: np.ndarray, a: float) -> float:
    """Pairwise-difference L2 statistic: expansion of the squared integrand.

    The statistic integrates (L_diff - L_sample)^2 e^{-at} where L_diff is the
    V-empirical transform of |Y_i - Y_j| (n^2 terms, diagonal included), so the
    expansion is a 4-index sum of reciprocals, chunked to bound memory.
    """
    n = y.size
    d = np.abs(y[:, None] - y[None, :]).ravel()
    t3 = np.sum(1.0 / (a + y[:, None] + y[None, :])) / n**2
    t2 = np.sum(1.0 / (a + d[:, None] + y[None, :])) / (n**2 * n)
    t1 = 0.0
    step = max(1, 50_000_000 // max(d.size, 1))
    for k0 in range(0, d.size, step):
        t1 += np.sum(1.0 / (a + d[k0:k0 + step, None] + d[None, :]))
    t1 /= float(n) ** 4
    return float(t1 - 2.0 * t2 + t3)


def compute_laplace_family(name: str, raw, a: float) -> float:
    name = name.upper()
    _check_a(a)
    s = raw if isinstance(raw, ScaledSample) else scale_sample(raw)
    y = s.values
    n = s.n
    if name in _ORDER2_KERNELS:
        k = _ORDER2_KERNELS[name]
        return float(k(y[:, None], y[None, :], 1.0, a).mean())
    if name == "JD":
        return float(np.mean(1.0 / (y + a))
                     - np.sum(s.min_weights / (2.0 * s.sorted_values + a)))
    if name == "JP":
        pair = np.abs(y[:, None] - y[None, :])
        return float(np.mean(1.0 / (y + a)) - np.sum(1.0 / (pair + a)) / n**2)
    if name == "MP":
        return _stat_mp(y, a)
    raise DomainError(f"unsupported Laplace-family statistic {name!r}")


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def evaluate(stat: StatisticId, raw) -> StatValue:
    """Evaluate a statistic on a raw (unscaled) sample."""
    s = raw if isinstance(raw, ScaledSample) else scale_sample(raw)
    if stat.name == "MD":
        value = stat_MD(s, stat.a)
    elif stat.name == "LD":
        value = stat_LD(s, stat.a)
    elif stat.name in PLAIN_STATISTICS:
        value = compute_classical(stat.name, s)
    else:
        value = compute_laplace_family(stat.name, s, stat.a)
    return StatValue(value=value, n=s.n)


def evaluate_many(stat: StatisticId, samples: np.ndarray,
                  chunk_rows: int = 0) -> np.ndarray:
    """Evaluate a statistic on each row of a (replicates, n) array.

    MD and LD are fully vectorized (these drive the Monte Carlo loops); the
    battery statistics fall back to a per-row loop.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2:
        raise DomainError("evaluate_many expects a 2-D (replicates, n) array")
    r, n = samples.shape
    if stat.name == "MD":
        if chunk_rows <= 0:
            chunk_rows = max(1, 20_000_000 // (n * n))
        out = np.empty(r)
        w = min_pair_weights(n)
        a = stat.a
        for k0 in range(0, r, chunk_rows):
            x = samples[k0:k0 + chunk_rows]
            y = x / x.mean(axis=1, keepdims=True)
            z = np.sort(y, axis=1)
            t1 = np.sum(1.0 / (y[:, :, None] + y[:, None, :] + a), axis=(1, 2)) / n**2
            t2 = np.sum(w[None, None, :] / (y[:, :, None] + 2 * z[:, None, :] + a),
                        axis=(1, 2)) / n
            t3 = np.sum(np.outer(w, w)[None, :, :]
                        / (2 * z[:, :, None] + 2 * z[:, None, :] + a), axis=(1, 2))
            out[k0:k0 + chunk_rows] = t1 - 2 * t2 + t3
        return out
    if stat.name == "LD":
        if chunk_rows <= 0:
            chunk_rows = max(1, 3_000_000 // n)
        out = np.empty(r)
        for k0 in range(0, r, chunk_rows):
            out[k0:k0 + chunk_rows] = _ld_many(samples[k0:k0 + chunk_rows], stat.a)
        return out
    return np.array([evaluate(stat, row).value for row in samples])


def _check_a(a):
    if a is None or not (a > 0):
        raise DomainError(f"tuning parameter a must be positive, got {a}")
