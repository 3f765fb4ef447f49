"""Monte Carlo power estimation, including bootstrap tuning-parameter selection.

Power cells are reproducible from their fields: replicates are split into
fixed blocks over disjoint RNG substreams, so results do not depend on the
thread count used to compute them.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from .core import RngStream
from .errors import DomainError
from .families import get_family, sample_alternative
from .nulldist import NullCalibration
from .statistics import StatisticId, evaluate_many

POWER_COLUMNS = ("statistic", "a", "family", "theta", "n", "alpha", "power",
                 "se", "replicates", "seed", "percent")

DEFAULT_TUNING_GRID = (0.2, 0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True)
class PowerCell:
    statistic: StatisticId
    family: str
    theta: Optional[float]
    n: int
    alpha: float
    replicates: int
    power: float
    mc_se: float
    seed: RngStream


@dataclass(frozen=True)
class BootstrapTuning:
    grid: tuple
    bootstrap_replicates: int
    selected_a: float
    scores: tuple


def _critical_value(calibration: Optional[NullCalibration], stat: StatisticId,
                    n: int, alpha: float) -> float:
    if calibration is None:
        raise DomainError(
            f"no calibration supplied for {stat.label()} at n={n}; run "
            "calibrate_critical_value first and pass the result")
    if calibration.statistic != stat or calibration.n != n:
        raise DomainError(
            f"calibration mismatch: have {calibration.statistic.label()} "
            f"n={calibration.n}, need {stat.label()} n={n}")
    try:
        return calibration.critical_values[alpha]
    except KeyError:
        raise DomainError(f"calibration lacks alpha={alpha}; "
                          f"available: {sorted(calibration.critical_values)}") from None


def _sample_blocks(family, theta, n, replicates, rng, block=5000):
    nblocks = (replicates + block - 1) // block
    fam = get_family(family) if isinstance(family, str) else family
    for k in range(nblocks):
        size = min(block, replicates - k * block)
        yield k, sample_alternative(fam, theta, (size, n), rng.substream(k))


def estimate_power(stat: StatisticId, family, theta, n: int, alpha: float,
                   replicates: int, rng: RngStream,
                   calibration: NullCalibration,
                   threads: int = 1) -> PowerCell:
    """Fraction of alternative samples whose statistic exceeds the calibrated
    critical value."""
    if replicates < 1000:
        raise DomainError("power estimation requires at least 10^3 replicates")
    crit = _critical_value(calibration, stat, n, alpha)
    fam = get_family(family) if isinstance(family, str) else family
    blocks = list(_sample_blocks(fam, theta, n, replicates, rng))

    def count(item):
        _, x = item
        return int(np.count_nonzero(evaluate_many(stat, x) > crit))

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rejected = sum(pool.map(count, blocks))
    else:
        rejected = sum(count(b) for b in blocks)
    p_hat = rejected / replicates
    se = float(np.sqrt(p_hat * (1.0 - p_hat) / replicates))
    return PowerCell(statistic=stat, family=fam.id,
                     theta=None if not fam.uses_theta else float(theta),
                     n=n, alpha=alpha, replicates=replicates,
                     power=p_hat, mc_se=se, seed=rng)


def bootstrap_select_a(stat_name: str, sample, grid: Sequence[float],
                       B: int, alpha: float, rng: RngStream,
                       calibrations: Dict[float, NullCalibration]) -> BootstrapTuning:
    """Select the tuning parameter maximizing the bootstrap rejection rate.

    Nonparametric bootstrap: B resamples of the observed data per candidate;
    the score of a candidate is the fraction of resamples rejected at the
    null critical value for that candidate.  Ties go to the smallest a.
    """
    grid = tuple(sorted(float(a) for a in grid))
    if not grid:
        raise DomainError("tuning grid must be nonempty")
    if any(a <= 0 for a in grid):
        raise DomainError("tuning grid values must be positive")
    if B < 200:
        raise DomainError("bootstrap requires B >= 200")
    x = np.asarray(sample, dtype=float)
    n = x.size
    gen = rng.generator()
    idx = gen.integers(0, n, size=(B, n))
    resamples = x[idx]
    scores = []
    for a in grid:
        stat = StatisticId(stat_name, a)
        crit = _critical_value(calibrations.get(a), stat, n, alpha)
        values = evaluate_many(stat, resamples)
        scores.append(float(np.mean(values > crit)))
    best = int(np.argmax(scores))  # first max = smallest a on ties
    return BootstrapTuning(grid=grid, bootstrap_replicates=B,
                           selected_a=grid[best], scores=tuple(scores))


def estimate_power_adaptive(stat_name: str, family, theta, n: int, alpha: float,
                            replicates: int, rng: RngStream,
                            calibrations: Dict[float, NullCalibration],
                            grid: Sequence[float] = DEFAULT_TUNING_GRID,
                            B: int = 200) -> PowerCell:
    """Power of the data-driven test: per Monte Carlo replicate, pick the
    tuning parameter by bootstrap expected power, then reject using the
    critical value of the selected candidate."""
    grid = tuple(sorted(float(a) for a in grid))
    stats = [StatisticId(stat_name, a) for a in grid]
    crits = np.array([_critical_value(calibrations.get(a), s, n, alpha)
                      for a, s in zip(grid, stats)])
    fam = get_family(family) if isinstance(family, str) else family
    rejected = 0
    chunk = max(1, 2_000_000 // (B * n))
    done = 0
    block_index = 0
    while done < replicates:
        size = min(chunk, replicates - done)
        stream = rng.substream(block_index)
        x = sample_alternative(fam, theta, (size, n), stream)
        gen = stream.substream(1).generator()
        idx = gen.integers(0, n, size=(size, B, n))
        res = np.take_along_axis(x[:, None, :], idx, axis=2).reshape(size * B, n)
        scores = np.empty((size, len(grid)))
        observed = np.empty((size, len(grid)))
        for j, (a, stat) in enumerate(zip(grid, stats)):
            values = evaluate_many(stat, res).reshape(size, B)
            scores[:, j] = np.mean(values > crits[j], axis=1)
            observed[:, j] = evaluate_many(stat, x)
        pick = np.argmax(scores, axis=1)
        rejected += int(np.count_nonzero(
            observed[np.arange(size), pick] > crits[pick]))
        done += size
        block_index += 1
    p_hat = rejected / replicates
    se = float(np.sqrt(p_hat * (1.0 - p_hat) / replicates))
    return PowerCell(statistic=StatisticId(stat_name, grid[0]), family=fam.id,
                     theta=None if not fam.uses_theta else float(theta),
                     n=n, alpha=alpha, replicates=replicates,
                     power=p_hat, mc_se=se, seed=rng)


def power_table_rows(cells: Sequence[PowerCell]):
    rows = []
    for c in cells:
        rows.append({
            "statistic": c.statistic.name,
            "a": "" if c.statistic.a is None else f"{c.statistic.a:g}",
            "family": c.family,
            "theta": "" if c.theta is None else repr(float(c.theta)),
            "n": c.n,
            "alpha": repr(float(c.alpha)),
            "power": repr(float(c.power)),
            "se": repr(float(c.mc_se)),
            "replicates": c.replicates,
            "seed": c.seed.seed,
            "percent": int(round(100.0 * c.power)),
        })
    return rows


def write_power_table(path, cells: Sequence[PowerCell]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=POWER_COLUMNS)
        writer.writeheader()
        for row in power_table_rows(cells):
            writer.writerow(row)
