"""Sample handling and reproducible random number streams.

All test statistics in this package operate on the scaled sample
Y_i = X_i / mean(X), which makes them invariant to the unknown rate of the
exponential null.  The pair-minimum Laplace transform used by several
statistics only depends on the order statistics, so the scaled sample also
carries its sorted values together with the weights

    w_i = (2(n - i) + 1) / n**2        (ascending order, 1-based i)

which count how often the i-th order statistic is the minimum over all n**2
ordered pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class RngStream:
    """A splittable random source identified by (seed, stream).

    Identical (seed, stream) pairs reproduce identical variates; distinct
    stream indices yield statistically independent generators.  Concurrent
    tasks must each receive their own stream index.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.default_rng(ss)

    def substream(self, index: int) -> "RngStream":
        """Derive a child stream; children of distinct indices are independent."""
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream, index))
        return _SpawnedStream(self.seed, self.stream, ss)


class _SpawnedStream(RngStream):
    """Internal: an RngStream whose seed sequence carries a longer spawn key."""

    def __init__(self, seed, stream, seed_sequence):
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "stream", stream)
        object.__setattr__(self, "_ss", seed_sequence)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self._ss)

    def substream(self, index: int) -> "RngStream":
        key = self._ss.spawn_key + (index,)
        return _SpawnedStream(self.seed, self.stream,
                              np.random.SeedSequence(self.seed, spawn_key=key))


def min_pair_weights(n: int) -> np.ndarray:
    """Weights w_i = (2(n-i)+1)/n^2 for ascending order statistics.

    w_i is the fraction of the n^2 ordered pairs (j, k) whose minimum is the
    i-th smallest observation, so that
    (1/n^2) sum_{j,k} e^{-2 t min(Y_j, Y_k)} = sum_i w_i e^{-2 t Z_i}
    with Z the ascending values.  Ties are handled by stable sort order; any
    consistent tie rule gives the same weighted sum.
    """
    if n < 1:
        raise DomainError("sample size must be at least 1")
    i = np.arange(1, n + 1, dtype=float)
    return (2.0 * (n - i) + 1.0) / n**2


@dataclass(frozen=True)
class ScaledSample:
    """A positive sample divided by its mean, with sorted values and weights."""

    values: np.ndarray
    sorted_values: np.ndarray
    min_weights: np.ndarray

    @property
    def n(self) -> int:
        return self.values.size


def scale_sample(raw) -> ScaledSample:
    """Scale a raw positive sample to unit mean.

    Raises DomainError naming the first offending index if the input is empty
    or contains a non-positive (or non-finite) entry.
    """
    x = np.asarray(raw, dtype=float)
    if x.ndim != 1:
        x = x.reshape(-1)
    if x.size == 0:
        raise DomainError("empty sample")
    bad = ~(x > 0) | ~np.isfinite(x)
    if bad.any():
        idx = int(np.argmax(bad))
        raise DomainError(f"sample entry at index {idx} is not a positive real: {x[idx]!r}")
    y = x / x.mean()
    order = np.argsort(y, kind="stable")
    return ScaledSample(values=y, sorted_values=y[order],
                        min_weights=min_pair_weights(y.size))


def read_sample(path) -> np.ndarray:
    """Read newline-separated decimal reals; '#' starts a comment line."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise DomainError(f"{path}:{lineno}: not a decimal real: {text!r}") from exc
    if not values:
        raise DomainError(f"{path}: no data lines")
    return np.asarray(values, dtype=float)
