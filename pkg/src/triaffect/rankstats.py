"""Tie-aware rank statistics.

Spearman's rho is computed as the Pearson correlation of average ranks
rather than via the 6*sum(d^2) shortcut: ordinal scales with few levels
produce heavy ties, and the shortcut is biased under ties.

Significance comes either from the t approximation
(t = rho * sqrt((n-2) / (1-rho^2)) with n-2 degrees of freedom) or from a
seeded permutation test.  Permutation uses an explicit generator passed by
the caller, falling back to a fixed seed, so results are deterministic
regardless of thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TypeVar

import numpy as np
from scipy.special import stdtr

from .errors import DegenerateStatisticsError, InputError, SchemaError
from .model import PathosScore

DEFAULT_PERMUTATIONS = 10_000
_PERMUTATION_SEED = 8191

METHODS = ("t_approx", "permutation")

T = TypeVar("T")


@dataclass(frozen=True)
class CorrelationResult:
    """A rank correlation with its significance level."""

    rho: float
    p_value: float
    n: int
    method: str

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise SchemaError(f"method must be one of {METHODS}, got {self.method!r}")
        if not -1.0 <= self.rho <= 1.0:
            raise SchemaError(f"rho out of [-1, +1]: {self.rho!r}")
        if not 0.0 <= self.p_value <= 1.0:
            raise SchemaError(f"p_value out of [0, 1]: {self.p_value!r}")
        if self.n < 3:
            raise SchemaError(f"n must be at least 3, got {self.n}")


@dataclass(frozen=True)
class DescriptiveStats:
    """Mean, sample standard deviation, and range of a value series."""

    mean: float
    sd: float
    min: float
    max: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise SchemaError(f"n must be positive, got {self.n}")
        if self.sd < 0.0:
            raise SchemaError(f"sd must be non-negative, got {self.sd}")
        if not self.min <= self.mean <= self.max:
            raise SchemaError(
                f"need min <= mean <= max, got {self.min} / {self.mean} / {self.max}"
            )


def _finite_array(values: Iterable[float], what: str) -> np.ndarray:
    arr = np.asarray(list(values), dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{what}: expected a flat sequence of numbers")
    if arr.size == 0:
        raise InputError(f"{what}: empty input")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what}: non-finite value in input")
    return arr


def average_ranks(values: Iterable[float]) -> list[float]:
    """Rank values from 1..n, assigning tied values the mean of their positions."""
    arr = _finite_array(values, "average_ranks")
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=float)
    sorted_vals = arr[order]
    i = 0
    while i < arr.size:
        j = i
        while j + 1 < arr.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks.tolist()


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc)) * math.sqrt(float(yc @ yc))
    if denom == 0.0:
        raise DegenerateStatisticsError("constant series: correlation undefined")
    return float(xc @ yc) / denom


def _t_approx_p(rho: float, n: int) -> float:
    # |rho| == 1 degenerates to an infinite t statistic; p is exactly 0.
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * stdtr(n - 2, -abs(t)))


def _permutation_p(
    x_ranks: np.ndarray,
    y_ranks: np.ndarray,
    rho_obs: float,
    rng: np.random.Generator | None,
    n_perm: int = DEFAULT_PERMUTATIONS,
) -> float:
    rng = np.random.default_rng(_PERMUTATION_SEED) if rng is None else rng
    xc = x_ranks - x_ranks.mean()
    x_norm = math.sqrt(float(xc @ xc))
    perms = rng.permuted(np.tile(y_ranks, (n_perm, 1)), axis=1)
    yc = perms - perms.mean(axis=1, keepdims=True)
    denom = x_norm * np.sqrt((yc * yc).sum(axis=1))
    rhos = (yc @ xc) / denom
    hits = int(np.sum(np.abs(rhos) >= abs(rho_obs) - 1e-12))
    return (hits + 1) / (n_perm + 1)


def spearman(
    x: Iterable[float],
    y: Iterable[float],
    method: str = "t_approx",
    rng: np.random.Generator | None = None,
) -> CorrelationResult:
    """Tie-aware Spearman rank correlation between two equal-length series."""
    ax = _finite_array(x, "spearman x")
    ay = _finite_array(y, "spearman y")
    if ax.size != ay.size:
        raise InputError(f"spearman: length mismatch ({ax.size} vs {ay.size})")
    n = int(ax.size)
    if n < 3:
        raise DegenerateStatisticsError(f"spearman requires n >= 3, got n={n}")
    if np.unique(ax).size < 2:
        raise DegenerateStatisticsError("spearman: x series is constant, rho undefined")
    if np.unique(ay).size < 2:
        raise DegenerateStatisticsError("spearman: y series is constant, rho undefined")
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}; expected one of {METHODS}")
    rx = np.asarray(average_ranks(ax))
    ry = np.asarray(average_ranks(ay))
    rho = max(-1.0, min(1.0, _pearson(rx, ry)))
    if method == "t_approx":
        p = _t_approx_p(rho, n)
    else:
        p = _permutation_p(rx, ry, rho, rng)
    return CorrelationResult(rho=rho, p_value=p, n=n, method=method)


def p_value(
    rho: float,
    n: int,
    method: str = "t_approx",
    rng: np.random.Generator | None = None,
) -> float:
    """Two-sided significance for an observed rho at sample size n.

    The permutation route draws at least 10,000 random rankings of 1..n
    against a fixed ranking, so it ignores any tie structure of the
    original data; use ``spearman(..., method="permutation")`` to permute
    the actual tied ranks.
    """
    if not isinstance(n, int) or isinstance(n, bool):
        raise InputError(f"n must be an integer, got {n!r}")
    if n < 3:
        raise DegenerateStatisticsError(f"p_value requires n >= 3, got n={n}")
    if not math.isfinite(rho) or not -1.0 <= rho <= 1.0:
        raise InputError(f"rho out of [-1, +1]: {rho!r}")
    if method == "t_approx":
        return _t_approx_p(rho, n)
    if method == "permutation":
        base = np.arange(1.0, n + 1.0)
        return _permutation_p(base, base, rho, rng)
    raise InputError(f"unknown method {method!r}; expected one of {METHODS}")


def describe(values: Iterable[float]) -> DescriptiveStats:
    """Mean, sample (n-1) standard deviation, min, and max of a series.

    A single observation has sd 0 by convention, as does any all-equal
    series (computed exactly, not through floating-point cancellation).
    """
    arr = _finite_array(values, "describe")
    n = int(arr.size)
    if n == 1 or bool(np.all(arr == arr[0])):
        sd = 0.0
    else:
        sd = float(arr.std(ddof=1))
    return DescriptiveStats(
        mean=float(arr.mean()), sd=sd, min=float(arr.min()), max=float(arr.max()), n=n
    )


def median_consensus(scores: Sequence[int | PathosScore]) -> PathosScore:
    """Median of advocate scores on the -2..+2 scale.

    Even-count medians take the mean of the two central values and round
    half away from zero, preserving the sign of a split verdict.
    """
    if not scores:
        raise InputError("median_consensus: empty input")
    vals = sorted(int(PathosScore(s)) for s in scores)
    k = len(vals)
    if k % 2 == 1:
        return PathosScore(vals[k // 2])
    mid = 0.5 * (vals[k // 2 - 1] + vals[k // 2])
    rounded = int(math.floor(abs(mid) + 0.5))
    return PathosScore(rounded if mid >= 0 else -rounded)


def pairwise_complete(
    a: Sequence[T | None], b: Sequence[T | None]
) -> tuple[list[T], list[T]]:
    """Keep only the positions where both sequences have a value."""
    if len(a) != len(b):
        raise InputError(f"pairwise_complete: length mismatch ({len(a)} vs {len(b)})")
    kept = [(x, y) for x, y in zip(a, b) if x is not None and y is not None]
    return [x for x, _ in kept], [y for _, y in kept]
