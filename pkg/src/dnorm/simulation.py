"""Simulation of standard max-stable vectors and distribution diagnostics.

A standard max-stable vector with D-norm generator ``Z`` is realized as
``eta = -1 / max_i V_i Z^(i)`` where ``V_i = 1 / Gamma_i`` and ``Gamma_i`` are the
arrival times of a unit-rate Poisson process.  For a generator bounded by ``c``
the running maximum ``S`` can no longer change once ``c / Gamma_{n+1} < min_j S_j``,
so the supremum is reached after finitely many points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy import stats

from .evaluation import DNorm, norm
from .generators import (
    DiscreteGenerator,
    GeneratorError,
    SamplerGenerator,
    as_sampler,
    derive_seed,
    require_valid,
)

__all__ = [
    "MAX_POINTS",
    "SimulationError",
    "SmsSample",
    "SmsBatch",
    "sample_sms",
    "sample_batch",
    "default_cdf_grid",
    "MarginDiagnostic",
    "margin_check",
    "CdfDiagnostic",
    "joint_cdf_check",
    "max_stability_check",
    "multiplicative_invariance_check",
]

MAX_POINTS = 10**6
BLOCK_SIZE = 1024


class SimulationError(GeneratorError):
    """The simulator cannot produce an exact sample for this generator."""


@dataclass(frozen=True)
class SmsSample:
    eta: np.ndarray
    points_used: int


@dataclass(frozen=True)
class SmsBatch:
    """``n`` simulated vectors stored as an ``(n, d)`` array.

    Iterating yields :class:`SmsSample` objects.
    """

    eta: np.ndarray
    points_used: np.ndarray

    def __len__(self) -> int:
        return len(self.eta)

    def __getitem__(self, i: int) -> SmsSample:
        return SmsSample(self.eta[i].copy(), int(self.points_used[i]))

    def __iter__(self) -> Iterator[SmsSample]:
        for i in range(len(self)):
            yield self[i]

    @property
    def dimension(self) -> int:
        return self.eta.shape[1]


def _bounded_sampler(g) -> tuple[SamplerGenerator, float]:
    s = as_sampler(g)
    if s.bound is None:
        raise SimulationError(
            "generator has no declared bound; truncate it with truncate_normalize first"
        )
    return s, s.bound


def _simulate_block(sampler: SamplerGenerator, c: float, count: int, seed: int,
                    max_points: int) -> tuple[np.ndarray, np.ndarray]:
    # All samples of a block share one stream and draw in lockstep; a sample
    # that has stopped keeps drawing but ignores its points.
    rng = np.random.default_rng(seed)
    d = sampler.dimension
    running = np.zeros((count, d))
    gamma = np.zeros(count)
    used = np.zeros(count, dtype=np.int64)
    active = np.ones(count, dtype=bool)
    for _ in range(max_points):
        gamma = gamma + rng.exponential(size=count)
        z = sampler.draw(rng, count)
        low = running.min(axis=1)
        active &= ~(c / gamma < low)
        if not active.any():
            break
        running[active] = np.maximum(running[active], z[active] / gamma[active, None])
        used[active] += 1
    else:
        if active.any():
            low = running[active].min(axis=1)
            if np.any(low == 0):
                raise SimulationError(
                    f"a coordinate is still zero after {max_points} points; "
                    "the generator vanishes on some coordinate"
                )
            raise SimulationError(f"stopping rule not reached within {max_points} points")
    return -1.0 / running, used


def sample_batch(g, n: int, seed: int, block_size: int = BLOCK_SIZE,
                 max_points: int = MAX_POINTS, workers: int = 1) -> SmsBatch:
    """``n`` independent standard max-stable vectors with generator ``g``.

    Samples are simulated in blocks of ``block_size``; block ``b`` uses the
    sub-seed ``derive_seed(seed, b)``, so the output does not depend on
    ``workers``.

    Parameters
    ----------
    g : DiscreteGenerator or SamplerGenerator
        Must have a finite bound (a discrete generator always does).
    n : int
        Number of samples.
    seed : int
    block_size : int
    max_points : int
        Cap on Poisson points per sample.
    workers : int
        Threads used to simulate blocks.

    Returns
    -------
    SmsBatch
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if block_size < 1:
        raise ValueError("block_size must be at least 1")
    sampler, c = _bounded_sampler(g)
    starts = list(range(0, n, block_size))

    def run(b: int):
        count = min(block_size, n - starts[b])
        return _simulate_block(sampler, c, count, derive_seed(seed, b), max_points)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(starts))))
    else:
        parts = [run(b) for b in range(len(starts))]
    eta = np.concatenate([p[0] for p in parts])
    used = np.concatenate([p[1] for p in parts])
    return SmsBatch(eta, used)


def sample_sms(g, seed: int, max_points: int = MAX_POINTS) -> SmsSample:
    """A single sample; equal to ``sample_batch(g, 1, seed)[0]``."""
    return sample_batch(g, 1, seed, max_points=max_points)[0]


# --- diagnostics -------------------------------------------------------------------


def _sample_array(samples) -> np.ndarray:
    arr = samples.eta if isinstance(samples, SmsBatch) else np.asarray(samples, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("samples must be an (n, d) array")
    return arr


def default_cdf_grid(d: int) -> np.ndarray:
    """Nine nonpositive points: three directions at three scales."""
    ones = np.ones(d)
    alt = np.where(np.arange(d) % 2 == 0, 1.0, 0.5)
    directions = [ones, alt, 1.5 - alt]
    return np.array([-t * w for t in (0.5, 1.0, 2.0) for w in directions])


def _empirical_cdf(arr: np.ndarray, grid: np.ndarray) -> np.ndarray:
    return np.array([np.mean(np.all(arr <= x, axis=1)) for x in grid])


@dataclass(frozen=True)
class MarginDiagnostic:
    coordinate: int
    sample_count: int
    ks_distance: float
    p_value: float
    alpha: float

    @property
    def passed(self) -> bool:
        return self.p_value >= self.alpha


def margin_check(samples, j: int, alpha: float = 0.01, min_samples: int = 1000) -> MarginDiagnostic:
    """Kolmogorov-Smirnov test of coordinate ``j`` against the df ``exp(x)``, ``x <= 0``."""
    arr = _sample_array(samples)
    if len(arr) < min_samples:
        raise ValueError(f"margin_check needs at least {min_samples} samples, got {len(arr)}")
    if not 0 <= j < arr.shape[1]:
        raise IndexError(f"coordinate {j} out of range for dimension {arr.shape[1]}")
    res = stats.kstest(arr[:, j], lambda x: np.exp(np.minimum(x, 0.0)), method="asymp")
    return MarginDiagnostic(j, len(arr), float(res.statistic), float(res.pvalue), alpha)


@dataclass(frozen=True)
class CdfDiagnostic:
    """Per-point comparison of two distribution functions on a grid."""

    grid: np.ndarray
    observed: np.ndarray
    expected: np.ndarray
    standard_error: np.ndarray
    z: float

    @property
    def deviation(self) -> np.ndarray:
        return np.abs(self.observed - self.expected)

    @property
    def z_scores(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            zs = self.deviation / self.standard_error
        return np.where(self.deviation == 0, 0.0, zs)

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max())

    @property
    def passed(self) -> bool:
        return bool(np.all(self.deviation <= self.z * self.standard_error))


def joint_cdf_check(samples, D: DNorm, grid=None, z: float = 4.0) -> CdfDiagnostic:
    """Empirical ``P(eta <= x)`` against ``exp(-||x||_D)`` with binomial errors.

    For a Monte Carlo norm the error of the reference value is added in
    quadrature.
    """
    arr = _sample_array(samples)
    grid = default_cdf_grid(arr.shape[1]) if grid is None else np.atleast_2d(np.asarray(grid, float))
    if np.any(grid > 0):
        raise ValueError("grid points must be nonpositive")
    est = norm(D, grid)
    expected = np.exp(-np.asarray(est.value))
    se = np.sqrt(expected * (1 - expected) / len(arr))
    se = np.hypot(se, expected * np.asarray(est.standard_error))
    return CdfDiagnostic(grid, _empirical_cdf(arr, grid), expected, se, z)


def _two_sample(a: np.ndarray, b: np.ndarray, grid: np.ndarray, z: float) -> CdfDiagnostic:
    pa, pb = _empirical_cdf(a, grid), _empirical_cdf(b, grid)
    pooled = (pa * len(a) + pb * len(b)) / (len(a) + len(b))
    se = np.sqrt(pooled * (1 - pooled) * (1 / len(a) + 1 / len(b)))
    return CdfDiagnostic(grid, pa, pb, se, z)


def max_stability_check(samples, k: int, grid=None, z: float = 4.0) -> CdfDiagnostic:
    """Compare the df of ``k``-scaled block maxima with that of the raw samples.

    ``observed`` holds the block-maximum df and ``expected`` the raw df.
    """
    arr = _sample_array(samples)
    if k < 1:
        raise ValueError("block size k must be positive")
    if len(arr) % k:
        raise ValueError(f"sample count {len(arr)} is not divisible by k={k}")
    grid = default_cdf_grid(arr.shape[1]) if grid is None else np.atleast_2d(np.asarray(grid, float))
    maxima = k * arr.reshape(len(arr) // k, k, arr.shape[1]).max(axis=1)
    return _two_sample(maxima, arr, grid, z)


def _scalar_sampler(xi, n_check: int, seed: int) -> SamplerGenerator:
    if isinstance(xi, DiscreteGenerator):
        if xi.dimension != 1:
            raise GeneratorError("xi must be one-dimensional")
        require_valid(xi)
        return as_sampler(xi)
    if not isinstance(xi, SamplerGenerator) or xi.dimension != 1:
        raise GeneratorError("xi must be a one-dimensional generator")
    draws = xi.sample(seed, n_check)[:, 0]
    if np.any(draws < 0):
        raise GeneratorError("xi emitted negative values")
    se = draws.std(ddof=1) / math.sqrt(n_check)
    if abs(draws.mean() - 1) > 4 * se + 1e-12:
        raise GeneratorError(f"xi has sample mean {draws.mean():.6g}, not 1")
    return xi


def multiplicative_invariance_check(g, xi, n: int = 100_000, seed: int = 0, grid=None,
                                    z: float = 4.0, shared_seed: bool = False,
                                    n_check: int = 100_000) -> CdfDiagnostic:
    """Samples generated by ``Z`` and by ``xi * Z`` should have the same law.

    ``xi`` is a one-dimensional generator (unit mean, nonnegative); a discrete
    one is validated exactly, a sampler statistically.  With ``shared_seed``
    both batches use the same sub-seeds, so a degenerate ``xi = 1`` reproduces
    the first batch exactly.
    """
    base, c = _bounded_sampler(g)
    xs = _scalar_sampler(xi, n_check, derive_seed(seed, 2))
    if xs.bound is None:
        raise SimulationError("xi must be bounded")

    def draw(rng, count):
        return base.draw(rng, count) * xs.draw(rng, count)

    scaled = SamplerGenerator(base.dimension, draw, bound=c * xs.bound, name="scaled")
    a = sample_batch(base, n, derive_seed(seed, 0)).eta
    b = sample_batch(scaled, n, derive_seed(seed, 0 if shared_seed else 1)).eta
    grid = default_cdf_grid(base.dimension) if grid is None else np.atleast_2d(np.asarray(grid, float))
    return _two_sample(b, a, grid, z)
