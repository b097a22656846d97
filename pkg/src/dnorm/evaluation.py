"""Evaluation of D-norms and the functionals built on them.

The norm generated by ``Z`` is ``||x||_D = E(max_i |x_i| Z_i)``.  Discrete
generators are evaluated exactly; sampler generators by seeded Monte Carlo.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .generators import (
    DiscreteGenerator,
    GeneratorError,
    SamplerGenerator,
    as_sampler,
    derive_seed,
)

__all__ = [
    "EXACT",
    "MonteCarlo",
    "DNorm",
    "NormEstimate",
    "eval_exact",
    "eval_mc",
    "mc_moments",
    "norm",
    "sms_cdf",
    "copula_value",
    "stdf",
    "pickands",
    "pickands_trace",
    "project",
    "extremal_coefficient",
    "LogisticIndex",
    "logistic_norm_ref",
    "simplex_grid",
    "parse_grid",
    "sup_norm",
    "l1_norm",
    "CHUNK_SIZE",
]

EXACT = "exact"
CHUNK_SIZE = 1 << 14


@dataclass(frozen=True)
class MonteCarlo:
    """Monte Carlo evaluation policy.

    ``z`` is the z-threshold used when higher layers compare estimates.
    With ``control_variate`` the estimator subtracts ``beta * C`` where
    ``C = sum_i |x_i| (Z_i - 1)`` has known mean zero and ``beta`` is the
    sample regression coefficient; this removes most of the variance for
    near-independent and heavy-tailed generators.
    """

    samples: int = 100_000
    seed: int = 0
    z: float = 4.0
    control_variate: bool = True

    def __post_init__(self):
        if self.samples < 2:
            raise ValueError("Monte Carlo policy needs at least 2 samples")
        if self.seed < 0:
            raise ValueError("seeds must be nonnegative")


@dataclass(frozen=True)
class NormEstimate:
    """Value with standard error (0 for exact evaluation).

    ``value`` and ``standard_error`` are floats for a single point and arrays
    for a grid of points.
    """

    value: float | np.ndarray
    standard_error: float | np.ndarray
    sample_count: int


@dataclass(frozen=True, eq=False)
class DNorm:
    generator: Union[DiscreteGenerator, SamplerGenerator]
    policy: Union[str, MonteCarlo, None] = None

    def __post_init__(self):
        policy = self.policy
        if policy is None:
            policy = EXACT if isinstance(self.generator, DiscreteGenerator) else MonteCarlo()
        if policy == EXACT and not isinstance(self.generator, DiscreteGenerator):
            raise GeneratorError("exact evaluation requires a discrete generator")
        if policy != EXACT and not isinstance(policy, MonteCarlo):
            raise ValueError(f"unknown policy {policy!r}")
        object.__setattr__(self, "policy", policy)

    @classmethod
    def exact(cls, g: DiscreteGenerator) -> "DNorm":
        return cls(g, EXACT)

    @classmethod
    def monte_carlo(cls, g, samples: int = 100_000, seed: int = 0, z: float = 4.0,
                    control_variate: bool = True) -> "DNorm":
        return cls(g, MonteCarlo(samples, seed, z, control_variate))

    @property
    def is_exact(self) -> bool:
        return self.policy == EXACT

    @property
    def dimension(self) -> int:
        return self.generator.dimension

    def __call__(self, x):
        return norm(self, x).value

    def __repr__(self) -> str:
        return f"DNorm({self.generator!r}, policy={self.policy!r})"


def _points(x, d: int) -> tuple[np.ndarray, bool]:
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.ndim != 2 or pts.shape[1] != d:
        raise GeneratorError(f"dimension mismatch: point of length {pts.shape[-1]}, generator has {d}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    return pts, single


def sup_norm(x) -> np.ndarray | float:
    ax = np.abs(np.asarray(x, dtype=float))
    return ax.max(axis=-1) if ax.ndim > 1 else float(ax.max())


def l1_norm(x) -> np.ndarray | float:
    """Correctly rounded L1 norm (``math.fsum`` per point)."""
    ax = np.abs(np.asarray(x, dtype=float))
    if ax.ndim == 1:
        return math.fsum(ax)
    return np.array([math.fsum(r) for r in ax])


# --- exact evaluation --------------------------------------------------------------


def _exact_totals(g: DiscreteGenerator, pts: np.ndarray) -> tuple[list[int], int]:
    """Integer numerators of the norm at each point over one common denominator."""
    fr = [Fraction(v) for v in np.abs(pts).ravel().tolist()]
    s = math.lcm(*(f.denominator for f in fr)) if fr else 1
    xnum = np.empty(len(fr), dtype=object)
    xnum[:] = [f.numerator * (s // f.denominator) for f in fr]
    xnum = xnum.reshape(pts.shape)
    K, d = g.atom_num.shape
    block = max(1, 200_000 // (K * d))
    totals: list[int] = []
    for lo in range(0, len(xnum), block):
        xs = xnum[lo:lo + block]
        vals = (xs[:, None, :] * g.atom_num[None, :, :]).max(axis=2)
        totals.extend(int(t) for t in vals.dot(g.prob_num))
    return totals, s * g.atom_den * g.prob_den


def eval_exact(g: DiscreteGenerator, x, as_fraction: bool = False):
    """``sum_k p_k max_i |x_i| z_ki`` computed in exact rational arithmetic.

    Parameters
    ----------
    g : DiscreteGenerator
    x : array_like
        A point of length ``d`` or an ``(m, d)`` array of points.
    as_fraction : bool
        Return ``Fraction`` values instead of correctly rounded floats.
    """
    pts, single = _points(x, g.dimension)
    totals, den = _exact_totals(g, pts)
    if as_fraction:
        out = [Fraction(t, den) for t in totals]
        return out[0] if single else out
    vals = np.array([t / den for t in totals])
    return float(vals[0]) if single else vals


# --- Monte Carlo -------------------------------------------------------------------


class _Moments:
    """Streaming means and co-moments of ``k`` variables at ``m`` points."""

    def __init__(self, m: int, k: int):
        self.n = 0
        self.mean = np.zeros((m, k))
        self.comoment = np.zeros((m, k, k))

    def add(self, v: np.ndarray):
        # v has shape (c, m, k)
        c = v.shape[0]
        mc = v.mean(axis=0)
        dev = v - mc
        dt = dev.transpose(1, 2, 0)
        mom = dt @ dt.transpose(0, 2, 1)
        if self.n == 0:
            self.n, self.mean, self.comoment = c, mc, mom
            return
        n = self.n + c
        delta = mc - self.mean
        self.mean = self.mean + delta * (c / n)
        self.comoment = self.comoment + mom + delta[:, :, None] * delta[:, None, :] * (self.n * c / n)
        self.n = n

    def cov(self) -> np.ndarray:
        return self.comoment / max(self.n - 1, 1)


def _cv_estimate(mean: np.ndarray, cov: np.ndarray, n: int, weights: np.ndarray):
    """Linear combination ``sum_j w_j mean_j`` with its standard error."""
    value = np.einsum("mk,mk->m", weights, mean)
    var = np.einsum("mi,mij,mj->m", weights, cov, weights)
    return value, np.sqrt(np.maximum(var, 0.0) / n)


def _beta(cov: np.ndarray, iy: int, ic: int) -> np.ndarray:
    vc = cov[:, ic, ic]
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(vc > 0, cov[:, iy, ic] / vc, 0.0)
    return b


def _y_and_c(z: np.ndarray, ax: np.ndarray, l1: np.ndarray) -> np.ndarray:
    """Per-draw ``Y = max_i |x_i| Z_i`` and ``C = sum_i |x_i| Z_i - |x|_1``."""
    y = z[:, None, 0] * ax[None, :, 0]
    s = y.copy()
    for i in range(1, z.shape[1]):
        t = z[:, None, i] * ax[None, :, i]
        np.maximum(y, t, out=y)
        s += t
    return np.stack([y, s - l1[None, :]], axis=-1)


def mc_moments(g, pts: np.ndarray, n: int, seed: int, chunk_size: int = CHUNK_SIZE) -> _Moments:
    """Moments of ``(Y, C)`` at each point from ``n`` draws.

    Draws are produced in fixed chunks; chunk ``j`` uses the sub-seed
    ``derive_seed(seed, j)``, so results do not depend on how chunks are
    scheduled.
    """
    sampler = as_sampler(g)
    ax = np.abs(pts)
    l1 = ax.sum(axis=1)
    acc = _Moments(len(pts), 2)
    for j, lo in enumerate(range(0, n, chunk_size)):
        c = min(chunk_size, n - lo)
        z = sampler.sample(derive_seed(seed, j), c)
        if np.any(z < 0):
            raise GeneratorError("sampler emitted negative values")
        acc.add(_y_and_c(z, ax, l1))
    return acc


def _mc_from_moments(acc: _Moments, control_variate: bool):
    cov = acc.cov()
    w = np.zeros_like(acc.mean)
    w[:, 0] = 1.0
    if control_variate:
        w[:, 1] = -_beta(cov, 0, 1)
    return _cv_estimate(acc.mean, cov, acc.n, w)


def eval_mc(g, x, n: int, seed: int, control_variate: bool = False,
            chunk_size: int = CHUNK_SIZE) -> NormEstimate:
    """Monte Carlo estimate of the norm from ``n`` draws of ``g``.

    By default this is the plain sample mean of ``max_i |x_i| Z_i`` with
    standard error ``std / sqrt(n)``; ``control_variate=True`` switches to the
    regression estimator described in :class:`MonteCarlo`.
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    pts, single = _points(x, g.dimension)
    acc = mc_moments(g, pts, n, seed, chunk_size)
    value, se = _mc_from_moments(acc, control_variate)
    if single:
        return NormEstimate(float(value[0]), float(se[0]), n)
    return NormEstimate(value, se, n)


def norm(D: DNorm, x) -> NormEstimate:
    """Evaluate ``D`` at a point or an ``(m, d)`` grid according to its policy."""
    if D.is_exact:
        v = eval_exact(D.generator, x)
        return NormEstimate(v, 0.0 if np.ndim(v) == 0 else np.zeros_like(v), 0)
    p = D.policy
    return eval_mc(D.generator, x, p.samples, p.seed, control_variate=p.control_variate)


# --- derived functionals ---------------------------------------------------------------


def sms_cdf(D: DNorm, x) -> float | np.ndarray:
    """``G(x) = exp(-||x||_D)`` for ``x <= 0``."""
    pts = np.asarray(x, dtype=float)
    if np.any(pts > 0):
        raise ValueError("the standard max-stable df is defined for x <= 0 only")
    return np.exp(-norm(D, pts).value)


def copula_value(D: DNorm, u) -> float | np.ndarray:
    """Extreme value copula ``C(u) = exp(-||log u||_D)`` on ``(0, 1]^d``."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0) or np.any(u > 1):
        raise ValueError("copula arguments must lie in (0, 1]")
    return np.exp(-norm(D, np.log(u)).value)


def stdf(D: DNorm, x) -> float | np.ndarray:
    """Stable tail dependence function; the norm on the nonnegative orthant."""
    pts = np.asarray(x, dtype=float)
    if np.any(pts < 0):
        raise ValueError("the stable tail dependence function needs x >= 0")
    return norm(D, pts).value


def pickands(D: DNorm, t) -> float:
    """Pickands dependence function ``D(t) = ||(t_1, .., t_{d-1}, 1 - sum t)||_D``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (D.dimension - 1,):
        raise GeneratorError(f"expected {D.dimension - 1} simplex coordinates, got {t.shape[0]}")
    if np.any(t < 0) or math.fsum(t) > 1:
        raise ValueError("t must lie in the unit simplex")
    return norm(D, np.append(t, 1.0 - math.fsum(t))).value


def pickands_trace(D: DNorm, k: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Pickands function on the simplex grid of step ``1/k``.

    Returns ``(t, values)`` with ``t`` of shape ``(m, d-1)``.
    """
    grid = simplex_grid(D.dimension, k)
    return grid[:, :-1], np.atleast_1d(norm(D, grid).value)


class _ProjectedSampler(SamplerGenerator):
    def __init__(self, base: SamplerGenerator, idx: list[int]):
        self.base = base
        self.idx = idx
        super().__init__(len(idx), lambda rng, c: base.draw(rng, c)[:, idx], bound=base.bound,
                         name="projection")

    def sample(self, seed, count):
        return self.base.sample(seed, count)[:, self.idx]


def project(D: DNorm, indices: Sequence[int]) -> DNorm:
    """Norm of the coordinate restriction ``(Z_i)_{i in indices}`` (0-based)."""
    idx = sorted(set(int(i) for i in indices))
    if not idx:
        raise ValueError("projection needs a nonempty index set")
    if idx[0] < 0 or idx[-1] >= D.dimension:
        raise ValueError(f"indices {idx} out of range for dimension {D.dimension}")
    g = D.generator
    if isinstance(g, DiscreteGenerator):
        from .generators import dedup

        sub = DiscreteGenerator(g.atom_num[:, idx], g.atom_den, g.prob_num, g.prob_den)
        return DNorm(dedup(sub), D.policy)
    return DNorm(_ProjectedSampler(g, idx), D.policy)


def extremal_coefficient(D: DNorm, S: Sequence[int]) -> float:
    """``||sum_{i in S} e_i||_D``; between 1 (complete dependence) and ``|S|``."""
    idx = sorted(set(int(i) for i in S))
    if not idx:
        raise ValueError("extremal coefficient needs a nonempty index set")
    x = np.zeros(D.dimension)
    x[idx] = 1.0
    return norm(D, x).value


class LogisticIndex(enum.Enum):
    INFINITY = "inf"


def logistic_norm_ref(x, lam) -> float:
    """Closed-form logistic norm ``(sum |x_i|^lam)^(1/lam)``.

    ``lam`` is a real ``>= 1`` or ``LogisticIndex.INFINITY`` for the sup-norm.
    Reference values only; no generator is attached.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    if lam is LogisticIndex.INFINITY or lam == math.inf:
        return float(ax.max())
    if lam < 1:
        raise ValueError("logistic index must be >= 1")
    if lam == 1:
        return math.fsum(ax)
    top = ax.max()
    if top == 0:
        return 0.0
    return float(top * np.sum((ax / top) ** lam) ** (1.0 / lam))


def simplex_grid(d: int, k: int = 8) -> np.ndarray:
    """All points of the unit L1-simplex with coordinates in multiples of ``1/k``.

    The unit vectors are included.  Ordered lexicographically (descending in
    the first coordinate).
    """
    if d < 1 or k < 1:
        raise ValueError("need d >= 1 and k >= 1")
    pts = []
    for head in itertools.product(range(k, -1, -1), repeat=d - 1):
        s = sum(head)
        if s <= k:
            pts.append(head + (k - s,))
    return np.array(pts, dtype=float) / k


def parse_grid(spec: str, d: int) -> np.ndarray:
    """Grid from ``"simplex:k"`` or a CSV file of points (one per row)."""
    if spec.startswith("simplex:"):
        return simplex_grid(d, int(spec.split(":", 1)[1]))
    pts = np.atleast_2d(np.loadtxt(spec, delimiter=",", ndmin=2))
    if pts.shape[1] != d:
        raise ValueError(f"grid file {spec} has {pts.shape[1]} columns, expected {d}")
    return pts
