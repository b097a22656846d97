"""Multiplication of D-norms, tracks, idempotency and complete dependence frames.

The product of two D-norms is the norm generated by ``Z1 * Z2`` for
independent generators.  The sup-norm is its identity element and the
L1-norm absorbs everything.  Iterating a product gives a nondecreasing
track bounded by the L1-norm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .evaluation import (
    CHUNK_SIZE,
    EXACT,
    DNorm,
    MonteCarlo,
    _beta,
    _cv_estimate,
    _mc_from_moments,
    _Moments,
    _y_and_c,
    eval_exact,
    l1_norm,
    norm,
    simplex_grid,
)
from .generators import (
    GeneratorError,
    PartitionFrame,
    ProductSampler,
    angular_normalize,
    as_sampler,
    derive_seed,
    partition_generator,
    product_generator,
    product_sampler,
)

__all__ = [
    "multiply",
    "power",
    "TrackReport",
    "track",
    "track_same",
    "IdempotencyResult",
    "is_idempotent",
    "InconsistentFrameError",
    "UnionFind",
    "detect_cdf",
    "idempotent_limit",
    "Classification",
    "classify_idempotent",
]

EXACT_TOL = 1e-6
IDEMPOTENT_TOL = 1e-12
FRAME_MATCH_TOL = 1e-9
CDF_EPS_EXACT = 1e-9
CDF_EPS_MC = 1e-3


def _check_same_dimension(*norms: DNorm):
    dims = {D.dimension for D in norms}
    if len(dims) != 1:
        raise GeneratorError(f"dimension mismatch: {sorted(dims)}")


def multiply(D1: DNorm, D2: DNorm) -> DNorm:
    """Norm generated by the product of independent generators of ``D1``, ``D2``.

    Two exact norms give an exact norm; the product law is reduced with
    :func:`angular_normalize`, which leaves the norm unchanged but keeps the
    atom count down under iteration.  Otherwise the result is sampler-backed
    and inherits the first Monte Carlo policy.
    """
    _check_same_dimension(D1, D2)
    if D1.is_exact and D2.is_exact:
        return DNorm(angular_normalize(product_generator(D1.generator, D2.generator)), EXACT)
    policy = D1.policy if not D1.is_exact else D2.policy
    return DNorm(product_sampler(D1.generator, D2.generator), policy)


def power(D: DNorm, n: int) -> DNorm:
    """``n``-fold product of independent copies; ``power(D, 1)`` is ``D``."""
    if n < 1:
        raise ValueError("power needs n >= 1")
    out = D
    for _ in range(n - 1):
        out = multiply(out, D)
    return out


@dataclass
class TrackReport:
    """Grid values of the iterated products ``D1, D1 D2, D1 D2 D3, ...``.

    ``values[n-1]`` holds step ``n``.  ``pooled_se`` is the standard error of
    the final window comparison, ``sqrt(se_n**2 + se_{n-window}**2)`` (zero
    for exact tracks).
    """

    grid: np.ndarray
    values: np.ndarray
    standard_errors: np.ndarray
    converged: bool
    converged_at: int | None
    final_sup_diff: float
    window: int
    exact: bool
    pooled_se: np.ndarray
    limit_frame: PartitionFrame | None = None
    limit_values: np.ndarray | None = None

    @property
    def steps(self) -> int:
        return len(self.values)

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def is_monotone(self, z: float = 3.0) -> bool:
        """Per-point sequences are nondecreasing (exactly, or up to ``z`` se)."""
        inc = np.diff(self.values, axis=0)
        if self.exact:
            return bool(np.all(inc >= 0))
        se = np.hypot(self.standard_errors[1:], self.standard_errors[:-1])
        return bool(np.all(inc >= -z * se - _rounding_slack(self.values[1:])))

    def is_bounded(self, z: float = 3.0) -> bool:
        """Every value is at most the L1-norm of its grid point."""
        bound = l1_norm(self.grid)
        slack = 0.0 if self.exact else z * self.standard_errors + _rounding_slack(self.values)
        return bool(np.all(self.values <= bound + slack))

    def rows(self):
        """``(step, point_id, value)`` triples, step-major."""
        for n, row in enumerate(self.values, start=1):
            for j, v in enumerate(row):
                yield n, j, float(v)


def _rounding_slack(values: np.ndarray) -> np.ndarray:
    # Long products are heavy tailed; the control-variate difference of two
    # large sample means carries float error even where its se is zero.
    return 1e-6 * np.abs(values) + 1e-12


def _factor_list(D: DNorm) -> list:
    g = as_sampler(D.generator)
    return list(g.factors) if isinstance(g, ProductSampler) else [g]


def _exact_track(Ds, grid, tol, window):
    G = Ds[0].generator
    values = [eval_exact(G, grid)]
    converged, at, diff = False, None, math.inf
    for n, D in enumerate(Ds[1:], start=2):
        G = angular_normalize(product_generator(G, D.generator))
        values.append(eval_exact(G, grid))
        if n > window:
            diff = float(np.max(np.abs(values[-1] - values[-1 - window])))
            if diff < tol:
                converged, at = True, n
                break
    values = np.array(values)
    return TrackReport(grid, values, np.zeros_like(values), converged, at, diff, window, True,
                       np.zeros(len(grid)))


def _mc_track(Ds, grid, tol, window, z, policy: MonteCarlo):
    steps = [_factor_list(D) for D in Ds]
    n_total, seed = policy.samples, policy.seed
    ax = np.abs(grid)
    l1 = ax.sum(axis=1)
    chunks = []
    for j, lo in enumerate(range(0, n_total, CHUNK_SIZE)):
        chunks.append((derive_seed(seed, j), min(CHUNK_SIZE, n_total - lo)))
    cur = [None] * len(chunks)
    lag = [None] * len(chunks)
    # global factor index of the first factor of each step (1-based)
    offsets = list(itertools.accumulate([0] + [len(f) for f in steps]))

    def apply(state, j, step_idx):
        cs, c = chunks[j]
        out = state[j]
        for k, f in enumerate(steps[step_idx], start=offsets[step_idx] + 1):
            draws = f.sample(cs if k == 1 else derive_seed(cs, k), c)
            out = draws if out is None else out * draws
        state[j] = out

    values, ses = [], []
    converged, at, diff = False, None, math.inf
    pooled = np.zeros(len(grid))
    for n in range(1, len(steps) + 1):
        acc = _Moments(len(grid), 2)
        joint = _Moments(len(grid), 4) if n > window else None
        for j in range(len(chunks)):
            apply(cur, j, n - 1)
            yc = _y_and_c(cur[j], ax, l1)
            acc.add(yc)
            if joint is not None:
                apply(lag, j, n - window - 1)
                joint.add(np.concatenate([yc, _y_and_c(lag[j], ax, l1)], axis=-1))
        v, se = _mc_from_moments(acc, policy.control_variate)
        values.append(v)
        ses.append(se)
        if joint is None:
            continue
        cov = joint.cov()
        w = np.zeros_like(joint.mean)
        w[:, 0], w[:, 2] = 1.0, -1.0
        if policy.control_variate:
            w[:, 1] = -_beta(cov, 0, 1)
            w[:, 3] = _beta(cov, 2, 3)
        d, dse = _cv_estimate(joint.mean, cov, joint.n, w)
        diff = float(np.max(np.abs(values[-1] - values[-1 - window])))
        pooled = np.hypot(se, ses[-1 - window])
        if np.all(np.abs(d) <= np.maximum(tol, z * dse)):
            converged, at = True, n
            break
    return TrackReport(grid, np.array(values), np.array(ses), converged, at, diff, window,
                       False, pooled)


def track(Ds: Iterable[DNorm], grid=None, max_steps: int = 64, tol: float = EXACT_TOL,
          window: int | None = None, z: float = 3.0) -> TrackReport:
    """Iterate the multiplication over ``Ds`` and record grid values.

    Parameters
    ----------
    Ds : iterable of DNorm
        May be infinite; at most ``max_steps`` norms are consumed.
    grid : array_like, optional
        Evaluation points, default the 1/8 simplex grid.
    tol : float
        Exact tracks converge once the sup-difference between step ``n`` and
        step ``n - window`` drops below ``tol``.
    window : int, optional
        Comparison lag; default 1 for exact tracks and 16 for Monte Carlo.
    z : float
        Monte Carlo tracks converge once every point's paired difference over
        the window is within ``max(tol, z * se)``, the standard error taken
        from the common-random-number pairing of the two steps.

    Notes
    -----
    If any norm in the track is sampler-backed the whole track is Monte
    Carlo, using the first Monte Carlo policy.  Step ``n`` then uses exactly
    the draws of ``power``-style products, so ``power(D, n)`` evaluated with
    the same policy reproduces step ``n`` of ``track_same(D)``.
    """
    Ds = list(itertools.islice(iter(Ds), max_steps))
    if not Ds:
        raise ValueError("track needs at least one norm")
    _check_same_dimension(*Ds)
    if not tol > 0:
        raise ValueError("tol must be positive")
    d = Ds[0].dimension
    grid = simplex_grid(d, 8) if grid is None else np.atleast_2d(np.asarray(grid, dtype=float))
    if all(D.is_exact for D in Ds):
        return _exact_track(Ds, grid, tol, 1 if window is None else window)
    policy = next(D.policy for D in Ds if not D.is_exact)
    return _mc_track(Ds, grid, tol, 16 if window is None else window, z, policy)


def track_same(D: DNorm, grid=None, max_steps: int = 64, tol: float = EXACT_TOL,
               window: int | None = None, z: float = 3.0) -> TrackReport:
    """Track of the powers of ``D``, with the predicted idempotent limit attached."""
    report = track(itertools.repeat(D), grid, max_steps, tol, window, z)
    report.limit_frame = detect_cdf(D)
    report.limit_values = np.atleast_1d(report.limit_frame.norm_value(report.grid))
    return report


# --- idempotency ----------------------------------------------------------------------


@dataclass(frozen=True)
class IdempotencyResult:
    idempotent: bool
    witness_point: np.ndarray
    deviation: float
    standard_error: float = 0.0

    def __bool__(self) -> bool:
        return self.idempotent


def is_idempotent(D: DNorm, grid=None, tol: float | None = None) -> IdempotencyResult:
    """Compare ``D`` with ``D*D`` on the grid.

    Exact norms: idempotent iff the largest deviation is ``<= tol`` (default
    1e-12).  Monte Carlo norms: iff every deviation is within ``z`` pooled
    standard errors (plus ``tol``, default 0).  The witness is the grid point
    with the largest absolute deviation.
    """
    grid = simplex_grid(D.dimension, 8) if grid is None else np.atleast_2d(np.asarray(grid, float))
    e1 = norm(D, grid)
    e2 = norm(multiply(D, D), grid)
    dev = np.atleast_1d(e2.value - e1.value)
    k = int(np.argmax(np.abs(dev)))
    if D.is_exact:
        tol = IDEMPOTENT_TOL if tol is None else tol
        ok = bool(np.abs(dev[k]) <= tol)
        return IdempotencyResult(ok, grid[k], float(dev[k]))
    se = np.hypot(e1.standard_error, e2.standard_error)
    ok = bool(np.all(np.abs(dev) <= D.policy.z * se + (tol or 0.0)))
    return IdempotencyResult(ok, grid[k], float(dev[k]), float(se[k]))


class InconsistentFrameError(GeneratorError):
    """Pairwise complete dependence was not transitive at the given threshold."""


class UnionFind:
    """Disjoint-set forest over ``0..n-1`` with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted(out.values(), key=lambda g: g[0])


def detect_cdf(D: DNorm, eps: float | None = None) -> PartitionFrame:
    """Complete dependence frame from the bivariate extremal coefficients.

    A pair ``(i, j)`` is completely dependent iff its extremal coefficient is
    ``<= 1 + eps`` (exact, default 1e-9) or, for Monte Carlo norms, iff the
    upper ``z``-se bound is ``< 1 + eps`` (default 1e-3).  Pairs are merged
    with union-find and every pair inside a merged block is re-checked.

    Raises
    ------
    InconsistentFrameError
        When a merged block contains a pair that failed the criterion; more
        samples usually fix this.
    """
    d = D.dimension
    pairs = list(itertools.combinations(range(d), 2))
    if not pairs:
        return PartitionFrame(d)
    pts = np.zeros((len(pairs), d))
    for r, (i, j) in enumerate(pairs):
        pts[r, [i, j]] = 1.0
    est = norm(D, pts)
    value = np.atleast_1d(est.value)
    if D.is_exact:
        eps = CDF_EPS_EXACT if eps is None else eps
        complete = value <= 1 + eps
    else:
        eps = CDF_EPS_MC if eps is None else eps
        complete = value + D.policy.z * np.atleast_1d(est.standard_error) < 1 + eps
    dep = {p for p, c in zip(pairs, complete) if c}
    uf = UnionFind(d)
    for i, j in dep:
        uf.union(i, j)
    blocks = [g for g in uf.groups() if len(g) >= 2]
    for b in blocks:
        for p in itertools.combinations(b, 2):
            if p not in dep:
                raise InconsistentFrameError(
                    f"pairs merged into block {[i + 1 for i in b]} but {tuple(i + 1 for i in p)} "
                    "is not completely dependent; increase the sample size")
    return PartitionFrame(d, tuple(tuple(b) for b in blocks))


def idempotent_limit(D: DNorm) -> DNorm:
    """The idempotent norm sharing ``D``'s complete dependence frame."""
    return DNorm(partition_generator(detect_cdf(D)), EXACT)


@dataclass(frozen=True)
class Classification:
    status: str  # "idempotent" | "not idempotent" | "idempotency-violation"
    frame: PartitionFrame | None
    witness: IdempotencyResult
    frame_deviation: float | None = None

    @property
    def idempotent(self) -> bool:
        return self.status == "idempotent"


def classify_idempotent(D: DNorm, grid=None, tol: float | None = None,
                        match_tol: float = FRAME_MATCH_TOL) -> Classification:
    """Canonical form of an idempotent norm.

    Returns the frame whose closed-form norm matches ``D`` on the grid.  If
    ``D`` passes the idempotency test but no frame matches, the status is
    ``"idempotency-violation"``, which points at numerical trouble.
    """
    grid = simplex_grid(D.dimension, 8) if grid is None else np.atleast_2d(np.asarray(grid, float))
    res = is_idempotent(D, grid, tol)
    if not res.idempotent:
        return Classification("not idempotent", None, res)
    try:
        frame = detect_cdf(D)
    except InconsistentFrameError:
        return Classification("idempotency-violation", None, res)
    est = norm(D, grid)
    dev = np.abs(np.atleast_1d(est.value) - frame.norm_value(grid))
    if D.is_exact:
        ok = bool(np.all(dev <= match_tol))
    else:
        ok = bool(np.all(dev <= D.policy.z * np.atleast_1d(est.standard_error) + match_tol))
    status = "idempotent" if ok else "idempotency-violation"
    return Classification(status, frame if ok else None, res, float(dev.max()))
