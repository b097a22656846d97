"""Independent reference implementations used as ground truth in tests.

Nothing here shares evaluation code with the main modules: the norm oracle is
a plain loop over ``Fraction`` values and the simulation oracle replays the
Poisson point stream for a fixed number of points without a stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import is_idempotent
from .evaluation import DNorm, eval_exact, l1_norm, simplex_grid, sup_norm
from .generators import DiscreteGenerator, GeneratorError, as_sampler, derive_seed

__all__ = [
    "brute_force_norm",
    "DiscreteScalarLaw",
    "abs_sum_expectations",
    "LemmaVerdict",
    "lemma_classify",
    "max_decomposition_check",
    "ScanEntry",
    "ScanReport",
    "bivariate_idempotency_scan",
    "fixed_horizon_sms",
    "two_point_generator",
    "random_generator",
    "random_mean_zero_law",
    "LEMMA_TOL",
]

LEMMA_TOL = 1e-12


def brute_force_norm(g: DiscreteGenerator, x, as_fraction: bool = False):
    """``sum_k p_k max_i |x_i| z_ki`` by direct enumeration in rationals."""
    xs = [abs(Fraction(float(v))) for v in np.asarray(x, dtype=float).ravel()]
    if len(xs) != g.dimension:
        raise GeneratorError(f"dimension mismatch: point of length {len(xs)}, generator has {g.dimension}")
    total = Fraction(0)
    for atom, p in zip(g.exact_atoms(), g.exact_probs()):
        best = Fraction(0)
        for xi, zi in zip(xs, atom):
            if xi * zi > best:
                best = xi * zi
        total += p * best
    return total if as_fraction else float(total)


@dataclass(frozen=True)
class DiscreteScalarLaw:
    """A finitely supported real random variable with values in ``[-c, c]``."""

    support: tuple[Fraction, ...]
    probs: tuple[Fraction, ...]
    bound: Fraction

    def __init__(self, support: Sequence, probs: Sequence, bound=None):
        sup = tuple(Fraction(v) for v in support)
        pr = tuple(Fraction(p) for p in probs)
        if len(sup) != len(pr) or not sup:
            raise GeneratorError("support and probs must be nonempty and of equal length")
        if any(p < 0 for p in pr):
            raise GeneratorError("probabilities must be nonnegative")
        if abs(float(sum(pr)) - 1) > 1e-12:
            raise GeneratorError(f"probabilities sum to {float(sum(pr))!r}, not 1")
        c = max(abs(v) for v in sup) if bound is None else Fraction(bound)
        if any(abs(v) > c for v in sup):
            raise GeneratorError(f"support exceeds the bound {float(c)}")
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "probs", pr)
        object.__setattr__(self, "bound", c)

    @property
    def mean(self) -> Fraction:
        return sum((v * p for v, p in zip(self.support, self.probs)), Fraction(0))

    def require_mean_zero(self, tol: float = LEMMA_TOL) -> None:
        if abs(self.mean) > tol:
            raise GeneratorError(f"law has mean {float(self.mean)!r}, expected 0")


def abs_sum_expectations(law: DiscreteScalarLaw) -> tuple[Fraction, Fraction]:
    """``(E|X + Y|, E|X|)`` for ``Y`` an independent copy of ``X``, exactly."""
    law.require_mean_zero()
    e_sum = Fraction(0)
    for u, p in zip(law.support, law.probs):
        for v, q in zip(law.support, law.probs):
            e_sum += p * q * abs(u + v)
    e_abs = sum((abs(v) * p for v, p in zip(law.support, law.probs)), Fraction(0))
    return e_sum, e_abs


@dataclass(frozen=True)
class LemmaVerdict:
    equality: bool
    two_point_or_zero: bool
    e_abs_sum: Fraction
    e_abs: Fraction

    @property
    def agrees(self) -> bool:
        return self.equality == self.two_point_or_zero


def _is_symmetric_two_point_or_zero(law: DiscreteScalarLaw, tol: float) -> bool:
    mass: dict[Fraction, Fraction] = {}
    for v, p in zip(law.support, law.probs):
        if p > 0:
            mass[v] = mass.get(v, Fraction(0)) + p
    values = sorted(mass)
    if values == [0]:
        return True
    if len(values) != 2 or values[0] != -values[1]:
        return False
    return abs(float(mass[values[0]]) - 0.5) <= tol


def lemma_classify(law: DiscreteScalarLaw, tol: float = LEMMA_TOL) -> LemmaVerdict:
    """Compare ``E|X+Y| = E|X|`` with the structural test on the law.

    The two tests are computed independently; ``verdict.agrees`` is False only
    if a law contradicts the characterization.
    """
    e_sum, e_abs = abs_sum_expectations(law)
    equality = abs(float(e_sum - e_abs)) <= tol
    return LemmaVerdict(equality, _is_symmetric_two_point_or_zero(law, tol), e_sum, e_abs)


def max_decomposition_check(a, b) -> bool:
    """``max(a, b) == (a + b)/2 + |a - b|/2`` in exact arithmetic."""
    fa, fb = Fraction(a), Fraction(b)
    return max(fa, fb) == (fa + fb) / 2 + abs(fa - fb) / 2


@dataclass(frozen=True)
class ScanEntry:
    index: int
    idempotent: bool
    matched: str | None


@dataclass(frozen=True)
class ScanReport:
    entries: tuple[ScanEntry, ...]

    @property
    def counterexamples(self) -> list[int]:
        """Indices of idempotent norms equal to neither the sup- nor the L1-norm."""
        return [e.index for e in self.entries if e.idempotent and e.matched is None]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def bivariate_idempotency_scan(family: Sequence[DiscreteGenerator], grid=None,
                               tol: float = 1e-9) -> ScanReport:
    """Check that every idempotent bivariate norm in ``family`` is sup or L1 on ``grid``."""
    grid = simplex_grid(2) if grid is None else np.atleast_2d(np.asarray(grid, float))
    entries = []
    for i, g in enumerate(family):
        if g.dimension != 2:
            raise GeneratorError(f"family member {i} is not bivariate")
        idem = is_idempotent(DNorm.exact(g), grid).idempotent
        matched = None
        if idem:
            values = eval_exact(g, grid)
            if np.all(np.abs(values - sup_norm(grid)) <= tol):
                matched = "sup"
            elif np.all(np.abs(values - l1_norm(grid)) <= tol):
                matched = "L1"
        entries.append(ScanEntry(i, idem, matched))
    return ScanReport(tuple(entries))


def fixed_horizon_sms(g, seed: int, n_points: int, n: int = 1, block_size: int = 1024) -> np.ndarray:
    """Max-stable samples from exactly ``n_points`` Poisson points each.

    Replays the same point stream as :func:`dnorm.simulation.sample_batch`
    but never stops early, so for a bounded generator it must agree with the
    adaptive result exactly.
    """
    sampler = as_sampler(g)
    out = []
    for b, lo in enumerate(range(0, n, block_size)):
        count = min(block_size, n - lo)
        rng = np.random.default_rng(derive_seed(seed, b))
        gamma = np.zeros(count)
        running = np.zeros((count, sampler.dimension))
        for _ in range(n_points):
            gamma = gamma + rng.exponential(size=count)
            running = np.maximum(running, sampler.draw(rng, count) / gamma[:, None])
        out.append(-1.0 / running)
    return np.concatenate(out)


def two_point_generator(m) -> DiscreteGenerator:
    """Atoms ``(1+m, 1-m)`` and ``(1-m, 1+m)`` with probability 1/2 each."""
    m = Fraction(m)
    if not 0 <= m <= 1:
        raise GeneratorError("m must lie in [0, 1]")
    return DiscreteGenerator.from_values([[1 + m, 1 - m], [1 - m, 1 + m]],
                                         [Fraction(1, 2), Fraction(1, 2)])


# --- random corpora ----------------------------------------------------------------


def random_generator(rng: np.random.Generator, d: int, K: int, levels: int = 8) -> DiscreteGenerator:
    """A random discrete generator with ``K`` atoms and exact unit means.

    Atom entries start on ``{0, ..., levels}`` and each coordinate is then
    divided by its mean, in rationals.
    """
    while True:
        raw = rng.integers(0, levels + 1, size=(K, d))
        weights = rng.integers(1, 10, size=K)
        totals = raw.T @ weights
        if np.all(totals > 0):
            break
    wsum = int(weights.sum())
    atoms = [[Fraction(int(raw[k, i]) * wsum, int(totals[i])) for i in range(d)] for k in range(K)]
    probs = [Fraction(int(w), wsum) for w in weights]
    return DiscreteGenerator.from_values(atoms, probs)


def random_mean_zero_law(rng: np.random.Generator, max_atoms: int = 6, grid: int = 16) -> DiscreteScalarLaw:
    """A random mean-zero law on the ``1/grid`` lattice in ``[-1, 1]``.

    A share of draws are symmetric two-point or degenerate laws so that both
    sides of the characterization are exercised.  General laws are proposed
    with random integer weights and rejected until their mean vanishes; the
    last atom is chosen to balance the others when that is possible.
    """
    u = rng.random()
    if u < 0.1:
        m = Fraction(int(rng.integers(1, grid + 1)), grid)
        return DiscreteScalarLaw([-m, m], [Fraction(1, 2)] * 2)
    if u < 0.15:
        return DiscreteScalarLaw([0], [1])
    while True:
        k = int(rng.integers(2, max_atoms + 1))
        values = [int(v) for v in rng.choice(np.arange(-grid, grid + 1), size=k - 1, replace=False)]
        weights = [int(w) for w in rng.integers(1, 6, size=k - 1)]
        imbalance = sum(v * w for v, w in zip(values, weights))
        if imbalance == 0:
            break
        # one more atom v with weight w and v * w = -imbalance
        options = [w for w in range(1, abs(imbalance) + 1)
                   if imbalance % w == 0 and abs(imbalance) // w <= grid
                   and -imbalance // w not in values]
        if options:
            w = int(rng.choice(options))
            values.append(-imbalance // w)
            weights.append(w)
            break
    total = sum(weights)
    return DiscreteScalarLaw([Fraction(v, grid) for v in values],
                             [Fraction(w, total) for w in weights])
