"""Generators of D-norms.

A generator is a nonnegative random vector ``Z`` with ``E(Z_i) = 1`` for every
coordinate.  Two representations are provided:

``DiscreteGenerator``
    A finite-support law held in exact rational arithmetic (integer numerators
    over a common denominator).  Norms computed from it are exact up to the
    final rounding to ``float``.

``SamplerGenerator``
    A seeded sampling procedure, used for continuous or otherwise
    non-enumerable generators and evaluated by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "GeneratorError",
    "AtomLimitError",
    "ValidationIssue",
    "ValidationReport",
    "DiscreteGenerator",
    "SamplerGenerator",
    "ProductSampler",
    "PartitionFrame",
    "derive_seed",
    "as_sampler",
    "validate_generator",
    "require_valid",
    "constant_generator",
    "permutation_generator",
    "partition_generator",
    "scaled_copula_generator",
    "independent_uniform_2u",
    "comonotone_2u",
    "iid_exponential",
    "truncate_normalize",
    "product_generator",
    "product_sampler",
    "angular_normalize",
    "mixture_generator",
    "dedup",
    "diagonal_generator",
    "sample_means",
    "SAMPLERS",
    "MAX_ATOMS",
]

PROB_TOL = 1e-12
MEAN_TOL = 1e-9
MAX_ATOMS = 10**6


class GeneratorError(ValueError):
    """Raised for malformed or invalid generators."""


class AtomLimitError(GeneratorError):
    """Raised when an exact product would exceed ``MAX_ATOMS`` atoms."""


def derive_seed(seed: int, *keys: int) -> int:
    """Deterministic 64-bit sub-seed for ``(seed, *keys)``.

    Uses ``numpy.random.SeedSequence(entropy=seed, spawn_key=keys)`` and takes
    the first 64-bit word of its generated state.
    """
    if seed < 0:
        raise ValueError("seeds must be nonnegative")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (bool, np.bool_)):
        raise TypeError("booleans are not numeric generator entries")
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise GeneratorError(f"non-finite value {v!r}")
        return Fraction(float(v))
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise GeneratorError(f"cannot parse {v!r} as a rational") from exc
    raise TypeError(f"unsupported numeric type {type(v).__name__}")


def _common_denominator(fracs: Iterable[Fraction]) -> tuple[list[int], int]:
    fracs = list(fracs)
    den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    return [f.numerator * (den // f.denominator) for f in fracs], den


def _int_array(values, shape=None) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    out[:] = [int(v) for v in values]
    return out if shape is None else out.reshape(shape)


def _reduce(nums: np.ndarray, den: int) -> tuple[np.ndarray, int]:
    g = math.gcd(den, *nums.ravel().tolist()) if nums.size else den
    if g > 1:
        nums = nums // g
        den //= g
    return nums, den


@dataclass(frozen=True, eq=False)
class DiscreteGenerator:
    """Finite-support generator law.

    Atoms and probabilities are stored as integer numerator arrays (object
    dtype, Python ints) over the common denominators ``atom_den`` and
    ``prob_den``.  Use :meth:`from_values` to build one from floats, ints,
    ``Fraction`` objects or strings such as ``"1/3"``.  Floats are converted
    exactly.
    """

    atom_num: np.ndarray
    atom_den: int
    prob_num: np.ndarray
    prob_den: int

    def __post_init__(self):
        if self.atom_num.ndim != 2 or self.atom_num.shape[0] < 1 or self.atom_num.shape[1] < 1:
            raise GeneratorError("atoms must form a nonempty K x d array")
        if self.prob_num.shape != (self.atom_num.shape[0],):
            raise GeneratorError(
                f"got {self.prob_num.shape[0]} probabilities for {self.atom_num.shape[0]} atoms"
            )
        if self.atom_den <= 0 or self.prob_den <= 0:
            raise GeneratorError("denominators must be positive")

    @classmethod
    def from_values(cls, atoms: Sequence[Sequence], probs: Sequence) -> "DiscreteGenerator":
        rows = [list(a) for a in atoms]
        if not rows:
            raise GeneratorError("a discrete generator needs at least one atom")
        d = len(rows[0])
        if d == 0 or any(len(r) != d for r in rows):
            raise GeneratorError("all atoms must have the same positive length")
        if len(probs) != len(rows):
            raise GeneratorError(f"got {len(probs)} probabilities for {len(rows)} atoms")
        anum, aden = _common_denominator(_to_fraction(v) for r in rows for v in r)
        pnum, pden = _common_denominator(_to_fraction(p) for p in probs)
        atom_num, atom_den = _reduce(_int_array(anum, (len(rows), d)), aden)
        prob_num, prob_den = _reduce(_int_array(pnum), pden)
        return cls(atom_num, atom_den, prob_num, prob_den)

    @property
    def dimension(self) -> int:
        return self.atom_num.shape[1]

    @property
    def size(self) -> int:
        return self.atom_num.shape[0]

    @cached_property
    def atoms(self) -> np.ndarray:
        """Atoms as a float array of shape ``(K, d)`` (correctly rounded)."""
        flat = [n / self.atom_den for n in self.atom_num.ravel().tolist()]
        return np.array(flat, dtype=float).reshape(self.atom_num.shape)

    @cached_property
    def probs(self) -> np.ndarray:
        return np.array([n / self.prob_den for n in self.prob_num.tolist()], dtype=float)

    def exact_atoms(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(n, self.atom_den) for n in row) for row in self.atom_num.tolist()]

    def exact_probs(self) -> list[Fraction]:
        return [Fraction(n, self.prob_den) for n in self.prob_num.tolist()]

    @property
    def bound(self) -> float:
        """Largest atom entry, an almost-sure bound for every coordinate."""
        return max(self.atom_num.ravel().tolist()) / self.atom_den

    def exact_means(self) -> list[Fraction]:
        totals = self.prob_num.dot(self.atom_num)
        den = self.prob_den * self.atom_den
        return [Fraction(int(t), den) for t in totals]

    def same_law(self, other: "DiscreteGenerator") -> bool:
        """Equality of the distributions (atom order and duplicates ignored)."""
        return self.dimension == other.dimension and _law(self) == _law(other)

    def same_representation(self, other: "DiscreteGenerator") -> bool:
        """Atom-by-atom equality (order matters)."""
        return (
            self.atom_num.shape == other.atom_num.shape
            and self.exact_atoms() == other.exact_atoms()
            and self.exact_probs() == other.exact_probs()
        )

    def __repr__(self) -> str:
        return f"DiscreteGenerator(dimension={self.dimension}, size={self.size})"


def _law(g: DiscreteGenerator) -> dict:
    out: dict = {}
    for atom, p in zip(g.exact_atoms(), g.exact_probs()):
        if p:
            out[atom] = out.get(atom, 0) + p
    return out


class SamplerGenerator:
    """A generator known through a seeded sampling procedure.

    Parameters
    ----------
    dimension : int
        Length of the emitted vectors.
    draw : callable
        ``draw(rng, count)`` returning a ``(count, dimension)`` float array of
        nonnegative values, where ``rng`` is a ``numpy.random.Generator``.
    bound : float or None
        Almost-sure upper bound ``c`` on every coordinate, or ``None`` if the
        generator is unbounded.
    name, params : optional
        Registry name and parameters, used for JSON serialization.
    """

    def __init__(self, dimension: int, draw: Callable, bound: float | None = None,
                 name: str | None = None, params: dict | None = None):
        if dimension < 1:
            raise GeneratorError("dimension must be positive")
        if bound is not None and not bound > 0:
            raise GeneratorError("bound must be positive")
        self.dimension = int(dimension)
        self._draw = draw
        self.bound = None if bound is None else float(bound)
        self.name = name
        self.params = dict(params or {})

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        out = np.asarray(self._draw(rng, count), dtype=float)
        if out.shape != (count, self.dimension):
            raise GeneratorError(
                f"sampler returned shape {out.shape}, expected {(count, self.dimension)}"
            )
        return out

    def sample(self, seed: int, count: int) -> np.ndarray:
        """``count`` draws; identical ``(seed, count)`` gives identical output."""
        return self.draw(np.random.default_rng(seed), count)

    def __repr__(self) -> str:
        label = self.name or "custom"
        return f"SamplerGenerator({label!r}, dimension={self.dimension}, bound={self.bound})"


class _DiscreteSampler(SamplerGenerator):
    def __init__(self, g: DiscreteGenerator):
        self.discrete = g
        atoms = g.atoms
        p = g.probs / g.probs.sum()

        def draw(rng, count):
            if len(p) == 1:
                # degenerate law: no randomness is consumed
                return np.repeat(atoms, count, axis=0)
            return atoms[rng.choice(len(p), size=count, p=p)]

        super().__init__(g.dimension, draw, bound=g.bound, name="discrete")


class _MappedSampler(SamplerGenerator):
    """Applies ``fn`` to the draws of ``base``, keeping its seed discipline."""

    def __init__(self, base: SamplerGenerator, fn: Callable, dimension: int,
                 bound: float | None, name: str | None = None, params: dict | None = None):
        self.base = base
        self._fn = fn
        super().__init__(dimension, lambda rng, count: fn(base.draw(rng, count)),
                         bound=bound, name=name, params=params)

    def sample(self, seed, count):
        out = np.asarray(self._fn(self.base.sample(seed, count)), dtype=float)
        return out


class ProductSampler(SamplerGenerator):
    """Componentwise product of independent generators.

    With :meth:`sample`, factor 1 is drawn with the master seed itself and
    factor ``k >= 2`` with ``derive_seed(seed, k)``, so a one-factor product
    reproduces its factor exactly.  Nested products are flattened.
    """

    def __init__(self, factors: Sequence):
        flat: list[SamplerGenerator] = []
        for f in factors:
            f = as_sampler(f)
            flat.extend(f.factors if isinstance(f, ProductSampler) else [f])
        if not flat:
            raise GeneratorError("a product needs at least one factor")
        dims = {f.dimension for f in flat}
        if len(dims) != 1:
            raise GeneratorError(f"dimension mismatch among factors: {sorted(dims)}")
        self.factors = tuple(flat)
        bounds = [f.bound for f in flat]
        bound = None if any(b is None for b in bounds) else math.prod(bounds)

        def draw(rng, count):
            out = flat[0].draw(rng, count)
            for f in flat[1:]:
                out = out * f.draw(rng, count)
            return out

        super().__init__(flat[0].dimension, draw, bound=bound, name="product")

    def factor_sample(self, k: int, seed: int, count: int) -> np.ndarray:
        """Draws of factor ``k`` (1-based) under the master ``seed``."""
        f = self.factors[k - 1]
        return f.sample(seed if k == 1 else derive_seed(seed, k), count)

    def sample(self, seed, count):
        out = self.factor_sample(1, seed, count)
        for k in range(2, len(self.factors) + 1):
            out = out * self.factor_sample(k, seed, count)
        return out


def as_sampler(g) -> SamplerGenerator:
    if isinstance(g, SamplerGenerator):
        return g
    if isinstance(g, DiscreteGenerator):
        return _DiscreteSampler(g)
    raise TypeError(f"not a generator: {g!r}")


# --- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # "negative_atom" | "negative_prob" | "prob_sum" | "unit_mean"
    location: tuple
    residual: float
    message: str


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self) -> bool:
        return self.ok

    @property
    def max_mean_residual(self) -> float:
        return max((i.residual for i in self.issues if i.kind == "unit_mean"), default=0.0)

    def __str__(self) -> str:
        if self.ok:
            return "valid generator"
        return "; ".join(i.message for i in self.issues)


def validate_generator(g: DiscreteGenerator, mean_tol: float = MEAN_TOL,
                       prob_tol: float = PROB_TOL) -> ValidationReport:
    """Check nonnegativity, total probability and unit means.

    Every violated invariant is listed with its atom/coordinate and the
    numeric residual; an empty report means the generator is valid.
    """
    issues = []
    for k, row in enumerate(g.atom_num.tolist()):
        for i, v in enumerate(row):
            if v < 0:
                val = v / g.atom_den
                issues.append(ValidationIssue(
                    "negative_atom", (k, i), -val, f"atom {k} coordinate {i + 1} is {val:g} < 0"))
    for k, p in enumerate(g.prob_num.tolist()):
        if p < 0:
            val = p / g.prob_den
            issues.append(ValidationIssue(
                "negative_prob", (k,), -val, f"probability {k} is {val:g} < 0"))
    total = Fraction(sum(g.prob_num.tolist()), g.prob_den)
    res = abs(float(total - 1))
    if res > prob_tol:
        issues.append(ValidationIssue(
            "prob_sum", (), res, f"probabilities sum to {float(total):.17g} (residual {res:.3g})"))
    for i, m in enumerate(g.exact_means()):
        res = abs(float(m - 1))
        if res > mean_tol:
            issues.append(ValidationIssue(
                "unit_mean", (i,), res,
                f"mean of coordinate {i + 1} is {float(m):.17g} != 1 (residual {res:.3g})"))
    return ValidationReport(issues)


def require_valid(g: DiscreteGenerator) -> DiscreteGenerator:
    report = validate_generator(g)
    if not report.ok:
        raise GeneratorError(f"invalid generator: {report}")
    return g


def sample_means(g: SamplerGenerator, n: int = 100_000, seed: int = 0):
    """Per-coordinate sample means and standard errors of ``n`` draws."""
    z = as_sampler(g).sample(seed, n)
    return z.mean(axis=0), z.std(axis=0, ddof=1) / math.sqrt(n)


# --- constructors -------------------------------------------------------------


def constant_generator(d: int) -> DiscreteGenerator:
    """The constant vector ``(1, ..., 1)``, which generates the sup-norm."""
    if d < 1:
        raise GeneratorError("dimension must be positive")
    return DiscreteGenerator.from_values([[1] * d], [1])


def permutation_generator(d: int) -> DiscreteGenerator:
    """Uniform random permutation of ``(d, 0, ..., 0)``; generates the L1-norm."""
    if d < 1:
        raise GeneratorError("dimension must be positive")
    atoms = [[d if i == k else 0 for i in range(d)] for k in range(d)]
    return DiscreteGenerator.from_values(atoms, [Fraction(1, d)] * d)


def diagonal_generator(xi: DiscreteGenerator, d: int) -> DiscreteGenerator:
    """Lift a univariate law ``xi`` to the vector ``(xi, ..., xi)`` in dimension ``d``."""
    if xi.dimension != 1:
        raise GeneratorError("xi must be univariate")
    atoms = [[a[0]] * d for a in xi.exact_atoms()]
    return DiscreteGenerator.from_values(atoms, xi.exact_probs())


@dataclass(frozen=True)
class PartitionFrame:
    """Disjoint coordinate blocks, each with at least two elements.

    Indices are 0-based.  Blocks are stored sorted (each block ascending,
    blocks ordered by their smallest index) so equal frames compare equal.
    """

    dimension: int
    blocks: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.dimension < 1:
            raise GeneratorError("dimension must be positive")
        blocks = tuple(sorted((tuple(sorted(set(b))) for b in self.blocks), key=lambda b: b[0] if b else -1))
        seen: set[int] = set()
        for b in blocks:
            if len(b) < 2:
                raise GeneratorError(f"block {list(b)} has fewer than two elements")
            for i in b:
                if not 0 <= i < self.dimension:
                    raise GeneratorError(f"index {i} out of range for dimension {self.dimension}")
                if i in seen:
                    raise GeneratorError(f"index {i} appears in more than one block")
                seen.add(i)
        object.__setattr__(self, "blocks", blocks)

    @property
    def singletons(self) -> tuple[int, ...]:
        covered = {i for b in self.blocks for i in b}
        return tuple(i for i in range(self.dimension) if i not in covered)

    def units(self) -> list[tuple[int, ...]]:
        """Blocks and complement singletons, ordered by smallest index."""
        return sorted(list(self.blocks) + [(j,) for j in self.singletons], key=lambda u: u[0])

    def norm_value(self, x) -> np.ndarray | float:
        """Closed form: sum of blockwise maxima of ``|x|`` plus the remaining ``|x_j|``."""
        ax = np.abs(np.asarray(x, dtype=float))
        parts = [ax[..., list(u)].max(axis=-1) for u in self.units()]
        return np.sum(parts, axis=0) if ax.ndim > 1 else float(math.fsum(parts))

    def to_lists(self, one_based: bool = False) -> list[list[int]]:
        off = 1 if one_based else 0
        return [[i + off for i in b] for b in self.blocks]


def enumerate_frames(d: int):
    """All partition frames of ``{0, ..., d-1}`` (including the empty frame)."""

    def set_partitions(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in set_partitions(rest):
            yield [[first]] + part
            for k in range(len(part)):
                yield part[:k] + [[first] + part[k]] + part[k + 1:]

    for part in set_partitions(list(range(d))):
        yield PartitionFrame(d, tuple(tuple(b) for b in part if len(b) >= 2))


__all__.append("enumerate_frames")


def partition_generator(frame: PartitionFrame) -> DiscreteGenerator:
    """Generator of the idempotent norm attached to ``frame``.

    With ``m`` units (blocks plus complement singletons), each unit is
    selected with probability ``1/m`` and receives the value ``m`` on all of
    its coordinates.
    """
    units = frame.units()
    m = len(units)
    atoms = []
    for u in units:
        row = [0] * frame.dimension
        for i in u:
            row[i] = m
        atoms.append(row)
    return DiscreteGenerator.from_values(atoms, [Fraction(1, m)] * m)


# --- built-in samplers -----------------------------------------------------------


def scaled_copula_generator(copula: Callable, d: int, name: str | None = None,
                            params: dict | None = None) -> SamplerGenerator:
    """``Z = 2U`` for ``U`` drawn by ``copula(rng, count)`` with uniform margins."""
    return SamplerGenerator(d, lambda rng, count: 2.0 * np.asarray(copula(rng, count)),
                            bound=2.0, name=name, params=params)


def independent_uniform_2u(dimension: int) -> SamplerGenerator:
    return scaled_copula_generator(lambda rng, n: rng.random((n, dimension)), dimension,
                                   name="independent_uniform_2u")


def comonotone_2u(dimension: int) -> SamplerGenerator:
    return scaled_copula_generator(
        lambda rng, n: np.repeat(rng.random((n, 1)), dimension, axis=1), dimension,
        name="comonotone_2u")


def iid_exponential(dimension: int) -> SamplerGenerator:
    return SamplerGenerator(dimension, lambda rng, n: rng.standard_exponential((n, dimension)),
                            bound=None, name="iid_exponential")


SAMPLERS: dict[str, Callable[..., SamplerGenerator]] = {
    "independent_uniform_2u": independent_uniform_2u,
    "comonotone_2u": comonotone_2u,
    "iid_exponential": iid_exponential,
}


def truncate_normalize(g, c: float, mu=None, samples: int = 100_000, seed: int = 0,
                       floor: float = 1e-6) -> SamplerGenerator:
    """Bounded version ``min(c, Z_i) / mu_i`` of a possibly unbounded generator.

    ``mu_i = E(min(c, Z_i))`` is estimated from ``samples`` draws (seed
    ``derive_seed(seed, 0)``) unless supplied.  The estimate and its standard
    error are attached as ``.mu`` and ``.mu_se``.  If ``g`` already declares a
    bound ``<= c`` the truncation is the identity and ``g`` is returned.

    Raises
    ------
    GeneratorError
        If ``c <= 0`` or some ``mu_i <= floor``.
    """
    g = as_sampler(g)
    if not c > 0:
        raise GeneratorError("truncation level must be positive")
    if g.bound is not None and g.bound <= c:
        return g
    if mu is None:
        z = np.minimum(g.sample(derive_seed(seed, 0), samples), c)
        mu = z.mean(axis=0)
        mu_se = z.std(axis=0, ddof=1) / math.sqrt(samples)
    else:
        mu = np.broadcast_to(np.asarray(mu, dtype=float), (g.dimension,)).copy()
        mu_se = np.zeros(g.dimension)
    if np.any(mu <= floor):
        bad = [i + 1 for i in np.flatnonzero(mu <= floor)]
        raise GeneratorError(f"truncated means too small at coordinates {bad}: {mu[mu <= floor]}")
    out = _MappedSampler(g, lambda z: np.minimum(z, c) / mu, g.dimension,
                         bound=c / float(mu.min()), name="truncated",
                         params={"c": c, "mu": mu.tolist()})
    out.mu, out.mu_se = mu, mu_se
    return out


# --- algebra on discrete laws ------------------------------------------------------


def dedup(g: DiscreteGenerator, floor: float = 0.0) -> DiscreteGenerator:
    """Merge identical atoms (summing probabilities) and drop light atoms.

    Atoms with probability ``<= floor`` are dropped; the default only removes
    zero-probability atoms so that unit means stay exact.  First-occurrence
    order is kept.
    """
    index: dict[tuple, int] = {}
    rows, probs = [], []
    for row, p in zip(g.atom_num.tolist(), g.prob_num.tolist()):
        key = tuple(row)
        k = index.get(key)
        if k is None:
            index[key] = len(rows)
            rows.append(row)
            probs.append(p)
        else:
            probs[k] += p
    cut = floor * g.prob_den
    keep = [k for k, p in enumerate(probs) if p > 0 and p > cut]
    if not keep:
        raise GeneratorError("all atoms were dropped")
    if len(keep) == g.size:
        return g
    a = np.empty((len(keep), g.dimension), dtype=object)
    a[:] = [rows[k] for k in keep]
    p = _int_array([probs[k] for k in keep])
    a, aden = _reduce(a, g.atom_den)
    p, pden = _reduce(p, g.prob_den)
    return DiscreteGenerator(a, aden, p, pden)


def _check_dims(g1, g2):
    if g1.dimension != g2.dimension:
        raise GeneratorError(f"dimension mismatch: {g1.dimension} vs {g2.dimension}")


def product_generator(g1: DiscreteGenerator, g2: DiscreteGenerator,
                      max_atoms: int = MAX_ATOMS) -> DiscreteGenerator:
    """Law of ``Z1 * Z2`` (componentwise) for independent ``Z1 ~ g1``, ``Z2 ~ g2``.

    Atoms are ordered with ``g1``'s index varying slowest, then deduplicated.
    """
    _check_dims(g1, g2)
    if g1.size * g2.size > max_atoms:
        raise AtomLimitError(
            f"product would have {g1.size * g2.size} atoms (limit {max_atoms}); "
            "use a Monte Carlo policy instead")
    d = g1.dimension
    a = (g1.atom_num[:, None, :] * g2.atom_num[None, :, :]).reshape(-1, d)
    p = np.multiply.outer(g1.prob_num, g2.prob_num).ravel()
    a, aden = _reduce(a, g1.atom_den * g2.atom_den)
    p, pden = _reduce(p, g1.prob_den * g2.prob_den)
    return dedup(DiscreteGenerator(a, aden, p, pden))


def product_sampler(*gens) -> ProductSampler:
    """Sampler of the componentwise product of independent draws."""
    return ProductSampler(gens)


def angular_normalize(g: DiscreteGenerator) -> DiscreteGenerator:
    """Equivalent generator whose atoms all have coordinate sum ``d``.

    Atom ``z`` becomes ``d z / |z|_1`` with probability ``p |z|_1 / d``;
    all-zero atoms are dropped and coinciding directions merged.  The D-norm
    is unchanged.
    """
    d = g.dimension
    atoms, probs = [], []
    for row, p in zip(g.atom_num.tolist(), g.prob_num.tolist()):
        s = sum(row)
        if s == 0 or p == 0:
            continue
        atoms.append([Fraction(d * v, s) for v in row])
        probs.append(Fraction(p * s, g.prob_den * g.atom_den * d))
    if not atoms:
        raise GeneratorError("generator has no nonzero atom")
    return dedup(DiscreteGenerator.from_values(atoms, probs))


def mixture_generator(g1: DiscreteGenerator, g2: DiscreteGenerator, w) -> DiscreteGenerator:
    """Law drawing from ``g1`` with probability ``w`` and from ``g2`` otherwise."""
    _check_dims(g1, g2)
    w = _to_fraction(w)
    if not 0 <= w <= 1:
        raise GeneratorError(f"mixture weight {w} outside [0, 1]")
    atoms = g1.exact_atoms() + g2.exact_atoms()
    probs = [w * p for p in g1.exact_probs()] + [(1 - w) * p for p in g2.exact_probs()]
    return dedup(DiscreteGenerator.from_values(atoms, probs))
