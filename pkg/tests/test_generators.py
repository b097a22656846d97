import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import generators
from dnorm import (
    AtomLimitError,
    DiscreteGenerator,
    GeneratorError,
    PartitionFrame,
    ProductSampler,
    angular_normalize,
    comonotone_2u,
    constant_generator,
    dedup,
    derive_seed,
    diagonal_generator,
    enumerate_frames,
    eval_exact,
    iid_exponential,
    independent_uniform_2u,
    mixture_generator,
    partition_generator,
    permutation_generator,
    product_generator,
    product_sampler,
    sample_means,
    simplex_grid,
    truncate_normalize,
    validate_generator,
)


def test_validate_constant_and_permutation():
    assert validate_generator(DiscreteGenerator.from_values([[1, 1]], [1])).ok
    assert validate_generator(DiscreteGenerator.from_values([[2, 0], [0, 2]], [0.5, 0.5])).ok


def test_validate_reports_mean_residual():
    report = validate_generator(DiscreteGenerator.from_values([[2, 0]], [1]))
    assert not report
    issues = {i.location: i.residual for i in report.issues if i.kind == "unit_mean"}
    assert issues == {(0,): 1.0, (1,): 1.0}
    assert "coordinate 2" in str(report)


def test_validate_lists_every_violation():
    g = DiscreteGenerator.from_values([[-1, 2], [3, 0]], [0.5, 0.4])
    kinds = sorted(i.kind for i in validate_generator(g).issues)
    assert kinds == ["negative_atom", "prob_sum", "unit_mean"]


def test_validate_tolerances():
    # probabilities off by 1e-13 and means off by 1e-10 are accepted
    g = DiscreteGenerator.from_values([[1 + 1e-10]], [1 - 1e-13])
    assert validate_generator(g).ok
    g = DiscreteGenerator.from_values([[1 + 1e-8]], [1])
    assert not validate_generator(g).ok


def test_constant_generator():
    g = constant_generator(2)
    assert g.exact_atoms() == [(1, 1)]
    assert g.exact_probs() == [1]
    assert constant_generator(1).exact_atoms() == [(1,)]


def test_permutation_generator():
    g = permutation_generator(3)
    assert g.exact_atoms() == [(3, 0, 0), (0, 3, 0), (0, 0, 3)]
    assert g.exact_probs() == [Fraction(1, 3)] * 3
    assert g.bound == 3.0


def test_dimension_must_be_positive():
    with pytest.raises(GeneratorError):
        constant_generator(0)
    with pytest.raises(GeneratorError):
        permutation_generator(0)


def test_floats_are_converted_exactly():
    g = DiscreteGenerator.from_values([[0.1, 1]], [1])
    assert g.exact_atoms()[0][0] == Fraction(0.1)
    assert g.exact_means()[1] == 1


def test_diagonal_generator():
    xi = DiscreteGenerator.from_values([[0.5], [1.5]], [0.5, 0.5])
    g = diagonal_generator(xi, 3)
    assert g.exact_atoms() == [(Fraction(1, 2),) * 3, (Fraction(3, 2),) * 3]
    # a diagonal generator yields the sup-norm
    for x in simplex_grid(3, 4):
        assert eval_exact(g, x) == np.abs(x).max()


def test_partition_frame_validation():
    with pytest.raises(GeneratorError):
        PartitionFrame(3, [(0,)])
    with pytest.raises(GeneratorError):
        PartitionFrame(3, [(0, 1), (1, 2)])
    with pytest.raises(GeneratorError):
        PartitionFrame(3, [(0, 3)])
    f = PartitionFrame(4, [(3, 1)])
    assert f.blocks == ((1, 3),)
    assert f.singletons == (0, 2)
    assert f.to_lists(one_based=True) == [[2, 4]]


def test_partition_generator_atoms():
    g = partition_generator(PartitionFrame(3, [(0, 1)]))
    assert g.exact_atoms() == [(2, 2, 0), (0, 0, 2)]
    assert g.exact_probs() == [Fraction(1, 2)] * 2
    assert validate_generator(g).ok


def test_partition_generator_extremes():
    assert partition_generator(PartitionFrame(3)).same_law(permutation_generator(3))
    assert partition_generator(PartitionFrame(3, [(0, 1, 2)])).same_law(constant_generator(3))


@pytest.mark.parametrize("d,count", [(1, 1), (2, 2), (3, 5), (4, 15)])
def test_enumerate_frames_counts(d, count):
    frames = list(enumerate_frames(d))
    assert len(frames) == count
    assert len({f.blocks for f in frames}) == count


def test_frame_norm_closed_form():
    f = PartitionFrame(3, [(0, 1)])
    g = partition_generator(f)
    for x in simplex_grid(3, 6):
        assert f.norm_value(x) == eval_exact(g, x)


def test_product_with_constant_is_identity(corpus):
    for g in corpus[:50]:
        assert product_generator(g, constant_generator(g.dimension)).same_law(g)


def test_product_atom_order():
    g1 = DiscreteGenerator.from_values([[2, 0], [0, 2]], [0.5, 0.5])
    g2 = DiscreteGenerator.from_values([[0.5, 1.5], [1.5, 0.5]], [0.5, 0.5])
    p = product_generator(g1, g2)
    assert p.exact_atoms() == [(1, 0), (3, 0), (0, 3), (0, 1)]


def test_product_atom_limit():
    g = permutation_generator(4)
    with pytest.raises(AtomLimitError):
        product_generator(g, g, max_atoms=15)


def test_product_dimension_mismatch():
    with pytest.raises(GeneratorError):
        product_generator(constant_generator(2), constant_generator(3))


def test_same_law_ignores_representation():
    a = DiscreteGenerator.from_values([[2, 0], [0, 2]], [0.5, 0.5])
    b = DiscreteGenerator.from_values([[0, 2], [2, 0], [2, 0]], [0.5, 0.25, 0.25])
    assert a.same_law(b)
    assert not a.same_representation(b)
    assert a.same_representation(permutation_generator(2))


def test_dedup_merges_and_keeps_order():
    g = DiscreteGenerator.from_values([[2, 0], [0, 2], [2, 0], [1, 1]], [0.25, 0.5, 0.25, 0])
    out = dedup(g)
    assert out.exact_atoms() == [(2, 0), (0, 2)]
    assert out.exact_probs() == [Fraction(1, 2)] * 2


@settings(max_examples=60, deadline=None)
@given(generators())
def test_angular_normalize_preserves_norm(g):
    h = angular_normalize(g)
    for atom in h.exact_atoms():
        assert sum(atom) == g.dimension
    grid = simplex_grid(g.dimension, 4)
    assert np.array_equal(eval_exact(g, grid), eval_exact(h, grid))
    assert validate_generator(h).ok


def test_mixture_generator():
    g = mixture_generator(partition_generator(PartitionFrame(3, [(0, 1)])), constant_generator(3), "1/2")
    assert validate_generator(g).ok
    assert g.size == 3
    with pytest.raises(GeneratorError):
        mixture_generator(constant_generator(2), constant_generator(2), 2)


def test_derive_seed_is_deterministic_and_distinct():
    assert derive_seed(7, 1) == derive_seed(7, 1)
    seeds = {derive_seed(7, k) for k in range(100_000)}
    assert len(seeds) == 100_000
    assert derive_seed(7, 1) != derive_seed(8, 1)


@pytest.mark.parametrize("make", [independent_uniform_2u, comonotone_2u, iid_exponential])
def test_builtin_samplers_have_unit_means(make):
    g = make(3)
    a = g.sample(5, 1000)
    assert np.array_equal(a, g.sample(5, 1000))
    assert np.all(a >= 0)
    mean, se = sample_means(g, 200_000, seed=1)
    assert np.all(np.abs(mean - 1) <= 4 * se)


def test_comonotone_coordinates_agree():
    a = comonotone_2u(3).sample(1, 100)
    assert np.all(a == a[:, :1])


def test_truncation_of_exponential():
    c = 3.0
    g = truncate_normalize(iid_exponential(2), c, samples=200_000, seed=4)
    # E min(c, Z) = 1 - exp(-c) for a unit exponential
    assert np.all(np.abs(g.mu - (1 - math.exp(-c))) <= 4 * g.mu_se)
    assert g.bound == pytest.approx(c / g.mu.min())
    z = g.sample(2, 10_000)
    assert z.max() <= g.bound
    mean, se = sample_means(g, 200_000, seed=9)
    assert np.all(np.abs(mean - 1) <= 4 * se + 1e-3)


def test_truncation_is_identity_for_bounded_generators():
    g = independent_uniform_2u(2)
    assert truncate_normalize(g, 2.0) is g


def test_truncation_rejects_tiny_means():
    with pytest.raises(GeneratorError):
        truncate_normalize(iid_exponential(2), 1e-9)
    with pytest.raises(GeneratorError):
        truncate_normalize(iid_exponential(2), 0.0)


def test_product_sampler_seed_discipline():
    u = independent_uniform_2u(2)
    p = product_sampler(u)
    assert np.array_equal(p.sample(3, 50), u.sample(3, 50))
    nested = product_sampler(product_sampler(u, u), u)
    assert isinstance(nested, ProductSampler) and len(nested.factors) == 3
    flat = product_sampler(u, u, u)
    assert np.array_equal(nested.sample(3, 50), flat.sample(3, 50))
    assert nested.bound == 8.0
    assert product_sampler(u, iid_exponential(2)).bound is None
