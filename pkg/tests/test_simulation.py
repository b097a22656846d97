import numpy as np
import pytest

from dnorm import (
    DNorm,
    DiscreteGenerator,
    GeneratorError,
    PartitionFrame,
    SamplerGenerator,
    SimulationError,
    constant_generator,
    iid_exponential,
    independent_uniform_2u,
    joint_cdf_check,
    margin_check,
    max_stability_check,
    multiplicative_invariance_check,
    partition_generator,
    permutation_generator,
    sample_batch,
    sample_sms,
    truncate_normalize,
)
from dnorm.oracles import fixed_horizon_sms

GENERATORS = [
    constant_generator(3),
    permutation_generator(3),
    partition_generator(PartitionFrame(3, [(0, 1)])),
    independent_uniform_2u(3),
]


def test_constant_generator_is_completely_dependent():
    batch = sample_batch(constant_generator(3), 500, seed=1)
    assert np.all(batch.eta == batch.eta[:, :1])
    assert np.all(batch.points_used == 1)


@pytest.mark.parametrize("g", GENERATORS)
def test_samples_are_negative(g):
    batch = sample_batch(g, 2000, seed=2)
    assert batch.eta.shape == (2000, 3)
    assert np.all(batch.eta < 0)
    assert np.all(batch.points_used >= 1)


@pytest.mark.parametrize("g", GENERATORS)
def test_adaptive_stopping_matches_fixed_horizon(g):
    adaptive = sample_batch(g, 300, seed=3, block_size=64)
    fixed = fixed_horizon_sms(g, 3, 400, n=300, block_size=64)
    assert adaptive.points_used.max() < 400
    assert np.array_equal(adaptive.eta, fixed)


def test_single_sample_matches_long_fixed_horizon():
    g = permutation_generator(4)
    s = sample_sms(g, seed=11)
    assert np.array_equal(s.eta, fixed_horizon_sms(g, 11, 100_000)[0])


def test_batch_determinism():
    g = permutation_generator(2)
    a = sample_batch(g, 5000, seed=4)
    b = sample_batch(g, 5000, seed=4, workers=4)
    assert np.array_equal(a.eta, b.eta)
    assert np.array_equal(a.points_used, b.points_used)
    assert not np.array_equal(a.eta, sample_batch(g, 5000, seed=5).eta)
    one = sample_batch(g, 1, seed=4)
    assert np.array_equal(one[0].eta, sample_sms(g, seed=4).eta)
    assert len(list(one)) == 1


def test_unbounded_generator_is_refused():
    with pytest.raises(SimulationError):
        sample_batch(iid_exponential(2), 10, seed=0)
    bounded = truncate_normalize(iid_exponential(2), 4.0, samples=50_000)
    assert np.all(sample_batch(bounded, 100, seed=0).eta < 0)


def test_degenerate_coordinate_hits_the_cap():
    g = SamplerGenerator(2, lambda rng, n: np.column_stack([np.full(n, 2.0), np.zeros(n)]), bound=2.0)
    with pytest.raises(SimulationError, match="still zero"):
        sample_batch(g, 4, seed=0, max_points=200)


def test_margin_check():
    batch = sample_batch(permutation_generator(2), 20_000, seed=6)
    for j in range(2):
        diag = margin_check(batch, j)
        assert diag.passed
        assert diag.ks_distance < 1.63 / np.sqrt(20_000)
    fake = np.random.default_rng(0).uniform(-1, 0, size=(5000, 2))
    assert margin_check(fake, 0).p_value < 1e-6
    with pytest.raises(ValueError):
        margin_check(batch.eta[:999], 0)


def test_frechet_law_of_constant_generator():
    batch = sample_batch(constant_generator(2), 20_000, seed=7)
    y = -1 / batch.eta[:, 0]
    # P(-1/eta <= y) = exp(-1/y)
    for q in (0.5, 1.0, 3.0):
        assert abs(np.mean(y <= q) - np.exp(-1 / q)) < 4 * np.sqrt(0.25 / 20_000)


@pytest.mark.parametrize("g,closed_form", [
    (constant_generator(2), np.exp(-1)),
    (permutation_generator(2), np.exp(-2)),
])
def test_joint_cdf_closed_forms(g, closed_form):
    batch = sample_batch(g, 50_000, seed=8)
    diag = joint_cdf_check(batch, DNorm(g), [[-1, -1]])
    assert diag.expected[0] == pytest.approx(closed_form)
    assert diag.passed


def test_joint_cdf_two_u():
    g = independent_uniform_2u(2)
    batch = sample_batch(g, 50_000, seed=9)
    diag = joint_cdf_check(batch, DNorm.monte_carlo(g, 400_000, seed=1), [[-1, -1]])
    assert diag.expected[0] == pytest.approx(np.exp(-4 / 3), abs=2e-3)
    assert diag.passed


def test_joint_cdf_rejects_positive_grid():
    batch = sample_batch(constant_generator(2), 10, seed=0)
    with pytest.raises(ValueError):
        joint_cdf_check(batch, DNorm(constant_generator(2)), [[0.5, -1]])


def test_max_stability():
    batch = sample_batch(permutation_generator(2), 20_000, seed=10)
    same = max_stability_check(batch, 1)
    assert np.array_equal(same.observed, same.expected)
    assert max_stability_check(batch, 5).passed
    fake = np.random.default_rng(1).uniform(-1, 0, size=(20_000, 2))
    assert not max_stability_check(fake, 5).passed
    with pytest.raises(ValueError):
        max_stability_check(batch.eta[:101], 5)


def test_multiplicative_invariance():
    xi = DiscreteGenerator.from_values([[0.5], [1.5]], [0.5, 0.5])
    assert multiplicative_invariance_check(permutation_generator(2), xi, n=20_000, seed=3).passed
    one = constant_generator(1)
    diag = multiplicative_invariance_check(permutation_generator(2), one, n=2000, seed=3, shared_seed=True)
    assert np.array_equal(diag.observed, diag.expected)


def test_multiplicative_invariance_rejects_bad_xi():
    bad = DiscreteGenerator.from_values([[2]], [1])
    with pytest.raises(GeneratorError):
        multiplicative_invariance_check(permutation_generator(2), bad, n=100)
    doubled = SamplerGenerator(1, lambda rng, n: 4 * rng.random((n, 1)), bound=4.0)
    with pytest.raises(GeneratorError):
        multiplicative_invariance_check(permutation_generator(2), doubled, n=100)
