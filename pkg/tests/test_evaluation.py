import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import generators
from dnorm import (
    DNorm,
    DiscreteGenerator,
    GeneratorError,
    LogisticIndex,
    MonteCarlo,
    PartitionFrame,
    as_sampler,
    comonotone_2u,
    constant_generator,
    copula_value,
    eval_exact,
    eval_mc,
    extremal_coefficient,
    independent_uniform_2u,
    l1_norm,
    logistic_norm_ref,
    norm,
    parse_grid,
    partition_generator,
    permutation_generator,
    pickands,
    pickands_trace,
    project,
    simplex_grid,
    sms_cdf,
    stdf,
    sup_norm,
)

TWO_U = Fraction(4, 3)  # E max(2U1, 2U2) = 2 * 2/3


def test_constant_generator_gives_sup_norm():
    assert eval_exact(constant_generator(3), [1, -2, 3]) == 3.0
    assert eval_exact(constant_generator(2), [-1, 0.5]) == 1.0


def test_permutation_generator_gives_l1():
    assert eval_exact(permutation_generator(2), [1, 1]) == 2.0
    assert eval_exact(permutation_generator(3), [1, -2, 3]) == 6.0


def test_exact_fraction_output():
    g = DiscreteGenerator.from_values([[1.5, 0.5], [0.5, 1.5]], [0.5, 0.5])
    assert eval_exact(g, [1, 1], as_fraction=True) == Fraction(3, 2)
    assert eval_exact(g, [1, 0.5], as_fraction=True) == Fraction(1, 2) * (Fraction(3, 2) + Fraction(3, 4))


def test_exact_rejects_bad_points():
    with pytest.raises(GeneratorError):
        eval_exact(constant_generator(2), [1, 2, 3])
    with pytest.raises(ValueError):
        eval_exact(constant_generator(2), [1, np.nan])


def test_grid_evaluation_shape():
    grid = simplex_grid(3, 4)
    vals = eval_exact(permutation_generator(3), grid)
    assert vals.shape == (len(grid),)
    assert np.array_equal(vals, np.ones(len(grid)))


@settings(max_examples=80, deadline=None)
@given(generators(), st.data())
def test_sandwich_and_homogeneity(g, data):
    x = np.array(data.draw(st.lists(st.floats(-5, 5, allow_nan=False), min_size=g.dimension,
                                    max_size=g.dimension)))
    v = eval_exact(g, x)
    assert sup_norm(x) <= v <= l1_norm(x)
    # scaling by a power of two is exact in binary floating point
    assert eval_exact(g, -4 * x) == 4 * v


@settings(max_examples=40, deadline=None)
@given(generators(d=2))
def test_triangle_inequality(g):
    grid = simplex_grid(2, 6)
    for x in grid:
        for y in grid[::2]:
            assert eval_exact(g, x + y) <= eval_exact(g, x) + eval_exact(g, y) + 1e-12


def test_mc_two_u_constant():
    g = independent_uniform_2u(2)
    est = eval_mc(g, [1, 1], 400_000, seed=1)
    assert abs(est.value - float(TWO_U)) <= 4 * est.standard_error
    # variance of max(2U1, 2U2) is 4 * (1/2 - 4/9) = 2/9
    assert est.standard_error == pytest.approx(math.sqrt(2 / 9 / 400_000), rel=0.02)


def test_mc_determinism_and_chunking():
    g = independent_uniform_2u(3)
    a = eval_mc(g, [1, 2, 3], 50_000, seed=8)
    b = eval_mc(g, [1, 2, 3], 50_000, seed=8)
    assert a == b
    c = eval_mc(g, [1, 2, 3], 50_000, seed=9)
    assert a.value != c.value


def test_control_variate_reduces_error():
    g = independent_uniform_2u(2)
    plain = eval_mc(g, [1, 1], 100_000, seed=3)
    cv = eval_mc(g, [1, 1], 100_000, seed=3, control_variate=True)
    assert cv.standard_error < plain.standard_error
    assert abs(cv.value - float(TWO_U)) <= 4 * cv.standard_error


def test_control_variate_is_exact_for_permutation_sampler():
    est = eval_mc(as_sampler(permutation_generator(3)), [1, 2, 3], 10_000, seed=0, control_variate=True)
    assert est.value == pytest.approx(6.0, abs=1e-12)
    assert est.standard_error == pytest.approx(0.0, abs=1e-12)


def test_mc_needs_two_samples():
    with pytest.raises(ValueError):
        eval_mc(independent_uniform_2u(2), [1, 1], 1, seed=0)
    with pytest.raises(ValueError):
        MonteCarlo(samples=1)


def test_dnorm_policy_dispatch():
    assert DNorm(constant_generator(2)).is_exact
    D = DNorm(independent_uniform_2u(2))
    assert isinstance(D.policy, MonteCarlo)
    with pytest.raises(GeneratorError):
        DNorm(independent_uniform_2u(2), "exact")
    assert DNorm(permutation_generator(2))([3, -4]) == 7.0
    est = norm(DNorm.monte_carlo(comonotone_2u(2), 20_000, seed=2), [1, 2])
    assert est.value == pytest.approx(2.0, abs=1e-9)


def test_sms_cdf_and_copula():
    D = DNorm(permutation_generator(2))
    assert sms_cdf(D, [-1, -1]) == pytest.approx(math.exp(-2))
    assert copula_value(D, [0.3, 0.5]) == pytest.approx(0.15)
    assert copula_value(DNorm(constant_generator(2)), [0.3, 0.5]) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        sms_cdf(D, [1, -1])


def test_stdf_matches_norm_on_orthant():
    D = DNorm(partition_generator(PartitionFrame(3, [(0, 1)])))
    assert stdf(D, [0.2, 0.5, 0.3]) == pytest.approx(0.8)
    with pytest.raises(ValueError):
        stdf(D, [-0.2, 0.5, 0.3])


def test_pickands():
    D = DNorm.monte_carlo(independent_uniform_2u(2), 200_000, seed=4)
    a = pickands(D, [0.5])
    # ||(1/2, 1/2)|| = 2/3 for the 2U generator
    assert a == pytest.approx(2 / 3, abs=3e-3)
    t, vals = pickands_trace(DNorm(permutation_generator(2)), 10)
    assert t.shape == (11, 1)
    assert np.allclose(vals, 1.0)
    with pytest.raises(ValueError):
        pickands(D, [1.5])


def test_extremal_coefficients():
    assert extremal_coefficient(DNorm(constant_generator(4)), [0, 1, 2]) == 1.0
    assert extremal_coefficient(DNorm(permutation_generator(4)), [0, 1, 2]) == 3.0
    D = DNorm(partition_generator(PartitionFrame(3, [(0, 1)])))
    assert extremal_coefficient(D, [0, 1]) == 1.0
    assert extremal_coefficient(D, [0, 2]) == 2.0


def test_projection():
    D = DNorm(partition_generator(PartitionFrame(4, [(0, 1)])))
    P = project(D, [1, 2])
    assert P.dimension == 2
    assert P([1, 1]) == 2.0
    Q = project(D, [0, 1])
    assert Q([1, 1]) == 1.0
    S = project(DNorm.monte_carlo(comonotone_2u(3), 1000), [0, 2])
    assert norm(S, [1, 1]).value == pytest.approx(1.0)


def test_logistic_reference():
    x = [3.0, 4.0]
    assert logistic_norm_ref(x, 1) == 7.0
    assert logistic_norm_ref(x, 2) == pytest.approx(5.0)
    assert logistic_norm_ref(x, LogisticIndex.INFINITY) == 4.0
    assert logistic_norm_ref(x, math.inf) == 4.0
    with pytest.raises(ValueError):
        logistic_norm_ref(x, 0.5)


@pytest.mark.parametrize("d,k", [(1, 3), (2, 8), (3, 8), (4, 5)])
def test_simplex_grid(d, k):
    grid = simplex_grid(d, k)
    assert len(grid) == math.comb(k + d - 1, d - 1)
    assert np.allclose(grid.sum(axis=1), 1.0)
    assert np.all(grid >= 0)


def test_parse_grid(tmp_path):
    assert np.array_equal(parse_grid("simplex:4", 2), simplex_grid(2, 4))
    f = tmp_path / "grid.csv"
    f.write_text("-1,-1\n-0.5,-2\n")
    assert parse_grid(str(f), 2).shape == (2, 2)
    with pytest.raises(ValueError):
        parse_grid(str(f), 3)
