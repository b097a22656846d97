"""
Monte Carlo evaluation for continuous generators
================================================

Generators given by a sampler, such as 2U with independent uniform
coordinates, are evaluated by Monte Carlo with a standard error. The
square of 2U is a different norm, which the estimate separates clearly.
"""

from dnorm import DNorm, eval_mc, independent_uniform_2u, norm, power

g = independent_uniform_2u(2)
est = eval_mc(g, [1, 1], 1_000_000, seed=1)
print(f"2U at (1,1): {est.value:.5f} +- {est.standard_error:.1e} (exact 4/3 = {4 / 3:.5f})")

D = DNorm.monte_carlo(g, 1_000_000, seed=2)
sq = norm(power(D, 2), [1, 1])
print(f"square at (1,1): {sq.value:.5f} +- {sq.standard_error:.1e} (exact 40/27 = {40 / 27:.5f})")
