"""
Exact D-norms from discrete generators
======================================

A discrete generator is a finite list of nonnegative atoms with
probabilities, each coordinate having mean one. Its D-norm is evaluated
exactly in rational arithmetic, and always sits between the sup-norm and
the L1-norm.
"""

import numpy as np

from dnorm import (
    DiscreteGenerator,
    DNorm,
    constant_generator,
    eval_exact,
    l1_norm,
    permutation_generator,
    simplex_grid,
    sup_norm,
)

# A generator in three dimensions with two atoms
g = DiscreteGenerator.from_values([[2, 1, "1/2"], [0, 1, "3/2"]], ["1/2", "1/2"])
print(g)

x = np.array([1.0, -0.5, 1.0])
print("sup  :", sup_norm(x))
print("D    :", eval_exact(g, x), "=", eval_exact(g, x, as_fraction=True))
print("L1   :", l1_norm(x))

# The two extreme generators reproduce the bounds
print("constant    ->", eval_exact(constant_generator(3), x))
print("permutation ->", eval_exact(permutation_generator(3), x))

# Evaluate on a simplex grid in one call
grid = simplex_grid(3, 4)
values = DNorm(g)(grid)
for point, v in zip(grid, values):
    print(np.round(point, 3), round(float(v), 6))
