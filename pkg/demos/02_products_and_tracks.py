"""
Multiplying D-norms and following the power track
=================================================

The product of two D-norms uses independent generators multiplied
coordinatewise. Repeated self-multiplication gives an increasing sequence
of norms bounded by L1, which settles on an idempotent norm.
"""

import numpy as np

from dnorm import (
    DNorm,
    PartitionFrame,
    constant_generator,
    mixture_generator,
    multiply,
    partition_generator,
    permutation_generator,
    power,
    track_same,
)
from dnorm.oracles import two_point_generator

D = DNorm(two_point_generator("1/2"))
x = [1.0, 0.5]

# the sup-norm acts as identity and L1 absorbs everything
print("D(x)            :", D(x))
print("D * sup (x)     :", multiply(D, DNorm(constant_generator(2)))(x))
print("D * L1 (x)      :", multiply(D, DNorm(permutation_generator(2)))(x))
for n in (1, 2, 4, 8):
    print(f"D^{n}(x)          :", power(D, n)(x))

# A mixture of a block frame with complete dependence keeps the block
# in the limit and spreads the third coordinate out
g = mixture_generator(partition_generator(PartitionFrame(3, [(0, 1)])), constant_generator(3), "1/2")
rep = track_same(DNorm(g), max_steps=100, tol=1e-9)
print("converged at step", rep.converged_at, "limit frame", rep.limit_frame.to_lists(one_based=True))
print("largest gap to the limit:", float(np.max(np.abs(rep.final - rep.limit_values))))
