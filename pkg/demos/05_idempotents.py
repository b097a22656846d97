"""
Recognising idempotent D-norms
==============================

Idempotent D-norms are exactly the frame norms: a sup over each block of
a partition, summed. The classifier looks for blocks of complete
dependence and checks whether squaring changes the norm.
"""

from dnorm import (
    DNorm,
    classify_idempotent,
    enumerate_frames,
    independent_uniform_2u,
    partition_generator,
)
from dnorm.oracles import two_point_generator

for frame in enumerate_frames(3):
    c = classify_idempotent(DNorm(partition_generator(frame)))
    print(frame.to_lists(one_based=True), "->", c.status)

for name, D in [("two-point 1/2", DNorm(two_point_generator("1/2"))),
                ("2U", DNorm.monte_carlo(independent_uniform_2u(2), 200_000, seed=3))]:
    c = classify_idempotent(D)
    print(name, "->", c.status, "witness", c.witness.witness_point, "deviation", c.witness.deviation)
