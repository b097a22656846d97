"""
Simulating standard max-stable vectors
======================================

Samples are built from a Poisson process on the negative axis together
with generator draws, stopping once no later point can change the
maximum. The diagnostics compare margins, the joint distribution and
block maxima against what the D-norm predicts.
"""

from dnorm import (
    DNorm,
    PartitionFrame,
    joint_cdf_check,
    margin_check,
    max_stability_check,
    partition_generator,
    sample_batch,
)

g = partition_generator(PartitionFrame(3, [(0, 1)]))
batch = sample_batch(g, 100_000, seed=7)
print("first samples:")
print(batch.eta[:3])
print("mean Poisson points used:", batch.points_used.mean())

for j in range(3):
    m = margin_check(batch, j)
    print(f"margin {j + 1}: KS distance {m.ks_distance:.4f}, p = {m.p_value:.3f}")

joint = joint_cdf_check(batch, DNorm(g))
print("joint df check passed:", joint.passed, "largest z:", round(float(joint.z_scores.max()), 2))

stab = max_stability_check(batch, 5)
print("max-stability with k=5 passed:", stab.passed)
