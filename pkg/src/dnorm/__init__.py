"""D-norms: evaluation, multiplication, idempotency and max-stable simulation.

A D-norm is ``||x||_D = E(max_i |x_i| Z_i)`` for a generator ``Z`` of
nonnegative random variables with unit means.  ``G(x) = exp(-||x||_D)``,
``x <= 0``, is then a standard max-stable distribution function.
"""

from .algebra import (
    Classification,
    IdempotencyResult,
    InconsistentFrameError,
    TrackReport,
    UnionFind,
    classify_idempotent,
    detect_cdf,
    idempotent_limit,
    is_idempotent,
    multiply,
    power,
    track,
    track_same,
)
from .evaluation import (
    EXACT,
    DNorm,
    LogisticIndex,
    MonteCarlo,
    NormEstimate,
    copula_value,
    eval_exact,
    eval_mc,
    extremal_coefficient,
    l1_norm,
    logistic_norm_ref,
    norm,
    parse_grid,
    pickands,
    pickands_trace,
    project,
    simplex_grid,
    sms_cdf,
    stdf,
    sup_norm,
)
from .generators import (
    SAMPLERS,
    AtomLimitError,
    DiscreteGenerator,
    GeneratorError,
    PartitionFrame,
    ProductSampler,
    SamplerGenerator,
    ValidationIssue,
    ValidationReport,
    angular_normalize,
    as_sampler,
    comonotone_2u,
    constant_generator,
    dedup,
    derive_seed,
    diagonal_generator,
    enumerate_frames,
    iid_exponential,
    independent_uniform_2u,
    mixture_generator,
    partition_generator,
    permutation_generator,
    product_generator,
    product_sampler,
    require_valid,
    sample_means,
    truncate_normalize,
    validate_generator,
)
from .simulation import (
    SimulationError,
    SmsBatch,
    SmsSample,
    joint_cdf_check,
    margin_check,
    max_stability_check,
    multiplicative_invariance_check,
    sample_batch,
    sample_sms,
)

__version__ = "0.1.0"
