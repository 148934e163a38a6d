"""Exact upper and lower bounds on E X - exp(E ln X) for nonnegative X."""
from .bounds import (
    BoundResult,
    InadmissiblePair,
    SandwichViolation,
    admissible_hi,
    admissible_lo,
    check_bounds,
    e_vf,
    evaluate,
    is_equality_case,
    lower_bound,
    upper_bound,
)
from .core import (
    DiscreteDistribution,
    DistributionError,
    EmptySupport,
    MomentSummary,
    NegativeValue,
    ProbSumOutOfTolerance,
    amgm_gap,
    log_mean,
    make_distribution,
    sqrt_moments,
    uniform_from_values,
)
from .kernels import BACKEND

__version__ = "0.1.0"
