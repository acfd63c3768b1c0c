"""Exact secret-key capacity, communication complexity and bounds for hypergraphical sources."""

from .capacity import (
    CapacityCurve,
    CapacityPoint,
    ReducedSource,
    capacity_curve,
    cs_at_rate,
    cs_unconstrained,
    cs_vector_rate_upper_bound,
    gk_zero_rate,
    optimal_reduced_source,
    rco,
    rho_of_x,
    rs_at_key_rate,
)
from .errors import InfeasibleRateError, SizeLimitError, SkalcError, SolverError, ValidationError
from .linear_source import LinearSource, hypergraph_to_linear, rco_linear
from .model import HypergraphSource, cond_entropy, entropy, reduce_for_adversaries, restrict
from .partitions import FractionalAssignment, i_lambda, mmi

__version__ = "0.1.0"
