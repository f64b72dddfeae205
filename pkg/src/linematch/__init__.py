"""Online matching of requests to servers on the real line."""

from .core import Instance, optimal_matching_cost, optimal_partial_cost, validate_instance
from .algorithms import (ALGORITHMS, AlgoState, Line, adjustment_operation, dh_step, greedy_step,
                         harmonic_step, mdh_next_distribution, mdh_step, run)
from .randomness import RandomSource, enumerate_branches

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "AlgoState", "Instance", "Line", "RandomSource", "adjustment_operation",
    "dh_step", "enumerate_branches", "greedy_step", "harmonic_step", "mdh_next_distribution",
    "mdh_step", "optimal_matching_cost", "optimal_partial_cost", "run", "validate_instance",
]
