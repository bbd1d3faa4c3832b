"""Deterministic approximate counting for knapsack-type problems via small-width branching programs."""

from .contingency import ContingencyInstance, count_ct
from .errors import CapacityError, InputError, KnapcountError, SamplingError
from .intknap import IntKnapsackInstance, approx_count_int, exact_count_int
from .knap01 import Knapsack01Instance, approx_count, exact_count, sample
from .learn import AlmostRobpParams, halfspace_oracle, k_function_oracle, learn, measure_error
from .monotone import KnapsackSpace, count_under_source, round_under_source
from .multiknap import MultiKnapsackInstance, count_multi
from .robp import Robp, SmallSpaceSource

__version__ = "0.1.0"
