"""Randomized AND/OR tree evaluation: worst-case inputs, exact cost laws,
branching-process simulation and the constants of the limit theory."""

from .analytics import (
    expected_cost,
    mean_matrix,
    mgf_constant,
    spectral,
    table1,
    tail_bound,
    toll_moments,
    variance_constant,
)
from .branching import Population, monte_carlo, offspring, simulate
from .errors import CapExceeded, Caps, NumericError
from .exact_dist import (
    convergence_diagnostics,
    exact_cost_pmf,
    verify_worst_case,
    z_recursion_pmf,
)
from .pmf import BivariatePMF, CostPMF, dominates
from .tree import EvalOutcome, LeafVector, TreeShape, root_value, snir_eval
from .worst_case import one_block, worst_input, zero_block

__version__ = "0.1.0"
