"""Exact heat flow on the permutation group of a finite lattice.

The modules build on each other bottom-up: ``lattice`` (geometry and the
single-particle kernel), ``pairings`` (ordered pairs and moves), ``evolve``
(group walk and marginals), ``partitions``, ``polymer`` (expansion
machinery), ``spinwave`` (forgetting orderings, duality).
"""

__version__ = "0.1.0"

from .errors import (
    CapExceeded,
    ConditionNotApplicable,
    DegenerateContext,
    InvalidSpecError,
    NotFullError,
    PermflowError,
    StateSpaceTooLarge,
)
from .lattice import HeatKernel, Lattice, build_lattice, heat_kernel, neighbors
from .pairings import OrderedPair, PairedSubset
from .evolve import DistributionTable, MarginalTable, evolve, initial_delta, marginal_table, marginalize
from .permanent import permanent
from .polymer import PolymerSolution, c_asymptotic, rank1_solution, solve_c, trivial_solution
from .spinwave import forgetful, verify_duality, verify_forgetful

__all__ = [
    "CapExceeded",
    "ConditionNotApplicable",
    "DegenerateContext",
    "DistributionTable",
    "HeatKernel",
    "InvalidSpecError",
    "Lattice",
    "MarginalTable",
    "NotFullError",
    "OrderedPair",
    "PairedSubset",
    "PermflowError",
    "PolymerSolution",
    "StateSpaceTooLarge",
    "build_lattice",
    "c_asymptotic",
    "evolve",
    "forgetful",
    "heat_kernel",
    "initial_delta",
    "marginal_table",
    "marginalize",
    "neighbors",
    "permanent",
    "rank1_solution",
    "solve_c",
    "trivial_solution",
    "verify_duality",
    "verify_forgetful",
]
