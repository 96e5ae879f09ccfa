from .auerbach import auerbach
from .bruteforce import BudgetExceeded, brute_force_packing, grid_candidates
from .config import (
    AuerbachSystem,
    CoveringResult,
    GapResult,
    NonConvergenceError,
    PackingResult,
    SolverConfig,
    covering_radius,
    min_pairwise,
)
from .convex import distance_to_ball, perturbation_check, subspace_gap, transport_witness
from .covering import covering
from .packing import maximin_packing
from .twopoint import pair_value, two_point_constant
