"""Cooperative games built from information-theoretic quantities.

The package represents finite TU games, decides their structural
properties with exact or floating-point linear programming, and constructs
the games arising from source coding, multiple access channels, location
estimation, entropy power and robust hypothesis testing.
"""

from .analysis import (
    check_balanced,
    check_exact,
    check_large_core,
    dual_game,
    enumerate_minimal_balanced_collections,
    find_core_point,
    is_monotone,
    prefix_robust_allocation,
    shapley_ichiishi_check,
    tolerance_allocation,
    weber_set,
    xos_representation,
)
from .capacities import (
    Capacity,
    FinitePmf,
    capacity,
    capacity_core_contains,
    contamination_capacity,
    core_vertices,
    finite_pmf,
    is_capacity,
    is_two_alternating,
    least_favorable_pair,
    minimax_lr_check,
    tv_capacity,
    upper_envelope,
)
from .entropy_power import (
    check_fractional_epi,
    entropy_sum_game,
    gaussian_entropy_power_game,
    gaussian_spec,
    integer_pmf,
    shifted_diff_entropy_game,
)
from .errors import InfocoreError, InputError
from .estimation import QuadratureSpec, de_game, gaussian, grid, pitman_risk, sum_of, uniform
from .game import (
    FractionalPartition,
    Game,
    Modularity,
    Orientation,
    additive_game,
    aspiration_contains,
    check_modularity,
    core_contains,
    game_from_function,
    is_fractional_partition,
    is_submodular,
    is_supermodular,
    marginal_vector,
    new_game,
    shapley_value,
    subgame,
    uniform_degree_partition,
)
from .infogames import (
    channel_spec,
    dmmac_game,
    gmac_game,
    joint_pmf,
    la_anantharam_game,
    modified_sw_game,
    power_profile,
    slepian_wolf_game,
    sw_robust_allocation,
)
from .lp import Direction, LinearProgram, Relation, Status, solve

__all__ = [
    "Capacity",
    "Direction",
    "FinitePmf",
    "FractionalPartition",
    "Game",
    "InfocoreError",
    "InputError",
    "LinearProgram",
    "Modularity",
    "Orientation",
    "QuadratureSpec",
    "Relation",
    "Status",
    "additive_game",
    "aspiration_contains",
    "capacity",
    "capacity_core_contains",
    "channel_spec",
    "check_balanced",
    "check_exact",
    "check_fractional_epi",
    "check_large_core",
    "check_modularity",
    "contamination_capacity",
    "core_contains",
    "core_vertices",
    "de_game",
    "dmmac_game",
    "dual_game",
    "entropy_sum_game",
    "enumerate_minimal_balanced_collections",
    "find_core_point",
    "finite_pmf",
    "game_from_function",
    "gaussian",
    "gaussian_entropy_power_game",
    "gaussian_spec",
    "gmac_game",
    "grid",
    "integer_pmf",
    "is_capacity",
    "is_fractional_partition",
    "is_monotone",
    "is_submodular",
    "is_supermodular",
    "is_two_alternating",
    "joint_pmf",
    "la_anantharam_game",
    "least_favorable_pair",
    "marginal_vector",
    "minimax_lr_check",
    "modified_sw_game",
    "new_game",
    "pitman_risk",
    "power_profile",
    "prefix_robust_allocation",
    "shapley_ichiishi_check",
    "shapley_value",
    "shifted_diff_entropy_game",
    "slepian_wolf_game",
    "solve",
    "subgame",
    "sum_of",
    "sw_robust_allocation",
    "tolerance_allocation",
    "tv_capacity",
    "uniform",
    "uniform_degree_partition",
    "upper_envelope",
    "weber_set",
    "xos_representation",
]

__version__ = "0.1.0"
