"""stochgame: solver and verification toolkit for finite zero-sum stochastic games.

The library computes n-stage and discounted values with optimal strategies,
builds block-discounted Markov profiles whose optimality gap vanishes with
the horizon, and evaluates profiles exactly to certify optimality and the
constant-payoff behavior of the running average.
"""

__version__ = "0.1.0"

from .adapted import (
    AdaptedProfile,
    BlockSchedule,
    DiscountThresholds,
    DiscountedProfileProvider,
    adapted_profile,
    block_schedule,
    block_weight_mass,
    default_block_length,
    estimate_discount_thresholds,
    select_block_length,
)
from .corpus import (
    CORPUS,
    CorpusEntry,
    big_match,
    get_corpus_entry,
    random_game,
    single_player_mdp,
    two_state_cycle,
)
from .errors import (
    ConvergenceError,
    GameFormatError,
    InputError,
    InvalidGameError,
    ScheduleNotReadyError,
    StochGameError,
)
from .evaluation import (
    ConstantPayoffCurve,
    GuaranteeCertificate,
    PayoffTrajectory,
    ValueDriftReport,
    certify_epsilon_optimality,
    constant_payoff_curve,
    cumulative_stage,
    discounted_cumulative_payoff,
    expected_value_under_profile,
    guaranteed_value,
    monte_carlo_payoff,
    stages_to_weight,
    trajectory,
    value_drift_diagnostic,
)
from .game import (
    MarkovStrategy,
    StationaryStrategy,
    StochasticGame,
    advance_distribution,
    expected_stage_payoff,
    load_game,
    load_game_file,
    point_mass,
    profile_stage_payoffs,
    profile_transition_matrix,
    save_game_file,
    serialize_game,
)
from .matrix import MatrixGameSolution, solve_matrix_game, value_batch, value_only
from .shapley import (
    DiscountedSolution,
    FiniteHorizonSolution,
    LimitValueEstimate,
    discounted_value,
    finite_value,
    finite_values,
    limit_value_estimate,
    local_game_tensor,
    shapley_operator,
)

__all__ = [
    "AdaptedProfile",
    "BlockSchedule",
    "CORPUS",
    "ConstantPayoffCurve",
    "ConvergenceError",
    "CorpusEntry",
    "DiscountThresholds",
    "DiscountedProfileProvider",
    "DiscountedSolution",
    "FiniteHorizonSolution",
    "GameFormatError",
    "GuaranteeCertificate",
    "InputError",
    "InvalidGameError",
    "LimitValueEstimate",
    "MarkovStrategy",
    "MatrixGameSolution",
    "PayoffTrajectory",
    "ScheduleNotReadyError",
    "StationaryStrategy",
    "StochGameError",
    "StochasticGame",
    "ValueDriftReport",
    "adapted_profile",
    "advance_distribution",
    "big_match",
    "block_schedule",
    "block_weight_mass",
    "certify_epsilon_optimality",
    "constant_payoff_curve",
    "cumulative_stage",
    "default_block_length",
    "discounted_cumulative_payoff",
    "discounted_value",
    "estimate_discount_thresholds",
    "expected_stage_payoff",
    "expected_value_under_profile",
    "finite_value",
    "finite_values",
    "get_corpus_entry",
    "guaranteed_value",
    "limit_value_estimate",
    "load_game",
    "load_game_file",
    "local_game_tensor",
    "monte_carlo_payoff",
    "point_mass",
    "profile_stage_payoffs",
    "profile_transition_matrix",
    "random_game",
    "save_game_file",
    "select_block_length",
    "serialize_game",
    "shapley_operator",
    "single_player_mdp",
    "solve_matrix_game",
    "stages_to_weight",
    "trajectory",
    "two_state_cycle",
    "value_batch",
    "value_drift_diagnostic",
    "value_only",
]
