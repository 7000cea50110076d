"""Increasing-subsequence statistics of random permutations.

Exact and extended-precision counting, samplers for the uniform, conditioned,
and adulterated measures, total-variation oracles, hypergeometric position
laws, and a Monte Carlo experiment harness with deterministic seeding.
"""

__version__ = "0.1.0"

from .analytics import (
    LogValue,
    PositionLaw,
    core_match_mean_exact,
    core_match_second_moment_exact,
    core_window,
    expected_count,
    expected_count_asymptotic,
    expected_count_loggamma,
    insertion_position_pmf,
    joint_position_pmf,
    merge_entropy,
    position_pmf_mode,
    position_pmf_peak_bound,
    superadditivity_gap,
    superadditivity_ratio,
)
from .counting import (
    CountValue,
    ExactBudgetError,
    count_bruteforce,
    count_increasing_subsequences,
)
from .experiments import (
    CardExperimentResult,
    ComplementLisResult,
    ExperimentConfig,
    LisShiftResult,
    MomentEstimate,
    ScalingResult,
    complement_lis_check,
    estimate_core_match_moments,
    lis_shift_experiment,
    resolve_k,
    run_card_experiment,
    run_trials,
    scaling_study,
    tv_sweep,
    zero_probability_sweep,
)
from .measures import (
    AdulterationSpec,
    TvEstimate,
    adulterated_density,
    exact_tv_all_k,
    exact_tv_distance,
    sample_adulterated,
    sample_conditioned,
    tv_monte_carlo,
)
from .perms import (
    Permutation,
    lis_length,
    lis_length_restricted,
    sample_k_subset,
    sample_uniform_permutation,
)
from .rng import RngStream
