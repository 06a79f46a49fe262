"""Domain services - numerical operations on the chain."""

from .model_core import (
    apply_A,
    apply_a,
    chain_step,
    mean_after_updates,
    quadform_to_model,
    simulate_forward,
    simulate_forward_batch,
    update_matrix,
    weighted_average,
)
from .sphere_walk import (
    alpha_references,
    concentration_probe,
    coupled_contraction_probe,
    epsilon_const,
    estimate_alpha,
    exact_alpha_d2,
    exhaustive_ratio_check,
    greedy_contraction_sequence,
    hilbert_distance,
    project,
    ratio_bound_check,
    sphere_step,
)
from .stationary_sampler import (
    backward_partial_sums,
    compare_forward_backward,
    compare_moments,
    sample_stationary,
    sample_stationary_batch,
    stationarity_self_test,
)
from .gaussian_exact import (
    crossing_k,
    push_gaussian,
    stationary_gaussian,
    stationary_moments,
    tv_curve_exact,
    tv_gaussian,
)
from .cutoff_lab import (
    coupon_tail_empirical,
    coupon_tail_exact,
    cutoff_profile,
    schedule_k,
    tv_bracket,
    tv_bracket_series,
    tv_lower_bound_ball,
    tv_upper_bound_coupling,
)

__all__ = [
    'apply_A', 'apply_a', 'chain_step', 'mean_after_updates', 'quadform_to_model',
    'simulate_forward', 'simulate_forward_batch', 'update_matrix', 'weighted_average',
    'alpha_references', 'concentration_probe', 'coupled_contraction_probe', 'epsilon_const',
    'estimate_alpha', 'exact_alpha_d2', 'exhaustive_ratio_check',
    'greedy_contraction_sequence', 'hilbert_distance', 'project', 'ratio_bound_check',
    'sphere_step',
    'backward_partial_sums', 'compare_forward_backward', 'compare_moments',
    'sample_stationary', 'sample_stationary_batch', 'stationarity_self_test',
    'crossing_k', 'push_gaussian', 'stationary_gaussian', 'stationary_moments',
    'tv_curve_exact', 'tv_gaussian',
    'coupon_tail_empirical', 'coupon_tail_exact', 'cutoff_profile', 'schedule_k',
    'tv_bracket', 'tv_bracket_series', 'tv_lower_bound_ball', 'tv_upper_bound_coupling',
]
