"""Pessimistic offline policy optimization: IPW plus a pseudo-loss penalty,
trained with one cost-sensitive classification call."""

from ._core import (
    DeterministicPolicy,
    LoggedDataset,
    LossNoise,
    MassPolicy,
    SyntheticEnvironment,
    TablePolicy,
    UniformPolicy,
    bennett_bound,
    beta_star_bound,
    class_stats,
    confidence_width,
    corollary_bound_beta_star,
    corollary_bound_fixed_beta,
    effective_bandwidth,
    exact_pl,
    exact_risk,
    generate_logs,
    h_grid,
    hard_instance,
    ipw_risk,
    min_deterministic_risk,
    oracle_inequality_bound,
    penalized_objective,
    pl_concentration_band,
    psi_beta,
    pseudo_loss,
    random_environment,
    suggest_k,
    train,
    ucb_risk,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
