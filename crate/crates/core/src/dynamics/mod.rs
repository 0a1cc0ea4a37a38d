//! Exact propagation on truncated spaces and closed-form quadrature
//! trajectories.
//!
//! Times are the dimensionless `s = ω_m t`. Under the effective
//! Hamiltonian the Heisenberg solution is
//! `X(s) = X cos θ + 2Λ^{−1/2} P sin θ` with `θ = √Λ s/2`, from which all
//! closed forms here follow.
//!
//! The finite-η analytic path collects the mechanical terms of the
//! corrected Hamiltonian into one coefficient:
//! `−(λ²/4)(b + b†)² − (λ⁴η⁻²/24)(b + b†)² = −(λ_eff²/4)(b + b†)²` with
//! `λ_eff² = λ² + λ⁴η⁻²/6`, and evaluates the closed forms at `λ_eff`.

mod analytic;
mod corrected;
mod propagate;

pub use analytic::{
    analytic_mean_var_coherent, analytic_mean_var_superposition, analytic_moments, analytic_trajectory,
    big_lambda, coherent_moments_as_printed, peak_times, recommended_cutoff, tau_1, CoherentMoments,
    SuperpositionMoments,
};
pub use corrected::{
    corrected_moments, corrected_trajectory, lambda_eff, two_mode_setup, CorrectionPath, TwoModeSetup,
    MIN_ANALYTIC_ETA,
};
pub use propagate::{
    evolve_observable, evolve_trajectory, mechanical_x, propagator, Propagator, Trajectory, TrajectorySource,
};

pub(crate) use analytic::check_stable;
pub(crate) use propagate::check_times;
