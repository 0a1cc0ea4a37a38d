//! Parameters, steady state and Hamiltonians of the linearized cavity
//! optomechanical system.
//!
//! [`PhysicalParams`] and [`steady_state`] work with dimensionful angular
//! frequencies. Every Hamiltonian builder works in units of `ω_m`: the
//! linearized model reads `η a†a + b†b − g(a + a†)(b + b†)` with
//! `η = Δ/ω_m` and `g = G/ω_m = λ√η/2`.

mod hamiltonian;
mod params;
mod sw;

pub use hamiltonian::{
    cavity_free_part, hamiltonian_corrected, hamiltonian_corrected_mechanical, hamiltonian_effective,
    hamiltonian_linearized, lambda_eff_squared,
};
pub use params::{
    classify_phase, effective_params, steady_state, EffectiveParams, ExcitationFrequency, Phase,
    PhysicalParams, SteadyState, EFFECTIVE_RESIDUAL_LIMIT, STEADY_STATE_DAMPING, STEADY_STATE_MAX_ITER,
    STEADY_STATE_TOL,
};
pub use sw::{sw_generator, sw_generator_as_printed, sw_offdiagonal_residual, SwOrder, SwResidual, SW_INTERIOR_MARGIN};

pub(crate) use hamiltonian::linearized;
