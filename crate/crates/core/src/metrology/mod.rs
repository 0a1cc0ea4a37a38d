//! Precision metrics for estimating `λ`.
//!
//! - Quantum Fisher information from the generator `h_ξ = iU†∂_ξU`,
//!   `I_λ = (∂_λξ)² · 4 Var[h_ξ] = 16λ² Var[h_ξ]`, with
//!   `h_ξ = H₁s + (cos √Λs − 1)/Λ · C − (sin √Λs − √Λs)/Λ^{3/2} · D`.
//! - A fidelity-based finite-difference QFI as an independent check.
//! - Homodyne Fisher information of the `X` distribution.
//! - Error-propagation sensitivity `(∂_λ⟨X⟩)²/(ΔX)²`.
//!
//! For pure states these satisfy `I_λ ≥ 𝖨_λ ≥ 𝓘_λ`, which
//! [`metrology_series`] enforces at every sample.
//!
//! Peak values at `τ_n = 2nπ/√Λ`: `𝓘_λ = 32λ²π²n²Λ⁻³` for the
//! superposition state, `I_λ ≃ 64λ²π²n²Λ⁻³ Var[P²]` asymptotically.

mod generator;
mod ratios;
mod sensitivity;

pub use generator::{
    covariance, gamma_residual, generator_decomposition, h_coefficients, h_generator, ladder_residuals,
    qfi_asymptotic, qfi_asymptotic_peak, qfi_asymptotic_var_d, qfi_exact, qfi_exact_breakdown, var_d, var_p2,
    GeneratorDecomposition, QfiBreakdown, QfiMoments, LADDER_MARGIN, SUPERPOSITION_VAR_P2,
};
pub use ratios::{finite_eta_ratio, find_peaks, working_point_relation, Peak, WorkingPointForm};
pub use sensitivity::{
    cfi_homodyne, check_ordering, error_propagation, metrology_series, qfi_numeric, ErrorPropagationPath,
    HomodyneGrid, LambdaStencil, MetrologySeries, StencilStates, DEFAULT_DLAMBDA, DENSITY_FLOOR,
    GRID_COVERAGE_LIMIT, GRID_INTERVALS_PER_HALF_WIDTH, GRID_SIGMAS, ORDERING_TOL,
};
