use alloc::vec::Vec;

use super::analytic::{analytic_moments, check_stable, CoherentMoments};
use super::{check_times, evolve_observable, mechanical_x, Trajectory, TrajectorySource};
use crate::fock::{basis_state, product_state, FockOperator, QuantumState};
use crate::linalg;
use crate::model::{self, lambda_eff_squared, sw_generator, SwOrder};
use crate::{Error, FrequencyRatio, Result, StateKind};

/// Smallest `η` accepted by the perturbative analytic path.
pub const MIN_ANALYTIC_ETA: f64 = 10.0;

/// How the finite-η trajectory is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionPath {
    /// Closed forms evaluated at `λ_eff = √(λ² + λ⁴η⁻²/6)`.
    AnalyticLambdaEff,
    /// Exact propagation under the two-mode linearized Hamiltonian with the
    /// cavity starting in vacuum.
    TwoModeNumeric {
        /// Cavity cutoff.
        cutoff_a: usize,
        /// Mechanical cutoff.
        cutoff_b: usize,
        /// Compare in the decoupled frame: the initial product state is
        /// read as a dressed state, `e^{S̃}|0⟩|ψ⟩` in the lab frame, and `X`
        /// is conjugated to `e^{S̃} X e^{−S̃}`.
        frame_matched: bool,
    },
}

/// `λ_eff = √(λ² + λ⁴η⁻²/6)`; equals `λ` for `η = ∞`.
pub fn lambda_eff(lambda: f64, eta: FrequencyRatio) -> f64 {
    libm::sqrt(lambda_eff_squared(lambda, eta))
}

fn check_analytic_eta(eta: FrequencyRatio) -> Result<()> {
    match eta {
        FrequencyRatio::Finite(e) if !(e >= MIN_ANALYTIC_ETA) || !e.is_finite() => {
            Err(Error::InvalidParameter { name: "eta", value: e })
        }
        _ => Ok(()),
    }
}

/// Closed-form moments at the finite-η effective coupling, with the
/// susceptibility taken with respect to the bare `λ`.
pub fn corrected_moments(lambda: f64, eta: FrequencyRatio, kind: StateKind, s: f64) -> Result<CoherentMoments> {
    check_stable(lambda)?;
    check_analytic_eta(eta)?;
    let eff = lambda_eff(lambda, eta);
    let m = analytic_moments(eff, kind, s)?;
    let inv = eta.inverse();
    let chain = if eff == 0.0 {
        1.0
    } else {
        (lambda + lambda * lambda * lambda * inv * inv / 3.0) / eff
    };
    Ok(CoherentMoments { susceptibility: m.susceptibility * chain, ..m })
}

/// Quadrature trajectory including finite-η corrections.
///
/// `FrequencyRatio::Infinite` is accepted by the analytic path only and
/// reproduces the uncorrected closed forms.
pub fn corrected_trajectory(
    lambda: f64,
    eta: FrequencyRatio,
    kind: StateKind,
    times: &[f64],
    path: CorrectionPath,
) -> Result<Trajectory> {
    check_times(times)?;
    check_stable(lambda)?;
    match path {
        CorrectionPath::AnalyticLambdaEff => {
            let mut mean_x = Vec::with_capacity(times.len());
            let mut var_x = Vec::with_capacity(times.len());
            for &s in times {
                let m = corrected_moments(lambda, eta, kind, s)?;
                mean_x.push(m.mean_x);
                var_x.push(m.var_x);
            }
            Ok(Trajectory {
                times: times.to_vec(),
                states: None,
                mean_x,
                var_x,
                source: TrajectorySource::AnalyticCorrected,
            })
        }
        CorrectionPath::TwoModeNumeric { cutoff_a, cutoff_b, frame_matched } => {
            let Some(eta) = eta.finite() else {
                return Err(Error::InvalidParameter { name: "eta", value: f64::INFINITY });
            };
            let setup = two_mode_setup(lambda, eta, kind, cutoff_a, cutoff_b, frame_matched)?;
            evolve_observable(&setup.state, &setup.hamiltonian, &setup.observable, times, false)
        }
    }
}

/// Initial state, Hamiltonian and observable of a two-mode run.
#[derive(Debug, Clone)]
pub struct TwoModeSetup {
    /// Lab-frame initial state.
    pub state: QuantumState,
    /// Linearized Hamiltonian.
    pub hamiltonian: FockOperator,
    /// Mechanical `X`, conjugated when frame matching.
    pub observable: FockOperator,
}

/// Builds the ingredients of a two-mode run with the cavity in vacuum.
pub fn two_mode_setup(
    lambda: f64,
    eta: f64,
    kind: StateKind,
    cutoff_a: usize,
    cutoff_b: usize,
    frame_matched: bool,
) -> Result<TwoModeSetup> {
    check_stable(lambda)?;
    if !(eta > 1.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter { name: "eta", value: eta });
    }
    let product = product_state(&basis_state(0, cutoff_a)?, &kind.build(cutoff_b)?)?;
    product.ensure_adequate(Some(0.0))?;
    let hamiltonian = model::linearized(eta, 0.5 * lambda * libm::sqrt(eta), cutoff_a, cutoff_b)?;
    let x = mechanical_x(product.space())?;
    if !frame_matched {
        return Ok(TwoModeSetup { state: product, hamiltonian, observable: x });
    }
    let s = sw_generator(lambda, eta, cutoff_a, cutoff_b, SwOrder::Third)?;
    let u = linalg::exp_anti_hermitian(s.matrix());
    let state = QuantumState::from_amplitudes(product.space(), &u * product.amplitudes())?;
    let conjugated = &u * x.matrix() * u.adjoint();
    let hermitian = (&conjugated + conjugated.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    let observable = FockOperator::new(product.space(), hermitian, true)?;
    Ok(TwoModeSetup { state, hamiltonian, observable })
}
