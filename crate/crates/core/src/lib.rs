//! Numerical engine for critical quantum sensing with a linearized cavity
//! optomechanical system.
//!
//! Everything here works on dense matrices over truncated Fock spaces and is
//! free of IO, so the crate builds with `#![no_std]` plus `alloc`. The
//! companion `comsense` crate carries the command line, config parsing and
//! file formats.
//!
//! # Units
//!
//! All Hamiltonian builders, propagators and metrics use units where the
//! mechanical frequency is one: energies are in units of `ω_m` and times are
//! the dimensionless `s = ω_m t`. In these units `Λ = 4(1 − λ²)` and the
//! squared-frequency parameter `ξ = 1 − λ²` satisfy `Λ = 4ξ` exactly. Only
//! [`model::PhysicalParams`] and the steady-state solver carry dimensionful
//! angular frequencies.
//!
//! # Layout
//!
//! - [`fock`]: ladder operators, quadratures, states, tensor products,
//!   squeezing and position-basis amplitudes.
//! - [`model`]: steady state of the driven system, effective parameters and
//!   the four Hamiltonians plus the Schrieffer-Wolff generator.
//! - [`dynamics`]: exact propagation and closed-form quadrature trajectories.
//! - [`metrology`]: quantum Fisher information, homodyne Fisher information
//!   and the error-propagation figure of merit.

#![no_std]
#![warn(missing_docs)]
// `!(x >= 0.0)`-style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
mod error;
pub mod fock;
pub mod linalg;
pub mod metrology;
pub mod model;

pub use error::{Error, Result};

/// Kind of initial mechanical state used throughout the sensing protocol.
///
/// The cavity always starts in vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    /// `(|0⟩ + i|1⟩)/√2`.
    Superposition,
    /// Coherent state `|α⟩`.
    Coherent(num_complex::Complex64),
}

impl StateKind {
    /// Builds the single-mode state at the given cutoff.
    pub fn build(&self, cutoff: usize) -> Result<fock::QuantumState> {
        match *self {
            StateKind::Superposition => fock::superposition_state(cutoff),
            StateKind::Coherent(alpha) => fock::coherent_state(alpha, cutoff),
        }
    }
}

/// Ratio `η = Δ/ω_m` between effective detuning and mechanical frequency.
///
/// `Infinite` is the thermodynamic limit where every finite-η correction
/// vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyRatio {
    /// Finite ratio; must be positive.
    Finite(f64),
    /// `η → ∞`.
    Infinite,
}

impl FrequencyRatio {
    /// `η⁻¹`, zero in the limit.
    pub fn inverse(&self) -> f64 {
        match *self {
            FrequencyRatio::Finite(eta) => 1.0 / eta,
            FrequencyRatio::Infinite => 0.0,
        }
    }

    /// Finite value if any.
    pub fn finite(&self) -> Option<f64> {
        match *self {
            FrequencyRatio::Finite(eta) => Some(eta),
            FrequencyRatio::Infinite => None,
        }
    }
}
