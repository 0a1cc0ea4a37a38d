use alloc::vec::Vec;
use num_complex::Complex64;

use super::{QuantumState, Space};
use crate::linalg::ZERO;
use crate::{Error, Result};

/// Normalized Hermite functions `φ_n(x) = π^{−1/4} e^{−x²/2} H_n(x)/√(n! 2ⁿ)`
/// for `n < count`.
///
/// Uses the three-term recurrence on the normalized functions,
/// `φ_{n+1} = x√(2/(n+1)) φ_n − √(n/(n+1)) φ_{n−1}`, which stays finite far
/// past the point where `n!` overflows.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let phi0 = libm::pow(core::f64::consts::PI, -0.25) * libm::exp(-0.5 * x * x);
    out.push(phi0);
    if count == 1 {
        return out;
    }
    out.push(core::f64::consts::SQRT_2 * x * phi0);
    for n in 1..count - 1 {
        let nf = n as f64;
        let next = x * libm::sqrt(2.0 / (nf + 1.0)) * out[n] - libm::sqrt(nf / (nf + 1.0)) * out[n - 1];
        out.push(next);
    }
    out
}

fn single_cutoff(state: &QuantumState) -> Result<usize> {
    match state.space() {
        Space::Single(n) => Ok(n),
        other => Err(Error::DimensionMismatch { left: other.dim(), right: other.mechanical_cutoff() }),
    }
}

/// Position-basis amplitude `⟨x|ψ⟩` of a single-mode state.
pub fn position_amplitude(state: &QuantumState, x: f64) -> Result<Complex64> {
    let n = single_cutoff(state)?;
    let phi = hermite_functions(x, n);
    Ok(state
        .amplitudes()
        .iter()
        .zip(phi.iter())
        .fold(ZERO, |acc, (c, f)| acc + c * *f))
}

/// `⟨x|ψ⟩` on every point of `grid`.
pub fn position_amplitudes(state: &QuantumState, grid: &[f64]) -> Result<Vec<Complex64>> {
    let n = single_cutoff(state)?;
    Ok(grid
        .iter()
        .map(|&x| {
            let phi = hermite_functions(x, n);
            state
                .amplitudes()
                .iter()
                .zip(phi.iter())
                .fold(ZERO, |acc, (c, f)| acc + c * *f)
        })
        .collect())
}
