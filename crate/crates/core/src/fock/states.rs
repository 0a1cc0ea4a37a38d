use num_complex::Complex64;

use super::{check_cutoff, FockOperator, Space};
use crate::linalg::{CVector, ONE};
use crate::{Error, Result};

/// Tail mass above which a truncation is considered inadequate.
pub const ADEQUATE_TAIL_MASS: f64 = 1e-8;

/// Normalized pure state on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: Space,
    amplitudes: CVector,
    tail_mass: f64,
}

impl QuantumState {
    /// Normalizes `amplitudes` and records the tail mass.
    pub fn from_amplitudes(space: Space, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch { left: space.dim(), right: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter { name: "state norm", value: norm });
        }
        let amplitudes = amplitudes.unscale(norm);
        let tail_mass = tail_mass(space, &amplitudes);
        Ok(QuantumState { space, amplitudes, tail_mass })
    }

    /// Space the state lives on.
    pub fn space(&self) -> Space {
        self.space
    }

    /// Normalized amplitudes.
    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// Probability in the top 10% of basis indices (per mode for two-mode
    /// states, taking the larger of the two marginals).
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Fails with [`Error::CutoffTooSmall`] unless the tail mass is below
    /// [`ADEQUATE_TAIL_MASS`].
    pub fn ensure_adequate(&self, time: Option<f64>) -> Result<()> {
        if self.tail_mass <= ADEQUATE_TAIL_MASS {
            Ok(())
        } else {
            Err(Error::CutoffTooSmall { tail_mass: self.tail_mass, limit: ADEQUATE_TAIL_MASS, time })
        }
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &QuantumState) -> Result<Complex64> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch { left: self.space.dim(), right: other.space.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

fn tail_start(cutoff: usize) -> usize {
    cutoff - cutoff.div_ceil(10)
}

fn tail_mass(space: Space, amplitudes: &CVector) -> f64 {
    match space {
        Space::Single(n) => amplitudes.iter().skip(tail_start(n)).map(|z| z.norm_sqr()).sum(),
        Space::Pair { cavity, mechanical } => {
            let (ta, tb) = (tail_start(cavity), tail_start(mechanical));
            let mut cavity_tail = 0.0;
            let mut mech_tail = 0.0;
            for (k, z) in amplitudes.iter().enumerate() {
                let (na, nb) = (k / mechanical, k % mechanical);
                if na >= ta {
                    cavity_tail += z.norm_sqr();
                }
                if nb >= tb {
                    mech_tail += z.norm_sqr();
                }
            }
            f64::max(cavity_tail, mech_tail)
        }
    }
}

/// Fock state `|n⟩`.
pub fn basis_state(n: usize, cutoff: usize) -> Result<QuantumState> {
    check_cutoff(cutoff)?;
    if n >= cutoff {
        return Err(Error::InvalidCutoff { cutoff, min: n + 1 });
    }
    let mut v = CVector::zeros(cutoff);
    v[n] = ONE;
    QuantumState::from_amplitudes(Space::Single(cutoff), v)
}

/// `(|0⟩ + i|1⟩)/√2`.
pub fn superposition_state(cutoff: usize) -> Result<QuantumState> {
    check_cutoff(cutoff)?;
    let mut v = CVector::zeros(cutoff);
    let r = core::f64::consts::FRAC_1_SQRT_2;
    v[0] = Complex64::new(r, 0.0);
    v[1] = Complex64::new(0.0, r);
    QuantumState::from_amplitudes(Space::Single(cutoff), v)
}

/// Coherent state `e^{−|α|²/2} Σ αⁿ/√(n!) |n⟩`, renormalized after
/// truncation.
///
/// Requires `|α|² ≤ cutoff/4`; the Poisson weight beyond `4|α|²` is then
/// negligible. The tail mass is still recorded for later checks.
pub fn coherent_state(alpha: Complex64, cutoff: usize) -> Result<QuantumState> {
    check_cutoff(cutoff)?;
    let mean_n = alpha.norm_sqr();
    if mean_n > cutoff as f64 / 4.0 {
        return Err(Error::CutoffTooSmall { tail_mass: mean_n, limit: cutoff as f64 / 4.0, time: None });
    }
    let mut v = CVector::zeros(cutoff);
    v[0] = Complex64::new(libm::exp(-0.5 * mean_n), 0.0);
    for n in 1..cutoff {
        v[n] = v[n - 1] * alpha / libm::sqrt(n as f64);
    }
    QuantumState::from_amplitudes(Space::Single(cutoff), v)
}

/// `|cavity⟩ ⊗ |mechanical⟩`.
pub fn product_state(cavity: &QuantumState, mechanical: &QuantumState) -> Result<QuantumState> {
    let (Space::Single(na), Space::Single(nb)) = (cavity.space(), mechanical.space()) else {
        return Err(Error::DimensionMismatch { left: cavity.space().dim(), right: mechanical.space().dim() });
    };
    let v = cavity.amplitudes().kronecker(mechanical.amplitudes());
    QuantumState::from_amplitudes(Space::Pair { cavity: na, mechanical: nb }, v)
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(op: &FockOperator, state: &QuantumState) -> Result<Complex64> {
    let applied = op.apply(state)?;
    Ok(state.amplitudes().dotc(&applied))
}

/// `⟨O²⟩ − ⟨O⟩²` for Hermitian `O`, evaluated as `‖Oψ‖² − ⟨O⟩²`.
pub fn variance(op: &FockOperator, state: &QuantumState) -> Result<f64> {
    if !op.is_hermitian() {
        return Err(Error::NotHermitian { residual: op.hermiticity_residual() });
    }
    let applied = op.apply(state)?;
    let mean = state.amplitudes().dotc(&applied).re;
    let second = applied.norm_squared();
    let v = second - mean * mean;
    Ok(if (-1e-12..0.0).contains(&v) { 0.0 } else { v })
}
