use alloc::vec::Vec;
use num_complex::Complex64;

use crate::fock::{self, embed, expectation, variance, FockOperator, Mode, QuantumState, Space};
use crate::linalg::{CVector, HermitianEigen};
use crate::{Error, Result};

/// Time evolution `e^{−iHs}` backed by one eigendecomposition of `H`, so any
/// number of durations can be evaluated without refactoring.
#[derive(Debug, Clone)]
pub struct Propagator {
    space: Space,
    eigen: HermitianEigen,
}

impl Propagator {
    /// Diagonalizes `h`, which must carry the Hermitian flag.
    pub fn new(h: &FockOperator) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::NotHermitian { residual: h.hermiticity_residual() });
        }
        Ok(Propagator { space: h.space(), eigen: HermitianEigen::new(h.matrix()) })
    }

    /// Space the Hamiltonian acts on.
    pub fn space(&self) -> Space {
        self.space
    }

    /// Eigenvalues of `H`, ascending.
    pub fn energies(&self) -> &[f64] {
        self.eigen.values.as_slice()
    }

    /// The unitary `e^{−iHs}`; exactly the identity for `s = 0`.
    pub fn unitary(&self, s: f64) -> FockOperator {
        let n = self.space.dim();
        let m = if s == 0.0 {
            crate::linalg::CMatrix::identity(n, n)
        } else {
            self.eigen.map(|e| phase(e, s))
        };
        FockOperator::from_parts(self.space, m, false)
    }

    /// Expansion coefficients `V†ψ` of a state in the eigenbasis.
    pub fn coefficients(&self, state: &QuantumState) -> Result<CVector> {
        if state.space() != self.space {
            return Err(Error::DimensionMismatch { left: self.space.dim(), right: state.space().dim() });
        }
        Ok(self.eigen.vectors.ad_mul(state.amplitudes()))
    }

    /// `V e^{−iEs} c` for eigenbasis coefficients `c`, not renormalized.
    pub fn evolve_coefficients(&self, coefficients: &CVector, s: f64) -> CVector {
        let rotated = CVector::from_fn(coefficients.len(), |k, _| coefficients[k] * phase(self.eigen.values[k], s));
        &self.eigen.vectors * rotated
    }

    /// `e^{−iHs}|ψ⟩`.
    pub fn evolve(&self, state: &QuantumState, s: f64) -> Result<QuantumState> {
        if s == 0.0 {
            if state.space() != self.space {
                return Err(Error::DimensionMismatch { left: self.space.dim(), right: state.space().dim() });
            }
            return Ok(state.clone());
        }
        let c = self.coefficients(state)?;
        QuantumState::from_amplitudes(self.space, self.evolve_coefficients(&c, s))
    }
}

fn phase(energy: f64, s: f64) -> Complex64 {
    let a = energy * s;
    Complex64::new(libm::cos(a), -libm::sin(a))
}

/// `e^{−iHs}` as a matrix.
pub fn propagator(h: &FockOperator, duration: f64) -> Result<FockOperator> {
    Ok(Propagator::new(h)?.unitary(duration))
}

/// Where the columns of a [`Trajectory`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectorySource {
    /// Exact propagation on a truncated space.
    Numeric,
    /// Closed forms for the superposition state.
    AnalyticSuperposition,
    /// Closed forms for a coherent state.
    AnalyticCoherent,
    /// Closed forms evaluated at the finite-η effective coupling.
    AnalyticCorrected,
}

/// Mechanical quadrature moments sampled along an evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Dimensionless times `s = ω_m t`, strictly increasing.
    pub times: Vec<f64>,
    /// Evolved states when requested on a numeric run.
    pub states: Option<Vec<QuantumState>>,
    /// `⟨X⟩(s)`.
    pub mean_x: Vec<f64>,
    /// `Var X(s)`.
    pub var_x: Vec<f64>,
    /// Origin of the data.
    pub source: TrajectorySource,
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    for (k, &t) in times.iter().enumerate() {
        if !t.is_finite() {
            return Err(Error::InvalidParameter { name: "time", value: t });
        }
        if k > 0 && !(t > times[k - 1]) {
            return Err(Error::InvalidParameter { name: "time (not strictly increasing)", value: t });
        }
    }
    Ok(())
}

/// Mechanical `X` on `space`, embedded as `1 ⊗ X` on two-mode spaces.
pub fn mechanical_x(space: Space) -> Result<FockOperator> {
    match space {
        Space::Single(n) => Ok(fock::quadratures(n)?.0),
        Space::Pair { cavity, mechanical } => {
            let (x, _) = fock::quadratures(mechanical)?;
            embed(&x, Mode::Mechanical, (cavity, mechanical))
        }
    }
}

/// Evolves `state0` under `h` and samples `⟨X⟩`, `Var X` of the mechanical
/// mode at `times`.
///
/// The tail mass is checked at every sample; the first breach is reported
/// with its time.
pub fn evolve_trajectory(
    state0: &QuantumState,
    h: &FockOperator,
    times: &[f64],
    keep_states: bool,
) -> Result<Trajectory> {
    let x = mechanical_x(state0.space())?;
    evolve_observable(state0, h, &x, times, keep_states)
}

/// As [`evolve_trajectory`] for an arbitrary Hermitian observable in place
/// of the mechanical `X`.
pub fn evolve_observable(
    state0: &QuantumState,
    h: &FockOperator,
    observable: &FockOperator,
    times: &[f64],
    keep_states: bool,
) -> Result<Trajectory> {
    check_times(times)?;
    let prop = Propagator::new(h)?;
    let c = prop.coefficients(state0)?;
    let mut mean_x = Vec::with_capacity(times.len());
    let mut var_x = Vec::with_capacity(times.len());
    let mut states = keep_states.then(|| Vec::with_capacity(times.len()));
    for &s in times {
        let state = if s == 0.0 {
            state0.clone()
        } else {
            QuantumState::from_amplitudes(prop.space(), prop.evolve_coefficients(&c, s))?
        };
        state.ensure_adequate(Some(s))?;
        mean_x.push(expectation(observable, &state)?.re);
        var_x.push(variance(observable, &state)?);
        if let Some(v) = states.as_mut() {
            v.push(state);
        }
    }
    Ok(Trajectory { times: times.to_vec(), states, mean_x, var_x, source: TrajectorySource::Numeric })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{basis_state, superposition_state};
    use crate::linalg::max_abs;
    use crate::model::hamiltonian_effective;

    #[test]
    fn zero_duration_is_identity() {
        let h = hamiltonian_effective(0.7, 20, false).unwrap();
        let u = propagator(&h, 0.0).unwrap();
        assert_eq!(u.matrix(), &crate::linalg::CMatrix::identity(20, 20));
    }

    #[test]
    fn free_oscillator_full_period() {
        let h = hamiltonian_effective(0.0, 16, false).unwrap();
        let u = propagator(&h, 2.0 * core::f64::consts::PI).unwrap();
        let id = crate::linalg::CMatrix::identity(16, 16);
        assert!(max_abs(&(u.matrix() - id)) < 1e-12);
    }

    #[test]
    fn group_property() {
        let h = hamiltonian_effective(0.9, 60, false).unwrap();
        let p = Propagator::new(&h).unwrap();
        let lhs = p.unitary(0.7).matrix() * p.unitary(1.9).matrix();
        assert!(max_abs(&(lhs - p.unitary(2.6).matrix())) < 1e-10);
    }

    #[test]
    fn rejects_non_hermitian() {
        let (b, _) = fock::ladder(4).unwrap();
        assert!(matches!(Propagator::new(&b), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn free_superposition_rotates() {
        let h = hamiltonian_effective(0.0, 12, false).unwrap();
        let times: Vec<f64> = (0..20).map(|k| 0.3 * k as f64).collect();
        let tr = evolve_trajectory(&superposition_state(12).unwrap(), &h, &times, false).unwrap();
        for (k, &s) in times.iter().enumerate() {
            // ⟨X²⟩ stays 1 while the mean oscillates.
            assert!((tr.var_x[k] - (1.0 - 0.5 * libm::sin(s) * libm::sin(s))).abs() < 1e-12);
            assert!((tr.mean_x[k] - libm::sin(s) / core::f64::consts::SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_breach_names_first_time() {
        // The vacuum only populates even levels; the top index 8 is even.
        let h = hamiltonian_effective(0.95, 9, false).unwrap();
        let times = [0.0, 0.5, 1.0, 2.0];
        match evolve_trajectory(&basis_state(0, 9).unwrap(), &h, &times, false) {
            Err(Error::CutoffTooSmall { time: Some(t), .. }) => assert!(t > 0.0),
            other => panic!("expected breach, got {other:?}"),
        }
    }

    #[test]
    fn times_must_increase() {
        let h = hamiltonian_effective(0.5, 8, false).unwrap();
        let s = basis_state(0, 8).unwrap();
        assert!(evolve_trajectory(&s, &h, &[0.0, 1.0, 1.0], false).is_err());
    }
}
