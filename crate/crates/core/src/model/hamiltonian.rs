use num_complex::Complex64;

use super::EffectiveParams;
use crate::fock::{self, embed, identity, tensor, FockOperator, Mode, Space};
use crate::{Error, FrequencyRatio, Result};

/// `b + b†` on one mode.
pub(crate) fn position_like(cutoff: usize) -> Result<FockOperator> {
    let (x, _) = fock::quadratures(cutoff)?;
    Ok(x.scale(core::f64::consts::SQRT_2))
}

/// Truncated `c(b + b†)² + n b†b + c₀`, entry by entry.
fn squared_position_form(cutoff: usize, c: f64, number: f64, constant: f64) -> Result<FockOperator> {
    // (b + b†)² = b†² + b² + 2b†b + 1.
    let z = Complex64::new(c, 0.0);
    fock::quadratic_form(cutoff, z, z, number + 2.0 * c, constant + c)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        Err(Error::InvalidParameter { name: "lambda", value: lambda })
    } else {
        Ok(())
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta >= 1.0) || !eta.is_finite() {
        Err(Error::InvalidParameter { name: "eta", value: eta })
    } else {
        Ok(())
    }
}

/// Two-mode linearized Hamiltonian `η a†a + b†b − g(a + a†)(b + b†)` in
/// units of `ω_m`, with `g = G/ω_m` and `η = Δ/ω_m`.
pub fn hamiltonian_linearized(ep: &EffectiveParams, cutoff_a: usize, cutoff_b: usize) -> Result<FockOperator> {
    linearized(ep.eta, ep.coupling / ep.omega_m, cutoff_a, cutoff_b)
}

pub(crate) fn linearized(eta: f64, g: f64, cutoff_a: usize, cutoff_b: usize) -> Result<FockOperator> {
    let free_a = fock::number(cutoff_a)?.scale(eta);
    let free_b = fock::number(cutoff_b)?;
    let coupling = tensor(&position_like(cutoff_a)?, &position_like(cutoff_b)?)?;
    embed(&free_a, Mode::Cavity, (cutoff_a, cutoff_b))?
        .add(&embed(&free_b, Mode::Mechanical, (cutoff_a, cutoff_b))?)?
        .sub(&coupling.scale(g))
}

/// Effective single-mode Hamiltonian `b†b − (λ²/4)(b + b†)²` in units of
/// `ω_m`.
///
/// With `include_zero_point` the constant `1/2` is added, giving the
/// quadrature form `[P² + (1 − λ²)X²]/2`. Spectral gaps do not depend on
/// the choice.
pub fn hamiltonian_effective(lambda: f64, cutoff: usize, include_zero_point: bool) -> Result<FockOperator> {
    check_lambda(lambda)?;
    effective_with_coefficient(lambda * lambda, cutoff, include_zero_point)
}

fn effective_with_coefficient(lambda_sq: f64, cutoff: usize, include_zero_point: bool) -> Result<FockOperator> {
    let zero_point = if include_zero_point { 0.5 } else { 0.0 };
    squared_position_form(cutoff, -0.25 * lambda_sq, 1.0, zero_point)
}

/// `λ_eff² = λ² + λ⁴η⁻²/6`, the coefficient of `−(b + b†)²/4` once the
/// finite-η mechanical terms of the corrected Hamiltonian are collected.
pub fn lambda_eff_squared(lambda: f64, eta: FrequencyRatio) -> f64 {
    let l2 = lambda * lambda;
    let inv = eta.inverse();
    l2 + l2 * l2 * inv * inv / 6.0
}

/// Finite-η corrected two-mode Hamiltonian in units of `ω_m`:
/// `η a†a + b†b − (λ²/4)(b + b†)² − (λ²/4)η⁻¹(a + a†)² − (λ⁴/24)η⁻²(b + b†)²`.
pub fn hamiltonian_corrected(lambda: f64, eta: f64, cutoff_a: usize, cutoff_b: usize) -> Result<FockOperator> {
    check_lambda(lambda)?;
    check_eta(eta)?;
    let cutoffs = (cutoff_a, cutoff_b);
    let l2 = lambda * lambda;
    let cavity = squared_position_form(cutoff_a, -0.25 * l2 / eta, eta, 0.0)?;
    let mechanical = effective_with_coefficient(lambda_eff_squared(lambda, FrequencyRatio::Finite(eta)), cutoff_b, false)?;
    embed(&cavity, Mode::Cavity, cutoffs)?.add(&embed(&mechanical, Mode::Mechanical, cutoffs)?)
}

/// Mechanical block of [`hamiltonian_corrected`], valid while the cavity
/// stays in vacuum: `b†b − (λ_eff²/4)(b + b†)²`.
///
/// `FrequencyRatio::Infinite` drops every η term and reproduces
/// [`hamiltonian_effective`].
pub fn hamiltonian_corrected_mechanical(
    lambda: f64,
    eta: FrequencyRatio,
    cutoff: usize,
    include_zero_point: bool,
) -> Result<FockOperator> {
    check_lambda(lambda)?;
    if let FrequencyRatio::Finite(e) = eta {
        check_eta(e)?;
    }
    effective_with_coefficient(lambda_eff_squared(lambda, eta), cutoff, include_zero_point)
}

/// Cavity free part `η a†a ⊗ 1` on the pair space.
pub fn cavity_free_part(eta: f64, cutoff_a: usize, cutoff_b: usize) -> Result<FockOperator> {
    let free = fock::number(cutoff_a)?.scale(eta);
    tensor(&free, &identity(Space::Single(cutoff_b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{p_squared, squeeze_matrix, x_squared};
    use crate::linalg::{max_abs, HermitianEigen};

    fn gaps(h: &FockOperator, count: usize) -> alloc::vec::Vec<f64> {
        let eig = HermitianEigen::new(h.matrix());
        (0..count).map(|k| eig.values[k + 1] - eig.values[k]).collect()
    }

    #[test]
    fn free_oscillator_spectrum() {
        let h = hamiltonian_effective(0.0, 10, false).unwrap();
        let eig = HermitianEigen::new(h.matrix());
        for n in 0..10 {
            assert!((eig.values[n] - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn gaps_at_lambda_point_six() {
        let h = hamiltonian_effective(0.6, 120, false).unwrap();
        for g in gaps(&h, 5) {
            assert!((g - 0.8).abs() < 1e-8 * 0.8, "gap {g}");
        }
    }

    #[test]
    fn zero_point_form_matches_quadratures() {
        let cutoff = 30;
        let lambda: f64 = 0.7;
        let h = hamiltonian_effective(lambda, cutoff, true).unwrap();
        let q = p_squared(cutoff)
            .unwrap()
            .add(&x_squared(cutoff).unwrap().scale(1.0 - lambda * lambda))
            .unwrap()
            .scale(0.5);
        assert!(max_abs(&(h.matrix() - q.matrix())) < 1e-14);
        let h0 = hamiltonian_effective(lambda, cutoff, false).unwrap();
        let shift = h.sub(&h0).unwrap();
        assert!(max_abs(&(shift.matrix() - identity(Space::Single(cutoff)).scale(0.5).matrix())) < 1e-13);
    }

    #[test]
    fn squeeze_diagonalizes_effective_hamiltonian() {
        // With 𝒮(r) = exp[r(b†² − b²)/2], 𝒮†(r)ℋ𝒮(r) is diagonal for
        // r = −r_np = −ln(1 − λ²)/4.
        let lambda: f64 = 0.6;
        let cutoff = 120;
        let r_np = 0.25 * libm::log(1.0 - lambda * lambda);
        let h = hamiltonian_effective(lambda, cutoff, false).unwrap();
        let s = squeeze_matrix(-r_np, cutoff).unwrap();
        let t = s.adjoint().product(&h).unwrap().product(&s).unwrap();
        let interior = Space::Single(cutoff).interior(0.5);
        let block = crate::linalg::sub_block(t.matrix(), &interior);
        let mut off = 0.0;
        let mut total = 0.0;
        for r in 0..block.nrows() {
            for c in 0..block.ncols() {
                let v = block[(r, c)].norm_sqr();
                total += v;
                if r != c {
                    off += v;
                }
            }
        }
        assert!(libm::sqrt(off / total) < 1e-8);
        let s_wrong = squeeze_matrix(r_np, cutoff).unwrap();
        let t_wrong = s_wrong.adjoint().product(&h).unwrap().product(&s_wrong).unwrap();
        let block = crate::linalg::sub_block(t_wrong.matrix(), &interior);
        assert!(block[(0, 2)].norm() > 1e-2);
    }

    #[test]
    fn linearized_is_hermitian_and_decoupled_at_zero_coupling() {
        let ep = EffectiveParams::from_dimensionless(0.0, 20.0).unwrap();
        let h = hamiltonian_linearized(&ep, 4, 5).unwrap();
        assert!(h.is_hermitian());
        assert!(h.hermiticity_residual() <= 1e-12);
        let eig = HermitianEigen::new(h.matrix());
        assert!(eig.values[0].abs() < 1e-14);
        // Diagonal: a†a ⊗ 1 · η + 1 ⊗ b†b.
        assert!((h.matrix()[(5 + 2, 5 + 2)].re - 22.0).abs() < 1e-12);
    }

    #[test]
    fn linearized_ground_energy_approaches_e_np() {
        let lambda = 0.6;
        let mut errors = alloc::vec::Vec::new();
        for eta in [50.0, 200.0] {
            let ep = EffectiveParams::from_dimensionless(lambda, eta).unwrap();
            let h = hamiltonian_linearized(&ep, 8, 60).unwrap();
            let e0 = HermitianEigen::new(h.matrix()).values[0];
            errors.push((e0 - ep.e_np.unwrap()).abs());
        }
        assert!(errors[0] < 0.01);
        assert!(errors[1] < errors[0]);
    }

    #[test]
    fn corrected_reduces_to_effective() {
        let h = hamiltonian_corrected_mechanical(0.9, FrequencyRatio::Infinite, 40, false).unwrap();
        let e = hamiltonian_effective(0.9, 40, false).unwrap();
        assert_eq!(h.matrix(), e.matrix());

        let (ca, cb) = (3, 20);
        let full = hamiltonian_corrected(0.9, 10.0, ca, cb).unwrap();
        assert!(full.hermiticity_residual() <= 1e-12);
        let mech = hamiltonian_corrected_mechanical(0.9, FrequencyRatio::Finite(10.0), cb, false).unwrap();
        let cavity_term = squared_position_form(ca, -0.25 * 0.81 / 10.0, 0.0, 0.0).unwrap();
        let rebuilt = cavity_free_part(10.0, ca, cb)
            .unwrap()
            .add(&embed(&cavity_term, Mode::Cavity, (ca, cb)).unwrap())
            .unwrap()
            .add(&embed(&mech, Mode::Mechanical, (ca, cb)).unwrap())
            .unwrap();
        assert!(max_abs(&(full.matrix() - rebuilt.matrix())) < 1e-13);
    }

    #[test]
    fn mechanical_correction_gap() {
        let (lambda, eta) = (0.9, 10.0);
        let h = hamiltonian_corrected_mechanical(lambda, FrequencyRatio::Finite(eta), 300, false).unwrap();
        let expected = libm::sqrt(1.0 - lambda_eff_squared(lambda, FrequencyRatio::Finite(eta)));
        for g in gaps(&h, 5) {
            assert!((g - expected).abs() < 1e-8, "gap {g} vs {expected}");
        }
    }

    #[test]
    fn rejects_bad_eta() {
        assert!(hamiltonian_corrected(0.5, 0.5, 3, 3).is_err());
        assert!(hamiltonian_corrected_mechanical(0.5, FrequencyRatio::Finite(f64::NAN), 3, false).is_err());
    }
}
