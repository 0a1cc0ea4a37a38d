use num_complex::Complex64;

use super::hamiltonian::{linearized, position_like};
use crate::fock::{self, tensor, FockOperator, Space};
use crate::linalg;
use crate::{Error, Result};

/// Order in `G` kept in the Schrieffer-Wolff generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwOrder {
    /// Leading term `(λ/2)η^{−1/2}(b + b†)(a† − a)`.
    First,
    /// Through third order in `G`.
    Third,
}

/// `b − b†` on one mode.
fn momentum_like(cutoff: usize) -> Result<FockOperator> {
    let (b, bd) = fock::ladder(cutoff)?;
    b.sub(&bd)
}

fn check(lambda: f64, eta: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter { name: "lambda", value: lambda });
    }
    if !(eta >= 1.0) || !eta.is_finite() {
        return Err(Error::InvalidParameter { name: "eta", value: eta });
    }
    Ok(())
}

/// Anti-Hermitian generator `S̃` of the transformation that decouples the
/// linearized Hamiltonian, in units of `ω_m`.
///
/// With `g = λ√η/2`, `x = b + b†`, `q = b − b†`, `y = a + a†` and
/// `A = a† − a`, the first-order equation `[H_s, S̃₁] = V` is solved
/// exactly by `S̃₁ = (η xA + qy)/(η² − 1)`, and the third-order equation by
/// `S̃₃ = −(16/3)αβ S̃₁` with `α = η/(η² − 1)`, `β = 1/(η² − 1)`. Hence
///
/// `S̃ = g[1 − (16/3)g²αβ](α xA + β qy)`.
///
/// Its expansion in `1/η` starts with the two leading terms
/// `(λ/2)η^{−1/2} xA + (λ/2)η^{−3/2} qy`. [`SwOrder::First`] returns only
/// the first of them; [`SwOrder::Third`] needs `η > 1`.
pub fn sw_generator(lambda: f64, eta: f64, cutoff_a: usize, cutoff_b: usize, order: SwOrder) -> Result<FockOperator> {
    check(lambda, eta)?;
    let g = 0.5 * lambda * libm::sqrt(eta);
    let xa = tensor(&momentum_like(cutoff_a)?.scale(-1.0), &position_like(cutoff_b)?)?;
    let s = match order {
        SwOrder::First => xa.scale(g / eta),
        SwOrder::Third => {
            if eta == 1.0 {
                return Err(Error::InvalidParameter { name: "eta", value: eta });
            }
            let denom = eta * eta - 1.0;
            let (alpha, beta) = (eta / denom, 1.0 / denom);
            let qy = tensor(&position_like(cutoff_a)?, &momentum_like(cutoff_b)?)?;
            let factor = g * (1.0 - 16.0 / 3.0 * g * g * alpha * beta);
            xa.scale(alpha).add(&qy.scale(beta))?.scale(factor)
        }
    };
    Ok(s)
}

/// The three-term third-order generator exactly as usually displayed,
/// `(λ/2)η^{−1/2} xA + (λ/2)η^{−3/2} qy + (λ³/12)η^{−3/2}[x³ − q² − x]y`.
///
/// Kept for comparison only: its last term is Hermitian, so the sum is not
/// anti-Hermitian and does not generate a unitary.
pub fn sw_generator_as_printed(lambda: f64, eta: f64, cutoff_a: usize, cutoff_b: usize) -> Result<FockOperator> {
    check(lambda, eta)?;
    let x = position_like(cutoff_b)?;
    let q = momentum_like(cutoff_b)?;
    let y = position_like(cutoff_a)?;
    let big_a = momentum_like(cutoff_a)?.scale(-1.0);
    let x3 = x.product(&x)?.product(&x)?;
    let bracket = x3.sub(&q.product(&q)?)?.sub(&x)?;
    let first = tensor(&big_a, &x)?.scale(0.5 * lambda * libm::pow(eta, -0.5));
    let second = tensor(&y, &q)?.scale(0.5 * lambda * libm::pow(eta, -1.5));
    let third = tensor(&y, &bracket)?.scale(libm::pow(lambda, 3.0) / 12.0 * libm::pow(eta, -1.5));
    first.add(&second)?.add(&third)
}

/// How far `e^{−S}H_L e^{S}` is from being block diagonal in the cavity
/// parity, restricted to the interior of the pair space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwResidual {
    /// Frobenius norm of the parity-changing part of the transformed
    /// Hamiltonian on the interior.
    pub absolute: f64,
    /// Same norm for the untransformed Hamiltonian, i.e. the coupling term.
    pub coupling: f64,
}

impl SwResidual {
    /// `absolute / coupling`.
    pub fn relative(&self) -> f64 {
        self.absolute / self.coupling
    }
}

/// Interior margin used by [`sw_offdiagonal_residual`].
pub const SW_INTERIOR_MARGIN: f64 = 0.5;

/// Transforms `H_L(λ, η)` with `e^{S}` and measures the leftover
/// cavity–mechanical coupling on the interior subspace.
///
/// The coupling term `(a + a†)(b + b†)` flips the cavity parity; after a
/// successful transformation only parity-preserving terms remain at the
/// order kept. `generator` must be anti-Hermitian.
pub fn sw_offdiagonal_residual(
    lambda: f64,
    eta: f64,
    generator: &FockOperator,
) -> Result<SwResidual> {
    check(lambda, eta)?;
    let Space::Pair { cavity, mechanical } = generator.space() else {
        return Err(Error::DimensionMismatch { left: generator.dim(), right: generator.space().mechanical_cutoff() });
    };
    let anti = linalg::anti_hermiticity_residual(generator.matrix());
    if anti > 1e-12 * linalg::max_abs(generator.matrix()).max(1.0) {
        return Err(Error::NotHermitian { residual: anti });
    }
    let h = linearized(eta, 0.5 * lambda * libm::sqrt(eta), cavity, mechanical)?;
    let u = linalg::exp_anti_hermitian(generator.matrix());
    let transformed = u.adjoint() * h.matrix() * &u;
    let interior = generator.space().interior(SW_INTERIOR_MARGIN);
    let parity_norm = |m: &linalg::CMatrix| {
        let mut acc = 0.0;
        for &r in &interior {
            for &c in &interior {
                if (r / mechanical + c / mechanical) % 2 == 1 {
                    acc += Complex64::norm_sqr(&m[(r, c)]);
                }
            }
        }
        libm::sqrt(acc)
    };
    Ok(SwResidual { absolute: parity_norm(&transformed), coupling: parity_norm(h.matrix()) })
}
