use num_complex::Complex64;

use super::{check_cutoff, FockOperator, Space};
use crate::linalg::{self, CMatrix, ZERO};
use crate::{Error, Result};

/// Which mode of the cavity ⊗ mechanical pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Optical cavity, `a`.
    Cavity,
    /// Mechanical oscillator, `b`.
    Mechanical,
}

/// Annihilation and creation operators, `b[n−1, n] = √n`.
pub fn ladder(cutoff: usize) -> Result<(FockOperator, FockOperator)> {
    check_cutoff(cutoff)?;
    let mut m = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        m[(n - 1, n)] = Complex64::new(libm::sqrt(n as f64), 0.0);
    }
    let space = Space::Single(cutoff);
    let create = FockOperator::from_parts(space, m.adjoint(), false);
    Ok((FockOperator::from_parts(space, m, false), create))
}

/// `b†b`.
pub fn number(cutoff: usize) -> Result<FockOperator> {
    quadratic_form(cutoff, ZERO, ZERO, 1.0, 0.0)
}

/// Identity on `space`.
pub fn identity(space: Space) -> FockOperator {
    let n = space.dim();
    FockOperator::from_parts(space, CMatrix::identity(n, n), true)
}

/// `X = (b† + b)/√2` and `P = i(b† − b)/√2`, both flagged Hermitian.
pub fn quadratures(cutoff: usize) -> Result<(FockOperator, FockOperator)> {
    check_cutoff(cutoff)?;
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let mut x = CMatrix::zeros(cutoff, cutoff);
    let mut p = CMatrix::zeros(cutoff, cutoff);
    for n in 1..cutoff {
        let s = libm::sqrt(n as f64) * r;
        x[(n - 1, n)] = Complex64::new(s, 0.0);
        x[(n, n - 1)] = Complex64::new(s, 0.0);
        // P = i(b† − b)/√2: ⟨n|P|n−1⟩ = i√n/√2, ⟨n−1|P|n⟩ = −i√n/√2.
        p[(n, n - 1)] = Complex64::new(0.0, s);
        p[(n - 1, n)] = Complex64::new(0.0, -s);
    }
    let space = Space::Single(cutoff);
    Ok((FockOperator::from_parts(space, x, true), FockOperator::from_parts(space, p, true)))
}

/// Truncation of `c₊ b†² + c₋ b² + c_n b†b + c₀`, entry by entry.
///
/// Flagged Hermitian when `c₋ = c₊*`.
pub fn quadratic_form(
    cutoff: usize,
    create_sq: Complex64,
    annihilate_sq: Complex64,
    number: f64,
    constant: f64,
) -> Result<FockOperator> {
    check_cutoff(cutoff)?;
    let mut m = CMatrix::zeros(cutoff, cutoff);
    for n in 0..cutoff {
        m[(n, n)] = Complex64::new(number * n as f64 + constant, 0.0);
        if n + 2 < cutoff {
            let s = libm::sqrt(((n + 1) * (n + 2)) as f64);
            m[(n + 2, n)] = create_sq * s;
            m[(n, n + 2)] = annihilate_sq * s;
        }
    }
    let hermitian = annihilate_sq == create_sq.conj();
    Ok(FockOperator::from_parts(Space::Single(cutoff), m, hermitian))
}

/// `X² = (b†² + b² + 2b†b + 1)/2`.
pub fn x_squared(cutoff: usize) -> Result<FockOperator> {
    let h = Complex64::new(0.5, 0.0);
    quadratic_form(cutoff, h, h, 1.0, 0.5)
}

/// `P² = (−b†² − b² + 2b†b + 1)/2`.
pub fn p_squared(cutoff: usize) -> Result<FockOperator> {
    let h = Complex64::new(-0.5, 0.0);
    quadratic_form(cutoff, h, h, 1.0, 0.5)
}

/// `(XP + PX)/2 = i(b†² − b²)/2`.
pub fn xp_symmetric(cutoff: usize) -> Result<FockOperator> {
    quadratic_form(cutoff, Complex64::new(0.0, 0.5), Complex64::new(0.0, -0.5), 0.0, 0.0)
}

/// Kronecker product of two single-mode operators; the first factor is the
/// cavity.
pub fn tensor(cavity: &FockOperator, mechanical: &FockOperator) -> Result<FockOperator> {
    let (Space::Single(na), Space::Single(nb)) = (cavity.space(), mechanical.space()) else {
        return Err(Error::DimensionMismatch {
            left: cavity.dim(),
            right: mechanical.dim(),
        });
    };
    let m = cavity.matrix().kronecker(mechanical.matrix());
    Ok(FockOperator::from_parts(
        Space::Pair { cavity: na, mechanical: nb },
        m,
        cavity.is_hermitian() && mechanical.is_hermitian(),
    ))
}

/// Pads a single-mode operator with the identity on the other mode.
pub fn embed(op: &FockOperator, mode: Mode, cutoffs: (usize, usize)) -> Result<FockOperator> {
    let (na, nb) = cutoffs;
    let expected = match mode {
        Mode::Cavity => na,
        Mode::Mechanical => nb,
    };
    if op.space() != Space::Single(expected) {
        return Err(Error::DimensionMismatch { left: op.dim(), right: expected });
    }
    match mode {
        Mode::Cavity => tensor(op, &identity(Space::Single(nb))),
        Mode::Mechanical => tensor(&identity(Space::Single(na)), op),
    }
}

/// `𝒮(r) = exp[r(b†² − b²)/2]`.
///
/// The truncated generator is anti-Hermitian, so the result is exactly
/// unitary on the truncated space and reproduces the untruncated squeeze on
/// states supported well below the cutoff. With this convention
/// `𝒮†(r) X 𝒮(r) = e^r X`, so squeezed vacuum has `Var X = e^{2r}/2`.
pub fn squeeze_matrix(r: f64, cutoff: usize) -> Result<FockOperator> {
    check_cutoff(cutoff)?;
    if !(r.abs() <= 3.0) {
        return Err(Error::TruncationGuard { r });
    }
    let half = Complex64::new(0.5 * r, 0.0);
    let generator = quadratic_form(cutoff, half, -half, 0.0, 0.0)?;
    let u = if r == 0.0 {
        CMatrix::identity(cutoff, cutoff)
    } else {
        linalg::exp_anti_hermitian(generator.matrix())
    };
    Ok(FockOperator::from_parts(Space::Single(cutoff), u, false))
}
