//! Operator algebra on truncated Fock spaces.
//!
//! Quadratures follow `X = (b† + b)/√2`, `P = i(b† − b)/√2`, so the vacuum
//! has `Var X = 1/2` and `[X, P] = i` away from the truncation edge.
//! Two-mode spaces are ordered cavity ⊗ mechanical: the flat index of
//! `|n_a⟩ ⊗ |n_b⟩` is `n_a · cutoff_b + n_b`.
//!
//! Operators whose truncation matters (quadratic forms such as `X²` or the
//! Hamiltonians) are built entry by entry as the projection `Π O Π` of the
//! untruncated operator rather than as products of truncated matrices.

mod operators;
mod position;
mod states;

pub use operators::{
    embed, identity, ladder, number, quadratic_form, quadratures, squeeze_matrix, tensor,
    x_squared, p_squared, xp_symmetric, Mode,
};
pub use position::{hermite_functions, position_amplitude, position_amplitudes};
pub use states::{
    basis_state, coherent_state, expectation, product_state, superposition_state, variance,
    QuantumState, ADEQUATE_TAIL_MASS,
};

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::linalg::{self, CMatrix, CVector};
use crate::{Error, Result};

/// Shape of a truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// One mode with the given cutoff (basis dimension).
    Single(usize),
    /// Cavity ⊗ mechanical.
    Pair {
        /// Cavity cutoff.
        cavity: usize,
        /// Mechanical cutoff.
        mechanical: usize,
    },
}

impl Space {
    /// Total basis dimension.
    pub fn dim(&self) -> usize {
        match *self {
            Space::Single(n) => n,
            Space::Pair { cavity, mechanical } => cavity * mechanical,
        }
    }

    /// Number of modes, 1 or 2.
    pub fn modes(&self) -> usize {
        match self {
            Space::Single(_) => 1,
            Space::Pair { .. } => 2,
        }
    }

    /// Cutoff of the mechanical mode (the only mode for single-mode spaces).
    pub fn mechanical_cutoff(&self) -> usize {
        match *self {
            Space::Single(n) => n,
            Space::Pair { mechanical, .. } => mechanical,
        }
    }

    /// Indices of basis states whose per-mode occupations all lie below
    /// `(1 − margin)` of the respective cutoffs.
    ///
    /// Truncation corrupts matrix products near the top of each mode, so
    /// identities that hold for the untruncated operators are checked on
    /// this interior.
    pub fn interior(&self, margin: f64) -> Vec<usize> {
        let keep = |n: usize| libm::floor((n as f64) * (1.0 - margin)).max(1.0) as usize;
        match *self {
            Space::Single(n) => (0..keep(n)).collect(),
            Space::Pair { cavity, mechanical } => {
                let (ka, kb) = (keep(cavity), keep(mechanical));
                let mut out = Vec::with_capacity(ka * kb);
                for na in 0..ka {
                    for nb in 0..kb {
                        out.push(na * mechanical + nb);
                    }
                }
                out
            }
        }
    }
}

pub(crate) fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        Err(Error::InvalidCutoff { cutoff, min: 2 })
    } else {
        Ok(())
    }
}

/// Tolerance on `max |M − M†|` for matrices flagged Hermitian, relative to
/// `max(1, max |M_ij|)`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Dense operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    space: Space,
    matrix: CMatrix,
    hermitian: bool,
}

impl FockOperator {
    /// Wraps a matrix. When `hermitian` is set the matrix is checked.
    pub fn new(space: Space, matrix: CMatrix, hermitian: bool) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: matrix.nrows() });
        }
        if hermitian {
            let residual = linalg::hermiticity_residual(&matrix);
            if residual > HERMITIAN_TOLERANCE * linalg::max_abs(&matrix).max(1.0) {
                return Err(Error::NotHermitian { residual });
            }
        }
        Ok(FockOperator { space, matrix, hermitian })
    }

    pub(crate) fn from_parts(space: Space, matrix: CMatrix, hermitian: bool) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        FockOperator { space, matrix, hermitian }
    }

    /// Space the operator acts on.
    pub fn space(&self) -> Space {
        self.space
    }

    /// Basis dimension.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Whether the operator carries the Hermitian flag.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Largest entrywise `|M − M†|`.
    pub fn hermiticity_residual(&self) -> f64 {
        linalg::hermiticity_residual(&self.matrix)
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        FockOperator::from_parts(self.space, self.matrix.adjoint(), self.hermitian)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() })
        } else {
            Ok(())
        }
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FockOperator::from_parts(
            self.space,
            &self.matrix + &other.matrix,
            self.hermitian && other.hermitian,
        ))
    }

    /// `self − other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FockOperator::from_parts(
            self.space,
            &self.matrix - &other.matrix,
            self.hermitian && other.hermitian,
        ))
    }

    /// Real multiple; keeps the Hermitian flag.
    pub fn scale(&self, factor: f64) -> Self {
        FockOperator::from_parts(self.space, &self.matrix * Complex64::new(factor, 0.0), self.hermitian)
    }

    /// Complex multiple; the Hermitian flag survives only for real factors.
    pub fn scale_complex(&self, factor: Complex64) -> Self {
        FockOperator::from_parts(
            self.space,
            &self.matrix * factor,
            self.hermitian && factor.im == 0.0,
        )
    }

    /// Matrix product `self · other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FockOperator::from_parts(self.space, &self.matrix * &other.matrix, false))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(FockOperator::from_parts(
            self.space,
            linalg::commutator(&self.matrix, &other.matrix),
            false,
        ))
    }

    /// Applies the operator to raw amplitudes.
    pub fn apply(&self, state: &QuantumState) -> Result<CVector> {
        if self.space != state.space() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: state.space().dim() });
        }
        Ok(&self.matrix * state.amplitudes())
    }

    /// Frobenius norm of the block on [`Space::interior`].
    pub fn interior_norm(&self, margin: f64) -> f64 {
        linalg::block_norm(&self.matrix, &self.space.interior(margin))
    }
}
