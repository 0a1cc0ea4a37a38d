//! Dense linear-algebra helpers shared by the physics modules.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigendecomposition `M = V diag(w) V†` of a Hermitian matrix, eigenvalues
/// in ascending order.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, ascending.
    pub values: DVector<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Decomposes `m`, which is assumed Hermitian. Purely real input takes the
    /// real symmetric route.
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        let is_real = m.iter().all(|z| z.im == 0.0);
        let (values, vectors) = if is_real {
            let re = m.map(|z| z.re);
            let eig = SymmetricEigen::new(re);
            (eig.eigenvalues, eig.eigenvectors.map(|x| Complex64::new(x, 0.0)))
        } else {
            let eig = SymmetricEigen::new(m.clone());
            (eig.eigenvalues, eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = DVector::from_fn(n, |i, _| values[order[i]]);
        let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        HermitianEigen { values: sorted_values, vectors: sorted_vectors }
    }

    /// `V diag(f(w)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for c in 0..n {
            let factor = f(self.values[c]);
            for r in 0..n {
                scaled[(r, c)] *= factor;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Largest entrywise `|M − M†|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Largest entrywise `|M + M†|`.
pub fn anti_hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] + m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// `exp(K)` for anti-Hermitian `K`, through the Hermitian matrix `iK`.
pub fn exp_anti_hermitian(k: &CMatrix) -> CMatrix {
    let hermitian = k * I;
    let eig = HermitianEigen::new(&hermitian);
    // K = -i (iK), so exp(K) = V exp(-i w) V†.
    eig.map(|w| Complex64::new(libm::cos(w), -libm::sin(w)))
}

/// `[A, B] = AB − BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Frobenius norm of the principal sub-block picked by `indices`.
pub fn block_norm(m: &CMatrix, indices: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &r in indices {
        for &c in indices {
            acc += m[(r, c)].norm_sqr();
        }
    }
    libm::sqrt(acc)
}

/// Principal sub-block picked by `indices`.
pub fn sub_block(m: &CMatrix, indices: &[usize]) -> CMatrix {
    CMatrix::from_fn(indices.len(), indices.len(), |r, c| m[(indices[r], indices[c])])
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            step * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}
