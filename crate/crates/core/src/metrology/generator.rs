use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dynamics::{big_lambda, check_stable};
use crate::fock::{self, variance, FockOperator, QuantumState, Space};
use crate::linalg::CVector;
use crate::{Error, Result};

/// Operators behind the sensing generator at one coupling, in units of
/// `ω_m`.
///
/// `H_ξ = H₀ + ξH₁` with `H₀ = P²/2`, `H₁ = X²/2`; `C = −i[H₀, H₁]`,
/// `D = P² − ξX²` and `Γ = i√Λ C − D`. On the untruncated space
/// `C = −(XP + PX)/2`; this sign makes `[H_ξ, H₁] = iC`,
/// `[H_ξ, iC] = −D` and `[H_ξ, Γ] = √Λ Γ` hold.
#[derive(Debug, Clone)]
pub struct GeneratorDecomposition {
    /// Coupling `λ`.
    pub lambda: f64,
    /// `ξ = 1 − λ²`.
    pub xi: f64,
    /// `Λ = 4ξ`.
    pub big_lambda: f64,
    /// `P²/2`.
    pub h0: FockOperator,
    /// `X²/2`.
    pub h1: FockOperator,
    /// `−(XP + PX)/2`.
    pub c: FockOperator,
    /// `P² − ξX²`.
    pub d: FockOperator,
    /// `i√Λ C − D`, not Hermitian.
    pub gamma: FockOperator,
}

impl GeneratorDecomposition {
    /// `H_ξ = [P² + ξX²]/2`.
    pub fn hamiltonian(&self) -> Result<FockOperator> {
        self.h0.add(&self.h1.scale(self.xi))
    }
}

/// Builds the decomposition at `cutoff`.
pub fn generator_decomposition(lambda: f64, cutoff: usize) -> Result<GeneratorDecomposition> {
    check_stable(lambda)?;
    let xi = 1.0 - lambda * lambda;
    let big = big_lambda(lambda);
    let x2 = fock::x_squared(cutoff)?;
    let p2 = fock::p_squared(cutoff)?;
    let h0 = p2.scale(0.5);
    let h1 = x2.scale(0.5);
    let c = fock::xp_symmetric(cutoff)?.scale(-1.0);
    let d = p2.sub(&x2.scale(xi))?;
    let gamma = c.scale_complex(Complex64::new(0.0, libm::sqrt(big))).sub(&d)?;
    Ok(GeneratorDecomposition { lambda, xi, big_lambda: big, h0, h1, c, d, gamma })
}

/// Interior margin for the commutator identities.
pub const LADDER_MARGIN: f64 = 0.2;

fn relative_interior(residual: &FockOperator, reference: &FockOperator) -> f64 {
    let scale = reference.interior_norm(LADDER_MARGIN);
    residual.interior_norm(LADDER_MARGIN) / if scale > 0.0 { scale } else { 1.0 }
}

/// Relative interior residuals of the commutator ladder
/// `[H_ξ^{(2n+1)}, H₁] = iΛⁿC` and `[H_ξ^{(2n+2)}, H₁] = −ΛⁿD` for
/// `n = 0..n_max`, where `[H^{(k)}, A]` is the `k`-fold nested commutator
/// `[H, [H, …, [H, A]]]`.
///
/// Returns `(odd, even)` residual pairs, each relative to the norm of the
/// right-hand side.
pub fn ladder_residuals(gd: &GeneratorDecomposition, n_max: usize) -> Result<Vec<(f64, f64)>> {
    let h = gd.hamiltonian()?;
    let mut nested = gd.h1.clone();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut power = 1.0;
    for _ in 0..=n_max {
        nested = h.commutator(&nested)?;
        let odd_rhs = gd.c.scale_complex(Complex64::new(0.0, power));
        let odd = relative_interior(&nested.sub(&odd_rhs)?, &odd_rhs);
        nested = h.commutator(&nested)?;
        let even_rhs = gd.d.scale(-power);
        let even = relative_interior(&nested.sub(&even_rhs)?, &even_rhs);
        out.push((odd, even));
        power *= gd.big_lambda;
    }
    Ok(out)
}

/// Relative interior residual of the eigen-operator relation
/// `[H_ξ, Γ] = √Λ Γ`.
pub fn gamma_residual(gd: &GeneratorDecomposition) -> Result<f64> {
    let lhs = gd.hamiltonian()?.commutator(&gd.gamma)?;
    let rhs = gd.gamma.scale(libm::sqrt(gd.big_lambda));
    Ok(relative_interior(&lhs.sub(&rhs)?, &rhs))
}

/// Coefficients `(H₁, C, D)` of `h_ξ(s) = H₁ s + a C − b D` with
/// `a = [cos(√Λs) − 1]/Λ` and `b = [sin(√Λs) − √Λs]/Λ^{3/2}`.
pub fn h_coefficients(big: f64, s: f64) -> (f64, f64, f64) {
    let root = libm::sqrt(big);
    let a = (libm::cos(root * s) - 1.0) / big;
    let b = (libm::sin(root * s) - root * s) / (big * root);
    (s, a, b)
}

/// Sensing generator `h_ξ = iU†∂_ξU` after time `s`.
pub fn h_generator(gd: &GeneratorDecomposition, s: f64) -> Result<FockOperator> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter { name: "s", value: s });
    }
    let (t, a, b) = h_coefficients(gd.big_lambda, s);
    gd.h1.scale(t).add(&gd.c.scale(a))?.sub(&gd.d.scale(b))
}

/// Symmetrized covariance `⟨AB + BA⟩ − 2⟨A⟩⟨B⟩` for Hermitian `A`, `B`.
pub fn covariance(a: &FockOperator, b: &FockOperator, state: &QuantumState) -> Result<f64> {
    let av = a.apply(state)?;
    let bv = b.apply(state)?;
    let ma = state.amplitudes().dotc(&av).re;
    let mb = state.amplitudes().dotc(&bv).re;
    Ok(2.0 * av.dotc(&bv).re - 2.0 * ma * mb)
}

/// Both evaluations of the exact QFI and the moments entering them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiBreakdown {
    /// `16λ² Var[h_ξ]`.
    pub direct: f64,
    /// `4λ²` times the expanded variance sum.
    pub expanded: f64,
    /// `Var[H₁]`.
    pub var_h1: f64,
    /// `Var[C]`.
    pub var_c: f64,
    /// `Var[D]`.
    pub var_d: f64,
    /// `Cov[H₁, C]`.
    pub cov_h1_c: f64,
    /// `Cov[H₁, D]`.
    pub cov_h1_d: f64,
    /// `Cov[C, D]`.
    pub cov_c_d: f64,
}

/// Relative tolerance between the two QFI evaluations.
pub const QFI_CONSISTENCY_TOL: f64 = 1e-6;

/// Time-independent ingredients of the exact QFI of one initial state.
///
/// `H₁|ψ⟩`, `C|ψ⟩` and `D|ψ⟩` are formed once; the generator then acts on
/// the state as a linear combination of them, so each evaluation time costs
/// `O(N)`.
#[derive(Debug, Clone)]
pub struct QfiMoments {
    lambda: f64,
    big_lambda: f64,
    psi: CVector,
    h1_psi: CVector,
    c_psi: CVector,
    d_psi: CVector,
    means: [f64; 3],
    var_h1: f64,
    var_c: f64,
    var_d: f64,
    cov_h1_c: f64,
    cov_h1_d: f64,
    cov_c_d: f64,
}

impl QfiMoments {
    /// Applies `H₁`, `C` and `D` at coupling `lambda` to a single-mode
    /// `state`.
    pub fn new(lambda: f64, state: &QuantumState) -> Result<Self> {
        let Space::Single(cutoff) = state.space() else {
            return Err(Error::DimensionMismatch { left: state.space().dim(), right: state.space().mechanical_cutoff() });
        };
        state.ensure_adequate(None)?;
        let gd = generator_decomposition(lambda, cutoff)?;
        let psi = state.amplitudes().clone();
        let h1_psi = gd.h1.apply(state)?;
        let c_psi = gd.c.apply(state)?;
        let d_psi = gd.d.apply(state)?;
        let mean = |v: &CVector| psi.dotc(v).re;
        let means = [mean(&h1_psi), mean(&c_psi), mean(&d_psi)];
        let cov = |a: &CVector, ma: f64, b: &CVector, mb: f64| 2.0 * a.dotc(b).re - 2.0 * ma * mb;
        let var = |a: &CVector, ma: f64| a.norm_squared() - ma * ma;
        Ok(QfiMoments {
            lambda,
            big_lambda: gd.big_lambda,
            var_h1: var(&h1_psi, means[0]),
            var_c: var(&c_psi, means[1]),
            var_d: var(&d_psi, means[2]),
            cov_h1_c: cov(&h1_psi, means[0], &c_psi, means[1]),
            cov_h1_d: cov(&h1_psi, means[0], &d_psi, means[2]),
            cov_c_d: cov(&c_psi, means[1], &d_psi, means[2]),
            psi,
            h1_psi,
            c_psi,
            d_psi,
            means,
        })
    }

    /// Both evaluations at time `s`.
    ///
    /// `I_ξ = 4Var[h_ξ]` on the initial state and `I_λ = (∂_λξ)² I_ξ = 4λ² I_ξ`.
    /// The direct form takes the variance of `h_ξ|ψ⟩`; the expanded form
    /// uses `j = 2[cos(√Λs) − 1]` on the `C` terms and
    /// `h = 2[sin(√Λs) − √Λs]` on the `D` terms:
    ///
    /// `4s²Var H₁ + j²Λ⁻²Var C + h²Λ⁻³Var D + 2sjΛ⁻¹Cov[H₁,C]
    ///  − 2shΛ^{−3/2}Cov[H₁,D] − jhΛ^{−5/2}Cov[C,D]`.
    pub fn breakdown(&self, s: f64) -> Result<QfiBreakdown> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter { name: "s", value: s });
        }
        let big = self.big_lambda;
        let (t, a, b) = h_coefficients(big, s);
        let h_psi = &self.h1_psi * Complex64::new(t, 0.0) + &self.c_psi * Complex64::new(a, 0.0)
            - &self.d_psi * Complex64::new(b, 0.0);
        let h_mean = self.psi.dotc(&h_psi).re;
        let var_h = h_psi.norm_squared() - h_mean * h_mean;
        debug_assert!((h_mean - (t * self.means[0] + a * self.means[1] - b * self.means[2])).abs() <= 1e-9 * (1.0 + h_mean.abs()));

        let root = libm::sqrt(big);
        let j = 2.0 * (libm::cos(root * s) - 1.0);
        let hh = 2.0 * (libm::sin(root * s) - root * s);
        let sum = 4.0 * s * s * self.var_h1 + j * j / (big * big) * self.var_c + hh * hh / (big * big * big) * self.var_d
            + 2.0 * s * j / big * self.cov_h1_c
            - 2.0 * s * hh * libm::pow(big, -1.5) * self.cov_h1_d
            - j * hh * libm::pow(big, -2.5) * self.cov_c_d;
        let chain = 4.0 * self.lambda * self.lambda;
        Ok(QfiBreakdown {
            direct: chain * 4.0 * var_h,
            expanded: chain * sum,
            var_h1: self.var_h1,
            var_c: self.var_c,
            var_d: self.var_d,
            cov_h1_c: self.cov_h1_c,
            cov_h1_d: self.cov_h1_d,
            cov_c_d: self.cov_c_d,
        })
    }

    /// Exact QFI `I_λ(s)`, checked against its expanded form.
    pub fn qfi(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let b = self.breakdown(s)?;
        let scale = b.direct.abs().max(b.expanded.abs());
        if (b.direct - b.expanded).abs() > QFI_CONSISTENCY_TOL * scale {
            return Err(Error::InternalConsistency { direct: b.direct, expanded: b.expanded });
        }
        Ok(b.direct)
    }
}

/// Exact QFI with both evaluations; see [`QfiMoments::breakdown`].
pub fn qfi_exact_breakdown(lambda: f64, s: f64, state: &QuantumState) -> Result<QfiBreakdown> {
    QfiMoments::new(lambda, state)?.breakdown(s)
}

/// Exact QFI `I_λ(s)`, checked against its expanded form.
pub fn qfi_exact(lambda: f64, s: f64, state: &QuantumState) -> Result<f64> {
    if s == 0.0 {
        check_stable(lambda)?;
        return Ok(0.0);
    }
    QfiMoments::new(lambda, state)?.qfi(s)
}

/// `Var[P²]` of the superposition state.
pub const SUPERPOSITION_VAR_P2: f64 = 1.25;

/// Asymptotic QFI `16λ²[sin(√Λs) − √Λs]²Λ⁻³ · Var[P²]`.
pub fn qfi_asymptotic(lambda: f64, s: f64, var_p2: f64) -> Result<f64> {
    check_stable(lambda)?;
    if !(var_p2 > 0.0) {
        return Err(Error::InvalidParameter { name: "var_p2", value: var_p2 });
    }
    let big = big_lambda(lambda);
    let root = libm::sqrt(big);
    let g = libm::sin(root * s) - root * s;
    Ok(16.0 * lambda * lambda * g * g / (big * big * big) * var_p2)
}

/// Asymptotic QFI with the full `Var[D] = Var[P² − ξX²]` of `state` in
/// place of `Var[P²]`.
pub fn qfi_asymptotic_var_d(lambda: f64, s: f64, state: &QuantumState) -> Result<f64> {
    qfi_asymptotic(lambda, s, var_d(lambda, state)?)
}

/// `Var[P²]` of a single-mode state.
pub fn var_p2(state: &QuantumState) -> Result<f64> {
    let cutoff = state.space().mechanical_cutoff();
    variance(&fock::p_squared(cutoff)?, state)
}

/// `Var[P² − ξX²]` of a single-mode state.
pub fn var_d(lambda: f64, state: &QuantumState) -> Result<f64> {
    let gd = generator_decomposition(lambda, state.space().mechanical_cutoff())?;
    variance(&gd.d, state)
}

/// Closed-form peak `64λ²π²n²Λ⁻³ Var[P²]` of the asymptotic QFI.
pub fn qfi_asymptotic_peak(lambda: f64, n: usize, var_p2: f64) -> Result<f64> {
    check_stable(lambda)?;
    let big = big_lambda(lambda);
    let n = n as f64;
    Ok(64.0 * lambda * lambda * core::f64::consts::PI * core::f64::consts::PI * n * n / (big * big * big) * var_p2)
}
