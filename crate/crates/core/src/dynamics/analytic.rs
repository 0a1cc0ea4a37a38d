use alloc::vec::Vec;
use num_complex::Complex64;

use super::{check_times, Trajectory, TrajectorySource};
use crate::{Error, Result, StateKind};

pub(crate) fn check_stable(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter { name: "lambda", value: lambda });
    }
    if lambda >= 1.0 {
        return Err(Error::UnstableRegime { lambda });
    }
    Ok(())
}

/// `Λ = 4(1 − λ²)`.
pub fn big_lambda(lambda: f64) -> f64 {
    4.0 * (1.0 - lambda * lambda)
}

/// Closed-form moments of the superposition state `(|0⟩ + i|1⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionMoments {
    /// `⟨X⟩ = √2 Λ^{−1/2} sin(√Λ s/2)`.
    pub mean_x: f64,
    /// `Var X = 1 + (2λ² − 1)Λ⁻¹[1 − cos(√Λ s)]`.
    pub var_x: f64,
    /// `⟨X²⟩ = 1 + 2λ²Λ⁻¹[1 − cos(√Λ s)]`.
    pub x2: f64,
    /// `∂_λ⟨X⟩ = 4√2 λ Λ^{−3/2} sin(√Λ s/2) − 2√2 λ s Λ⁻¹ cos(√Λ s/2)`.
    pub susceptibility: f64,
}

/// Moments of the superposition state after evolving for `s` under the
/// effective Hamiltonian.
pub fn analytic_mean_var_superposition(lambda: f64, s: f64) -> Result<SuperpositionMoments> {
    check_stable(lambda)?;
    let big = big_lambda(lambda);
    let root = libm::sqrt(big);
    let theta = 0.5 * root * s;
    let (sin, cos) = (libm::sin(theta), libm::cos(theta));
    let sqrt2 = core::f64::consts::SQRT_2;
    let mean_x = sqrt2 / root * sin;
    let x2 = 1.0 + 2.0 * lambda * lambda / big * (1.0 - libm::cos(root * s));
    let var_x = 1.0 + (2.0 * lambda * lambda - 1.0) / big * (1.0 - libm::cos(root * s));
    let susceptibility = 4.0 * sqrt2 * lambda * libm::pow(big, -1.5) * sin - 2.0 * sqrt2 * lambda * s / big * cos;
    Ok(SuperpositionMoments { mean_x, var_x, x2, susceptibility })
}

/// Closed-form moments of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentMoments {
    /// `⟨X⟩`.
    pub mean_x: f64,
    /// `Var X`.
    pub var_x: f64,
    /// `∂_λ⟨X⟩`.
    pub susceptibility: f64,
}

/// Moments of `|α⟩` after evolving for `s` under the effective
/// Hamiltonian.
///
/// With `θ = √Λ s/2` the Heisenberg solution
/// `X(s) = X cos θ + 2Λ^{−1/2} P sin θ` gives
///
/// - `⟨X⟩ = √2 Re(α) cos θ + 2√2 Λ^{−1/2} Im(α) sin θ`,
/// - `Var X = cos²θ/2 + 2Λ⁻¹ sin²θ`.
pub fn analytic_mean_var_coherent(lambda: f64, alpha: Complex64, s: f64) -> Result<CoherentMoments> {
    check_stable(lambda)?;
    let big = big_lambda(lambda);
    let root = libm::sqrt(big);
    let theta = 0.5 * root * s;
    let (sin, cos) = (libm::sin(theta), libm::cos(theta));
    let sqrt2 = core::f64::consts::SQRT_2;
    let mean_x = sqrt2 * alpha.re * cos + 2.0 * sqrt2 / root * alpha.im * sin;
    let var_x = 0.5 * cos * cos + 2.0 / big * sin * sin;
    // ∂θ/∂λ = −2λs/√Λ and ∂Λ/∂λ = −8λ.
    let susceptibility = 2.0 * sqrt2 * alpha.re * lambda * s / root * sin
        + 2.0 * sqrt2 * alpha.im * (4.0 * lambda * libm::pow(big, -1.5) * sin - 2.0 * lambda * s / big * cos);
    Ok(CoherentMoments { mean_x, var_x, susceptibility })
}

/// The coherent-state moments in their commonly printed form,
/// `⟨X⟩ = √2 Λ^{−1/2} Im(α) sin θ + √2 Re(α) cos θ` and
/// `Var X = 1/4 + (1 − λ²)Λ⁻¹ cos(√Λ s)`.
///
/// The sine prefactor is half the Heisenberg value and the variance misses
/// the `2Λ⁻¹ sin²θ` growth; exact propagation agrees with
/// [`analytic_mean_var_coherent`] instead. Kept for comparison.
pub fn coherent_moments_as_printed(lambda: f64, alpha: Complex64, s: f64) -> Result<CoherentMoments> {
    check_stable(lambda)?;
    let big = big_lambda(lambda);
    let root = libm::sqrt(big);
    let theta = 0.5 * root * s;
    let (sin, cos) = (libm::sin(theta), libm::cos(theta));
    let sqrt2 = core::f64::consts::SQRT_2;
    let mean_x = sqrt2 / root * alpha.im * sin + sqrt2 * alpha.re * cos;
    let var_x = 0.25 + (1.0 - lambda * lambda) / big * libm::cos(root * s);
    let susceptibility = 2.0 * sqrt2 * alpha.re * lambda * s / root * sin
        + sqrt2 * alpha.im * (4.0 * lambda * libm::pow(big, -1.5) * sin - 2.0 * lambda * s / big * cos);
    Ok(CoherentMoments { mean_x, var_x, susceptibility })
}

/// Mean, variance and susceptibility for either initial-state family.
pub fn analytic_moments(lambda: f64, kind: StateKind, s: f64) -> Result<CoherentMoments> {
    match kind {
        StateKind::Superposition => {
            let m = analytic_mean_var_superposition(lambda, s)?;
            Ok(CoherentMoments { mean_x: m.mean_x, var_x: m.var_x, susceptibility: m.susceptibility })
        }
        StateKind::Coherent(alpha) => analytic_mean_var_coherent(lambda, alpha, s),
    }
}

/// Closed-form trajectory sampled at `times`.
pub fn analytic_trajectory(lambda: f64, kind: StateKind, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    let mut mean_x = Vec::with_capacity(times.len());
    let mut var_x = Vec::with_capacity(times.len());
    for &s in times {
        let m = analytic_moments(lambda, kind, s)?;
        mean_x.push(m.mean_x);
        var_x.push(m.var_x);
    }
    let source = match kind {
        StateKind::Superposition => TrajectorySource::AnalyticSuperposition,
        StateKind::Coherent(_) => TrajectorySource::AnalyticCoherent,
    };
    Ok(Trajectory { times: times.to_vec(), states: None, mean_x, var_x, source })
}

/// Peak times `τ_n = 2nπ/√Λ` for `n = 1..=n_max`.
pub fn peak_times(lambda: f64, n_max: usize) -> Result<Vec<f64>> {
    check_stable(lambda)?;
    let tau1 = 2.0 * core::f64::consts::PI / libm::sqrt(big_lambda(lambda));
    Ok((1..=n_max).map(|n| n as f64 * tau1).collect())
}

/// First peak time `τ_1 = 2π/√Λ`.
pub fn tau_1(lambda: f64) -> Result<f64> {
    Ok(peak_times(lambda, 1)?[0])
}

/// Target for the probability left in the top tenth of the basis.
const TAIL_TARGET: f64 = 1e-10;

/// Mechanical cutoff that keeps the evolution of `kind` under the
/// effective Hamiltonian adequately truncated for all times.
///
/// The evolved state is at worst a squeezed state with `e^{2r} = 1/ξ`
/// displaced by at most `|α|/√ξ`. Squeezed-vacuum occupations fall off as
/// `tanh(r)ⁿ`, so the tenth of the basis above `0.9N` holds less than
/// `10⁻¹⁰` once `tanh(r)^{0.9N} ≤ 10⁻¹⁰(1 − tanh r)`. The displacement
/// adds its mean occupation `n = |α|²/ξ` plus six standard deviations of the
/// displaced squeezed number distribution, `√n·e^r = √(n/ξ)`. The result is
/// never below `40/√ξ`.
pub fn recommended_cutoff(lambda: f64, kind: StateKind) -> Result<usize> {
    check_stable(lambda)?;
    let xi = 1.0 - lambda * lambda;
    let r = -0.5 * libm::log(xi);
    let t = libm::tanh(r);
    let squeeze = if t < 1e-3 {
        0.0
    } else {
        (libm::log(TAIL_TARGET) + libm::log(1.0 - t)) / (0.9 * libm::log(t))
    };
    let displacement = match kind {
        StateKind::Superposition => 4.0,
        StateKind::Coherent(alpha) => {
            let n = alpha.norm_sqr() / xi;
            (n + 6.0 * libm::sqrt(n / xi) + 8.0) / 0.9
        }
    };
    let rule = 40.0 / libm::sqrt(xi);
    Ok(libm::ceil(f64::max(squeeze + displacement, rule)) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn superposition_at_origin() {
        let m = analytic_mean_var_superposition(0.9, 0.0).unwrap();
        assert_eq!(m.mean_x, 0.0);
        assert!((m.var_x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn superposition_identity_between_forms() {
        let m = analytic_mean_var_superposition(0.9, 2.3).unwrap();
        assert!((m.x2 - m.var_x - m.mean_x * m.mean_x).abs() < 1e-12);
    }

    #[test]
    fn superposition_mean_at_unit_time() {
        let m = analytic_mean_var_superposition(0.9, 1.0).unwrap();
        let expected = 2f64.sqrt() / 0.76f64.sqrt() * (0.76f64.sqrt() / 2.0).sin();
        assert!((m.mean_x - expected).abs() < 1e-15);
        assert!((m.mean_x - 0.68497).abs() < 1e-4);
    }

    #[test]
    fn superposition_at_peak_time() {
        let lambda: f64 = 0.9;
        let big = big_lambda(lambda);
        for (n, tau) in peak_times(lambda, 2).unwrap().into_iter().enumerate() {
            let n = (n + 1) as f64;
            let m = analytic_mean_var_superposition(lambda, tau).unwrap();
            assert!(m.mean_x.abs() < 1e-12);
            assert!((m.var_x - 1.0).abs() < 1e-12);
            let sign = if n == 1.0 { 1.0 } else { -1.0 };
            let expected = sign * 4.0 * 2f64.sqrt() * n * core::f64::consts::PI * lambda * big.powf(-1.5);
            assert!((m.susceptibility - expected).abs() < 1e-9 * expected.abs());
        }
    }

    #[test]
    fn susceptibility_matches_finite_difference() {
        let h = 1e-6;
        for (lambda, s) in [(0.3, 0.7), (0.9, 5.0), (0.95, 11.0)] {
            let fd = (analytic_mean_var_superposition(lambda + h, s).unwrap().mean_x
                - analytic_mean_var_superposition(lambda - h, s).unwrap().mean_x)
                / (2.0 * h);
            let m = analytic_mean_var_superposition(lambda, s).unwrap();
            assert!((fd - m.susceptibility).abs() < 1e-6 * (1.0 + fd.abs()));
            for alpha in [Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)] {
                for f in [analytic_mean_var_coherent, coherent_moments_as_printed] {
                    let fd = (f(lambda + h, alpha, s).unwrap().mean_x - f(lambda - h, alpha, s).unwrap().mean_x) / (2.0 * h);
                    let c = f(lambda, alpha, s).unwrap();
                    assert!((fd - c.susceptibility).abs() < 1e-6 * (1.0 + fd.abs()));
                }
            }
        }
    }

    #[test]
    fn coherent_initial_values() {
        let alpha = Complex64::new(0.0, 2.0);
        let m = analytic_mean_var_coherent(0.9, alpha, 0.0).unwrap();
        assert_eq!(m.mean_x, 0.0);
        assert!((m.var_x - 0.5).abs() < 1e-15);
        let p = coherent_moments_as_printed(0.9, alpha, 0.0).unwrap();
        assert!((p.var_x - 0.5).abs() < 1e-15);
        let tau = tau_1(0.9).unwrap();
        assert!((coherent_moments_as_printed(0.9, alpha, tau).unwrap().var_x - 0.5).abs() < 1e-12);
        assert!((analytic_mean_var_coherent(0.9, alpha, tau).unwrap().var_x - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coherent_real_alpha_is_pure_cosine() {
        let alpha = Complex64::new(1.3, 0.0);
        let tau = tau_1(0.8).unwrap();
        let m = analytic_mean_var_coherent(0.8, alpha, 0.37 * tau).unwrap();
        let theta = 0.5 * big_lambda(0.8).sqrt() * 0.37 * tau;
        assert!((m.mean_x - 2f64.sqrt() * 1.3 * theta.cos()).abs() < 1e-14);
        assert!(analytic_mean_var_coherent(0.8, alpha, tau).unwrap().susceptibility.abs() < 1e-12);
    }

    #[test]
    fn peak_time_values() {
        assert!((tau_1(0.9).unwrap() - 7.2072).abs() < 2e-4);
        assert!((tau_1(0.0).unwrap() - core::f64::consts::PI).abs() < 1e-15);
        let t = peak_times(0.7, 5).unwrap();
        for (n, &v) in t.iter().enumerate() {
            assert_eq!(v, (n + 1) as f64 * t[0]);
        }
    }

    #[test]
    fn unstable_lambda_rejected() {
        assert!(matches!(analytic_mean_var_superposition(1.0, 1.0), Err(Error::UnstableRegime { .. })));
        assert!(matches!(peak_times(1.05, 1), Err(Error::UnstableRegime { .. })));
        assert!(recommended_cutoff(1.0, StateKind::Superposition).is_err());
    }

    #[test]
    fn cutoff_rule_grows_towards_criticality() {
        let a = recommended_cutoff(0.5, StateKind::Superposition).unwrap();
        let b = recommended_cutoff(0.98, StateKind::Superposition).unwrap();
        assert!(a >= 46 && b > 300 && b > a);
        let c = recommended_cutoff(0.9, StateKind::Coherent(Complex64::new(0.0, 2.0))).unwrap();
        assert!(c > recommended_cutoff(0.9, StateKind::Superposition).unwrap());
    }
}
