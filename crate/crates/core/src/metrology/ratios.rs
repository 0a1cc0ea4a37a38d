use alloc::vec::Vec;

use crate::dynamics::{check_stable, corrected_moments, corrected_trajectory, tau_1, CorrectionPath, MIN_ANALYTIC_ETA};
use crate::{Error, FrequencyRatio, Result, StateKind};

use super::sensitivity::{error_propagation, ErrorPropagationPath, DEFAULT_DLAMBDA};

/// Finite-η working-point sensitivity relative to the `η = ∞` value,
/// `𝓘̃_λ(τ)/𝓘_λ(τ)` at `τ = τ_1(λ₀) = 2π/√Λ`.
///
/// The analytic path differentiates the `λ_eff` closed forms. The two-mode
/// path differentiates the mechanical mean of the linearized two-mode
/// evolution by central difference and divides by the variance of the
/// central run.
pub fn finite_eta_ratio(lambda0: f64, eta: FrequencyRatio, kind: StateKind, path: CorrectionPath) -> Result<f64> {
    check_stable(lambda0)?;
    let FrequencyRatio::Finite(e) = eta else {
        return Ok(1.0);
    };
    if !(e >= MIN_ANALYTIC_ETA) || !e.is_finite() {
        return Err(Error::InvalidParameter { name: "eta", value: e });
    }
    let tau = tau_1(lambda0)?;
    let reference = error_propagation(lambda0, tau, kind, ErrorPropagationPath::Analytic)?;
    if !(reference > 0.0) {
        return Err(Error::InvalidParameter { name: "reference sensitivity", value: reference });
    }
    let corrected = match path {
        CorrectionPath::AnalyticLambdaEff => {
            let m = corrected_moments(lambda0, eta, kind, tau)?;
            m.susceptibility * m.susceptibility / m.var_x
        }
        CorrectionPath::TwoModeNumeric { .. } => {
            let h = DEFAULT_DLAMBDA;
            check_stable(lambda0 + h)?;
            let run = |l: f64| corrected_trajectory(l, eta, kind, &[tau], path);
            let plus = run(lambda0 + h)?;
            let minus = run(lambda0 - h)?;
            let center = run(lambda0)?;
            let chi = (plus.mean_x[0] - minus.mean_x[0]) / (2.0 * h);
            chi * chi / center.var_x[0]
        }
    };
    Ok(corrected / reference)
}

/// Which working-point relation [`working_point_relation`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkingPointForm {
    /// `log₁₀[4(1−λ)² + λ⁴η⁻²]/3`.
    AsCaptioned,
    /// `log₁₀[4(1−λ²) + λ⁴η⁻²]/3`, built on `Λ = 4(1 − λ²)`.
    Variant,
}

/// `log₁₀ Λ_λ₀` of the finite-η working point.
///
/// The captioned form builds on `4(1−λ)²`, which agrees with
/// `Λ = 4(1−λ²)` only to leading order near `λ = 1`; the variant uses `Λ`.
pub fn working_point_relation(lambda: f64, eta: FrequencyRatio, form: WorkingPointForm) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidParameter { name: "lambda", value: lambda });
    }
    if let FrequencyRatio::Finite(e) = eta {
        if !(e > 0.0) {
            return Err(Error::InvalidParameter { name: "eta", value: e });
        }
    }
    let base = match form {
        WorkingPointForm::AsCaptioned => 4.0 * (1.0 - lambda) * (1.0 - lambda),
        WorkingPointForm::Variant => 4.0 * (1.0 - lambda * lambda),
    };
    let inv = eta.inverse();
    let arg = base + lambda * lambda * lambda * lambda * inv * inv;
    if !(arg > 0.0) {
        return Err(Error::InvalidParameter { name: "working point", value: arg });
    }
    Ok(libm::log10(arg) / 3.0)
}

/// Local maximum of a sampled series, refined by a parabola through the
/// discrete maximum and its neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Sample index of the discrete maximum.
    pub index: usize,
    /// Refined abscissa.
    pub time: f64,
    /// Refined value.
    pub value: f64,
}

/// Interior local maxima of `values` sampled at `times`, in time order.
///
/// Plateaus count once, at their first sample. Each peak is refined by the
/// vertex of the parabola through three neighbouring samples; the vertex is
/// clamped to the neighbouring samples.
pub fn find_peaks(times: &[f64], values: &[f64]) -> Result<Vec<Peak>> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch { left: times.len(), right: values.len() });
    }
    let mut peaks = Vec::new();
    if values.len() < 3 {
        return Ok(peaks);
    }
    for k in 1..values.len() - 1 {
        let (a, b, c) = (values[k - 1], values[k], values[k + 1]);
        if !(b > a && b >= c) {
            continue;
        }
        let (ta, tb, tc) = (times[k - 1], times[k], times[k + 1]);
        // Vertex of the interpolating parabola in divided-difference form.
        let d1 = (b - a) / (tb - ta);
        let d2 = (c - b) / (tc - tb);
        let curvature = (d2 - d1) / (tc - ta);
        let (time, value) = if curvature < 0.0 {
            let t = (0.5 * (ta + tb) - d1 / (2.0 * curvature)).clamp(ta, tc);
            (t, b + d1 * (t - tb) + curvature * (t - ta) * (t - tb))
        } else {
            (tb, b)
        };
        peaks.push(Peak { index: k, time, value });
    }
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn infinite_eta_is_one() {
        let r = finite_eta_ratio(0.9, FrequencyRatio::Infinite, StateKind::Superposition, CorrectionPath::AnalyticLambdaEff);
        assert_eq!(r.unwrap(), 1.0);
    }

    #[test]
    fn ratio_approaches_one() {
        let r: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&e| {
                finite_eta_ratio(0.9, FrequencyRatio::Finite(e), StateKind::Superposition, CorrectionPath::AnalyticLambdaEff)
                    .unwrap()
            })
            .collect();
        assert!((r[0] - 1.0).abs() > (r[1] - 1.0).abs());
        assert!((r[1] - 1.0).abs() > (r[2] - 1.0).abs());
        assert!((r[2] - 1.0).abs() < 0.02);
    }

    #[test]
    fn coherent_ratio_ignores_imaginary_part() {
        let f = |im: f64| {
            finite_eta_ratio(
                0.9,
                FrequencyRatio::Finite(100.0),
                StateKind::Coherent(Complex64::new(0.0, im)),
                CorrectionPath::AnalyticLambdaEff,
            )
            .unwrap()
        };
        assert!((f(0.5) - f(2.0)).abs() < 1e-6);
    }

    #[test]
    fn working_point_examples() {
        let v = working_point_relation(0.9, FrequencyRatio::Infinite, WorkingPointForm::AsCaptioned).unwrap();
        assert!((v - libm::log10(0.04) / 3.0).abs() < 1e-12);
        assert!((v + 0.4660).abs() < 1e-4);
        let w = working_point_relation(1.0, FrequencyRatio::Finite(50.0), WorkingPointForm::AsCaptioned).unwrap();
        assert!((w - libm::log10(1.0 / 2500.0) / 3.0).abs() < 1e-12);
        let z = working_point_relation(0.9, FrequencyRatio::Infinite, WorkingPointForm::Variant).unwrap();
        assert!((z - libm::log10(0.76) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn parabolic_refinement_recovers_vertex() {
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let values: Vec<f64> = times.iter().map(|t| 3.0 - (t - 2.03) * (t - 2.03)).collect();
        let peaks = find_peaks(&times, &values).unwrap();
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].time - 2.03).abs() < 1e-12);
        assert!((peaks[0].value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(find_peaks(&[0.0, 1.0], &[1.0]).is_err());
    }
}
