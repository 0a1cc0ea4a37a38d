use num_complex::Complex64;

use crate::{Error, FrequencyRatio, Result};

/// Laboratory-frame parameters of the driven cavity optomechanical system.
///
/// All entries are angular frequencies or rates in the same (arbitrary)
/// unit, typically rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Cavity frequency `ω_c`.
    pub omega_c: f64,
    /// Mechanical frequency `ω_m`.
    pub omega_m: f64,
    /// Drive frequency `ω_l`.
    pub omega_l: f64,
    /// Single-photon coupling `g`.
    pub g: f64,
    /// Drive amplitude `ε_l`.
    pub eps_l: f64,
    /// Cavity decay rate `γ_c`.
    pub gamma_c: f64,
    /// Mechanical damping rate `γ_m`.
    pub gamma_m: f64,
}

impl PhysicalParams {
    /// Detuning `δ = ω_c − ω_l`.
    pub fn delta(&self) -> f64 {
        self.omega_c - self.omega_l
    }

    /// Checks `ω_m > 0`, `γ_c, γ_m, ε_l ≥ 0` and finiteness.
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_c", self.omega_c),
            ("omega_l", self.omega_l),
            ("g", self.g),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        if !(self.omega_m > 0.0) || !self.omega_m.is_finite() {
            return Err(Error::InvalidParameter { name: "omega_m", value: self.omega_m });
        }
        let non_negative = [
            ("gamma_c", self.gamma_c),
            ("gamma_m", self.gamma_m),
            ("eps_l", self.eps_l),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// Right-hand side of the steady-state equations,
    /// `⟨a⟩ = ε_l/(γ_c/2 − i(2g⟨b⟩ − δ))` and
    /// `⟨b⟩ = i g|⟨a⟩|²/(iω_m + γ_m/2)`.
    pub fn steady_state_map(&self, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        self.map_with_drive(self.eps_l, a, b)
    }

    fn map_with_drive(&self, eps: f64, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        let i = Complex64::new(0.0, 1.0);
        let denom_a = Complex64::new(0.5 * self.gamma_c, 0.0) - i * (b * (2.0 * self.g) - self.delta());
        let new_a = Complex64::new(eps, 0.0) / denom_a;
        let denom_b = Complex64::new(0.5 * self.gamma_m, self.omega_m);
        let new_b = i * (self.g * a.norm_sqr()) / denom_b;
        (new_a, new_b)
    }

    /// Residual of a candidate steady state: the larger of the two equation
    /// mismatches, each relative to `max(1, |value|)`.
    pub fn steady_state_residual(&self, a: Complex64, b: Complex64) -> f64 {
        residual(self.steady_state_map(a, b), (a, b))
    }
}

fn residual(mapped: (Complex64, Complex64), current: (Complex64, Complex64)) -> f64 {
    let ra = (mapped.0 - current.0).norm() / current.0.norm().max(1.0);
    let rb = (mapped.1 - current.1).norm() / current.1.norm().max(1.0);
    ra.max(rb)
}

/// Mean amplitudes `⟨a⟩`, `⟨b⟩` of the driven system in steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Cavity amplitude `⟨a⟩`.
    pub mean_a: Complex64,
    /// Mechanical amplitude `⟨b⟩`.
    pub mean_b: Complex64,
    /// Final residual, see [`PhysicalParams::steady_state_residual`].
    pub residual: f64,
    /// Iterations spent, summed over continuation stages.
    pub iterations: usize,
    /// Set when the residual oscillated and the damping had to be reduced,
    /// a sign of nearby multistability.
    pub multistability_warning: bool,
}

/// Default damping factor of the fixed-point iteration.
pub const STEADY_STATE_DAMPING: f64 = 0.5;
/// Default residual tolerance.
pub const STEADY_STATE_TOL: f64 = 1e-12;
/// Default iteration budget.
pub const STEADY_STATE_MAX_ITER: usize = 100_000;

const CONTINUATION_STAGES: usize = 16;
const OSCILLATION_LIMIT: usize = 8;
const MIN_DAMPING: f64 = 1.0 / 1024.0;

/// Solves the steady-state equations by damped fixed-point iteration
/// `x ← (1 − β)x + βF(x)`, `β = 0.5`.
///
/// The drive is ramped from zero in equal stages, each stage starting from
/// the previous solution, so the returned branch is the one continuously
/// connected to `ε_l → 0`. When the residual keeps rising the damping is
/// halved and [`SteadyState::multistability_warning`] is set. `max_iter`
/// bounds the total iteration count; running out yields
/// [`Error::Divergence`] carrying the last iterate.
pub fn steady_state(p: &PhysicalParams, tol: f64, max_iter: usize) -> Result<SteadyState> {
    p.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    let zero = Complex64::new(0.0, 0.0);
    if p.eps_l == 0.0 {
        return Ok(SteadyState {
            mean_a: zero,
            mean_b: zero,
            residual: p.steady_state_residual(zero, zero),
            iterations: 0,
            multistability_warning: false,
        });
    }

    let (mut a, mut b) = (zero, zero);
    let mut iterations = 0;
    let mut warning = false;
    let mut beta = STEADY_STATE_DAMPING;
    let mut res = f64::INFINITY;
    for stage in 1..=CONTINUATION_STAGES {
        let eps = p.eps_l * stage as f64 / CONTINUATION_STAGES as f64;
        let mut previous = f64::INFINITY;
        let mut rises = 0;
        loop {
            let mapped = p.map_with_drive(eps, a, b);
            res = residual(mapped, (a, b));
            if res <= tol {
                break;
            }
            if iterations >= max_iter || !res.is_finite() {
                return Err(Error::Divergence {
                    iterations,
                    residual: res,
                    mean_a: (a.re, a.im),
                    mean_b: (b.re, b.im),
                });
            }
            if res > previous {
                rises += 1;
                if rises >= OSCILLATION_LIMIT && beta > MIN_DAMPING {
                    beta *= 0.5;
                    rises = 0;
                    warning = true;
                }
            }
            previous = res;
            a = a * (1.0 - beta) + mapped.0 * beta;
            b = b * (1.0 - beta) + mapped.1 * beta;
            iterations += 1;
        }
    }
    Ok(SteadyState { mean_a: a, mean_b: b, residual: res, iterations, multistability_warning: warning })
}

/// Stability of the normal phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// `λ < 1`.
    Stable,
    /// `λ = 1` within `1e−12`.
    Critical,
    /// `λ > 1`.
    Unstable,
}

/// Classifies `λ` relative to the critical point `λ_c = 1`.
pub fn classify_phase(lambda: f64) -> Phase {
    if (lambda - 1.0).abs() <= 1e-12 {
        Phase::Critical
    } else if lambda < 1.0 {
        Phase::Stable
    } else {
        Phase::Unstable
    }
}

/// Excitation frequency `ε_np = ω_m√(1 − λ²)`, which turns imaginary past
/// the critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExcitationFrequency {
    /// `1 − λ² ≥ 0`; holds `ω_m√(1 − λ²)`.
    Real(f64),
    /// `1 − λ² < 0`; holds `ω_m√(λ² − 1)`, the modulus of the imaginary
    /// value.
    Imaginary(f64),
}

impl ExcitationFrequency {
    /// Frequency for `λ` and `ω_m`.
    pub fn new(lambda: f64, omega_m: f64) -> Self {
        let xi = 1.0 - lambda * lambda;
        if xi >= 0.0 {
            ExcitationFrequency::Real(omega_m * libm::sqrt(xi))
        } else {
            ExcitationFrequency::Imaginary(omega_m * libm::sqrt(-xi))
        }
    }

    /// Real value, if any.
    pub fn real(&self) -> Option<f64> {
        match *self {
            ExcitationFrequency::Real(v) => Some(v),
            ExcitationFrequency::Imaginary(_) => None,
        }
    }
}

/// Parameters of the effective critical theory.
///
/// `delta_eff`, `coupling`, `eps_np` and `e_np` carry the unit of
/// `omega_m`; the rest are dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// Mechanical frequency `ω_m` the dimensionful fields refer to.
    pub omega_m: f64,
    /// Effective detuning `Δ = δ − 2g Re⟨b⟩`.
    pub delta_eff: f64,
    /// Enhanced coupling `G = g|⟨a⟩|`, real after the drive-phase choice.
    pub coupling: f64,
    /// `λ = 2G/√(Δω_m)`.
    pub lambda: f64,
    /// `η = Δ/ω_m`.
    pub eta: f64,
    /// `ξ = 1 − λ²`.
    pub xi: f64,
    /// `Λ = 4ξ`.
    pub big_lambda: f64,
    /// Excitation frequency.
    pub eps_np: ExcitationFrequency,
    /// Ground-state energy `(ε_np − ω_m)/2`, defined in the normal phase.
    pub e_np: Option<f64>,
    /// Squeezing amplitude `ln(1 − λ²)/4`, defined for `λ < 1`.
    pub r_np: Option<f64>,
    /// Phase classification of `λ`.
    pub phase: Phase,
}

impl EffectiveParams {
    /// Builds the record directly from `λ` and `η` with `ω_m = 1`.
    pub fn from_dimensionless(lambda: f64, eta: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter { name: "lambda", value: lambda });
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidRegime { delta: eta });
        }
        let coupling = 0.5 * lambda * libm::sqrt(eta);
        Ok(Self::assemble(1.0, eta, coupling, lambda))
    }

    fn assemble(omega_m: f64, delta_eff: f64, coupling: f64, lambda: f64) -> Self {
        let xi = 1.0 - lambda * lambda;
        let eps_np = ExcitationFrequency::new(lambda, omega_m);
        let e_np = eps_np.real().map(|e| 0.5 * (e - omega_m));
        let r_np = if xi > 0.0 { Some(0.25 * libm::log(xi)) } else { None };
        EffectiveParams {
            omega_m,
            delta_eff,
            coupling,
            lambda,
            eta: delta_eff / omega_m,
            xi,
            big_lambda: 4.0 * xi,
            eps_np,
            e_np,
            r_np,
            phase: classify_phase(lambda),
        }
    }

    /// `η` as a [`FrequencyRatio`].
    pub fn frequency_ratio(&self) -> FrequencyRatio {
        FrequencyRatio::Finite(self.eta)
    }
}

/// Largest steady-state residual accepted by [`effective_params`].
pub const EFFECTIVE_RESIDUAL_LIMIT: f64 = 1e-8;

/// Effective parameters from a solved steady state.
///
/// The drive phase is rotated so that `G = g|⟨a⟩|` is real and
/// non-negative; `Δ` uses the real part of `⟨b⟩`.
pub fn effective_params(p: &PhysicalParams, ss: &SteadyState) -> Result<EffectiveParams> {
    p.validate()?;
    if !(ss.residual <= EFFECTIVE_RESIDUAL_LIMIT) {
        return Err(Error::InvalidParameter { name: "steady-state residual", value: ss.residual });
    }
    let delta_eff = p.delta() - 2.0 * p.g * ss.mean_b.re;
    if !(delta_eff > 0.0) {
        return Err(Error::InvalidRegime { delta: delta_eff });
    }
    let coupling = p.g.abs() * ss.mean_a.norm();
    let lambda = 2.0 * coupling / libm::sqrt(delta_eff * p.omega_m);
    Ok(EffectiveParams::assemble(p.omega_m, delta_eff, coupling, lambda))
}
