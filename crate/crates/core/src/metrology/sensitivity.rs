use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dynamics::{
    analytic_moments, check_stable, check_times, coherent_moments_as_printed, recommended_cutoff, Propagator,
};
use crate::fock::{self, hermite_functions, variance, FockOperator, QuantumState, Space};
use crate::linalg::{trapezoid, CVector};
use crate::model::hamiltonian_effective;
use crate::{Error, Result, StateKind};

/// Default finite-difference step in `λ`.
pub const DEFAULT_DLAMBDA: f64 = 1e-5;
/// Densities below this value are left out of the Fisher integral.
pub const DENSITY_FLOOR: f64 = 1e-14;
/// Largest probability mass allowed outside the homodyne grid.
pub const GRID_COVERAGE_LIMIT: f64 = 1e-8;
/// Default grid half width in standard deviations of `X`, added to `|⟨X⟩|`.
pub const GRID_SIGMAS: f64 = 8.0;
/// Default number of grid intervals per half width.
pub const GRID_INTERVALS_PER_HALF_WIDTH: f64 = 2000.0;

/// Uniform position grid `[−half_width, half_width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneGrid {
    /// Half width of the grid.
    pub half_width: f64,
    /// Spacing.
    pub step: f64,
}

impl HomodyneGrid {
    /// Grid covering `|⟨X⟩| + 8σ` with `half_width/2000` spacing.
    pub fn covering(mean_x: f64, var_x: f64) -> Self {
        let half_width = mean_x.abs() + GRID_SIGMAS * libm::sqrt(var_x.max(0.0));
        HomodyneGrid { half_width, step: half_width / GRID_INTERVALS_PER_HALF_WIDTH }
    }

    /// Same extent with half the spacing.
    pub fn halved(&self) -> Self {
        HomodyneGrid { half_width: self.half_width, step: 0.5 * self.step }
    }

    /// Grid points.
    pub fn points(&self) -> Vec<f64> {
        let n = libm::round(2.0 * self.half_width / self.step) as usize;
        (0..=n).map(|k| -self.half_width + k as f64 * self.step).collect()
    }
}

fn check_dlambda(dlambda: f64) -> Result<()> {
    if !(dlambda > 0.0) || !dlambda.is_finite() {
        return Err(Error::InvalidParameter { name: "dlambda", value: dlambda });
    }
    if dlambda < 1e-6 {
        return Err(Error::StepTooSmall { step: dlambda });
    }
    if dlambda > 1e-3 {
        return Err(Error::InvalidParameter { name: "dlambda", value: dlambda });
    }
    Ok(())
}

/// Evolutions at `λ − dλ`, `λ`, `λ + dλ` sharing one initial state, each
/// backed by a single eigendecomposition.
#[derive(Debug, Clone)]
pub struct LambdaStencil {
    lambda: f64,
    dlambda: f64,
    initial: QuantumState,
    propagators: [Propagator; 3],
    coefficients: [CVector; 3],
    x: FockOperator,
}

/// States at `λ − dλ`, `λ`, `λ + dλ` after the same evolution time.
#[derive(Debug, Clone)]
pub struct StencilStates {
    /// `λ − dλ`.
    pub minus: QuantumState,
    /// `λ`.
    pub center: QuantumState,
    /// `λ + dλ`.
    pub plus: QuantumState,
}

impl LambdaStencil {
    /// Diagonalizes the effective Hamiltonian at the three couplings on the
    /// cutoff of `state`.
    pub fn new(lambda: f64, dlambda: f64, state: &QuantumState) -> Result<Self> {
        check_stable(lambda)?;
        check_dlambda(dlambda)?;
        check_stable(lambda + dlambda)?;
        let Space::Single(cutoff) = state.space() else {
            return Err(Error::DimensionMismatch { left: state.space().dim(), right: state.space().mechanical_cutoff() });
        };
        state.ensure_adequate(Some(0.0))?;
        // The Hamiltonian depends on λ², so a step below zero mirrors to |λ|.
        let build = |l: f64| -> Result<Propagator> { Propagator::new(&hamiltonian_effective(l.abs(), cutoff, false)?) };
        let propagators = [build(lambda - dlambda)?, build(lambda)?, build(lambda + dlambda)?];
        let coefficients = [
            propagators[0].coefficients(state)?,
            propagators[1].coefficients(state)?,
            propagators[2].coefficients(state)?,
        ];
        Ok(LambdaStencil {
            lambda,
            dlambda,
            initial: state.clone(),
            propagators,
            coefficients,
            x: fock::quadratures(cutoff)?.0,
        })
    }

    /// Central coupling.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Step.
    pub fn dlambda(&self) -> f64 {
        self.dlambda
    }

    /// Evolved states at time `s`, each checked for truncation adequacy.
    pub fn states(&self, s: f64) -> Result<StencilStates> {
        if s == 0.0 {
            return Ok(StencilStates {
                minus: self.initial.clone(),
                center: self.initial.clone(),
                plus: self.initial.clone(),
            });
        }
        let space = self.initial.space();
        let evolve = |k: usize| -> Result<QuantumState> {
            let st = QuantumState::from_amplitudes(space, self.propagators[k].evolve_coefficients(&self.coefficients[k], s))?;
            st.ensure_adequate(Some(s))?;
            Ok(st)
        };
        Ok(StencilStates { minus: evolve(0)?, center: evolve(1)?, plus: evolve(2)? })
    }

    /// Fidelity-based QFI `4[⟨∂ψ|∂ψ⟩ − |⟨ψ|∂ψ⟩|²]` with `|∂ψ⟩` from the
    /// central difference.
    pub fn qfi(&self, states: &StencilStates) -> Result<f64> {
        let d = (states.plus.amplitudes() - states.minus.amplitudes()).unscale(2.0 * self.dlambda);
        let psi = states.center.amplitudes();
        let overlap = psi.dotc(&d);
        let norm = d.norm_squared();
        let value = norm - overlap.norm_sqr();
        if value < -1e-9 * norm.max(1e-300) {
            return Err(Error::StepTooSmall { step: self.dlambda });
        }
        Ok(4.0 * value.max(0.0))
    }

    /// `(∂_λ⟨X⟩)²/Var X` with the mean differentiated by central difference.
    pub fn error_propagation(&self, states: &StencilStates) -> Result<f64> {
        let mp = fock::expectation(&self.x, &states.plus)?.re;
        let mm = fock::expectation(&self.x, &states.minus)?.re;
        let chi = (mp - mm) / (2.0 * self.dlambda);
        let var = variance(&self.x, &states.center)?;
        if !(var > 0.0) {
            return Err(Error::InvalidParameter { name: "Var X", value: var });
        }
        Ok(chi * chi / var)
    }

    /// Default homodyne grid for the centre state.
    pub fn default_grid(&self, states: &StencilStates) -> Result<HomodyneGrid> {
        let mean = fock::expectation(&self.x, &states.center)?.re;
        let var = variance(&self.x, &states.center)?;
        Ok(HomodyneGrid::covering(mean, var))
    }

    /// Homodyne Fisher information `∫ (∂_λ p)²/p dx` on `grid`.
    ///
    /// With `ψ(x) = ⟨x|ψ_λ⟩` the density derivative is formed as
    /// `∂_λ p = 2 Re[ψ*(x) ∂_λψ(x)]`, where `∂_λψ(x)` is the central
    /// difference of the position amplitudes. This is the central difference
    /// of `p` up to `O(dλ²)` and keeps rounding noise proportional to `|ψ|`
    /// in the far tails. Points with `p < 10⁻¹⁴` are skipped.
    pub fn cfi(&self, states: &StencilStates, grid: &HomodyneGrid) -> Result<f64> {
        if !(grid.step > 0.0) || !(grid.half_width > 0.0) {
            return Err(Error::InvalidParameter { name: "grid step", value: grid.step });
        }
        let points = grid.points();
        let cutoff = self.initial.space().dim();
        let amp = |v: &CVector, phi: &[f64]| v.iter().zip(phi).fold(Complex64::new(0.0, 0.0), |acc, (c, f)| acc + c * *f);
        let mut density = Vec::with_capacity(points.len());
        let mut fisher = Vec::with_capacity(points.len());
        for &x in &points {
            let phi = hermite_functions(x, cutoff);
            let psi = amp(states.center.amplitudes(), &phi);
            let dpsi = (amp(states.plus.amplitudes(), &phi) - amp(states.minus.amplitudes(), &phi)) / (2.0 * self.dlambda);
            let p = psi.norm_sqr();
            density.push(p);
            if p < DENSITY_FLOOR {
                fisher.push(0.0);
            } else {
                let dp = 2.0 * (psi.conj() * dpsi).re;
                fisher.push(dp * dp / p);
            }
        }
        let outside = 1.0 - trapezoid(&density, grid.step);
        if outside > GRID_COVERAGE_LIMIT {
            return Err(Error::GridCoverage { mass_outside: outside });
        }
        Ok(trapezoid(&fisher, grid.step))
    }
}

/// QFI from the fidelity of states evolved at `λ ± dλ`.
pub fn qfi_numeric(lambda: f64, s: f64, state: &QuantumState, dlambda: f64) -> Result<f64> {
    let stencil = LambdaStencil::new(lambda, dlambda, state)?;
    stencil.qfi(&stencil.states(s)?)
}

/// Homodyne Fisher information; `grid = None` picks
/// [`HomodyneGrid::covering`] for the evolved state.
pub fn cfi_homodyne(
    lambda: f64,
    s: f64,
    state: &QuantumState,
    grid: Option<HomodyneGrid>,
    dlambda: f64,
) -> Result<f64> {
    let stencil = LambdaStencil::new(lambda, dlambda, state)?;
    let states = stencil.states(s)?;
    let grid = match grid {
        Some(g) => g,
        None => stencil.default_grid(&states)?,
    };
    stencil.cfi(&states, &grid)
}

/// How [`error_propagation`] evaluates `∂_λ⟨X⟩` and `Var X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorPropagationPath {
    /// Closed forms.
    Analytic,
    /// Closed forms with the coherent-state moments in their commonly
    /// printed form; identical to `Analytic` for the superposition state.
    AnalyticAsPrinted,
    /// Exact propagation; `None` uses the recommended cutoff.
    Numeric {
        /// Mechanical cutoff.
        cutoff: Option<usize>,
    },
}

/// Error-propagation sensitivity `(∂_λ⟨X⟩)²/(ΔX)²`.
pub fn error_propagation(lambda: f64, s: f64, kind: StateKind, path: ErrorPropagationPath) -> Result<f64> {
    check_stable(lambda)?;
    let ratio = |chi: f64, var: f64| -> Result<f64> {
        if !(var > 0.0) {
            return Err(Error::InvalidParameter { name: "Var X", value: var });
        }
        Ok(chi * chi / var)
    };
    match path {
        ErrorPropagationPath::Analytic => {
            let m = analytic_moments(lambda, kind, s)?;
            ratio(m.susceptibility, m.var_x)
        }
        ErrorPropagationPath::AnalyticAsPrinted => {
            let m = match kind {
                StateKind::Superposition => analytic_moments(lambda, kind, s)?,
                StateKind::Coherent(alpha) => coherent_moments_as_printed(lambda, alpha, s)?,
            };
            ratio(m.susceptibility, m.var_x)
        }
        ErrorPropagationPath::Numeric { cutoff } => {
            let cutoff = match cutoff {
                Some(c) => c,
                None => recommended_cutoff(lambda + DEFAULT_DLAMBDA, kind)?,
            };
            let state = kind.build(cutoff)?;
            let stencil = LambdaStencil::new(lambda, DEFAULT_DLAMBDA, &state)?;
            stencil.error_propagation(&stencil.states(s)?)
        }
    }
}

/// All metrics on a common time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MetrologySeries {
    /// Coupling.
    pub lambda: f64,
    /// Initial mechanical state.
    pub state_kind: StateKind,
    /// Mechanical cutoff used.
    pub cutoff: usize,
    /// Sample times.
    pub times: Vec<f64>,
    /// Exact QFI `I_λ`.
    pub qfi_exact: Vec<f64>,
    /// Asymptotic QFI with the state's `Var[P²]`.
    pub qfi_asymptotic: Vec<f64>,
    /// Homodyne Fisher information `𝖨_λ`.
    pub cfi: Vec<f64>,
    /// Error-propagation sensitivity `𝓘_λ`, from exact propagation.
    pub err_prop: Vec<f64>,
}

/// Relative slack of the ordering `I_λ ≥ 𝖨_λ ≥ 𝓘_λ`.
pub const ORDERING_TOL: f64 = 1e-6;

/// Checks `I_λ ≥ 𝖨_λ ≥ 𝓘_λ` with slack `10⁻⁶ I_λ` at sample time `s`.
pub fn check_ordering(s: f64, qfi: f64, cfi: f64, err_prop: f64) -> Result<()> {
    let tol = ORDERING_TOL * qfi.abs();
    if qfi < cfi - tol || cfi < err_prop - tol {
        return Err(Error::OrderingViolation { time: s });
    }
    Ok(())
}

/// Evaluates every metric at `times`, enforcing the ordering at each
/// sample. `cutoff = None` uses the recommended cutoff.
pub fn metrology_series(lambda: f64, times: &[f64], kind: StateKind, cutoff: Option<usize>) -> Result<MetrologySeries> {
    check_stable(lambda)?;
    check_times(times)?;
    let cutoff = match cutoff {
        Some(c) => c,
        None => recommended_cutoff(lambda + DEFAULT_DLAMBDA, kind)?,
    };
    let state = kind.build(cutoff)?;
    let stencil = LambdaStencil::new(lambda, DEFAULT_DLAMBDA, &state)?;
    let vp2 = super::var_p2(&state)?;
    let mut series = MetrologySeries {
        lambda,
        state_kind: kind,
        cutoff,
        times: times.to_vec(),
        qfi_exact: Vec::with_capacity(times.len()),
        qfi_asymptotic: Vec::with_capacity(times.len()),
        cfi: Vec::with_capacity(times.len()),
        err_prop: Vec::with_capacity(times.len()),
    };
    for &s in times {
        let states = stencil.states(s)?;
        let qfi = super::qfi_exact(lambda, s, &state)?;
        let cfi = stencil.cfi(&states, &stencil.default_grid(&states)?)?;
        let ep = stencil.error_propagation(&states)?;
        check_ordering(s, qfi, cfi, ep)?;
        series.qfi_exact.push(qfi);
        series.qfi_asymptotic.push(super::qfi_asymptotic(lambda, s, vp2)?);
        series.cfi.push(cfi);
        series.err_prop.push(ep);
    }
    Ok(series)
}
