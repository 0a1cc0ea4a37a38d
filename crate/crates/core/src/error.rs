use core::fmt;

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Failures reported by the engine.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Basis dimension below the minimum the operation needs.
    InvalidCutoff {
        /// Requested cutoff.
        cutoff: usize,
        /// Smallest accepted cutoff.
        min: usize,
    },
    /// Truncation is not adequate for the state or its evolution.
    CutoffTooSmall {
        /// Measured tail mass, or the violated heuristic value.
        tail_mass: f64,
        /// Accepted bound.
        limit: f64,
        /// First sample time at which the breach occurred, for trajectories.
        time: Option<f64>,
    },
    /// Operands live on spaces of different shape.
    DimensionMismatch {
        /// Dimension of the left operand.
        left: usize,
        /// Dimension of the right operand.
        right: usize,
    },
    /// A Hermitian operator was required.
    NotHermitian {
        /// Largest entrywise deviation from Hermiticity.
        residual: f64,
    },
    /// `λ ≥ 1`, where the normal-phase analysis does not apply.
    UnstableRegime {
        /// Offending coupling.
        lambda: f64,
    },
    /// Parameter outside its admissible range.
    InvalidParameter {
        /// Parameter name.
        name: &'static str,
        /// Offending value.
        value: f64,
    },
    /// Effective detuning `Δ ≤ 0`; the dispersive analysis needs `η > 0`.
    InvalidRegime {
        /// Effective detuning found.
        delta: f64,
    },
    /// Steady-state iteration did not converge.
    Divergence {
        /// Iterations performed.
        iterations: usize,
        /// Residual of the last iterate.
        residual: f64,
        /// Last iterate of `⟨a⟩` as `(re, im)`.
        mean_a: (f64, f64),
        /// Last iterate of `⟨b⟩` as `(re, im)`.
        mean_b: (f64, f64),
    },
    /// Two routes to the same quantity disagree.
    InternalConsistency {
        /// Value from the primary route.
        direct: f64,
        /// Value from the secondary route.
        expanded: f64,
    },
    /// Finite-difference step too small for double precision.
    StepTooSmall {
        /// Offending step.
        step: f64,
    },
    /// Homodyne grid misses part of the probability mass.
    GridCoverage {
        /// Probability mass outside the grid.
        mass_outside: f64,
    },
    /// Squeezing amplitude beyond what the truncation can represent.
    TruncationGuard {
        /// Offending amplitude.
        r: f64,
    },
    /// `I_λ ≥ 𝖨_λ ≥ 𝓘_λ` violated beyond tolerance.
    OrderingViolation {
        /// Sample time of the violation.
        time: f64,
    },
}

impl Error {
    /// Short uppercase tag used in tabular output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidCutoff { .. } | Error::CutoffTooSmall { .. } => "CUTOFF",
            Error::DimensionMismatch { .. } => "DIMENSION",
            Error::NotHermitian { .. } => "NOT_HERMITIAN",
            Error::UnstableRegime { .. } => "UNSTABLE",
            Error::InvalidParameter { .. } => "PARAMETER",
            Error::InvalidRegime { .. } => "REGIME",
            Error::Divergence { .. } => "DIVERGENCE",
            Error::InternalConsistency { .. } => "CONSISTENCY",
            Error::StepTooSmall { .. } => "STEP",
            Error::GridCoverage { .. } => "GRID",
            Error::TruncationGuard { .. } => "TRUNCATION",
            Error::OrderingViolation { .. } => "ORDERING",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCutoff { cutoff, min } => {
                write!(f, "invalid cutoff {cutoff}, need at least {min}")
            }
            Error::CutoffTooSmall { tail_mass, limit, time } => {
                write!(f, "cutoff too small: tail mass {tail_mass:.3e} exceeds {limit:.1e}")?;
                if let Some(t) = time {
                    write!(f, " at s = {t}")?;
                }
                Ok(())
            }
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::NotHermitian { residual } => {
                write!(f, "operator is not Hermitian (residual {residual:.3e})")
            }
            Error::UnstableRegime { lambda } => {
                write!(f, "unstable regime: lambda = {lambda} >= 1")
            }
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for {name}")
            }
            Error::InvalidRegime { delta } => {
                write!(f, "invalid regime: effective detuning {delta} <= 0")
            }
            Error::Divergence { iterations, residual, .. } => write!(
                f,
                "steady state did not converge after {iterations} iterations (residual {residual:.3e})"
            ),
            Error::InternalConsistency { direct, expanded } => write!(
                f,
                "internal consistency check failed: {direct} vs {expanded}"
            ),
            Error::StepTooSmall { step } => {
                write!(f, "finite-difference step {step:e} too small")
            }
            Error::GridCoverage { mass_outside } => {
                write!(f, "grid misses probability mass {mass_outside:.3e}")
            }
            Error::TruncationGuard { r } => {
                write!(f, "squeezing amplitude |r| = {r} exceeds truncation guard 3")
            }
            Error::OrderingViolation { time } => {
                write!(f, "Fisher information ordering violated at s = {time}")
            }
        }
    }
}

impl core::error::Error for Error {}
