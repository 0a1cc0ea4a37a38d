//! Grid evaluation.

use comsense_core::dynamics::{analytic_moments, corrected_moments, lambda_eff, recommended_cutoff, tau_1};
use comsense_core::metrology::{
    check_ordering, error_propagation, finite_eta_ratio, qfi_asymptotic, qfi_exact, var_p2, working_point_relation,
    ErrorPropagationPath, LambdaStencil, QfiMoments, StencilStates, WorkingPointForm, DEFAULT_DLAMBDA,
};
use comsense_core::model::{classify_phase, ExcitationFrequency, Phase};
use comsense_core::{dynamics::CorrectionPath, fock, Error, FrequencyRatio, StateKind};
use std::cell::{OnceCell, RefCell};
use std::rc::Rc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Metric, Param, StateChoice, SweepSpec, TimeMode};

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Floating-point value.
    Num(f64),
    /// Integer value.
    Int(usize),
    /// Fixed text.
    Text(&'static str),
    /// Error code of a failed evaluation.
    Error(&'static str),
}

impl Cell {
    fn from_result(r: Result<f64, Error>) -> Cell {
        match r {
            Ok(v) => Cell::Num(v),
            Err(e) => Cell::Error(e.code()),
        }
    }

    /// Whether the cell holds an error code.
    pub fn is_error(&self) -> bool {
        matches!(self, Cell::Error(_))
    }

    /// Numeric value, if any.
    pub fn value(&self) -> Option<f64> {
        match *self {
            Cell::Num(v) => Some(v),
            Cell::Int(v) => Some(v as f64),
            _ => None,
        }
    }
}

/// Evaluated grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Column names.
    pub columns: Vec<String>,
    /// Rows in grid order.
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// Number of error cells.
    pub fn error_cells(&self) -> usize {
        self.rows.iter().flatten().filter(|c| c.is_error()).count()
    }

    /// Appends the rows of `other`, which must share the columns.
    pub fn extend(&mut self, other: Table) {
        debug_assert_eq!(self.columns, other.columns);
        self.rows.extend(other.rows);
    }

    /// Prepends constant label columns.
    pub fn with_labels(mut self, labels: &[(&str, f64)]) -> Table {
        let mut columns: Vec<String> = labels.iter().map(|(n, _)| n.to_string()).collect();
        columns.extend(self.columns);
        self.columns = columns;
        for row in &mut self.rows {
            let mut r: Vec<Cell> = labels.iter().map(|&(_, v)| Cell::Num(v)).collect();
            r.append(row);
            *row = r;
        }
        self
    }
}

/// Column names for `spec`: axes, `time`, metric columns, diagnostics.
pub fn columns(spec: &SweepSpec) -> Vec<String> {
    let mut cols: Vec<String> = spec.axes.iter().map(|a| a.param.name().to_string()).collect();
    if spec.metrics.iter().any(|m| m.needs_time()) {
        cols.push("time".into());
    }
    for m in &spec.metrics {
        cols.extend(m.columns().into_iter().map(String::from));
    }
    if spec.has_numeric() {
        cols.push("cutoff_used".into());
        cols.push("tail_mass".into());
    }
    cols
}

/// Evaluates every grid point with `workers` threads. Row order is the
/// lexicographic grid order whatever the completion order.
pub fn run(spec: &SweepSpec, workers: usize) -> Table {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let rows = pool.install(|| (0..spec.len()).into_par_iter().map(|i| evaluate(spec, &spec.point(i))).collect());
    Table { columns: columns(spec), rows }
}

/// Parameters of one grid point.
#[derive(Debug, Clone, Copy)]
struct Point {
    lambda: f64,
    eta: FrequencyRatio,
    kind: StateKind,
    s: Option<f64>,
    n: f64,
    cutoff: Option<usize>,
}

fn point(spec: &SweepSpec, axis_values: &[f64]) -> Point {
    let get = |p: Param| -> Option<f64> {
        spec.axes.iter().position(|a| a.param == p).map(|k| axis_values[k]).or_else(|| spec.fixed.get(&p).copied())
    };
    let eta = match get(Param::Eta) {
        Some(e) if e.is_finite() => FrequencyRatio::Finite(e),
        _ => FrequencyRatio::Infinite,
    };
    let kind = match spec.state {
        StateChoice::Superposition => StateKind::Superposition,
        StateChoice::Coherent => {
            StateKind::Coherent(Complex64::new(get(Param::AlphaRe).unwrap_or(0.0), get(Param::AlphaIm).unwrap_or(0.0)))
        }
    };
    Point {
        lambda: get(Param::Lambda).unwrap_or(0.0),
        eta,
        kind,
        s: get(Param::S),
        n: get(Param::N).unwrap_or(1.0),
        cutoff: get(Param::Cutoff).map(|c| c as usize),
    }
}

fn resolve_time(spec: &SweepSpec, p: &Point) -> Result<f64, Error> {
    let missing = Error::InvalidParameter { name: "s", value: f64::NAN };
    match spec.time {
        TimeMode::S => p.s.ok_or(missing),
        TimeMode::STau => Ok(p.s.ok_or(missing)? * tau_1(p.lambda)?),
        TimeMode::Tau => Ok(p.n * tau_1(p.lambda)?),
        TimeMode::Tau0 => Ok(p.n * tau_1(spec.lambda0.unwrap_or(f64::NAN))?),
        TimeMode::Tau0Captioned => {
            let l0 = spec.lambda0.unwrap_or(f64::NAN);
            let big = 4.0 * (1.0 - l0) * (1.0 - l0);
            Ok(p.n * 2.0 * std::f64::consts::PI / big.sqrt())
        }
    }
}

/// Initial state and time-independent QFI moments of one
/// `(λ, state, cutoff)` combination.
struct Prepared {
    cutoff: usize,
    state: fock::QuantumState,
    moments: OnceCell<Result<QfiMoments, Error>>,
}

type PreparedKey = (u64, u8, u64, u64, Option<usize>);

thread_local! {
    // Cells along the innermost axis usually share everything but time, and
    // each worker receives contiguous index ranges, so one entry suffices.
    static LAST_PREPARED: RefCell<Option<(PreparedKey, Rc<Prepared>)>> = const { RefCell::new(None) };
}

fn prepared(p: &Point) -> Result<Rc<Prepared>, Error> {
    let (tag, re, im) = match p.kind {
        StateKind::Superposition => (0, 0.0, 0.0),
        StateKind::Coherent(a) => (1, a.re, a.im),
    };
    let key = (p.lambda.to_bits(), tag, re.to_bits(), im.to_bits(), p.cutoff);
    if let Some(hit) = LAST_PREPARED.with_borrow(|last| last.as_ref().filter(|(k, _)| *k == key).map(|(_, v)| v.clone())) {
        return Ok(hit);
    }
    let cutoff = match p.cutoff {
        Some(c) => c,
        None => recommended_cutoff(p.lambda + DEFAULT_DLAMBDA, p.kind)?,
    };
    let built = Rc::new(Prepared { cutoff, state: p.kind.build(cutoff)?, moments: OnceCell::new() });
    LAST_PREPARED.with_borrow_mut(|last| *last = Some((key, built.clone())));
    Ok(built)
}

/// Lazily built numeric context shared by the metrics of one cell.
struct Numeric {
    cutoff: usize,
    state: fock::QuantumState,
    prepared: Rc<Prepared>,
    stencil: Option<Result<(LambdaStencil, StencilStates), Error>>,
}

impl Numeric {
    fn new(p: &Point) -> Result<Numeric, Error> {
        let prepared = prepared(p)?;
        Ok(Numeric { cutoff: prepared.cutoff, state: prepared.state.clone(), prepared, stencil: None })
    }

    fn qfi_exact(&self, lambda: f64, s: f64) -> Result<f64, Error> {
        if s == 0.0 {
            return qfi_exact(lambda, s, &self.state);
        }
        match self.prepared.moments.get_or_init(|| QfiMoments::new(lambda, &self.state)) {
            Ok(m) => m.qfi(s),
            Err(e) => Err(e.clone()),
        }
    }

    fn stencil(&mut self, p: &Point, s: f64) -> Result<&(LambdaStencil, StencilStates), Error> {
        if self.stencil.is_none() {
            let built = LambdaStencil::new(p.lambda, DEFAULT_DLAMBDA, &self.state)
                .and_then(|st| st.states(s).map(|states| (st, states)));
            self.stencil = Some(built);
        }
        match self.stencil.as_ref().unwrap() {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    fn x(&self) -> Result<fock::FockOperator, Error> {
        Ok(fock::quadratures(self.cutoff)?.0)
    }
}

fn evaluate(spec: &SweepSpec, axis_values: &[f64]) -> Vec<Cell> {
    let p = point(spec, axis_values);
    let mut row: Vec<Cell> = axis_values.iter().map(|&v| Cell::Num(v)).collect();
    let needs_time = spec.metrics.iter().any(|m| m.needs_time());
    let time = resolve_time(spec, &p);
    if needs_time {
        row.push(Cell::from_result(time.clone()));
    }
    let mut numeric = if spec.has_numeric() { Some(Numeric::new(&p)) } else { None };
    // Values kept for the ordering check.
    let mut cache_qfi = None;
    let mut cache_cfi = None;
    let mut cache_ep = None;

    for &metric in &spec.metrics {
        if metric == Metric::EpsNp {
            match ExcitationFrequency::new(p.lambda, 1.0) {
                ExcitationFrequency::Real(v) => row.extend([Cell::Num(v), Cell::Num(0.0), Cell::Int(1)]),
                ExcitationFrequency::Imaginary(v) => row.extend([Cell::Num(0.0), Cell::Num(v), Cell::Int(0)]),
            }
            continue;
        }
        let cell = match metric {
            Metric::EpsNp => unreachable!(),
            Metric::Phase => Cell::Text(match classify_phase(p.lambda) {
                Phase::Stable => "stable",
                Phase::Critical => "critical",
                Phase::Unstable => "unstable",
            }),
            Metric::LambdaEff => Cell::Num(lambda_eff(p.lambda, p.eta)),
            Metric::WorkingPoint => Cell::from_result(working_point_relation(p.lambda, p.eta, WorkingPointForm::AsCaptioned)),
            Metric::WorkingPointVariant => {
                Cell::from_result(working_point_relation(p.lambda, p.eta, WorkingPointForm::Variant))
            }
            Metric::WorkingPointMarker => {
                let l0 = spec.lambda0.unwrap_or(f64::NAN);
                Cell::Int(usize::from((p.lambda - l0).abs() <= 1e-12))
            }
            Metric::MeanX | Metric::VarX | Metric::Susceptibility => {
                let m = time.clone().and_then(|s| match p.eta {
                    FrequencyRatio::Infinite => analytic_moments(p.lambda, p.kind, s),
                    FrequencyRatio::Finite(_) => corrected_moments(p.lambda, p.eta, p.kind, s),
                });
                Cell::from_result(m.map(|m| match metric {
                    Metric::MeanX => m.mean_x,
                    Metric::VarX => m.var_x,
                    _ => m.susceptibility,
                }))
            }
            Metric::ErrProp => {
                Cell::from_result(time.clone().and_then(|s| error_propagation(p.lambda, s, p.kind, ErrorPropagationPath::Analytic)))
            }
            Metric::ErrPropAsPrinted => Cell::from_result(
                time.clone().and_then(|s| error_propagation(p.lambda, s, p.kind, ErrorPropagationPath::AnalyticAsPrinted)),
            ),
            Metric::FiniteEtaRatio => {
                Cell::from_result(finite_eta_ratio(p.lambda, p.eta, p.kind, CorrectionPath::AnalyticLambdaEff))
            }
            Metric::MeanXNumeric
            | Metric::VarXNumeric
            | Metric::ErrPropNumeric
            | Metric::QfiExact
            | Metric::QfiAsymptotic
            | Metric::QfiNumeric
            | Metric::Cfi
            | Metric::ErrPropOverQfi
            | Metric::Ordering => {
                let ctx = numeric.as_mut().expect("numeric context");
                let r = match (ctx, &time) {
                    (Err(e), _) => Err(e.clone()),
                    (_, Err(e)) => Err(e.clone()),
                    (Ok(ctx), Ok(s)) => numeric_metric(metric, &p, *s, ctx, &mut cache_qfi, &mut cache_cfi, &mut cache_ep),
                };
                Cell::from_result(r)
            }
        };
        row.push(cell);
    }

    if let Some(ctx) = numeric.as_mut() {
        match ctx {
            Ok(ctx) => {
                row.push(Cell::Int(ctx.cutoff));
                // Evolved-state tail when exact propagation ran, initial
                // state otherwise.
                let tail = match &ctx.stencil {
                    Some(Ok((_, states))) => states.center.tail_mass(),
                    _ => ctx.state.tail_mass(),
                };
                row.push(Cell::Num(tail));
            }
            Err(e) => {
                row.push(Cell::Error(e.code()));
                row.push(Cell::Error(e.code()));
            }
        }
    }
    row
}

fn numeric_metric(
    metric: Metric,
    p: &Point,
    s: f64,
    ctx: &mut Numeric,
    cache_qfi: &mut Option<Result<f64, Error>>,
    cache_cfi: &mut Option<Result<f64, Error>>,
    cache_ep: &mut Option<Result<f64, Error>>,
) -> Result<f64, Error> {
    let qfi = |ctx: &Numeric, cache: &mut Option<Result<f64, Error>>| -> Result<f64, Error> {
        cache.get_or_insert_with(|| ctx.qfi_exact(p.lambda, s)).clone()
    };
    let cfi = |ctx: &mut Numeric, cache: &mut Option<Result<f64, Error>>| -> Result<f64, Error> {
        if cache.is_none() {
            let r = ctx.stencil(p, s).and_then(|(st, states)| st.cfi(states, &st.default_grid(states)?));
            *cache = Some(r);
        }
        cache.clone().unwrap()
    };
    let ep = |ctx: &mut Numeric, cache: &mut Option<Result<f64, Error>>| -> Result<f64, Error> {
        if cache.is_none() {
            *cache = Some(ctx.stencil(p, s).and_then(|(st, states)| st.error_propagation(states)));
        }
        cache.clone().unwrap()
    };
    match metric {
        Metric::MeanXNumeric | Metric::VarXNumeric => {
            let x = ctx.x()?;
            let (_, states) = ctx.stencil(p, s)?;
            if metric == Metric::MeanXNumeric {
                Ok(fock::expectation(&x, &states.center)?.re)
            } else {
                fock::variance(&x, &states.center)
            }
        }
        Metric::ErrPropNumeric => ep(ctx, cache_ep),
        Metric::QfiExact => qfi(ctx, cache_qfi),
        Metric::QfiAsymptotic => qfi_asymptotic(p.lambda, s, var_p2(&ctx.state)?),
        Metric::QfiNumeric => {
            let (st, states) = ctx.stencil(p, s)?;
            st.qfi(states)
        }
        Metric::Cfi => cfi(ctx, cache_cfi),
        Metric::ErrPropOverQfi => {
            let q = qfi(ctx, cache_qfi)?;
            let e = error_propagation(p.lambda, s, p.kind, ErrorPropagationPath::Analytic)?;
            if q > 0.0 {
                Ok(e / q)
            } else {
                Err(Error::InvalidParameter { name: "qfi", value: q })
            }
        }
        Metric::Ordering => {
            let q = qfi(ctx, cache_qfi)?;
            let c = cfi(ctx, cache_cfi)?;
            let e = ep(ctx, cache_ep)?;
            check_ordering(s, q, c, e).map(|_| 1.0)
        }
        _ => unreachable!("analytic metric routed to numeric evaluation"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rows_in_order() {
        let spec = SweepSpec::from_text(
            "[sweep]\nname = g\nmetrics = mean_x\n[axes]\nlambda = 0.1, 0.2, 0.3\ns = 1, 2, 3, 4\n",
        )
        .unwrap();
        let t = run(&spec, 3);
        assert_eq!(t.rows.len(), 12);
        assert_eq!(t.columns, vec!["lambda", "s", "time", "mean_x"]);
        assert_eq!(t.rows[5][0], Cell::Num(0.2));
        assert_eq!(t.rows[5][1], Cell::Num(2.0));
    }

    #[test]
    fn inadequate_cutoff_is_isolated() {
        let spec = SweepSpec::from_text(
            "[sweep]\nname = g\nmetrics = err_prop_numeric\n[axes]\ncutoff = 6, 80\n[fixed]\nlambda = 0.9\n",
        )
        .unwrap();
        let t = run(&spec, 2);
        let col = t.columns.iter().position(|c| c == "err_prop_numeric").unwrap();
        assert_eq!(t.rows[0][col], Cell::Error("CUTOFF"));
        assert!(matches!(t.rows[1][col], Cell::Num(v) if (v - 582.76).abs() < 6.0));
    }

    #[test]
    fn eps_np_past_critical_point() {
        let spec = SweepSpec::from_text("[sweep]\nname = g\nmetrics = eps_np, phase\n[axes]\nlambda = 0.6, 1.25\n").unwrap();
        let t = run(&spec, 1);
        assert_eq!(t.columns, vec!["lambda", "eps_np_re", "eps_np_im", "eps_np_real", "phase"]);
        assert_eq!(t.rows[0][3], Cell::Int(1));
        assert!(matches!(t.rows[0][1], Cell::Num(v) if (v - 0.8).abs() < 1e-15));
        assert!(matches!(t.rows[1][2], Cell::Num(v) if (v - 0.75).abs() < 1e-15));
        assert_eq!(t.rows[1][4], Cell::Text("unstable"));
    }
}
