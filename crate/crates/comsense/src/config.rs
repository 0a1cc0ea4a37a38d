//! INI-style sweep configuration.
//!
//! ```ini
//! [sweep]
//! name = lambda_scan
//! metrics = err_prop, qfi_exact
//! workers = 4
//! output = results
//!
//! [axes]
//! lambda = linspace(0.5, 0.95, 10)
//! eta = 100, 1000, inf
//!
//! [fixed]
//! state = coherent
//! alpha_im = 2
//! time = tau
//! ```
//!
//! Axes are swept in declaration order, the first axis outermost.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

/// Configuration problem; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

macro_rules! bail {
    ($($arg:tt)*) => { return Err(ConfigError(format!($($arg)*))) };
}

/// Parameters that may be swept or fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    /// Dimensionless coupling.
    Lambda,
    /// Frequency ratio `Δ/ω_m`; `inf` allowed.
    Eta,
    /// Real part of the coherent amplitude.
    AlphaRe,
    /// Imaginary part of the coherent amplitude.
    AlphaIm,
    /// Dimensionless time, or time in units of `τ_1` with `time = s_tau`.
    S,
    /// Peak index for the `tau` time modes.
    N,
    /// Mechanical Fock cutoff.
    Cutoff,
}

impl Param {
    /// All parameters in canonical order.
    pub const ALL: [Param; 7] =
        [Param::Lambda, Param::Eta, Param::AlphaRe, Param::AlphaIm, Param::S, Param::N, Param::Cutoff];

    /// Config and CSV name.
    pub fn name(self) -> &'static str {
        match self {
            Param::Lambda => "lambda",
            Param::Eta => "eta",
            Param::AlphaRe => "alpha_re",
            Param::AlphaIm => "alpha_im",
            Param::S => "s",
            Param::N => "n",
            Param::Cutoff => "cutoff",
        }
    }

    /// Parses a config name.
    pub fn parse(name: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == name)
    }

    fn check(self, v: f64) -> Result<(), ConfigError> {
        let ok = match self {
            Param::Lambda => v.is_finite() && v >= 0.0,
            Param::Eta => v > 0.0,
            Param::AlphaRe | Param::AlphaIm => v.is_finite(),
            Param::S => v.is_finite() && v >= 0.0,
            Param::N => v.is_finite() && v >= 1.0 && v.fract() == 0.0,
            Param::Cutoff => v.is_finite() && v >= 2.0 && v.fract() == 0.0,
        };
        if !ok {
            bail!("invalid value {v} for '{}'", self.name());
        }
        Ok(())
    }
}

/// How the evolution time of a cell is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    /// `s` as given.
    S,
    /// `s · τ_1(λ)`.
    STau,
    /// `n · τ_1(λ)`.
    Tau,
    /// `n · τ_1(λ₀)` with `λ₀ = lambda0`.
    Tau0,
    /// `n · 2π/√(4(1 − λ₀)²)`, the working-point time with the captioned
    /// `Λ_λ₀`.
    Tau0Captioned,
}

impl TimeMode {
    /// Config name.
    pub fn name(self) -> &'static str {
        match self {
            TimeMode::S => "s",
            TimeMode::STau => "s_tau",
            TimeMode::Tau => "tau",
            TimeMode::Tau0 => "tau0",
            TimeMode::Tau0Captioned => "tau0_captioned",
        }
    }

    fn parse(v: &str) -> Option<TimeMode> {
        [TimeMode::S, TimeMode::STau, TimeMode::Tau, TimeMode::Tau0, TimeMode::Tau0Captioned]
            .into_iter()
            .find(|m| m.name() == v)
    }
}

/// Initial mechanical state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateChoice {
    /// `(|0⟩ + i|1⟩)/√2`.
    Superposition,
    /// `|α⟩` with `α = alpha_re + i alpha_im`.
    Coherent,
}

impl StateChoice {
    /// Config name.
    pub fn name(self) -> &'static str {
        match self {
            StateChoice::Superposition => "superposition",
            StateChoice::Coherent => "coherent",
        }
    }
}

/// Quantities a sweep can evaluate per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Excitation frequency `ε_np/ω_m` split into real and imaginary parts
    /// plus a real/imaginary flag.
    EpsNp,
    /// `stable`, `critical` or `unstable`.
    Phase,
    /// `λ_eff` for the configured `η`.
    LambdaEff,
    /// `log₁₀[4(1−λ)² + λ⁴η⁻²]/3`.
    WorkingPoint,
    /// `log₁₀[4(1−λ²) + λ⁴η⁻²]/3`.
    WorkingPointVariant,
    /// 1 where `λ = λ₀`, else 0.
    WorkingPointMarker,
    /// Closed-form `⟨X⟩` (η-corrected for finite `η`).
    MeanX,
    /// Closed-form `Var X`.
    VarX,
    /// Closed-form `∂_λ⟨X⟩`.
    Susceptibility,
    /// `⟨X⟩` from exact propagation.
    MeanXNumeric,
    /// `Var X` from exact propagation.
    VarXNumeric,
    /// Closed-form error-propagation sensitivity.
    ErrProp,
    /// Same with the coherent moments in their printed form.
    ErrPropAsPrinted,
    /// Error-propagation sensitivity from exact propagation.
    ErrPropNumeric,
    /// Generator-based QFI.
    QfiExact,
    /// Asymptotic QFI with the state's `Var[P²]`.
    QfiAsymptotic,
    /// Fidelity-based finite-difference QFI.
    QfiNumeric,
    /// Homodyne Fisher information.
    Cfi,
    /// Closed-form error propagation divided by the exact QFI.
    ErrPropOverQfi,
    /// 1 when `QFI ≥ CFI ≥ err_prop_numeric` holds, `ORDERING` otherwise.
    Ordering,
    /// Finite-η working-point ratio (closed forms at `λ_eff`).
    FiniteEtaRatio,
}

impl Metric {
    /// Every metric.
    pub const ALL: [Metric; 21] = [
        Metric::EpsNp,
        Metric::Phase,
        Metric::LambdaEff,
        Metric::WorkingPoint,
        Metric::WorkingPointVariant,
        Metric::WorkingPointMarker,
        Metric::MeanX,
        Metric::VarX,
        Metric::Susceptibility,
        Metric::MeanXNumeric,
        Metric::VarXNumeric,
        Metric::ErrProp,
        Metric::ErrPropAsPrinted,
        Metric::ErrPropNumeric,
        Metric::QfiExact,
        Metric::QfiAsymptotic,
        Metric::QfiNumeric,
        Metric::Cfi,
        Metric::ErrPropOverQfi,
        Metric::Ordering,
        Metric::FiniteEtaRatio,
    ];

    /// Config name.
    pub fn name(self) -> &'static str {
        match self {
            Metric::EpsNp => "eps_np",
            Metric::Phase => "phase",
            Metric::LambdaEff => "lambda_eff",
            Metric::WorkingPoint => "working_point",
            Metric::WorkingPointVariant => "working_point_variant",
            Metric::WorkingPointMarker => "working_point_marker",
            Metric::MeanX => "mean_x",
            Metric::VarX => "var_x",
            Metric::Susceptibility => "susceptibility",
            Metric::MeanXNumeric => "mean_x_numeric",
            Metric::VarXNumeric => "var_x_numeric",
            Metric::ErrProp => "err_prop",
            Metric::ErrPropAsPrinted => "err_prop_as_printed",
            Metric::ErrPropNumeric => "err_prop_numeric",
            Metric::QfiExact => "qfi_exact",
            Metric::QfiAsymptotic => "qfi_asymptotic",
            Metric::QfiNumeric => "qfi_numeric",
            Metric::Cfi => "cfi",
            Metric::ErrPropOverQfi => "err_prop_over_qfi",
            Metric::Ordering => "ordering",
            Metric::FiniteEtaRatio => "finite_eta_ratio",
        }
    }

    /// CSV columns produced.
    pub fn columns(self) -> Vec<&'static str> {
        match self {
            Metric::EpsNp => vec!["eps_np_re", "eps_np_im", "eps_np_real"],
            m => vec![m.name()],
        }
    }

    /// Whether the metric is defined past the critical point.
    pub fn allows_unstable(self) -> bool {
        matches!(
            self,
            Metric::EpsNp | Metric::Phase | Metric::LambdaEff | Metric::WorkingPoint | Metric::WorkingPointVariant
        )
    }

    /// Whether the metric needs an evolution time.
    pub fn needs_time(self) -> bool {
        !matches!(
            self,
            Metric::EpsNp
                | Metric::Phase
                | Metric::LambdaEff
                | Metric::WorkingPoint
                | Metric::WorkingPointVariant
                | Metric::WorkingPointMarker
                | Metric::FiniteEtaRatio
        )
    }

    /// Whether the metric works on a truncated Fock space.
    pub fn is_numeric(self) -> bool {
        matches!(
            self,
            Metric::MeanXNumeric
                | Metric::VarXNumeric
                | Metric::ErrPropNumeric
                | Metric::QfiExact
                | Metric::QfiAsymptotic
                | Metric::QfiNumeric
                | Metric::Cfi
                | Metric::ErrPropOverQfi
                | Metric::Ordering
        )
    }

    fn parse(name: &str) -> Option<Metric> {
        Metric::ALL.into_iter().find(|m| m.name() == name)
    }
}

/// One swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    /// Parameter.
    pub param: Param,
    /// Values in sweep order.
    pub values: Vec<f64>,
}

/// Validated sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Output base name.
    pub name: String,
    /// Swept parameters, outermost first.
    pub axes: Vec<Axis>,
    /// Fixed parameter values.
    pub fixed: BTreeMap<Param, f64>,
    /// Initial state.
    pub state: StateChoice,
    /// Time resolution.
    pub time: TimeMode,
    /// Working point for the `tau0` modes and the marker metric.
    pub lambda0: Option<f64>,
    /// Requested metrics, in column order.
    pub metrics: Vec<Metric>,
    /// Worker count from the config.
    pub workers: Option<usize>,
    /// Output directory from the config.
    pub output: Option<PathBuf>,
}

/// Raw `section → key → value` view of an INI document, keeping
/// declaration order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    sections: Vec<(String, Vec<(String, String)>)>,
}

const SECTIONS: [&str; 3] = ["sweep", "axes", "fixed"];

fn strip_comment(line: &str) -> &str {
    let mut prev_space = true;
    for (i, c) in line.char_indices() {
        if (c == ';' || c == '#') && prev_space {
            return &line[..i];
        }
        prev_space = c.is_whitespace();
    }
    line
}

impl Document {
    /// Parses INI text; rejects unknown sections, keys outside sections and
    /// duplicate keys. `;` and `#` start a comment at the beginning of a line
    /// or after whitespace.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut doc = Document::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let lineno = lineno + 1;
            if let Some(rest) = line.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    bail!("line {lineno}: malformed section header '{line}'");
                };
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    bail!("line {lineno}: unknown section [{name}]");
                }
                if doc.sections.iter().any(|(s, _)| s == name) {
                    bail!("line {lineno}: duplicate section [{name}]");
                }
                doc.sections.push((name.to_string(), Vec::new()));
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {lineno}: expected key = value, got '{line}'");
            };
            let Some((section, entries)) = doc.sections.last_mut() else {
                bail!("line {lineno}: key '{}' outside of a section", key.trim());
            };
            let key = key.trim().to_string();
            if entries.iter().any(|(k, _)| *k == key) {
                if section == "axes" {
                    bail!("duplicate axis '{key}'");
                }
                bail!("duplicate key '{key}' in [{section}]");
            }
            entries.push((key, value.trim().to_string()));
        }
        Ok(doc)
    }

    fn section(&self, name: &str) -> &[(String, String)] {
        self.sections.iter().find(|(s, _)| s == name).map(|(_, e)| e.as_slice()).unwrap_or(&[])
    }

    /// Sets `key` in `section`, replacing an existing entry in place.
    pub fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        if !SECTIONS.contains(&section) {
            bail!("unknown section [{section}]");
        }
        if !self.sections.iter().any(|(s, _)| s == section) {
            self.sections.push((section.to_string(), Vec::new()));
        }
        let entries = &mut self.sections.iter_mut().find(|(s, _)| s == section).unwrap().1;
        match entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value.to_string(),
            None => entries.push((key.to_string(), value.to_string())),
        }
        Ok(())
    }

    /// Removes `key` from `section`, if present.
    pub fn remove(&mut self, section: &str, key: &str) {
        if let Some((_, entries)) = self.sections.iter_mut().find(|(s, _)| s == section) {
            entries.retain(|(k, _)| k != key);
        }
    }

    /// Whether `section` holds `key`.
    pub fn contains(&self, section: &str, key: &str) -> bool {
        self.section(section).iter().any(|(k, _)| k == key)
    }

    /// Applies a `--set` override. `section.key=value` addresses a section
    /// directly; a bare parameter name replaces the axis of that name when
    /// one exists and sets a fixed value otherwise; other bare keys go to
    /// `[sweep]` or `[fixed]` by name.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let Some((key, value)) = assignment.split_once('=') else {
            bail!("override '{assignment}' is not key=value");
        };
        let (key, value) = (key.trim(), value.trim());
        if let Some((section, key)) = key.split_once('.') {
            if section == "axes" {
                self.remove("fixed", key);
            } else if section == "fixed" {
                self.remove("axes", key);
            }
            return self.set(section, key, value);
        }
        if Param::parse(key).is_some() {
            if self.contains("axes", key) {
                return self.set("axes", key, value);
            }
            return self.set("fixed", key, value);
        }
        if SWEEP_KEYS.contains(&key) {
            return self.set("sweep", key, value);
        }
        if FIXED_EXTRA_KEYS.contains(&key) {
            return self.set("fixed", key, value);
        }
        bail!("unknown key '{key}'")
    }
}

const SWEEP_KEYS: [&str; 4] = ["name", "metrics", "workers", "output"];
const FIXED_EXTRA_KEYS: [&str; 3] = ["state", "time", "lambda0"];

fn parse_number(text: &str, key: &str) -> Result<f64, ConfigError> {
    let t = text.trim();
    match t {
        "inf" | "infinity" => return Ok(f64::INFINITY),
        _ => {}
    }
    match t.parse::<f64>() {
        Ok(v) if !v.is_nan() => Ok(v),
        _ => bail!("'{key}': cannot parse '{t}' as a number"),
    }
}

fn parse_call<'a>(text: &'a str, name: &str) -> Option<&'a str> {
    text.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')')
}

/// Parses an axis value list: `a, b, c`, `linspace(a, b, n)` or
/// `logspace(a, b, n)`; the last two include both endpoints.
pub fn parse_values(text: &str, key: &str) -> Result<Vec<f64>, ConfigError> {
    let text = text.trim();
    for (name, log) in [("linspace", false), ("logspace", true)] {
        if let Some(args) = parse_call(text, name) {
            let parts: Vec<&str> = args.split(',').collect();
            if parts.len() != 3 {
                bail!("'{key}': {name} takes (start, stop, count)");
            }
            let a = parse_number(parts[0], key)?;
            let b = parse_number(parts[1], key)?;
            let n = parts[2].trim().parse::<usize>().map_err(|_| ConfigError(format!("'{key}': bad count '{}'", parts[2].trim())))?;
            if n == 0 {
                bail!("'{key}': empty range");
            }
            if !a.is_finite() || !b.is_finite() {
                bail!("'{key}': range endpoints must be finite");
            }
            if log && (a <= 0.0 || b <= 0.0) {
                bail!("'{key}': logspace endpoints must be positive");
            }
            let at = |k: usize| -> f64 {
                if k == 0 {
                    return a;
                }
                if k == n - 1 {
                    return b;
                }
                let f = k as f64 / (n - 1) as f64;
                if log {
                    (a.ln() + f * (b.ln() - a.ln())).exp()
                } else {
                    a + f * (b - a)
                }
            };
            return Ok((0..n).map(at).collect());
        }
    }
    if text.is_empty() {
        bail!("'{key}': empty value list");
    }
    text.split(',').map(|v| parse_number(v, key)).collect()
}

impl SweepSpec {
    /// Parses and validates a config document.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        SweepSpec::from_document(&Document::parse(text)?)
    }

    /// Validates a parsed document.
    pub fn from_document(doc: &Document) -> Result<Self, ConfigError> {
        let mut name = None;
        let mut metrics = Vec::new();
        let mut workers = None;
        let mut output = None;
        for (key, value) in doc.section("sweep") {
            match key.as_str() {
                "name" => {
                    if value.is_empty() || value.contains(['/', '\\']) {
                        bail!("'name' must be a plain file stem, got '{value}'");
                    }
                    name = Some(value.clone());
                }
                "metrics" => {
                    for m in value.split(',').map(str::trim).filter(|m| !m.is_empty()) {
                        let Some(metric) = Metric::parse(m) else {
                            bail!("unknown metric '{m}'");
                        };
                        if metrics.contains(&metric) {
                            bail!("metric '{m}' listed twice");
                        }
                        metrics.push(metric);
                    }
                }
                "workers" => match value.parse::<usize>() {
                    Ok(w) if w > 0 => workers = Some(w),
                    _ => bail!("'workers' must be a positive integer, got '{value}'"),
                },
                "output" => output = Some(PathBuf::from(value)),
                other => bail!("unknown key '{other}' in [sweep]"),
            }
        }
        let Some(name) = name else {
            bail!("missing 'name' in [sweep]");
        };
        if metrics.is_empty() {
            bail!("missing 'metrics' in [sweep]");
        }

        let mut axes = Vec::new();
        for (key, value) in doc.section("axes") {
            let Some(param) = Param::parse(key) else {
                bail!("unknown axis '{key}'");
            };
            let values = parse_values(value, key)?;
            for &v in &values {
                param.check(v)?;
            }
            axes.push(Axis { param, values });
        }

        let mut fixed = BTreeMap::new();
        let mut state = None;
        let mut time = None;
        let mut lambda0 = None;
        for (key, value) in doc.section("fixed") {
            match key.as_str() {
                "state" => {
                    state = Some(match value.as_str() {
                        "superposition" => StateChoice::Superposition,
                        "coherent" => StateChoice::Coherent,
                        other => bail!("unknown state '{other}'"),
                    })
                }
                "time" => {
                    let Some(mode) = TimeMode::parse(value) else {
                        bail!("unknown time mode '{value}'");
                    };
                    time = Some(mode);
                }
                "lambda0" => {
                    let v = parse_number(value, key)?;
                    if !(0.0..1.0).contains(&v) {
                        bail!("unstable regime: lambda0 = {v} must lie in [0, 1)");
                    }
                    lambda0 = Some(v);
                }
                _ => {
                    let Some(param) = Param::parse(key) else {
                        bail!("unknown key '{key}' in [fixed]");
                    };
                    if axes.iter().any(|a: &Axis| a.param == param) {
                        bail!("'{key}' is both an axis and a fixed value");
                    }
                    let v = parse_number(value, key)?;
                    param.check(v)?;
                    fixed.insert(param, v);
                }
            }
        }

        let has = |p: Param| fixed.contains_key(&p) || axes.iter().any(|a| a.param == p);
        let state = state.unwrap_or(if has(Param::AlphaRe) || has(Param::AlphaIm) {
            StateChoice::Coherent
        } else {
            StateChoice::Superposition
        });
        let time = time.unwrap_or(if has(Param::S) { TimeMode::S } else { TimeMode::Tau });
        if matches!(time, TimeMode::S | TimeMode::STau) && metrics.iter().any(|m| m.needs_time()) && !has(Param::S) {
            bail!("time mode '{}' needs 's'", time.name());
        }
        if matches!(time, TimeMode::Tau0 | TimeMode::Tau0Captioned) && lambda0.is_none() {
            bail!("time mode '{}' needs 'lambda0'", time.name());
        }
        if metrics.contains(&Metric::WorkingPointMarker) && lambda0.is_none() {
            bail!("metric 'working_point_marker' needs 'lambda0'");
        }
        if !has(Param::Lambda) {
            bail!("'lambda' must be given as an axis or a fixed value");
        }
        if let Some(m) = metrics.iter().find(|m| !m.allows_unstable()) {
            let mut lambdas: Vec<f64> = fixed.get(&Param::Lambda).copied().into_iter().collect();
            for a in axes.iter().filter(|a| a.param == Param::Lambda) {
                lambdas.extend(&a.values);
            }
            if let Some(l) = lambdas.into_iter().find(|&l| l >= 1.0) {
                bail!("unstable regime: lambda = {l} >= 1 is outside the normal phase required by '{}'", m.name());
            }
        }
        Ok(SweepSpec { name, axes, fixed, state, time, lambda0, metrics, workers, output })
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Whether the grid is empty (never, after validation).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of grid point `index` in lexicographic order.
    pub fn point(&self, mut index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            out[k] = axis.values[index % n];
            index /= n;
        }
        out
    }

    /// Whether any metric needs diagnostics of a truncated space.
    pub fn has_numeric(&self) -> bool {
        self.metrics.iter().any(|m| m.is_numeric())
    }

    /// Resolved configuration as JSON.
    pub fn to_json(&self) -> serde_json::Value {
        let fixed: serde_json::Map<String, serde_json::Value> =
            self.fixed.iter().map(|(p, v)| (p.name().to_string(), json_number(*v))).collect();
        serde_json::json!({
            "name": self.name,
            "metrics": self.metrics.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "axes": self.axes.iter().map(|a| serde_json::json!({
                "param": a.param.name(),
                "values": a.values.iter().map(|v| json_number(*v)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "fixed": fixed,
            "state": self.state.name(),
            "time": self.time.name(),
            "lambda0": self.lambda0,
        })
    }
}

fn json_number(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!("inf")
    }
}
