//! Built-in figure presets.
//!
//! Each figure is one or more panels; a panel is written as
//! `<figure>[_<suffix>].csv` with its metadata and plot. Parameters the
//! figures do not pin down default to 400 grid points (`--set points=N`).

use std::fmt::Write as _;

use crate::config::{ConfigError, Document, SweepSpec};
use crate::output::PlotSpec;

/// Figure names accepted by `comsense figure`.
pub const FIGURES: [&str; 8] = ["fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7", "fig8"];

/// Default grid density.
pub const DEFAULT_POINTS: usize = 400;

/// Working points of the quadrature panel.
pub const FIG3A_WORKING_POINTS: [f64; 3] = [0.9, 0.95, 0.98];

/// One sub-sweep of a panel and its constant label columns.
#[derive(Debug, Clone)]
pub struct Part {
    /// Label columns prepended to every row.
    pub labels: Vec<(&'static str, f64)>,
    /// Validated sweep.
    pub spec: SweepSpec,
}

/// One output table.
#[derive(Debug, Clone)]
pub struct Panel {
    /// File stem.
    pub name: String,
    /// Sub-sweeps whose rows are concatenated.
    pub parts: Vec<Part>,
    /// Plot description.
    pub plot: PlotSpec,
}

fn plot(x: &str, y: &[&str], group: &[&str]) -> PlotSpec {
    PlotSpec {
        x: x.into(),
        y: y.iter().map(|s| s.to_string()).collect(),
        group: group.iter().map(|s| s.to_string()).collect(),
    }
}

fn linspace_with(a: f64, b: f64, n: usize, extra: f64) -> String {
    let mut values: Vec<f64> = (0..n)
        .map(|k| if n == 1 { a } else if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect();
    if !values.contains(&extra) {
        values.push(extra);
        values.sort_by(f64::total_cmp);
    }
    let mut out = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{v}");
    }
    out
}

/// Builds the panels of figure `name` with `--set` overrides applied.
///
/// `points=N` sets the default grid density; for `fig3a`, `lambda0=a, b, …`
/// sets the working points. Every other override is applied to each
/// sub-sweep, so keys address the sweep parameters directly
/// (`lambda=0.95`, `axes.s=linspace(0, 3, 50)`, `output=…`).
pub fn build(name: &str, overrides: &[String]) -> Result<Vec<Panel>, ConfigError> {
    if !FIGURES.contains(&name) {
        return Err(ConfigError(format!("unknown figure '{name}' (expected one of {})", FIGURES.join(", "))));
    }
    let mut points = DEFAULT_POINTS;
    let mut working_points = FIG3A_WORKING_POINTS.to_vec();
    let mut rest = Vec::new();
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| ConfigError(format!("override '{o}' is not key=value")))?;
        match (k.trim(), name) {
            ("points", _) => {
                points = v.trim().parse().ok().filter(|&n: &usize| n >= 2).ok_or_else(|| {
                    ConfigError(format!("'points' must be an integer >= 2, got '{}'", v.trim()))
                })?;
            }
            ("lambda0", "fig3a") => working_points = crate::config::parse_values(v, "lambda0")?,
            _ => rest.push(o.clone()),
        }
    }
    let lambda0s: Vec<f64> = if name == "fig3a" { working_points } else { vec![f64::NAN] };
    let mut panels: Vec<Panel> = Vec::new();
    for (idx, &l0) in lambda0s.iter().enumerate() {
        for (k, (text, plot)) in panel_templates(name, points, l0).into_iter().enumerate() {
            let mut doc = Document::parse(&text)?;
            for o in &rest {
                doc.apply_override(o)?;
            }
            let spec = SweepSpec::from_document(&doc)?;
            let labels = if name == "fig3a" { vec![("lambda0", l0)] } else { Vec::new() };
            let part = Part { labels, spec };
            if idx == 0 {
                panels.push(Panel { name: part.spec.name.clone(), parts: vec![part], plot });
            } else {
                panels[k].parts.push(part);
            }
        }
    }
    Ok(panels)
}

fn panel_templates(name: &str, points: usize, lambda0: f64) -> Vec<(String, PlotSpec)> {
    let p = points;
    match name {
        "fig2" => vec![(
            format!("[sweep]\nname = fig2\nmetrics = eps_np, phase\n[axes]\nlambda = linspace(0, 1.2, {p})\n"),
            plot("lambda", &["eps_np_re", "eps_np_im"], &[]),
        )],
        "fig3a" => vec![(
            format!(
                "[sweep]\nname = fig3a\nmetrics = mean_x, susceptibility, working_point_marker\n[axes]\nlambda = {}\n[fixed]\nlambda0 = {lambda0}\ntime = tau0\n",
                linspace_with(0.5, 0.99, p, lambda0)
            ),
            plot("lambda", &["mean_x"], &["lambda0"]),
        )],
        "fig3b" => vec![
            (
                format!(
                    "[sweep]\nname = fig3b\nmetrics = qfi_exact, qfi_asymptotic, err_prop\n[axes]\ns = linspace(0, 4, {p})\n[fixed]\nlambda = 0.98\ntime = s_tau\n"
                ),
                plot("time", &["qfi_exact", "qfi_asymptotic", "err_prop"], &[]),
            ),
            (
                format!(
                    "[sweep]\nname = fig3b_inset\nmetrics = err_prop, qfi_exact, err_prop_over_qfi\n[axes]\nlambda = linspace(0.5, 0.99, {p})\n[fixed]\ntime = tau\n"
                ),
                plot("lambda", &["err_prop_over_qfi"], &[]),
            ),
        ],
        "fig4" => vec![
            (
                format!(
                    "[sweep]\nname = fig4\nmetrics = finite_eta_ratio\n[axes]\neta = 100, 1000, 10000\nlambda = linspace(0.5, 0.99, {p})\n"
                ),
                plot("lambda", &["finite_eta_ratio"], &["eta"]),
            ),
            (
                format!(
                    "[sweep]\nname = fig4_inset\nmetrics = working_point, working_point_variant\n[axes]\neta = 100, 1000, 10000\nlambda = linspace(0.5, 1, {p})\n"
                ),
                plot("lambda", &["working_point"], &["eta"]),
            ),
        ],
        "fig5" => vec![(
            format!(
                "[sweep]\nname = fig5\nmetrics = qfi_exact\n[axes]\nalpha_re = 0, 1\nalpha_im = 1, 2\ns = linspace(0, 2, {p})\n[fixed]\nlambda = 0.98\nstate = coherent\ntime = s_tau\n"
            ),
            plot("time", &["qfi_exact"], &["alpha_re", "alpha_im"]),
        )],
        "fig6" => vec![(
            format!(
                "[sweep]\nname = fig6\nmetrics = err_prop, qfi_exact, err_prop_over_qfi\n[axes]\nalpha_im = 0.5, 1, 2\nalpha_re = linspace(0, 2, {p})\n[fixed]\nlambda = 0.98\nstate = coherent\ntime = tau\n"
            ),
            plot("alpha_re", &["err_prop_over_qfi"], &["alpha_im"]),
        )],
        "fig7" => vec![(
            format!(
                "[sweep]\nname = fig7\nmetrics = finite_eta_ratio\n[axes]\nalpha_re = 0, 1, 2\nalpha_im = 1, 2\neta = logspace(10, 10000, {p})\n[fixed]\nlambda = 0.98\nstate = coherent\n"
            ),
            plot("eta", &["finite_eta_ratio"], &["alpha_re", "alpha_im"]),
        )],
        "fig8" => vec![(
            format!(
                "[sweep]\nname = fig8\nmetrics = qfi_exact, cfi, err_prop_numeric, ordering\n[axes]\ns = linspace(0, 2, {p})\n[fixed]\nlambda = 0.9\ntime = s_tau\n"
            ),
            plot("time", &["qfi_exact", "cfi", "err_prop_numeric"], &[]),
        )],
        _ => Vec::new(),
    }
}
