//! CSV, JSON and SVG emission.

use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use crate::sweep::{Cell, Table};

/// Formats `v` with 12 significant digits, `%.12g` style.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(t) | Cell::Error(t) => t.to_string(),
    }
}

/// CSV text with a header row and `\n` line endings.
pub fn to_csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(format_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// followed by a rename, so `path` never holds partial content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Output paths of one table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    /// `<name>.csv`.
    pub csv: PathBuf,
    /// `<name>.meta.json`.
    pub meta: PathBuf,
    /// `<name>.svg`.
    pub svg: PathBuf,
}

impl OutputPaths {
    /// Paths for `name` under `dir`.
    pub fn new(dir: &Path, name: &str) -> Self {
        OutputPaths {
            csv: dir.join(format!("{name}.csv")),
            meta: dir.join(format!("{name}.meta.json")),
            svg: dir.join(format!("{name}.svg")),
        }
    }
}

/// Code version recorded in metadata.
pub fn version_string() -> String {
    format!("comsense {}", env!("CARGO_PKG_VERSION"))
}

/// Writes CSV and metadata, then a best-effort SVG whose failure is
/// ignored.
pub fn write_outputs(paths: &OutputPaths, table: &Table, config: serde_json::Value, plot: &PlotSpec) -> io::Result<()> {
    write_atomic(&paths.csv, to_csv(table).as_bytes())?;
    let meta = serde_json::json!({
        "version": version_string(),
        "config": config,
        "columns": table.columns,
        "rows": table.rows.len(),
        "error_cells": table.error_cells(),
    });
    let text = serde_json::to_string_pretty(&meta).map_err(io::Error::other)?;
    write_atomic(&paths.meta, text.as_bytes())?;
    if let Some(svg) = render_svg(table, plot) {
        let _ = write_atomic(&paths.svg, svg.as_bytes());
    }
    Ok(())
}

/// What to draw: `y` columns against `x`, one polyline per distinct value
/// combination of the `group` columns.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlotSpec {
    /// Abscissa column.
    pub x: String,
    /// Ordinate columns.
    pub y: Vec<String>,
    /// Columns separating curves.
    pub group: Vec<String>,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// Renders a simple line plot; `None` when nothing is plottable.
pub fn render_svg(table: &Table, plot: &PlotSpec) -> Option<String> {
    let col = |name: &str| table.columns.iter().position(|c| c == name);
    let xi = col(&plot.x)?;
    let groups: Vec<usize> = plot.group.iter().filter_map(|g| col(g)).collect();
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for y in &plot.y {
        let Some(yi) = col(y) else { continue };
        for row in &table.rows {
            let (Some(x), Some(v)) = (row[xi].value(), row[yi].value()) else { continue };
            if !x.is_finite() || !v.is_finite() {
                continue;
            }
            let mut label = y.clone();
            for &g in &groups {
                let _ = write!(label, " {}={}", table.columns[g], format_cell(&row[g]));
            }
            match curves.iter_mut().find(|(l, _)| *l == label) {
                Some((_, pts)) => pts.push((x, v)),
                None => curves.push((label, vec![(x, v)])),
            }
        }
    }
    let all = curves.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return None;
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (w, h, left, right, top, bottom) = (720.0, 440.0, 70.0, 200.0, 20.0, 50.0);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - left - right,
        h - top - bottom
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (left + w - right) / 2.0, h - 12.0, plot.x);
    let _ = writeln!(svg, r#"<text x="{left}" y="{}" text-anchor="middle">{}</text>"#, h - bottom + 14.0, format_number(x0));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w - right, h - bottom + 14.0, format_number(x1));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, h - bottom, format_number(y0));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 4.0, top + 10.0, format_number(y1));
    for (k, (label, pts)) in curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let ly = top + 14.0 * (k as f64 + 1.0);
        let _ = writeln!(svg, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, w - right + 8.0, w - right + 24.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, w - right + 28.0, ly + 4.0, label);
    }
    svg.push_str("</svg>\n");
    Some(svg)
}
