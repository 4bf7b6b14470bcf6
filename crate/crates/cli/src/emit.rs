//! CSV and SVG writers.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// A cell of a CSV report.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Writes a header and rows as RFC 4180 CSV.
pub fn write_csv<W: Write, S: AsRef<str>>(
    out: W,
    header: &[S],
    rows: &[Vec<Cell>],
) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(header.iter().map(|h| h.as_ref()))?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(CliError::Usage(format!(
                "row {i} has {} cells, header has {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

/// [`write_csv`] to a file.
pub fn emit_csv<S: AsRef<str>>(rows: &[Vec<Cell>], header: &[S], path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), header, rows)
}

/// A single-series line chart.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    points: Vec<(f64, f64)>,
}

impl PlotSpec {
    /// Requires finite values and at least two points; points are sorted by `x`.
    pub fn new(
        title: impl Into<String>,
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        mut points: Vec<(f64, f64)>,
    ) -> Result<Self, CliError> {
        if points.len() < 2 {
            return Err(CliError::Usage("a plot needs at least two points".into()));
        }
        if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
            return Err(CliError::Usage("plot values must be finite".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(PlotSpec { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 50.0;
const TICKS: usize = 5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

/// Renders the chart. Identical input gives identical bytes.
pub fn render_svg(plot: &PlotSpec) -> String {
    let (x0, x1) = (plot.points[0].0, plot.points[plot.points.len() - 1].0);
    let (mut y0, mut y1) = plot
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    y0 = y0.min(0.0);
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let xr = if x1 > x0 { x1 - x0 } else { 1.0 };
    let pw = WIDTH - MARGIN_L - MARGIN_R;
    let ph = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x0) / xr * pw;
    let sy = |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );
    let (bx, by) = (MARGIN_L, HEIGHT - MARGIN_B);
    let _ = writeln!(
        s,
        r#"<path d="M{bx:.2},{MARGIN_T:.2} L{bx:.2},{by:.2} L{:.2},{by:.2}" fill="none" stroke="black"/>"#,
        WIDTH - MARGIN_R
    );
    for i in 0..=TICKS {
        let t = i as f64 / TICKS as f64;
        let xv = x0 + t * xr;
        let yv = y0 + t * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{by:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            by + 5.0,
            by + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{bx:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            bx - 5.0,
            bx - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        MARGIN_L + pw / 2.0,
        HEIGHT - 10.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {:.2})">{}</text>"#,
        MARGIN_T + ph / 2.0,
        MARGIN_T + ph / 2.0,
        escape(&plot.y_label)
    );
    s.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points=""#);
    for (i, &(x, y)) in plot.points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", sx(x), sy(y));
    }
    s.push_str("\"/>\n</svg>\n");
    s
}

/// [`render_svg`] to a file.
pub fn emit_svg(plot: &PlotSpec, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, render_svg(plot)).map_err(|e| CliError::io(path, e))
}
