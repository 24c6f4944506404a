//! CSV and SVG rendering of a [`TimeSeriesBundle`]. Output is a pure function
//! of the bundle, so identical configs give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analytic::Observable;
use crate::error::{QrmError, Result};
use crate::experiment::{ExperimentConfig, TimeSeriesBundle};

pub const CSV_HEADER: &str = "tau,s_z,atomic_excitation,photon,n_jc,n_ajc";
pub const CONFIG_PREFIX: &str = "# config ";

/// Shortest round-trip decimal for ordinary magnitudes, exponent form
/// otherwise; zero (of either sign) prints as `0`.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV text: optional `# config {json}` line, header, one row per grid point.
pub fn to_csv_string(bundle: &TimeSeriesBundle, echo_config: bool) -> String {
    let mut out = String::with_capacity(bundle.len() * 100 + 128);
    if echo_config {
        out.push_str(CONFIG_PREFIX);
        out.push_str(&bundle.config.to_json());
        out.push('\n');
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (tau, row) in bundle.tau.iter().zip(&bundle.rows) {
        out.push_str(&format_value(*tau));
        for o in Observable::ALL {
            out.push(',');
            out.push_str(&format_value(row.get(o)));
        }
        out.push('\n');
    }
    out
}

/// Config echoed on the first line of a CSV, if any.
pub fn parse_config_echo(csv: &str) -> Result<Option<ExperimentConfig>> {
    match csv
        .lines()
        .next()
        .and_then(|l| l.strip_prefix(CONFIG_PREFIX))
    {
        Some(json) => ExperimentConfig::from_json(json).map(Some),
        None => Ok(None),
    }
}

/// Parses CSV text written by [`to_csv_string`] into `(tau, rows)`.
pub fn parse_csv(csv: &str) -> Result<(Vec<f64>, Vec<[f64; 5]>)> {
    let bad = |reason: String| QrmError::InvalidConfig {
        field: "csv",
        reason,
    };
    let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
    match lines.next() {
        Some(CSV_HEADER) => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let mut tau = Vec::new();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let values = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", i + 1)))?;
        if values.len() != 6 {
            return Err(bad(format!("row {} has {} fields", i + 1, values.len())));
        }
        tau.push(values[0]);
        rows.push([values[1], values[2], values[3], values[4], values[5]]);
    }
    Ok((tau, rows))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| QrmError::io(path, e))
}

pub fn emit_csv(bundle: &TimeSeriesBundle, path: &Path) -> Result<()> {
    write_file(path, &to_csv_string(bundle, false))
}

pub fn emit_csv_with_config(bundle: &TimeSeriesBundle, path: &Path) -> Result<()> {
    write_file(path, &to_csv_string(bundle, true))
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

/// Tick spacing from {1, 2, 5}·10^k giving roughly `target` intervals.
fn nice_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let frac = raw / mag;
    let nice = if frac <= 1.0 {
        1.0
    } else if frac <= 2.0 {
        2.0
    } else if frac <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 6.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(x: f64) -> String {
    let rounded = (x * 1e9).round() / 1e9;
    format_value(rounded)
}

/// Y range padded by 5%; a flat series gets a unit-wide window around it.
fn y_range(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span < 1e-9 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo - 0.05 * span, hi + 0.05 * span)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn to_svg_string(bundle: &TimeSeriesBundle, column: Observable) -> String {
    let values = bundle.column(column);
    let (x_lo, x_hi) = (0.0, bundle.config.tau_max);
    let (y_lo, y_hi) = y_range(&values);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&format!("{} : {}", column.name(), bundle.config.title()))
    );
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{b}"/></g>"#,
        b = TOP + plot_h,
        r = LEFT + plot_w
    );
    for t in ticks(x_lo, x_hi) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{b5}" stroke="black"/><text x="{x:.2}" y="{bl}" text-anchor="middle">{}</text>"#,
            tick_label(t),
            b = TOP + plot_h,
            b5 = TOP + plot_h + 5.0,
            bl = TOP + plot_h + 20.0
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{l5}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{lt}" y="{yt:.2}" text-anchor="end">{}</text>"#,
            tick_label(t),
            l5 = LEFT - 5.0,
            lt = LEFT - 8.0,
            yt = y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">tau = g t</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{y}" text-anchor="middle" transform="rotate(-90 18 {y})">{}</text>"#,
        column.name(),
        y = TOP + plot_h / 2.0
    );
    s.push_str(r##"<polyline fill="none" stroke="#1f5fbf" stroke-width="1.2" points=""##);
    for (i, (tau, v)) in bundle.tau.iter().zip(&values).enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.3},{:.3}", sx(*tau), sy(*v));
    }
    s.push_str("\"/>\n</svg>\n");
    s
}

pub fn emit_svg(bundle: &TimeSeriesBundle, column: &str, path: &Path) -> Result<()> {
    let which = Observable::parse(column)?;
    write_file(path, &to_svg_string(bundle, which))
}
