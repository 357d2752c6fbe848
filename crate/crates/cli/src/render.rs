//! SVG heatmap of `b̃(k_fin, f_fin)` with an optional scatter overlay.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::args::RenderArgs;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
pub struct HeatCell {
    pub k_fin: u64,
    pub f_fin: f64,
    pub b_tilde: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Point {
    pub k_fin: u64,
    pub f_fin: f64,
}

/// Reads every row of a CSV with a header into `T`; errors carry the line.
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Vec<T>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    reader
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, err: csv::Error) -> CliError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    let message = err.to_string();
    match err.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        _ => CliError::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        },
    }
}

const CELL_W: f64 = 8.0;
const CELL_H: f64 = 8.0;
const MARGIN: f64 = 40.0;

/// Linear two-sided map: negative to blue, zero to white, positive to red.
pub fn colour(value: f64, scale: f64) -> String {
    if !value.is_finite() {
        return "#ffffff".to_string();
    }
    let t = if scale > 0.0 {
        (value / scale).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let fade = (255.0 * (1.0 - t.abs())).round() as u8;
    if t >= 0.0 {
        format!("#ff{fade:02x}{fade:02x}")
    } else {
        format!("#{fade:02x}{fade:02x}ff")
    }
}

fn sorted_unique(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// Position of `x` on an axis whose cell centres sit at `levels`, measured in
/// cells; linear between neighbouring centres. `None` outside the axis.
fn axis_position(levels: &[f64], x: f64) -> Option<f64> {
    let first = *levels.first()?;
    let last = *levels.last()?;
    if x < first || x > last {
        return None;
    }
    if levels.len() == 1 {
        return Some(0.5);
    }
    let i = levels
        .partition_point(|&l| l <= x)
        .clamp(1, levels.len() - 1);
    let (lo, hi) = (levels[i - 1], levels[i]);
    Some(i as f64 - 0.5 + (x - lo) / (hi - lo))
}

pub fn heatmap_svg(cells: &[HeatCell], points: &[Point], scale: Option<f64>) -> String {
    let fs = sorted_unique(cells.iter().map(|c| c.f_fin).collect());
    let ks = sorted_unique(cells.iter().map(|c| c.k_fin as f64).collect());
    let scale = scale.unwrap_or_else(|| {
        cells
            .iter()
            .map(|c| c.b_tilde.abs())
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    });
    let width = fs.len() as f64 * CELL_W;
    let height = ks.len() as f64 * CELL_H;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        width + 2.0 * MARGIN,
        height + 2.0 * MARGIN,
        width + 2.0 * MARGIN,
        height + 2.0 * MARGIN
    );
    let _ = writeln!(svg, r#"<g transform="translate({MARGIN},{MARGIN})">"#);
    for c in cells {
        let col = fs.partition_point(|&f| f < c.f_fin);
        let row = ks.partition_point(|&k| k < c.k_fin as f64);
        // k grows upwards
        let y = height - (row + 1) as f64 * CELL_H;
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{CELL_W}" height="{CELL_H}" fill="{}"/>"#,
            col as f64 * CELL_W,
            y,
            colour(c.b_tilde, scale)
        );
    }
    for p in points {
        let (Some(px), Some(py)) = (
            axis_position(&fs, p.f_fin),
            axis_position(&ks, p.k_fin as f64),
        ) else {
            continue;
        };
        let _ = writeln!(
            svg,
            r#"<circle cx="{}" cy="{}" r="1.5" fill="black" fill-opacity="0.3"/>"#,
            px * CELL_W,
            height - py * CELL_H
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{width}" height="{height}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">f_fin</text>"#,
        width / 2.0,
        height + 25.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="-25" y="{}" font-size="10" text-anchor="middle" transform="rotate(-90 -25 {})">k_fin</text>"#,
        height / 2.0,
        height / 2.0
    );
    svg.push_str("</g>\n</svg>\n");
    svg
}

pub fn render(args: &RenderArgs) -> CliResult<()> {
    if let Some(s) = args.scale {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Usage("--scale must be positive".into()));
        }
    }
    let cells: Vec<HeatCell> = read_csv(&args.input)?;
    let points: Vec<Point> = match &args.scatter {
        Some(path) => read_csv(path)?,
        None => Vec::new(),
    };
    let svg = heatmap_svg(&cells, &points, args.scale);
    std::fs::write(&args.out, svg).map_err(|e| CliError::io(&args.out, e))
}
