//! CSV column access and a small static SVG line chart. The chart is a pure
//! function of the parsed numbers, so identical input files give identical
//! SVG bytes.

use std::fmt::Write as _;

use crate::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 16.0;
const MARGIN_BOTTOM: f64 = 48.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Splits CSV text into a header row and data rows. Only the columns a chart
/// actually uses are parsed as numbers, so text columns elsewhere are fine.
pub fn read_table(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Input("empty CSV: no header row".into()))?;
    let headers: Vec<String> = header.split(',').map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if fields.len() != headers.len() {
            return Err(CliError::Input(format!(
                "line {}: expected {} fields, found {}",
                idx + 2,
                headers.len(),
                fields.len()
            )));
        }
        rows.push(fields);
    }
    Ok((headers, rows))
}

pub fn column_index(headers: &[String], name: &str) -> Result<usize, CliError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Input(format!("unknown column `{name}`")))
}

pub fn numeric_column(
    rows: &[Vec<String>],
    index: usize,
    name: &str,
) -> Result<Vec<f64>, CliError> {
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            row[index].parse::<f64>().map_err(|e| {
                CliError::Input(format!(
                    "line {}: column `{name}`: bad number `{}`: {e}",
                    i + 2,
                    row[index]
                ))
            })
        })
        .collect()
}

/// Data range over the finite values only, padded when degenerate so the
/// scale below never divides by zero.
fn finite_range<'a>(values: impl Iterator<Item = &'a f64>) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v.is_finite() {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if lo > hi {
        return None;
    }
    if lo == hi {
        let pad = 0.5f64.max(lo.abs() * 0.05);
        lo -= pad;
        hi += pad;
    }
    Some((lo, hi))
}

/// Largest of 1, 2, 5 times a power of ten that still yields at least
/// `target` intervals over `range`.
fn nice_step(range: f64, target: usize) -> f64 {
    let raw = range / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn tick_values(lo: f64, hi: f64) -> (f64, Vec<f64>) {
    let step = nice_step(hi - lo, 5);
    let mut ticks = Vec::new();
    let mut k = (lo / step).ceil() as i64;
    while (k as f64) * step <= hi + step * 1e-9 {
        ticks.push(k as f64 * step);
        k += 1;
    }
    (step, ticks)
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 {
        0
    } else {
        (-step.log10().floor() as i64).clamp(0, 10) as usize
    };
    format!("{v:.decimals$}")
}

struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Renders one polyline per series over shared x values. Non-finite points
/// are dropped from their polyline; a series with no finite points at all is
/// an input error.
pub fn render_chart(
    xs: &[f64],
    series: &[(String, Vec<f64>)],
    x_label: &str,
) -> Result<String, CliError> {
    let (xlo, xhi) = finite_range(xs.iter())
        .ok_or_else(|| CliError::Input("x column has no finite values".into()))?;
    let (ylo, yhi) = finite_range(series.iter().flat_map(|(_, ys)| ys.iter()))
        .ok_or_else(|| CliError::Input("y columns have no finite values".into()))?;
    for (name, ys) in series {
        if !ys.iter().any(|v| v.is_finite()) {
            return Err(CliError::Input(format!(
                "column `{name}` has no finite values"
            )));
        }
    }

    let sx = Scale {
        lo: xlo,
        hi: xhi,
        px_lo: MARGIN_LEFT,
        px_hi: WIDTH - MARGIN_RIGHT,
    };
    // The pixel axis points down, so the y scale is inverted.
    let sy = Scale {
        lo: ylo,
        hi: yhi,
        px_lo: HEIGHT - MARGIN_BOTTOM,
        px_hi: MARGIN_TOP,
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    let x_axis_y = HEIGHT - MARGIN_BOTTOM;
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN_LEFT}" y1="{x_axis_y}" x2="{:.2}" y2="{x_axis_y}" stroke="black"/>"#,
        WIDTH - MARGIN_RIGHT
    );
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{x_axis_y}" stroke="black"/>"#
    );

    let (xstep, xticks) = tick_values(xlo, xhi);
    for t in &xticks {
        let px = sx.map(*t);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{x_axis_y}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            x_axis_y + 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="middle">{}</text>"#,
            x_axis_y + 18.0,
            tick_label(*t, xstep)
        );
    }
    let (ystep, yticks) = tick_values(ylo, yhi);
    for t in &yticks {
        let py = sy.map(*t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/>"#,
            MARGIN_LEFT - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 8.0,
            py + 4.0,
            tick_label(*t, ystep)
        );
    }

    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="middle">{x_label}</text>"#,
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        HEIGHT - 12.0
    );

    for (i, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (x, y) in xs.iter().zip(ys) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", sx.map(*x), sy.map(*y));
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.trim_end()
        );
        let ly = MARGIN_TOP + 16.0 + 16.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT - 150.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="1.5"/>"#,
            ly - 4.0,
            lx + 20.0,
            ly - 4.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" font-family="monospace" font-size="12">{name}</text>"#,
            lx + 26.0
        );
    }

    let _ = writeln!(s, "</svg>");
    Ok(s)
}
