//! SVG rendering of CSV files written by a run. Plots only read serialized
//! data; nothing here recomputes physics.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    Line,
    LogLog,
    /// Rows are the `y` columns, columns are samples of `x`.
    Heatmap,
}

/// Overlay read from another CSV: vertical lines at `x`, or dots at `(x, y)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Markers {
    pub csv: String,
    pub x: String,
    #[serde(default)]
    pub y: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub csv: String,
    pub x: String,
    /// Series to draw; for heat maps an empty list means every column but `x`.
    pub y: Vec<String>,
    pub kind: PlotKind,
    pub x_label: String,
    pub y_label: String,
    #[serde(default)]
    pub log_y: bool,
    #[serde(default)]
    pub markers: Vec<Markers>,
    /// Power laws `y ~ x^s` drawn through the first point of the first series.
    #[serde(default)]
    pub reference_slopes: Vec<f64>,
}

impl PlotSpec {
    pub fn line(title: &str, csv: &str, x: &str, y: &[&str], x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            csv: csv.into(),
            x: x.into(),
            y: y.iter().map(|s| s.to_string()).collect(),
            kind: PlotKind::Line,
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_y: false,
            markers: Vec::new(),
            reference_slopes: Vec::new(),
        }
    }

    pub fn svg_name(&self) -> String {
        let stem = Path::new(&self.csv).file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
        format!("{stem}.svg")
    }
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn read(path: &Path) -> Result<Self, CliError> {
        if !path.is_file() {
            return Err(CliError::Usage(format!("plot input {} does not exist", path.display())));
        }
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|f| f.trim().parse::<f64>().unwrap_or(f64::NAN))
                .collect();
            rows.push(row);
        }
        Ok(Self { headers, rows })
    }

    fn column(&self, name: &str, file: &str) -> Result<Vec<f64>, CliError> {
        let k = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Usage(format!("{file} has no column `{name}` (columns: {:?})", self.headers)))?;
        Ok(self.rows.iter().map(|r| r.get(k).copied().unwrap_or(f64::NAN)).collect())
    }
}

/// Linear or log10 axis mapping data to pixels.
#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
    px0: f64,
    px1: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool, px0: f64, px1: f64) -> Option<Self> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return None;
        }
        if hi - lo < 1e-12 {
            let pad = if lo.abs() > 0.0 { 0.1 * lo.abs() } else { 1.0 };
            lo -= pad;
            hi += pad;
        }
        Some(Self { lo, hi, log, px0, px1 })
    }

    fn map(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some(self.map_raw(v))
    }

    /// Maps an already-transformed coordinate.
    fn map_raw(&self, v: f64) -> f64 {
        self.px0 + (v - self.lo) / (self.hi - self.lo) * (self.px1 - self.px0)
    }

    /// Tick positions (transformed) and labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.floor() as i32, self.hi.ceil() as i32);
            let stride = ((b - a) / 6).max(1);
            let mantissas: &[f64] = if b - a <= 2 { &[1.0, 2.0, 5.0] } else { &[1.0] };
            let mut out = Vec::new();
            for k in (a..=b).step_by(stride as usize) {
                for m in mantissas {
                    let v = m.log10() + k as f64;
                    if v >= self.lo - 1e-12 && v <= self.hi + 1e-12 {
                        out.push((v, format!("{m}e{k}")));
                    }
                }
            }
            return out;
        }
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let mut out = Vec::new();
        let mut v = (self.lo / step).ceil() * step;
        while v <= self.hi + 1e-9 * span {
            out.push((v, tick_label(v)));
            v += step;
        }
        out
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    } else {
        format!("{v:.1e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Viridis-like ramp through five anchors.
fn color(u: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let u = if u.is_finite() { u.clamp(0.0, 1.0) } else { 0.0 };
    let x = u * 4.0;
    let k = (x.floor() as usize).min(3);
    let f = x - k as f64;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn frame(svg: &mut String, spec: &PlotSpec, xa: &Axis, ya: &Axis) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for (v, text) in xa.ticks() {
        let px = xa.map_raw(v);
        let _ = writeln!(svg, r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            escape(&text)
        );
    }
    for (v, text) in ya.ticks() {
        let py = ya.map_raw(v);
        let _ = writeln!(svg, r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            escape(&text)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 15.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{0}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        0.5 * (y0 + y1),
        escape(&spec.y_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        escape(&spec.title)
    );
}

fn polyline(xa: &Axis, ya: &Axis, xs: &[f64], ys: &[f64], stroke: &str, dash: &str) -> String {
    let mut pts = String::new();
    for (x, y) in xs.iter().zip(ys) {
        if let (Some(px), Some(py)) = (xa.map(*x), ya.map(*y)) {
            let _ = write!(pts, "{px:.2},{py:.2} ");
        }
    }
    format!(
        r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{dash} clip-path="url(#plot)"/>"#,
        pts.trim_end()
    )
}

fn render_lines(spec: &PlotSpec, table: &Table, dir: &Path) -> Result<String, CliError> {
    if spec.y.is_empty() {
        return Err(CliError::Usage("a line plot needs at least one y column".into()));
    }
    let xs = table.column(&spec.x, &spec.csv)?;
    let series: Vec<Vec<f64>> = spec.y.iter().map(|c| table.column(c, &spec.csv)).collect::<Result<_, _>>()?;
    let mut overlays = Vec::new();
    for m in &spec.markers {
        let t = Table::read(&dir.join(&m.csv))?;
        let ys = match &m.y {
            Some(c) => Some(t.column(c, &m.csv)?),
            None => None,
        };
        overlays.push((t.column(&m.x, &m.csv)?, ys));
    }
    let log_x = spec.kind == PlotKind::LogLog;
    let log_y = log_x || spec.log_y;
    let bad = || CliError::Usage(format!("{} holds no plottable values", spec.csv));
    let xa = Axis::new(xs.iter().copied(), log_x, LEFT, WIDTH - RIGHT).ok_or_else(bad)?;
    let ya = Axis::new(series.iter().flatten().copied(), log_y, HEIGHT - BOTTOM, TOP).ok_or_else(bad)?;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    frame(&mut svg, spec, &xa, &ya);
    for (mx, my) in &overlays {
        for (k, px) in mx.iter().map(|v| xa.map(*v)).enumerate() {
            let Some(px) = px else { continue };
            match my {
                None => {
                    let _ = writeln!(
                        svg,
                        r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{}" stroke="#888888" stroke-dasharray="4 3"/>"##,
                        HEIGHT - BOTTOM
                    );
                }
                Some(ys) => {
                    if let Some(py) = ya.map(ys[k]) {
                        let _ = writeln!(
                            svg,
                            r##"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="none" stroke="#d62728" stroke-width="1.5"/>"##
                        );
                    }
                }
            }
        }
    }
    let mut legend: Vec<(String, String, Option<&str>)> = Vec::new();
    for (k, ys) in series.iter().enumerate() {
        let c = PALETTE[k % PALETTE.len()];
        svg.push_str(&polyline(&xa, &ya, &xs, ys, c, ""));
        svg.push('\n');
        if log_x && xs.len() <= 64 {
            for (x, y) in xs.iter().zip(ys) {
                if let (Some(px), Some(py)) = (xa.map(*x), ya.map(*y)) {
                    let _ = writeln!(svg, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{c}"/>"#);
                }
            }
        }
        legend.push((spec.y[k].clone(), c.to_string(), None));
    }
    // Reference power laws through the first finite point.
    if let Some((x0, y0)) = xs
        .iter()
        .zip(&series[0])
        .find(|(x, y)| x.is_finite() && y.is_finite() && (!log_x || **x > 0.0) && (!log_y || **y > 0.0))
    {
        let dashes = ["6 4", "2 3", "8 3 2 3"];
        for (k, s) in spec.reference_slopes.iter().enumerate() {
            let ref_ys: Vec<f64> = xs.iter().map(|x| y0 * (x / x0).powf(*s)).collect();
            let dash = format!(r#" stroke-dasharray="{}""#, dashes[k % dashes.len()]);
            svg.push_str(&polyline(&xa, &ya, &xs, &ref_ys, "black", &dash));
            svg.push('\n');
            legend.push((format!("slope {s}"), "black".into(), Some(dashes[k % dashes.len()])));
        }
    }
    for (k, (name, c, dashed)) in legend.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * k as f64;
        let x = WIDTH - RIGHT + 10.0;
        let dash = dashed.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{c}" stroke-width="2"{dash}/><text x="{}" y="{}" font-size="12">{}</text>"#,
            x + 20.0,
            x + 25.0,
            y + 4.0,
            escape(name)
        );
    }
    Ok(svg)
}

fn render_heatmap(spec: &PlotSpec, table: &Table) -> Result<String, CliError> {
    let xs = table.column(&spec.x, &spec.csv)?;
    let names: Vec<String> = if spec.y.is_empty() {
        table.headers.iter().filter(|h| **h != spec.x).cloned().collect()
    } else {
        spec.y.clone()
    };
    if names.is_empty() || xs.len() < 2 {
        return Err(CliError::Usage(format!("{} has nothing to draw as a heat map", spec.csv)));
    }
    let rows: Vec<Vec<f64>> = names.iter().map(|c| table.column(c, &spec.csv)).collect::<Result<_, _>>()?;
    let (lo, hi) = rows
        .iter()
        .flatten()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let bad = || CliError::Usage(format!("{} holds no plottable values", spec.csv));
    let xa = Axis::new(xs.iter().copied(), false, LEFT, WIDTH - RIGHT).ok_or_else(bad)?;
    let n = names.len();
    let ya = Axis {
        lo: -0.5,
        hi: n as f64 - 0.5,
        log: false,
        px0: HEIGHT - BOTTOM,
        px1: TOP,
    };
    let mut svg = String::from("<g shape-rendering=\"crispEdges\">\n");
    let cell_h = (HEIGHT - TOP - BOTTOM) / n as f64;
    for (r, row) in rows.iter().enumerate() {
        let top = ya.map_raw(r as f64 + 0.5);
        for k in 0..xs.len() {
            let left = if k == 0 { xs[0] } else { 0.5 * (xs[k - 1] + xs[k]) };
            let right = if k + 1 == xs.len() { xs[k] } else { 0.5 * (xs[k] + xs[k + 1]) };
            let (pl, pr) = (xa.map_raw(left), xa.map_raw(right));
            let _ = writeln!(
                svg,
                r#"<rect x="{pl:.2}" y="{top:.2}" width="{:.2}" height="{cell_h:.2}" fill="{}"/>"#,
                (pr - pl).max(0.1),
                color((row[k] - lo) / span)
            );
        }
    }
    svg.push_str("</g>\n");
    frame(&mut svg, spec, &xa, &ya);
    let bar_x = WIDTH - RIGHT + 20.0;
    let steps = 50;
    let bar_h = (HEIGHT - TOP - BOTTOM) / steps as f64;
    for s in 0..steps {
        let u = s as f64 / (steps - 1) as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{bar_x}" y="{:.2}" width="20" height="{:.2}" fill="{}"/>"#,
            HEIGHT - BOTTOM - (s + 1) as f64 * bar_h,
            bar_h + 0.5,
            color(u)
        );
    }
    for (v, y) in [(lo, HEIGHT - BOTTOM), (hi, TOP)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" font-size="12">{}</text>"#,
            bar_x + 25.0,
            y + 4.0,
            escape(&tick_label(v))
        );
    }
    Ok(svg)
}

/// Renders `spec` from CSV files in `dir` and writes `dir/<csv stem>.svg`.
pub fn emit_plot(dir: &Path, spec: &PlotSpec) -> Result<PathBuf, CliError> {
    let table = Table::read(&dir.join(&spec.csv))?;
    let body = match spec.kind {
        PlotKind::Line | PlotKind::LogLog => render_lines(spec, &table, dir)?,
        PlotKind::Heatmap => render_heatmap(spec, &table)?,
    };
    let svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n"
    );
    let path = dir.join(spec.svg_name());
    fs::write(&path, svg)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_cover_the_range() {
        let a = Axis::new([0.0, 9.7].into_iter(), false, 0.0, 100.0).unwrap();
        let t = a.ticks();
        assert_eq!(t.first().unwrap().1, "0");
        assert!(t.len() >= 4 && t.len() <= 11);
        let l = Axis::new([1e-3, 2.0].into_iter(), true, 0.0, 100.0).unwrap();
        assert_eq!(l.ticks().iter().map(|t| t.1.as_str()).collect::<Vec<_>>(), ["1e-3", "1e-2", "1e-1", "1e0"]);
        let short = Axis::new([0.01, 0.3].into_iter(), true, 0.0, 100.0).unwrap();
        assert_eq!(short.ticks().len(), 5);
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(f64::NAN), "#440154");
    }
}
