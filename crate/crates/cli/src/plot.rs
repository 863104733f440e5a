//! Minimal SVG line plots of CSV tables.

use std::fmt::Write as _;

use crate::table::CsvTable;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub log_x: bool,
    pub log_y: bool,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle { log_x: false, log_y: true, width: 640.0, height: 420.0 }
    }
}

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// The first column of each table is the abscissa, every other column a
/// series. Rows with NaN or, on a log axis, non-positive values are dropped
/// with a warning.
pub fn collect_series(tables: &[(String, CsvTable)], style: &PlotStyle) -> (Vec<Series>, String, String) {
    let mut out = Vec::new();
    let mut x_label = String::new();
    let mut y_labels: Vec<String> = Vec::new();
    for (source, table) in tables {
        let Some((x_col, y_cols)) = table.columns.split_first() else { continue };
        if x_label.is_empty() {
            x_label = x_col.clone();
        }
        for (c, name) in y_cols.iter().enumerate() {
            if !y_labels.contains(name) {
                y_labels.push(name.clone());
            }
            let mut points = Vec::new();
            let mut dropped = 0usize;
            for row in &table.rows {
                let (x, y) = (row.first().copied().unwrap_or(f64::NAN), row.get(c + 1).copied().unwrap_or(f64::NAN));
                let usable = x.is_finite() && y.is_finite() && (!style.log_x || x > 0.0) && (!style.log_y || y > 0.0);
                if usable {
                    points.push((x, y));
                } else {
                    dropped += 1;
                }
            }
            if dropped > 0 {
                log::warn!("{source}: skipped {dropped} unplottable rows in column `{name}`");
            }
            let name = if tables.len() > 1 { format!("{source}: {name}") } else { name.clone() };
            out.push(Series { name, points });
        }
    }
    (out, x_label, y_labels.join(", "))
}

/// Affine map from (possibly log-scaled) data coordinates to pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub log_x: bool,
    pub log_y: bool,
    pub width: f64,
    pub height: f64,
}

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

impl Frame {
    pub fn fit(series: &[Series], style: &PlotStyle) -> Self {
        let tx = |v: f64| if style.log_x { v.log10() } else { v };
        let ty = |v: f64| if style.log_y { v.log10() } else { v };
        let pts = || series.iter().flat_map(|s| s.points.iter());
        Frame {
            x_range: axis_range(pts().map(|p| tx(p.0))),
            y_range: axis_range(pts().map(|p| ty(p.1))),
            log_x: style.log_x,
            log_y: style.log_y,
            width: style.width,
            height: style.height,
        }
    }

    pub fn to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        let x = if self.log_x { x.log10() } else { x };
        let y = if self.log_y { y.log10() } else { y };
        let fx = (x - self.x_range.0) / (self.x_range.1 - self.x_range.0);
        let fy = (y - self.y_range.0) / (self.y_range.1 - self.y_range.0);
        let pw = self.width - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = self.height - MARGIN_TOP - MARGIN_BOTTOM;
        (MARGIN_LEFT + fx * pw, MARGIN_TOP + (1.0 - fy) * ph)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else {
        format!("{v:.3}")
    }
}

pub fn render_svg(series: &[Series], x_label: &str, y_label: &str, style: &PlotStyle) -> String {
    let f = Frame::fit(series, style);
    let (w, h) = (style.width, style.height);
    let (x0, y1) = (MARGIN_LEFT, h - MARGIN_BOTTOM);
    let (x1, y0) = (w - MARGIN_RIGHT, MARGIN_TOP);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<path d="M{x0} {y0} L{x0} {y1} L{x1} {y1}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let fx = i as f64 / 4.0;
        let vx = f.x_range.0 + fx * (f.x_range.1 - f.x_range.0);
        let vy = f.y_range.0 + fx * (f.y_range.1 - f.y_range.0);
        let px = x0 + fx * (x1 - x0);
        let py = y1 - fx * (y1 - y0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#, y1 + 16.0, tick_label(vx, f.log_x));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{py:.2}" font-size="11" text-anchor="end">{}</text>"#, x0 - 6.0, tick_label(vy, f.log_y));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, h - 10.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="13" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if !ser.points.is_empty() {
            let pts: Vec<String> = ser
                .points
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = f.to_pixel(x, y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        }
        let ly = y0 + 14.0 * (i as f64 + 1.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{ly:.2}" font-size="11" fill="{color}" text-anchor="end">{}</text>"#, x1 - 4.0, escape(&ser.name));
    }
    s.push_str("</svg>\n");
    s
}

pub fn plot_tables(tables: &[(String, CsvTable)], style: &PlotStyle) -> String {
    let (series, xl, yl) = collect_series(tables, style);
    render_svg(&series, &xl, &yl, style)
}
