//! Self-contained SVG line chart of distance series.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pipeline::{DistanceSeries, Metric};
use crate::report::write_text;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#17becf",
];

/// Renders one polyline per metric; the y-axis spans `[0, 1.05·max]`.
pub fn render_svg(series: &DistanceSeries, metrics: &[Metric]) -> Result<String> {
    if metrics.is_empty() {
        return Err(Error::InvalidParameter("no metrics to plot".into()));
    }
    if series.is_empty() {
        return Err(Error::InvalidParameter("empty distance series".into()));
    }
    let curves = metrics
        .iter()
        .map(|&m| {
            series
                .values(m)
                .map(|v| (m, v))
                .ok_or_else(|| Error::InvalidParameter(format!("metric `{m}` was not computed")))
        })
        .collect::<Result<Vec<_>>>()?;
    let max = curves
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(0.0, f64::max);
    let y_top = if max > 0.0 { 1.05 * max } else { 1.0 };
    let n = series.len();
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |i: usize| {
        if n == 1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * i as f64 / (n - 1) as f64
        }
    };
    let y_of = |v: f64| TOP + plot_h * (1.0 - v / y_top);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<g id="axes" stroke="black" fill="none"><line x1="{LEFT}" y1="{0}" x2="{1}" y2="{0}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{0}"/></g>"#,
        TOP + plot_h,
        LEFT + plot_w
    )
    .unwrap();
    for t in 0..=4 {
        let v = y_top * t as f64 / 4.0;
        let y = y_of(v);
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            format_tick(v)
        )
        .unwrap();
    }
    let label_every = n.div_ceil(20).max(1);
    for (i, row) in series.rows.iter().enumerate() {
        if i % label_every == 0 {
            writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                x_of(i),
                TOP + plot_h + 16.0,
                xml_escape(&format!("{}-{}", row.site_a, row.site_b))
            )
            .unwrap();
        }
    }
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">pair</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();
    for (c, (m, v)) in curves.iter().enumerate() {
        let color = COLORS[c % COLORS.len()];
        let pts: Vec<String> = v
            .iter()
            .enumerate()
            .map(|(i, y)| format!("{:.2},{:.2}", x_of(i), y_of(*y)))
            .collect();
        writeln!(
            s,
            r#"<polyline data-metric="{m}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
        let ly = TOP + 10.0 + 18.0 * c as f64;
        let lx = WIDTH - RIGHT + 15.0;
        writeln!(
            s,
            r#"<g class="legend"><line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{m}</text></g>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_svg_plot(series: &DistanceSeries, metrics: &[Metric], path: &Path) -> Result<()> {
    write_text(path, &render_svg(series, metrics)?)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-2..1e4).contains(&v.abs()) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
