//! Minimal SVG rendering of profile step functions.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::profile::{ProfileCurve, ProfileError};
use crate::BenchError;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Vertices of the staircase in `(log₂ τ, ρ)` coordinates, running from
/// `τ = 1` to `τ = 2^x_max`.
pub fn step_points(curve: &ProfileCurve, x_max: f64) -> Vec<(f64, f64)> {
    let mut pts = vec![(0.0, curve.rho_at(1.0))];
    let mut level = pts[0].1;
    for (&t, &r) in curve.taus.iter().zip(&curve.rho) {
        if t <= 1.0 {
            continue;
        }
        let x = t.log2();
        pts.push((x, level));
        pts.push((x, r));
        level = r;
    }
    pts.push((x_max, level));
    pts
}

/// Right end of the `log₂ τ` axis: the next power of two above every
/// breakpoint, and at least 1.
pub fn axis_extent(curves: &[ProfileCurve]) -> f64 {
    curves
        .iter()
        .flat_map(|c| c.taus.iter())
        .map(|t| t.log2().ceil())
        .fold(1.0, f64::max)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_profile_svg(curves: &[ProfileCurve], title: &str) -> Result<String, ProfileError> {
    if curves.is_empty() {
        return Err(ProfileError::NoCurves);
    }
    let x_max = axis_extent(curves);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + x / x_max * plot_w;
    let sy = |y: f64| MARGIN_TOP + (1.0 - y) * plot_h;

    let mut s = String::new();
    // Writing into a String cannot fail.
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    let _ = writeln!(s, r##"<g class="axes" stroke="#444" fill="none">"##);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}"/>"#
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="ticks">"#);
    let x_step = (x_max / 10.0).ceil().max(1.0);
    let mut k = 0.0;
    while k <= x_max {
        let x = sx(k);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ccc"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            sy(0.0),
            sy(1.0),
            sy(0.0) + 16.0,
            2f64.powf(k)
        );
        k += x_step;
    }
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let y = sy(v);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#eee"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            sx(x_max),
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">τ (log₂ scale)</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">ρ(τ)</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="curves" fill="none" stroke-width="2">"#);
    for (i, c) in curves.iter().enumerate() {
        let pts: Vec<String> = step_points(c, x_max)
            .into_iter()
            .map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline data-label="{}" stroke="{}" points="{}"/>"#,
            escape(&c.label),
            PALETTE[i % PALETTE.len()],
            pts.join(" ")
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, c) in curves.iter().enumerate() {
        let x = WIDTH - MARGIN_RIGHT + 16.0;
        let y = MARGIN_TOP + 12.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x + 24.0,
            PALETTE[i % PALETTE.len()],
            x + 30.0,
            y + 4.0,
            escape(&c.label)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_profile_svg(
    curves: &[ProfileCurve],
    title: &str,
    path: &Path,
) -> Result<(), BenchError> {
    let doc = render_profile_svg(curves, title)?;
    fs::write(path, doc)?;
    Ok(())
}
