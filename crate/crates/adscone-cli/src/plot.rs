//! Minimal static SVG figures.

use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 360.0;
const M: f64 = 40.0;

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Grey-scale heatmap of a `rows × cols` grid, row-major.
pub fn heatmap(title: &str, rows: usize, cols: usize, values: &[f64]) -> String {
    let mut svg = header(title);
    let (lo, hi) = values.iter().filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cw = (W - 2.0 * M) / cols.max(1) as f64;
    let ch = (H - 2.0 * M) / rows.max(1) as f64;
    for r in 0..rows {
        for c in 0..cols {
            let v = values.get(r * cols + c).copied().unwrap_or(f64::NAN);
            let level = if v.is_finite() { (255.0 * (v - lo) / span).round() as u8 } else { 0 };
            let _ = writeln!(
                svg,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({level},{level},{level})\"/>",
                M + c as f64 * cw,
                M + r as f64 * ch,
                cw,
                ch
            );
        }
    }
    let _ = writeln!(
        svg,
        "<text x=\"{M}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">min {lo:.6e}  max {hi:.6e}</text>",
        H - 12.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Line chart of several series against a common abscissa.
pub fn lines(title: &str, x: &[f64], series: &[(&str, &str, Vec<f64>)]) -> String {
    let mut svg = header(title);
    let finite = |v: &&f64| v.is_finite();
    let (x0, x1) = x.iter().filter(finite).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (y0, y1) = series
        .iter()
        .flat_map(|s| s.2.iter())
        .filter(finite)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let sx = if x1 > x0 { (W - 2.0 * M) / (x1 - x0) } else { 1.0 };
    let sy = if y1 > y0 { (H - 2.0 * M) / (y1 - y0) } else { 1.0 };
    let _ = writeln!(
        svg,
        "<rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        W - 2.0 * M,
        H - 2.0 * M
    );
    for (k, (name, color, ys)) in series.iter().enumerate() {
        let pts: Vec<String> = x
            .iter()
            .zip(ys)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| format!("{:.2},{:.2}", M + (a - x0) * sx, H - M - (b - y0) * sy))
            .collect();
        let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>", pts.join(" "));
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>",
            M + 8.0,
            M + 14.0 * (k + 1) as f64,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
