//! Minimal static SVG charts: hourly profile lines and labeled bars.
//!
//! No external renderer — each function lays out a self-contained SVG
//! document that any browser or image viewer can open. Charts are meant as
//! quick visual summaries next to the JSON/CSV artifacts, not as a plotting
//! library.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 48.0;

/// Distinguishable series colors, cycled when there are more series.
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finite_extent(series: &[(String, Vec<f64>)]) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, ys) in series {
        for &y in ys {
            if !y.is_finite() {
                return Err(Error::Config("chart values must be finite".into()));
            }
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    if lo > hi {
        return Err(Error::Config("chart needs at least one point".into()));
    }
    if (hi - lo).abs() < 1e-12 {
        // flat series: pad so the line sits mid-chart
        lo -= 1.0;
        hi += 1.0;
    }
    Ok((lo, hi))
}

fn svg_header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{x}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{t}</text>\n",
        x = WIDTH / 2.0,
        t = esc(title),
    )
}

/// Multi-series line chart over a shared x index (e.g. hour of day).
///
/// Writes one SVG file; series are drawn in declaration order with a legend.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(String, Vec<f64>)],
    path: impl AsRef<Path>,
) -> Result<()> {
    if series.is_empty() || series.iter().any(|(_, ys)| ys.len() < 2) {
        return Err(Error::Config(
            "line chart needs ≥1 series with ≥2 points".into(),
        ));
    }
    let n = series[0].1.len().max(2);
    let (lo, hi) = finite_extent(series)?;
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |i: usize| MARGIN_L + plot_w * i as f64 / (n - 1) as f64;
    let sy = |y: f64| MARGIN_T + plot_h * (1.0 - (y - lo) / (hi - lo));

    let mut out = svg_header(title);
    // axes and gridlines with tick labels
    for k in 0..=4 {
        let y = lo + (hi - lo) * k as f64 / 4.0;
        let py = sy(y);
        let _ = writeln!(
            out,
            "<line x1=\"{MARGIN_L}\" y1=\"{py:.1}\" x2=\"{x2}\" y2=\"{py:.1}\" stroke=\"#ddd\"/>\
             <text x=\"{tx}\" y=\"{ty:.1}\" text-anchor=\"end\">{y:.4}</text>",
            x2 = WIDTH - MARGIN_R,
            tx = MARGIN_L - 6.0,
            ty = py + 4.0,
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\">{l}</text>",
        x = MARGIN_L + plot_w / 2.0,
        y = HEIGHT - 12.0,
        l = esc(x_label),
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{y}\" transform=\"rotate(-90 16 {y})\" text-anchor=\"middle\">{l}</text>",
        y = MARGIN_T + plot_h / 2.0,
        l = esc(y_label),
    );
    for (si, (label, ys)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let pts: Vec<String> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| format!("{:.1},{:.1}", sx(i), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" "),
        );
        let ly = MARGIN_T + 14.0 * si as f64;
        let _ = writeln!(
            out,
            "<line x1=\"{x1}\" y1=\"{ly:.1}\" x2=\"{x2}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"3\"/>\
             <text x=\"{tx}\" y=\"{ty:.1}\">{l}</text>",
            x1 = WIDTH - MARGIN_R - 130.0,
            x2 = WIDTH - MARGIN_R - 110.0,
            tx = WIDTH - MARGIN_R - 104.0,
            ty = ly + 4.0,
            l = esc(label),
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path.as_ref(), out)
        .map_err(|e| Error::io(path.as_ref().display().to_string(), e))
}

/// Labeled vertical bar chart (e.g. error per method/nrd configuration).
pub fn bar_chart(
    title: &str,
    y_label: &str,
    bars: &[(String, f64)],
    path: impl AsRef<Path>,
) -> Result<()> {
    if bars.is_empty() {
        return Err(Error::Config("bar chart needs ≥1 bar".into()));
    }
    let series = vec![("".to_string(), bars.iter().map(|b| b.1.max(0.0)).collect())];
    let (_, hi) = finite_extent(&series)?;
    let hi = hi.max(1e-12);
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let bw = plot_w / bars.len() as f64;

    let mut out = svg_header(title);
    for k in 0..=4 {
        let y = hi * k as f64 / 4.0;
        let py = MARGIN_T + plot_h * (1.0 - y / hi);
        let _ = writeln!(
            out,
            "<line x1=\"{MARGIN_L}\" y1=\"{py:.1}\" x2=\"{x2}\" y2=\"{py:.1}\" stroke=\"#ddd\"/>\
             <text x=\"{tx}\" y=\"{ty:.1}\" text-anchor=\"end\">{y:.4}</text>",
            x2 = WIDTH - MARGIN_R,
            tx = MARGIN_L - 6.0,
            ty = py + 4.0,
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{y}\" transform=\"rotate(-90 16 {y})\" text-anchor=\"middle\">{l}</text>",
        y = MARGIN_T + plot_h / 2.0,
        l = esc(y_label),
    );
    for (i, (label, v)) in bars.iter().enumerate() {
        let h = plot_h * v.max(0.0) / hi;
        let x = MARGIN_L + bw * i as f64 + bw * 0.15;
        let y = MARGIN_T + plot_h - h;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{w:.1}\" height=\"{h:.1}\" fill=\"{color}\"/>\
             <text x=\"{cx:.1}\" y=\"{ly}\" text-anchor=\"middle\">{l}</text>",
            w = bw * 0.7,
            cx = MARGIN_L + bw * (i as f64 + 0.5),
            ly = HEIGHT - 28.0,
            l = esc(label),
        );
    }
    out.push_str("</svg>\n");
    std::fs::write(path.as_ref(), out)
        .map_err(|e| Error::io(path.as_ref().display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn line_chart_writes_one_polyline_per_series() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("c.svg");
        let series = vec![
            ("a".to_string(), vec![0.0, 1.0, 0.5]),
            ("b".to_string(), vec![1.0, 0.0, 0.25]),
        ];
        line_chart("demo", "hour", "value", &series, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.matches("<polyline").count(), 2);
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn bar_chart_writes_one_rect_per_bar() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("b.svg");
        bar_chart(
            "errors",
            "fraction",
            &[("x".into(), 0.02), ("y".into(), 0.05)],
            &p,
        )
        .unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        // background rect plus two bars
        assert_eq!(text.matches("<rect").count(), 3);
    }

    #[test]
    fn flat_series_still_renders() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("f.svg");
        line_chart(
            "flat",
            "hour",
            "value",
            &[("z".to_string(), vec![2.0, 2.0, 2.0])],
            &p,
        )
        .unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().contains("polyline"));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("n.svg");
        let r = line_chart(
            "bad",
            "hour",
            "value",
            &[("z".to_string(), vec![1.0, f64::NAN])],
            &p,
        );
        assert!(r.is_err());
        assert!(!p.exists());
    }
}
