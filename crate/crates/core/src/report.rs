//! CSV and SVG output.

use std::fmt::Write as _;
use std::io::Write;

use crate::analysis::{normalize, FringeFit};
use crate::engine::FringeScan;
use crate::error::Result;

/// Long-format scan table: `offset_nm,species,signal,stderr`.
pub fn write_scan_csv<W: Write>(out: W, scans: &[FringeScan]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["offset_nm", "species", "signal", "stderr"])?;
    for s in scans {
        for i in 0..s.len() {
            w.write_record([
                (s.offsets[i] * 1e9).to_string(),
                s.species.clone(),
                s.signal[i].to_string(),
                s.stderr[i].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_fit_csv<W: Write>(out: W, fits: &[(String, FringeFit)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "species", "mean", "amplitude", "shift_nm", "visibility", "contrast", "rms_residual", "converged",
    ])?;
    for (name, f) in fits {
        w.write_record([
            name.clone(),
            f.mean.to_string(),
            f.amplitude.to_string(),
            (f.shift * 1e9).to_string(),
            f.visibility.to_string(),
            f.contrast.to_string(),
            f.rms_residual.to_string(),
            f.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One pairwise enrichment result.
#[derive(Debug, Clone, PartialEq)]
pub struct EnrichmentRow {
    pub target: String,
    pub competitor: String,
    pub eta: f64,
    /// m.
    pub offset: f64,
}

pub fn write_enrichment_csv<W: Write>(out: W, rows: &[EnrichmentRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["target", "competitor", "eta", "offset_nm"])?;
    for r in rows {
        w.write_record([
            r.target.clone(),
            r.competitor.clone(),
            r.eta.to_string(),
            (r.offset * 1e9).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(U, η)` curve from the voltage search.
pub fn write_curve_csv<W: Write>(out: W, curve: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["voltage_V", "eta"])?;
    for (u, e) in curve {
        w.write_record([u.to_string(), e.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A named polyline for [`svg_plot`].
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Minimal line plot with axes, tick labels at the range ends and a legend.
pub fn svg_plot(series: &[Series], x_label: &str, y_label: &str) -> String {
    let (w, h, m) = (640.0, 400.0, 60.0);
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let label = |v: f64| format!("{v:.4}");
    let _ = writeln!(s, r#"<text x="{m}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, h - m + 18.0, label(x0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, w - m, h - m + 18.0, label(x1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#, m - 6.0, h - m, label(y0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#, m - 6.0, m + 4.0, label(y1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#, w / 2.0, h - 15.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let d: Vec<String> = ser
            .points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| format!("{}{:.2} {:.2}", if i == 0 { 'M' } else { 'L' }, sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, d.join(" "));
        let ly = m + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-size="12" fill="{color}" text-anchor="end">{}</text>"#,
            w - m,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Normalized signal versus offset, one line per scan.
pub fn scan_svg(scans: &[FringeScan]) -> Result<String> {
    let series = scans
        .iter()
        .map(|s| {
            let n = normalize(s)?;
            Ok(Series {
                name: s.species.clone(),
                points: n.offsets.iter().zip(&n.signal).map(|(&x, &y)| (x * 1e9, y)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(svg_plot(&series, "third-grating offset (nm)", "normalized signal"))
}
