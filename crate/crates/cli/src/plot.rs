use std::fmt::Write as _;
use std::path::Path;

use bundlemin_core::analysis::SampledSet;
use bundlemin_core::bundle::SkewSystem;
use serde::Deserialize;

const WIDTH: f64 = 800.0;
const LANE: f64 = 60.0;
const MARGIN: f64 = 40.0;

/// Marked base coordinates taken from earlier report files.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub coordinate: f64,
    pub label: String,
}

#[derive(Deserialize)]
struct Entry {
    coordinate: f64,
    #[serde(default)]
    tag: Option<String>,
    class: serde_json::Value,
}

#[derive(Deserialize)]
struct Exceptional {
    exceptional: Vec<Entry>,
}

fn class_label(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Object(m) => m
            .iter()
            .map(|(k, v)| format!("{k}({v})"))
            .collect::<Vec<_>>()
            .join(","),
        other => other.to_string(),
    }
}

/// Reads the exceptional fibres out of whichever report files exist.
pub fn read_bands(files: &[&Path]) -> anyhow::Result<Vec<Band>> {
    let mut bands = Vec::new();
    for f in files {
        if !f.exists() {
            continue;
        }
        let r: Exceptional = serde_json::from_str(&std::fs::read_to_string(f)?)
            .map_err(|e| anyhow::anyhow!("{}: {e}", f.display()))?;
        for e in r.exceptional {
            let label = format!("{} {}", e.tag.as_deref().unwrap_or("probe"), class_label(&e.class));
            if !bands.iter().any(|b: &Band| (b.coordinate - e.coordinate).abs() < 1e-12) {
                bands.push(Band { coordinate: e.coordinate, label });
            }
        }
    }
    bands.sort_by(|a, b| a.coordinate.total_cmp(&b.coordinate));
    Ok(bands)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Sample drawn with base coordinate across and one lane per fibre edge.
pub fn render(s: &SkewSystem, sample: &SampledSet, bands: &[Band]) -> String {
    let g = s.fibre();
    let lanes = g.edge_count();
    let height = 2.0 * MARGIN + LANE * lanes as f64;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for &c in &sample.coords {
        lo = lo.min(c);
        hi = hi.max(c);
    }
    let span = (hi - lo).max(1e-12);
    let x = |c: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * (c - lo) / span;
    let y = |edge: usize, t: f64| MARGIN + LANE * (edge as f64 + 1.0 - t);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#).unwrap();
    let title = s.construction.as_deref().unwrap_or("custom");
    writeln!(out, r#"<title>{}</title>"#, esc(title)).unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{WIDTH:.0}" height="{height:.0}" fill="white"/>"#).unwrap();
    for e in 0..lanes {
        let top = y(e, 1.0);
        writeln!(
            out,
            r#"<rect x="{:.2}" y="{top:.2}" width="{:.2}" height="{LANE:.2}" fill="none" stroke="gray" stroke-width="0.5"/>"#,
            MARGIN,
            WIDTH - 2.0 * MARGIN
        )
        .unwrap();
        let edge = g.edge(e);
        writeln!(
            out,
            r#"<text x="4" y="{:.2}" font-size="10" font-family="monospace">e{e} {}-{}</text>"#,
            top + LANE / 2.0,
            g.vertex_id(edge.from),
            g.vertex_id(edge.to)
        )
        .unwrap();
    }
    for b in bands {
        let bx = x(b.coordinate);
        let w = (WIDTH - 2.0 * MARGIN) * sample.resolution / span;
        writeln!(
            out,
            r#"<rect x="{:.2}" y="{MARGIN:.2}" width="{:.2}" height="{:.2}" fill="orange" fill-opacity="0.3"/>"#,
            bx - w,
            2.0 * w,
            LANE * lanes as f64
        )
        .unwrap();
        writeln!(out, r#"<text x="{bx:.2}" y="{:.2}" font-size="10" font-family="monospace" text-anchor="middle">{}</text>"#, MARGIN - 6.0, esc(&b.label)).unwrap();
    }
    if s.bundle.is_monodromy() {
        writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="red" stroke-dasharray="4 3"/>"#,
            x(0.0),
            MARGIN,
            height - MARGIN
        )
        .unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="monospace" fill="red">cut</text>"#, x(0.0) + 3.0, height - MARGIN + 12.0).unwrap();
    }
    if sample.is_empty() {
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="16" font-family="monospace" text-anchor="middle" fill="red">empty sample</text>"#, WIDTH / 2.0, height / 2.0).unwrap();
    }
    out.push_str(r#"<g fill="black">"#);
    out.push('\n');
    for (p, &c) in sample.points.iter().zip(&sample.coords) {
        writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="1"/>"#, x(c), y(p.y.edge, p.y.t)).unwrap();
    }
    out.push_str("</g>\n");
    writeln!(out, r#"<text x="{MARGIN:.2}" y="{:.2}" font-size="10" font-family="monospace">{lo:.4}</text>"#, height - 8.0).unwrap();
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="10" font-family="monospace" text-anchor="end">{hi:.4}</text>"#, WIDTH - MARGIN, height - 8.0).unwrap();
    out.push_str("</svg>\n");
    out
}
