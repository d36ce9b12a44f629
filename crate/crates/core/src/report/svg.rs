//! Minimal static SVG charts: box plots and labelled scatter plots.

use std::fmt::Write;

use super::num::fmt_g9;
use crate::analysis::{LanguageSummary, Scatter};

const W: f64 = 720.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 90.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn coord(x: f64) -> String {
    format!("{x:.2}")
}

/// Linear axis over `[lo, hi]` padded by 5% and mapped onto a pixel span.
struct Axis {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, from: f64, to: f64) -> Self {
        let (lo, hi) = if lo == hi { (lo - 1.0, hi + 1.0) } else { (lo, hi) };
        let pad = (hi - lo) * 0.05;
        Self { lo: lo - pad, hi: hi + pad, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64).collect()
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn y_axis(out: &mut String, axis: &Axis, label: &str) {
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        H - BOTTOM
    );
    for t in axis.ticks(5) {
        let y = coord(axis.map(t));
        let _ = writeln!(out, r#"<line x1="{}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="black"/>"#, LEFT - 4.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            LEFT - 6.0,
            fmt_sig(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        escape(label)
    );
}

fn fmt_sig(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// One box per language in input order. Languages without quartiles are
/// drawn as a median tick only.
pub fn boxplot_svg(summaries: &[LanguageSummary], title: &str, y_label: &str) -> String {
    let mut out = String::new();
    open(&mut out, title);
    let values: Vec<f64> = summaries
        .iter()
        .flat_map(|s| [Some(s.median), s.whisker_low, s.whisker_high])
        .flatten()
        .collect();
    if values.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let axis = Axis::new(lo, hi, H - BOTTOM, TOP);
    y_axis(&mut out, &axis, y_label);
    let slot = (W - LEFT - RIGHT) / summaries.len() as f64;
    let half = (slot * 0.3).min(24.0);
    for (i, s) in summaries.iter().enumerate() {
        let cx = LEFT + slot * (i as f64 + 0.5);
        let (x0, x1) = (coord(cx - half), coord(cx + half));
        let _ = writeln!(out, r#"<g class="box" data-language="{}">"#, escape(&s.language));
        if let (Some(q1), Some(q3), Some(wl), Some(wh)) = (s.q1, s.q3, s.whisker_low, s.whisker_high) {
            let _ = writeln!(
                out,
                r#"<line x1="{c}" y1="{}" x2="{c}" y2="{}" stroke="black"/>"#,
                coord(axis.map(wl)),
                coord(axis.map(q1)),
                c = coord(cx)
            );
            let _ = writeln!(
                out,
                r#"<line x1="{c}" y1="{}" x2="{c}" y2="{}" stroke="black"/>"#,
                coord(axis.map(q3)),
                coord(axis.map(wh)),
                c = coord(cx)
            );
            for w in [wl, wh] {
                let y = coord(axis.map(w));
                let _ = writeln!(
                    out,
                    r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="black"/>"#,
                    coord(cx - half / 2.0),
                    coord(cx + half / 2.0)
                );
            }
            let top = axis.map(q3);
            let _ = writeln!(
                out,
                r##"<rect x="{x0}" y="{}" width="{}" height="{}" fill="#9ecae1" stroke="black"/>"##,
                coord(top),
                coord(2.0 * half),
                coord(axis.map(q1) - top)
            );
        }
        let y = coord(axis.map(s.median));
        let _ = writeln!(out, r#"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="black" stroke-width="2"/>"#);
        let _ = writeln!(
            out,
            r#"<text transform="translate({} {}) rotate(45)">{}</text>"#,
            coord(cx - 4.0),
            coord(H - BOTTOM + 12.0),
            escape(&s.language)
        );
        let _ = writeln!(out, "<title>{}: median {}</title>", escape(&s.language), fmt_g9(s.median));
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn scatter_svg(scatter: &Scatter, title: &str, y_label: &str) -> String {
    let mut out = String::new();
    open(&mut out, title);
    if scatter.points.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let xs: Vec<f64> = scatter.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = scatter.points.iter().map(|p| p.y).collect();
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let xa = Axis::new(min(&xs), max(&xs), LEFT, W - RIGHT);
    let ya = Axis::new(min(&ys), max(&ys), H - BOTTOM, TOP);
    y_axis(&mut out, &ya, y_label);
    let base = H - BOTTOM;
    let _ = writeln!(out, r#"<line x1="{LEFT}" y1="{base}" x2="{}" y2="{base}" stroke="black"/>"#, W - RIGHT);
    for t in xa.ticks(5) {
        let x = coord(xa.map(t));
        let _ = writeln!(out, r#"<line x1="{x}" y1="{base}" x2="{x}" y2="{}" stroke="black"/>"#, base + 4.0);
        let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{}</text>"#, base + 16.0, fmt_sig(t));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        base + 40.0,
        escape(&scatter.attribute)
    );
    for p in &scatter.points {
        let (x, y) = (coord(xa.map(p.x)), coord(ya.map(p.y)));
        let _ = writeln!(
            out,
            r##"<g class="point" data-language="{l}"><circle cx="{x}" cy="{y}" r="4" fill="#3182bd"/><text x="{x}" y="{y}" dx="6" dy="-6">{l}</text></g>"##,
            l = escape(&p.language)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ScatterPoint;

    fn summary(lang: &str, m: f64, full: bool) -> LanguageSummary {
        LanguageSummary {
            language: lang.into(),
            n_files: 5,
            median: m,
            q1: full.then_some(m - 1.0),
            q3: full.then_some(m + 1.0),
            whisker_low: full.then_some(m - 2.0),
            whisker_high: full.then_some(m + 2.0),
            n_outliers_removed: 0,
        }
    }

    #[test]
    fn boxplot_has_one_group_per_language() {
        let svg = boxplot_svg(&[summary("C", 3.0, true), summary("R&D", 5.0, false)], "t", "ppl");
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches(r#"class="box""#).count(), 2);
        assert_eq!(svg.matches("<rect x=").count(), 1);
        assert!(svg.contains("R&amp;D"));
    }

    #[test]
    fn scatter_points() {
        let sc = Scatter {
            attribute: "release_year".into(),
            points: vec![
                ScatterPoint { language: "C".into(), x: 1972.0, y: 3.0 },
                ScatterPoint { language: "Go".into(), x: 2009.0, y: 2.0 },
            ],
            missing: vec![],
        };
        let svg = scatter_svg(&sc, "t", "ppl");
        assert_eq!(svg.matches("<circle").count(), 2);
    }
}
