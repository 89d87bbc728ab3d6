//! Minimal SVG 1.1 line and histogram plots.

use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Line,
    /// Bars centred on the x values, width taken from the spacing.
    Bars,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub kind: SeriesKind,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub width: f64,
    pub height: f64,
    pub series: Vec<Series>,
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const MARGIN: f64 = 40.0;

impl Plot {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), width: 640.0, height: 400.0, series: Vec::new() }
    }

    pub fn line(mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series { label: label.into(), kind: SeriesKind::Line, points });
        self
    }

    pub fn bars(mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series { label: label.into(), kind: SeriesKind::Bars, points });
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
        let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        if !(x1 > x0) {
            (x0, x1) = (-1.0, 1.0);
        }
        if !(y1 > 0.0) {
            y1 = 1.0;
        }
        (x0, x1, 0.0, y1 * 1.05)
    }

    pub fn to_svg(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let (w, h) = (self.width, self.height);
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (w - 2.0 * MARGIN);
        let sy = |y: f64| h - MARGIN - (y - y0) / (y1 - y0) * (h - 2.0 * MARGIN);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            w / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<path d="M{:.2} {:.2}H{:.2}M{:.2} {:.2}V{:.2}" stroke="black" fill="none"/>"#,
            MARGIN,
            sy(y0),
            w - MARGIN,
            MARGIN,
            sy(y0),
            sy(y1)
        );
        for (x, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{x:.3}</text>"#,
                sx(x),
                h - MARGIN + 14.0
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            match s.kind {
                SeriesKind::Line => {
                    let mut d = String::new();
                    for (j, &(x, y)) in s.points.iter().enumerate() {
                        let _ = write!(d, "{}{:.2} {:.2}", if j == 0 { "M" } else { "L" }, sx(x), sy(y));
                    }
                    let _ = writeln!(out, r#"<path d="{d}" stroke="{color}" stroke-width="1.5" fill="none"/>"#);
                }
                SeriesKind::Bars => {
                    let width = if s.points.len() > 1 { s.points[1].0 - s.points[0].0 } else { x1 - x0 };
                    for &(x, y) in &s.points {
                        let (l, r) = (sx(x - width / 2.0), sx(x + width / 2.0));
                        let _ = writeln!(
                            out,
                            r#"<rect x="{l:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.35"/>"#,
                            sy(y),
                            (r - l).max(0.0),
                            (sy(y0) - sy(y)).max(0.0)
                        );
                    }
                }
            }
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
                w - MARGIN - 150.0,
                MARGIN + 14.0 * i as f64,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_wellformed_document() {
        let svg = Plot::new("a < b")
            .line("f", vec![(0.0, 0.0), (1.0, 1.0)])
            .bars("h", vec![(0.25, 0.5), (0.75, 0.2)])
            .to_svg();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<rect").count(), 3);
    }
}
