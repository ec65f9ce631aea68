//! Plain SVG polylines.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub stroke: &'static str,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub lines: Vec<Polyline>,
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Plot {
    pub fn add(&mut self, points: Vec<[f64; 2]>, stroke: &'static str) {
        let points: Vec<[f64; 2]> = points
            .into_iter()
            .filter(|p| p[0].is_finite() && p[1].is_finite())
            .collect();
        if points.len() >= 2 {
            self.lines.push(Polyline { points, stroke });
        }
    }

    /// Square canvas with equal scaling on both axes and y pointing up.
    pub fn render(&self) -> String {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in self.lines.iter().flat_map(|l| &l.points) {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            (lo, hi) = ([0.0; 2], [1.0; 2]);
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
        );
        let _ = writeln!(out, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for l in &self.lines {
            let pts: Vec<String> = l
                .points
                .iter()
                .map(|p| {
                    let x = MARGIN + (p[0] - lo[0]) * scale;
                    let y = SIZE - MARGIN - (p[1] - lo[1]) * scale;
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
                l.stroke,
                pts.join(" ")
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_polyline_per_line() {
        let mut p = Plot {
            title: "a < b".into(),
            ..Default::default()
        };
        p.add(vec![[0.0, 0.0], [1.0, 1.0]], "black");
        p.add(vec![[0.0, 1.0]], "black");
        p.add(vec![[0.0, 1.0], [f64::NAN, 0.0], [1.0, 0.0]], "red");
        let s = p.render();
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("a &lt; b"));
        assert!(s.contains("20.00,580.00 580.00,20.00"));
    }
}
