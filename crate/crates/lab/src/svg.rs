//! Heatmaps of scalar fields on the `(x, t)` grid.

use std::fmt::Write;

use pss_core::geolab::Grid2;

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 400.0;
const MARGIN: f64 = 56.0;
/// Cells per axis before the field is subsampled.
const MAX_CELLS: usize = 240;

/// A field with an optional mask (true = hatched) and overlays.
pub struct Heatmap<'a> {
    pub title: &'a str,
    pub xs: &'a [f64],
    pub ts: &'a [f64],
    pub field: &'a Grid2,
    pub mask: Option<&'a [bool]>,
    /// Colour scale is centred here.
    pub center: f64,
    /// Points `(x, t)` drawn as markers.
    pub points: &'a [(f64, f64)],
    /// Polylines through `(x, t)` points.
    pub curves: &'a [Vec<(f64, f64)>],
    pub legend: &'a str,
}

fn color(v: f64, center: f64, scale: f64) -> String {
    if !v.is_finite() {
        return "#808080".into();
    }
    let s = ((v - center) / scale).clamp(-1.0, 1.0);
    let (r, g, b) = if s >= 0.0 {
        (1.0, 1.0 - s, 1.0 - s)
    } else {
        (1.0 + s, 1.0 + s, 1.0)
    };
    let c = |f: f64| (f * 255.0).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(r), c(g), c(b))
}

fn stride(n: usize) -> usize {
    n.div_ceil(MAX_CELLS).max(1)
}

fn span(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = (v[0], v[v.len() - 1]);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

impl Heatmap<'_> {
    pub fn render(&self) -> String {
        let (nt, nx) = (self.field.nt, self.field.nx);
        let (sx, st) = (stride(nx), stride(nt));
        let (cols, rows) = (nx.div_ceil(sx), nt.div_ceil(st));
        let (cw, ch) = (PLOT_W / cols as f64, PLOT_H / rows as f64);
        let (x0, x1) = span(self.xs);
        let (t0, t1) = span(self.ts);
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * PLOT_W;
        let py = |t: f64| MARGIN + PLOT_H - (t - t0) / (t1 - t0) * PLOT_H;
        let masked = |i: usize, j: usize| self.mask.is_some_and(|m| m[i * nx + j]);

        let scale = (0..nt)
            .flat_map(|i| (0..nx).map(move |j| (i, j)))
            .filter(|&(i, j)| !masked(i, j))
            .map(|(i, j)| (self.field.at(i, j) - self.center).abs())
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
            .max(1e-300);

        let mut s = String::new();
        let (w, h) = (PLOT_W + 2.0 * MARGIN, PLOT_H + 2.0 * MARGIN);
        writeln!(s, r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"##).unwrap();
        s.push_str(concat!(
            "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" ",
            "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#ffffff\"/>",
            "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#404040\" stroke-width=\"1.5\"/></pattern></defs>\n"
        ));
        writeln!(s, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##).unwrap();
        writeln!(s, r##"<text x="{MARGIN}" y="{:.1}" font-family="sans-serif" font-size="14">{}</text>"##, MARGIN - 30.0, self.title)
            .unwrap();
        s.push_str("<g shape-rendering=\"crispEdges\">\n");
        for r in 0..rows {
            let i = r * st;
            for c in 0..cols {
                let j = c * sx;
                let fill = if masked(i, j) { "url(#hatch)".to_string() } else { color(self.field.at(i, j), self.center, scale) };
                writeln!(
                    s,
                    r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"##,
                    MARGIN + c as f64 * cw,
                    MARGIN + PLOT_H - (r + 1) as f64 * ch,
                    cw + 0.05,
                    ch + 0.05
                )
                .unwrap();
            }
        }
        s.push_str("</g>\n");
        for curve in self.curves.iter().filter(|c| c.len() > 1) {
            let pts: Vec<String> = curve.iter().map(|&(x, t)| format!("{:.2},{:.2}", px(x), py(t))).collect();
            writeln!(s, r##"<polyline points="{}" fill="none" stroke="#000000" stroke-width="1.5"/>"##, pts.join(" ")).unwrap();
        }
        for &(x, t) in self.points {
            writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#000000"/>"##, px(x), py(t)).unwrap();
        }
        let axis = |s: &mut String, x: f64, y: f64, anchor: &str, text: String| {
            writeln!(s, r##"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{text}</text>"##)
                .unwrap();
        };
        writeln!(s, r##"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="#000000"/>"##).unwrap();
        axis(&mut s, MARGIN, MARGIN + PLOT_H + 16.0, "start", format!("x = {x0:.3}"));
        axis(&mut s, MARGIN + PLOT_W, MARGIN + PLOT_H + 16.0, "end", format!("x = {x1:.3}"));
        axis(&mut s, MARGIN - 6.0, MARGIN + PLOT_H, "end", format!("t = {t0:.3}"));
        axis(&mut s, MARGIN - 6.0, MARGIN + 10.0, "end", format!("t = {t1:.3}"));
        axis(
            &mut s,
            MARGIN + PLOT_W,
            MARGIN - 12.0,
            "end",
            format!("blue {:.3e} .. red {:.3e}; {}", self.center - scale, self.center + scale, self.legend),
        );
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colours_and_hatching() {
        assert_eq!(color(0.0, 0.0, 1.0), "#ffffff");
        assert_eq!(color(1.0, 0.0, 1.0), "#ff0000");
        assert_eq!(color(-5.0, 0.0, 1.0), "#0000ff");
        let g = Grid2::from_fn(3, 4, |i, j| (i + j) as f64);
        let mask = [false, true, false, false, false, false, false, false, false, false, false, true];
        let h = Heatmap {
            title: "W",
            xs: &[0.0, 1.0, 2.0, 3.0],
            ts: &[0.0, 0.5, 1.0],
            field: &g,
            mask: Some(&mask),
            center: 0.0,
            points: &[(1.5, 0.5)],
            curves: &[vec![(1.0, 0.0), (1.5, 1.0)]],
            legend: "dots: zeros",
        };
        let svg = h.render();
        assert_eq!(svg.matches("url(#hatch)").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg, h.render());
    }

    #[test]
    fn large_fields_are_subsampled() {
        let g = Grid2::from_fn(500, 1000, |i, j| (i as f64 - j as f64).sin());
        let xs: Vec<f64> = (0..1000).map(|j| j as f64).collect();
        let ts: Vec<f64> = (0..500).map(|i| i as f64).collect();
        let h = Heatmap { title: "K", xs: &xs, ts: &ts, field: &g, mask: None, center: 0.0, points: &[], curves: &[], legend: "" };
        let cells = h.render().matches("<rect x=").count() - 1;
        assert!(cells <= MAX_CELLS * MAX_CELLS, "{cells}");
    }
}
