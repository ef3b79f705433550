//! Static SVG renders of masks, partitions and sample covers.
//!
//! Drawings are in cell units with `y` pointing up, matching the bitmap
//! layout. A 3D lattice is drawn through its middle `z` slice.

use std::fmt::Write as _;

use covergeo_core::{GridSet, Lattice};

const TARGET_PIXELS: f64 = 640.0;

struct Canvas {
    w: usize,
    h: usize,
    body: String,
}

impl Canvas {
    fn new(lat: &Lattice) -> Self {
        let d = lat.dims();
        Canvas { w: d[0], h: d[1], body: String::new() }
    }

    fn finish(self, title: &str) -> String {
        let scale = (TARGET_PIXELS / self.w.max(self.h) as f64).max(1.0);
        let mut s = String::new();
        writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {} {}\" shape-rendering=\"crispEdges\">",
            self.w as f64 * scale,
            self.h as f64 * scale,
            self.w,
            self.h
        )
        .unwrap();
        writeln!(s, "<title>{}</title>", escape(title)).unwrap();
        writeln!(s, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>", self.w, self.h).unwrap();
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }

    /// Fills runs of consecutive cells in each row that share a color.
    fn fill_runs(&mut self, lat: &Lattice, z: usize, color: impl Fn(usize) -> Option<String>) {
        for y in 0..self.h {
            let mut x = 0;
            while x < self.w {
                let c = color(lat.index([x, y, z]));
                let mut end = x + 1;
                while end < self.w && color(lat.index([end, y, z])) == c {
                    end += 1;
                }
                if let Some(c) = c {
                    writeln!(
                        self.body,
                        "<rect x=\"{x}\" y=\"{}\" width=\"{}\" height=\"1\" fill=\"{c}\"/>",
                        self.h - 1 - y,
                        end - x
                    )
                    .unwrap();
                }
                x = end;
            }
        }
    }

    /// Draws the cell edges separating members of `set` from non-members.
    fn outline(&mut self, set: &GridSet, z: usize, stroke: &str, width: f64) {
        let lat = set.lattice();
        let inside = |x: i64, y: i64| {
            x >= 0 && y >= 0 && (x as usize) < self.w && (y as usize) < self.h
                && set.contains(lat.index([x as usize, y as usize, z]))
        };
        let mut d = String::new();
        for y in 0..=self.h as i64 {
            for x in 0..=self.w as i64 {
                let top = self.h as i64 - y;
                // Edge below cell (x, y).
                if x < self.w as i64 && inside(x, y) != inside(x, y - 1) {
                    write!(d, "M{x} {top}h1").unwrap();
                }
                // Edge left of cell (x, y).
                if y < self.h as i64 && inside(x, y) != inside(x - 1, y) {
                    write!(d, "M{x} {}v1", top - 1).unwrap();
                }
            }
        }
        if !d.is_empty() {
            writeln!(
                self.body,
                "<path d=\"{d}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>"
            )
            .unwrap();
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn middle_slice(lat: &Lattice) -> usize {
    lat.dims()[2] / 2
}

/// Distinct, stable color per label.
pub fn label_color(id: u32) -> String {
    let hue = (id as f64 * 137.507_764_050_037_85) % 360.0;
    format!("hsl({hue:.1},65%,{}%)", 55 + (id % 3) * 8)
}

/// Color-mapped partition labels, region 0 (outside) left white.
pub fn partition_svg(lat: &Lattice, labels: &[u32], title: &str) -> String {
    let mut c = Canvas::new(lat);
    let z = middle_slice(lat);
    c.fill_runs(lat, z, |i| (labels[i] != 0).then(|| label_color(labels[i])));
    c.finish(title)
}

/// `E` shaded, with the boundaries of `E` and of each overlay drawn on
/// top in turn.
pub fn overlay_svg(e: &GridSet, overlays: &[(&GridSet, &str)], title: &str) -> String {
    let lat = e.lattice();
    let mut c = Canvas::new(lat);
    let z = middle_slice(lat);
    c.fill_runs(lat, z, |i| e.contains(i).then(|| "#d9d9d9".to_string()));
    c.outline(e, z, "#1f4e9c", 0.35);
    for (set, stroke) in overlays {
        c.outline(set, z, stroke, 0.25);
    }
    c.finish(title)
}

/// `E` shaded with a translucent ball of radius `r` around every sample.
/// Coordinates are physical and converted to cells here.
pub fn samples_svg(e: &GridSet, points: &[[f64; 3]], r: f64, title: &str) -> String {
    let lat = e.lattice();
    let mut c = Canvas::new(lat);
    let z = middle_slice(lat);
    c.fill_runs(lat, z, |i| e.contains(i).then(|| "#d9d9d9".to_string()));
    c.outline(e, z, "#1f4e9c", 0.35);
    let (o, h) = (lat.origin(), lat.h());
    let rc = r / h;
    for p in points {
        let x = (p[0] - o[0]) / h;
        let y = c.h as f64 - (p[1] - o[1]) / h;
        writeln!(
            c.body,
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{rc:.3}\" fill=\"#e4572e\" fill-opacity=\"0.12\" stroke=\"#e4572e\" stroke-width=\"0.15\"/>"
        )
        .unwrap();
    }
    for p in points {
        let x = (p[0] - o[0]) / h;
        let y = c.h as f64 - (p[1] - o[1]) / h;
        writeln!(c.body, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"0.4\" fill=\"black\"/>").unwrap();
    }
    c.finish(title)
}
