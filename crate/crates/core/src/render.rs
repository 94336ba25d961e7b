//! SVG chord diagrams: one circle per component, left to right, endpoints
//! evenly spaced clockwise from the top, each arrow an arrowed curve from
//! tail to head with its sign written at the middle.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fmt::Write;

use thiserror::Error;

use crate::gauss::{EndpointRef, GaussDiagram};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenderOptions {
    width: u32,
    height: u32,
    pub show_labels: bool,
    pub highlight: BTreeSet<u32>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("image size must be positive, got {0}x{1}")]
pub struct SizeError(u32, u32);

impl RenderOptions {
    pub fn new(width: u32, height: u32) -> Result<Self, SizeError> {
        if width == 0 || height == 0 {
            return Err(SizeError(width, height));
        }
        Ok(RenderOptions { width, height, show_labels: true, highlight: BTreeSet::new() })
    }

    pub fn size(&self) -> (u32, u32) {
        (self.width, self.height)
    }
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { width: 640, height: 320, show_labels: true, highlight: BTreeSet::new() }
    }
}

struct Layout {
    centers: Vec<(f64, f64)>,
    radius: f64,
}

impl Layout {
    fn new(d: &GaussDiagram, opts: &RenderOptions) -> Self {
        let k = d.num_components().max(1) as f64;
        let (w, h) = (opts.width as f64, opts.height as f64);
        let cell = w / k;
        let radius = (cell.min(h) * 0.34).max(1.0);
        let centers = (0..d.num_components()).map(|i| (cell * (i as f64 + 0.5), h / 2.0)).collect();
        Layout { centers, radius }
    }

    fn point(&self, d: &GaussDiagram, r: EndpointRef, scale: f64) -> (f64, f64) {
        let n = d.components()[r.component].len() as f64;
        let theta = TAU * r.position as f64 / n;
        let (cx, cy) = self.centers[r.component];
        (cx + self.radius * scale * theta.sin(), cy - self.radius * scale * theta.cos())
    }
}

pub fn render_svg(d: &GaussDiagram, opts: &RenderOptions) -> String {
    let layout = Layout::new(d, opts);
    let mut s = String::new();
    let (w, h) = opts.size();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    s.push_str(concat!(
        "<defs>",
        r#"<marker id="head" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse">"#,
        r#"<path d="M 0 0 L 10 5 L 0 10 z" fill="context-stroke"/></marker>"#,
        "</defs>\n"
    ));
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for &(cx, cy) in &layout.centers {
        let _ = writeln!(
            s,
            r#"<circle class="component" cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="black" stroke-width="2"/>"#,
            layout.radius
        );
    }
    for a in d.arrows() {
        let (x1, y1) = layout.point(d, a.tail, 1.0);
        let (x2, y2) = layout.point(d, a.head, 1.0);
        let (qx, qy) = if a.tail.component == a.head.component {
            // bow towards the centre, less for chords that are nearly diameters
            let (cx, cy) = layout.centers[a.tail.component];
            let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            (mx + (cx - mx) * 0.6, my + (cy - my) * 0.6)
        } else {
            let (mx, my) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            let lift = if a.tail.component < a.head.component { -0.25 } else { 0.25 };
            (mx, my + lift * layout.radius)
        };
        let colour = if opts.highlight.contains(&a.label) { "crimson" } else { "steelblue" };
        let _ = writeln!(
            s,
            r#"<path class="arrow" data-label="{}" d="M {x1:.2} {y1:.2} Q {qx:.2} {qy:.2} {x2:.2} {y2:.2}" fill="none" stroke="{colour}" stroke-width="1.5" marker-end="url(#head)"/>"#,
            a.label
        );
        let (tx, ty) = (0.25 * x1 + 0.5 * qx + 0.25 * x2, 0.25 * y1 + 0.5 * qy + 0.25 * y2);
        let _ = writeln!(
            s,
            r#"<text class="sign" x="{tx:.2}" y="{ty:.2}" font-size="14" text-anchor="middle" fill="{colour}">{}</text>"#,
            a.sign.symbol()
        );
        for end in [a.tail, a.head] {
            let (ex, ey) = layout.point(d, end, 1.0);
            let _ = writeln!(s, r#"<circle class="endpoint" cx="{ex:.2}" cy="{ey:.2}" r="3" fill="black"/>"#);
            if opts.show_labels {
                let (lx, ly) = layout.point(d, end, 1.13);
                let _ = writeln!(
                    s,
                    r#"<text class="label" x="{lx:.2}" y="{ly:.2}" font-size="11" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                    a.label
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
