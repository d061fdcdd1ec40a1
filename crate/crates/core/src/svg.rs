//! Static SVG plots of planar domains, points and paths.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

/// Width and height of the viewport in pixels.
pub const SIZE: f64 = 800.0;
/// Margin on each side as a fraction of the viewport.
pub const MARGIN: f64 = 0.05;

/// Affine map from a square world window onto the viewport (y up).
struct View {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl View {
    fn fit(lo: [f64; 2], hi: [f64; 2]) -> Self {
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let inner = SIZE * (1.0 - 2.0 * MARGIN);
        let scale = inner / span;
        // Center the window on the box.
        let cx = 0.5 * (lo[0] + hi[0]);
        let cy = 0.5 * (lo[1] + hi[1]);
        Self {
            x0: cx - 0.5 * span,
            y0: cy - 0.5 * span,
            scale,
        }
    }

    fn px(&self, p: &[f64]) -> (f64, f64) {
        let pad = SIZE * MARGIN;
        (
            pad + (p[0] - self.x0) * self.scale,
            SIZE - pad - (p[1] - self.y0) * self.scale,
        )
    }

    /// World-space corners of the whole viewport.
    fn world_box(&self) -> ([f64; 2], [f64; 2]) {
        let pad = MARGIN * SIZE / self.scale;
        let span = SIZE / self.scale;
        let lo = [self.x0 - pad, self.y0 - pad];
        ([lo[0], lo[1]], [lo[0] + span, lo[1] + span])
    }
}

fn extend(lo: &mut [f64; 2], hi: &mut [f64; 2], p: &[f64]) {
    for k in 0..2 {
        lo[k] = lo[k].min(p[k]);
        hi[k] = hi[k].max(p[k]);
    }
}

/// Renders the boundary of a planar domain (circle, line or puncture
/// crosses), the given points as dots and an optional path as a polyline.
pub fn render(d: &Domain, points: &[Point], path: Option<&[Point]>) -> Result<String> {
    if d.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "plots need a planar domain, got dimension {}",
            d.dim()
        )));
    }
    for p in points.iter().chain(path.unwrap_or(&[])) {
        d.check_dim(p)?;
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points.iter().chain(path.unwrap_or(&[])) {
        extend(&mut lo, &mut hi, p.coords());
    }
    match d {
        Domain::Ball { center, radius } => {
            let c = center.coords();
            extend(&mut lo, &mut hi, &[c[0] - radius, c[1] - radius]);
            extend(&mut lo, &mut hi, &[c[0] + radius, c[1] + radius]);
        }
        Domain::HalfSpace {
            unit_normal,
            offset,
        } => {
            let foot: Vec<f64> = unit_normal.coords().iter().map(|v| v * offset).collect();
            extend(&mut lo, &mut hi, &foot);
        }
        Domain::Punctured { punctures } => {
            for p in punctures {
                extend(&mut lo, &mut hi, p.coords());
            }
        }
    }
    if !lo[0].is_finite() {
        lo = [-1.0, -1.0];
        hi = [1.0, 1.0];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if span < 1e-9 {
        lo = [lo[0] - 1.0, lo[1] - 1.0];
        hi = [hi[0] + 1.0, hi[1] + 1.0];
    } else if !d.is_bounded() {
        let pad = 0.1 * span;
        lo = [lo[0] - pad, lo[1] - pad];
        hi = [hi[0] + pad, hi[1] + pad];
    }
    let view = View::fit(lo, hi);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    match d {
        Domain::Ball { center, radius } => {
            let (cx, cy) = view.px(center.coords());
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="black" stroke-width="1.5"/>"#,
                radius * view.scale
            );
        }
        Domain::HalfSpace {
            unit_normal,
            offset,
        } => {
            // The boundary line, clipped generously to the viewport.
            let nu = unit_normal.coords();
            let foot = [nu[0] * offset, nu[1] * offset];
            let dir = [-nu[1], nu[0]];
            let (wlo, whi) = view.world_box();
            let reach = 2.0 * ((whi[0] - wlo[0]) + (whi[1] - wlo[1]))
                + (foot[0] - wlo[0]).abs()
                + (foot[1] - wlo[1]).abs();
            let a = view.px(&[foot[0] - reach * dir[0], foot[1] - reach * dir[1]]);
            let b = view.px(&[foot[0] + reach * dir[0], foot[1] + reach * dir[1]]);
            let _ = writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="1.5"/>"#,
                a.0, a.1, b.0, b.1
            );
        }
        Domain::Punctured { punctures } => {
            for p in punctures {
                let (x, y) = view.px(p.coords());
                let r = 6.0;
                let _ = writeln!(
                    s,
                    r#"<path d="M {:.3} {:.3} L {:.3} {:.3} M {:.3} {:.3} L {:.3} {:.3}" stroke="black" stroke-width="1.5"/>"#,
                    x - r, y - r, x + r, y + r, x - r, y + r, x + r, y - r
                );
            }
        }
    }
    if let Some(path) = path {
        let pts: Vec<String> = path
            .iter()
            .map(|p| {
                let (x, y) = view.px(p.coords());
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
            pts.join(" ")
        );
    }
    for p in points {
        let (x, y) = view.px(p.coords());
        let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="crimson"/>"#);
    }
    s.push_str("</svg>\n");
    Ok(s)
}
