//! Brute-force references for the unit-ball suprema, independent of the
//! optimizer in the library: a dense scan of the boundary sphere followed by
//! pattern-search zooms around the best scan point.

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|x − y| / (|x − p||p − y|)`.
pub fn cassinian_quotient(x: &[f64], y: &[f64], p: &[f64]) -> f64 {
    dist(x, y) / (dist(x, p) * dist(p, y))
}

/// Angle at `z` between the rays to `x` and `y`.
pub fn angle(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let u: Vec<f64> = x.iter().zip(z).map(|(a, b)| a - b).collect();
    let v: Vec<f64> = y.iter().zip(z).map(|(a, b)| a - b).collect();
    let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    // |u × v| via Lagrange's identity keeps small angles accurate.
    let cross2 = (norm(&u) * norm(&v)).powi(2) - dot * dot;
    cross2.max(0.0).sqrt().atan2(dot)
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let l = norm(&v);
    v.into_iter().map(|c| c / l).collect()
}

/// `m` nearly uniform points of the unit circle (n = 2) or sphere (n = 3).
pub fn sphere_points(n: usize, m: usize) -> Vec<Vec<f64>> {
    match n {
        2 => (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci lattice.
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - (2 * k + 1) as f64 / m as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), r * t.sin(), z]
                })
                .collect()
        }
        _ => panic!("scan oracle supports n = 2, 3"),
    }
}

/// Tangent basis of the unit sphere at `p`.
fn tangent_basis(p: &[f64]) -> Vec<Vec<f64>> {
    match p.len() {
        2 => vec![vec![-p[1], p[0]]],
        _ => {
            let a = if p[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let d: f64 = a.iter().zip(p).map(|(x, y)| x * y).sum();
            let e1 = unit(a.iter().zip(p).map(|(x, y)| x - d * y).collect());
            let e2 = vec![
                p[1] * e1[2] - p[2] * e1[1],
                p[2] * e1[0] - p[0] * e1[2],
                p[0] * e1[1] - p[1] * e1[0],
            ];
            vec![e1, e2]
        }
    }
}

/// Maximum of `f` over the unit sphere: a scan of `m` points, then zooms
/// on a local grid (21 steps per tangent direction) that shrinks fourfold
/// each round.
pub fn sphere_sup<F: Fn(&[f64]) -> f64>(n: usize, m: usize, f: F) -> (f64, Vec<f64>) {
    let mut best = (f64::NEG_INFINITY, vec![]);
    for p in sphere_points(n, m) {
        let v = f(&p);
        if v > best.0 {
            best = (v, p);
        }
    }
    let mut step = if n == 2 { 2.0 * PI / m as f64 } else { 4.0 * (PI / m as f64).sqrt() };
    for _ in 0..14 {
        let center = best.1.clone();
        let basis = tangent_basis(&center);
        let offsets: Vec<f64> = (-10..=10).map(|k| k as f64 * step / 10.0).collect();
        let mut try_point = |coeffs: &[f64]| {
            let mut q = center.clone();
            for (e, c) in basis.iter().zip(coeffs) {
                q.iter_mut().zip(e).for_each(|(qi, ei)| *qi += c * ei);
            }
            let q = unit(q);
            let v = f(&q);
            if v > best.0 {
                best = (v, q);
            }
        };
        if n == 2 {
            for a in &offsets {
                try_point(&[*a]);
            }
        } else {
            for a in &offsets {
                for b in &offsets {
                    try_point(&[*a, *b]);
                }
            }
        }
        step /= 4.0;
    }
    best
}

/// `c_𝔹(x, y)` by boundary scan.
pub fn cassinian_ball_scan(x: &[f64], y: &[f64], m: usize) -> f64 {
    if x == y {
        return 0.0;
    }
    sphere_sup(x.len(), m, |p| cassinian_quotient(x, y, p)).0
}

/// `v_𝔹(x, y)` by boundary scan.
pub fn visual_angle_ball_scan(x: &[f64], y: &[f64], m: usize) -> f64 {
    if x == y {
        return 0.0;
    }
    sphere_sup(x.len(), m, |p| angle(x, y, p)).0
}

/// `sinh(ρ_𝔹/2)` for the unit ball.
pub fn sinh_half_rho_ball(x: &[f64], y: &[f64]) -> f64 {
    dist(x, y) / ((1.0 - norm(x).powi(2)) * (1.0 - norm(y).powi(2))).sqrt()
}

/// Hyperbolic distance of the upper half-plane from the `cosh` formula.
pub fn rho_half_plane(x: &[f64], y: &[f64]) -> f64 {
    (1.0 + dist(x, y).powi(2) / (2.0 * x[1] * y[1])).acosh()
}

/// Single-puncture inner metric and Cassinian metric.
pub fn puncture_closed_form(x: &[f64], y: &[f64], p: &[f64]) -> f64 {
    dist(x, y) / (dist(x, p) * dist(y, p))
}

/// `c̃_𝔹(0, x)`.
pub fn inner_ball_from_center(r: f64) -> f64 {
    r / (1.0 - r)
}
