//! Minimization of a scalar objective over a sphere or a hyperplane patch.
//!
//! Two stages: a dense scan of a one-parameter slice (a great circle or a
//! line) refined by golden-section search around the best local minima,
//! then projected coordinate descent from many starts over the whole
//! surface. The better of the two answers wins.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{dist, dot, norm, random_in_unit_ball, random_unit};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone)]
pub(crate) enum Surface {
    Sphere {
        center: Vec<f64>,
        radius: f64,
    },
    Plane {
        normal: Vec<f64>,
        offset: f64,
        patch_center: Vec<f64>,
        patch_radius: f64,
        tangent: Vec<Vec<f64>>,
    },
}

impl Surface {
    fn dim(&self) -> usize {
        match self {
            Surface::Sphere { center, .. } => center.len(),
            Surface::Plane { normal, .. } => normal.len(),
        }
    }

    /// Characteristic length: sphere radius or patch radius.
    fn scale(&self) -> f64 {
        match self {
            Surface::Sphere { radius, .. } => *radius,
            Surface::Plane { patch_radius, .. } => *patch_radius,
        }
    }

    fn project(&self, q: &mut [f64]) {
        match self {
            Surface::Sphere { center, radius } => {
                let len = dist(q, center);
                if len < 1e-300 {
                    q.copy_from_slice(center);
                    q[0] += radius;
                    return;
                }
                for (qi, ci) in q.iter_mut().zip(center) {
                    *qi = ci + radius * (*qi - ci) / len;
                }
            }
            Surface::Plane {
                normal,
                offset,
                patch_center,
                patch_radius,
                ..
            } => {
                let h = dot(q, normal) - offset;
                for (qi, ni) in q.iter_mut().zip(normal) {
                    *qi -= h * ni;
                }
                let r = dist(q, patch_center);
                if r > *patch_radius {
                    let t = patch_radius / r;
                    for (qi, ci) in q.iter_mut().zip(patch_center) {
                        *qi = ci + t * (*qi - ci);
                    }
                }
            }
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Surface::Sphere { center, radius } => {
                let u = random_unit(rng, center.len());
                center.iter().zip(&u).map(|(c, ui)| c + radius * ui).collect()
            }
            Surface::Plane {
                patch_center,
                patch_radius,
                tangent,
                ..
            } => {
                let u = random_in_unit_ball(rng, tangent.len());
                let mut p = patch_center.clone();
                for (ui, t) in u.iter().zip(tangent) {
                    for (pk, tk) in p.iter_mut().zip(t) {
                        *pk += patch_radius * ui * tk;
                    }
                }
                p
            }
        }
    }
}

/// A one-parameter curve on the surface used for the fast scan.
#[derive(Debug, Clone)]
pub(crate) enum Slice {
    /// `center + radius·(cos t·e1 + sin t·e2)`, t ∈ [0, 2π).
    Circle {
        center: Vec<f64>,
        radius: f64,
        e1: Vec<f64>,
        e2: Vec<f64>,
    },
    /// `base + t·dir`, t ∈ [−half_width, half_width].
    Line {
        base: Vec<f64>,
        dir: Vec<f64>,
        half_width: f64,
    },
}

impl Slice {
    fn point_at(&self, t: f64, out: &mut [f64]) {
        match self {
            Slice::Circle {
                center,
                radius,
                e1,
                e2,
            } => {
                let (s, c) = t.sin_cos();
                for k in 0..out.len() {
                    out[k] = center[k] + radius * (c * e1[k] + s * e2[k]);
                }
            }
            Slice::Line { base, dir, .. } => {
                for k in 0..out.len() {
                    out[k] = base[k] + t * dir[k];
                }
            }
        }
    }

    fn param_range(&self) -> (f64, f64, bool) {
        match self {
            Slice::Circle { .. } => (0.0, std::f64::consts::TAU, true),
            Slice::Line { half_width, .. } => (-half_width, *half_width, false),
        }
    }

    /// Arclength between consecutive scan points.
    pub(crate) fn mesh(&self, samples: usize) -> f64 {
        match self {
            Slice::Circle { radius, .. } => radius * std::f64::consts::TAU / samples as f64,
            Slice::Line { half_width, .. } => 2.0 * half_width / (samples - 1).max(1) as f64,
        }
    }
}

/// Orthonormal pair spanning a 2-plane that contains `u` and `v` (given
/// relative to the plane's origin). When `u`, `v` are collinear (or zero)
/// the plane is spanned by their line and the first standard basis vector
/// not parallel to it.
pub(crate) fn plane_basis(u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = u.len();
    let scale = norm(u).max(norm(v));
    let first = if norm(u) >= norm(v) { u } else { v };
    let other = if norm(u) >= norm(v) { v } else { u };
    let e1: Vec<f64> = if norm(first) > 1e-300 {
        let l = norm(first);
        first.iter().map(|x| x / l).collect()
    } else {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    };
    let mut w: Vec<f64> = other.to_vec();
    let c = dot(&w, &e1);
    for (wi, ei) in w.iter_mut().zip(&e1) {
        *wi -= c * ei;
    }
    if scale > 0.0 && norm(&w) > 1e-12 * scale {
        let l = norm(&w);
        return (e1, w.into_iter().map(|x| x / l).collect());
    }
    for k in 0..n {
        let mut w = vec![0.0; n];
        w[k] = 1.0;
        let c = dot(&w, &e1);
        for (wi, ei) in w.iter_mut().zip(&e1) {
            *wi -= c * ei;
        }
        let l = norm(&w);
        if l > 1e-6 {
            return (e1, w.into_iter().map(|x| x / l).collect());
        }
    }
    unreachable!("dimension is at least 2")
}

#[derive(Debug, Clone)]
pub(crate) struct SolverSettings {
    pub slice_samples: usize,
    pub refine_candidates: usize,
    pub golden_tolerance: f64,
    pub multistart: usize,
    pub descent_tolerance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub(crate) struct Optimum {
    pub point: Vec<f64>,
    pub value: f64,
    /// Best objective value among the raw slice samples.
    pub sampled_best: f64,
    /// Arclength spacing of the slice scan.
    pub mesh: f64,
    pub evaluations: usize,
}

/// Strictly better, with lexicographic tie-break on the point.
fn better(a_val: f64, a_pt: &[f64], b_val: f64, b_pt: &[f64]) -> bool {
    if a_val != b_val {
        return a_val < b_val;
    }
    a_pt.partial_cmp(b_pt) == Some(std::cmp::Ordering::Less)
}

pub(crate) fn minimize<F>(surface: &Surface, slice: &Slice, objective: F, s: &SolverSettings) -> Optimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = surface.dim();
    let mut evals = 0usize;
    let mut f = |p: &[f64]| {
        evals += 1;
        objective(p)
    };

    // Stage 1: slice scan and golden-section refinement.
    let m = s.slice_samples.max(3);
    let (lo, hi, periodic) = slice.param_range();
    let ts: Vec<f64> = if periodic {
        (0..m).map(|i| lo + (hi - lo) * i as f64 / m as f64).collect()
    } else {
        (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
    };
    let mut buf = vec![0.0; n];
    let vals: Vec<f64> = match slice {
        Slice::Circle {
            center,
            radius,
            e1,
            e2,
        } => {
            // Walk the circle by repeated rotation instead of m sin/cos calls.
            let (sd, cd) = (ts[1] - ts[0]).sin_cos();
            let (mut c, mut s) = (1.0f64, 0.0f64);
            (0..m)
                .map(|i| {
                    if i % 64 == 0 {
                        (s, c) = ts[i].sin_cos();
                    }
                    for k in 0..n {
                        buf[k] = center[k] + radius * (c * e1[k] + s * e2[k]);
                    }
                    (c, s) = (c * cd - s * sd, s * cd + c * sd);
                    f(&buf)
                })
                .collect()
        }
        Slice::Line { .. } => ts
            .iter()
            .map(|&t| {
                slice.point_at(t, &mut buf);
                f(&buf)
            })
            .collect(),
    };
    let sampled_best = vals.iter().copied().fold(f64::INFINITY, f64::min);

    let neighbor = |i: usize, left: bool| -> Option<usize> {
        if left {
            if i > 0 {
                Some(i - 1)
            } else if periodic {
                Some(m - 1)
            } else {
                None
            }
        } else if i + 1 < m {
            Some(i + 1)
        } else if periodic {
            Some(0)
        } else {
            None
        }
    };
    let mut minima: Vec<usize> = (0..m)
        .filter(|&i| {
            let l = neighbor(i, true).map_or(true, |j| vals[i] <= vals[j]);
            let r = neighbor(i, false).map_or(true, |j| vals[i] <= vals[j]);
            l && r
        })
        .collect();
    minima.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    minima.truncate(s.refine_candidates.max(1));

    let step_t = ts[1] - ts[0];
    let t_tol = match slice {
        Slice::Circle { .. } => s.golden_tolerance,
        Slice::Line { half_width, .. } => s.golden_tolerance * half_width.max(1.0),
    };
    let mut best_pt = vec![0.0; n];
    slice.point_at(ts[minima[0]], &mut best_pt);
    let mut best_val = vals[minima[0]];
    for &i in &minima {
        let mut a = ts[i] - step_t;
        let mut b = ts[i] + step_t;
        if !periodic {
            a = a.max(lo);
            b = b.min(hi);
        }
        let mut eval_t = |t: f64, buf: &mut Vec<f64>| {
            slice.point_at(t, buf);
            f(buf)
        };
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = eval_t(c, &mut buf);
        let mut fd = eval_t(d, &mut buf);
        while (b - a).abs() > t_tol {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = eval_t(c, &mut buf);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = eval_t(d, &mut buf);
            }
        }
        // Compare the final bracket points and the original sample.
        for t in [c, d, ts[i]] {
            let v = eval_t(t, &mut buf);
            if better(v, &buf, best_val, &best_pt) {
                best_val = v;
                best_pt.copy_from_slice(&buf);
            }
        }
    }

    // Stage 2: multistart projected coordinate descent on the full surface.
    let scale = surface.scale();
    let step0 = match surface {
        Surface::Sphere { radius, .. } => 0.25 * radius,
        Surface::Plane { patch_radius, .. } => 0.1 * patch_radius,
    };
    let min_step = s.descent_tolerance * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut found: Vec<Vec<f64>> = Vec::new();
    let starts = std::iter::once(best_pt.clone())
        .chain((0..s.multistart).map(|_| surface.random_point(&mut rng)))
        .collect::<Vec<_>>();
    let mut q = vec![0.0; n];
    for (k, start) in starts.into_iter().enumerate() {
        let mut p = start;
        surface.project(&mut p);
        let mut v = f(&p);
        // The refined slice optimum starts from a fine step.
        let mut step = if k == 0 { step0 * 1e-4 } else { step0 };
        let mut merged = false;
        while step >= min_step {
            let mut improved = false;
            for axis in 0..n {
                for sign in [1.0, -1.0] {
                    q.copy_from_slice(&p);
                    q[axis] += sign * step;
                    surface.project(&mut q);
                    let fq = f(&q);
                    if fq < v {
                        v = fq;
                        p.copy_from_slice(&q);
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                step *= 0.5;
                if step <= step0 / 16.0 && found.iter().any(|o| dist(o, &p) < 2.0 * step) {
                    merged = true;
                    break;
                }
            }
        }
        if better(v, &p, best_val, &best_pt) {
            best_val = v;
            best_pt.copy_from_slice(&p);
        }
        if !merged {
            found.push(p);
        }
    }

    Optimum {
        point: best_pt,
        value: best_val,
        sampled_best,
        mesh: slice.mesh(m),
        evaluations: evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> SolverSettings {
        SolverSettings {
            slice_samples: 512,
            refine_candidates: 4,
            golden_tolerance: 1e-12,
            multistart: 8,
            descent_tolerance: 1e-12,
            seed: 7,
        }
    }

    #[test]
    fn finds_nearest_point_of_sphere() {
        // Minimize distance to an interior target off the slice plane.
        let surface = Surface::Sphere {
            center: vec![0.0; 3],
            radius: 1.0,
        };
        let slice = Slice::Circle {
            center: vec![0.0; 3],
            radius: 1.0,
            e1: vec![1.0, 0.0, 0.0],
            e2: vec![0.0, 1.0, 0.0],
        };
        let target = [0.0, 0.3, 0.4];
        let opt = minimize(&surface, &slice, |p| dist(p, &target), &settings());
        assert!((opt.value - 0.5).abs() < 1e-9, "{}", opt.value);
        assert!(dist(&opt.point, &[0.0, 0.6, 0.8]) < 1e-6);
    }

    #[test]
    fn line_slice_on_plane() {
        let normal = vec![0.0, 1.0];
        let surface = Surface::Plane {
            normal: normal.clone(),
            offset: 0.0,
            patch_center: vec![0.0, 0.0],
            patch_radius: 20.0,
            tangent: vec![vec![1.0, 0.0]],
        };
        let slice = Slice::Line {
            base: vec![0.0, 0.0],
            dir: vec![1.0, 0.0],
            half_width: 20.0,
        };
        let opt = minimize(&surface, &slice, |p| (p[0] - 3.25).powi(2), &settings());
        assert!((opt.point[0] - 3.25).abs() < 1e-6);
        assert!(opt.point[1].abs() < 1e-15);
    }

    #[test]
    fn plane_basis_handles_collinear_input() {
        let (e1, e2) = plane_basis(&[0.0, 0.0, 0.0], &[0.5, 0.0, 0.0]);
        assert_eq!(e1, vec![1.0, 0.0, 0.0]);
        assert_eq!(e2, vec![0.0, 1.0, 0.0]);
        let (e1, e2) = plane_basis(&[0.0, 2.0], &[0.0, -1.0]);
        assert_eq!(e1, vec![0.0, 1.0]);
        assert_eq!(e2, vec![1.0, 0.0]);
        let (e1, e2) = plane_basis(&[1.0, 1.0, 0.0], &[0.0, 1.0, 0.0]);
        assert!(dot(&e1, &e2).abs() < 1e-15);
        assert!((norm(&e2) - 1.0).abs() < 1e-15);
    }
}
