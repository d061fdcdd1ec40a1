//! Point-pair quantities on a domain: the Cassinian metric `c_D`, the
//! distance ratio metric `j_D`, the hyperbolic metric of the unit ball and
//! of the upper half-plane, the visual angle metric `v_D` and the quantity
//! `p_D`.
//!
//! `c_D` and `v_D` are suprema over the boundary. For punctured spaces the
//! supremum is a maximum over finitely many punctures. For balls and
//! half-spaces it is computed by the two-stage boundary optimizer: a
//! golden-section refined scan of the slice through `x`, `y` (and the
//! center), cross-checked by multistart descent over the whole boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    dist, dot, norm, orthonormal_complement, sub, Domain, Patch, Point, MIN_INTERIOR_DISTANCE,
};
use crate::solver::{self, plane_basis, Optimum, Slice, SolverSettings, Surface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Optimized,
    Sampled,
}

/// A boundary point at which a supremum is (approximately) attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryWitness {
    pub point: Point,
    /// The defining quotient (or angle) evaluated at `point`.
    pub value: f64,
    /// Upper bound on the distance from `value` to the true supremum.
    pub gap_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BoundaryWitness>,
    pub method: Method,
}

impl MetricValue {
    fn exact(value: f64) -> Self {
        Self {
            value,
            witness: None,
            method: Method::ClosedForm,
        }
    }

    /// Solver gap of the witness, 0 when there is none.
    pub fn gap(&self) -> f64 {
        self.witness.as_ref().map_or(0.0, |w| w.gap_estimate)
    }
}

/// The `λ` cap of the small-norm inequalities together with a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityConfig {
    pub lambda_bound: f64,
    pub tolerance: f64,
}

impl InequalityConfig {
    pub fn new(lambda_bound: f64, tolerance: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda_bound) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0, 1), got {lambda_bound}"
            )));
        }
        if !(tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(Self {
            lambda_bound,
            tolerance,
        })
    }
}

/// Settings of the boundary-supremum solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Scan points on the slice through the query pair.
    pub slice_samples: usize,
    /// Number of best local minima of the scan refined by golden section.
    pub refine_candidates: usize,
    /// Golden-section stopping width (radians on spheres, relative on planes).
    pub golden_tolerance: f64,
    /// Random starts of the full-boundary descent.
    pub multistart: usize,
    /// Smallest descent step, relative to the boundary scale.
    pub descent_tolerance: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            slice_samples: 4096,
            refine_candidates: 4,
            golden_tolerance: 1e-12,
            multistart: 64,
            descent_tolerance: 1e-12,
            seed: 0x5eed,
        }
    }
}

impl SolverOptions {
    /// Lighter settings for many evaluations on nearby point pairs, such as
    /// partition sums along a path.
    pub fn local() -> Self {
        Self {
            slice_samples: 256,
            refine_candidates: 2,
            multistart: 4,
            ..Self::default()
        }
    }

    fn settings(&self) -> SolverSettings {
        SolverSettings {
            slice_samples: self.slice_samples,
            refine_candidates: self.refine_candidates,
            golden_tolerance: self.golden_tolerance,
            multistart: self.multistart,
            descent_tolerance: self.descent_tolerance,
            seed: self.seed,
        }
    }
}

/// `|x−y| / (|x−p||p−y|)`.
pub fn cassinian_quotient(x: &[f64], y: &[f64], p: &[f64]) -> f64 {
    dist(x, y) / (dist(x, p) * dist(p, y))
}

/// The angle `∠(x, z, y)` at `z`, in `[0, π]`.
pub fn angle_at(x: &[f64], z: &[f64], y: &[f64]) -> f64 {
    let (la, lb) = (dist(x, z), dist(y, z));
    // 2·atan2(|â−b̂|, |â+b̂|) stays accurate near 0 and π.
    let mut diff = 0.0;
    let mut sum = 0.0;
    for ((xi, yi), zi) in x.iter().zip(y).zip(z) {
        let (u, v) = ((xi - zi) / la, (yi - zi) / lb);
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

fn check_pair(d: &Domain, x: &Point, y: &Point, min_delta: f64) -> Result<(f64, f64)> {
    let dx = d.interior_distance(x, min_delta)?;
    let dy = d.interior_distance(y, min_delta)?;
    Ok((dx, dy))
}

/// Boundary surface and scan slice for a ball or half-space query.
fn surface_and_slice(d: &Domain, x: &[f64], y: &[f64]) -> (Surface, Slice) {
    match d {
        Domain::Ball { center, radius } => {
            let c = center.coords();
            let (e1, e2) = plane_basis(&sub(x, c), &sub(y, c));
            (
                Surface::Sphere {
                    center: c.to_vec(),
                    radius: *radius,
                },
                Slice::Circle {
                    center: c.to_vec(),
                    radius: *radius,
                    e1,
                    e2,
                },
            )
        }
        Domain::HalfSpace {
            unit_normal,
            offset,
        } => {
            let nrm = unit_normal.coords();
            let patch = Patch::for_pair(nrm, *offset, x, y);
            let mut dir = sub(y, x);
            let h = dot(&dir, nrm);
            for (di, ni) in dir.iter_mut().zip(nrm) {
                *di -= h * ni;
            }
            let tangent = orthonormal_complement(nrm);
            let len = norm(&dir);
            let dir = if len > 1e-12 * (1.0 + dist(x, y)) {
                dir.into_iter().map(|v| v / len).collect()
            } else {
                tangent[0].clone()
            };
            let base = patch.center.coords().to_vec();
            (
                Surface::Plane {
                    normal: nrm.to_vec(),
                    offset: *offset,
                    patch_center: base.clone(),
                    patch_radius: patch.radius,
                    tangent,
                },
                Slice::Line {
                    base,
                    dir,
                    half_width: patch.radius,
                },
            )
        }
        Domain::Punctured { .. } => unreachable!("punctures are enumerated exactly"),
    }
}

/// Largest distance from `x` to a point of the scanned boundary piece.
fn max_boundary_distance(surface: &Surface, x: &[f64]) -> f64 {
    match surface {
        Surface::Sphere { center, radius } => dist(x, center) + radius,
        Surface::Plane {
            patch_center,
            patch_radius,
            ..
        } => dist(x, patch_center) + patch_radius,
    }
}

fn witness(point: Vec<f64>, value: f64, gap: f64, evaluations: usize) -> BoundaryWitness {
    BoundaryWitness {
        point: Point::from_vec_unchecked(point),
        value,
        gap_estimate: gap,
        evaluations,
    }
}

/// The Cassinian metric `c_D(x, y) = sup_{p∈∂D} |x−y| / (|x−p||p−y|)`.
pub fn cassinian(d: &Domain, x: &Point, y: &Point) -> Result<MetricValue> {
    cassinian_with(d, x, y, &SolverOptions::default())
}

pub fn cassinian_with(
    d: &Domain,
    x: &Point,
    y: &Point,
    opts: &SolverOptions,
) -> Result<MetricValue> {
    check_pair(d, x, y, MIN_INTERIOR_DISTANCE)?;
    let (xs, ys) = (x.coords(), y.coords());
    if xs == ys {
        return Ok(MetricValue::exact(0.0));
    }
    if let Domain::Punctured { punctures } = d {
        let (best, value) = max_over_punctures(punctures, |p| cassinian_quotient(xs, ys, p));
        return Ok(MetricValue {
            value,
            witness: Some(witness(
                best.to_vec(),
                value,
                0.0,
                punctures.len(),
            )),
            method: Method::ClosedForm,
        });
    }

    let (surface, slice) = surface_and_slice(d, xs, ys);
    let Optimum {
        point,
        value: f_min,
        sampled_best,
        mesh,
        evaluations,
    } = solver::minimize(
        &surface,
        &slice,
        |p| dist(xs, p) * dist(p, ys),
        &opts.settings(),
    );
    let dxy = dist(xs, ys);
    let value = cassinian_quotient(xs, ys, &point);
    // Certified bracket on the product, pushed through t ↦ |x−y|/t.
    let lipschitz = max_boundary_distance(&surface, xs) + max_boundary_distance(&surface, ys);
    let gap_f = (sampled_best - f_min).abs() + lipschitz * mesh;
    let gap = if f_min > gap_f {
        (dxy / (f_min - gap_f) - value).max(0.0)
    } else {
        f64::MAX
    };
    Ok(MetricValue {
        value,
        witness: Some(witness(point, value, gap, evaluations)),
        method: Method::Optimized,
    })
}

fn max_over_punctures<'a, F: Fn(&[f64]) -> f64>(punctures: &'a [Point], f: F) -> (&'a [f64], f64) {
    let mut best = punctures[0].coords();
    let mut value = f(best);
    for p in &punctures[1..] {
        let v = f(p.coords());
        if v > value || (v == value && p.coords().partial_cmp(best) == Some(std::cmp::Ordering::Less)) {
            value = v;
            best = p.coords();
        }
    }
    (best, value)
}

/// Brute-force estimate of `c_D` from `m` boundary samples.
pub fn cassinian_sampled(
    d: &Domain,
    x: &Point,
    y: &Point,
    m: usize,
    seed: u64,
) -> Result<MetricValue> {
    check_pair(d, x, y, MIN_INTERIOR_DISTANCE)?;
    if x == y {
        return Ok(MetricValue::exact(0.0));
    }
    let patch = match d {
        Domain::HalfSpace {
            unit_normal,
            offset,
        } => Some(Patch::for_pair(
            unit_normal.coords(),
            *offset,
            x.coords(),
            y.coords(),
        )),
        _ => None,
    };
    let samples = d.boundary_sample(m, seed, patch.as_ref());
    let (best, value) =
        max_over_punctures(&samples, |p| cassinian_quotient(x.coords(), y.coords(), p));
    Ok(MetricValue {
        value,
        witness: Some(witness(best.to_vec(), value, 0.0, samples.len())),
        method: Method::Sampled,
    })
}

/// The distance ratio metric `j_D(x, y) = log(1 + |x−y| / (δ(x) ∧ δ(y)))`.
pub fn distance_ratio_j(d: &Domain, x: &Point, y: &Point) -> Result<MetricValue> {
    let (dx, dy) = check_pair(d, x, y, f64::MIN_POSITIVE)?;
    Ok(MetricValue::exact((x.dist(y) / dx.min(dy)).ln_1p()))
}

fn unit_ball_factor(x: &Point) -> Result<f64> {
    let r = x.norm();
    if r >= 1.0 {
        return Err(Error::OutsideDomain {
            point: x.coords().to_vec(),
        });
    }
    Ok((1.0 - r) * (1.0 + r))
}

/// Hyperbolic distance in the unit ball,
/// `ρ = 2·arsinh(|x−y| / √((1−|x|²)(1−|y|²)))`.
pub fn hyperbolic_ball(x: &Point, y: &Point) -> Result<MetricValue> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            actual: y.dim(),
        });
    }
    let fx = unit_ball_factor(x)?;
    let fy = unit_ball_factor(y)?;
    Ok(MetricValue::exact(
        2.0 * (x.dist(y) / (fx * fy).sqrt()).asinh(),
    ))
}

/// Hyperbolic distance in the upper half-plane,
/// `ρ = 2·artanh(|z₁−z₂| / |z₁−z̄₂|)`.
pub fn hyperbolic_halfplane(z1: &Point, z2: &Point) -> Result<MetricValue> {
    for z in [z1, z2] {
        if z.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: z.dim(),
            });
        }
        if !(z.coords()[1] > 0.0) {
            return Err(Error::OutsideDomain {
                point: z.coords().to_vec(),
            });
        }
    }
    let (a, b) = (z1.coords(), z2.coords());
    let reflected = [b[0], -b[1]];
    let t = dist(a, b) / dist(a, &reflected);
    Ok(MetricValue::exact(2.0 * t.atanh()))
}

/// The visual angle metric `v_D(x, y) = sup_{z∈∂D} ∠(x, z, y)`.
pub fn visual_angle(d: &Domain, x: &Point, y: &Point) -> Result<MetricValue> {
    visual_angle_with(d, x, y, &SolverOptions::default())
}

pub fn visual_angle_with(
    d: &Domain,
    x: &Point,
    y: &Point,
    opts: &SolverOptions,
) -> Result<MetricValue> {
    let (dx, dy) = check_pair(d, x, y, MIN_INTERIOR_DISTANCE)?;
    let (xs, ys) = (x.coords(), y.coords());
    if xs == ys {
        return Ok(MetricValue::exact(0.0));
    }
    if let Domain::Punctured { punctures } = d {
        let (best, value) = max_over_punctures(punctures, |z| angle_at(xs, z, ys));
        return Ok(MetricValue {
            value,
            witness: Some(witness(best.to_vec(), value, 0.0, punctures.len())),
            method: Method::ClosedForm,
        });
    }
    let (surface, slice) = surface_and_slice(d, xs, ys);
    let opt = solver::minimize(&surface, &slice, |z| -angle_at(xs, z, ys), &opts.settings());
    let value = angle_at(xs, &opt.point, ys);
    let lipschitz = 1.0 / dx + 1.0 / dy;
    let gap = ((opt.sampled_best - opt.value).abs() + lipschitz * opt.mesh).min(std::f64::consts::PI);
    Ok(MetricValue {
        value,
        witness: Some(witness(opt.point, value, gap, opt.evaluations)),
        method: Method::Optimized,
    })
}

/// `p_D(x, y) = |x−y| / √(|x−y|² + 4δ(x)δ(y))`.
pub fn p_quantity(d: &Domain, x: &Point, y: &Point) -> Result<MetricValue> {
    let (dx, dy) = check_pair(d, x, y, f64::MIN_POSITIVE)?;
    let t = x.dist(y);
    Ok(MetricValue::exact(t / (t * t + 4.0 * dx * dy).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn cassinian_ball_center_formula() {
        for n in [2, 3, 5] {
            let b = Domain::unit_ball(n);
            let c = cassinian(&b, &Point::origin(n), &Point::e1(n, 0.5)).unwrap();
            assert!((c.value - 1.0).abs() < 1e-12, "n={n}: {}", c.value);
            assert_eq!(c.method, Method::Optimized);
            let w = c.witness.unwrap();
            assert!((w.point.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cassinian_radial_formula() {
        let b = Domain::unit_ball(2);
        let c = cassinian(&b, &Point::e1(2, 0.25), &Point::e1(2, 0.5)).unwrap();
        assert!((c.value - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cassinian_symmetric_pair_in_disk() {
        let b = Domain::unit_ball(2);
        let c = cassinian(&b, &pt(&[0.5, 0.0]), &pt(&[-0.5, 0.0])).unwrap();
        assert!((c.value - 4.0 / 3.0).abs() < 1e-12);
        let w = c.witness.unwrap();
        assert!((w.point.coords()[0].abs() - 1.0).abs() < 1e-6, "{:?}", w.point);
    }

    #[test]
    fn cassinian_punctured_plane() {
        let d = Domain::punctured(vec![Point::origin(2)]).unwrap();
        let c = cassinian(&d, &pt(&[1.0, 0.0]), &pt(&[0.0, 1.0])).unwrap();
        assert_eq!(c.value, 2f64.sqrt());
        assert_eq!(c.method, Method::ClosedForm);
    }

    #[test]
    fn coincident_points_give_zero_without_witness() {
        let b = Domain::unit_ball(3);
        let x = pt(&[0.1, 0.2, 0.3]);
        for v in [
            cassinian(&b, &x, &x).unwrap(),
            visual_angle(&b, &x, &x).unwrap(),
            distance_ratio_j(&b, &x, &x).unwrap(),
            p_quantity(&b, &x, &x).unwrap(),
            hyperbolic_ball(&x, &x).unwrap(),
        ] {
            assert_eq!(v.value, 0.0);
            assert!(v.witness.is_none());
        }
    }

    #[test]
    fn rejects_points_outside_or_on_boundary() {
        let b = Domain::unit_ball(2);
        let o = Point::origin(2);
        assert!(matches!(
            cassinian(&b, &o, &pt(&[1.0, 0.0])),
            Err(Error::OutsideDomain { .. })
        ));
        assert!(matches!(
            cassinian(&b, &o, &pt(&[1.0 - 1e-14, 0.0])),
            Err(Error::TooCloseToBoundary { .. })
        ));
        assert!(distance_ratio_j(&b, &o, &pt(&[2.0, 0.0])).is_err());
        assert!(hyperbolic_ball(&o, &pt(&[0.0, 1.0])).is_err());
        assert!(hyperbolic_halfplane(&pt(&[0.0, 1.0]), &pt(&[0.0, -1.0])).is_err());
        assert!(hyperbolic_halfplane(&pt(&[0.0, 1.0, 0.0]), &pt(&[0.0, 1.0, 0.0])).is_err());
    }

    #[test]
    fn distance_ratio_examples() {
        let b = Domain::unit_ball(2);
        let j = distance_ratio_j(&b, &Point::origin(2), &Point::e1(2, 0.5)).unwrap();
        assert!((j.value - 2f64.ln()).abs() < 1e-15);
        let d = Domain::punctured(vec![Point::origin(2)]).unwrap();
        let j = distance_ratio_j(&d, &Point::e1(2, 1.0), &Point::e1(2, 2.0)).unwrap();
        assert!((j.value - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_examples() {
        let r = hyperbolic_ball(&Point::origin(2), &Point::e1(2, 0.5)).unwrap();
        assert!((r.value - 3f64.ln()).abs() < 1e-15);
        assert!((r.value - 1.098_612_288_668_109_6).abs() < 1e-12);
        let h = hyperbolic_halfplane(&pt(&[0.0, 1.0]), &pt(&[0.0, 2.0])).unwrap();
        assert!((h.value - 2f64.ln()).abs() < 1e-15);
        let z = pt(&[0.3, 0.7]);
        assert_eq!(hyperbolic_halfplane(&z, &z).unwrap().value, 0.0);
    }

    #[test]
    fn p_examples() {
        let b = Domain::unit_ball(2);
        let p = p_quantity(&b, &Point::origin(2), &Point::e1(2, 0.5)).unwrap();
        assert!((p.value - 1.0 / 3.0).abs() < 1e-15);
        let h = Domain::upper_half_plane();
        let p = p_quantity(&h, &pt(&[0.0, 1.0]), &pt(&[0.0, 2.0])).unwrap();
        assert!((p.value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn visual_angle_symmetric_pair() {
        let b = Domain::unit_ball(2);
        let v = visual_angle(&b, &pt(&[0.5, 0.0]), &pt(&[-0.5, 0.0])).unwrap();
        assert!((v.value - 0.6f64.acos()).abs() < 1e-12, "{}", v.value);
        assert!((v.value - 0.927_295_218_001_612_2).abs() < 1e-9);
        let w = v.witness.unwrap();
        assert!(w.point.coords()[0].abs() < 1e-6);
        assert!((w.point.coords()[1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angle_at_is_accurate_near_extremes() {
        assert!((angle_at(&[1.0, 0.0], &[0.0, 0.0], &[-1.0, 0.0]) - std::f64::consts::PI).abs() < 1e-15);
        assert!((angle_at(&[1.0, 0.0], &[0.0, 0.0], &[1.0, 1e-10]) - 1e-10).abs() < 1e-20);
    }

    #[test]
    fn half_space_cassinian_matches_sampling() {
        let h = Domain::upper_half_plane();
        let x = pt(&[0.0, 1.0]);
        let y = pt(&[1.5, 0.5]);
        let c = cassinian(&h, &x, &y).unwrap();
        // Dense 1-D scan over the boundary line.
        let mut best: f64 = 0.0;
        for i in 0..=400_000 {
            let s = -5.0 + 10.0 * i as f64 / 400_000.0;
            best = best.max(cassinian_quotient(x.coords(), y.coords(), &[s, 0.0]));
        }
        assert!(c.value >= best - 1e-12);
        assert!((c.value - best) / best < 1e-8);
    }

    #[test]
    fn sampled_estimate_is_a_lower_bound() {
        let b = Domain::unit_ball(3);
        let x = pt(&[0.2, -0.1, 0.4]);
        let y = pt(&[-0.3, 0.5, 0.1]);
        let opt = cassinian(&b, &x, &y).unwrap();
        let s = cassinian_sampled(&b, &x, &y, 20_000, 3).unwrap();
        assert_eq!(s.method, Method::Sampled);
        assert!(s.value <= opt.value + 1e-12);
        assert!((opt.value - s.value) / opt.value < 1e-2);
    }

    #[test]
    fn inequality_config_validation() {
        assert!(InequalityConfig::new(0.5, 1e-10).is_ok());
        assert!(InequalityConfig::new(1.0, 1e-10).is_err());
        assert!(InequalityConfig::new(-0.1, 1e-10).is_err());
        assert!(InequalityConfig::new(0.5, 0.0).is_err());
    }
}
