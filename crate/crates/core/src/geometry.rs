//! Points, domains, distance to the boundary and boundary sampling.
//!
//! Three kinds of proper subdomains of ℝⁿ are supported: open balls,
//! open half-spaces `{x : ⟨x, ν⟩ > offset}` and ℝⁿ with finitely many
//! punctures. The point at infinity is never treated as a boundary point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with `δ_D(x)` below this are rejected by the metric operations.
pub const MIN_INTERIOR_DISTANCE: f64 = 1e-12;

/// Tolerance on the length of a half-space normal.
pub const NORMAL_TOLERANCE: f64 = 1e-12;

/// A point of ℝⁿ, n ≥ 2, with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "dimension must be at least 2, got {}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint(format!("non-finite coordinate {c}")));
        }
        Ok(Self(coords))
    }

    /// The origin of ℝⁿ.
    pub fn origin(n: usize) -> Self {
        assert!(n >= 2, "dimension must be at least 2");
        Self(vec![0.0; n])
    }

    /// `t·e_k` where `e_k` is the k-th standard basis vector (zero based).
    pub fn on_axis(n: usize, k: usize, t: f64) -> Self {
        let mut p = Self::origin(n);
        p.0[k] = t;
        p
    }

    /// Shorthand for `t·e₁`.
    pub fn e1(n: usize, t: f64) -> Self {
        Self::on_axis(n, 0, t)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        debug_assert!(coords.len() >= 2);
        Self(coords)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

// Slice arithmetic shared by the numeric modules.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| alpha * xi + yi).collect()
}

pub(crate) fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub(crate) fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Orthonormal basis of the orthogonal complement of the unit vector `v`.
pub(crate) fn orthonormal_complement(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        let mut w = vec![0.0; n];
        w[k] = 1.0;
        let c = dot(&w, v);
        for (wi, vi) in w.iter_mut().zip(v) {
            *wi -= c * vi;
        }
        for b in &basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let len = norm(&w);
        if len > 1e-8 {
            basis.push(w.into_iter().map(|x| x / len).collect());
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

/// A bounded patch of a hyperplane used to sample it.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub center: Point,
    pub radius: f64,
}

impl Patch {
    /// Default patch for a query pair: radius `10·(1+|x|+|y|)` around the
    /// orthogonal projection of the midpoint onto the hyperplane.
    pub fn for_pair(normal: &[f64], offset: f64, x: &[f64], y: &[f64]) -> Self {
        let mid = lerp(x, y, 0.5);
        let h = dot(&mid, normal) - offset;
        let center = axpy(-h, normal, &mid);
        Self {
            center: Point::from_vec_unchecked(center),
            radius: 10.0 * (1.0 + norm(x) + norm(y)),
        }
    }
}

/// A proper subdomain of ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub enum Domain {
    Ball { center: Point, radius: f64 },
    HalfSpace { unit_normal: Point, offset: f64 },
    Punctured { punctures: Vec<Point> },
}

/// JSON shape of a domain descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainRepr {
    Ball { center: Vec<f64>, radius: f64 },
    Halfspace { normal: Vec<f64>, offset: f64 },
    Punctured { punctures: Vec<Vec<f64>> },
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;

    fn try_from(repr: DomainRepr) -> Result<Self> {
        match repr {
            DomainRepr::Ball { center, radius } => Domain::ball(Point::new(center)?, radius),
            DomainRepr::Halfspace { normal, offset } => {
                Domain::half_space(Point::new(normal)?, offset)
            }
            DomainRepr::Punctured { punctures } => Domain::punctured(
                punctures
                    .into_iter()
                    .map(Point::new)
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        match d {
            Domain::Ball { center, radius } => DomainRepr::Ball {
                center: center.into_coords(),
                radius,
            },
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => DomainRepr::Halfspace {
                normal: unit_normal.into_coords(),
                offset,
            },
            Domain::Punctured { punctures } => DomainRepr::Punctured {
                punctures: punctures.into_iter().map(Point::into_coords).collect(),
            },
        }
    }
}

impl Domain {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Domain::Ball { center, radius })
    }

    /// The unit ball 𝔹ⁿ.
    pub fn unit_ball(n: usize) -> Self {
        Domain::Ball {
            center: Point::origin(n),
            radius: 1.0,
        }
    }

    pub fn half_space(unit_normal: Point, offset: f64) -> Result<Self> {
        if ((unit_normal.norm() - 1.0).abs()) > NORMAL_TOLERANCE {
            return Err(Error::InvalidDomain(format!(
                "half-space normal must have unit length, got {}",
                unit_normal.norm()
            )));
        }
        if !offset.is_finite() {
            return Err(Error::InvalidDomain("non-finite half-space offset".into()));
        }
        Ok(Domain::HalfSpace {
            unit_normal,
            offset,
        })
    }

    /// The upper half-plane ℍ² = {(s, t) : t > 0}.
    pub fn upper_half_plane() -> Self {
        Domain::HalfSpace {
            unit_normal: Point::on_axis(2, 1, 1.0),
            offset: 0.0,
        }
    }

    pub fn punctured(punctures: Vec<Point>) -> Result<Self> {
        let Some(first) = punctures.first() else {
            return Err(Error::InvalidDomain("puncture list is empty".into()));
        };
        let n = first.dim();
        for p in &punctures {
            p.check_dim(n)?;
        }
        for (i, p) in punctures.iter().enumerate() {
            if punctures[..i].iter().any(|q| q == p) {
                return Err(Error::InvalidDomain(format!(
                    "duplicate puncture {:?}",
                    p.coords()
                )));
            }
        }
        Ok(Domain::Punctured { punctures })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball { center, .. } => center.dim(),
            Domain::HalfSpace { unit_normal, .. } => unit_normal.dim(),
            Domain::Punctured { punctures } => punctures[0].dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Domain::Ball { .. } => "ball",
            Domain::HalfSpace { .. } => "halfspace",
            Domain::Punctured { .. } => "punctured",
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Domain::Ball { .. })
    }

    /// Euclidean diameter, `None` for unbounded domains.
    pub fn diameter(&self) -> Option<f64> {
        match self {
            Domain::Ball { radius, .. } => Some(2.0 * radius),
            _ => None,
        }
    }

    pub fn check_dim(&self, x: &Point) -> Result<()> {
        x.check_dim(self.dim())
    }

    /// `δ_D(x)`, the distance from `x` to `∂D`. Points outside `D` get 0,
    /// i.e. this is the distance to the complement of `D`.
    pub fn boundary_distance(&self, x: &Point) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.boundary_distance_raw(x.coords()))
    }

    pub(crate) fn boundary_distance_raw(&self, x: &[f64]) -> f64 {
        match self {
            Domain::Ball { center, radius } => (radius - dist(x, center.coords())).max(0.0),
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => (dot(x, unit_normal.coords()) - offset).max(0.0),
            Domain::Punctured { punctures } => punctures
                .iter()
                .map(|p| dist(x, p.coords()))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Strict membership `x ∈ D`.
    pub fn contains(&self, x: &Point) -> Result<bool> {
        self.check_dim(x)?;
        Ok(self.contains_raw(x.coords()))
    }

    pub(crate) fn contains_raw(&self, x: &[f64]) -> bool {
        match self {
            Domain::Ball { center, radius } => dist(x, center.coords()) < *radius,
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => dot(x, unit_normal.coords()) > *offset,
            Domain::Punctured { punctures } => punctures.iter().all(|p| p.coords() != x),
        }
    }

    /// Returns `δ_D(x)` if `x ∈ D` with `δ_D(x) ≥ min_distance`.
    pub fn interior_distance(&self, x: &Point, min_distance: f64) -> Result<f64> {
        self.check_dim(x)?;
        if !self.contains_raw(x.coords()) {
            return Err(Error::OutsideDomain {
                point: x.coords().to_vec(),
            });
        }
        let d = self.boundary_distance_raw(x.coords());
        if d < min_distance {
            return Err(Error::TooCloseToBoundary {
                point: x.coords().to_vec(),
                distance: d,
                min: min_distance,
            });
        }
        Ok(d)
    }

    /// Distance from `p` to `∂D` measured along the boundary's own
    /// constraint (0 for points on the sphere, hyperplane or a puncture).
    pub fn boundary_residual(&self, p: &[f64]) -> f64 {
        match self {
            Domain::Ball { center, radius } => (dist(p, center.coords()) - radius).abs(),
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => (dot(p, unit_normal.coords()) - offset).abs(),
            Domain::Punctured { punctures } => punctures
                .iter()
                .map(|q| dist(p, q.coords()))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// `m` boundary points, deterministic for a fixed seed.
    ///
    /// Spheres are sampled uniformly. Hyperplanes are sampled uniformly in
    /// `patch`, or in the radius-10 disk around the projection of the
    /// origin when no patch is given. Punctured spaces return the
    /// puncture list regardless of `m`.
    pub fn boundary_sample(&self, m: usize, seed: u64, patch: Option<&Patch>) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        match self {
            Domain::Ball { center, radius } => (0..m)
                .map(|_| {
                    let dir = random_unit(&mut rng, n);
                    Point::from_vec_unchecked(axpy(*radius, &dir, center.coords()))
                })
                .collect(),
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => {
                let default_patch;
                let patch = match patch {
                    Some(p) => p,
                    None => {
                        default_patch = Patch {
                            center: Point::from_vec_unchecked(scale(
                                *offset,
                                unit_normal.coords(),
                            )),
                            radius: 10.0,
                        };
                        &default_patch
                    }
                };
                // Snap the patch center onto the hyperplane.
                let h = dot(patch.center.coords(), unit_normal.coords()) - offset;
                let base = axpy(-h, unit_normal.coords(), patch.center.coords());
                let tangent = orthonormal_complement(unit_normal.coords());
                (0..m)
                    .map(|_| {
                        let u = random_in_unit_ball(&mut rng, n - 1);
                        let mut p = base.clone();
                        for (ui, t) in u.iter().zip(&tangent) {
                            for (pk, tk) in p.iter_mut().zip(t) {
                                *pk += patch.radius * ui * tk;
                            }
                        }
                        Point::from_vec_unchecked(p)
                    })
                    .collect()
            }
            Domain::Punctured { punctures } => punctures.clone(),
        }
    }

    /// Translate the domain by `v`.
    pub fn translated(&self, v: &[f64]) -> Self {
        let shift = |p: &Point| Point::from_vec_unchecked(axpy(1.0, v, p.coords()));
        match self {
            Domain::Ball { center, radius } => Domain::Ball {
                center: shift(center),
                radius: *radius,
            },
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => Domain::HalfSpace {
                unit_normal: unit_normal.clone(),
                offset: offset + dot(v, unit_normal.coords()),
            },
            Domain::Punctured { punctures } => Domain::Punctured {
                punctures: punctures.iter().map(shift).collect(),
            },
        }
    }

    /// Scale the domain by `lambda > 0` about the origin.
    pub fn scaled(&self, lambda: f64) -> Self {
        let sc = |p: &Point| Point::from_vec_unchecked(scale(lambda, p.coords()));
        match self {
            Domain::Ball { center, radius } => Domain::Ball {
                center: sc(center),
                radius: radius * lambda,
            },
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => Domain::HalfSpace {
                unit_normal: unit_normal.clone(),
                offset: offset * lambda,
            },
            Domain::Punctured { punctures } => Domain::Punctured {
                punctures: punctures.iter().map(sc).collect(),
            },
        }
    }
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Uniform point of the closed unit ball of ℝⁿ, by rejection from the cube.
pub(crate) fn random_in_unit_ball<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if dot(&v, &v) <= 1.0 {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn boundary_distance_examples() {
        let b = Domain::unit_ball(2);
        assert_eq!(b.boundary_distance(&pt(&[0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(b.boundary_distance(&pt(&[0.5, 0.0])).unwrap(), 0.5);
        let d = Domain::punctured(vec![pt(&[0.0, 0.0]), pt(&[2.0, 0.0])]).unwrap();
        assert_eq!(d.boundary_distance(&pt(&[0.5, 0.0])).unwrap(), 0.5);
        let h = Domain::upper_half_plane();
        assert_eq!(h.boundary_distance(&pt(&[3.0, 0.25])).unwrap(), 0.25);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b = Domain::unit_ball(3);
        let err = b.boundary_distance(&pt(&[0.0, 0.0])).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 3,
                actual: 2
            }
        );
        assert!(b.contains(&pt(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn contains_examples() {
        let b = Domain::unit_ball(2);
        assert!(b.contains(&pt(&[0.0, 0.0])).unwrap());
        assert!(!b.contains(&pt(&[1.0, 0.0])).unwrap());
        let d = Domain::punctured(vec![pt(&[0.0, 0.0])]).unwrap();
        assert!(!d.contains(&pt(&[0.0, 0.0])).unwrap());
        assert!(d.contains(&pt(&[1e-300, 0.0])).unwrap());
        let h = Domain::upper_half_plane();
        assert!(!h.contains(&pt(&[1.0, 0.0])).unwrap());
        assert!(h.contains(&pt(&[1.0, 1e-9])).unwrap());
    }

    #[test]
    fn invalid_descriptors_rejected() {
        assert!(Domain::ball(Point::origin(2), 0.0).is_err());
        assert!(Domain::half_space(pt(&[1.0, 1.0]), 0.0).is_err());
        assert!(Domain::punctured(vec![]).is_err());
        assert!(Domain::punctured(vec![pt(&[1.0, 0.0]), pt(&[1.0, 0.0])]).is_err());
        assert!(Domain::punctured(vec![pt(&[1.0, 0.0]), pt(&[1.0, 0.0, 0.0])]).is_err());
        assert!(Point::new(vec![1.0]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn sphere_samples_lie_on_sphere() {
        let c = Domain::unit_ball(2);
        let s = c.boundary_sample(4, 9, None);
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|p| (p.norm() - 1.0).abs() <= 1e-12));

        let b = Domain::unit_ball(3);
        let s = b.boundary_sample(1000, 1, None);
        assert_eq!(s.len(), 1000);
        assert!(s.iter().all(|p| (p.norm() - 1.0).abs() <= 1e-12));
        assert_eq!(s, b.boundary_sample(1000, 1, None));
        assert_ne!(s, b.boundary_sample(1000, 2, None));
    }

    #[test]
    fn puncture_samples_are_the_punctures() {
        let d = Domain::punctured(vec![pt(&[0.0, 0.0]), pt(&[2.0, 0.0])]).unwrap();
        let s = d.boundary_sample(10, 3, None);
        assert_eq!(s, vec![pt(&[0.0, 0.0]), pt(&[2.0, 0.0])]);
    }

    #[test]
    fn hyperplane_samples_stay_in_patch() {
        let n = pt(&[0.0, 0.6, 0.8]);
        let h = Domain::half_space(n.clone(), 0.5).unwrap();
        let patch = Patch {
            center: pt(&[1.0, 2.0, 3.0]),
            radius: 2.0,
        };
        let s = h.boundary_sample(500, 4, Some(&patch));
        let h0 = dot(patch.center.coords(), n.coords()) - 0.5;
        let base = axpy(-h0, n.coords(), patch.center.coords());
        for p in &s {
            assert!(h.boundary_residual(p.coords()) <= 1e-12);
            assert!(dist(p.coords(), &base) <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn domain_json_round_trip() {
        let json = r#"{"kind":"punctured","punctures":[[0.0,0.0],[2.0,0.0]]}"#;
        let d: Domain = serde_json::from_str(json).unwrap();
        assert_eq!(d.kind(), "punctured");
        let back = serde_json::to_string(&d).unwrap();
        assert_eq!(back, json);
        let h: Domain =
            serde_json::from_str(r#"{"kind":"halfspace","normal":[0.0,1.0],"offset":0.0}"#)
                .unwrap();
        assert_eq!(h, Domain::upper_half_plane());
        assert!(serde_json::from_str::<Domain>(r#"{"kind":"ball","center":[0,0],"radius":-1}"#)
            .is_err());
    }

    #[test]
    fn orthonormal_complement_is_orthonormal() {
        let v = [0.0, 0.6, 0.8];
        let b = orthonormal_complement(&v);
        assert_eq!(b.len(), 2);
        for (i, u) in b.iter().enumerate() {
            assert!(dot(u, &v).abs() < 1e-15);
            assert!((norm(u) - 1.0).abs() < 1e-15);
            for w in &b[..i] {
                assert!(dot(u, w).abs() < 1e-15);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(-2.0f64..2.0, n)
        }

        fn domains() -> impl Strategy<Value = Domain> {
            prop_oneof![
                (coords(2), 0.1f64..3.0)
                    .prop_map(|(c, r)| Domain::ball(Point::new(c).unwrap(), r).unwrap()),
                (0.0f64..std::f64::consts::TAU, -1.0f64..1.0).prop_map(|(a, o)| {
                    Domain::half_space(Point::new(vec![a.cos(), a.sin()]).unwrap(), o).unwrap()
                }),
                proptest::collection::vec(coords(2), 1..4).prop_filter_map("distinct", |ps| {
                    Domain::punctured(ps.into_iter().map(|c| Point::new(c).unwrap()).collect())
                        .ok()
                }),
            ]
        }

        proptest! {
            #[test]
            fn boundary_distance_is_1_lipschitz(d in domains(), x in coords(2), y in coords(2)) {
                let (x, y) = (Point::new(x).unwrap(), Point::new(y).unwrap());
                let dx = d.boundary_distance(&x).unwrap();
                let dy = d.boundary_distance(&y).unwrap();
                prop_assert!((dx - dy).abs() <= x.dist(&y) + 1e-12);
            }

            #[test]
            fn positive_distance_iff_inside(d in domains(), x in coords(2)) {
                prop_assume!(!matches!(d, Domain::Punctured { .. }));
                let x = Point::new(x).unwrap();
                let inside = d.contains(&x).unwrap();
                let delta = d.boundary_distance(&x).unwrap();
                prop_assert_eq!(delta > 0.0, inside);
            }

            #[test]
            fn ball_distance_scales(c in coords(3), r in 0.1f64..3.0, u in coords(3), lambda in 0.1f64..10.0) {
                let center = Point::new(c.clone()).unwrap();
                let b = Domain::ball(center.clone(), r).unwrap();
                let x = Point::new(axpy(r / 4.0, &u, &c)).unwrap();
                let scaled = Domain::ball(center.clone(), lambda * r).unwrap();
                let xs = Point::new(axpy(lambda, &sub(x.coords(), &c), &c)).unwrap();
                let d0 = b.boundary_distance(&x).unwrap();
                let d1 = scaled.boundary_distance(&xs).unwrap();
                prop_assert!((d1 - lambda * d0).abs() <= 1e-12 * (1.0 + lambda * r));
            }
        }
    }
}
