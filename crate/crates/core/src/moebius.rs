//! Moebius self-maps of the unit ball and the sharp distortion of the
//! Cassinian metric under them.
//!
//! A general automorphism is stored as an ordered list of factors, each an
//! orthogonal matrix or an inversion in a sphere orthogonal to the unit
//! sphere. Factors are applied first to last.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, dot, norm, Domain, Point};
use crate::metrics;

/// Points closer than this to an inversion center are rejected.
pub const INFINITY_GUARD: f64 = 1e-9;

/// Inversion `x ↦ a* + (r/|x−a*|)²(x−a*)` in the sphere `S(a*, r)`, with
/// `r² = |a*|² − 1` so that the sphere meets the unit sphere orthogonally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InversionRepr", into = "InversionRepr")]
pub struct SphereInversion {
    center: Point,
    radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InversionRepr {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl TryFrom<InversionRepr> for SphereInversion {
    type Error = Error;
    fn try_from(r: InversionRepr) -> Result<Self> {
        SphereInversion::new(Point::new(r.center)?, r.radius)
    }
}

impl From<SphereInversion> for InversionRepr {
    fn from(s: SphereInversion) -> Self {
        InversionRepr {
            center: s.center.into_coords(),
            radius: s.radius,
        }
    }
}

impl SphereInversion {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        let c2 = dot(center.coords(), center.coords());
        if c2 <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "inversion center must lie outside the closed unit ball, |a*| = {}",
                c2.sqrt()
            )));
        }
        if !(radius > 0.0) || (radius * radius - (c2 - 1.0)).abs() > 1e-12 * c2.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "sphere S(a*, {radius}) is not orthogonal to the unit sphere"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x)?;
        let c = self.center.coords();
        let d = dist(x.coords(), c);
        if d < INFINITY_GUARD {
            return Err(Error::MapsToInfinity {
                point: x.coords().to_vec(),
            });
        }
        let k = (self.radius / d).powi(2);
        Ok(Point::from_vec_unchecked(
            x.coords()
                .iter()
                .zip(c)
                .map(|(xi, ci)| ci + k * (xi - ci))
                .collect(),
        ))
    }
}

fn check_dim(n: usize, x: &Point) -> Result<()> {
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.dim(),
        });
    }
    Ok(())
}

/// An orthogonal `n×n` matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct OrthogonalMap {
    rows: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for OrthogonalMap {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        OrthogonalMap::new(rows)
    }
}

impl From<OrthogonalMap> for Vec<Vec<f64>> {
    fn from(m: OrthogonalMap) -> Self {
        m.rows
    }
}

impl OrthogonalMap {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("matrix must be square, n ≥ 2".into()));
        }
        // QᵀQ = I  ⇔  columns orthonormal.
        for i in 0..n {
            for j in 0..n {
                let g: f64 = (0..n).map(|k| rows[k][i] * rows[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not orthogonal: (QᵀQ)[{i}][{j}] = {g}"
                    )));
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows }
    }

    /// Orthonormalized Gaussian matrix; reflections are allowed.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        loop {
            let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
            for _ in 0..n {
                let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                // Two Gram-Schmidt passes keep QᵀQ = I at rounding level.
                for _ in 0..2 {
                    for c in &cols {
                        let d = dot(&v, c);
                        for (vi, ci) in v.iter_mut().zip(c) {
                            *vi -= d * ci;
                        }
                    }
                }
                let l = norm(&v);
                if l < 1e-6 {
                    break;
                }
                cols.push(v.into_iter().map(|x| x / l).collect());
            }
            if cols.len() == n {
                let rows = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
                return Self { rows };
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x)?;
        Ok(Point::from_vec_unchecked(
            self.rows.iter().map(|r| dot(r, x.coords())).collect(),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Factor {
    Orthogonal { matrix: OrthogonalMap },
    Inversion(SphereInversion),
}

impl Factor {
    fn dim(&self) -> usize {
        match self {
            Factor::Orthogonal { matrix } => matrix.dim(),
            Factor::Inversion(s) => s.dim(),
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            Factor::Orthogonal { matrix } => matrix.apply(x),
            Factor::Inversion(s) => s.apply(x),
        }
    }
}

/// A composition of orthogonal maps and ball-preserving inversions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct MoebiusMap {
    dim: usize,
    factors: Vec<Factor>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapRepr {
    pub dim: usize,
    pub factors: Vec<Factor>,
}

impl TryFrom<MapRepr> for MoebiusMap {
    type Error = Error;
    fn try_from(r: MapRepr) -> Result<Self> {
        MoebiusMap::new(r.dim, r.factors)
    }
}

impl From<MoebiusMap> for MapRepr {
    fn from(m: MoebiusMap) -> Self {
        MapRepr {
            dim: m.dim,
            factors: m.factors,
        }
    }
}

impl MoebiusMap {
    pub fn new(dim: usize, factors: Vec<Factor>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter("dimension must be at least 2".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: f.dim(),
            });
        }
        let map = Self { dim, factors };
        // Spot check: boundary points stay on the unit sphere.
        for p in Domain::unit_ball(dim).boundary_sample(8, 0, None) {
            let q = map.apply(&p)?;
            if (q.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(
                    "map does not preserve the unit sphere".into(),
                ));
            }
        }
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            factors: Vec::new(),
        }
    }

    pub fn from_orthogonal(q: OrthogonalMap) -> Self {
        Self {
            dim: q.dim(),
            factors: vec![Factor::Orthogonal { matrix: q }],
        }
    }

    pub fn from_inversion(s: SphereInversion) -> Self {
        Self {
            dim: s.dim(),
            factors: vec![Factor::Inversion(s)],
        }
    }

    /// `outer ∘ σ_a ∘ inner`, where `σ_a` is the inversion sending `a` to 0
    /// (omitted when `a = 0`).
    pub fn automorphism(outer: OrthogonalMap, a: &Point, inner: OrthogonalMap) -> Result<Self> {
        let n = a.dim();
        if outer.dim() != n || inner.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: outer.dim().max(inner.dim()),
            });
        }
        let mut factors = vec![Factor::Orthogonal { matrix: inner }];
        if a.norm() > 0.0 {
            factors.push(Factor::Inversion(inversion_sending_to_zero(a)?));
        }
        factors.push(Factor::Orthogonal { matrix: outer });
        Ok(Self { dim: n, factors })
    }

    /// `other ∘ self`.
    pub fn then(mut self, other: &MoebiusMap) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        self.factors.extend(other.factors.iter().cloned());
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim, x)?;
        let mut p = x.clone();
        for f in &self.factors {
            p = f.apply(&p)?;
        }
        Ok(p)
    }
}

/// The inversion `σ` with `σ(a) = 0` and `σ(𝔹ⁿ) = 𝔹ⁿ`: center
/// `a* = a/|a|²`, radius `√(1−|a|²)/|a|`.
pub fn inversion_sending_to_zero(a: &Point) -> Result<SphereInversion> {
    let r = a.norm();
    if r == 0.0 {
        return Err(Error::InvalidParameter(
            "a = 0: use an orthogonal map instead".into(),
        ));
    }
    if r >= 1.0 {
        return Err(Error::InvalidParameter(format!("|a| = {r} must be < 1")));
    }
    let r2 = r * r;
    let center = Point::from_vec_unchecked(a.coords().iter().map(|v| v / r2).collect());
    let radius = ((1.0 - r) * (1.0 + r)).sqrt() / r;
    SphereInversion::new(center, radius)
}

/// `| |σ(x)−σ(y)| − r²|x−y|/(|x−a*||y−a*|) |`.
pub fn check_inversion_identity(s: &SphereInversion, x: &Point, y: &Point) -> Result<f64> {
    let (sx, sy) = (s.apply(x)?, s.apply(y)?);
    let c = s.center().coords();
    let lhs = sx.dist(&sy);
    let rhs = s.radius().powi(2) * x.dist(y) / (dist(x.coords(), c) * dist(y.coords(), c));
    Ok((lhs - rhs).abs())
}

/// `| |σ(φ(x)) − σ(φ(y))| − |x−y| |` where `σ` sends `φ(0)` to 0; the
/// composite `σ∘φ` is orthogonal.
pub fn composite_isometry_residual(phi: &MoebiusMap, x: &Point, y: &Point) -> Result<f64> {
    let a = phi.apply(&Point::origin(phi.dim()))?;
    let (px, py) = (phi.apply(x)?, phi.apply(y)?);
    let (ix, iy) = if a.norm() == 0.0 {
        (px, py)
    } else {
        let s = inversion_sending_to_zero(&a)?;
        (s.apply(&px)?, s.apply(&py)?)
    };
    Ok((ix.dist(&iy) - x.dist(y)).abs())
}

/// `(|a*|²−1) / |φ(η)−a*|²` for a boundary point `η`, with `a = φ(0)`.
pub fn boundary_factor(phi: &MoebiusMap, eta: &Point) -> Result<f64> {
    let a = phi.apply(&Point::origin(phi.dim()))?;
    let s = inversion_sending_to_zero(&a)?;
    let image = phi.apply(eta)?;
    let c = s.center().coords();
    Ok(s.radius().powi(2) / dist(image.coords(), c).powi(2))
}

/// Sharp bounds `((1−|a|)/(1+|a|), (1+|a|)/(1−|a|))` on
/// `c(φx, φy) / c(x, y)` for automorphisms with `φ(0) = a`.
pub fn distortion_bounds(a: &Point) -> Result<(f64, f64)> {
    let r = a.norm();
    if r >= 1.0 {
        return Err(Error::InvalidParameter(format!("|a| = {r} must be < 1")));
    }
    Ok(((1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r)))
}

/// The radial configuration attaining the upper distortion bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessWitness {
    pub x: Point,
    pub y: Point,
    pub image_x: Point,
    pub image_y: Point,
    pub c_pair: f64,
    pub c_images: f64,
    pub ratio: f64,
    pub upper_bound: f64,
}

/// For `a = |a|e₁` and `−1 < t < 0`: `x = 0`, `y = te₁`, mapped by the
/// inversion sending `a` to 0.
pub fn sharpness_witness(a: &Point, t: f64) -> Result<SharpnessWitness> {
    let n = a.dim();
    let r = a.coords()[0];
    if a.coords()[1..].iter().any(|&v| v != 0.0) || !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(
            "a must be |a|·e₁ with 0 < |a| < 1".into(),
        ));
    }
    if !(t > -1.0 && t < 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must lie in (−1, 0)")));
    }
    let sigma = inversion_sending_to_zero(a)?;
    let x = Point::origin(n);
    let y = Point::e1(n, t);
    let image_x = sigma.apply(&x)?;
    let image_y = sigma.apply(&y)?;
    let ball = Domain::unit_ball(n);
    let c_pair = metrics::cassinian(&ball, &x, &y)?.value;
    let c_images = metrics::cassinian(&ball, &image_x, &image_y)?.value;
    let (_, upper_bound) = distortion_bounds(a)?;
    Ok(SharpnessWitness {
        x,
        y,
        image_x,
        image_y,
        c_pair,
        c_images,
        ratio: c_images / c_pair,
        upper_bound,
    })
}

/// `c_𝔹(m(x), m(y)) / c_𝔹(x, y)`.
pub fn distortion_ratio(m: &MoebiusMap, x: &Point, y: &Point) -> Result<f64> {
    if x == y {
        return Err(Error::Precondition("distortion ratio of a coincident pair".into()));
    }
    let ball = Domain::unit_ball(m.dim());
    let before = metrics::cassinian(&ball, x, y)?.value;
    let after = metrics::cassinian(&ball, &m.apply(x)?, &m.apply(y)?)?.value;
    Ok(after / before)
}
