//! Cassinian length of polylines and the inner Cassinian metric
//! `c̃_D(x, y) = inf_γ ∫_γ |dz| / δ_D(z)²`.
//!
//! The geodesic solver works on polylines: it builds an admissible initial
//! path (straight segment, a detour around a puncture, or a shortest path
//! on a weighted grid), then runs per-vertex coordinate descent on the
//! exact quadrature length, refining the vertex count until the value
//! settles.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{axpy, dist, dot, lerp, norm, sub, Domain, Point};
use crate::metrics::{self, SolverOptions};
use crate::quadrature;

/// Vertices of a path must keep at least this distance from the boundary.
pub const MIN_PATH_CLEARANCE: f64 = 1e-9;

const QUADRATURE_TOLERANCE: f64 = 1e-9;
const PARTITION_TOLERANCE: f64 = 1e-8;
const PARTITION_MAX_SEGMENTS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthScheme {
    PartitionSum,
    Quadrature,
}

/// A polyline inside a domain together with its Cassinian length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<Point>,
    pub length_value: f64,
    pub scheme: LengthScheme,
}

impl Path {
    pub fn new(d: &Domain, vertices: Vec<Point>, scheme: LengthScheme) -> Result<Self> {
        let length_value = match scheme {
            LengthScheme::PartitionSum => path_length_partition(d, &vertices)?,
            LengthScheme::Quadrature => path_length_integral(d, &vertices)?,
        };
        Ok(Self {
            vertices,
            length_value,
            scheme,
        })
    }

    fn from_raw(d: &Domain, raw: &[Vec<f64>]) -> Result<Self> {
        let vertices = raw
            .iter()
            .map(|v| Point::new(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, vertices, LengthScheme::Quadrature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    PolylineDescent,
    GridDijkstra,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub path: Path,
    pub value: f64,
    pub backend: Backend,
    pub iterations: usize,
    pub refinement_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicOptions {
    /// `PolylineDescent` starts from a straight or detour path,
    /// `GridDijkstra` from a grid shortest path; both are then refined.
    pub backend: Backend,
    pub vertices: usize,
    pub refine_tolerance: f64,
    pub max_vertices: usize,
    /// Grid nodes per axis; defaults to 257 in 2-D and 65 in 3-D.
    pub grid_resolution: Option<usize>,
    pub max_iterations: usize,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        Self {
            backend: Backend::PolylineDescent,
            vertices: 129,
            refine_tolerance: 1e-5,
            max_vertices: 1025,
            grid_resolution: None,
            max_iterations: 5000,
        }
    }
}

impl GeodesicOptions {
    pub fn grid() -> Self {
        Self {
            backend: Backend::GridDijkstra,
            ..Self::default()
        }
    }
}

/// Density `δ_D(a + t(b−a))⁻²` along a segment, with the distance written
/// as a closed-form function of `t`.
enum SegmentDensity {
    Ball {
        radius: f64,
        // |a − c + t(b − a)|² = q0 + 2t·q1 + t²·q2
        q: [f64; 3],
    },
    HalfSpace {
        ha: f64,
        hb: f64,
    },
    Punctured {
        qs: Vec<[f64; 3]>,
    },
}

fn quadratic(a: &[f64], c: &[f64], ab: &[f64]) -> [f64; 3] {
    let ac = sub(a, c);
    [dot(&ac, &ac), dot(&ac, ab), dot(ab, ab)]
}

impl SegmentDensity {
    fn new(d: &Domain, a: &[f64], b: &[f64]) -> Self {
        let ab = sub(b, a);
        match d {
            Domain::Ball { center, radius } => SegmentDensity::Ball {
                radius: *radius,
                q: quadratic(a, center.coords(), &ab),
            },
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => SegmentDensity::HalfSpace {
                ha: dot(a, unit_normal.coords()) - offset,
                hb: dot(b, unit_normal.coords()) - offset,
            },
            Domain::Punctured { punctures } => SegmentDensity::Punctured {
                qs: punctures
                    .iter()
                    .map(|p| quadratic(a, p.coords(), &ab))
                    .collect(),
            },
        }
    }

    fn delta(&self, t: f64) -> f64 {
        let eval = |q: &[f64; 3]| (q[0] + 2.0 * t * q[1] + t * t * q[2]).max(0.0).sqrt();
        match self {
            SegmentDensity::Ball { radius, q } => radius - eval(q),
            SegmentDensity::HalfSpace { ha, hb } => ha + t * (hb - ha),
            SegmentDensity::Punctured { qs } => qs.iter().map(eval).fold(f64::INFINITY, f64::min),
        }
    }

    /// Kinks and peaks of the integrand: closest approach to each puncture
    /// and switches of the nearest puncture.
    fn breakpoints(&self) -> Vec<f64> {
        let SegmentDensity::Punctured { qs } = self else {
            return Vec::new();
        };
        let mut cuts: Vec<f64> = qs
            .iter()
            .filter(|q| q[2] > 0.0)
            .map(|q| -q[1] / q[2])
            .collect();
        for i in 0..qs.len() {
            for j in i + 1..qs.len() {
                let (a, b) = (&qs[i], &qs[j]);
                let slope = 2.0 * (b[1] - a[1]);
                if slope != 0.0 {
                    cuts.push((a[0] - b[0]) / slope);
                }
            }
        }
        cuts.retain(|t| *t > 0.0 && *t < 1.0);
        cuts
    }

    /// Smallest distance to the boundary along the segment.
    fn clearance(&self) -> f64 {
        match self {
            SegmentDensity::Ball { .. } => self.delta(0.0).min(self.delta(1.0)),
            SegmentDensity::HalfSpace { ha, hb } => ha.min(*hb),
            SegmentDensity::Punctured { qs } => qs
                .iter()
                .map(|q| {
                    let t = if q[2] > 0.0 {
                        (-q[1] / q[2]).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    (q[0] + 2.0 * t * q[1] + t * t * q[2]).max(0.0).sqrt()
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// `∫_{[a,b]} |dz| / δ_D(z)²` by adaptive quadrature.
fn segment_integral(d: &Domain, a: &[f64], b: &[f64]) -> f64 {
    let len = dist(a, b);
    if len == 0.0 {
        return 0.0;
    }
    let dens = SegmentDensity::new(d, a, b);
    let cuts = dens.breakpoints();
    quadrature::integrate(
        |t| {
            let delta = dens.delta(t);
            len / (delta * delta)
        },
        0.0,
        1.0,
        &cuts,
        QUADRATURE_TOLERANCE,
        0.0,
        4000,
    )
    .value
}

fn segment_admissible(d: &Domain, a: &[f64], b: &[f64]) -> bool {
    d.contains_raw(a)
        && d.contains_raw(b)
        && SegmentDensity::new(d, a, b).clearance() >= MIN_PATH_CLEARANCE
}

fn validate_polyline(d: &Domain, vertices: &[Point]) -> Result<()> {
    for v in vertices {
        d.interior_distance(v, MIN_PATH_CLEARANCE)?;
    }
    for w in vertices.windows(2) {
        let dens = SegmentDensity::new(d, w[0].coords(), w[1].coords());
        let c = dens.clearance();
        if c < MIN_PATH_CLEARANCE {
            return Err(Error::TooCloseToBoundary {
                point: lerp(w[0].coords(), w[1].coords(), 0.5),
                distance: c,
                min: MIN_PATH_CLEARANCE,
            });
        }
    }
    Ok(())
}

/// Cassinian length as the limit of partition sums `Σ c_D(γ(tᵢ), γ(tᵢ₊₁))`,
/// bisecting every segment until successive sums agree to 1e−8 relative.
pub fn path_length_partition(d: &Domain, vertices: &[Point]) -> Result<f64> {
    validate_polyline(d, vertices)?;
    let opts = SolverOptions::local();
    // Chords far shorter than the clearance have a single smooth maximizer
    // near the closest boundary point; a light scan suffices there.
    let short = SolverOptions {
        slice_samples: 64,
        refine_candidates: 1,
        multistart: 0,
        ..SolverOptions::default()
    };
    let mut segments: Vec<(Point, Point)> = vertices
        .windows(2)
        .filter(|w| w[0] != w[1])
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    if segments.is_empty() {
        return Ok(0.0);
    }
    let sum = |segs: &[(Point, Point)]| -> Result<f64> {
        segs.iter()
            .map(|(a, b)| {
                let (ac, bc) = (a.coords(), b.coords());
                let clear = d.boundary_distance_raw(ac).min(d.boundary_distance_raw(bc));
                if a.dist(b) > 0.1 * clear {
                    return Ok(metrics::cassinian_with(d, a, b, &opts)?.value);
                }
                match chord_cassinian(d, ac, bc) {
                    Some(v) => Ok(v),
                    None => Ok(metrics::cassinian_with(d, a, b, &short)?.value),
                }
            })
            .sum()
    };
    let mut value = sum(&segments)?;
    while segments.len() < PARTITION_MAX_SEGMENTS {
        segments = segments
            .into_iter()
            .flat_map(|(a, b)| {
                let m = Point::from_vec_unchecked(lerp(a.coords(), b.coords(), 0.5));
                [(a, m.clone()), (m, b)]
            })
            .collect();
        let next = sum(&segments)?;
        let change = (next - value).abs();
        value = next;
        if change < PARTITION_TOLERANCE * value {
            break;
        }
    }
    Ok(value)
}

/// `c_D(a, b)` for a chord much shorter than its clearance. In a ball or a
/// half-space the extremal boundary point then lies in the plane spanned by
/// the chord and the center (or normal), next to the boundary point nearest
/// the midpoint, and a safeguarded Newton iteration along that boundary
/// curve finds it. `None` when the iteration leaves its safe range or the
/// domain is punctured.
fn chord_cassinian(d: &Domain, a: &[f64], b: &[f64]) -> Option<f64> {
    let w = sub(b, a);
    let len = norm(&w);
    if len == 0.0 {
        return Some(0.0);
    }
    let m = lerp(a, b, 0.5);
    let unit = |v: Vec<f64>| {
        let l = norm(&v);
        (l > 1e-14).then(|| v.into_iter().map(|c| c / l).collect::<Vec<f64>>())
    };
    let reject = |v: &[f64], e: &[f64]| -> Vec<f64> {
        let c = dot(v, e);
        v.iter().zip(e).map(|(vi, ei)| vi - c * ei).collect()
    };
    // Newton on φ(s) = ln u(s) + ln v(s), with u, v the squared distances
    // from a and b to the boundary point at parameter s.
    let newton = |f: &dyn Fn(f64) -> [f64; 6], cap: f64| -> Option<f64> {
        let mut s = 0.0;
        for _ in 0..60 {
            let [u, u1, u2, v, v1, v2] = f(s);
            let g1 = u1 / u + v1 / v;
            let g2 = u2 / u - (u1 / u).powi(2) + v2 / v - (v1 / v).powi(2);
            if !(g2 > 0.0) {
                return None;
            }
            let step = g1 / g2;
            if step.abs() > cap {
                return None;
            }
            s -= step;
            if step.abs() <= 1e-15 * cap.max(s.abs()) {
                let [u, _, _, v, _, _] = f(s);
                return Some(len / (u * v).sqrt());
            }
        }
        None
    };
    match d {
        Domain::Ball { center, radius } => {
            let c = center.coords();
            let e1 = unit(sub(&m, c))?;
            let Some(e2) = unit(reject(&w, &e1)) else {
                // Chord along a radius: the nearest boundary point is extremal.
                let p: Vec<f64> = c.iter().zip(&e1).map(|(ci, ei)| ci + radius * ei).collect();
                return Some(len / (dist(a, &p) * dist(b, &p)));
            };
            let plane = |z: &[f64]| {
                let zc = sub(z, c);
                (dot(&zc, &e1), dot(&zc, &e2))
            };
            let (a1, a2) = plane(a);
            let (b1, b2) = plane(b);
            let r = *radius;
            let f = |t: f64| {
                let (sn, cs) = t.sin_cos();
                let sq = |p1: f64, p2: f64| {
                    let (d1, d2) = (p1 - r * cs, p2 - r * sn);
                    (
                        d1 * d1 + d2 * d2,
                        2.0 * r * (p1 * sn - p2 * cs),
                        2.0 * r * (p1 * cs + p2 * sn),
                    )
                };
                let (u, u1, u2) = sq(a1, a2);
                let (v, v1, v2) = sq(b1, b2);
                [u, u1, u2, v, v1, v2]
            };
            newton(&f, 0.5)
        }
        Domain::HalfSpace {
            unit_normal,
            offset,
        } => {
            let nu = unit_normal.coords();
            let height = |z: &[f64]| dot(z, nu) - offset;
            let (ha, hb, hm) = (height(a), height(b), height(&m));
            let q: Vec<f64> = m.iter().zip(nu).map(|(mi, ni)| mi - hm * ni).collect();
            let Some(e2) = unit(reject(&w, nu)) else {
                return Some(len / (dist(a, &q) * dist(b, &q)));
            };
            let (a2, b2) = (dot(&sub(a, &q), &e2), dot(&sub(b, &q), &e2));
            let f = |s: f64| {
                [
                    ha * ha + (a2 - s).powi(2),
                    -2.0 * (a2 - s),
                    2.0,
                    hb * hb + (b2 - s).powi(2),
                    -2.0 * (b2 - s),
                    2.0,
                ]
            };
            newton(&f, hm)
        }
        Domain::Punctured { .. } => None,
    }
}

/// Cassinian length as `∫ |dz| / δ_D(z)²` along the polyline.
pub fn path_length_integral(d: &Domain, vertices: &[Point]) -> Result<f64> {
    validate_polyline(d, vertices)?;
    Ok(vertices
        .windows(2)
        .map(|w| segment_integral(d, w[0].coords(), w[1].coords()))
        .sum())
}

/// `|x−y| / (δ(x)(δ(x) − |x−y|))`, valid when `|x−y| < δ(x)`.
pub fn inner_upper_bound(d: &Domain, x: &Point, y: &Point) -> Result<f64> {
    let delta = d.interior_distance(x, f64::MIN_POSITIVE)?;
    d.check_dim(y)?;
    let r = x.dist(y);
    if r >= delta {
        return Err(Error::Precondition(format!(
            "|x−y| = {r} must be smaller than δ(x) = {delta}"
        )));
    }
    Ok(r / (delta * (delta - r)))
}

/// Exact `c̃_D` where known: a single puncture (any pair), or a ball with
/// one endpoint at its center.
pub fn closed_form_inner(d: &Domain, x: &Point, y: &Point) -> Option<f64> {
    if x.dim() != d.dim() || y.dim() != d.dim() {
        return None;
    }
    if x == y && d.contains(x).ok()? {
        return Some(0.0);
    }
    match d {
        Domain::Punctured { punctures } if punctures.len() == 1 => {
            let p = punctures[0].coords();
            let (rx, ry) = (dist(x.coords(), p), dist(y.coords(), p));
            (rx > 0.0 && ry > 0.0).then(|| x.dist(y) / (rx * ry))
        }
        Domain::Ball { center, radius } => {
            let other = if x == center {
                y
            } else if y == center {
                x
            } else {
                return None;
            };
            let r = other.dist(center);
            (r < *radius).then(|| r / (radius * (radius - r)))
        }
        _ => None,
    }
}

/// Approximates `c̃_D(x, y)` by a near-geodesic polyline.
pub fn inner_cassinian(
    d: &Domain,
    x: &Point,
    y: &Point,
    opts: &GeodesicOptions,
) -> Result<GeodesicResult> {
    d.interior_distance(x, MIN_PATH_CLEARANCE)?;
    d.interior_distance(y, MIN_PATH_CLEARANCE)?;
    let n = d.dim();
    if opts.backend == Backend::GridDijkstra && !(2..=3).contains(&n) {
        return Err(Error::Unsupported(format!(
            "grid backend needs dimension 2 or 3, got {n}"
        )));
    }
    if opts.backend == Backend::ClosedForm {
        return Err(Error::Unsupported(
            "closed forms are available through closed_form_inner".into(),
        ));
    }
    if x == y {
        return Ok(GeodesicResult {
            path: Path {
                vertices: vec![x.clone()],
                length_value: 0.0,
                scheme: LengthScheme::Quadrature,
            },
            value: 0.0,
            backend: Backend::ClosedForm,
            iterations: 0,
            refinement_gap: 0.0,
        });
    }

    let (xs, ys) = (x.coords(), y.coords());
    let initial = match opts.backend {
        Backend::GridDijkstra => {
            let res = opts
                .grid_resolution
                .unwrap_or(if n == 2 { 257 } else { 65 });
            grid_path(d, xs, ys, res)?
        }
        _ => {
            let mut candidates = initial_candidates(d, xs, ys)?;
            if candidates.len() == 1 {
                candidates.pop().unwrap()
            } else {
                // Settle each class on coarse polylines, keep the shortest.
                let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
                for c in candidates {
                    let mut v = resample_by_length(d, &c, 9);
                    descend(d, &mut v, opts.max_iterations);
                    let mut v = resample_by_length(d, &v, 17);
                    descend(d, &mut v, opts.max_iterations);
                    let len = polyline_integral(d, &v);
                    if best.as_ref().map_or(true, |b| len < b.0) {
                        best = Some((len, v));
                    }
                }
                best.expect("at least one candidate").1
            }
        }
    };

    // Coarse-to-fine warm start up to the working vertex count.
    let mut count = 9.min(opts.vertices.max(2));
    let mut verts = resample_by_length(d, &initial, count);
    let mut iterations = 0;
    loop {
        iterations += descend(d, &mut verts, opts.max_iterations);
        if count >= opts.vertices {
            break;
        }
        count = (2 * count - 1).min(opts.vertices);
        verts = resample_by_length(d, &verts, count);
    }

    let mut value = polyline_integral(d, &verts);
    let mut gap = f64::INFINITY;
    while verts.len() < opts.max_vertices {
        let mut finer = resample_by_length(d, &verts, 2 * verts.len() - 1);
        iterations += descend(d, &mut finer, opts.max_iterations);
        let next = polyline_integral(d, &finer);
        gap = (next - value).abs();
        verts = finer;
        value = next;
        if gap < opts.refine_tolerance * value {
            break;
        }
    }
    let path = Path::from_raw(d, &verts)?;
    Ok(GeodesicResult {
        value: path.length_value,
        path,
        backend: opts.backend,
        iterations,
        refinement_gap: if gap.is_finite() { gap } else { 0.0 },
    })
}

fn polyline_integral(d: &Domain, verts: &[Vec<f64>]) -> f64 {
    verts
        .windows(2)
        .map(|w| segment_integral(d, &w[0], &w[1]))
        .sum()
}

/// Straight segment when it keeps clear of the boundary; otherwise a
/// detour around the nearest puncture, then a grid path as last resort.
fn initial_polyline(d: &Domain, x: &[f64], y: &[f64]) -> Result<Vec<Vec<f64>>> {
    if let Some(straight) = clear_straight(d, x, y) {
        return Ok(straight);
    }
    if let Domain::Punctured { punctures } = d {
        let nearest = punctures
            .iter()
            .map(|p| p.coords())
            .min_by(|a, b| segment_gap(a, x, y).total_cmp(&segment_gap(b, x, y)))
            .expect("punctured domain has a puncture");
        if let Some(path) = detours(d, nearest, x, y).into_iter().next() {
            return Ok(path);
        }
    }
    if (2..=3).contains(&d.dim()) {
        return grid_path(d, x, y, if d.dim() == 2 { 257 } else { 65 });
    }
    if segment_admissible(d, x, y) {
        return Ok(vec![x.to_vec(), y.to_vec()]);
    }
    Err(Error::NoInitialPath {
        from: x.to_vec(),
        to: y.to_vec(),
    })
}

/// Several punctures give several homotopy classes of paths: the straight
/// segment plus a detour on each side of every puncture.
fn initial_candidates(d: &Domain, x: &[f64], y: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    match d {
        Domain::Punctured { punctures } if punctures.len() > 1 => {
            let mut out: Vec<Vec<Vec<f64>>> = clear_straight(d, x, y).into_iter().collect();
            for p in punctures {
                out.extend(detours(d, p.coords(), x, y));
            }
            if out.is_empty() {
                out.push(initial_polyline(d, x, y)?);
            }
            Ok(out)
        }
        _ => Ok(vec![initial_polyline(d, x, y)?]),
    }
}

fn clear_straight(d: &Domain, x: &[f64], y: &[f64]) -> Option<Vec<Vec<f64>>> {
    let wanted = MIN_PATH_CLEARANCE
        .max(0.1 * d.boundary_distance_raw(x).min(d.boundary_distance_raw(y)));
    (SegmentDensity::new(d, x, y).clearance() >= wanted).then(|| vec![x.to_vec(), y.to_vec()])
}

fn segment_gap(p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let xy = sub(y, x);
    let t = (dot(&sub(p, x), &xy) / dot(&xy, &xy)).clamp(0.0, 1.0);
    dist(p, &lerp(x, y, t))
}

/// Three-vertex paths through `p + s·u`, with `u` perpendicular to `y − x`
/// and `s` half the smallest distance among `x`, `y`, `p`. The side the
/// segment already passes on comes first; otherwise the lexicographically
/// smaller bend point.
fn detours(d: &Domain, p: &[f64], x: &[f64], y: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let xy = sub(y, x);
    let l2 = dot(&xy, &xy);
    let t = (dot(&sub(p, x), &xy) / l2).clamp(0.0, 1.0);
    let foot = lerp(x, y, t);
    let scale = 0.5 * dist(x, y).min(dist(x, p)).min(dist(y, p));
    let unit = |v: Vec<f64>| {
        let l = norm(&v);
        (l > 1e-12).then(|| v.into_iter().map(|c| c / l).collect::<Vec<f64>>())
    };
    let perp = |v: &[f64]| {
        let c = dot(v, &xy) / l2;
        v.iter().zip(&xy).map(|(vi, di)| vi - c * di).collect::<Vec<f64>>()
    };
    let bend = |u: &[f64], s: f64| -> Vec<f64> { p.iter().zip(u).map(|(pi, ui)| pi + s * ui).collect() };
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if let Some(u) = unit(perp(&sub(&foot, p))) {
        let neg = u.iter().map(|c| -c).collect();
        dirs.push(u);
        dirs.push(neg);
    } else if let Some(u) = (0..x.len()).find_map(|k| {
        let mut e = vec![0.0; x.len()];
        e[k] = 1.0;
        unit(perp(&e))
    }) {
        let neg: Vec<f64> = u.iter().map(|c| -c).collect();
        let mut pair = [u, neg];
        pair.sort_by(|a, b| {
            bend(a, scale)
                .partial_cmp(&bend(b, scale))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        dirs.extend(pair);
    }
    dirs.iter()
        .filter_map(|u| {
            [scale, 2.0 * scale, 0.5 * scale].into_iter().find_map(|s| {
                let w = bend(u, s);
                (segment_admissible(d, x, &w) && segment_admissible(d, &w, y))
                    .then(|| vec![x.to_vec(), w, y.to_vec()])
            })
        })
        .collect()
}

/// Resample by Euclidean arclength to `count` vertices; if a chord of the
/// resampled polyline is not admissible, use more vertices.
fn resample_admissible(d: &Domain, poly: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let mut k = count.max(2);
    loop {
        let out = resample(poly, k);
        if out.windows(2).all(|w| segment_admissible(d, &w[0], &w[1])) || k > 64 * poly.len() {
            return out;
        }
        k = 2 * k - 1;
    }
}

fn resample(poly: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let mut cum = vec![0.0];
    for w in poly.windows(2) {
        cum.push(cum.last().unwrap() + dist(&w[0], &w[1]));
    }
    let total = *cum.last().unwrap();
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for i in 0..count {
        if i == 0 {
            out.push(poly[0].clone());
            continue;
        }
        if i == count - 1 {
            out.push(poly[poly.len() - 1].clone());
            continue;
        }
        let s = total * i as f64 / (count - 1) as f64;
        while seg + 1 < cum.len() - 1 && cum[seg + 1] < s {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let t = if span > 0.0 { (s - cum[seg]) / span } else { 0.0 };
        out.push(lerp(&poly[seg], &poly[seg + 1], t));
    }
    out
}

/// Resample to `count` vertices equally spaced in Cassinian arclength along
/// the polyline, falling back to Euclidean spacing if a chord of the result
/// is not admissible.
fn resample_by_length(d: &Domain, poly: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    // Fine pieces with their lengths.
    let mut pieces: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    for w in poly.windows(2) {
        let c = SegmentDensity::new(d, &w[0], &w[1]).clearance();
        let q = ((8.0 * dist(&w[0], &w[1]) / c).ceil() as usize).clamp(1, 64);
        for j in 0..q {
            let a = lerp(&w[0], &w[1], j as f64 / q as f64);
            let b = lerp(&w[0], &w[1], (j + 1) as f64 / q as f64);
            let len = segment_integral(d, &a, &b);
            pieces.push((a, b, len));
        }
    }
    let total: f64 = pieces.iter().map(|p| p.2).sum();
    if !(total.is_finite() && total > 0.0) || count < 2 {
        return resample_admissible(d, poly, count);
    }
    let mut out = Vec::with_capacity(count);
    out.push(poly[0].clone());
    let (mut k, mut before) = (0, 0.0);
    for i in 1..count - 1 {
        let s = total * i as f64 / (count - 1) as f64;
        while k + 1 < pieces.len() && before + pieces[k].2 < s {
            before += pieces[k].2;
            k += 1;
        }
        let (a, b, len) = &pieces[k];
        let t = if *len > 0.0 { ((s - before) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(lerp(a, b, t));
    }
    out.push(poly[poly.len() - 1].clone());
    if out.windows(2).all(|w| segment_admissible(d, &w[0], &w[1])) {
        out
    } else {
        resample_admissible(d, poly, count)
    }
}

/// `δ_D(z)` and its gradient (a subgradient where `δ_D` has a kink).
fn delta_with_gradient(d: &Domain, z: &[f64], grad: &mut [f64]) -> f64 {
    match d {
        Domain::Ball { center, radius } => {
            let r = dist(z, center.coords());
            for ((g, zk), ck) in grad.iter_mut().zip(z).zip(center.coords()) {
                *g = if r > 0.0 { -(zk - ck) / r } else { 0.0 };
            }
            radius - r
        }
        Domain::HalfSpace {
            unit_normal,
            offset,
        } => {
            grad.copy_from_slice(unit_normal.coords());
            dot(z, unit_normal.coords()) - offset
        }
        Domain::Punctured { punctures } => {
            let p = punctures
                .iter()
                .map(|p| p.coords())
                .min_by(|a, b| dist(z, a).total_cmp(&dist(z, b)))
                .expect("punctured domain has a puncture");
            let r = dist(z, p);
            for ((g, zk), pk) in grad.iter_mut().zip(z).zip(p) {
                *g = if r > 0.0 { (zk - pk) / r } else { 0.0 };
            }
            r
        }
    }
}

/// Discrete path energy `Σ_k S_k²`, where `S_k` is the Cassinian length
/// of segment `k` by a fixed Gauss–Legendre rule. For a fixed vertex count
/// its minimizers are near-geodesics with segments of equal length.
struct PathEnergy<'a> {
    d: &'a Domain,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    region: Option<(Vec<f64>, f64)>,
}

impl PathEnergy<'_> {
    /// Segment length and its gradients with respect to both endpoints.
    fn segment(&self, a: &[f64], b: &[f64], ga: &mut [f64], gb: &mut [f64], z: &mut [f64], gz: &mut [f64]) -> f64 {
        let len = dist(a, b);
        ga.fill(0.0);
        gb.fill(0.0);
        let mut mean = 0.0;
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            for ((zk, ak), bk) in z.iter_mut().zip(a).zip(b) {
                *zk = ak + t * (bk - ak);
            }
            let delta = delta_with_gradient(self.d, z, gz);
            let g = 1.0 / (delta * delta);
            mean += w * g;
            // ∇(δ⁻²) = −2 δ⁻³ ∇δ, weighted by the segment length.
            let c = -2.0 * w * len * g / delta;
            for k in 0..z.len() {
                ga[k] += c * (1.0 - t) * gz[k];
                gb[k] += c * t * gz[k];
            }
        }
        if len > 0.0 {
            for k in 0..z.len() {
                let u = (b[k] - a[k]) / len;
                ga[k] -= u * mean;
                gb[k] += u * mean;
            }
        }
        len * mean
    }

    /// Energy and gradient over the interior vertices, or `None` if the
    /// polyline is not admissible.
    fn eval(&self, verts: &[Vec<f64>], grad: &mut [f64]) -> Option<f64> {
        let m = verts.len();
        let n = verts[0].len();
        if !verts.windows(2).all(|w| segment_admissible(self.d, &w[0], &w[1])) {
            return None;
        }
        if let Some((anchor, radius)) = &self.region {
            if verts.iter().any(|v| dist(v, anchor) > *radius) {
                return None;
            }
        }
        grad.fill(0.0);
        let (mut ga, mut gb, mut z, mut gz) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut total = 0.0;
        for k in 0..m - 1 {
            let s = self.segment(&verts[k], &verts[k + 1], &mut ga, &mut gb, &mut z, &mut gz);
            total += s * s;
            if k >= 1 {
                for j in 0..n {
                    grad[(k - 1) * n + j] += 2.0 * s * ga[j];
                }
            }
            if k + 1 <= m - 2 {
                for j in 0..n {
                    grad[k * n + j] += 2.0 * s * gb[j];
                }
            }
        }
        Some(total)
    }
}

/// Ball the vertices of a path in a punctured space must stay in. Far out
/// the density decays like `|z|⁻²`, so excursions toward infinity are cheap
/// and unconstrained descent can push vertices to where segment quadrature
/// loses all precision. Leaving out paths beyond radius `R` changes the
/// infimum by at most about `2/R`.
fn working_region(d: &Domain, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, f64)> {
    let Domain::Punctured { punctures } = d else {
        return None;
    };
    let mut anchor = vec![0.0; x.len()];
    for p in punctures {
        anchor = axpy(1.0 / punctures.len() as f64, p.coords(), &anchor);
    }
    let scale = punctures
        .iter()
        .map(|p| dist(p.coords(), &anchor))
        .chain([dist(x, &anchor), dist(y, &anchor)])
        .fold(1.0, f64::max);
    Some((anchor, WORKING_RADIUS * scale))
}

/// Radius of the working region relative to the configuration size.
const WORKING_RADIUS: f64 = 1e4;

/// Minimizes the path energy over the interior vertices with L-BFGS and a
/// backtracking line search that rejects inadmissible polylines and moves
/// no vertex by more than half its distance to the boundary. Returns the
/// number of iterations.
fn descend(d: &Domain, verts: &mut [Vec<f64>], max_iterations: usize) -> usize {
    let m = verts.len();
    if m < 3 {
        return 0;
    }
    let n = verts[0].len();
    let dim = (m - 2) * n;

    // Enough nodes that each node spacing is small against the clearance.
    let ratio = verts
        .windows(2)
        .map(|w| {
            let c = SegmentDensity::new(d, &w[0], &w[1]).clearance();
            dist(&w[0], &w[1]) / c
        })
        .fold(0.0, f64::max);
    let k = ((4.0 * ratio).ceil() as usize).clamp(4, 48);
    let (nodes, weights) = quadrature::gauss_legendre(k);
    let energy = PathEnergy {
        d,
        nodes,
        weights,
        region: working_region(d, &verts[0], &verts[m - 1]),
    };

    const MEMORY: usize = 8;
    let mut grad = vec![0.0; dim];
    let Some(mut value) = energy.eval(verts, &mut grad) else {
        return 0;
    };
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::with_capacity(MEMORY);
    let mut trial = verts.to_vec();
    let mut trial_grad = vec![0.0; dim];
    let mut scale = vec![1.0; dim];
    let mut quiet = 0;
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        // Diagonal preconditioner: the energy's curvature at a vertex scales
        // like δ⁻⁴ there.
        for i in 1..m - 1 {
            let delta = d.boundary_distance_raw(&verts[i]);
            let w = delta.powi(4);
            scale[(i - 1) * n..i * n].iter_mut().for_each(|c| *c = w);
        }
        // Two-loop recursion for the search direction.
        let mut dir: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &dir);
            for (di, yi) in dir.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match history.last() {
            Some((s, y, _)) => {
                let yhy: f64 = y.iter().zip(&scale).map(|(yi, c)| c * yi * yi).sum();
                dot(s, y) / yhy
            }
            None => 1.0,
        };
        dir.iter_mut().zip(&scale).for_each(|(di, c)| *di *= gamma * c);
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &dir);
            for (di, si) in dir.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&dir, &grad);
        if !(slope < 0.0) {
            history.clear();
            dir = grad.iter().zip(&scale).map(|(g, c)| -c * g).collect();
            slope = dot(&dir, &grad);
            if slope == 0.0 {
                break;
            }
        }

        // Cap the step so that every vertex stays well inside its own
        // clearance ball; on the first step also against segment length.
        let mut step: f64 = 1.0;
        for i in 1..m - 1 {
            let mv = norm(&dir[(i - 1) * n..i * n]);
            if mv > 0.0 {
                let mut cap = 0.5 * d.boundary_distance_raw(&verts[i]);
                if history.is_empty() {
                    cap = cap.min(0.25 * dist(&verts[i - 1], &verts[i]).min(dist(&verts[i], &verts[i + 1])));
                }
                step = step.min(cap / mv);
            }
        }
        let mut accepted = None;
        for _ in 0..60 {
            for i in 1..m - 1 {
                for j in 0..n {
                    trial[i][j] = verts[i][j] + step * dir[(i - 1) * n + j];
                }
            }
            if let Some(v) = energy.eval(&trial, &mut trial_grad) {
                if v <= value + 1e-4 * step * slope {
                    accepted = Some(v);
                    break;
                }
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            break;
        };
        let s: Vec<f64> = dir.iter().map(|di| step * di).collect();
        let y: Vec<f64> = trial_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if history.len() == MEMORY {
                history.remove(0);
            }
            history.push((s, y, 1.0 / sy));
        }
        for i in 1..m - 1 {
            verts[i].copy_from_slice(&trial[i]);
        }
        std::mem::swap(&mut grad, &mut trial_grad);
        let decrease = value - next;
        value = next;
        quiet = if decrease <= 1e-10 * value { quiet + 1 } else { 0 };
        if quiet >= 2 {
            break;
        }
    }
    iterations
}

#[derive(Clone, Copy, PartialEq)]
struct Cost(f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Shortest path on a regular grid (8-neighbour in 2-D, 26 in 3-D) with
/// edge weight `length × mean(δ⁻²)` over the endpoints. The grid covers the
/// bounding box of `{x, y}` inflated by 50% plus the larger endpoint δ.
fn grid_path(d: &Domain, x: &[f64], y: &[f64], resolution: usize) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let res = resolution.max(3);
    let pad = d.boundary_distance_raw(x).max(d.boundary_distance_raw(y));
    let lo: Vec<f64> = (0..n)
        .map(|k| x[k].min(y[k]) - 0.25 * (x[k] - y[k]).abs() - pad)
        .collect();
    let hi: Vec<f64> = (0..n)
        .map(|k| x[k].max(y[k]) + 0.25 * (x[k] - y[k]).abs() + pad)
        .collect();
    let h: Vec<f64> = (0..n).map(|k| (hi[k] - lo[k]) / (res - 1) as f64).collect();
    let total = res.pow(n as u32);
    let coords = |mut idx: usize| -> Vec<f64> {
        let mut c = vec![0.0; n];
        for k in 0..n {
            c[k] = lo[k] + h[k] * (idx % res) as f64;
            idx /= res;
        }
        c
    };
    let weight: Vec<f64> = (0..total)
        .map(|i| {
            let c = coords(i);
            let delta = d.boundary_distance_raw(&c);
            if d.contains_raw(&c) && delta >= MIN_PATH_CLEARANCE {
                1.0 / (delta * delta)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let nearest = |p: &[f64]| -> Option<usize> {
        (0..total)
            .filter(|&i| weight[i].is_finite() && segment_admissible(d, p, &coords(i)))
            .min_by(|&a, &b| dist(p, &coords(a)).total_cmp(&dist(p, &coords(b))))
    };
    let no_path = || Error::NoInitialPath {
        from: x.to_vec(),
        to: y.to_vec(),
    };
    let start = nearest(x).ok_or_else(no_path)?;
    let goal = nearest(y).ok_or_else(no_path)?;

    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let o = (c % 3) as i64 - 1;
                    c /= 3;
                    o
                })
                .collect::<Vec<i64>>()
        })
        .filter(|o| o.iter().any(|&v| v != 0))
        .collect();
    let punctured = matches!(d, Domain::Punctured { .. });
    let mut best = vec![f64::INFINITY; total];
    let mut prev = vec![usize::MAX; total];
    let mut heap = BinaryHeap::new();
    best[start] = 0.0;
    heap.push(Reverse((Cost(0.0), start)));
    while let Some(Reverse((Cost(cost), i))) = heap.pop() {
        if i == goal {
            break;
        }
        if cost > best[i] {
            continue;
        }
        let mut idx = vec![0i64; n];
        let mut r = i;
        for v in idx.iter_mut() {
            *v = (r % res) as i64;
            r /= res;
        }
        let ci = coords(i);
        for o in &offsets {
            let mut j = 0usize;
            let mut stride = 1usize;
            let mut ok = true;
            for k in 0..n {
                let v = idx[k] + o[k];
                if v < 0 || v >= res as i64 {
                    ok = false;
                    break;
                }
                j += v as usize * stride;
                stride *= res;
            }
            if !ok || !weight[j].is_finite() {
                continue;
            }
            let cj = coords(j);
            if punctured && !segment_admissible(d, &ci, &cj) {
                continue;
            }
            let c = cost + dist(&ci, &cj) * 0.5 * (weight[i] + weight[j]);
            if c < best[j] {
                best[j] = c;
                prev[j] = i;
                heap.push(Reverse((Cost(c), j)));
            }
        }
    }
    if !best[goal].is_finite() {
        return Err(no_path());
    }
    let mut nodes = vec![goal];
    while *nodes.last().unwrap() != start {
        nodes.push(prev[*nodes.last().unwrap()]);
    }
    nodes.reverse();
    let mut poly = vec![x.to_vec()];
    poly.extend(nodes.into_iter().map(coords));
    poly.push(y.to_vec());
    poly.dedup();
    Ok(poly)
}
