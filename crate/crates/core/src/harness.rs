//! Seeded randomized verification of the metric inequalities.
//!
//! Each suite draws point pairs (uniform samples plus a fixed set of stress
//! pairs near the boundary, along radii and across the domain), evaluates
//! one or more comparisons `lhs ≤ rhs` per pair and records every pair
//! where `lhs − rhs` exceeds the allowed slack. Reports serialize to JSON;
//! apart from `runtime_ms` they depend only on the suite spec.

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orthonormal_complement, random_in_unit_ball, Domain, Point};
use crate::inner::{self, GeodesicOptions};
use crate::metrics::{self, MetricValue};
use crate::moebius::{self, MoebiusMap, OrthogonalMap};

/// Smallest boundary distance of a generated sample point.
pub const MIN_SAMPLE_DISTANCE: f64 = 1e-9;

/// Largest `|a|` of the random automorphisms in the distortion suite.
pub const MAX_AUTOMORPHISM_NORM: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckId {
    #[serde(rename = "sinh_rho_le_c")]
    SinhRhoLeC,
    #[serde(rename = "rho_le_2c")]
    RhoLe2C,
    #[serde(rename = "j_le_factor_c")]
    JLeFactorC,
    #[serde(rename = "c_le_j_lambda")]
    CLeJLambda,
    #[serde(rename = "visual_angle")]
    VisualAngle,
    #[serde(rename = "p_le_sqrt2_delta_c")]
    PLeSqrt2DeltaC,
    #[serde(rename = "moebius_distortion")]
    MoebiusDistortion,
    #[serde(rename = "inner_metric")]
    InnerMetric,
}

impl CheckId {
    pub const ALL: [CheckId; 8] = [
        CheckId::SinhRhoLeC,
        CheckId::RhoLe2C,
        CheckId::JLeFactorC,
        CheckId::CLeJLambda,
        CheckId::VisualAngle,
        CheckId::PLeSqrt2DeltaC,
        CheckId::MoebiusDistortion,
        CheckId::InnerMetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::SinhRhoLeC => "sinh_rho_le_c",
            CheckId::RhoLe2C => "rho_le_2c",
            CheckId::JLeFactorC => "j_le_factor_c",
            CheckId::CLeJLambda => "c_le_j_lambda",
            CheckId::VisualAngle => "visual_angle",
            CheckId::PLeSqrt2DeltaC => "p_le_sqrt2_delta_c",
            CheckId::MoebiusDistortion => "moebius_distortion",
            CheckId::InnerMetric => "inner_metric",
        }
    }

    /// Tolerance used when a manifest does not give one.
    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckId::MoebiusDistortion => 1e-8,
            CheckId::InnerMetric => 1e-4,
            _ => 1e-10,
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check id `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub check_id: CheckId,
    pub domain: Domain,
    pub dimension: usize,
    pub sample_count: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_bound: Option<f64>,
    pub tolerance: f64,
}

impl SuiteSpec {
    pub fn new(check_id: CheckId, domain: Domain, sample_count: usize, seed: u64) -> Self {
        Self {
            check_id,
            dimension: domain.dim(),
            domain,
            sample_count,
            seed,
            lambda_bound: None,
            tolerance: check_id.default_tolerance(),
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda_bound = Some(lambda);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 1 {
            return Err(Error::InvalidParameter("sample_count must be at least 1".into()));
        }
        if self.dimension != self.domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: self.domain.dim(),
            });
        }
        if let Some(l) = self.lambda_bound {
            if !(0.0..1.0).contains(&l) {
                return Err(Error::InvalidParameter(format!(
                    "lambda_bound must lie in [0, 1), got {l}"
                )));
            }
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be a nonnegative number, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// One comparison `lhs ≤ rhs` on one sample pair that failed or came close.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub form: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; positive means the inequality fails before tolerance.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialRatio {
    pub norm: f64,
    pub ratio: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRatio {
    pub a: f64,
    pub t: f64,
    pub ratio: f64,
    pub upper_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub check_id: CheckId,
    pub domain: Domain,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_bound: Option<f64>,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    /// Pairs with `lhs > rhs` that stay within the allowed slack.
    pub warnings: Vec<Violation>,
    /// Largest `lhs / (rhs + allowed slack)`; at most 1 without violations.
    pub worst_slack_ratio: f64,
    /// Largest `lhs / rhs`.
    pub sharpest_ratio: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radial_ratios: Vec<RadialRatio>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness_ratios: Vec<WitnessRatio>,
    pub runtime_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub suites: Vec<SuiteReport>,
    pub total_violations: usize,
    pub passed: bool,
}

impl AggregateReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// All checks for `n ∈ {2, 3}`. Fuzz suites use `samples` pairs; the
/// distortion suite at most 1000 and the inner-metric suites at most 100,
/// since every one of their samples runs a geodesic solve.
pub fn default_manifest(samples: usize, seed: u64) -> Vec<SuiteSpec> {
    let mut out = Vec::new();
    for n in [2, 3] {
        let ball = Domain::unit_ball(n);
        let punctured = Domain::punctured(vec![Point::origin(n)]).expect("one puncture");
        out.push(SuiteSpec::new(CheckId::SinhRhoLeC, ball.clone(), samples, seed));
        out.push(SuiteSpec::new(CheckId::RhoLe2C, ball.clone(), samples, seed));
        out.push(SuiteSpec::new(CheckId::JLeFactorC, ball.clone(), samples, seed));
        out.push(SuiteSpec::new(CheckId::JLeFactorC, punctured.clone(), samples, seed));
        for lambda in [0.5, 0.9] {
            out.push(SuiteSpec::new(CheckId::CLeJLambda, ball.clone(), samples, seed).with_lambda(lambda));
        }
        out.push(SuiteSpec::new(CheckId::VisualAngle, ball.clone(), samples, seed));
        if n == 2 {
            out.push(SuiteSpec::new(CheckId::VisualAngle, ball.clone(), samples, seed).with_lambda(0.5));
        }
        out.push(SuiteSpec::new(CheckId::PLeSqrt2DeltaC, ball.clone(), samples, seed));
        out.push(SuiteSpec::new(CheckId::PLeSqrt2DeltaC, punctured.clone(), samples, seed));
        out.push(SuiteSpec::new(CheckId::MoebiusDistortion, ball.clone(), samples.min(1000), seed));
        out.push(SuiteSpec::new(CheckId::InnerMetric, ball, samples.min(100), seed));
        out.push(SuiteSpec::new(CheckId::InnerMetric, punctured, samples.min(100), seed));
    }
    out
}

/// Point pairs of a suite with lazily computed Cassinian values, shared by
/// suites drawing from the same distribution.
struct SampleSet {
    domain: Domain,
    pairs: Vec<(Point, Point)>,
    cassinian: OnceLock<Result<Vec<MetricValue>>>,
}

impl SampleSet {
    fn new(spec: &SuiteSpec) -> Self {
        Self {
            domain: spec.domain.clone(),
            pairs: sample_pairs(&spec.domain, spec.sample_count, spec.seed, spec.lambda_bound),
            cassinian: OnceLock::new(),
        }
    }

    fn cassinian(&self) -> Result<&[MetricValue]> {
        self.cassinian
            .get_or_init(|| {
                with_pool(|| {
                    self.pairs
                        .par_iter()
                        .map(|(x, y)| metrics::cassinian(&self.domain, x, y))
                        .collect()
                })
            })
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }
}

fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    let pool = POOL.get_or_init(|| {
        let threads = std::env::var("CASSINI_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .ok()
    });
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

/// Uniform sample of a domain: the ball (or the `λ`-ball of the same center
/// scaled by `λ`) by rejection from its cube; a half-space in the slab of
/// height 2 over the square `[−2, 2]ⁿ⁻¹` around the foot of the origin; a
/// punctured space in the bounding box of its punctures enlarged by 2.
/// Points closer than `MIN_SAMPLE_DISTANCE` to the boundary are redrawn.
pub fn sample_point<R: Rng>(d: &Domain, lambda: Option<f64>, rng: &mut R) -> Point {
    let n = d.dim();
    loop {
        let p: Vec<f64> = match d {
            Domain::Ball { center, radius } => {
                let r = radius * lambda.unwrap_or(1.0);
                random_in_unit_ball(rng, n)
                    .iter()
                    .zip(center.coords())
                    .map(|(v, c)| c + r * v)
                    .collect()
            }
            Domain::HalfSpace {
                unit_normal,
                offset,
            } => {
                let nu = unit_normal.coords();
                let h = offset + rng.gen_range(0.0..2.0);
                let mut p: Vec<f64> = nu.iter().map(|v| h * v).collect();
                for e in orthonormal_complement(nu) {
                    let t = rng.gen_range(-2.0..2.0);
                    p.iter_mut().zip(&e).for_each(|(pi, ei)| *pi += t * ei);
                }
                p
            }
            Domain::Punctured { punctures } => (0..n)
                .map(|k| {
                    let lo = punctures.iter().map(|p| p.coords()[k]).fold(f64::INFINITY, f64::min);
                    let hi = punctures.iter().map(|p| p.coords()[k]).fold(f64::NEG_INFINITY, f64::max);
                    rng.gen_range(lo - 2.0..hi + 2.0)
                })
                .collect(),
        };
        if d.contains_raw(&p) && d.boundary_distance_raw(&p) >= MIN_SAMPLE_DISTANCE {
            return Point::from_vec_unchecked(p);
        }
    }
}

/// `count` uniform pairs followed by the deterministic stress pairs.
pub fn sample_pairs(d: &Domain, count: usize, seed: u64, lambda: Option<f64>) -> Vec<(Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(Point, Point)> = (0..count)
        .map(|_| (sample_point(d, lambda, &mut rng), sample_point(d, lambda, &mut rng)))
        .collect();
    pairs.extend(stress_pairs(d, lambda));
    pairs
}

/// Near-boundary (δ down to 1e−6), near-radial, orthogonal, antipodal and
/// coincident pairs. With a `λ` cap the pairs sit on and inside the
/// `λ`-sphere instead of near the boundary.
pub fn stress_pairs(d: &Domain, lambda: Option<f64>) -> Vec<(Point, Point)> {
    let n = d.dim();
    let axis = |k: usize| {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        e
    };
    let (e1, e2) = (axis(0), axis(1));
    let at = |base: &[f64], terms: &[(f64, &[f64])]| -> Vec<f64> {
        let mut p = base.to_vec();
        for (s, v) in terms {
            p.iter_mut().zip(v.iter()).for_each(|(pi, vi)| *pi += s * vi);
        }
        p
    };
    let mut raw: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    match d {
        Domain::Ball { center, radius } => {
            let c = center.coords();
            let radii: Vec<f64> = match lambda {
                Some(l) => vec![l * radius, 0.5 * l * radius],
                None => vec![
                    radius * (1.0 - 1e-2),
                    radius * (1.0 - 1e-4),
                    radius * (1.0 - 1e-6),
                    0.5 * radius,
                ],
            };
            let (s, co) = 1e-3f64.sin_cos();
            for r in radii {
                let x = at(c, &[(r, &e1)]);
                raw.push((x.clone(), at(c, &[(r * co, &e1), (r * s, &e2)])));
                raw.push((x.clone(), at(c, &[(r, &e2)])));
                raw.push((x.clone(), at(c, &[(-r, &e1)])));
                raw.push((x.clone(), at(c, &[(0.5 * r, &e1)])));
                raw.push((c.to_vec(), x.clone()));
                raw.push((x.clone(), x));
            }
        }
        Domain::HalfSpace {
            unit_normal,
            offset,
        } => {
            let nu = unit_normal.coords();
            let base: Vec<f64> = nu.iter().map(|v| offset * v).collect();
            let t = orthonormal_complement(nu).swap_remove(0);
            for h in [1e-6, 1e-3, 1.0] {
                let x = at(&base, &[(h, nu)]);
                raw.push((x.clone(), at(&x, &[(1e-6, &t)])));
                raw.push((x.clone(), at(&x, &[(1.0, &t)])));
                raw.push((x.clone(), at(&x, &[(10.0, &t)])));
                raw.push((x.clone(), at(&base, &[(10.0 * h, nu)])));
                raw.push((x.clone(), x));
            }
        }
        Domain::Punctured { punctures } => {
            let p = punctures[0].coords();
            for s in [1e-6, 1e-3] {
                let x = at(p, &[(s, &e1)]);
                raw.push((x.clone(), at(p, &[(-s, &e1)])));
                raw.push((x.clone(), at(p, &[(1.0, &e1)])));
                raw.push((x.clone(), at(p, &[(s, &e2)])));
                raw.push((x.clone(), x));
            }
            raw.push((at(p, &[(10.0, &e1)]), at(p, &[(-10.0, &e1)])));
            raw.push((at(p, &[(1.0, &e1)]), at(p, &[(1.0, &e2)])));
        }
    }
    let ok = |v: &[f64]| d.contains_raw(v) && d.boundary_distance_raw(v) >= MIN_SAMPLE_DISTANCE;
    raw.into_iter()
        .filter(|(x, y)| ok(x) && ok(y))
        .map(|(x, y)| (Point::from_vec_unchecked(x), Point::from_vec_unchecked(y)))
        .collect()
}

/// One evaluated comparison `lhs ≤ rhs` with its allowed slack.
struct Outcome {
    form: &'static str,
    lhs: f64,
    rhs: f64,
    allowance: f64,
}

impl Outcome {
    fn new(form: &'static str, lhs: f64, rhs: f64, allowance: f64) -> Self {
        Self {
            form,
            lhs,
            rhs,
            allowance,
        }
    }

    /// Tolerance scaled by the magnitude of both sides.
    fn exact(form: &'static str, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::new(form, lhs, rhs, tol * 1f64.max(lhs.abs()).max(rhs.abs()))
    }
}

struct Extras {
    radial_ratios: Vec<RadialRatio>,
    witness_ratios: Vec<WitnessRatio>,
}

fn report(
    spec: &SuiteSpec,
    pairs: &[(Point, Point)],
    outcomes: Vec<Vec<Outcome>>,
    extras: Extras,
    start: Instant,
) -> SuiteReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    let mut worst: f64 = 0.0;
    let mut sharpest: f64 = 0.0;
    for (index, (list, (x, y))) in outcomes.into_iter().zip(pairs).enumerate() {
        for o in list {
            let slack = o.lhs - o.rhs;
            if o.rhs + o.allowance > 0.0 {
                worst = worst.max(o.lhs / (o.rhs + o.allowance));
            }
            if o.rhs > 0.0 {
                sharpest = sharpest.max(o.lhs / o.rhs);
            }
            let failed = !(slack <= o.allowance);
            if failed || slack > 0.0 {
                let v = Violation {
                    index,
                    form: o.form.to_string(),
                    x: x.coords().to_vec(),
                    y: y.coords().to_vec(),
                    lhs: o.lhs,
                    rhs: o.rhs,
                    slack,
                };
                if failed {
                    violations.push(v);
                } else {
                    warnings.push(v);
                }
            }
        }
    }
    SuiteReport {
        check_id: spec.check_id,
        domain: spec.domain.clone(),
        n: spec.dimension,
        samples: pairs.len(),
        seed: spec.seed,
        lambda_bound: spec.lambda_bound,
        tolerance: spec.tolerance,
        violations,
        warnings,
        worst_slack_ratio: worst,
        sharpest_ratio: sharpest,
        radial_ratios: extras.radial_ratios,
        witness_ratios: extras.witness_ratios,
        runtime_ms: start.elapsed().as_millis() as u64,
    }
}

fn no_extras() -> Extras {
    Extras {
        radial_ratios: Vec::new(),
        witness_ratios: Vec::new(),
    }
}

fn is_unit_ball(d: &Domain) -> bool {
    matches!(d, Domain::Ball { center, radius } if center.norm() == 0.0 && *radius == 1.0)
}

fn require_unit_ball(spec: &SuiteSpec) -> Result<()> {
    if is_unit_ball(&spec.domain) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "check {} runs on the unit ball, got a {} domain",
            spec.check_id,
            spec.domain.kind()
        )))
    }
}

fn require_lambda(spec: &SuiteSpec) -> Result<f64> {
    spec.lambda_bound.ok_or_else(|| {
        Error::InvalidParameter(format!("check {} needs lambda_bound", spec.check_id))
    })
}

/// Evaluates `f` on every pair of the set (in parallel, order preserved).
fn per_pair<F>(set: &SampleSet, f: F) -> Result<Vec<Vec<Outcome>>>
where
    F: Fn(usize, &Point, &Point) -> Result<Vec<Outcome>> + Sync,
{
    with_pool(|| {
        set.pairs
            .par_iter()
            .enumerate()
            .map(|(i, (x, y))| f(i, x, y))
            .collect()
    })
}

fn radial_ratios() -> Result<Vec<RadialRatio>> {
    let ball = Domain::unit_ball(2);
    [0.5, 1e-1, 1e-2, 1e-3]
        .into_iter()
        .map(|r| {
            let (x, y) = (Point::origin(2), Point::e1(2, r));
            let c = metrics::cassinian(&ball, &x, &y)?.value;
            let rho = metrics::hyperbolic_ball(&x, &y)?.value;
            Ok(RadialRatio {
                norm: r,
                ratio: (0.5 * rho).sinh() / c,
                expected: (1.0 - r) / ((1.0 - r) * (1.0 + r)).sqrt(),
            })
        })
        .collect()
}

fn sinh_rho_le_c(spec: &SuiteSpec, set: &SampleSet) -> Result<SuiteReport> {
    require_unit_ball(spec)?;
    let start = Instant::now();
    let cs = set.cassinian()?;
    let tol = spec.tolerance;
    let outcomes = per_pair(set, |i, x, y| {
        let rho = metrics::hyperbolic_ball(x, y)?.value;
        Ok(vec![Outcome::exact("sinh(rho/2) <= c", (0.5 * rho).sinh(), cs[i].value, tol)])
    })?;
    let extras = Extras {
        radial_ratios: radial_ratios()?,
        witness_ratios: Vec::new(),
    };
    Ok(report(spec, &set.pairs, outcomes, extras, start))
}

fn rho_le_2c(spec: &SuiteSpec, set: &SampleSet) -> Result<SuiteReport> {
    require_unit_ball(spec)?;
    let start = Instant::now();
    let cs = set.cassinian()?;
    let tol = spec.tolerance;
    let outcomes = per_pair(set, |i, x, y| {
        let rho = metrics::hyperbolic_ball(x, y)?.value;
        Ok(vec![Outcome::exact("rho <= 2c", rho, 2.0 * cs[i].value, tol)])
    })?;
    Ok(report(spec, &set.pairs, outcomes, no_extras(), start))
}

fn j_le_factor_c(spec: &SuiteSpec, set: &SampleSet) -> Result<SuiteReport> {
    let start = Instant::now();
    let d = &spec.domain;
    let cs = set.cassinian()?;
    let tol = spec.tolerance;
    let unit = is_unit_ball(d);
    let outcomes = per_pair(set, |i, x, y| {
        let c = cs[i].value;
        let j = metrics::distance_ratio_j(d, x, y)?.value;
        let delta = d.boundary_distance(x)?.min(d.boundary_distance(y)?);
        let mut out = vec![Outcome::exact(
            "j <= (|x-y| + min delta) c",
            j,
            (x.dist(y) + delta) * c,
            tol,
        )];
        if unit {
            let factor = (1.0 + x.norm().min(y.norm())) * c;
            out.push(Outcome::exact("j <= (1 + min |x|) c", j, factor, tol));
            out.push(Outcome::exact("(1 + min |x|) c <= 2c", factor, 2.0 * c, tol));
        }
        Ok(out)
    })?;
    Ok(report(spec, &set.pairs, outcomes, no_extras(), start))
}

fn c_le_j_lambda(spec: &SuiteSpec, set: &SampleSet) -> Result<SuiteReport> {
    require_unit_ball(spec)?;
    let lambda = require_lambda(spec)?;
    let start = Instant::now();
    let d = &spec.domain;
    let cs = set.cassinian()?;
    let tol = spec.tolerance;
    let factor = 1.0 / (1.0 - lambda).powi(2);
    let outcomes = per_pair(set, |i, x, y| {
        let j = metrics::distance_ratio_j(d, x, y)?.value;
        Ok(vec![Outcome::exact("c <= j / (1 - lambda)^2", cs[i].value, factor * j, tol)])
    })?;
    Ok(report(spec, &set.pairs, outcomes, no_extras(), start))
}

/// Constant of the planar bound `c ≤ K(λ)·v` for `|x|∨|y| ≤ λ`.
pub fn visual_angle_constant(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    2.0 * (3.0 + l2) / (3.0 * (1.0 - l2) * (1.0 - lambda).powi(2))
}

fn visual_angle(spec: &SuiteSpec, set: &SampleSet) -> Result<SuiteReport> {
    require_unit_ball(spec)?;
    let start = Instant::now();
    let d = &spec.domain;
    let cs = set.cassinian()?;
    let tol = spec.tolerance;
    let planar = spec.lambda_bound.filter(|_| spec.dimension == 2);
    let outcomes = per_pair(set, |i, x, y| {
        let c = cs[i].value;
        let v = metrics::visual_angle(d, x, y)?;
        let (angle, gap) = (v.value, v.gap());
        let half_tan = (0.5 * angle).tan();
        let mut out = vec![Outcome::exact("v/2 <= tan(v/2)", 0.5 * angle, half_tan, tol)];
        // tan is increasing, so the solver gap on v widens the bound by
        // tan((v+gap)/2) − tan(v/2); past π nothing can be certified.
        let widened = if angle + gap < std::f64::consts::PI {
            (0.5 * (angle + gap)).tan() - half_tan
        } else {
            f64::INFINITY
        };
        let mut tan_form = Outcome::exact("tan(v/2) <= c", half_tan, c, tol);
        tan_form.allowance += widened;
        out.push(tan_form);
        if let Some(lambda) = planar {
            let k = visual_angle_constant(lambda);
            let mut f = Outcome::exact("c <= K(lambda) v", c, k * angle, tol);
            f.allowance += k * gap;
            out.push(f);
        }
        Ok(out)
    })?;
    Ok(report(spec, &set.pairs, outcomes, no_extras(), start))
}

fn p_le_sqrt2_delta_c(spec: &SuiteSpec, set: &SampleSet) -> Result<SuiteReport> {
    let start = Instant::now();
    let d = &spec.domain;
    let cs = set.cassinian()?;
    let tol = spec.tolerance;
    let diameter = d.diameter();
    let outcomes = per_pair(set, |i, x, y| {
        let c = cs[i].value;
        let p = metrics::p_quantity(d, x, y)?.value;
        let delta = d.boundary_distance(x)?.min(d.boundary_distance(y)?);
        let mut out = vec![Outcome::exact("p <= sqrt2 min delta c", p, SQRT_2 * delta * c, tol)];
        if let Some(diam) = diameter {
            out.push(Outcome::exact("p <= diam/sqrt2 c", p, diam / SQRT_2 * c, tol));
        }
        Ok(out)
    })?;
    Ok(report(spec, &set.pairs, outcomes, no_extras(), start))
}

/// Identity residual bound of the distortion suite.
pub const IDENTITY_RESIDUAL_BOUND: f64 = 1e-10;

fn moebius_distortion(spec: &SuiteSpec) -> Result<SuiteReport> {
    require_unit_ball(spec)?;
    let start = Instant::now();
    let n = spec.dimension;
    let ball = &spec.domain;
    let tol = spec.tolerance;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let samples: Vec<(Point, OrthogonalMap, OrthogonalMap, Point, Point)> = (0..spec.sample_count)
        .map(|_| {
            let a: Vec<f64> = random_in_unit_ball(&mut rng, n)
                .into_iter()
                .map(|v| MAX_AUTOMORPHISM_NORM * v)
                .collect();
            let outer = OrthogonalMap::random(n, &mut rng);
            let inner = OrthogonalMap::random(n, &mut rng);
            let x = sample_point(ball, None, &mut rng);
            let y = sample_point(ball, None, &mut rng);
            (Point::from_vec_unchecked(a), outer, inner, x, y)
        })
        .collect();
    let random: Vec<Vec<Outcome>> = with_pool(|| {
        samples
            .par_iter()
            .map(|(a, outer, inner, x, y)| -> Result<Vec<Outcome>> {
                let phi = MoebiusMap::automorphism(outer.clone(), a, inner.clone())?;
                let (lo, hi) = moebius::distortion_bounds(a)?;
                let before = metrics::cassinian(ball, x, y)?.value;
                let after = metrics::cassinian(ball, &phi.apply(x)?, &phi.apply(y)?)?.value;
                let mut out = vec![
                    Outcome::exact("lower distortion bound", lo * before, after, tol),
                    Outcome::exact("upper distortion bound", after, hi * before, tol),
                    Outcome::new(
                        "composite isometry residual",
                        moebius::composite_isometry_residual(&phi, x, y)?,
                        IDENTITY_RESIDUAL_BOUND,
                        0.0,
                    ),
                ];
                if a.norm() > 0.0 {
                    let sigma = moebius::inversion_sending_to_zero(a)?;
                    out.push(Outcome::new(
                        "inversion identity residual",
                        moebius::check_inversion_identity(&sigma, x, y)?,
                        IDENTITY_RESIDUAL_BOUND,
                        0.0,
                    ));
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut pairs: Vec<(Point, Point)> = samples.into_iter().map(|s| (s.3, s.4)).collect();
    let mut outcomes = random;
    let mut witness_ratios = Vec::new();
    for a in [0.1, 0.5, 0.9] {
        for t in [-0.1, -0.5, -0.9] {
            let w = moebius::sharpness_witness(&Point::e1(n, a), t)?;
            outcomes.push(vec![Outcome::exact(
                "upper distortion bound (witness)",
                w.c_images,
                w.upper_bound * w.c_pair,
                tol,
            )]);
            witness_ratios.push(WitnessRatio {
                a,
                t,
                ratio: w.ratio,
                upper_bound: w.upper_bound,
            });
            pairs.push((w.x, w.y));
        }
    }
    let extras = Extras {
        radial_ratios: Vec::new(),
        witness_ratios,
    };
    Ok(report(spec, &pairs, outcomes, extras, start))
}

/// Relative agreement required between solver values and closed forms.
pub const CLOSED_FORM_TOLERANCE: f64 = 5e-3;
/// Allowed excess of `c` over the solver's `c̃`.
pub const LOWER_BOUND_SLACK: f64 = 1e-6;

fn path_outcomes(d: &Domain, x: &Point, y: &Point, r: &inner::GeodesicResult, tol: f64) -> Result<Vec<Outcome>> {
    let c = metrics::cassinian(d, x, y)?.value;
    let mut out = vec![Outcome::new("c <= inner c", c, r.value, LOWER_BOUND_SLACK)];
    if r.path.vertices.len() > 1 {
        let partition = inner::path_length_partition(d, &r.path.vertices)?;
        out.push(Outcome::new(
            "|partition - integral| <= tol * integral",
            (partition - r.value).abs(),
            tol * r.value,
            0.0,
        ));
    }
    Ok(out)
}

fn closed_form_outcome(d: &Domain, x: &Point, y: &Point, value: f64) -> Option<Outcome> {
    let exact = inner::closed_form_inner(d, x, y)?;
    Some(Outcome::new(
        "|inner c - closed form| <= 0.5%",
        (value - exact).abs(),
        CLOSED_FORM_TOLERANCE * exact,
        0.0,
    ))
}

fn upper_bound_outcome(d: &Domain, x: &Point, y: &Point, r: &inner::GeodesicResult, tol: f64) -> Result<Option<Outcome>> {
    if x.dist(y) >= d.boundary_distance(x)? {
        return Ok(None);
    }
    let bound = inner::inner_upper_bound(d, x, y)?;
    Ok(Some(Outcome::new(
        "inner c <= upper bound",
        r.value,
        bound,
        tol * bound + r.refinement_gap,
    )))
}

fn inner_metric(spec: &SuiteSpec) -> Result<SuiteReport> {
    let start = Instant::now();
    let d = &spec.domain;
    let n = spec.dimension;
    let tol = spec.tolerance;
    let opts = GeodesicOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // Each sample is a pair and the larger domain it is compared against.
    let mut samples: Vec<(Point, Point, Domain)> = Vec::new();
    match d {
        Domain::Ball { center, radius } => {
            let big = Domain::ball(center.clone(), 2.0 * radius)?;
            for _ in 0..spec.sample_count {
                // Pairs with |x−y| < δ(x), so the upper bound applies.
                let x = sample_point(d, None, &mut rng);
                let w = crate::geometry::random_unit(&mut rng, n);
                let s = rng.gen_range(0.05..0.95) * d.boundary_distance(&x)?;
                let y: Vec<f64> = x.coords().iter().zip(&w).map(|(xi, wi)| xi + s * wi).collect();
                samples.push((x, Point::from_vec_unchecked(y), big.clone()));
            }
            for r in [0.1, 0.5, 0.9] {
                let y: Vec<f64> = center
                    .coords()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| if k == 0 { c + r * radius } else { *c })
                    .collect();
                samples.push((center.clone(), Point::from_vec_unchecked(y), big.clone()));
            }
        }
        Domain::Punctured { punctures } => {
            for _ in 0..spec.sample_count {
                let x = sample_point(d, None, &mut rng);
                let y = sample_point(d, None, &mut rng);
                let q = loop {
                    let q = sample_point(d, None, &mut rng);
                    let keep = 0.25 * x.dist(&y);
                    if q.dist(&x) >= keep.max(1e-3) && q.dist(&y) >= keep.max(1e-3) {
                        break q;
                    }
                };
                let mut more = punctures.clone();
                more.push(q);
                samples.push((x, y, Domain::punctured(more)?));
            }
            let p = punctures[0].coords();
            let shift = |t: f64| {
                Point::from_vec_unchecked(p.iter().enumerate().map(|(k, v)| if k == 0 { v + t } else { *v }).collect())
            };
            let extra = Domain::punctured(
                punctures
                    .iter()
                    .cloned()
                    .chain([shift(-1.0)])
                    .collect(),
            )?;
            samples.push((shift(1.0), shift(1.5), extra));
        }
        Domain::HalfSpace { .. } => {
            return Err(Error::Unsupported(
                "the inner-metric suite runs on balls and punctured spaces".into(),
            ))
        }
    }
    let outcomes: Vec<Vec<Outcome>> = with_pool(|| {
        samples
            .par_iter()
            .map(|(x, y, larger)| -> Result<Vec<Outcome>> {
                let small = inner::inner_cassinian(d, x, y, &opts)?;
                let large = inner::inner_cassinian(larger, x, y, &opts)?;
                let mut out = Vec::new();
                out.extend(closed_form_outcome(d, x, y, small.value));
                let slack = tol + small.refinement_gap + large.refinement_gap;
                match d {
                    // A larger ball gives a smaller c̃.
                    Domain::Ball { .. } => out.push(Outcome::new(
                        "inner c of larger ball <= inner c",
                        large.value,
                        small.value,
                        slack,
                    )),
                    // More punctures give a larger c̃.
                    _ => out.push(Outcome::new(
                        "inner c <= inner c with more punctures",
                        small.value,
                        large.value,
                        slack,
                    )),
                }
                out.extend(upper_bound_outcome(d, x, y, &small, tol)?);
                out.extend(path_outcomes(d, x, y, &small, tol)?);
                out.extend(path_outcomes(larger, x, y, &large, tol)?);
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let pairs: Vec<(Point, Point)> = samples.into_iter().map(|(x, y, _)| (x, y)).collect();
    Ok(report(spec, &pairs, outcomes, no_extras(), start))
}

/// Runs a suite, drawing its pairs from `set` when the check uses the
/// shared point-pair samples.
fn run_with(spec: &SuiteSpec, set: Option<&SampleSet>) -> Result<SuiteReport> {
    spec.validate()?;
    let own;
    let set = match (set, uses_shared_samples(spec.check_id)) {
        (_, false) => None,
        (Some(s), true) => Some(s),
        (None, true) => {
            own = SampleSet::new(spec);
            Some(&own)
        }
    };
    match (spec.check_id, set) {
        (CheckId::MoebiusDistortion, _) => moebius_distortion(spec),
        (CheckId::InnerMetric, _) => inner_metric(spec),
        (CheckId::SinhRhoLeC, Some(set)) => sinh_rho_le_c(spec, set),
        (CheckId::RhoLe2C, Some(set)) => rho_le_2c(spec, set),
        (CheckId::JLeFactorC, Some(set)) => j_le_factor_c(spec, set),
        (CheckId::CLeJLambda, Some(set)) => c_le_j_lambda(spec, set),
        (CheckId::VisualAngle, Some(set)) => visual_angle(spec, set),
        (CheckId::PLeSqrt2DeltaC, Some(set)) => p_le_sqrt2_delta_c(spec, set),
        (_, None) => unreachable!("pair checks always get a sample set"),
    }
}

fn uses_shared_samples(check: CheckId) -> bool {
    !matches!(check, CheckId::MoebiusDistortion | CheckId::InnerMetric)
}

/// Runs one suite.
pub fn run_suite(spec: &SuiteSpec) -> Result<SuiteReport> {
    run_with(spec, None)
}

pub fn check_sinh_rho_le_c(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::SinhRhoLeC)?;
    run_suite(spec)
}

pub fn check_rho_le_2c(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::RhoLe2C)?;
    run_suite(spec)
}

pub fn check_j_le_factor_c(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::JLeFactorC)?;
    run_suite(spec)
}

pub fn check_c_le_j_lambda(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::CLeJLambda)?;
    run_suite(spec)
}

pub fn check_visual_angle(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::VisualAngle)?;
    run_suite(spec)
}

pub fn check_p_le_sqrt2_delta_c(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::PLeSqrt2DeltaC)?;
    run_suite(spec)
}

pub fn check_moebius_distortion(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::MoebiusDistortion)?;
    run_suite(spec)
}

pub fn check_inner_metric(spec: &SuiteSpec) -> Result<SuiteReport> {
    expect(spec, CheckId::InnerMetric)?;
    run_suite(spec)
}

fn expect(spec: &SuiteSpec, id: CheckId) -> Result<()> {
    if spec.check_id == id {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "spec is for {}, not {id}",
            spec.check_id
        )))
    }
}

/// Runs every suite in order. Suites drawing the same pairs (same domain,
/// sample count, seed and `λ`) share one set of Cassinian evaluations.
pub fn run_all(specs: &[SuiteSpec]) -> Result<AggregateReport> {
    let mut sets: HashMap<String, SampleSet> = HashMap::new();
    let mut suites = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.validate()?;
        let report = if uses_shared_samples(spec.check_id) {
            let key = serde_json::to_string(&(&spec.domain, spec.sample_count, spec.seed, spec.lambda_bound))
                .expect("serializable key");
            let set = sets
                .entry(key)
                .or_insert_with(|| SampleSet::new(spec));
            run_with(spec, Some(set))?
        } else {
            run_suite(spec)?
        };
        suites.push(report);
    }
    let total_violations = suites.iter().map(|s| s.violations.len()).sum();
    Ok(AggregateReport {
        suites,
        total_violations,
        passed: total_violations == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip_runtime(mut r: AggregateReport) -> AggregateReport {
        r.suites.iter_mut().for_each(|s| s.runtime_ms = 0);
        r
    }

    #[test]
    fn check_ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.as_str().parse::<CheckId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{id}\""));
        }
        assert!("nope".parse::<CheckId>().is_err());
    }

    #[test]
    fn specs_are_validated() {
        let ball = Domain::unit_ball(2);
        let zero = SuiteSpec::new(CheckId::RhoLe2C, ball.clone(), 0, 1);
        assert!(matches!(run_suite(&zero), Err(Error::InvalidParameter(_))));
        let mut wrong_dim = SuiteSpec::new(CheckId::RhoLe2C, ball.clone(), 5, 1);
        wrong_dim.dimension = 3;
        assert!(matches!(run_suite(&wrong_dim), Err(Error::DimensionMismatch { .. })));
        let lam = SuiteSpec::new(CheckId::CLeJLambda, ball.clone(), 5, 1).with_lambda(1.0);
        assert!(matches!(run_suite(&lam), Err(Error::InvalidParameter(_))));
        let no_lam = SuiteSpec::new(CheckId::CLeJLambda, ball, 5, 1);
        assert!(matches!(run_suite(&no_lam), Err(Error::InvalidParameter(_))));
        let half = SuiteSpec::new(CheckId::SinhRhoLeC, Domain::upper_half_plane(), 5, 1);
        assert!(matches!(run_suite(&half), Err(Error::Precondition(_))));
        let json = r#"{"check_id":"rho_le_2c","domain":{"kind":"ball","center":[0,0],"radius":1},
            "dimension":2,"sample_count":3,"seed":1,"tolerance":1e-10,"extra":1}"#;
        assert!(serde_json::from_str::<SuiteSpec>(json).is_err());
    }

    #[test]
    fn typed_entry_points_check_the_id() {
        let spec = SuiteSpec::new(CheckId::RhoLe2C, Domain::unit_ball(2), 5, 1);
        assert!(check_rho_le_2c(&spec).unwrap().passed());
        assert!(matches!(check_sinh_rho_le_c(&spec), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn samples_are_admissible() {
        let domains = [
            Domain::unit_ball(3),
            Domain::ball(Point::new(vec![1.0, -2.0]).unwrap(), 0.5).unwrap(),
            Domain::upper_half_plane(),
            Domain::punctured(vec![Point::origin(2), Point::e1(2, 1.0)]).unwrap(),
        ];
        for d in &domains {
            for (x, y) in sample_pairs(d, 200, 7, None) {
                assert!(d.boundary_distance(&x).unwrap() >= MIN_SAMPLE_DISTANCE);
                assert!(d.boundary_distance(&y).unwrap() >= MIN_SAMPLE_DISTANCE);
            }
        }
        let ball = Domain::unit_ball(2);
        for (x, y) in sample_pairs(&ball, 200, 7, Some(0.5)) {
            assert!(x.norm() <= 0.5 + 1e-15 && y.norm() <= 0.5 + 1e-15);
        }
        // Near-boundary stress pairs reach δ = 1e−6.
        let stress = stress_pairs(&ball, None);
        let min = stress
            .iter()
            .map(|(x, _)| ball.boundary_distance(x).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(min < 2e-6);
    }

    #[test]
    fn reports_are_deterministic() {
        let specs = vec![
            SuiteSpec::new(CheckId::SinhRhoLeC, Domain::unit_ball(2), 50, 9),
            SuiteSpec::new(CheckId::VisualAngle, Domain::unit_ball(2), 20, 9).with_lambda(0.5),
            SuiteSpec::new(CheckId::MoebiusDistortion, Domain::unit_ball(3), 20, 9),
        ];
        let a = strip_runtime(run_all(&specs).unwrap());
        let b = strip_runtime(run_all(&specs).unwrap());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.passed);
        assert_eq!(a.exit_code(), 0);
        // Shared samples give the same report as a standalone run.
        let alone = run_suite(&specs[0]).unwrap();
        assert_eq!(alone.violations, a.suites[0].violations);
        assert_eq!(alone.worst_slack_ratio, a.suites[0].worst_slack_ratio);
    }

    #[test]
    fn empty_manifest_passes() {
        let r = run_all(&[]).unwrap();
        assert!(r.suites.is_empty() && r.passed && r.total_violations == 0);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn zero_tolerance_on_a_solver_quantity_fails() {
        let d = Domain::punctured(vec![Point::origin(2)]).unwrap();
        let spec = SuiteSpec::new(CheckId::InnerMetric, d, 2, 3).with_tolerance(0.0);
        let r = run_all(&[spec]).unwrap();
        assert!(!r.passed);
        assert_eq!(r.exit_code(), 1);
        let v = &r.suites[0].violations[0];
        assert!(v.slack > 0.0 && !v.x.is_empty() && !v.y.is_empty());
    }

    #[test]
    fn radial_ratios_increase_toward_one() {
        let spec = SuiteSpec::new(CheckId::SinhRhoLeC, Domain::unit_ball(2), 10, 1);
        let r = run_suite(&spec).unwrap();
        let ratios: Vec<f64> = r.radial_ratios.iter().map(|q| q.ratio).collect();
        assert_eq!(ratios.len(), 4);
        assert!(ratios.windows(2).all(|w| w[0] < w[1]));
        for q in &r.radial_ratios {
            assert!((q.ratio - q.expected).abs() < 1e-9);
        }
    }

    #[test]
    fn half_space_inner_suite_is_unsupported() {
        let spec = SuiteSpec::new(CheckId::InnerMetric, Domain::upper_half_plane(), 2, 1);
        assert!(matches!(run_suite(&spec), Err(Error::Unsupported(_))));
    }
}
