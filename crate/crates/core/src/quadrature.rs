//! Adaptive Gauss–Kronrod (7/15) quadrature on an interval.

/// Kronrod nodes on [0, 1] of the symmetric rule; index 1, 3, 5 are the
/// Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = WG[3] * fc;
    let mut kronrod = WGK[7] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` split at `breakpoints`, bisecting the
/// interval with the largest error estimate until the total estimate is
/// below `max(abs_tol, rel_tol·|value|)` or `max_intervals` is reached.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Integral {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&t| t > a && t < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut parts: Vec<(f64, f64, f64, f64)> = edges
        .windows(2)
        .map(|w| {
            let (v, e) = kronrod15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    let mut evaluations = 15 * parts.len();
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let error: f64 = parts.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || parts.len() >= max_intervals {
            return Integral {
                value,
                error,
                evaluations,
            };
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // Interval exhausted at floating-point resolution.
            let value: f64 = parts.iter().map(|p| p.2).sum::<f64>();
            let (v, e) = kronrod15(&f, lo, hi);
            return Integral {
                value: value + v,
                error: error.max(e),
                evaluations: evaluations + 15,
            };
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        evaluations += 30;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// Nodes and weights of the `k`-point Gauss–Legendre rule mapped to
/// `[0, 1]` (weights sum to one).
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1, "rule needs at least one node");
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..(k + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // Legendre recurrence for P_k(x) and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 1 { x } else { p1 };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[k - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[k - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x + 1.0, 0.0, 2.0, &[], 1e-12, 0.0, 100);
        assert!((r.value - 10.0).abs() < 1e-13);
        assert_eq!(r.evaluations, 15);
    }

    #[test]
    fn inverse_square_antiderivatives() {
        let r = integrate(|t| 1.0 / (1.0 - t).powi(2), 0.0, 0.5, &[], 1e-12, 0.0, 1000);
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = integrate(|t| 1.0 / (t * t), 1.0, 2.0, &[], 1e-12, 0.0, 1000);
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand_with_breakpoint() {
        // ∫_{-1}^{1} dt / (t² + h²) = (2/h)·atan(1/h)
        let h = 1e-4f64;
        let exact = 2.0 / h * (1.0 / h).atan();
        let r = integrate(|t| 1.0 / (t * t + h * h), -1.0, 1.0, &[0.0], 1e-10, 0.0, 10_000);
        assert!(((r.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn kink_is_resolved_adaptively() {
        let r = integrate(|t: f64| (t - 0.3).abs(), 0.0, 1.0, &[], 1e-10, 0.0, 10_000);
        assert!((r.value - 0.29).abs() < 1e-10);
    }

    #[test]
    fn gauss_legendre_rules() {
        for k in [1, 2, 5, 8, 33] {
            let (x, w) = gauss_legendre(k);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14, "k = {k}");
            // Exact for degree 2k − 1: ∫_0^1 t^(2k−1) dt = 1/(2k).
            let m = 2 * k as i32 - 1;
            let q: f64 = x.iter().zip(&w).map(|(t, wi)| wi * t.powi(m)).sum();
            assert!((q - 1.0 / (2 * k) as f64).abs() < 1e-13, "k = {k}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
