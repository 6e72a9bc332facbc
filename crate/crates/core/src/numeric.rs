//! Small numerical building blocks shared by the rule, grid and norm code.

use std::sync::OnceLock;

/// Pairwise (cascade) summation with a fixed tree shape.
///
/// The split points depend only on the slice length, so the result is
/// bit-identical for identical inputs regardless of how the inputs were
/// produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `Γ(x)`; exact (up to the final rounding) at integer arguments where the
/// general approximation is off by a few ulps.
pub fn gamma(x: f64) -> f64 {
    if x.fract() == 0.0 && (1.0..=171.0).contains(&x) {
        return (2..x as u32).fold(1.0, |acc, k| acc * f64::from(k));
    }
    // statrs drifts to ~1e-13 relative error past x ~ 10; reducing to [1, 2)
    // and multiplying back keeps the error at a few ulps per factor
    if x > 2.0 && x <= 171.0 {
        let r = 1.0 + x.fract();
        let n = x.trunc() as u32 - 1;
        return (0..n).fold(statrs::function::gamma::gamma(r), |acc, k| acc * (r + f64::from(k)));
    }
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    if (1.0..=171.0).contains(&x) {
        return gamma(x).ln();
    }
    statrs::function::gamma::ln_gamma(x)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Falling product `∏_{j=0}^{s-1} (c - j)`.
pub fn falling(c: f64, s: usize) -> f64 {
    (0..s).fold(1.0, |acc, j| acc * (c - j as f64))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                dp = legendre_with_derivative(n, x).1;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// 32-point Gauss–Legendre rule, cached.
pub fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(32))
}

/// Integrates `f` over `[a, b]` split into `panels` equal panels, each with
/// the 32-point Gauss–Legendre rule.
pub fn composite_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gl32();
    let h = (b - a) / panels as f64;
    let sums: Vec<f64> = (0..panels)
        .map(|p| {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            let vals: Vec<f64> = x.iter().zip(w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).collect();
            0.5 * h * pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&sums)
}

/// Integrates `f` over `[0, b]` with panels graded geometrically towards 0,
/// which handles algebraic endpoint behaviour such as `x^(-1/2)`.
pub fn graded_gl<F: Fn(f64) -> f64>(f: F, b: f64, levels: usize) -> f64 {
    let mut hi = b;
    let mut parts = Vec::with_capacity(levels + 1);
    for _ in 0..levels {
        let lo = 0.5 * hi;
        parts.push(composite_gl(&f, lo, hi, 1));
        hi = lo;
    }
    parts.push(composite_gl(&f, 0.0, hi, 1));
    parts.reverse();
    pairwise_sum(&parts)
}

/// Ordinary least-squares fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
