//! The mollifier `φ(y) = c exp(-1/(y(1-y)))` on `(0, 1)` and the cell-local
//! functions `g(x) w^{-1}(x)` built from it.

use std::sync::{Arc, OnceLock};

use crate::numeric::{binomial, composite_gl, falling, pairwise_sum};

/// Highest derivative order prepared for the bump.
pub const MAX_BUMP_ORDER: usize = 12;

/// `φ` normalized to unit integral, with exact derivatives of every order
/// up to [`MAX_BUMP_ORDER`].
///
/// With `q = y(1-y)`, `φ^(n) = P_n(y) q^(-2n) φ`, where `P_0 = 1` and
/// `P_{n+1} = P_n' q² + P_n q' (1 - 2n q)`.
#[derive(Debug)]
pub struct Bump {
    polys: Vec<Vec<f64>>,
    scale: f64,
    /// `b_s = ∫_0^1 |φ^(s)|`
    norms: Vec<f64>,
}

fn poly_eval(p: &[f64], y: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

impl Bump {
    fn build() -> Self {
        let q = [0.0, 1.0, -1.0];
        let dq = [1.0, -2.0];
        let q2 = poly_mul(&q, &q);
        let mut polys = vec![vec![1.0]];
        for n in 0..MAX_BUMP_ORDER {
            let p = &polys[n];
            let factor = poly_add(&[1.0], &q.iter().map(|c| -2.0 * n as f64 * c).collect::<Vec<_>>());
            let next = poly_add(&poly_mul(&poly_deriv(p), &q2), &poly_mul(&poly_mul(p, &dq), &factor));
            polys.push(next);
        }
        let mut bump = Bump { polys, scale: 1.0, norms: Vec::new() };
        let raw = composite_gl(|y| bump.derivative(0, y), 0.0, 1.0, 64);
        bump.scale = 1.0 / raw;
        bump.norms = (0..=MAX_BUMP_ORDER).map(|s| bump.abs_integral(s)).collect();
        bump
    }

    /// The shared instance.
    pub fn standard() -> Arc<Bump> {
        static BUMP: OnceLock<Arc<Bump>> = OnceLock::new();
        Arc::clone(BUMP.get_or_init(|| Arc::new(Bump::build())))
    }

    pub fn value(&self, y: f64) -> f64 {
        self.derivative(0, y)
    }

    /// `φ^(n)(y)`; zero outside `(0, 1)`.
    pub fn derivative(&self, n: usize, y: f64) -> f64 {
        assert!(n <= MAX_BUMP_ORDER, "bump derivative order {n} not prepared");
        if !(y > 0.0 && y < 1.0) {
            return 0.0;
        }
        let q = y * (1.0 - y);
        let log_mag = -1.0 / q - 2.0 * n as f64 * q.ln();
        self.scale * poly_eval(&self.polys[n], y) * log_mag.exp()
    }

    /// Zeros of `φ^(s)` inside `(0, 1)`, ascending.
    pub fn derivative_zeros(&self, s: usize) -> Vec<f64> {
        let p = &self.polys[s];
        let samples = 4096;
        let mut zeros = Vec::new();
        let mut prev_y = 1e-6;
        let mut prev = poly_eval(p, prev_y);
        for i in 1..=samples {
            let y = 1e-6 + (1.0 - 2e-6) * i as f64 / samples as f64;
            let v = poly_eval(p, y);
            if v == 0.0 {
                zeros.push(y);
            } else if prev != 0.0 && v.signum() != prev.signum() {
                let (mut lo, mut hi) = (prev_y, y);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if poly_eval(p, mid).signum() == prev.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= f64::EPSILON * mid {
                        break;
                    }
                }
                zeros.push(0.5 * (lo + hi));
            }
            prev_y = y;
            prev = v;
        }
        zeros
    }

    /// `∫_0^1 |φ^(s)|`, integrating between consecutive sign changes so each
    /// piece is smooth.
    fn abs_integral(&self, s: usize) -> f64 {
        let mut edges = vec![0.0];
        edges.extend(self.derivative_zeros(s));
        edges.push(1.0);
        let pieces: Vec<f64> =
            edges.windows(2).map(|w| composite_gl(|y| self.derivative(s, y).abs(), w[0], w[1], 64)).collect();
        pairwise_sum(&pieces)
    }

    /// `b_s = ∫_0^1 |φ^(s)(y)| dy`; `b_0 = 1` up to rounding.
    pub fn b(&self, s: usize) -> f64 {
        self.norms[s]
    }
}

/// `(w^{-1})^{(s)}(x)` for `w(x) = x^alpha e^{-x}`, by Leibniz on
/// `x^{-alpha} e^x`:
/// `e^x Σ_j C(s, j) (-alpha)(-alpha-1)…(-alpha-j+1) x^{-alpha-j}`.
pub fn inverse_weight_derivative(alpha: f64, s: usize, x: f64) -> f64 {
    let terms: Vec<f64> = (0..=s).map(|j| binomial(s, j) * falling(-alpha, j) * x.powf(-alpha - j as f64)).collect();
    x.exp() * pairwise_sum(&terms)
}

/// `h(x) = φ((x - lo) / δ) w^{-1}(x)` on the cell `(lo, lo + δ)`.
#[derive(Debug, Clone)]
pub struct CellBump {
    lo: f64,
    delta: f64,
    alpha: f64,
    bump: Arc<Bump>,
}

impl CellBump {
    pub fn new(lo: f64, delta: f64, alpha: f64) -> Self {
        assert!(lo >= 0.0 && delta > 0.0);
        Self { lo, delta, alpha, bump: Bump::standard() }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.lo + self.delta)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn local(&self, x: f64) -> f64 {
        (x - self.lo) / self.delta
    }

    pub fn value(&self, x: f64) -> f64 {
        let g = self.bump.value(self.local(x));
        if g == 0.0 {
            return 0.0;
        }
        g * x.powf(-self.alpha) * x.exp()
    }

    /// `h^{(k)} = Σ_s C(k, s) g^{(k-s)} (w^{-1})^{(s)}`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        let y = self.local(x);
        if !(y > 0.0 && y < 1.0) {
            return 0.0;
        }
        let terms: Vec<f64> = (0..=k)
            .map(|s| {
                let g = self.bump.derivative(k - s, y) * self.delta.powi(-((k - s) as i32));
                binomial(k, s) * g * inverse_weight_derivative(self.alpha, s, x)
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// `∫ h w = ∫ g = δ b_0`, valid when `w` is the weight the cell inverts.
    pub fn weighted_integral(&self, alpha: f64) -> Option<f64> {
        (alpha == self.alpha).then(|| self.delta * self.bump.b(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_normalized_and_vanishes_at_edges() {
        let b = Bump::standard();
        assert!((b.b(0) - 1.0).abs() < 1e-14);
        for n in 0..5 {
            assert_eq!(b.derivative(n, 0.0), 0.0);
            assert_eq!(b.derivative(n, 1.0), 0.0);
            assert_eq!(b.derivative(n, 1e-4), 0.0);
        }
        assert!(b.value(0.5) > 0.0);
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = Bump::standard();
        let h = 1e-6;
        for n in 0..6 {
            for y in [0.2, 0.37, 0.5, 0.81] {
                let fd = (b.derivative(n, y + h) - b.derivative(n, y - h)) / (2.0 * h);
                let an = b.derivative(n + 1, y);
                let scale = an.abs().max(b.derivative(n, y).abs()).max(1.0);
                assert!((fd - an).abs() < 1e-5 * scale, "n={n} y={y}: {fd} vs {an}");
            }
        }
    }

    /// `∫|φ^(s)|` is the total variation of `φ^(s-1)`: the sum of its jumps
    /// between consecutive critical points.
    #[test]
    fn bump_norms_equal_total_variation() {
        let b = Bump::standard();
        assert!((b.b(1) - 2.0 * b.value(0.5)).abs() < 1e-12 * b.b(1));
        for s in 1..=6 {
            let mut pts = vec![0.0];
            pts.extend(b.derivative_zeros(s));
            pts.push(1.0);
            let tv: f64 = pts.windows(2).map(|w| (b.derivative(s - 1, w[1]) - b.derivative(s - 1, w[0])).abs()).sum();
            assert!(((tv - b.b(s)) / tv).abs() < 1e-8, "s={s}: {tv} vs {}", b.b(s));
        }
    }

    #[test]
    fn inverse_weight_derivatives_match_finite_differences() {
        for alpha in [0.0, 0.5, 2.0, -0.4] {
            let winv = |x: f64| x.powf(-alpha) * x.exp();
            for x in [0.5, 1.0, 5.0] {
                for s in 1..=4 {
                    let h = 1e-3 * x;
                    // fourth-order central difference of the (s-1)-th derivative
                    let f = |t: f64| inverse_weight_derivative(alpha, s - 1, t);
                    let fd = (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
                    let an = inverse_weight_derivative(alpha, s, x);
                    let scale = an.abs().max(f(x).abs());
                    assert!((fd - an).abs() < 1e-6 * scale, "alpha={alpha} x={x} s={s}: {fd} vs {an}");
                }
                assert!((inverse_weight_derivative(alpha, 0, x) - winv(x)).abs() < 1e-12 * winv(x));
            }
        }
    }

    #[test]
    fn cell_bump_support_and_integral() {
        let c = CellBump::new(3.0, 0.25, 0.5);
        assert_eq!(c.value(3.0), 0.0);
        assert_eq!(c.value(3.25), 0.0);
        assert_eq!(c.derivative(2, 2.0), 0.0);
        assert!(c.value(3.1) > 0.0);
        let num = composite_gl(|x| c.value(x) * x.powf(0.5) * (-x).exp(), 3.0, 3.25, 64);
        assert!((num - c.weighted_integral(0.5).unwrap()).abs() < 1e-13);
        assert!(c.weighted_integral(0.0).is_none());
    }
}
