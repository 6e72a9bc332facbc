//! The generalized Laguerre (half-line) and Laplace (full-line) weight family
//! `|x|^(alpha + r/2) exp(-a|x| + b)`, its tensor products, and numerical
//! weighted Sobolev norms.

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::numeric::{composite_gl, gamma, graded_gl, pairwise_sum};
use crate::testbed::Integrand;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `[0, ∞)`, generalized Laguerre weight.
    HalfLine,
    /// `(-∞, ∞)`, generalized Laplace weight.
    FullLine,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::HalfLine => "half",
            Domain::FullLine => "full",
        }
    }
}

/// Parameters of the weight `w_r(x) = |x|^(alpha + r/2) exp(-a|x| + b)` and
/// of its `d`-fold tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    alpha: f64,
    a: f64,
    b: f64,
    r: u32,
    domain: Domain,
    d: usize,
}

impl WeightParams {
    pub fn new(alpha: f64, a: f64, b: f64, r: u32, domain: Domain, d: usize) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(QuadError::InvalidParam(format!("alpha must be > -1, got {alpha}")));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(QuadError::InvalidParam(format!("a must be > 0, got {a}")));
        }
        if !b.is_finite() {
            return Err(QuadError::InvalidParam(format!("b must be finite, got {b}")));
        }
        if d == 0 {
            return Err(QuadError::InvalidParam("dimension d must be >= 1".into()));
        }
        Ok(Self { alpha, a, b, r, domain, d })
    }

    /// The weight with `a = 1`, `b = 0`.
    pub fn canonical(alpha: f64, r: u32, domain: Domain, d: usize) -> Result<Self> {
        Self::new(alpha, 1.0, 0.0, r, domain, d)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn domain(&self) -> Domain {
        self.domain
    }
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_canonical(&self) -> bool {
        self.a == 1.0 && self.b == 0.0
    }

    pub fn with_r(self, r: u32) -> Self {
        Self { r, ..self }
    }

    pub fn with_d(self, d: usize) -> Result<Self> {
        Self::new(self.alpha, self.a, self.b, self.r, self.domain, d)
    }

    fn exponent(&self, use_r: bool) -> f64 {
        if use_r {
            self.alpha + 0.5 * f64::from(self.r)
        } else {
            self.alpha
        }
    }

    /// Univariate weight value, without domain checks.
    pub(crate) fn eval_1d(&self, x: f64, use_r: bool) -> f64 {
        let e = self.exponent(use_r);
        let ax = x.abs();
        let power = if e == 0.0 { 1.0 } else { ax.powf(e) };
        power * (-self.a * ax + self.b).exp()
    }

    /// Evaluates the tensor weight at `x`. With `use_r` the exponent carries
    /// the extra `r/2` of the Sobolev weight `w_r`.
    pub fn eval_weight(&self, x: &[f64], use_r: bool) -> Result<f64> {
        if x.len() != self.d {
            return Err(QuadError::InvalidParam(format!(
                "point has {} coordinates, weight has dimension {}",
                x.len(),
                self.d
            )));
        }
        let e = self.exponent(use_r);
        for (index, &value) in x.iter().enumerate() {
            if self.domain == Domain::HalfLine && value < 0.0 {
                return Err(QuadError::DomainViolation { index, value });
            }
            if value == 0.0 && e < 0.0 {
                return Err(QuadError::Pole { index, exponent: e });
            }
        }
        Ok(x.iter().map(|&xi| self.eval_1d(xi, use_r)).product())
    }

    /// Total mass of the univariate weight `w = w_0` over its domain.
    pub fn moment0(&self) -> f64 {
        let half = self.b.exp() * gamma(self.alpha + 1.0) / self.a.powf(self.alpha + 1.0);
        match self.domain {
            Domain::HalfLine => half,
            Domain::FullLine => 2.0 * half,
        }
    }

    pub fn canonical_map(&self, use_r: bool) -> CanonicalMap {
        let e = self.exponent(use_r);
        CanonicalMap { scale: self.a, integral_factor: self.b.exp() / self.a.powf(e + 1.0) }
    }
}

/// Change of variables `t = a x` reducing a weight to its canonical form.
///
/// `∫ f(x) w(x) dx = integral_factor * ∫ f(t / a) w_canonical(t) dt` per
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalMap {
    pub scale: f64,
    pub integral_factor: f64,
}

impl CanonicalMap {
    pub fn to_canonical(&self, x: f64) -> f64 {
        self.scale * x
    }

    pub fn from_canonical(&self, t: f64) -> f64 {
        t / self.scale
    }

    /// Maps a canonical `d`-dimensional integral back to the general weight.
    pub fn map_integral(&self, canonical: f64, d: usize) -> f64 {
        canonical * self.integral_factor.powi(d as i32)
    }
}

/// Relative size of the tail piece above which the norm estimate is rejected.
const TAIL_TOLERANCE: f64 = 1e-10;

/// Numerical estimate of `Σ_{|k|_∞ ≤ r} ‖D^k f‖_{L_{1,w_r}}`.
///
/// Integrands are tensor products, so each mixed derivative norm is a
/// product of univariate weighted L1 norms; those are computed with
/// composite 32-point Gauss–Legendre panels over the effective support.
pub fn sobolev_norm_estimate(f: &Integrand, p: &WeightParams, resolution: usize) -> Result<f64> {
    if f.arity() != p.d() {
        return Err(QuadError::InvalidParam(format!(
            "integrand arity {} does not match weight dimension {}",
            f.arity(),
            p.d()
        )));
    }
    if f.scale() == 0.0 {
        return Ok(0.0);
    }
    let r = p.r() as usize;
    let resolution = resolution.max(1);
    // norms[i][k] = ‖f_i^{(k)}‖ on axis i
    let mut norms = Vec::with_capacity(f.arity());
    for factor in f.factors() {
        let mut row = Vec::with_capacity(r + 1);
        for k in 0..=r {
            row.push(univariate_weighted_l1(
                |x| factor.derivative(k, x),
                factor.support(),
                factor.breakpoints(),
                p,
                resolution,
            )?);
        }
        norms.push(row);
    }
    let mut terms = Vec::new();
    let mut k = vec![0usize; f.arity()];
    loop {
        terms.push(k.iter().enumerate().map(|(i, &ki)| norms[i][ki]).product::<f64>());
        if !next_multi_index(&mut k, r) {
            break;
        }
    }
    Ok(f.scale().abs() * pairwise_sum(&terms))
}

/// Advances `k` through `{0..=max}^d` in lexicographic order.
pub(crate) fn next_multi_index(k: &mut [usize], max: usize) -> bool {
    for i in (0..k.len()).rev() {
        if k[i] < max {
            k[i] += 1;
            return true;
        }
        k[i] = 0;
    }
    false
}

/// `∫ |g(x)| w_r(x) dx` over the weight's domain. A compact `support` is
/// integrated directly; otherwise the half-line is cut at
/// `T = (4 resolution + 50 max(1, alpha)) / a` and the last quarter is
/// checked for decay.
pub(crate) fn univariate_weighted_l1<G: Fn(f64) -> f64>(
    g: G,
    support: Option<(f64, f64)>,
    breakpoints: &[f64],
    p: &WeightParams,
    resolution: usize,
) -> Result<f64> {
    let integrand = |x: f64| {
        let v = g(x);
        if v == 0.0 {
            0.0
        } else {
            v.abs() * p.eval_1d(x, true)
        }
    };
    if let Some((lo, hi)) = support {
        let mut total = composite_gl(integrand, lo, hi, resolution);
        if p.domain() == Domain::FullLine && lo < 0.0 {
            // support given in signed coordinates already covers both sides
            return Ok(total);
        }
        if p.domain() == Domain::FullLine {
            total += composite_gl(|x| integrand(-x), lo, hi, resolution);
        }
        return Ok(total);
    }

    let cut = (4.0 * resolution as f64 + 50.0 * p.alpha().max(1.0)) / p.a();
    let width = (32.0 / resolution as f64).min(1.0) / p.a();
    let half = |h: &dyn Fn(f64) -> f64| -> (f64, f64) {
        let mut edges = vec![0.0];
        let mut bps: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > 0.0 && b < cut).collect();
        bps.sort_by(f64::total_cmp);
        edges.extend(bps);
        edges.push(cut);
        let tail_start = 0.75 * cut;
        let mut pieces = Vec::new();
        let mut tail = Vec::new();
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut a = lo;
            if a == 0.0 {
                let first = hi.min(width);
                pieces.push(graded_gl(h, first, 48));
                a = first;
            }
            while a < hi {
                let b = (a + width).min(hi);
                let v = composite_gl(h, a, b, 1);
                if a >= tail_start {
                    tail.push(v);
                }
                pieces.push(v);
                a = b;
            }
        }
        (pairwise_sum(&pieces), pairwise_sum(&tail))
    };
    let (mut total, mut tail) = half(&integrand);
    if p.domain() == Domain::FullLine {
        let (t2, tail2) = half(&|x: f64| integrand(-x));
        total += t2;
        tail += tail2;
    }
    if !total.is_finite() || tail > TAIL_TOLERANCE * total {
        return Err(QuadError::UnboundedEstimate { tail, total });
    }
    Ok(total)
}
