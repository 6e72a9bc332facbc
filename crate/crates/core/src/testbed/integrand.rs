use std::sync::Arc;

use serde::Serialize;

use super::bump::CellBump;
use crate::numeric::{binomial, gamma};
use crate::weight::Domain;

/// `e E_1(1) = ∫_0^∞ e^(-x) / (1 + x) dx` (the Gompertz constant).
pub const GOMPERTZ: f64 = 0.596_347_362_323_194_1;

/// Smoothness class reported for analytic factors.
pub const ANALYTIC_CLASS: u32 = 8;

/// A univariate factor of a tensor-product integrand, with closed-form
/// derivatives of every order.
#[derive(Debug, Clone)]
pub enum Factor {
    /// `x^p`
    Monomial(u32),
    /// `max(0, x - 1)^r`; its `r`-th derivative is the step `r! 1{x > 1}`.
    ShiftedPower(u32),
    /// `1 / (1 + |x|)`
    Rational,
    /// `exp(-c |x|)`
    Exponential(f64),
    /// `cos(freq x + phase)`
    Cosine { freq: f64, phase: f64 },
    /// A scaled bump times the inverse weight, supported on one cell.
    Cell(Arc<CellBump>),
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

impl Factor {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Factor::Monomial(p) => x.powi(*p as i32),
            Factor::ShiftedPower(r) => {
                if x > 1.0 {
                    (x - 1.0).powi(*r as i32)
                } else {
                    0.0
                }
            }
            Factor::Rational => 1.0 / (1.0 + x.abs()),
            Factor::Exponential(c) => (-c * x.abs()).exp(),
            Factor::Cosine { freq, phase } => (freq * x + phase).cos(),
            Factor::Cell(cell) => cell.value(x),
        }
    }

    /// The `k`-th derivative (almost everywhere for the piecewise factors).
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        if k == 0 {
            return self.value(x);
        }
        match self {
            Factor::Monomial(p) => {
                let p = *p as usize;
                if k > p {
                    0.0
                } else {
                    let coeff: f64 = ((p - k + 1)..=p).map(|i| i as f64).product();
                    coeff * x.powi((p - k) as i32)
                }
            }
            Factor::ShiftedPower(r) => {
                let r = *r as usize;
                if x <= 1.0 || k > r {
                    0.0
                } else {
                    let coeff: f64 = ((r - k + 1)..=r).map(|i| i as f64).product();
                    coeff * (x - 1.0).powi((r - k) as i32)
                }
            }
            Factor::Rational => {
                let fact: f64 = (1..=k).map(|i| i as f64).product();
                (-sign(x)).powi(k as i32) * fact / (1.0 + x.abs()).powi(k as i32 + 1)
            }
            Factor::Exponential(c) => (-c * sign(x)).powi(k as i32) * (-c * x.abs()).exp(),
            Factor::Cosine { freq, phase } => {
                freq.powi(k as i32) * (freq * x + phase + k as f64 * std::f64::consts::FRAC_PI_2).cos()
            }
            Factor::Cell(cell) => cell.derivative(k, x),
        }
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Factor::Cell(cell) => Some(cell.support()),
            _ => None,
        }
    }

    /// Points where the factor or one of its derivatives is not smooth.
    pub fn breakpoints(&self) -> &'static [f64] {
        match self {
            Factor::ShiftedPower(_) => &[1.0],
            _ => &[],
        }
    }

    /// `∫_0^∞ f(x) x^alpha e^(-x) dx` where a closed form is available.
    pub fn half_line_integral(&self, alpha: f64) -> Option<f64> {
        match self {
            Factor::Monomial(p) => Some(gamma(f64::from(*p) + alpha + 1.0)),
            Factor::ShiftedPower(r) => shifted_power_integral(*r, alpha),
            Factor::Rational => (alpha == 0.0).then_some(GOMPERTZ),
            Factor::Exponential(c) => (*c > -1.0).then(|| gamma(alpha + 1.0) / (1.0 + c).powf(alpha + 1.0)),
            Factor::Cosine { freq, phase } => Some(cosine_integral(*freq, *phase, alpha)),
            Factor::Cell(cell) => cell.weighted_integral(alpha),
        }
    }

    /// `∫_0^∞ f(-x) x^alpha e^(-x) dx`.
    pub fn reflected_integral(&self, alpha: f64) -> Option<f64> {
        match self {
            Factor::Monomial(p) => Some(if p % 2 == 0 { 1.0 } else { -1.0 } * gamma(f64::from(*p) + alpha + 1.0)),
            Factor::ShiftedPower(_) | Factor::Cell(_) => Some(0.0),
            Factor::Rational | Factor::Exponential(_) => self.half_line_integral(alpha),
            Factor::Cosine { freq, phase } => Some(cosine_integral(-freq, *phase, alpha)),
        }
    }

    pub fn integral(&self, alpha: f64, domain: Domain) -> Option<f64> {
        let half = self.half_line_integral(alpha)?;
        match domain {
            Domain::HalfLine => Some(half),
            Domain::FullLine => Some(half + self.reflected_integral(alpha)?),
        }
    }

    /// Whether `f(-x) = -f(x)`.
    pub fn is_odd(&self) -> bool {
        match self {
            Factor::Monomial(p) => p % 2 == 1,
            Factor::Cosine { phase, .. } => *phase == std::f64::consts::FRAC_PI_2,
            _ => false,
        }
    }
}

/// `∫_1^∞ (x-1)^r x^alpha e^(-x) dx`, closed form for integer `alpha >= 0`.
fn shifted_power_integral(r: u32, alpha: f64) -> Option<f64> {
    if alpha < 0.0 || alpha.fract() != 0.0 || alpha > 64.0 {
        return None;
    }
    let a = alpha as usize;
    let sum: f64 = (0..=a).map(|i| binomial(a, i) * gamma(f64::from(r) + i as f64 + 1.0)).sum();
    Some((-1.0f64).exp() * sum)
}

/// `Re(e^{i phase} Γ(alpha+1) (1 - i freq)^{-(alpha+1)})`.
fn cosine_integral(freq: f64, phase: f64, alpha: f64) -> f64 {
    let rho = (1.0 + freq * freq).sqrt();
    let psi = freq.atan();
    gamma(alpha + 1.0) * rho.powf(-(alpha + 1.0)) * (phase + (alpha + 1.0) * psi).cos()
}

/// A test function `scale * ∏_i f_i(x_i)` with analytic mixed derivatives.
#[derive(Debug, Clone)]
pub struct Integrand {
    name: String,
    factors: Vec<Factor>,
    scale: f64,
    smoothness: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrandInfo {
    pub name: String,
    pub arity: usize,
    pub smoothness_class: u32,
}

impl Integrand {
    pub fn tensor(name: impl Into<String>, factors: Vec<Factor>, scale: f64, smoothness: u32) -> Self {
        assert!(!factors.is_empty(), "integrand needs at least one factor");
        Self { name: name.into(), factors, scale, smoothness }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn arity(&self) -> usize {
        self.factors.len()
    }
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }
    pub fn scale(&self) -> f64 {
        self.scale
    }
    /// The `r` for which membership in the weighted Sobolev space is claimed.
    pub fn smoothness_class(&self) -> u32 {
        self.smoothness
    }

    pub fn info(&self) -> IntegrandInfo {
        IntegrandInfo { name: self.name.clone(), arity: self.arity(), smoothness_class: self.smoothness }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.arity());
        let mut v = self.scale;
        for (f, &xi) in self.factors.iter().zip(x) {
            if v == 0.0 {
                return 0.0;
            }
            v *= f.value(xi);
        }
        v
    }

    /// The mixed derivative `D^k f(x)`.
    pub fn derivative(&self, k: &[usize], x: &[f64]) -> f64 {
        self.scale * self.factors.iter().zip(k).zip(x).map(|((f, &ki), &xi)| f.derivative(ki, xi)).product::<f64>()
    }

    /// Exact integral against the canonical tensor weight, where known.
    pub fn exact_integral(&self, alpha: f64, domain: Domain) -> Option<f64> {
        let mut v = self.scale;
        for f in &self.factors {
            v *= f.integral(alpha, domain)?;
        }
        Some(v)
    }

    /// Whether the integrand is odd in at least one coordinate.
    pub fn is_odd(&self) -> bool {
        self.factors.iter().any(Factor::is_odd)
    }
}

/// Names accepted by [`lookup`].
pub const REGISTRY_NAMES: &[&str] = &[
    "constant",
    "monomial1",
    "monomial2",
    "monomial3",
    "shifted1",
    "shifted2",
    "shifted3",
    "rational",
    "exponential",
    "cosine",
];

/// Builds the registry integrand `name` in dimension `d`: the same factor
/// on every axis.
pub fn lookup(name: &str, d: usize) -> Option<Integrand> {
    if d == 0 {
        return None;
    }
    let (factor, class) = match name {
        "constant" => (Factor::Monomial(0), ANALYTIC_CLASS),
        "monomial1" => (Factor::Monomial(1), ANALYTIC_CLASS),
        "monomial2" => (Factor::Monomial(2), ANALYTIC_CLASS),
        "monomial3" => (Factor::Monomial(3), ANALYTIC_CLASS),
        "shifted1" => (Factor::ShiftedPower(1), 1),
        "shifted2" => (Factor::ShiftedPower(2), 2),
        "shifted3" => (Factor::ShiftedPower(3), 3),
        "rational" => (Factor::Rational, ANALYTIC_CLASS),
        "exponential" => (Factor::Exponential(1.0), ANALYTIC_CLASS),
        "cosine" => (Factor::Cosine { freq: 0.5, phase: 0.3 }, ANALYTIC_CLASS),
        _ => return None,
    };
    Some(Integrand::tensor(name, vec![factor; d], 1.0, class))
}

/// Every registry integrand in dimensions 1, 2 and 3.
pub fn registry() -> Vec<Integrand> {
    (1..=3).flat_map(|d| REGISTRY_NAMES.iter().filter_map(move |n| lookup(n, d))).collect()
}
