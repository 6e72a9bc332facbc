//! Generalized Laguerre orthonormal polynomials for the canonical weight
//! `x^alpha e^(-x)`, their zeros, and Gauss–Laguerre rules.
//!
//! Nodes are the eigenvalues of the Jacobi matrix, polished by Newton steps
//! on the three-term recurrence. The Cotes numbers are `moment0` times the
//! squared first component of the normalized eigenvector; the eigenvector is
//! regenerated from the recurrence at the polished node (its entries are the
//! orthonormal polynomial values) and normalized in log scale, so tiny
//! weights far in the tail keep full relative accuracy until they underflow.

mod tridiag;

use serde::{Deserialize, Serialize};

pub use tridiag::{count_eigenvalues_below, symmetric_tridiagonal_eigen};

use crate::error::{QuadError, Result};
use crate::numeric::{gamma, ln_gamma, pairwise_sum};

/// Largest supported Gauss order.
pub const MAX_ORDER: usize = 16_384;

const NEWTON_STEPS: usize = 5;
const RESCALE_AT: f64 = 1e100;

/// Jacobi matrix of the monic generalized Laguerre recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    pub m: usize,
    pub alpha: f64,
    /// `2k + alpha + 1`, `k = 0..m`
    pub diag: Vec<f64>,
    /// `sqrt(k (k + alpha))`, `k = 1..m`
    pub offdiag: Vec<f64>,
}

fn check_order(m: usize, alpha: f64) -> Result<()> {
    if m == 0 {
        return Err(QuadError::InvalidParam("order m must be >= 1".into()));
    }
    if m > MAX_ORDER {
        return Err(QuadError::OrderTooLarge { m, max: MAX_ORDER });
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(QuadError::InvalidParam(format!("alpha must be > -1, got {alpha}")));
    }
    Ok(())
}

fn recurrence_diag(k: usize, alpha: f64) -> f64 {
    2.0 * k as f64 + alpha + 1.0
}

fn recurrence_off(k: usize, alpha: f64) -> f64 {
    (k as f64 * (k as f64 + alpha)).sqrt()
}

pub fn jacobi_matrix(m: usize, alpha: f64) -> Result<JacobiMatrix> {
    check_order(m, alpha)?;
    Ok(JacobiMatrix {
        m,
        alpha,
        diag: (0..m).map(|k| recurrence_diag(k, alpha)).collect(),
        offdiag: (1..m).map(|k| recurrence_off(k, alpha)).collect(),
    })
}

/// Canonical total mass `Γ(alpha + 1)`.
pub fn canonical_moment0(alpha: f64) -> f64 {
    gamma(alpha + 1.0)
}

/// The orthonormal polynomial `p_m(x)` by forward recurrence.
pub fn eval_orthonormal(m: usize, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(QuadError::InvalidParam(format!("alpha must be > -1, got {alpha}")));
    }
    let mut prev = 0.0;
    let mut cur = 1.0 / canonical_moment0(alpha).sqrt();
    for j in 0..m {
        let next =
            ((x - recurrence_diag(j, alpha)) * cur - recurrence_off(j, alpha) * prev) / recurrence_off(j + 1, alpha);
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            return Err(QuadError::InvalidParam(format!("recurrence overflow evaluating p_{m} at x = {x}")));
        }
    }
    Ok(cur)
}

/// Newton step `p_m(x) / p_m'(x)` from the scaled recurrence.
fn newton_step(m: usize, alpha: f64, x: f64) -> f64 {
    let (mut q0, mut q1) = (0.0, 1.0);
    let (mut d0, mut d1) = (0.0, 0.0);
    for j in 0..m {
        let a = recurrence_diag(j, alpha);
        let b = recurrence_off(j, alpha);
        let c = recurrence_off(j + 1, alpha);
        let q2 = ((x - a) * q1 - b * q0) / c;
        let d2 = ((x - a) * d1 + q1 - b * d0) / c;
        q0 = q1;
        q1 = q2;
        d0 = d1;
        d1 = d2;
        let big = q1.abs().max(d1.abs());
        if big > RESCALE_AT {
            let s = 1.0 / big;
            q0 *= s;
            q1 *= s;
            d0 *= s;
            d1 *= s;
        }
    }
    q1 / d1
}

/// `ln Σ_{j<m} q_j(x)^2` with `q_0 = 1` and `q_j = p_j sqrt(moment0)`.
fn log_christoffel_sum(m: usize, alpha: f64, x: f64) -> f64 {
    let (mut q0, mut q1) = (0.0, 1.0);
    let mut sum = 1.0;
    let mut log_scale = 0.0;
    for j in 0..m - 1 {
        let q2 = ((x - recurrence_diag(j, alpha)) * q1 - recurrence_off(j, alpha) * q0) / recurrence_off(j + 1, alpha);
        q0 = q1;
        q1 = q2;
        if q1.abs() > RESCALE_AT {
            let s = 1.0 / q1.abs();
            q0 *= s;
            q1 *= s;
            sum *= s * s;
            log_scale -= s.ln();
        }
        sum += q1 * q1;
    }
    sum.ln() + 2.0 * log_scale
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Full,
    Truncated,
    SymmetrizedTruncated,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Full => "full",
            RuleKind::Truncated => "truncated",
            RuleKind::SymmetrizedTruncated => "symmetrized",
        }
    }
}

/// A one-dimensional quadrature rule for the canonical weight.
///
/// For [`RuleKind::SymmetrizedTruncated`] the nodes are `-x_j < … < -x_1 <
/// x_1 < … < x_j` and both `±x_k` carry `λ_{m,k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule1D {
    m: usize,
    alpha: f64,
    kind: RuleKind,
    theta: Option<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule1D {
    pub(crate) fn from_parts(
        m: usize,
        alpha: f64,
        kind: RuleKind,
        theta: Option<f64>,
        nodes: Vec<f64>,
        weights: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(nodes.len(), weights.len());
        Self { m, alpha, kind, theta, nodes, weights }
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn kind(&self) -> RuleKind {
        self.kind
    }
    pub fn theta(&self) -> Option<f64> {
        self.theta
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of distinct positive nodes `j` (equal to `len()` except for the
    /// symmetrized kind).
    pub fn positive_len(&self) -> usize {
        match self.kind {
            RuleKind::SymmetrizedTruncated => self.nodes.len() / 2,
            _ => self.nodes.len(),
        }
    }

    pub fn weight_sum(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Applies the rule, evaluating `f` at ascending nodes and summing
    /// pairwise. The symmetrized kind is computed as the rule on `f(x)` plus
    /// the rule on `f(-x)` over the positive half.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match self.kind {
            RuleKind::SymmetrizedTruncated => {
                let j = self.positive_len();
                let pos_nodes = &self.nodes[j..];
                let pos_weights = &self.weights[j..];
                let plus: Vec<f64> = pos_nodes.iter().zip(pos_weights).map(|(&x, &w)| w * f(x)).collect();
                let minus: Vec<f64> = pos_nodes.iter().zip(pos_weights).map(|(&x, &w)| w * f(-x)).collect();
                pairwise_sum(&plus) + pairwise_sum(&minus)
            }
            _ => {
                let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
                pairwise_sum(&terms)
            }
        }
    }
}

/// Zeros of `p_m` in ascending order: Jacobi eigenvalues polished by Newton.
pub fn laguerre_zeros(m: usize, alpha: f64) -> Result<Vec<f64>> {
    let jm = jacobi_matrix(m, alpha)?;
    let (mut nodes, _) = symmetric_tridiagonal_eigen(&jm.diag, &jm.offdiag, false)?;
    for node in nodes.iter_mut() {
        let x0 = *node;
        // the eigensolver error is absolute, of order eps * ||J||
        let bracket = 1e3 * f64::EPSILON * (4.0 * m as f64 + alpha.abs() + 2.0);
        let mut x = x0;
        for _ in 0..NEWTON_STEPS {
            let step = newton_step(m, alpha, x);
            if !step.is_finite() {
                break;
            }
            x -= step;
            if step.abs() <= 2.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
        if x.is_finite() && x > 0.0 && (x - x0).abs() <= bracket.max(1e-12 * x0.abs()) {
            *node = x;
        }
    }
    Ok(nodes)
}

/// The full `m`-point Gauss–Laguerre rule for `x^alpha e^(-x)` on `[0, ∞)`.
pub fn gauss_rule(m: usize, alpha: f64) -> Result<Rule1D> {
    let nodes = laguerre_zeros(m, alpha)?;
    let ln_mass = ln_gamma(alpha + 1.0);
    let weights = nodes.iter().map(|&x| (ln_mass - log_christoffel_sum(m, alpha, x)).exp()).collect();
    Ok(Rule1D::from_parts(m, alpha, RuleKind::Full, None, nodes, weights))
}

/// Golub–Welsch weights from eigenvector first components accumulated by the
/// QL rotations. Accurate in absolute terms only; kept as a cross-check.
pub fn golub_welsch_weights(m: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let jm = jacobi_matrix(m, alpha)?;
    let (nodes, firsts) = symmetric_tridiagonal_eigen(&jm.diag, &jm.offdiag, true)?;
    let mass = canonical_moment0(alpha);
    let weights = firsts.unwrap_or_default().iter().map(|z| mass * z * z).collect();
    Ok((nodes, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_examples() {
        let j = jacobi_matrix(1, 0.0).unwrap();
        assert_eq!(j.diag, vec![1.0]);
        assert!(j.offdiag.is_empty());
        let j = jacobi_matrix(2, 0.0).unwrap();
        assert_eq!((j.diag, j.offdiag), (vec![1.0, 3.0], vec![1.0]));
        let j = jacobi_matrix(3, 0.5).unwrap();
        assert_eq!(j.diag, vec![1.5, 3.5, 5.5]);
        assert!((j.offdiag[0] - 1.5f64.sqrt()).abs() < 1e-15);
        assert!((j.offdiag[1] - 5f64.sqrt()).abs() < 1e-15);
        assert!(jacobi_matrix(0, 0.0).is_err());
        assert!(jacobi_matrix(3, -1.0).is_err());
        assert!(matches!(jacobi_matrix(MAX_ORDER + 1, 0.0), Err(QuadError::OrderTooLarge { .. })));
    }

    #[test]
    fn small_rules() {
        let r = gauss_rule(1, 0.0).unwrap();
        assert_eq!(r.nodes(), &[1.0]);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);

        let r = gauss_rule(2, 0.0).unwrap();
        let s = 2f64.sqrt();
        assert!((r.nodes()[0] - (2.0 - s)).abs() < 1e-14);
        assert!((r.nodes()[1] - (2.0 + s)).abs() < 1e-14);
        assert!((r.weights()[0] - (2.0 + s) / 4.0).abs() < 1e-14);
        assert!((r.weights()[1] - (2.0 - s) / 4.0).abs() < 1e-14);

        let r = gauss_rule(3, 0.0).unwrap();
        let v = r.apply(|x| x.powi(5));
        assert!(((v - 120.0) / 120.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_values() {
        assert!((eval_orthonormal(0, 0.0, 3.7).unwrap() - 1.0).abs() < 1e-15);
        assert!(eval_orthonormal(1, 0.0, 1.0).unwrap().abs() < 1e-15);
        assert!(eval_orthonormal(2, 0.0, 2.0 + 2f64.sqrt()).unwrap().abs() < 1e-12);
        // orthonormality of p_3 against itself via an exact rule
        let rule = gauss_rule(8, 0.5).unwrap();
        let n = rule.apply(|x| eval_orthonormal(3, 0.5, x).unwrap().powi(2));
        assert!((n - 1.0).abs() < 1e-12);
        assert!(eval_orthonormal(2000, 0.0, 1e9).is_err());
    }

    #[test]
    fn golub_welsch_agrees_where_weights_are_large() {
        let (nodes, gw) = golub_welsch_weights(20, 0.5).unwrap();
        let rule = gauss_rule(20, 0.5).unwrap();
        for k in 0..20 {
            assert!((nodes[k] - rule.nodes()[k]).abs() < 1e-12 * nodes[k].max(1.0));
            assert!((gw[k] - rule.weights()[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn large_order_weights_underflow_gracefully() {
        let rule = gauss_rule(1200, 0.0).unwrap();
        assert!(rule.weights().iter().all(|w| w.is_finite() && *w >= 0.0));
        assert!((rule.weight_sum() - 1.0).abs() < 1e-12);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
    }
}
