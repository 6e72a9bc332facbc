//! Truncated and symmetrized Gauss–Laguerre rules and the dyadic level
//! family `Q_{2^k}` that feeds the sparse-grid construction.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{QuadError, Result};
use crate::orthopoly::{
    count_eigenvalues_below, gauss_rule, jacobi_matrix, laguerre_zeros, Rule1D, RuleKind, MAX_ORDER,
};
use crate::weight::Domain;

pub const DEFAULT_THETA: f64 = 0.25;

/// Truncation parameter `theta`: nodes above `4 theta m` are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    theta: f64,
}

impl TruncationPolicy {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(QuadError::InvalidParam(format!("theta must lie in (0, 1), got {theta}")));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn threshold(&self, m: usize) -> f64 {
        4.0 * self.theta * m as f64
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { theta: DEFAULT_THETA }
    }
}

/// `j(m)`: the number of ascending `zeros` not exceeding `4 theta m`.
pub fn truncation_index_of(zeros: &[f64], m: usize, theta: f64) -> usize {
    let t = 4.0 * theta * m as f64;
    zeros.partition_point(|&x| x <= t)
}

pub fn truncation_index(m: usize, alpha: f64, theta: f64) -> Result<usize> {
    let policy = TruncationPolicy::new(theta)?;
    let zeros = laguerre_zeros(m, alpha)?;
    Ok(truncation_index_of(&zeros, m, policy.theta()))
}

/// Sturm-count estimate of `j(m)`, O(m). May differ from the exact value
/// only when a zero sits within rounding of the threshold.
fn truncation_index_estimate(m: usize, alpha: f64, theta: f64) -> Result<usize> {
    let jm = jacobi_matrix(m, alpha)?;
    let t = 4.0 * theta * m as f64;
    Ok(count_eigenvalues_below(&jm.diag, &jm.offdiag, t * (1.0 + 1e-13)))
}

/// `j(m)` from Sturm counts when no zero lies near the threshold, falling
/// back to the computed zeros otherwise.
fn truncation_index_checked(m: usize, alpha: f64, theta: f64) -> Result<usize> {
    let jm = jacobi_matrix(m, alpha)?;
    let t = 4.0 * theta * m as f64;
    let below = count_eigenvalues_below(&jm.diag, &jm.offdiag, t * (1.0 - 1e-9));
    let above = count_eigenvalues_below(&jm.diag, &jm.offdiag, t * (1.0 + 1e-9));
    if below == above {
        Ok(below)
    } else {
        truncation_index(m, alpha, theta)
    }
}

/// The first `j(m)` node/weight pairs of the full Gauss rule.
pub fn truncated_rule(m: usize, alpha: f64, theta: f64) -> Result<Rule1D> {
    let policy = TruncationPolicy::new(theta)?;
    let full = gauss_rule(m, alpha)?;
    let j = truncation_index_of(full.nodes(), m, policy.theta());
    if j == 0 {
        return Err(QuadError::EmptyRule { m, theta });
    }
    Ok(Rule1D::from_parts(
        m,
        alpha,
        RuleKind::Truncated,
        Some(theta),
        full.nodes()[..j].to_vec(),
        full.weights()[..j].to_vec(),
    ))
}

/// The truncated rule reflected onto the full line: nodes `±x_{m,k}`, each
/// carrying `λ_{m,k}`.
pub fn symmetrized_rule(m: usize, alpha: f64, theta: f64) -> Result<Rule1D> {
    let half = truncated_rule(m, alpha, theta)?;
    Ok(symmetrize(&half))
}

fn symmetrize(half: &Rule1D) -> Rule1D {
    let mut nodes: Vec<f64> = half.nodes().iter().rev().map(|x| -x).collect();
    nodes.extend_from_slice(half.nodes());
    let mut weights: Vec<f64> = half.weights().iter().rev().copied().collect();
    weights.extend_from_slice(half.weights());
    Rule1D::from_parts(half.m(), half.alpha(), RuleKind::SymmetrizedTruncated, half.theta(), nodes, weights)
}

/// One member of the level family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub k: usize,
    /// Largest order meeting the level's node budget.
    pub m: usize,
    pub rule: Rule1D,
}

/// The sequence `Q_{2^k}`, `k = 0, 1, …`, of truncated rules with maximal
/// order under the node budget `2^k`. Levels are built on demand and cached.
///
/// On the full line each node `x_{m,k}` yields the pair `±x_{m,k}`, so the
/// budget on `j(m)` is `2^(k-1)`; level 0 is given one pair, the smallest
/// non-empty symmetric rule.
#[derive(Debug)]
pub struct LevelFamily {
    policy: TruncationPolicy,
    alpha: f64,
    domain: Domain,
    levels: RwLock<BTreeMap<usize, Arc<Level>>>,
}

impl LevelFamily {
    pub fn new(policy: TruncationPolicy, alpha: f64, domain: Domain) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(QuadError::InvalidParam(format!("alpha must be > -1, got {alpha}")));
        }
        Ok(Self { policy, alpha, domain, levels: RwLock::new(BTreeMap::new()) })
    }

    pub fn policy(&self) -> TruncationPolicy {
        self.policy
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Budget on the truncation index `j(m)` at level `k`.
    pub fn index_budget(&self, k: usize) -> usize {
        let nodes = 1usize << k.min(62);
        match self.domain {
            Domain::HalfLine => nodes,
            Domain::FullLine => (nodes / 2).max(1),
        }
    }

    pub fn level(&self, k: usize) -> Result<Arc<Level>> {
        if let Some(level) = self.levels.read().expect("level cache poisoned").get(&k) {
            return Ok(Arc::clone(level));
        }
        let level = Arc::new(self.build_level(k)?);
        let mut cache = self.levels.write().expect("level cache poisoned");
        Ok(Arc::clone(cache.entry(k).or_insert(level)))
    }

    pub fn level_rule(&self, k: usize) -> Result<Rule1D> {
        Ok(self.level(k)?.rule.clone())
    }

    /// Node counts of levels `0..=max_level`.
    pub fn node_counts(&self, max_level: usize) -> Result<Vec<usize>> {
        (0..=max_level).map(|k| Ok(self.level(k)?.rule.len())).collect()
    }

    fn build_level(&self, k: usize) -> Result<Level> {
        let m = self.max_order_within(self.index_budget(k))?;
        let theta = self.policy.theta();
        let half = truncated_rule(m, self.alpha, theta)?;
        let rule = match self.domain {
            Domain::HalfLine => half,
            Domain::FullLine => symmetrize(&half),
        };
        Ok(Level { k, m, rule })
    }

    /// Largest `m` with `j(m) <= budget`: doubling, then bisection on the
    /// Sturm estimate, then a checked count with a short scan upward since
    /// `j` is not known to be monotone in `m`.
    pub fn max_order_within(&self, budget: usize) -> Result<usize> {
        let theta = self.policy.theta();
        let alpha = self.alpha;
        let fits = |m: usize| -> Result<bool> { Ok(truncation_index_estimate(m, alpha, theta)? <= budget) };

        let mut lo = 1;
        let mut hi = 2;
        while fits(hi)? {
            lo = hi;
            if hi == MAX_ORDER {
                return Err(QuadError::OrderTooLarge { m: MAX_ORDER + 1, max: MAX_ORDER });
            }
            hi = (hi * 2).min(MAX_ORDER);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        let exact = |m: usize| truncation_index_checked(m, alpha, theta);
        let mut best = lo;
        while best > 1 && exact(best)? > budget {
            best -= 1;
        }
        let mut probe = best + 1;
        while probe <= best + 2 && probe <= MAX_ORDER {
            if exact(probe)? <= budget {
                best = probe;
            }
            probe += 1;
        }
        Ok(best)
    }
}
