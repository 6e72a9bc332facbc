//! Sparse (Smolyak) quadrature `Q_ξ = Σ_{|k|_1 ≤ ξ} ⊗_i Δ_{k_i}` built from a
//! level family, realized as a signed weighted node set on a step
//! hyperbolic corner (half-line) or cross (full line).
//!
//! The difference operators are expanded as
//! `Δ_k = Σ_{e ⊆ {1..d}} (-1)^{d-|e|} Q_{2^{k(e)}}` with
//! `k(e)_i = k_i` for `i ∈ e` and `max(k_i - 1, 0)` otherwise. For `k_i = 0`,
//! `i ∉ e` the entry stands for `Q_{2^{-1}} = 0`: it is kept in the index set
//! `G(ξ)` (and in every count) with weight zero, so that `Δ_0 = Q_1`.

use std::sync::Arc;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QuadError, Result};
use crate::numeric::pairwise_sum;
use crate::quad1d::{Level, LevelFamily};
use crate::testbed::Integrand;
use crate::weight::Domain;

pub const DEFAULT_EVAL_CAP: u128 = 100_000_000;
pub const EVAL_CAP_ENV: &str = "HQ_EVAL_CAP";

/// The evaluation cap, overridable through `HQ_EVAL_CAP`.
pub fn eval_cap_from_env() -> Result<u128> {
    match std::env::var(EVAL_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u128>()
            .map_err(|_| QuadError::InvalidParam(format!("{EVAL_CAP_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_EVAL_CAP),
    }
}

/// `k(e)`: keep `k_i` on the axes in `e` (bit `i` of the mask), step down
/// elsewhere.
pub fn k_of_e(k: &[usize], e: u32) -> Vec<usize> {
    k.iter().enumerate().map(|(i, &ki)| if e & (1 << i) != 0 { ki } else { ki.saturating_sub(1) }).collect()
}

/// Multi-indices with `|k|_1 ≤ xi`, ordered by `|k|_1`, then
/// lexicographically.
pub fn multi_indices(xi: usize, d: usize) -> Vec<Vec<usize>> {
    fn compositions(total: usize, d: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == d {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            compositions(total - first, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=xi {
        compositions(total, d, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// One entry `(k, e, s)` of the index set `G(ξ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub k: Vec<usize>,
    /// Bit `i` set when axis `i` belongs to `e`.
    pub e: u32,
    pub k_e: Vec<usize>,
    /// 1-based node index per axis at level `k(e)_i`.
    pub s: Vec<usize>,
    /// False for the zero-weight `Q_{2^{-1}}` entries.
    pub contributes: bool,
}

/// Visits `G(ξ)` in canonical order `(|k|_1, k, e, s)` given per-level node
/// counts (`counts.len() > xi`).
pub fn for_each_term(xi: usize, d: usize, counts: &[usize], mut visit: impl FnMut(&Provenance)) {
    assert!(counts.len() > xi, "need node counts for levels 0..={xi}");
    for k in multi_indices(xi, d) {
        for e in 0..(1u32 << d) {
            let k_e = k_of_e(&k, e);
            let contributes = (0..d).all(|i| e & (1 << i) != 0 || k[i] > 0);
            let sizes: Vec<usize> = k_e.iter().map(|&l| counts[l]).collect();
            if sizes.contains(&0) {
                continue;
            }
            let mut p = Provenance { k: k.clone(), e, k_e, s: vec![1; d], contributes };
            loop {
                visit(&p);
                if !advance(&mut p.s, &sizes) {
                    break;
                }
            }
        }
    }
}

/// Odometer step over `1..=sizes[i]` per axis, last axis fastest.
fn advance(s: &mut [usize], sizes: &[usize]) -> bool {
    for axis in (0..s.len()).rev() {
        if s[axis] < sizes[axis] {
            s[axis] += 1;
            return true;
        }
        s[axis] = 1;
    }
    false
}

/// `|G(ξ)| = Σ_{|k|_1≤ξ} Σ_e ∏_i c(k(e)_i)`. The inner sum factorizes into
/// `∏_i (c(k_i) + c(max(k_i-1, 0)))`, leaving a truncated convolution power.
pub fn count_with(xi: usize, d: usize, counts: &[u128]) -> u128 {
    assert!(counts.len() > xi);
    let per_axis: Vec<u128> = (0..=xi).map(|k| counts[k] + counts[k.saturating_sub(1)]).collect();
    let mut poly = vec![0u128; xi + 1];
    poly[0] = 1;
    for _ in 0..d {
        let mut next = vec![0u128; xi + 1];
        for (i, &a) in poly.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in per_axis.iter().enumerate().take(xi + 1 - i) {
                next[i + j] = next[i + j].saturating_add(a.saturating_mul(b));
            }
        }
        poly = next;
    }
    poly.iter().fold(0u128, |acc, &v| acc.saturating_add(v))
}

/// `|G(ξ)|` with the full budgets `2^k`.
pub fn idealized_count(xi: usize, d: usize) -> u128 {
    let counts: Vec<u128> = (0..=xi).map(|k| 1u128 << k).collect();
    count_with(xi, d, &counts)
}

/// `|G(ξ)|` with the family's actual per-level node counts.
pub fn count_points(xi: usize, d: usize, family: &LevelFamily) -> Result<u128> {
    check_dim(d)?;
    let counts: Vec<u128> = family.node_counts(xi)?.into_iter().map(|c| c as u128).collect();
    Ok(count_with(xi, d, &counts))
}

/// Largest `ξ` with `count_points(ξ) ≤ budget`.
pub fn select_xi(budget: u128, d: usize, family: &LevelFamily) -> Result<usize> {
    let minimum = count_points(0, d, family)?;
    if budget < minimum {
        return Err(QuadError::BudgetTooSmall { budget, minimum });
    }
    let mut xi = 0;
    while count_points(xi + 1, d, family)? <= budget {
        xi += 1;
    }
    Ok(xi)
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > 16 {
        return Err(QuadError::InvalidParam(format!("dimension must be in 1..=16, got {d}")));
    }
    Ok(())
}

/// A materialized sparse grid: merged nodes with signed coefficients.
#[derive(Debug, Clone)]
pub struct SparseGrid {
    d: usize,
    xi: usize,
    domain: Domain,
    coords: Vec<f64>,
    coefficients: Vec<f64>,
    multiplicity: Vec<u32>,
    eval_count: u128,
    idealized_count: u128,
    zero_weight_entries: u128,
    cancelled: usize,
    levels: Vec<Arc<Level>>,
}

/// Bookkeeping printed with exported grids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub d: usize,
    pub xi: usize,
    pub domain: Domain,
    pub idealized_count: u128,
    pub term_count: u128,
    pub zero_weight_entries: u128,
    pub merged_count: usize,
    pub cancelled: usize,
    pub level_orders: Vec<usize>,
    pub level_sizes: Vec<usize>,
}

pub fn build_grid(xi: usize, d: usize, family: &LevelFamily, cap: u128) -> Result<SparseGrid> {
    check_dim(d)?;
    let count = count_points(xi, d, family)?;
    if count > cap {
        return Err(QuadError::BudgetOverflow { count, cap });
    }
    let levels: Vec<Arc<Level>> = (0..=xi).map(|k| family.level(k)).collect::<Result<_>>()?;
    let counts: Vec<usize> = levels.iter().map(|l| l.rule.len()).collect();
    // levels sharing an order are the same rule; key nodes by the first one
    let canonical: Vec<u32> =
        levels.iter().map(|l| levels.iter().position(|o| o.m == l.m).expect("level present") as u32).collect();

    let mut merged: IndexMap<Vec<u32>, (f64, u32)> = IndexMap::new();
    let mut total: u128 = 0;
    let mut zero_weight: u128 = 0;
    let mut key = vec![0u32; 2 * d];
    for_each_term(xi, d, &counts, |p| {
        total += 1;
        if !p.contributes {
            zero_weight += 1;
            return;
        }
        let sign = if (d - p.e.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut coef = sign;
        for i in 0..d {
            let level = p.k_e[i];
            coef *= levels[level].rule.weights()[p.s[i] - 1];
            key[2 * i] = canonical[level];
            key[2 * i + 1] = p.s[i] as u32;
        }
        let entry = merged.entry(key.clone()).or_insert((0.0, 0));
        entry.0 += coef;
        entry.1 += 1;
    });
    debug_assert_eq!(total, count);

    let mut coords = Vec::with_capacity(merged.len() * d);
    let mut coefficients = Vec::with_capacity(merged.len());
    let mut multiplicity = Vec::with_capacity(merged.len());
    let mut cancelled = 0;
    for (key, (coef, mult)) in merged {
        if coef == 0.0 {
            cancelled += 1;
            continue;
        }
        for i in 0..d {
            let rule = &levels[key[2 * i] as usize].rule;
            coords.push(rule.nodes()[key[2 * i + 1] as usize - 1]);
        }
        coefficients.push(coef);
        multiplicity.push(mult);
    }

    Ok(SparseGrid {
        d,
        xi,
        domain: family.domain(),
        coords,
        coefficients,
        multiplicity,
        eval_count: count,
        idealized_count: idealized_count(xi, d),
        zero_weight_entries: zero_weight,
        cancelled,
        levels,
    })
}

impl SparseGrid {
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn xi(&self) -> usize {
        self.xi
    }
    pub fn domain(&self) -> Domain {
        self.domain
    }
    /// Number of merged nodes, i.e. integrand evaluations per application.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }
    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
    /// `|G(ξ)|` counted with multiplicity before merging.
    pub fn eval_count(&self) -> u128 {
        self.eval_count
    }
    pub fn idealized_count(&self) -> u128 {
        self.idealized_count
    }
    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }
    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }
    pub fn coefficient(&self, i: usize) -> f64 {
        self.coefficients[i]
    }
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }
    pub fn multiplicity(&self, i: usize) -> u32 {
        self.multiplicity[i]
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            d: self.d,
            xi: self.xi,
            domain: self.domain,
            idealized_count: self.idealized_count,
            term_count: self.eval_count,
            zero_weight_entries: self.zero_weight_entries,
            merged_count: self.len(),
            cancelled: self.cancelled,
            level_orders: self.levels.iter().map(|l| l.m).collect(),
            level_sizes: self.levels.iter().map(|l| l.rule.len()).collect(),
        }
    }

    /// `Σ coefficient · f(node)`. Nodes may be evaluated concurrently; the
    /// products are reduced by a fixed pairwise tree in canonical order, so
    /// the result does not depend on the thread count.
    pub fn apply_with<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let products: Vec<f64> =
            (0..self.len()).into_par_iter().with_min_len(256).map(|i| self.coefficients[i] * f(self.node(i))).collect();
        if let Some(i) = products.iter().position(|v| !v.is_finite()) {
            return Err(QuadError::Evaluation {
                node: self.node(i).to_vec(),
                reason: format!("non-finite value {}", products[i]),
            });
        }
        Ok(pairwise_sum(&products))
    }

    pub fn apply(&self, f: &Integrand) -> Result<f64> {
        if f.arity() != self.d {
            return Err(QuadError::InvalidParam(format!(
                "integrand arity {} does not match grid dimension {}",
                f.arity(),
                self.d
            )));
        }
        self.apply_with(|x| f.evaluate(x))
    }

    /// Whether the node set is closed under `x_i -> -x_i` on every axis.
    pub fn is_sign_symmetric(&self) -> bool {
        let set: std::collections::HashSet<Vec<u64>> =
            self.nodes().map(|x| x.iter().map(|v| v.to_bits()).collect()).collect();
        self.nodes().all(|x| {
            (0..self.d).all(|i| {
                let mut y: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
                y[i] = (-x[i]).to_bits();
                set.contains(&y)
            })
        })
    }
}
