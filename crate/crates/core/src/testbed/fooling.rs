//! Fooling functions: unit-ball functions that vanish at a given node set
//! but have a positive weighted integral. Their integral bounds from below
//! the worst-case error of every quadrature using those nodes.

use std::sync::Arc;

use serde::Serialize;

use super::bump::CellBump;
use super::integrand::{Factor, Integrand};
use crate::error::{QuadError, Result};
use crate::weight::{sobolev_norm_estimate, Domain, WeightParams};

/// Panels per cell axis for the norm certificate; the bound is re-checked at
/// twice this resolution.
pub const CERT_PANELS: usize = 64;

const NORM_SLACK: f64 = 1e-6;

/// A certified fooling function together with its construction data.
#[derive(Debug, Clone)]
pub struct FoolingCertificate {
    /// The normalized function `h̄`.
    pub function: Integrand,
    /// Upper bound on the weighted Sobolev norm of `h̄`.
    pub norm_bound: f64,
    /// Exact `∫ h̄ w`, a lower bound on the worst-case error.
    pub integral: f64,
    /// `h̄` was evaluated at every node and found to be zero.
    pub vanish_checked: bool,
    pub summary: CertificateSummary,
}

/// The exportable part of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub n: usize,
    pub d: usize,
    pub r: u32,
    pub nodes_hash: String,
    pub delta: f64,
    /// 1-based cell index per axis: the cell is `∏ (δ(c_i - 1), δ c_i)`.
    pub cell: Vec<u64>,
    /// `M_n` of the multivariate construction.
    pub m_param: Option<u64>,
    pub norm_bound: f64,
    pub integral: f64,
}

/// FNV-1a over the bit patterns of all node coordinates.
pub fn nodes_hash<'a>(coords: impl IntoIterator<Item = &'a f64>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in coords {
        for byte in c.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

fn require_half_line(weight: &WeightParams) -> Result<()> {
    if weight.domain() != Domain::HalfLine || !weight.is_canonical() {
        return Err(QuadError::InvalidParam("fooling functions are built for the canonical half-line weight".into()));
    }
    Ok(())
}

/// Cell state relative to a node set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Occupancy {
    /// No node in the closed cell.
    Free,
    /// Nodes only on the boundary.
    Boundary,
    Occupied,
}

fn interval_occupancy(sorted: &[f64], lo: f64, hi: f64) -> Occupancy {
    let start = sorted.partition_point(|&x| x < lo);
    let end = sorted.partition_point(|&x| x <= hi);
    if start == end {
        return Occupancy::Free;
    }
    if sorted[start..end].iter().all(|&x| x == lo || x == hi) {
        Occupancy::Boundary
    } else {
        Occupancy::Occupied
    }
}

/// Normalizes `h` to the unit ball and certifies the result.
fn certify(
    h: Integrand,
    weight: &WeightParams,
    raw_integral: f64,
    vanishes: impl Fn(&Integrand) -> bool,
) -> Result<(Integrand, f64, f64, bool)> {
    let coarse = sobolev_norm_estimate(&h, weight, CERT_PANELS)?;
    let fine = sobolev_norm_estimate(&h, weight, 2 * CERT_PANELS)?;
    let upper = coarse.max(fine);
    let certified = upper * (1.0 + (coarse - fine).abs() / fine + 1e-12);
    let scale = 1.0 / certified;
    let normalized = h.with_scale(scale);
    let norm_bound = upper * scale;
    if !(norm_bound <= 1.0 + NORM_SLACK) {
        return Err(QuadError::CertificationFailed { bound: norm_bound });
    }
    let vanish = vanishes(&normalized);
    Ok((normalized, norm_bound, raw_integral * scale, vanish))
}

/// The univariate construction: with `δ = n^{-1/2}`, pick the first
/// interval `(δ(i-1), δ i)`, `n+1 ≤ i ≤ 2n+2`, free of nodes, and place the
/// bump there.
pub fn make_fooling_1d(nodes: &[f64], r: u32, weight: &WeightParams) -> Result<FoolingCertificate> {
    require_half_line(weight)?;
    if weight.d() != 1 {
        return Err(QuadError::InvalidParam("univariate construction needs d = 1".into()));
    }
    if nodes.is_empty() {
        return Err(QuadError::InvalidParam("node set must be non-empty".into()));
    }
    if let Some((index, &value)) = nodes.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
        return Err(QuadError::DomainViolation { index, value });
    }
    let n = nodes.len();
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let delta = (n as f64).powf(-0.5);

    let candidates = (n + 1)..=(2 * n + 2);
    let mut fallback = None;
    let mut chosen = None;
    for i in candidates {
        let (lo, hi) = (delta * (i - 1) as f64, delta * i as f64);
        match interval_occupancy(&sorted, lo, hi) {
            Occupancy::Free => {
                chosen = Some(i);
                break;
            }
            Occupancy::Boundary if fallback.is_none() => fallback = Some(i),
            _ => {}
        }
    }
    let i = chosen.or(fallback).expect("n + 2 disjoint open intervals cannot all hold one of n nodes");

    let alpha = weight.alpha();
    let cell = Arc::new(CellBump::new(delta * (i - 1) as f64, delta, alpha));
    let raw_integral = cell.weighted_integral(alpha).expect("cell built for this weight");
    let h = Integrand::tensor(format!("fooling-1d-n{n}-r{r}"), vec![Factor::Cell(cell)], 1.0, r);
    let (function, norm_bound, integral, vanish_checked) =
        certify(h, &weight.with_r(r), raw_integral, |f| nodes.iter().all(|&x| f.evaluate(&[x]) == 0.0))?;

    Ok(FoolingCertificate {
        summary: CertificateSummary {
            n,
            d: 1,
            r,
            nodes_hash: nodes_hash(nodes),
            delta,
            cell: vec![i as u64],
            m_param: None,
            norm_bound,
            integral,
        },
        function,
        norm_bound,
        integral,
        vanish_checked,
    })
}

/// `s^d >= m` in integers, i.e. `s >= m^{1/d}`.
fn at_least_root(s: u64, m: u64, d: usize) -> bool {
    let mut p: u128 = 1;
    for _ in 0..d {
        p = p.saturating_mul(u128::from(s));
        if p >= u128::from(m) {
            return true;
        }
    }
    p >= u128::from(m)
}

fn min_root(m: u64, d: usize) -> u64 {
    let mut s = (m as f64).powf(1.0 / d as f64).floor().max(1.0) as u64;
    while s > 1 && at_least_root(s - 1, m, d) {
        s -= 1;
    }
    while !at_least_root(s, m, d) {
        s += 1;
    }
    s
}

/// Visits `Γ_d(M) = {s ∈ N^d : ∏ s_i ≤ 2M, s_i ≥ M^{1/d}}` in lexicographic
/// order until `visit` returns `false`.
pub fn visit_gamma_set(d: usize, m: u64, mut visit: impl FnMut(&[u64]) -> bool) {
    let low = min_root(m, d);
    let cap = 2 * m;
    let mut s = vec![low; d];
    fn rec(s: &mut [u64], axis: usize, prod: u64, low: u64, cap: u64, visit: &mut dyn FnMut(&[u64]) -> bool) -> bool {
        if axis == s.len() {
            return visit(s);
        }
        let rest = (s.len() - axis - 1) as u32;
        let min_rest = low.saturating_pow(rest);
        let mut v = low;
        while prod.saturating_mul(v).saturating_mul(min_rest) <= cap {
            s[axis] = v;
            if !rec(s, axis + 1, prod * v, low, cap, visit) {
                return false;
            }
            v += 1;
        }
        true
    }
    rec(&mut s, 0, 1, low, cap, &mut visit);
}

pub fn gamma_set_size(d: usize, m: u64) -> u64 {
    let mut count = 0;
    visit_gamma_set(d, m, |_| {
        count += 1;
        true
    });
    count
}

/// Smallest `M ≥ 1` with `|Γ_d(M)| ≥ target`. The count is not monotone in
/// `M`, so the search is a plain upward scan.
pub fn smallest_gamma_parameter(d: usize, target: u64) -> u64 {
    let mut m = 1;
    while gamma_set_size(d, m) < target {
        m += 1;
    }
    m
}

/// The multivariate construction on the positive orthant: tensor bumps on
/// the first cell `K_s`, `s ∈ Γ_d(M_n)`, avoiding every node.
pub fn make_fooling_dd(nodes: &[Vec<f64>], r: u32, weight: &WeightParams) -> Result<FoolingCertificate> {
    require_half_line(weight)?;
    let d = weight.d();
    if d < 2 {
        return Err(QuadError::InvalidParam("multivariate construction needs d >= 2".into()));
    }
    if nodes.is_empty() {
        return Err(QuadError::InvalidParam("node set must be non-empty".into()));
    }
    for node in nodes {
        if node.len() != d {
            return Err(QuadError::InvalidParam(format!("node {node:?} does not have {d} coordinates")));
        }
        if let Some((index, &value)) = node.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
            return Err(QuadError::DomainViolation { index, value });
        }
    }
    let n = nodes.len();
    let m_n = smallest_gamma_parameter(d, n as u64 + 1);
    let delta = (m_n as f64).powf(-1.0 / (2.0 * d as f64));

    let occupancy = |s: &[u64]| -> Occupancy {
        let mut state = Occupancy::Free;
        for node in nodes {
            let mut inside_closed = true;
            let mut on_boundary = false;
            for (x, &si) in node.iter().zip(s) {
                let (lo, hi) = (delta * (si - 1) as f64, delta * si as f64);
                if *x < lo || *x > hi {
                    inside_closed = false;
                    break;
                }
                if *x == lo || *x == hi {
                    on_boundary = true;
                }
            }
            if inside_closed {
                if !on_boundary {
                    return Occupancy::Occupied;
                }
                state = Occupancy::Boundary;
            }
        }
        state
    };
    let mut chosen: Option<Vec<u64>> = None;
    let mut fallback: Option<Vec<u64>> = None;
    visit_gamma_set(d, m_n, |s| match occupancy(s) {
        Occupancy::Free => {
            chosen = Some(s.to_vec());
            false
        }
        Occupancy::Boundary => {
            if fallback.is_none() {
                fallback = Some(s.to_vec());
            }
            true
        }
        Occupancy::Occupied => true,
    });
    let cell = chosen.or(fallback).expect("|Γ_d(M_n)| > n disjoint open cells cannot all hold a node");

    let alpha = weight.alpha();
    let factors: Vec<Factor> =
        cell.iter().map(|&si| Factor::Cell(Arc::new(CellBump::new(delta * (si - 1) as f64, delta, alpha)))).collect();
    let raw_integral: f64 =
        factors.iter().map(|f| f.half_line_integral(alpha).expect("cell built for this weight")).product();
    let h = Integrand::tensor(format!("fooling-{d}d-n{n}-r{r}"), factors, 1.0, r);
    let (function, norm_bound, integral, vanish_checked) =
        certify(h, &weight.with_r(r), raw_integral, |f| nodes.iter().all(|x| f.evaluate(x) == 0.0))?;

    Ok(FoolingCertificate {
        summary: CertificateSummary {
            n,
            d,
            r,
            nodes_hash: nodes_hash(nodes.iter().flatten()),
            delta,
            cell,
            m_param: Some(m_n),
            norm_bound,
            integral,
        },
        function,
        norm_bound,
        integral,
        vanish_checked,
    })
}

/// Certified lower bound on the worst-case error of every quadrature whose
/// nodes are `nodes`.
pub fn lower_bound_estimate(nodes: &[Vec<f64>], r: u32, weight: &WeightParams) -> Result<f64> {
    let cert = if weight.d() == 1 {
        let flat: Vec<f64> = nodes.iter().map(|x| x[0]).collect();
        make_fooling_1d(&flat, r, weight)?
    } else {
        make_fooling_dd(nodes, r, weight)?
    };
    Ok(cert.integral)
}
