//! Symmetric tridiagonal eigenproblems by implicit-shift QL.

use crate::error::{QuadError, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// sub/superdiagonal `offdiag` (`offdiag[i]` couples rows `i` and `i + 1`),
/// sorted ascending.
///
/// With `first_components` the first row of the orthonormal eigenvector
/// matrix is accumulated alongside the rotations and returned in the same
/// order as the eigenvalues.
pub fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    offdiag: &[f64],
    first_components: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = diag.len();
    if n == 0 {
        return Ok((Vec::new(), first_components.then(Vec::new)));
    }
    if offdiag.len() + 1 != n {
        return Err(QuadError::InvalidParam(format!("offdiagonal has {} entries, expected {}", offdiag.len(), n - 1)));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = first_components.then(|| {
        let mut z = vec![0.0; n];
        z[0] = 1.0;
        z
    });

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(QuadError::EigenNoConvergence { index: l, iterations: sweeps });
            }
            // Wilkinson-style shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_mut() {
                    let f = z[i + 1];
                    z[i + 1] = s * z[i] + c * f;
                    z[i] = c * z[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let firsts = z.map(|z| order.iter().map(|&i| z[i]).collect());
    Ok((values, firsts))
}

/// Number of eigenvalues strictly below `t`, by Sturm sequence counting.
pub fn count_eigenvalues_below(diag: &[f64], offdiag: &[f64], t: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &di) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { offdiag[i - 1] * offdiag[i - 1] / q };
        q = di - t - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (di.abs() + t.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}
