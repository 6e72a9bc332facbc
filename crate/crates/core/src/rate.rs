//! Empirical convergence rates: least-squares slopes of log error against
//! log n.

use serde::Serialize;

use crate::numeric::linear_fit;

/// Errors at or below this are dominated by rounding and left out of fits.
pub const ERROR_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    /// `(n, error)` pairs that entered the fit.
    pub samples: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// `p` when the fit was made on `error / (log n)^p`.
    pub log_correction_exponent: Option<f64>,
}

impl RateFit {
    /// Fits `log error ≈ intercept + slope · log n` over the samples with
    /// `error > 1e-13` and `n > 1`. Returns `None` when fewer than two remain.
    pub fn fit(samples: &[(f64, f64)]) -> Option<Self> {
        Self::fit_corrected(samples, None)
    }

    /// As [`RateFit::fit`], after dividing each error by `(log n)^p`.
    pub fn fit_corrected(samples: &[(f64, f64)], log_exponent: Option<f64>) -> Option<Self> {
        let kept: Vec<(f64, f64)> =
            samples.iter().copied().filter(|&(n, e)| e.is_finite() && e > ERROR_FLOOR && n > 1.0).collect();
        if kept.len() < 2 {
            return None;
        }
        let p = log_exponent.unwrap_or(0.0);
        let xs: Vec<f64> = kept.iter().map(|&(n, _)| n.ln()).collect();
        let ys: Vec<f64> = kept.iter().map(|&(n, e)| e.ln() - p * n.ln().ln()).collect();
        let (slope, intercept) = linear_fit(&xs, &ys)?;
        Some(Self { samples: kept, slope, intercept, log_correction_exponent: log_exponent })
    }
}
