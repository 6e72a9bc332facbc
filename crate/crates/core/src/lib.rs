//! Truncated Gauss–Laguerre rules and sparse grids for integrals against
//! `x^α e^{-ax+b}` on `[0, ∞)^d` and `|x|^α e^{-a|x|+b}` on `ℝ^d`, plus
//! certified worst-case ("fooling") integrands for lower-bound experiments.
//!
//! ```
//! use hcquad::{build_grid, lookup, Domain, LevelFamily, TruncationPolicy, DEFAULT_EVAL_CAP};
//!
//! let family = LevelFamily::new(TruncationPolicy::default(), 0.0, Domain::HalfLine).unwrap();
//! let grid = build_grid(6, 2, &family, DEFAULT_EVAL_CAP).unwrap();
//! let f = lookup("rational", 2).unwrap();
//! let value = grid.apply(&f).unwrap();
//! let exact = f.exact_integral(0.0, Domain::HalfLine).unwrap();
//! assert!((value - exact).abs() < 1e-2);
//! ```

// parameter checks are written `!(x > bound)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numeric;
pub mod orthopoly;
pub mod quad1d;
pub mod rate;
pub mod smolyak;
pub mod testbed;
pub mod weight;

pub use error::{QuadError, Result};
pub use orthopoly::{gauss_rule, jacobi_matrix, laguerre_zeros, Rule1D, RuleKind, MAX_ORDER};
pub use quad1d::{
    symmetrized_rule, truncated_rule, truncation_index, Level, LevelFamily, TruncationPolicy, DEFAULT_THETA,
};
pub use rate::RateFit;
pub use smolyak::{
    build_grid, count_points, eval_cap_from_env, idealized_count, select_xi, GridSummary, SparseGrid, DEFAULT_EVAL_CAP,
    EVAL_CAP_ENV,
};
pub use testbed::{lookup, registry, FoolingCertificate, Integrand, GOMPERTZ};
pub use weight::{sobolev_norm_estimate, Domain, WeightParams};
