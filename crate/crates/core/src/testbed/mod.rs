//! Test integrands with analytic derivatives and exact integrals, and the
//! fooling-function generator for worst-case lower bounds.

mod bump;
mod fooling;
mod integrand;

pub use bump::{inverse_weight_derivative, Bump, CellBump, MAX_BUMP_ORDER};
pub use fooling::{
    gamma_set_size, lower_bound_estimate, make_fooling_1d, make_fooling_dd, nodes_hash, smallest_gamma_parameter,
    visit_gamma_set, CertificateSummary, FoolingCertificate, CERT_PANELS,
};
pub use integrand::{lookup, registry, Factor, Integrand, IntegrandInfo, ANALYTIC_CLASS, GOMPERTZ, REGISTRY_NAMES};
