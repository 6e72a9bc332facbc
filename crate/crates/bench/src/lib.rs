//! Shared fixtures for the quadrature benchmarks.

use hcquad::{Domain, LevelFamily, TruncationPolicy};

/// A level family with the default truncation and `alpha = 0`, levels
/// `0..=max_level` already built.
pub fn warm_family(domain: Domain, max_level: usize) -> LevelFamily {
    let family = LevelFamily::new(TruncationPolicy::default(), 0.0, domain).expect("valid parameters");
    family.node_counts(max_level).expect("levels build");
    family
}
