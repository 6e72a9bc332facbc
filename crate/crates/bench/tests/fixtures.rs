use hcquad::{build_grid, Domain, DEFAULT_EVAL_CAP};
use hcquad_bench::warm_family;

#[test]
fn warm_family_serves_benchmark_grids() {
    let family = warm_family(Domain::HalfLine, 7);
    assert_eq!(family.node_counts(7).unwrap().len(), 8);
    let grid = build_grid(7, 3, &family, DEFAULT_EVAL_CAP).unwrap();
    assert!(grid.len() > 1000);
}
