//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use clap::Parser;
use hcquad::numeric::gamma;
use hcquad::smolyak::{k_of_e, multi_indices};
use hcquad::testbed::{make_fooling_1d, make_fooling_dd, Factor, REGISTRY_NAMES};
use hcquad::{
    build_grid, count_points, gauss_rule, idealized_count, laguerre_zeros, lookup, symmetrized_rule, truncated_rule,
    Domain, Integrand, LevelFamily, RateFit, TruncationPolicy, WeightParams, DEFAULT_EVAL_CAP,
};
use hcquad_cli::args::{Cli, DomainArg, WeightArgs};
use hcquad_cli::commands::{sweep, SweepConfig};
use hcquad_cli::table::Cell;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn family(alpha: f64, domain: Domain) -> LevelFamily {
    LevelFamily::new(TruncationPolicy::default(), alpha, domain).unwrap()
}

fn gauss_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0, 0, 0);
    for alpha in [0.0, 0.5, 2.0] {
        for m in 1..=50 {
            let rule = gauss_rule(m, alpha).unwrap();
            for j in 0..2 * m {
                let exact = gamma(j as f64 + alpha + 1.0);
                let v = rule.apply(|x| x.powi(j as i32));
                let rel = ((v - exact) / exact).abs();
                if rel > worst.0 {
                    worst = (rel, alpha, m, j);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let (rel, alpha, m, j) = worst;
    Outcome::new(
        rel <= 1e-10 && within(elapsed, 10),
        format!("max rel error {rel:.2e} (alpha={alpha}, m={m}, j={j}) over 150 rules; {elapsed:.2?} (limit 10 s)"),
    )
}

fn closed_form_nodes() -> Outcome {
    let mut err = 0.0f64;
    for alpha in [0.0, 0.5, 2.0, -0.5, 3.7] {
        let r = gauss_rule(1, alpha).unwrap();
        err = err.max((r.nodes()[0] - (alpha + 1.0)).abs() / (alpha + 1.0));
        err = err.max((r.weights()[0] - gamma(alpha + 1.0)).abs() / gamma(alpha + 1.0));
    }
    let r = gauss_rule(2, 0.0).unwrap();
    let s = 2f64.sqrt();
    for (k, (x, w)) in [(2.0 - s, (2.0 + s) / 4.0), (2.0 + s, (2.0 - s) / 4.0)].into_iter().enumerate() {
        err = err.max((r.nodes()[k] - x).abs()).max((r.weights()[k] - w).abs());
    }
    Outcome::new(err <= 1e-12, format!("max deviation from closed forms {err:.2e} (tolerance 1e-12)"))
}

fn zero_location_laws() -> Outcome {
    let start = Instant::now();
    let orders = [16usize, 32, 64, 128, 256];
    let mut first = Vec::new();
    let mut last = Vec::new();
    let mut ratio_out = Vec::new();
    let (mut rmin, mut rmax) = (f64::MAX, 0.0f64);
    for &m in &orders {
        let z = laguerre_zeros(m, 0.0).unwrap();
        let mf = m as f64;
        first.push(z[0] * mf);
        last.push((4.0 * mf - z[m - 1]) / mf.cbrt());
        let (lo, hi) = z
            .iter()
            .enumerate()
            .map(|(k, x)| x * mf / ((k + 1) as f64).powi(2))
            .fold((f64::MAX, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        rmin = rmin.min(lo);
        rmax = rmax.max(hi);
        if lo < 0.5 || hi > 3.5 {
            ratio_out.push(format!("m={m}: [{lo:.3}, {hi:.3}]"));
        }
    }
    // one constant per law: the smallest observed value, required positive and
    // stable across m (spread within a factor 2)
    let fit = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::MAX, f64::min);
        let hi = v.iter().copied().fold(0.0, f64::max);
        (lo, lo > 0.0 && hi <= 2.0 * lo)
    };
    let (c1, ok1) = fit(&first);
    let (c2, ok2) = fit(&last);
    let ok3 = ratio_out.is_empty();
    let elapsed = start.elapsed();
    let detail = format!(
        "x_1 > c/m with c={c1:.4} [{}]; x_m <= 4m - c m^(1/3) with c={c2:.4} [{}]; x_k m/k^2 in [{rmin:.3}, {rmax:.3}] vs [0.5, 3.5] [{}]{}; {elapsed:.2?} (limit 30 s)",
        if ok1 { "ok" } else { "violated" },
        if ok2 { "ok" } else { "violated" },
        if ok3 { "ok" } else { "violated" },
        if ok3 { String::new() } else { format!(" at {}", ratio_out.join(", ")) },
    );
    Outcome::new(ok1 && ok2 && ok3 && within(elapsed, 30), detail)
}

fn truncated_convergence() -> Outcome {
    let start = Instant::now();
    let fam = family(0.0, Domain::HalfLine);
    let mut parts = Vec::new();
    let mut pass = true;
    for r in [1u32, 2] {
        let f = lookup(&format!("shifted{r}"), 1).unwrap();
        let exact = gamma(f64::from(r) + 1.0) * (-1.0f64).exp();
        let samples: Vec<(f64, f64)> = (4..=12)
            .map(|k| {
                let rule = fam.level_rule(k).unwrap();
                (rule.len() as f64, (rule.apply(|x| f.evaluate(&[x])) - exact).abs())
            })
            .collect();
        let fit = RateFit::fit(&samples).unwrap();
        let target = -f64::from(r) / 2.0 + 0.25;
        pass &= fit.slope <= target;
        parts.push(format!("r={r}: slope {:.3} (<= {target})", fit.slope));
    }
    let elapsed = start.elapsed();
    Outcome::new(pass && within(elapsed, 60), format!("{}; {elapsed:.2?} (limit 60 s)", parts.join(", ")))
}

fn random_factor(rng: &mut ChaCha8Rng, domain: Domain) -> Factor {
    let choices = if domain == Domain::HalfLine { 4 } else { 3 };
    match rng.gen_range(0..choices) {
        0 => Factor::Exponential(rng.gen_range(0.1..1.0)),
        1 => Factor::Cosine { freq: rng.gen_range(0.0..0.8), phase: rng.gen_range(0.0..0.3) },
        2 => Factor::Rational,
        _ => Factor::Monomial(rng.gen_range(0..4)),
    }
}

/// `Σ_{|k|≤ξ} ∏_i (Q_{2^{k_i}} - Q_{2^{k_i-1}}) f_i` with the 1-D rules applied
/// factor by factor.
fn difference_oracle(f: &Integrand, xi: usize, fam: &LevelFamily) -> f64 {
    let d = f.arity();
    let deltas: Vec<Vec<f64>> = f
        .factors()
        .iter()
        .map(|factor| {
            let q: Vec<f64> = (0..=xi).map(|k| fam.level_rule(k).unwrap().apply(|x| factor.value(x))).collect();
            (0..=xi).map(|k| if k == 0 { q[0] } else { q[k] - q[k - 1] }).collect()
        })
        .collect();
    let sum: f64 = multi_indices(xi, d).iter().map(|k| (0..d).map(|i| deltas[i][k[i]]).product::<f64>()).sum();
    f.scale() * sum
}

fn smolyak_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for case in 0..20 {
        let d = 2 + case % 2;
        let domain = if case % 5 == 4 { Domain::FullLine } else { Domain::HalfLine };
        let alpha = if case % 3 == 0 { 0.5 } else { 0.0 };
        let fam = family(alpha, domain);
        let factors = (0..d).map(|_| random_factor(&mut rng, domain)).collect();
        let f = Integrand::tensor(format!("random{case}"), factors, rng.gen_range(0.5..2.0), 8);
        for xi in 0..=5 {
            let v = build_grid(xi, d, &fam, DEFAULT_EVAL_CAP).unwrap().apply(&f).unwrap();
            let oracle = difference_oracle(&f, xi, &fam);
            worst = worst.max(((v - oracle) / oracle).abs());
            checks += 1;
        }
    }
    Outcome::new(
        worst <= 1e-12,
        format!("max rel deviation {worst:.2e} over {checks} (integrand, xi) pairs (tolerance 1e-12)"),
    )
}

/// `|G(ξ)|` by brute force over every `k ∈ {0..ξ}^d` and subset `e`.
fn brute_force_count(xi: usize, d: usize) -> u128 {
    let mut total = 0u128;
    let mut k = vec![0usize; d];
    loop {
        if k.iter().sum::<usize>() <= xi {
            for e in 0..(1u32 << d) {
                total += k_of_e(&k, e).iter().map(|&l| 1u128 << l).product::<u128>();
            }
        }
        let mut i = 0;
        while i < d && k[i] == xi {
            k[i] = 0;
            i += 1;
        }
        if i == d {
            return total;
        }
        k[i] += 1;
    }
}

fn node_count_law() -> Outcome {
    let mut mismatches = Vec::new();
    for d in 1..=4 {
        for xi in 0..=8 {
            if brute_force_count(xi, d) != idealized_count(xi, d) {
                mismatches.push(format!("d={d} xi={xi}"));
            }
        }
    }
    let c49 = idealized_count(2, 2);
    let fam = family(0.0, Domain::HalfLine);
    let mut ratios = Vec::new();
    let mut ratio_ok = true;
    for d in [2usize, 3] {
        let counts: Vec<u128> = (6..=13).map(|xi| count_points(xi, d, &fam).unwrap()).collect();
        let rs: Vec<f64> = counts.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
        let lo = rs.iter().copied().fold(f64::MAX, f64::min);
        let hi = rs.iter().copied().fold(0.0, f64::max);
        ratio_ok &= lo >= 1.7 && hi <= 2.7;
        ratios.push(format!("d={d}: [{lo:.3}, {hi:.3}]"));
    }
    let pass = mismatches.is_empty() && c49 == 49 && ratio_ok;
    Outcome::new(
        pass,
        format!(
            "enumeration mismatches: {}; |G(2)| for d=2 = {c49}; growth ratios xi=6..12 {} (range [1.7, 2.7])",
            if mismatches.is_empty() { "none".to_owned() } else { mismatches.join(", ") },
            ratios.join(", ")
        ),
    )
}

fn weight_args(alpha: f64, domain: DomainArg) -> WeightArgs {
    WeightArgs { alpha, a: 1.0, b: 0.0, theta: hcquad::DEFAULT_THETA, domain }
}

fn sparse_convergence() -> Outcome {
    let start = Instant::now();
    let w = weight_args(0.0, DomainArg::Half);
    let table =
        sweep(&SweepConfig { integrand: "shifted1", d: 2, from: 2, to: 13, r: Some(1), fit_skip: 2, weight: &w })
            .expect("sweep runs");
    let elapsed = start.elapsed();
    let largest = match table.rows.last().map(|r| &r[1]) {
        Some(Cell::Int(n)) => *n,
        _ => 0,
    };
    let fit = table.fits.iter().find(|(label, _)| label == "log_corrected").map(|(_, f)| f.slope);
    let slope = fit.unwrap_or(f64::NAN);
    let pass = slope <= -0.5 + 0.35 && largest >= 100_000 && within(elapsed, 300);
    Outcome::new(
        pass,
        format!(
            "slope after dividing out (log n)^1.5: {slope:.3} (<= -0.15), xi=2..13 up to n={largest}; {elapsed:.2?} (limit 300 s)"
        ),
    )
}

fn lower_bound_certificates() -> Outcome {
    let fam = family(0.0, Domain::HalfLine);
    let mut failures = Vec::new();
    let mut count = 0;
    let mut check = |label: String, cert: &hcquad::FoolingCertificate, nodes: &[Vec<f64>]| {
        count += 1;
        let vanishes = nodes.iter().all(|x| cert.function.evaluate(x) == 0.0);
        if !(vanishes && cert.vanish_checked && cert.norm_bound <= 1.0 && cert.integral > 0.0) {
            failures.push(label);
        }
    };

    let w1 = WeightParams::canonical(0.0, 1, Domain::HalfLine, 1).unwrap();
    let mut samples = Vec::new();
    for k in 4..=10 {
        let rule = fam.level_rule(k).unwrap();
        let cert = make_fooling_1d(rule.nodes(), 1, &w1).unwrap();
        let nodes: Vec<Vec<f64>> = rule.nodes().iter().map(|&x| vec![x]).collect();
        check(format!("1-D level {k}"), &cert, &nodes);
        samples.push((rule.len() as f64, cert.integral));
    }
    for r in [2u32, 3] {
        let w = WeightParams::canonical(0.5, r, Domain::HalfLine, 1).unwrap();
        let rule = truncated_rule(200, 0.5, 0.25).unwrap();
        let cert = make_fooling_1d(rule.nodes(), r, &w).unwrap();
        let nodes: Vec<Vec<f64>> = rule.nodes().iter().map(|&x| vec![x]).collect();
        check(format!("1-D r={r}"), &cert, &nodes);
    }
    for (d, xis) in [(2usize, 1..=7), (3, 1..=5)] {
        let w = WeightParams::canonical(0.0, 1, Domain::HalfLine, d).unwrap();
        for xi in xis {
            let grid = build_grid(xi, d, &fam, DEFAULT_EVAL_CAP).unwrap();
            let nodes: Vec<Vec<f64>> = grid.nodes().map(<[f64]>::to_vec).collect();
            let cert = make_fooling_dd(&nodes, 1, &w).unwrap();
            check(format!("d={d} xi={xi}"), &cert, &nodes);
        }
    }
    let slope = RateFit::fit(&samples).unwrap().slope;
    let pass = failures.is_empty() && slope >= -0.75 - 0.25;
    Outcome::new(
        pass,
        format!(
            "{count} certificates, failing: {}; 1-D sweep n=2^4..2^10 slope {slope:.3} (>= -1.0)",
            if failures.is_empty() { "none".to_owned() } else { failures.join(", ") }
        ),
    )
}

fn symmetrization_identity() -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0;
    for name in REGISTRY_NAMES {
        let f = lookup(name, 1).unwrap();
        for m in [8usize, 16, 32] {
            let sym = symmetrized_rule(m, 0.0, 0.25).unwrap();
            let half = truncated_rule(m, 0.0, 0.25).unwrap();
            let g = |x: f64| f.evaluate(&[x]);
            let lhs = sym.apply(g);
            let rhs = half.apply(g) + half.apply(|x| g(-x));
            checks += 1;
            if lhs.to_bits() != rhs.to_bits() || (f.is_odd() && lhs != 0.0) {
                failures.push(format!("{name} m={m}"));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{checks} (integrand, m) pairs bit-identical, odd integrands exactly 0; failing: {}",
            if failures.is_empty() { "none".to_owned() } else { failures.join(", ") }
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "4", "3", "1"].into_iter().enumerate() {
        for format in ["csv", "json"] {
            let path = dir.path().join(format!("sweep-{i}.{format}"));
            let args = [
                "hcquad",
                "sweep",
                "--integrand",
                "shifted1",
                "--d",
                "3",
                "--from",
                "0",
                "--to",
                "8",
                "--r",
                "1",
                "--threads",
                threads,
                "--format",
                format,
                "--output",
                path.to_str().unwrap(),
            ];
            hcquad_cli::run(&Cli::parse_from(args)).unwrap();
            outputs.push((format, std::fs::read(&path).unwrap()));
        }
    }
    let identical = ["csv", "json"].iter().all(|fmt| {
        let files: Vec<&Vec<u8>> = outputs.iter().filter(|(f, _)| f == fmt).map(|(_, b)| b).collect();
        files.windows(2).all(|w| w[0] == w[1]) && !files[0].is_empty()
    });
    Outcome::new(identical, "sweep output files (CSV and JSON) with 1, 4, 3, 1 threads are byte-identical".to_owned())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Gauss exactness", gauss_exactness),
        ("closed-form nodes", closed_form_nodes),
        ("zero-location laws", zero_location_laws),
        ("truncated-rule convergence", truncated_convergence),
        ("Smolyak expansion oracle", smolyak_oracle),
        ("node-count law", node_count_law),
        ("sparse-grid convergence", sparse_convergence),
        ("lower-bound certificates", lower_bound_certificates),
        ("symmetrization identity", symmetrization_identity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Outcome::new(false, "panicked (see message above)"));
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {:>2} {name}: {}", i + 1, outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
