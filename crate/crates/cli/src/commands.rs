use std::time::Instant;

use hcquad::testbed::{make_fooling_1d, make_fooling_dd, FoolingCertificate, REGISTRY_NAMES};
use hcquad::{
    build_grid, eval_cap_from_env, gauss_rule, lookup, select_xi, symmetrized_rule, truncated_rule, truncation_index,
    Domain, Integrand, LevelFamily, RateFit, SparseGrid, TruncationPolicy, WeightParams,
};

use crate::args::{KindArg, WeightArgs};
use crate::error::CliError;
use crate::table::{Cell, Table};

type Result<T> = std::result::Result<T, CliError>;

fn weight_params(w: &WeightArgs, r: u32, d: usize) -> Result<WeightParams> {
    Ok(WeightParams::new(w.alpha, w.a, w.b, r, w.domain.into(), d)?)
}

fn family(w: &WeightArgs) -> Result<LevelFamily> {
    Ok(LevelFamily::new(TruncationPolicy::new(w.theta)?, w.alpha, w.domain.into())?)
}

fn integrand(name: &str, d: usize) -> Result<Integrand> {
    lookup(name, d).ok_or_else(|| {
        CliError::Invalid(format!("unknown integrand {name:?} for d = {d}; available: {}", REGISTRY_NAMES.join(", ")))
    })
}

fn weight_meta(t: &mut Table, w: &WeightArgs) {
    t.meta("alpha", w.alpha).meta("a", w.a).meta("b", w.b).meta("theta", w.theta);
}

pub fn nodes(m: usize, kind: KindArg, w: &WeightArgs) -> Result<Table> {
    let domain = if kind == KindArg::Symmetrized { Domain::FullLine } else { Domain::HalfLine };
    let params = WeightParams::new(w.alpha, w.a, w.b, 0, domain, 1)?;
    let rule = match kind {
        KindArg::Full => gauss_rule(m, w.alpha)?,
        KindArg::Truncated => truncated_rule(m, w.alpha, w.theta)?,
        KindArg::Symmetrized => symmetrized_rule(m, w.alpha, w.theta)?,
    };
    let j = truncation_index(m, w.alpha, w.theta)?;
    let map = params.canonical_map(false);

    let mut t = Table::new("nodes", &["index", "node", "weight"]);
    t.meta("m", m).meta("j", j).meta("kind", rule.kind().name());
    weight_meta(&mut t, w);
    for (i, (&x, &lambda)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        t.push(vec![(i + 1).into(), map.from_canonical(x).into(), (lambda * map.integral_factor).into()]);
    }
    t.summarize("weight_sum", rule.weight_sum() * map.integral_factor);
    Ok(t)
}

fn grid_for(xi: usize, d: usize, fam: &LevelFamily) -> Result<SparseGrid> {
    Ok(build_grid(xi, d, fam, eval_cap_from_env()?)?)
}

pub fn grid(xi: usize, d: usize, w: &WeightArgs) -> Result<Table> {
    let params = weight_params(w, 0, d)?;
    let map = params.canonical_map(false);
    let fam = family(w)?;
    let grid = grid_for(xi, d, &fam)?;
    let factor = map.integral_factor.powi(d as i32);

    let mut columns = vec!["index".to_owned()];
    columns.extend((1..=d).map(|i| format!("x{i}")));
    columns.extend(["coefficient".to_owned(), "multiplicity".to_owned()]);
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut t = Table::new("grid", &refs);
    t.meta("xi", xi).meta("d", d).meta("domain", params.domain().name());
    weight_meta(&mut t, w);
    for i in 0..grid.len() {
        let mut row: Vec<Cell> = vec![(i + 1).into()];
        row.extend(grid.node(i).iter().map(|&x| Cell::from(map.from_canonical(x))));
        row.push((grid.coefficient(i) * factor).into());
        row.push(grid.multiplicity(i).into());
        t.push(row);
    }
    let s = grid.summary();
    t.summarize("idealized_count", s.idealized_count)
        .summarize("term_count", s.term_count)
        .summarize("zero_weight_entries", s.zero_weight_entries)
        .summarize("merged_count", s.merged_count)
        .summarize("cancelled", s.cancelled)
        .summarize("level_orders", join(&s.level_orders))
        .summarize("level_sizes", join(&s.level_sizes));
    if params.domain() == Domain::FullLine {
        t.summarize("sign_symmetric", grid.is_sign_symmetric());
    }
    Ok(t)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// One grid application in the coordinates of the general weight.
struct Evaluation {
    value: f64,
    exact: Option<f64>,
    n_evals: usize,
    terms: u128,
}

fn evaluate(f: &Integrand, grid: &SparseGrid, params: &WeightParams) -> Result<Evaluation> {
    let map = params.canonical_map(false);
    let d = grid.d();
    let canonical = if map.scale == 1.0 {
        grid.apply(f)?
    } else {
        grid.apply_with(|t| {
            let x: Vec<f64> = t.iter().map(|&v| map.from_canonical(v)).collect();
            f.evaluate(&x)
        })?
    };
    // closed forms are known for the canonical scale only
    let exact = if map.scale == 1.0 {
        f.exact_integral(params.alpha(), params.domain()).map(|e| map.map_integral(e, d))
    } else {
        None
    };
    Ok(Evaluation { value: map.map_integral(canonical, d), exact, n_evals: grid.len(), terms: grid.eval_count() })
}

pub fn integrate(name: &str, xi: Option<usize>, budget: Option<u128>, d: usize, w: &WeightArgs) -> Result<Table> {
    let params = weight_params(w, 0, d)?;
    let f = integrand(name, d)?;
    let fam = family(w)?;
    let start = Instant::now();
    let xi = match (xi, budget) {
        (Some(xi), _) => xi,
        (None, Some(n)) => select_xi(n, d, &fam)?,
        (None, None) => return Err(CliError::Invalid("one of --xi or --budget is required".into())),
    };
    let grid = grid_for(xi, d, &fam)?;
    let e = evaluate(&f, &grid, &params)?;
    let wall = start.elapsed().as_secs_f64();

    let abs_error = e.exact.map(|x| (e.value - x).abs());
    let rel_error = e.exact.zip(abs_error).map(|(x, err)| if x == 0.0 { err } else { err / x.abs() });
    let mut t = Table::new(
        "integrate",
        &["integrand", "d", "xi", "n_evals", "terms", "value", "exact", "abs_error", "rel_error", "wall_time"],
    );
    t.meta("domain", params.domain().name());
    weight_meta(&mut t, w);
    t.push(vec![
        name.into(),
        d.into(),
        xi.into(),
        e.n_evals.into(),
        e.terms.into(),
        e.value.into(),
        e.exact.into(),
        abs_error.into(),
        rel_error.into(),
        wall.into(),
    ]);
    Ok(t)
}

pub struct SweepConfig<'a> {
    pub integrand: &'a str,
    pub d: usize,
    pub from: usize,
    pub to: usize,
    pub r: Option<u32>,
    pub fit_skip: usize,
    pub weight: &'a WeightArgs,
}

/// Errors are printed without wall-clock times so that the output depends
/// only on the inputs.
pub fn sweep(cfg: &SweepConfig) -> Result<Table> {
    if cfg.from > cfg.to {
        return Err(CliError::Invalid(format!("empty level range {}..={}", cfg.from, cfg.to)));
    }
    let params = weight_params(cfg.weight, cfg.r.unwrap_or(0), cfg.d)?;
    let f = integrand(cfg.integrand, cfg.d)?;
    let fam = family(cfg.weight)?;

    let mut t = Table::new("sweep", &["xi", "n_evals", "terms", "value", "error"]);
    t.meta("integrand", cfg.integrand).meta("d", cfg.d).meta("domain", params.domain().name());
    weight_meta(&mut t, cfg.weight);
    t.meta("fit_skip", cfg.fit_skip);

    let mut samples = Vec::new();
    let mut exact_seen = None;
    for xi in cfg.from..=cfg.to {
        let grid = grid_for(xi, cfg.d, &fam)?;
        let e = evaluate(&f, &grid, &params)?;
        let exact = e.exact.ok_or_else(|| {
            CliError::Invalid(format!("no closed-form integral for {} with these weight parameters", cfg.integrand))
        })?;
        exact_seen = Some(exact);
        let error = (e.value - exact).abs();
        t.push(vec![xi.into(), e.n_evals.into(), e.terms.into(), e.value.into(), error.into()]);
        if xi >= cfg.from + cfg.fit_skip {
            samples.push((e.n_evals as f64, error));
        }
    }
    t.meta("exact", exact_seen);

    if let Some(fit) = RateFit::fit(&samples) {
        t.fits.push(("raw".into(), fit));
    }
    if let Some(r) = cfg.r {
        let p = (f64::from(r) / 2.0 + 1.0) * (cfg.d as f64 - 1.0);
        if p > 0.0 {
            if let Some(fit) = RateFit::fit_corrected(&samples, Some(p)) {
                t.fits.push(("log_corrected".into(), fit));
            }
        }
    }
    Ok(t)
}

pub struct FoolConfig<'a> {
    pub n: Option<usize>,
    pub xi: Option<usize>,
    pub levels: Option<(usize, usize)>,
    pub r: u32,
    pub d: usize,
    pub weight: &'a WeightArgs,
}

fn adversary_nodes(fam: &LevelFamily, d: usize, n: Option<usize>, xi: Option<usize>) -> Result<Vec<Vec<f64>>> {
    match (n, xi) {
        (Some(n), _) if d == 1 => {
            if n == 0 {
                return Err(CliError::Invalid("--n must be at least 1".into()));
            }
            let m = fam.max_order_within(n)?;
            let rule = truncated_rule(m, fam.alpha(), fam.policy().theta())?;
            Ok(rule.nodes().iter().map(|&x| vec![x]).collect())
        }
        (Some(_), _) => Err(CliError::Invalid("--n selects a univariate rule; use --xi for d > 1".into())),
        (None, Some(xi)) => {
            let grid = grid_for(xi, d, fam)?;
            Ok(grid.nodes().map(<[f64]>::to_vec).collect())
        }
        (None, None) => Err(CliError::Invalid("one of --n, --xi or --from/--to is required".into())),
    }
}

fn certificate(nodes: &[Vec<f64>], r: u32, params: &WeightParams) -> Result<FoolingCertificate> {
    let cert = if params.d() == 1 {
        let flat: Vec<f64> = nodes.iter().map(|x| x[0]).collect();
        make_fooling_1d(&flat, r, params)?
    } else {
        make_fooling_dd(nodes, r, params)?
    };
    Ok(cert)
}

pub fn fool(cfg: &FoolConfig) -> Result<Table> {
    let params = weight_params(cfg.weight, cfg.r, cfg.d)?;
    if params.domain() != Domain::HalfLine || !params.is_canonical() {
        return Err(CliError::Invalid("fooling functions need the half-line weight with a = 1, b = 0".into()));
    }
    let fam = family(cfg.weight)?;

    let mut t = Table::new("fool", &["level", "n", "delta", "cell", "m_param", "norm_bound", "integral", "nodes_hash"]);
    t.meta("d", cfg.d).meta("r", cfg.r);
    weight_meta(&mut t, cfg.weight);

    let jobs: Vec<(Option<usize>, Option<usize>, Option<usize>)> = match cfg.levels {
        Some((from, to)) => {
            if from > to {
                return Err(CliError::Invalid(format!("empty level range {from}..={to}")));
            }
            (from..=to)
                .map(|k| if cfg.d == 1 { (Some(k), Some(1usize << k), None) } else { (Some(k), None, Some(k)) })
                .collect()
        }
        None => vec![(None, cfg.n, cfg.xi)],
    };

    let mut samples = Vec::new();
    for (level, n, xi) in jobs {
        let nodes = adversary_nodes(&fam, cfg.d, n, xi)?;
        let cert = certificate(&nodes, cfg.r, &params)?;
        let s = &cert.summary;
        t.push(vec![
            level.into(),
            s.n.into(),
            s.delta.into(),
            join(&s.cell).into(),
            s.m_param.into(),
            s.norm_bound.into(),
            s.integral.into(),
            s.nodes_hash.clone().into(),
        ]);
        samples.push((s.n as f64, s.integral));
    }
    if cfg.levels.is_some() {
        if let Some(fit) = RateFit::fit(&samples) {
            t.fits.push(("lower_bound".into(), fit));
        }
    }
    Ok(t)
}
