//! Subcommand implementations. Each returns the table to write.

use catbreed::fock::compare_with_oracle;
use catbreed::{
    breed, monte_carlo_breed, squeezed_cat, BreedingConfig, CatSpec, GaussianMixtureState, HarnessOptions,
    MetricBundle, MonteCarloRun, OutcomePolicy, Stats,
};
use rayon::prelude::*;

use crate::config::{RunConfig, SweepMode, WignerTarget};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};

pub const WIGNER_TOL: f64 = 1e-5;
pub const DENSITY_TOL: f64 = 1e-6;
pub const DELTA_TOL: f64 = 1e-4;

/// Runs `f` on a pool with `workers` threads, or on the global pool.
fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(CliError::Validation("workers must be at least 1".into())),
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot build worker pool: {e}")))?
            .install(f)),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn metric_cells(m: &MetricBundle) -> Vec<Cell> {
    vec![m.db_x.into(), m.db_p.into(), m.db_sym.into()]
}

pub fn breed_cmd(cfg: &RunConfig) -> CliResult<Table> {
    let bc = cfg.breeding()?;
    let res = breed(&bc)?;
    let m = res.metrics;
    let mut t = Table::new(&[
        "n_cats",
        "lattice",
        "squeezing_db",
        "eta",
        "db_x",
        "db_p",
        "db_sym",
        "delta_x",
        "delta_p",
        "delta_sym",
        "terms",
        "log_likelihood",
        "outcomes",
        "densities",
    ]);
    let mut row: Vec<Cell> = vec![bc.n_cats.into(), cfg.lattice.as_str().into(), bc.squeezing_db.into(), bc.eta.into()];
    row.extend(metric_cells(&m));
    row.extend([
        m.delta_x.into(),
        m.delta_p.into(),
        m.delta_sym.into(),
        res.final_state.len().into(),
        res.log_likelihood().into(),
        res.outcomes.clone().into(),
        res.densities.clone().into(),
    ]);
    t.push(row);
    Ok(t)
}

fn run_harness(bc: &BreedingConfig, cfg: &RunConfig, workers: Option<usize>) -> CliResult<MonteCarloRun> {
    let opts =
        HarnessOptions { n_samples: cfg.samples, master_seed: cfg.seed, threshold_db: cfg.threshold_db, workers };
    Ok(monte_carlo_breed(bc, &opts)?)
}

fn stats_cells(s: &Stats) -> [Cell; 4] {
    [s.mean.into(), s.std.into(), s.min.into(), s.max.into()]
}

/// Monte Carlo summary plus the per-sample table.
pub fn sample_cmd(cfg: &RunConfig, workers: Option<usize>) -> CliResult<(Table, Table)> {
    let run = run_harness(&cfg.breeding()?, cfg, workers)?;
    let s = &run.summary;
    let mut summary = Table::new(&[
        "n_samples",
        "seed",
        "threshold_db",
        "ref_db_x",
        "ref_db_p",
        "ref_db_sym",
        "db_x_mean",
        "db_x_std",
        "db_x_min",
        "db_x_max",
        "db_p_mean",
        "db_p_std",
        "db_p_min",
        "db_p_max",
        "db_sym_mean",
        "db_sym_std",
        "db_sym_min",
        "db_sym_max",
        "success_prob",
        "ft_prob",
    ]);
    let mut row: Vec<Cell> = vec![s.n_samples.into(), s.seed.into(), s.threshold_db.into()];
    row.extend(metric_cells(&s.reference));
    for st in [&s.db_x, &s.db_p, &s.db_sym] {
        row.extend(stats_cells(st));
    }
    row.extend([s.success_prob.into(), s.ft_prob.into()]);
    summary.push(row);

    let mut samples =
        Table::new(&["index", "outcomes", "log_likelihood", "db_x", "db_p", "db_sym", "success", "fault_tolerant"]);
    for r in &run.samples {
        let mut row: Vec<Cell> = vec![r.index.into(), r.outcomes.clone().into(), r.log_likelihood.into()];
        row.extend(metric_cells(&r.metrics));
        row.extend([r.success.into(), r.fault_tolerant.into()]);
        samples.push(row);
    }
    Ok((summary, samples))
}

pub fn sweep_cmd(cfg: &RunConfig, workers: Option<usize>) -> CliResult<Table> {
    let mut points = Vec::new();
    for &db in cfg.sweep_db.as_deref().unwrap_or_default() {
        for &eta in cfg.sweep_eta.as_deref().unwrap_or_default() {
            for &n in cfg.sweep_n.as_deref().unwrap_or_default() {
                points.push(cfg.breeding_at(n, eta, db)?);
            }
        }
    }
    match cfg.sweep_mode {
        SweepMode::Fixed => {
            let results = in_pool(workers, || points.par_iter().map(breed).collect::<Result<Vec<_>, _>>())??;
            let mut t =
                Table::new(&["n_cats", "eta", "squeezing_db", "db_x", "db_p", "db_sym", "terms", "log_likelihood"]);
            for (bc, res) in points.iter().zip(&results) {
                let mut row: Vec<Cell> = vec![bc.n_cats.into(), bc.eta.into(), bc.squeezing_db.into()];
                row.extend(metric_cells(&res.metrics));
                row.extend([res.final_state.len().into(), res.log_likelihood().into()]);
                t.push(row);
            }
            Ok(t)
        }
        SweepMode::Sampled => {
            let mut t = Table::new(&[
                "n_cats",
                "eta",
                "squeezing_db",
                "n_samples",
                "ref_db_sym",
                "db_sym_mean",
                "db_sym_std",
                "success_prob",
                "ft_prob",
            ]);
            for bc in &points {
                let s = run_harness(bc, cfg, workers)?.summary;
                t.push(vec![
                    bc.n_cats.into(),
                    bc.eta.into(),
                    bc.squeezing_db.into(),
                    s.n_samples.into(),
                    s.reference.db_sym.into(),
                    s.db_sym.mean.into(),
                    s.db_sym.std.into(),
                    s.success_prob.into(),
                    s.ft_prob.into(),
                ]);
            }
            Ok(t)
        }
    }
}

/// Effective squeezing and joint outcome density over a `(p₁, p₂)` grid.
pub fn map3_cmd(cfg: &RunConfig, workers: Option<usize>) -> CliResult<Table> {
    if cfg.n_cats != 3 {
        return Err(CliError::Validation(format!("map3 needs n_cats = 3, got {}", cfg.n_cats)));
    }
    let base = cfg.breeding()?;
    let p1s = linspace(cfg.p1_range[0], cfg.p1_range[1], cfg.map_resolution);
    let p2s = linspace(cfg.p2_range[0], cfg.p2_range[1], cfg.map_resolution);
    let grid: Vec<(f64, f64)> = p1s.iter().flat_map(|&a| p2s.iter().map(move |&b| (a, b))).collect();
    let results = in_pool(workers, || {
        grid.par_iter()
            .map(|&(p1, p2)| {
                let mut bc = base.clone();
                bc.outcome_policy = OutcomePolicy::Fixed(vec![p1, p2]);
                breed(&bc)
            })
            .collect::<Result<Vec<_>, _>>()
    })??;
    let mut t = Table::new(&["p1", "p2", "density", "db_x", "db_p", "db_sym"]);
    for (&(p1, p2), res) in grid.iter().zip(&results) {
        let mut row: Vec<Cell> = vec![p1.into(), p2.into(), res.log_likelihood().exp().into()];
        row.extend(metric_cells(&res.metrics));
        t.push(row);
    }
    Ok(t)
}

pub fn wigner_cmd(cfg: &RunConfig, workers: Option<usize>) -> CliResult<Table> {
    let bc = cfg.breeding()?;
    let state: GaussianMixtureState = match cfg.wigner_target {
        WignerTarget::Input => squeezed_cat(&bc.cat_spec(bc.parities[0])?, bc.hbar)?,
        WignerTarget::Final => breed(&bc)?.final_state,
    };
    let axis = linspace(cfg.wigner_window[0], cfg.wigner_window[1], cfg.wigner_resolution);
    let points: Vec<[f64; 2]> = axis.iter().flat_map(|&x| axis.iter().map(move |&p| [x, p])).collect();
    let values = in_pool(workers, || {
        points.par_chunks(axis.len()).map(|chunk| state.evaluate_wigner(chunk)).collect::<Result<Vec<_>, _>>()
    })??;
    let mut t = Table::new(&["x", "p", "w"]);
    for (pt, w) in points.iter().zip(values.into_iter().flatten()) {
        t.push(vec![pt[0].into(), pt[1].into(), w.into()]);
    }
    Ok(t)
}

struct OracleCase {
    parities: Vec<u8>,
    outcomes: Vec<f64>,
    alpha: f64,
    r: f64,
    eta: f64,
}

fn oracle_suite() -> Vec<OracleCase> {
    let runs: [(&[u8], &[f64]); 6] = [
        (&[0, 0], &[0.0]),
        (&[0, 1], &[0.5]),
        (&[1, 1], &[-0.5]),
        (&[0, 0, 0], &[0.0, 0.0]),
        (&[0, 1, 0], &[0.5, -0.5]),
        (&[1, 0, 1], &[-0.5, 0.0]),
    ];
    let mut cases = Vec::new();
    for (alpha, r) in [(1.2, 0.3), (2.0, 0.5)] {
        for eta in [1.0, 0.9] {
            for (parities, outcomes) in runs {
                cases.push(OracleCase { parities: parities.to_vec(), outcomes: outcomes.to_vec(), alpha, r, eta });
            }
        }
    }
    cases
}

/// Cross-checks breeding against the number-basis oracle. Returns the report
/// and the number of failed cases.
pub fn oracle_check_cmd(cfg: &RunConfig, workers: Option<usize>) -> CliResult<(Table, usize)> {
    let suite = oracle_suite();
    let results = in_pool(workers, || {
        suite
            .par_iter()
            .map(|c| {
                let cats: Vec<CatSpec> =
                    c.parities.iter().map(|&parity| CatSpec { alpha: c.alpha, r: c.r, parity, eta: c.eta }).collect();
                compare_with_oracle(&cats, &c.outcomes, cfg.oracle_cutoff, cfg.hbar)
            })
            .collect::<Vec<_>>()
    })?;
    let mut t = Table::new(&[
        "case",
        "n_cats",
        "alpha",
        "r",
        "eta",
        "parities",
        "outcomes",
        "wigner_err",
        "density_err",
        "delta_err",
        "pass",
        "message",
    ]);
    let mut failed = 0;
    for (i, (c, res)) in suite.iter().zip(results).enumerate() {
        let mut row: Vec<Cell> = vec![
            i.into(),
            c.parities.len().into(),
            c.alpha.into(),
            c.r.into(),
            c.eta.into(),
            c.parities.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";").into(),
            c.outcomes.clone().into(),
        ];
        let pass = match res {
            Ok(cmp) => {
                let pass = cmp.wigner <= WIGNER_TOL && cmp.density <= DENSITY_TOL && cmp.delta <= DELTA_TOL;
                row.extend([cmp.wigner.into(), cmp.density.into(), cmp.delta.into(), pass.into(), "".into()]);
                pass
            }
            Err(e) => {
                row.extend([f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), false.into(), e.to_string().into()]);
                false
            }
        };
        failed += usize::from(!pass);
        t.push(row);
    }
    Ok((t, failed))
}
