//! Monte Carlo breeding over sampled homodyne outcomes.
//!
//! Sample `i` draws from `ChaCha20Rng::seed_from_u64(master_seed)` on stream
//! `i`, so every sample is reproducible on its own and the summary does not
//! depend on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::breeding::{breed, breed_with_rng, BreedingConfig, OutcomePolicy};
use crate::error::{Error, Result};
use crate::metrics::{success_indicator, MetricBundle, FAULT_TOLERANCE_THRESHOLD_DB};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarnessOptions {
    pub n_samples: usize,
    pub master_seed: u64,
    pub threshold_db: f64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl HarnessOptions {
    pub fn new(n_samples: usize, master_seed: u64) -> Self {
        Self { n_samples, master_seed, threshold_db: FAULT_TOLERANCE_THRESHOLD_DB, workers: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub index: usize,
    pub outcomes: Vec<f64>,
    pub log_likelihood: f64,
    pub metrics: MetricBundle,
    pub success: bool,
    pub fault_tolerant: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Population statistics, accumulated in slice order.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let (min, max) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Ok(Self { mean, std: var.sqrt(), min, max })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloSummary {
    pub n_samples: usize,
    pub seed: u64,
    pub threshold_db: f64,
    /// Metrics of the same configuration post-selected on all-zero outcomes.
    pub reference: MetricBundle,
    pub db_x: Stats,
    pub db_p: Stats,
    pub db_sym: Stats,
    pub success_prob: f64,
    pub ft_prob: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloRun {
    pub summary: MonteCarloSummary,
    pub samples: Vec<SampleRecord>,
}

/// The random stream of sample `index`.
pub fn sample_rng(master_seed: u64, index: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index as u64);
    rng
}

/// Breeds `opts.n_samples` times with sampled outcomes and summarizes the
/// effective squeezing against the `p = 0` reference.
pub fn monte_carlo_breed(config: &BreedingConfig, opts: &HarnessOptions) -> Result<MonteCarloRun> {
    if opts.n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
    }
    if opts.workers == Some(0) {
        return Err(Error::InvalidConfig("workers must be at least 1".into()));
    }
    if !opts.threshold_db.is_finite() {
        return Err(Error::InvalidConfig("threshold must be finite".into()));
    }
    config.validate()?;

    let mut reference_cfg = config.clone();
    reference_cfg.outcome_policy = OutcomePolicy::Fixed(vec![0.0; config.n_cats - 1]);
    let reference = breed(&reference_cfg)?.metrics;

    let mut sampled_cfg = config.clone();
    sampled_cfg.outcome_policy = OutcomePolicy::Sampled { seed: opts.master_seed };

    let run_one = |index: usize| -> Result<SampleRecord> {
        let res = breed_with_rng(&sampled_cfg, &mut sample_rng(opts.master_seed, index))?;
        let metrics = res.metrics;
        Ok(SampleRecord {
            index,
            log_likelihood: res.log_likelihood(),
            outcomes: res.outcomes,
            metrics,
            success: success_indicator(&metrics, &reference),
            fault_tolerant: metrics.is_fault_tolerant(opts.threshold_db),
        })
    };
    let run_all = || (0..opts.n_samples).into_par_iter().map(run_one).collect::<Result<Vec<_>>>();
    let samples = match opts.workers {
        None => run_all()?,
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?
            .install(run_all)?,
    };

    let col = |f: fn(&MetricBundle) -> f64| samples.iter().map(|s| f(&s.metrics)).collect::<Vec<_>>();
    let n = samples.len() as f64;
    let summary = MonteCarloSummary {
        n_samples: samples.len(),
        seed: opts.master_seed,
        threshold_db: opts.threshold_db,
        reference,
        db_x: Stats::from_values(&col(|m| m.db_x))?,
        db_p: Stats::from_values(&col(|m| m.db_p))?,
        db_sym: Stats::from_values(&col(|m| m.db_sym))?,
        success_prob: samples.iter().filter(|s| s.success).count() as f64 / n,
        ft_prob: samples.iter().filter(|s| s.fault_tolerant).count() as f64 / n,
    };
    Ok(MonteCarloRun { summary, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Lattice;

    fn small() -> BreedingConfig {
        BreedingConfig::new(3, Lattice::Qunaught, 10.0, 0.98)
    }

    #[test]
    fn stats_of_known_values() {
        let s = Stats::from_values(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std - 1.25f64.sqrt()).abs() < 1e-15);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert!(Stats::from_values(&[]).is_err());
    }

    #[test]
    fn single_sample_is_deterministic() {
        let opts = HarnessOptions::new(1, 42);
        let a = monte_carlo_breed(&small(), &opts).unwrap();
        let b = monte_carlo_breed(&small(), &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples.len(), 1);
        assert_eq!(a.samples[0].outcomes.len(), 2);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut opts = HarnessOptions::new(24, 7);
        opts.workers = Some(1);
        let one = monte_carlo_breed(&small(), &opts).unwrap();
        opts.workers = Some(4);
        let four = monte_carlo_breed(&small(), &opts).unwrap();
        assert_eq!(one, four);
        assert!((0.0..=1.0).contains(&one.summary.success_prob));
        assert!((0.0..=1.0).contains(&one.summary.ft_prob));
    }

    #[test]
    fn streams_are_distinct() {
        let opts = HarnessOptions::new(4, 3);
        let run = monte_carlo_breed(&small(), &opts).unwrap();
        assert_ne!(run.samples[0].outcomes, run.samples[1].outcomes);
    }

    #[test]
    fn rejects_bad_options() {
        assert!(monte_carlo_breed(&small(), &HarnessOptions::new(0, 1)).is_err());
        let mut opts = HarnessOptions::new(1, 1);
        opts.workers = Some(0);
        assert!(monte_carlo_breed(&small(), &opts).is_err());
    }
}
