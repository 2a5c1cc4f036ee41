//! Run configuration: a flat TOML file, overridden field by field from flags.

use std::path::Path;

use catbreed::breeding::DEFAULT_REDUCE_TOL;
use catbreed::fock::DEFAULT_CUTOFF;
use catbreed::{BreedingConfig, Lattice, OutcomePolicy, DEFAULT_HBAR, FAULT_TOLERANCE_THRESHOLD_DB};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Deterministic runs on the configured outcomes.
    Fixed,
    /// Monte Carlo over sampled outcomes at every point.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WignerTarget {
    /// The first seed cat.
    Input,
    /// The bred and aligned output.
    Final,
}

/// Every setting that influences results. Fields left unset fall back to
/// defaults derived from the others when the config is resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_cats: usize,
    pub lattice: String,
    pub squeezing_db: f64,
    pub eta: f64,
    pub parities: Option<Vec<u8>>,
    pub outcomes: Option<Vec<f64>>,
    /// Draw breed outcomes from the homodyne distribution instead.
    pub sampled: bool,
    pub prescale: bool,
    pub alpha: Option<f64>,
    pub hbar: f64,
    pub reduce_tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub threshold_db: f64,
    pub sweep_mode: SweepMode,
    pub sweep_n: Option<Vec<usize>>,
    pub sweep_eta: Option<Vec<f64>>,
    pub sweep_db: Option<Vec<f64>>,
    pub p1_range: [f64; 2],
    pub p2_range: [f64; 2],
    pub map_resolution: usize,
    pub wigner_target: WignerTarget,
    pub wigner_window: [f64; 2],
    pub wigner_resolution: usize,
    pub oracle_cutoff: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_cats: 3,
            lattice: Lattice::Qunaught.name().into(),
            squeezing_db: 12.0,
            eta: 1.0,
            parities: None,
            outcomes: None,
            sampled: false,
            prescale: false,
            alpha: None,
            hbar: DEFAULT_HBAR,
            reduce_tol: DEFAULT_REDUCE_TOL,
            seed: 0,
            samples: 1000,
            threshold_db: FAULT_TOLERANCE_THRESHOLD_DB,
            sweep_mode: SweepMode::Fixed,
            sweep_n: None,
            sweep_eta: None,
            sweep_db: None,
            p1_range: [-1.5, 1.5],
            p2_range: [-1.5, 1.5],
            map_resolution: 61,
            wigner_target: WignerTarget::Final,
            wigner_window: [-8.0, 8.0],
            wigner_resolution: 101,
            oracle_cutoff: DEFAULT_CUTOFF,
        }
    }
}

/// Flags that override individual config fields.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Number of cats bred together.
    #[arg(long)]
    pub n_cats: Option<usize>,
    /// logical-square, qunaught, hex-logical or hex-qunaught.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Cat squeezing in dB; the sign is ignored.
    #[arg(long, allow_hyphen_values = true)]
    pub squeezing_db: Option<f64>,
    /// Transmissivity of the loss applied to each cat.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Comma-separated cat parities (0 even, 1 odd).
    #[arg(long, value_delimiter = ',')]
    pub parities: Option<Vec<u8>>,
    /// Comma-separated homodyne outcomes, one per step.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub outcomes: Option<Vec<f64>>,
    /// Sample breed outcomes instead of fixing them.
    #[arg(long)]
    pub sampled: bool,
    /// Scale the cat amplitude by 1/sqrt(eta).
    #[arg(long)]
    pub prescale: bool,
    /// Cat amplitude, overriding the lattice target.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub reduce_tol: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Fault-tolerance threshold on the symmetric squeezing, in dB.
    #[arg(long, allow_hyphen_values = true)]
    pub threshold_db: Option<f64>,
    #[arg(long, value_enum)]
    pub sweep_mode: Option<SweepMode>,
    /// Comma-separated cat counts to sweep.
    #[arg(long, value_delimiter = ',')]
    pub sweep_n: Option<Vec<usize>>,
    /// Comma-separated transmissivities to sweep.
    #[arg(long, value_delimiter = ',')]
    pub sweep_eta: Option<Vec<f64>>,
    /// Comma-separated squeezing values (dB) to sweep.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sweep_db: Option<Vec<f64>>,
    /// p1 range of the outcome map, as MIN,MAX.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p1_range: Option<Vec<f64>>,
    /// p2 range of the outcome map, as MIN,MAX.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub p2_range: Option<Vec<f64>>,
    /// Points per axis of the outcome map.
    #[arg(long)]
    pub map_resolution: Option<usize>,
    #[arg(long, value_enum)]
    pub wigner_target: Option<WignerTarget>,
    /// Phase-space window of the Wigner grid, as MIN,MAX on both axes.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub wigner_window: Option<Vec<f64>>,
    /// Points per axis of the Wigner grid.
    #[arg(long)]
    pub wigner_resolution: Option<usize>,
    /// Number-basis cutoff of the oracle check.
    #[arg(long)]
    pub oracle_cutoff: Option<usize>,
}

fn pair(v: &[f64]) -> CliResult<[f64; 2]> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(CliError::Validation(format!("expected MIN,MAX, got {} values", v.len()))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("bad config {}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides, seed: Option<u64>) -> CliResult<()> {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = o.$field.clone() { self.$field = v.into(); })*
            };
        }
        set!(n_cats, lattice, squeezing_db, eta, hbar, reduce_tol, samples, threshold_db, sweep_mode, map_resolution);
        set!(wigner_target, wigner_resolution, oracle_cutoff);
        if let Some(v) = &o.parities {
            self.parities = Some(v.clone());
        }
        if let Some(v) = &o.outcomes {
            self.outcomes = Some(v.clone());
        }
        if let Some(v) = o.alpha {
            self.alpha = Some(v);
        }
        if let Some(v) = &o.sweep_n {
            self.sweep_n = Some(v.clone());
        }
        if let Some(v) = &o.sweep_eta {
            self.sweep_eta = Some(v.clone());
        }
        if let Some(v) = &o.sweep_db {
            self.sweep_db = Some(v.clone());
        }
        if let Some(v) = &o.p1_range {
            self.p1_range = pair(v)?;
        }
        if let Some(v) = &o.p2_range {
            self.p2_range = pair(v)?;
        }
        if let Some(v) = &o.wigner_window {
            self.wigner_window = pair(v)?;
        }
        self.sampled |= o.sampled;
        self.prescale |= o.prescale;
        if let Some(s) = seed {
            self.seed = s;
        }
        Ok(())
    }

    /// Fills derived defaults and checks the fields that the core library
    /// does not validate itself.
    pub fn resolve(mut self) -> CliResult<Self> {
        let lattice: Lattice = self.lattice.parse()?;
        self.lattice = lattice.name().into();
        self.sweep_n.get_or_insert_with(|| vec![self.n_cats]);
        self.sweep_eta.get_or_insert_with(|| vec![self.eta]);
        self.sweep_db.get_or_insert_with(|| vec![self.squeezing_db]);
        let bad = |msg: &str| Err(CliError::Validation(msg.into()));
        if self.sweep_n.as_ref().is_some_and(Vec::is_empty)
            || self.sweep_eta.as_ref().is_some_and(Vec::is_empty)
            || self.sweep_db.as_ref().is_some_and(Vec::is_empty)
        {
            return bad("sweep axes must not be empty");
        }
        if self.map_resolution < 2 || self.wigner_resolution < 2 {
            return bad("grid resolutions must be at least 2");
        }
        for [lo, hi] in [self.p1_range, self.p2_range, self.wigner_window] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad("ranges must be finite with MIN < MAX");
            }
        }
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        if self.oracle_cutoff < 2 {
            return bad("oracle cutoff must be at least 2");
        }
        if !self.threshold_db.is_finite() {
            return bad("threshold_db must be finite");
        }
        Ok(self)
    }

    pub fn lattice(&self) -> CliResult<Lattice> {
        Ok(self.lattice.parse()?)
    }

    /// Core configuration for `n` cats at the given loss and squeezing.
    pub fn breeding_at(&self, n: usize, eta: f64, db: f64) -> CliResult<BreedingConfig> {
        let mut cfg = BreedingConfig::new(n, self.lattice()?, db, eta);
        if let Some(p) = &self.parities {
            cfg.parities = p.clone();
        }
        if let Some(o) = &self.outcomes {
            cfg.outcome_policy = OutcomePolicy::Fixed(o.clone());
        }
        if self.sampled {
            cfg.outcome_policy = OutcomePolicy::Sampled { seed: self.seed };
        }
        cfg.prescale = self.prescale;
        cfg.alpha = self.alpha;
        cfg.hbar = self.hbar;
        cfg.reduce_tol = self.reduce_tol;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn breeding(&self) -> CliResult<BreedingConfig> {
        self.breeding_at(self.n_cats, self.eta, self.squeezing_db)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
