//! Breeding squeezed cat states into GKP grid states, simulated with linear
//! combinations of Gaussians.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod breeding;
pub mod error;
pub mod fock;
pub mod harness;
pub mod homodyne;
pub mod lcg;
pub mod metrics;

pub use breeding::{
    align_to_lattice, amplitude_for_target, breed, breed_cats, breed_step, breed_with_rng, cascade_matrix, r_from_db,
    reduce_equal_means, squeezed_cat, BreedResult, BreedingConfig, CatSpec, OutcomePolicy, StepOutcome, StepResult,
};
pub use error::{Error, Result};
pub use fock::{compare_with_oracle, FockDensity, OracleComparison};
pub use harness::{monte_carlo_breed, HarnessOptions, MonteCarloRun, MonteCarloSummary, SampleRecord, Stats};
pub use homodyne::{condition_on_outcome, homodyne_log_pdf, homodyne_pdf, sample_homodyne, OutcomeRecord};
pub use lcg::{Gate, GaussianMixtureState, GaussianTerm, SymplecticTransform, DEFAULT_HBAR};
pub use metrics::{
    effective_squeezing, from_db, metric_bundle, stabilizer_displacements, success_indicator, to_db, Lattice,
    LatticeSpec, MetricBundle, FAULT_TOLERANCE_THRESHOLD_DB,
};
