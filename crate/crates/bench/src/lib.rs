//! Shared workloads for the benchmarks.

use catbreed::{BreedingConfig, Lattice};

/// Nine −12 dB cats post-selected on `p = 0`.
pub fn golden_config(eta: f64) -> BreedingConfig {
    BreedingConfig::new(9, Lattice::Qunaught, 12.0, eta)
}

/// The desk-scale Monte Carlo workload.
pub fn sampling_config() -> BreedingConfig {
    BreedingConfig::new(4, Lattice::Qunaught, 12.0, 1.0)
}
