//! p-quadrature homodyne detection on one mode of an LCoG state.
//!
//! With `a_j = α_j + iβ_j` the (complex) p-mean of term `j` on the measured
//! mode and `A_p` the measured variance, the outcome density is
//! `P(m) = Σ_j exp(w_j) G_{a_j, A_p}(m)`. Bounding each term by its modulus
//! gives the sampling envelope
//! `g(m) = Σ_j exp(Re w_j + β_j² / 2A_p) G_{α_j, A_p}(m) ≥ P(m)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::lcg::{log_sum_exp_iter, log_sum_exp_real, wrap_phase, GaussianMixtureState, GaussianTerm};

/// Consecutive rejections after which the sampler gives up.
pub const REJECTION_LIMIT: u64 = 1_000_000;

const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeRecord {
    pub value: f64,
    pub density: f64,
    /// Number of proposals drawn, including the accepted one.
    pub attempts: u64,
}

fn p_index(state: &GaussianMixtureState, mode: usize) -> Result<usize> {
    if mode >= state.n_modes() {
        return Err(Error::InvalidParameter(format!("mode {mode} out of range for {} modes", state.n_modes())));
    }
    Ok(2 * mode + 1)
}

fn measured_variance(state: &GaussianMixtureState, idx: usize) -> Result<f64> {
    let ap = state.cov()[(idx, idx)];
    if !(ap > 0.0) {
        return Err(Error::SingularMeasurement(ap));
    }
    Ok(ap)
}

/// Per-term log of `exp(w_j) G_{a_j, A_p}(m)`.
fn term_log_densities(state: &GaussianMixtureState, idx: usize, ap: f64, m: f64) -> Vec<Complex64> {
    let log_norm = -0.5 * (2.0 * std::f64::consts::PI * ap).ln();
    state
        .terms()
        .iter()
        .map(|t| {
            let d = t.mean[idx] - m;
            t.log_weight - d * d / (2.0 * ap) + log_norm
        })
        .collect()
}

/// Turns a complex log-sum into `ln P`, checking that `P` is real and
/// non-negative.
fn real_log_density(terms: &[Complex64]) -> Result<f64> {
    let z = log_sum_exp_iter(terms.iter().copied());
    if z.re == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let scale = log_sum_exp_real(&terms.iter().map(|t| t.re).collect::<Vec<_>>())?.exp();
    let (sin, cos) = wrap_phase(z.im).sin_cos();
    let mag = z.re.exp();
    if (mag * sin).abs() > IMAG_RESIDUE_TOL * scale.max(1.0) {
        return Err(Error::ImaginaryResidue(mag * sin));
    }
    if cos <= 0.0 {
        if mag * cos < -IMAG_RESIDUE_TOL * scale.max(1.0) {
            return Err(Error::NegativeDensity(mag * cos));
        }
        return Ok(f64::NEG_INFINITY);
    }
    Ok(z.re + cos.ln())
}

/// `ln P(m)` for a p-homodyne outcome `m` on `mode`.
pub fn homodyne_log_pdf(state: &GaussianMixtureState, mode: usize, m: f64) -> Result<f64> {
    let idx = p_index(state, mode)?;
    if !state.is_normalized() {
        return Err(Error::NotNormalized(state.trace()));
    }
    let ap = measured_variance(state, idx)?;
    real_log_density(&term_log_densities(state, idx, ap, m))
}

/// Probability density `P(m)` of a p-homodyne outcome on `mode`.
pub fn homodyne_pdf(state: &GaussianMixtureState, mode: usize, m: f64) -> Result<f64> {
    Ok(homodyne_log_pdf(state, mode, m)?.exp())
}

/// Log of the sampling envelope `g(m)`.
pub fn envelope_log_pdf(state: &GaussianMixtureState, mode: usize, m: f64) -> Result<f64> {
    let idx = p_index(state, mode)?;
    let ap = measured_variance(state, idx)?;
    let env = Envelope::new(state, idx, ap);
    Ok(env.log_value(m))
}

struct Envelope {
    centers: Vec<f64>,
    log_amps: Vec<f64>,
    ap: f64,
}

impl Envelope {
    fn new(state: &GaussianMixtureState, idx: usize, ap: f64) -> Self {
        let (centers, log_amps) = state
            .terms()
            .iter()
            .map(|t| {
                let a = t.mean[idx];
                (a.re, t.log_weight.re + a.im * a.im / (2.0 * ap))
            })
            .unzip();
        Self { centers, log_amps, ap }
    }

    fn log_value(&self, m: f64) -> f64 {
        let log_norm = -0.5 * (2.0 * std::f64::consts::PI * self.ap).ln();
        let shifted: Vec<f64> =
            self.centers.iter().zip(&self.log_amps).map(|(c, l)| l - (m - c).powi(2) / (2.0 * self.ap)).collect();
        log_sum_exp_real(&shifted).unwrap_or(f64::NEG_INFINITY) + log_norm
    }

    /// True when every peak sits at zero, so the envelope is a single normal.
    fn is_phase_less(&self) -> bool {
        let scale = 1.0 + self.ap.sqrt();
        self.centers.iter().all(|c| c.abs() <= 1e-12 * scale)
    }
}

/// Draws a p-homodyne outcome on `mode` by rejection sampling against the
/// envelope `g(m)`.
pub fn sample_homodyne<R: Rng + ?Sized>(
    state: &GaussianMixtureState,
    mode: usize,
    rng: &mut R,
) -> Result<OutcomeRecord> {
    let idx = p_index(state, mode)?;
    if !state.is_normalized() {
        return Err(Error::NotNormalized(state.trace()));
    }
    let ap = measured_variance(state, idx)?;
    let env = Envelope::new(state, idx, ap);
    let normal = Normal::new(0.0, ap.sqrt()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let phase_less = env.is_phase_less();
    let peaks = if phase_less {
        None
    } else {
        let log_m = log_sum_exp_real(&env.log_amps)?;
        let weights: Vec<f64> = env.log_amps.iter().map(|l| (l - log_m).exp()).collect();
        Some(WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    };

    for attempt in 1..=REJECTION_LIMIT {
        let m = match &peaks {
            None => normal.sample(rng),
            Some(wi) => env.centers[wi.sample(rng)] + normal.sample(rng),
        };
        let log_p = real_log_density(&term_log_densities(state, idx, ap, m))?;
        let log_g = env.log_value(m);
        // y ~ U[0, g(m)], accept iff P(m) >= y
        let u: f64 = rng.random();
        if u.ln() + log_g <= log_p {
            return Ok(OutcomeRecord { value: m, density: log_p.exp(), attempts: attempt });
        }
    }
    Err(Error::RejectionLimit(REJECTION_LIMIT))
}

/// Conditions the state on outcome `m` of a p-homodyne measurement of
/// `mode`. The measured mode is removed and the result is normalized.
/// Returns the conditional state and `ln P(m)`.
pub fn condition_on_outcome(state: &GaussianMixtureState, mode: usize, m: f64) -> Result<(GaussianMixtureState, f64)> {
    let idx = p_index(state, mode)?;
    if state.n_modes() < 2 {
        return Err(Error::InvalidParameter("conditioning needs at least two modes".into()));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite outcome {m}")));
    }
    let ap = measured_variance(state, idx)?;
    let cov = state.cov();
    let rest: Vec<usize> = (0..2 * state.n_modes()).filter(|&i| i / 2 != mode).collect();
    let k = rest.len();

    // p-row of the cross covariance between measured and remaining modes
    let s = DVector::from_iterator(k, rest.iter().map(|&j| cov[(idx, j)]));
    let mut new_cov = DMatrix::from_fn(k, k, |a, b| cov[(rest[a], rest[b])]);
    new_cov -= &s * s.transpose() / ap;

    let log_terms = term_log_densities(state, idx, ap, m);
    let log_p = real_log_density(&log_terms)?;
    if log_p == f64::NEG_INFINITY {
        return Err(Error::InvalidTrace(Complex64::new(0.0, 0.0)));
    }

    let terms = state
        .terms()
        .iter()
        .zip(&log_terms)
        .map(|(t, lw)| {
            let shift = (m - t.mean[idx]) / ap;
            let mean = DVector::from_iterator(k, rest.iter().zip(s.iter()).map(|(&j, sj)| t.mean[j] + shift * *sj));
            GaussianTerm::new(*lw - log_p, mean)
        })
        .collect();
    let out = GaussianMixtureState::new(state.n_modes() - 1, terms, new_cov, state.hbar())?;
    Ok((out, log_p))
}
