//! Squeezed cats, the beam-splitter cascade and the breeding protocol.
//!
//! Step `i` (1-based) interferes the current state (mode 0) with a fresh cat
//! (mode 1) on a splitter of reflectivity `1/(i+1)`, measures `p` on mode 0
//! and keeps mode 1. The kept mode ends up as `Σ q_j / √(i+1)`, so after
//! `N-1` steps the composite map is the cascade matrix [`cascade_matrix`].

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::homodyne::{condition_on_outcome, homodyne_log_pdf, sample_homodyne};
use crate::lcg::{log_sum_exp_iter, Gate, GaussianMixtureState, GaussianTerm, SymplecticTransform, DEFAULT_HBAR};
use crate::metrics::{metric_bundle, Lattice, MetricBundle};

/// Default absolute tolerance on mean components when merging terms.
pub const DEFAULT_REDUCE_TOL: f64 = 1e-9;

/// Largest supported number of cats.
pub const MAX_CATS: usize = 64;

/// A lossy squeezed cat `S(e^r)(|α⟩ + (-1)^k |-α⟩)` followed by a loss channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatSpec {
    pub alpha: f64,
    /// Squeezing in natural units; `r > 0` squeezes `x`.
    pub r: f64,
    pub parity: u8,
    pub eta: f64,
}

impl CatSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("cat amplitude must be >= 0, got {}", self.alpha)));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter("non-finite squeezing".into()));
        }
        if self.parity > 1 {
            return Err(Error::InvalidParameter(format!("parity must be 0 or 1, got {}", self.parity)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("transmissivity must lie in (0, 1], got {}", self.eta)));
        }
        Ok(())
    }
}

/// Squeezing parameter `r` for a squeezing level given in dB, so that
/// `e^{-2r} = 10^{-|dB|/10}`. The sign of `db` is ignored.
pub fn r_from_db(db: f64) -> f64 {
    db.abs() / 20.0 * std::f64::consts::LN_10
}

/// Four-term LCoG Wigner function of a squeezed cat, after loss, normalized.
pub fn squeezed_cat(spec: &CatSpec, hbar: f64) -> Result<GaussianMixtureState> {
    spec.validate()?;
    let c = (2.0 * hbar).sqrt() * spec.alpha;
    let mx = c * (-spec.r).exp();
    let mz = c * spec.r.exp();
    let cross = Complex64::new(-2.0 * spec.alpha * spec.alpha, std::f64::consts::PI * spec.parity as f64);
    let z = Complex64::new(0.0, 0.0);
    let term = |w: Complex64, x: Complex64, p: Complex64| GaussianTerm::new(w, DVector::from_vec(vec![x, p]));
    let terms = vec![
        term(z, mx.into(), z),
        term(z, (-mx).into(), z),
        term(cross, z, Complex64::new(0.0, mz)),
        term(cross, z, Complex64::new(0.0, -mz)),
    ];
    let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![
        hbar / 2.0 * (-2.0 * spec.r).exp(),
        hbar / 2.0 * (2.0 * spec.r).exp(),
    ]));
    GaussianMixtureState::new(1, terms, cov, hbar)?.apply_loss(spec.eta, &[0])?.normalize()
}

/// Cat amplitude that places the bred grid on the lattice's spacing:
/// `α = μ_T √N e^r / √(2ħ)`.
pub fn amplitude_for_target(n_cats: usize, lattice: Lattice, r: f64, hbar: f64) -> Result<f64> {
    if n_cats == 0 {
        return Err(Error::InvalidParameter("n_cats must be at least 1".into()));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    let mu = lattice.half_spacing(hbar) * (n_cats as f64).sqrt();
    Ok(mu * r.exp() / (2.0 * hbar).sqrt())
}

/// The `N × N` orthogonal matrix of the full cascade, acting identically on
/// the `x` and `p` blocks. Rows `1..N-1` are the measured modes, the last row
/// is the output.
pub fn cascade_matrix(n_cats: usize) -> Result<DMatrix<f64>> {
    if n_cats < 2 {
        return Err(Error::InvalidParameter(format!("cascade needs N >= 2, got {n_cats}")));
    }
    let n = n_cats;
    let mut b = DMatrix::zeros(n, n);
    for i in 1..n {
        let fi = i as f64;
        let head = 1.0 / (fi.sqrt() * (fi + 1.0).sqrt());
        for j in 0..i {
            b[(i - 1, j)] = head;
        }
        b[(i - 1, i)] = -(fi / (fi + 1.0)).sqrt();
    }
    let last = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        b[(n - 1, j)] = last;
    }
    Ok(b)
}

/// Splitter of step `i` on modes (state, cat).
pub fn step_transform(step_index: usize) -> Result<SymplecticTransform> {
    if step_index == 0 {
        return Err(Error::InvalidParameter("step index is 1-based".into()));
    }
    SymplecticTransform::from_gate(
        Gate::BeamSplitter { modes: (0, 1), reflectivity: 1.0 / (step_index as f64 + 1.0) },
        2,
    )
}

/// How a homodyne outcome is chosen in one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Fixed(f64),
    Sampled,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub state: GaussianMixtureState,
    pub outcome: f64,
    pub density: f64,
    pub log_density: f64,
    /// Terms before reduction.
    pub raw_terms: usize,
    pub attempts: u64,
}

/// One breeding iteration: tensor, splitter, `p`-homodyne on the first mode,
/// conditioning and reduction.
pub fn breed_step<R: Rng + ?Sized>(
    state_in: &GaussianMixtureState,
    cat: &GaussianMixtureState,
    step_index: usize,
    outcome: StepOutcome,
    reduce_tol: f64,
    rng: &mut R,
) -> Result<StepResult> {
    if state_in.n_modes() != 1 || cat.n_modes() != 1 {
        return Err(Error::InvalidParameter("breeding inputs must be single-mode".into()));
    }
    let joint = state_in.tensor(cat)?.apply_symplectic(&step_transform(step_index)?)?;
    let (m, attempts) = match outcome {
        StepOutcome::Fixed(m) => (m, 0),
        StepOutcome::Sampled => {
            let rec = sample_homodyne(&joint, 0, rng)?;
            (rec.value, rec.attempts)
        }
    };
    let (conditioned, log_density) = condition_on_outcome(&joint, 0, m)?;
    let state = reduce_equal_means(&conditioned, reduce_tol)?;
    Ok(StepResult { state, outcome: m, density: log_density.exp(), log_density, raw_terms: joint.len(), attempts })
}

fn cmp_means(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.total_cmp(&y.re) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    for (x, y) in a.iter().zip(b.iter()) {
        match x.im.total_cmp(&y.im) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// Merges terms whose means agree component-wise within `tol` (absolute, on
/// real and imaginary parts). Merged weights are log-summed; groups that
/// cancel exactly are dropped. Output is sorted lexicographically by mean.
pub fn reduce_equal_means(state: &GaussianMixtureState, tol: f64) -> Result<GaussianMixtureState> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("reduction tolerance must be > 0, got {tol}")));
    }
    let close = |a: &DVector<Complex64>, b: &DVector<Complex64>| {
        a.iter().zip(b.iter()).all(|(x, y)| (x.re - y.re).abs() <= tol && (x.im - y.im).abs() <= tol)
    };
    let mut groups: Vec<(DVector<Complex64>, Vec<Complex64>)> = Vec::new();
    for t in state.terms() {
        match groups.iter_mut().find(|(m, _)| close(m, &t.mean)) {
            Some((_, ws)) => ws.push(t.log_weight),
            None => groups.push((t.mean.clone(), vec![t.log_weight])),
        }
    }
    let mut terms: Vec<GaussianTerm> = groups
        .into_iter()
        .filter_map(|(mean, ws)| {
            let w = if ws.len() == 1 { ws[0] } else { log_sum_exp_iter(ws.iter().copied()) };
            (w.re > f64::NEG_INFINITY).then(|| GaussianTerm::new(w, mean))
        })
        .collect();
    if terms.is_empty() {
        return Err(Error::InvalidTrace(Complex64::new(0.0, 0.0)));
    }
    terms.sort_by(|a, b| cmp_means(&a.mean, &b.mean));
    Ok(state.with_terms(terms))
}

/// Squeezes the grid so that peaks spaced by `μ/√N` land on the lattice's
/// spacing, then applies the hexagonal squeeze for hex lattices.
pub fn align_to_lattice(
    state: &GaussianMixtureState,
    mu: f64,
    n_cats: usize,
    lattice: Lattice,
) -> Result<GaussianMixtureState> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidParameter(format!("peak spacing must be > 0, got {mu}")));
    }
    if n_cats == 0 {
        return Err(Error::InvalidParameter("n_cats must be at least 1".into()));
    }
    let z = mu / ((n_cats as f64).sqrt() * lattice.half_spacing(state.hbar()));
    let mut t = SymplecticTransform::identity(state.n_modes());
    if (z - 1.0).abs() > 1e-12 {
        t = t.then(&SymplecticTransform::from_gate(Gate::Squeeze { mode: 0, z }, state.n_modes())?)?;
    }
    if lattice.is_hex() {
        t = t.then(&SymplecticTransform::from_gate(Gate::HexSqueeze { mode: 0 }, state.n_modes())?)?;
    }
    state.apply_symplectic(&t)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OutcomePolicy {
    /// One `p` value per step, `N - 1` in total.
    Fixed(Vec<f64>),
    /// Outcomes drawn from the homodyne distribution with a seeded stream.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreedingConfig {
    pub n_cats: usize,
    pub lattice: Lattice,
    /// Cat squeezing in dB; the sign is ignored.
    pub squeezing_db: f64,
    pub eta: f64,
    pub parities: Vec<u8>,
    pub outcome_policy: OutcomePolicy,
    pub hbar: f64,
    /// Scale the amplitude by `1/√η` so that the lossy grid keeps its spacing.
    pub prescale: bool,
    /// Overrides the lattice-targeting amplitude.
    pub alpha: Option<f64>,
    pub reduce_tol: f64,
}

impl BreedingConfig {
    /// Equal even cats post-selected on `p = 0`.
    pub fn new(n_cats: usize, lattice: Lattice, squeezing_db: f64, eta: f64) -> Self {
        Self {
            n_cats,
            lattice,
            squeezing_db,
            eta,
            parities: vec![0; n_cats],
            outcome_policy: OutcomePolicy::Fixed(vec![0.0; n_cats.saturating_sub(1)]),
            hbar: DEFAULT_HBAR,
            prescale: false,
            alpha: None,
            reduce_tol: DEFAULT_REDUCE_TOL,
        }
    }

    pub fn with_outcomes(mut self, outcomes: Vec<f64>) -> Self {
        self.outcome_policy = OutcomePolicy::Fixed(outcomes);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.outcome_policy = OutcomePolicy::Sampled { seed };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_cats < 2 || self.n_cats > MAX_CATS {
            return bad(format!("n_cats must lie in [2, {MAX_CATS}], got {}", self.n_cats));
        }
        if !self.squeezing_db.is_finite() {
            return bad("squeezing_db must be finite".into());
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        if self.parities.len() != self.n_cats {
            return bad(format!("expected {} parities, got {}", self.n_cats, self.parities.len()));
        }
        if let Some(p) = self.parities.iter().find(|&&p| p > 1) {
            return bad(format!("parity must be 0 or 1, got {p}"));
        }
        if let OutcomePolicy::Fixed(ps) = &self.outcome_policy {
            if ps.len() != self.n_cats - 1 {
                return bad(format!("expected {} outcomes, got {}", self.n_cats - 1, ps.len()));
            }
            if ps.iter().any(|p| !p.is_finite()) {
                return bad("outcomes must be finite".into());
            }
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return bad(format!("hbar must be positive, got {}", self.hbar));
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) || !a.is_finite() {
                return bad(format!("alpha must be > 0, got {a}"));
            }
        }
        if !(self.reduce_tol > 0.0) {
            return bad(format!("reduce_tol must be > 0, got {}", self.reduce_tol));
        }
        Ok(())
    }

    pub fn r(&self) -> f64 {
        r_from_db(self.squeezing_db)
    }

    /// Amplitude before the optional `1/√η` prescale.
    pub fn base_alpha(&self) -> Result<f64> {
        match self.alpha {
            Some(a) => Ok(a),
            None => amplitude_for_target(self.n_cats, self.lattice, self.r(), self.hbar),
        }
    }

    /// Amplitude of the prepared cats.
    pub fn cat_alpha(&self) -> Result<f64> {
        let a = self.base_alpha()?;
        Ok(if self.prescale { a / self.eta.sqrt() } else { a })
    }

    /// Seed cat spec for a given parity.
    pub fn cat_spec(&self, parity: u8) -> Result<CatSpec> {
        Ok(CatSpec { alpha: self.cat_alpha()?, r: self.r(), parity, eta: self.eta })
    }
}

#[derive(Debug, Clone)]
pub struct BreedResult {
    pub final_state: GaussianMixtureState,
    pub outcomes: Vec<f64>,
    pub densities: Vec<f64>,
    pub log_densities: Vec<f64>,
    /// Term count after each step's reduction.
    pub term_counts: Vec<usize>,
    pub metrics: MetricBundle,
}

impl BreedResult {
    /// `ln` of the joint outcome density.
    pub fn log_likelihood(&self) -> f64 {
        self.log_densities.iter().sum()
    }
}

/// Runs the full protocol. Sampled outcomes use a ChaCha stream seeded from
/// the policy's seed.
pub fn breed(config: &BreedingConfig) -> Result<BreedResult> {
    let seed = match config.outcome_policy {
        OutcomePolicy::Sampled { seed } => seed,
        OutcomePolicy::Fixed(_) => 0,
    };
    breed_with_rng(config, &mut ChaCha20Rng::seed_from_u64(seed))
}

/// [`breed`] with a caller-supplied random stream. The stream is only used for
/// sampled outcomes.
pub fn breed_with_rng<R: Rng + ?Sized>(config: &BreedingConfig, rng: &mut R) -> Result<BreedResult> {
    config.validate()?;
    let cats = [squeezed_cat(&config.cat_spec(0)?, config.hbar)?, squeezed_cat(&config.cat_spec(1)?, config.hbar)?];
    let cat = |k: u8| &cats[k as usize];

    let mut state = cat(config.parities[0]).clone();
    let steps = config.n_cats - 1;
    let mut outcomes = Vec::with_capacity(steps);
    let mut densities = Vec::with_capacity(steps);
    let mut log_densities = Vec::with_capacity(steps);
    let mut term_counts = Vec::with_capacity(steps);
    for i in 1..=steps {
        let choice = match &config.outcome_policy {
            OutcomePolicy::Fixed(ps) => StepOutcome::Fixed(ps[i - 1]),
            OutcomePolicy::Sampled { .. } => StepOutcome::Sampled,
        };
        let step = breed_step(&state, cat(config.parities[i]), i, choice, config.reduce_tol, rng)?;
        outcomes.push(step.outcome);
        densities.push(step.density);
        log_densities.push(step.log_density);
        term_counts.push(step.state.len());
        state = step.state;
    }

    let mu = (2.0 * config.hbar).sqrt() * config.base_alpha()? * (-config.r()).exp();
    let final_state = align_to_lattice(&state, mu, config.n_cats, config.lattice)?;
    let metrics = metric_bundle(&final_state, config.lattice)?;
    Ok(BreedResult { final_state, outcomes, densities, log_densities, term_counts, metrics })
}

/// Density of outcome `m` at step `i` without conditioning.
pub fn step_outcome_log_density(
    state_in: &GaussianMixtureState,
    cat: &GaussianMixtureState,
    step_index: usize,
    m: f64,
) -> Result<f64> {
    let joint = state_in.tensor(cat)?.apply_symplectic(&step_transform(step_index)?)?;
    homodyne_log_pdf(&joint, 0, m)
}

/// Breeds explicit cats with fixed outcomes and no final alignment. Returns
/// the output state and the outcome density of each step.
pub fn breed_cats(
    cats: &[CatSpec],
    outcomes: &[f64],
    hbar: f64,
    reduce_tol: f64,
) -> Result<(GaussianMixtureState, Vec<f64>)> {
    if cats.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 cats, got {}", cats.len())));
    }
    if outcomes.len() != cats.len() - 1 {
        return Err(Error::DimensionMismatch { expected: cats.len() - 1, found: outcomes.len() });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0);
    let mut state = squeezed_cat(&cats[0], hbar)?;
    let mut densities = Vec::with_capacity(outcomes.len());
    for (i, (&m, spec)) in outcomes.iter().zip(&cats[1..]).enumerate() {
        let step = breed_step(&state, &squeezed_cat(spec, hbar)?, i + 1, StepOutcome::Fixed(m), reduce_tol, &mut rng)?;
        densities.push(step.density);
        state = step.state;
    }
    Ok((state, densities))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcg::wrap_phase;
    use crate::metrics::effective_squeezing;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn even_cat(alpha: f64, r: f64) -> GaussianMixtureState {
        squeezed_cat(&CatSpec { alpha, r, parity: 0, eta: 1.0 }, 2.0).unwrap()
    }

    #[test]
    fn cat_structure() {
        let spec = CatSpec { alpha: 1.3, r: 0.4, parity: 1, eta: 1.0 };
        let c = squeezed_cat(&spec, 2.0).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.is_normalized());
        let w = &c.terms()[2].log_weight;
        let w0 = &c.terms()[0].log_weight;
        assert!((w.re - w0.re + 2.0 * 1.3 * 1.3).abs() < 1e-12);
        assert!((wrap_phase(w.im) - PI).abs() < 1e-15);
        assert!((c.terms()[0].mean[0].re - 2.0 * 1.3 * (-0.4f64).exp()).abs() < 1e-14);
        assert!((c.terms()[2].mean[1].im - 2.0 * 1.3 * 0.4f64.exp()).abs() < 1e-14);
        assert!((c.cov()[(0, 0)] - (-0.8f64).exp()).abs() < 1e-15);
        assert!(c.is_conjugate_closed(1e-12));
    }

    #[test]
    fn even_cat_trace_before_normalization() {
        // 2(1 + e^{-2α²}) from the four unnormalized weights
        let a: f64 = 0.7;
        let c = even_cat(a, 0.0);
        let w0 = c.terms()[0].log_weight.re;
        assert!((-w0 - (2.0 * (1.0 + (-2.0 * a * a).exp())).ln()).abs() < 1e-14);
    }

    #[test]
    fn zero_amplitude_cat_reduces_to_squeezed_vacuum() {
        let c = even_cat(0.0, 0.5);
        let red = reduce_equal_means(&c, DEFAULT_REDUCE_TOL).unwrap();
        assert_eq!(red.len(), 1);
        assert!((red.terms()[0].log_weight).norm() < 1e-14);
        let odd = squeezed_cat(&CatSpec { alpha: 0.0, r: 0.5, parity: 1, eta: 1.0 }, 2.0);
        assert!(odd.is_err(), "odd cat with zero amplitude has zero norm");
    }

    #[test]
    fn large_amplitude_cross_weight() {
        let r = r_from_db(12.0);
        let a = amplitude_for_target(9, Lattice::Qunaught, r, 2.0).unwrap();
        assert!((a - 10.58).abs() < 5e-3);
        let c = even_cat(a, r);
        let rel = c.terms()[2].log_weight.re - c.terms()[0].log_weight.re;
        assert!((rel + 2.0 * a * a).abs() < 1e-9);
        assert!(rel < -223.0 && rel > -225.0);
    }

    #[test]
    fn amplitude_targets() {
        let a = amplitude_for_target(1, Lattice::Qunaught, 0.0, 2.0).unwrap();
        assert!((a - 0.5 * PI.sqrt()).abs() < 1e-15);
        for n in [2, 5, 9] {
            let l = amplitude_for_target(n, Lattice::LogicalSquare, 0.7, 2.0).unwrap();
            let q = amplitude_for_target(n, Lattice::Qunaught, 0.7, 2.0).unwrap();
            assert!((l / q - 2f64.sqrt()).abs() < 1e-14);
        }
        assert!(amplitude_for_target(0, Lattice::Qunaught, 0.0, 2.0).is_err());
    }

    #[test]
    fn cascade_matrix_shape() {
        let b = cascade_matrix(2).unwrap();
        let s = 0.5f64.sqrt();
        assert!((b - DMatrix::from_row_slice(2, 2, &[s, -s, s, s])).amax() < 1e-15);
        let b3 = cascade_matrix(3).unwrap();
        let v = &b3 * DVector::from_element(3, 1.0);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
        assert!((v[2] - 3f64.sqrt()).abs() < 1e-15);
        for n in 2..=20 {
            let b = cascade_matrix(n).unwrap();
            assert!((&b * b.transpose() - DMatrix::identity(n, n)).amax() < 1e-13);
        }
        assert!(cascade_matrix(1).is_err());
    }

    #[test]
    fn step_splitters_compose_to_cascade() {
        // Push the N input x-quadratures through the step splitters and read
        // off the linear map of the measured and output modes.
        for n in 2..=7 {
            let mut carried: Vec<f64> = (0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect();
            let mut rows = Vec::new();
            let mut basis = vec![carried.clone()];
            for j in 1..n {
                basis.push((0..n).map(|k| if k == j { 1.0 } else { 0.0 }).collect());
            }
            for (i, cat) in basis.iter().enumerate().skip(1) {
                let t = step_transform(i).unwrap();
                let s = t.matrix();
                let measured: Vec<f64> = (0..n).map(|k| s[(0, 0)] * carried[k] + s[(0, 2)] * cat[k]).collect();
                let kept: Vec<f64> = (0..n).map(|k| s[(2, 0)] * carried[k] + s[(2, 2)] * cat[k]).collect();
                rows.push(measured);
                carried = kept;
            }
            rows.push(carried);
            let b = cascade_matrix(n).unwrap();
            for (i, row) in rows.iter().enumerate() {
                for j in 0..n {
                    assert!((row[j] - b[(i, j)]).abs() < 1e-14, "N={n} row {i}");
                }
            }
        }
    }

    #[test]
    fn two_cats_at_p0_give_binomial_peaks() {
        let a = 1.8;
        let c = even_cat(a, 0.8);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let step = breed_step(&c, &c, 1, StepOutcome::Fixed(0.0), DEFAULT_REDUCE_TOL, &mut rng).unwrap();
        assert_eq!(step.raw_terms, 16);
        assert_eq!(step.state.len(), 9);
        let mu = 2.0 * a * (-0.8f64).exp();
        // real-mean peaks along x: (-2μ, 0, 2μ)/√2
        let real: Vec<&GaussianTerm> =
            step.state.terms().iter().filter(|t| t.mean.iter().all(|m| m.im == 0.0)).collect();
        assert_eq!(real.len(), 3);
        let want = [-2.0 * mu / 2f64.sqrt(), 0.0, 2.0 * mu / 2f64.sqrt()];
        for (t, x) in real.iter().zip(want) {
            assert!((t.mean[0].re - x).abs() < 1e-12);
        }
        // Wigner weights go as |amplitude|²: 1 : 4 : 1
        let w: Vec<f64> = real.iter().map(|t| t.log_weight.re).collect();
        assert!((w[1] - w[0] - 4f64.ln()).abs() < 1e-9);
        assert!((w[2] - w[0]).abs() < 1e-12);
    }

    #[test]
    fn term_count_law_small_n() {
        for n in 2..=6 {
            let res = breed(&BreedingConfig::new(n, Lattice::Qunaught, 12.0, 1.0)).unwrap();
            let want: Vec<usize> = (1..n).map(|i| (i + 2) * (i + 2)).collect();
            assert_eq!(res.term_counts, want);
            assert_eq!(res.final_state.len(), (n + 1) * (n + 1));
        }
    }

    #[test]
    fn lossless_peak_width_matches_input_squeezing() {
        for n in [3, 5] {
            let res = breed(&BreedingConfig::new(n, Lattice::Qunaught, 12.0, 1.0)).unwrap();
            assert!((res.metrics.db_x - 12.0).abs() < 0.02, "{}", res.metrics.db_x);
        }
    }

    #[test]
    fn validation_errors() {
        let mut c = BreedingConfig::new(3, Lattice::Qunaught, 12.0, 1.0);
        c.parities = vec![0, 0];
        assert!(matches!(breed(&c), Err(Error::InvalidConfig(_))));
        let c = BreedingConfig::new(3, Lattice::Qunaught, 12.0, 1.0).with_outcomes(vec![0.0]);
        assert!(breed(&c).unwrap_err().is_validation());
        assert!(BreedingConfig::new(1, Lattice::Qunaught, 12.0, 1.0).validate().is_err());
        assert!(BreedingConfig::new(3, Lattice::Qunaught, 12.0, 0.0).validate().is_err());
    }

    #[test]
    fn order_invariance_at_p0() {
        let base = BreedingConfig::new(4, Lattice::Qunaught, 10.0, 0.97);
        let mut a = base.clone();
        a.parities = vec![0, 1, 1, 0];
        let mut b = base;
        b.parities = vec![1, 0, 0, 1];
        let sa = breed(&a).unwrap().final_state;
        let sb = breed(&b).unwrap().final_state;
        assert_eq!(sa.len(), sb.len());
        // Terms far below the leading weight carry only cancellation residue.
        let top = sa.terms().iter().map(|t| t.log_weight.re).fold(f64::NEG_INFINITY, f64::max);
        for (x, y) in sa.terms().iter().zip(sb.terms()) {
            assert!((&x.mean - &y.mean).camax() < 1e-9);
            let diff = (x.log_weight - top).exp() - (y.log_weight - top).exp();
            assert!(diff.norm() < 1e-12, "{diff}");
        }
    }

    #[test]
    fn reduction_basics() {
        let s = GaussianMixtureState::new(
            1,
            vec![
                GaussianTerm::real(0.3, &[1.0, 0.0]),
                GaussianTerm::real(0.3, &[1.0, 0.0]),
                GaussianTerm::real(0.1, &[1.0 + 1e-8, 0.0]),
            ],
            DMatrix::identity(2, 2),
            2.0,
        )
        .unwrap();
        let r = reduce_equal_means(&s, 1e-9).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r.terms()[0].log_weight.re - (0.3 + 2f64.ln())).abs() < 1e-14);
        assert!(reduce_equal_means(&s, 0.0).is_err());
    }

    #[test]
    fn alignment() {
        let c = even_cat(1.0, 0.5);
        let mu = 3f64.sqrt() * Lattice::Qunaught.half_spacing(2.0);
        let same = align_to_lattice(&c, mu, 3, Lattice::Qunaught).unwrap();
        assert_eq!(same, c);
        let wider = align_to_lattice(&c, 0.8 * mu, 3, Lattice::Qunaught).unwrap();
        assert!(wider.cov()[(0, 0)] > c.cov()[(0, 0)]);
        assert!(align_to_lattice(&c, 0.0, 3, Lattice::Qunaught).is_err());
    }

    #[test]
    fn hex_alignment_maps_square_stabilizers() {
        let s = GaussianMixtureState::vacuum(1, 2.0)
            .unwrap()
            .apply_symplectic(&SymplecticTransform::from_gate(Gate::Squeeze { mode: 0, z: 1.9 }, 1).unwrap())
            .unwrap();
        let mu = Lattice::Qunaught.half_spacing(2.0) * 2f64.sqrt();
        let hex = align_to_lattice(&s, mu, 2, Lattice::HexQunaught).unwrap();
        let sq = crate::metrics::LatticeSpec::new(Lattice::Qunaught);
        let hx = crate::metrics::LatticeSpec::new(Lattice::HexQunaught);
        // same |χ|; Δ differs only through the stabilizer length
        let d0 = effective_squeezing(&s, sq.beta_stab).unwrap();
        let d1 = effective_squeezing(&hex, hx.beta_stab).unwrap();
        assert!((d0 * d0 * sq.beta_stab.norm_sqr() - d1 * d1 * hx.beta_stab.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn n3_weight_law() {
        let hbar = 2.0;
        let mu = (3.0 * PI * hbar / 2.0).sqrt();
        let f1 = |p1: f64, p2: f64| {
            let k = (2.0f64 / 3.0).sqrt();
            2.0 * Complex64::new(0.0, mu * k * p2 / hbar).exp() * (mu * 2f64.sqrt() * p1 / hbar).cos()
                + Complex64::new(0.0, -2.0 * mu * k * p2 / hbar).exp()
        };
        let points = [(0.0, 0.0), (0.3, 0.1), (-0.2, 0.45), (0.57, -0.3), (0.1, 0.83)];
        let mut diag = Vec::new();
        let mut cross = Vec::new();
        let mut cross_conj = Vec::new();
        for (p1, p2) in points {
            let cfg = BreedingConfig::new(3, Lattice::Qunaught, 12.0, 1.0).with_outcomes(vec![p1, p2]);
            let s = breed(&cfg).unwrap().final_state;
            let x_outer = 3f64.sqrt() * mu;
            let x_inner = mu / 3f64.sqrt();
            // imag = false: real-mean peak; true: interference term with Im p > 0
            let find = |x: f64, imag: bool| {
                s.terms()
                    .iter()
                    .find(|t| (t.mean[0].re - x).abs() < 1e-6 && (t.mean[1].im > 1e-9) == imag && t.mean[1].im > -1e-9)
                    .unwrap()
                    .log_weight
            };
            let outer = find(x_outer, false);
            let inner = find(x_inner, false);
            let mid = find((x_outer + x_inner) / 2.0, true);
            let f = f1(p1, p2);
            diag.push((inner - outer).exp() / f.norm_sqr());
            cross.push((mid - outer).exp() / f);
            cross_conj.push((mid - outer).exp() / f.conj());
        }
        let spread = |v: &[Complex64]| v.iter().map(|z| (z - v[0]).norm() / v[0].norm()).fold(0.0, f64::max);
        assert!(spread(&diag) < 1e-8, "{diag:?}");
        assert!(spread(&cross).min(spread(&cross_conj)) < 1e-8, "{cross:?} {cross_conj:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn reduction_is_idempotent(p1 in -1.0f64..1.0, p2 in -1.0f64..1.0, eta in 0.9f64..=1.0) {
            let cfg = BreedingConfig::new(3, Lattice::Qunaught, 8.0, eta).with_outcomes(vec![p1, p2]);
            let s = breed(&cfg).unwrap().final_state;
            let again = reduce_equal_means(&s, DEFAULT_REDUCE_TOL).unwrap();
            prop_assert_eq!(&again, &s);
            prop_assert!(s.is_conjugate_closed(1e-9));
            prop_assert!(s.is_normalized());
        }
    }
}
