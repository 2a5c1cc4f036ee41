//! States as linear combinations of Gaussians (LCoG).
//!
//! A Wigner function is stored as `W(q) = Σ_j exp(w_j) G_{μ_j, σ}(q)` where the
//! log-weights `w_j` and means `μ_j` are complex and all terms share one real
//! covariance `σ`. Signs and phases live in the imaginary part of `w_j`, so a
//! factor of `-1` is `iπ`. Complex means come in conjugate pairs, which keeps
//! the Wigner function real on real arguments.

mod logsumexp;
mod symplectic;

pub use logsumexp::{log_sum_exp, log_sum_exp_real};
pub(crate) use logsumexp::{log_sum_exp_iter, wrap_phase};
pub use symplectic::{kappa, symplectic_form, Gate, SymplecticTransform, SYMPLECTIC_TOL};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_HBAR: f64 = 2.0;

const COV_SYMMETRY_TOL: f64 = 1e-12;
const NORMALIZED_TOL: f64 = 1e-9;
const TRACE_PHASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTerm {
    /// Natural-log weight; `exp(log_weight)` multiplies the Gaussian.
    pub log_weight: Complex64,
    /// Complex mean, ordered `(x_1, p_1, ..., x_N, p_N)`.
    pub mean: DVector<Complex64>,
}

impl GaussianTerm {
    pub fn new(log_weight: Complex64, mean: DVector<Complex64>) -> Self {
        Self { log_weight, mean }
    }

    pub fn real(log_weight: f64, mean: &[f64]) -> Self {
        Self {
            log_weight: Complex64::new(log_weight, 0.0),
            mean: DVector::from_iterator(mean.len(), mean.iter().map(|&m| Complex64::new(m, 0.0))),
        }
    }
}

/// An N-mode state in the LCoG representation. Immutable: every operation
/// returns a new state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureState {
    n_modes: usize,
    terms: Vec<GaussianTerm>,
    cov: DMatrix<f64>,
    hbar: f64,
}

impl GaussianMixtureState {
    pub fn new(n_modes: usize, terms: Vec<GaussianTerm>, cov: DMatrix<f64>, hbar: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if terms.is_empty() {
            return Err(Error::EmptyInput);
        }
        let dim = 2 * n_modes;
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: cov.nrows() });
        }
        for t in &terms {
            if t.mean.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.mean.len() });
            }
            if !t.log_weight.re.is_finite() || !t.log_weight.im.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite log-weight {}", t.log_weight)));
            }
            if t.mean.iter().any(|m| !m.re.is_finite() || !m.im.is_finite()) {
                return Err(Error::InvalidParameter("non-finite mean".into()));
            }
        }
        validate_cov(&cov)?;
        Ok(Self { n_modes, terms, cov, hbar })
    }

    /// Internal constructor for operations that preserve the invariants by
    /// construction.
    pub(crate) fn from_parts(n_modes: usize, terms: Vec<GaussianTerm>, cov: DMatrix<f64>, hbar: f64) -> Self {
        debug_assert_eq!(cov.nrows(), 2 * n_modes);
        debug_assert!(terms.iter().all(|t| t.mean.len() == 2 * n_modes));
        Self { n_modes, terms, cov: symmetrize(cov), hbar }
    }

    /// The N-mode vacuum: one zero-mean term with covariance `(ħ/2) I`.
    pub fn vacuum(n_modes: usize, hbar: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
        }
        let dim = 2 * n_modes;
        Self::new(
            n_modes,
            vec![GaussianTerm::new(Complex64::new(0.0, 0.0), DVector::zeros(dim))],
            DMatrix::identity(dim, dim) * (hbar / 2.0),
            hbar,
        )
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn terms(&self) -> &[GaussianTerm] {
        &self.terms
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `ln Σ exp(w_j)`. Each term integrates to `exp(w_j)`.
    pub fn log_trace(&self) -> Complex64 {
        log_sum_exp_iter(self.terms.iter().map(|t| t.log_weight))
    }

    pub fn trace(&self) -> Complex64 {
        self.log_trace().exp()
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).norm() <= NORMALIZED_TOL
    }

    /// `μ -> S μ + d`, `σ -> S σ Sᵀ`; weights unchanged.
    pub fn apply_symplectic(&self, t: &SymplecticTransform) -> Result<Self> {
        if t.n_modes() != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: t.n_modes() });
        }
        let dev = t.symplectic_deviation();
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(dev));
        }
        let s = t.matrix();
        let sc = s.map(|v| Complex64::new(v, 0.0));
        let d = t.displacement().map(|v| Complex64::new(v, 0.0));
        let terms = self.terms.iter().map(|term| GaussianTerm::new(term.log_weight, &sc * &term.mean + &d)).collect();
        let cov = s * &self.cov * s.transpose();
        let out = Self::from_parts(self.n_modes, terms, cov, self.hbar);
        debug_assert!(out.is_conjugate_closed(1e-8) || !self.is_conjugate_closed(1e-8));
        Ok(out)
    }

    /// Pure-loss channel of transmissivity `eta` on the given modes:
    /// `μ -> √η μ`, `σ -> η σ + (1-η)(ħ/2) I` on those modes.
    pub fn apply_loss(&self, eta: f64, modes: &[usize]) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("transmissivity must lie in (0, 1], got {eta}")));
        }
        let dim = 2 * self.n_modes;
        let mut scale = vec![1.0; dim];
        let mut noise = vec![0.0; dim];
        for &m in modes {
            if m >= self.n_modes {
                return Err(Error::InvalidParameter(format!("mode {m} out of range for {} modes", self.n_modes)));
            }
            for q in 0..2 {
                scale[2 * m + q] = eta.sqrt();
                noise[2 * m + q] = (1.0 - eta) * self.hbar / 2.0;
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mean = DVector::from_iterator(dim, t.mean.iter().zip(&scale).map(|(m, s)| m * *s));
                GaussianTerm::new(t.log_weight, mean)
            })
            .collect();
        let x = DMatrix::from_diagonal(&DVector::from_vec(scale));
        let cov = &x * &self.cov * &x + DMatrix::from_diagonal(&DVector::from_vec(noise));
        Ok(Self::from_parts(self.n_modes, terms, cov, self.hbar))
    }

    /// `self ⊗ other`: means direct-summed, covariances block-diagonal,
    /// log-weights added pairwise. Terms are ordered with `self`'s index
    /// outermost.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if (self.hbar - other.hbar).abs() > 1e-14 * self.hbar.max(other.hbar) {
            return Err(Error::HbarMismatch(self.hbar, other.hbar));
        }
        let (da, db) = (2 * self.n_modes, 2 * other.n_modes);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mean = DVector::from_iterator(da + db, a.mean.iter().chain(b.mean.iter()).copied());
                terms.push(GaussianTerm::new(a.log_weight + b.log_weight, mean));
            }
        }
        let mut cov = DMatrix::zeros(da + db, da + db);
        cov.view_mut((0, 0), (da, da)).copy_from(&self.cov);
        cov.view_mut((da, da), (db, db)).copy_from(&other.cov);
        Ok(Self::from_parts(self.n_modes + other.n_modes, terms, cov, self.hbar))
    }

    /// Rescales the weights so that the trace is one.
    pub fn normalize(&self) -> Result<Self> {
        let lt = self.log_trace();
        if !lt.re.is_finite() || wrap_phase(lt.im).abs() > TRACE_PHASE_TOL {
            return Err(Error::InvalidTrace(lt.exp()));
        }
        let terms = self.terms.iter().map(|t| GaussianTerm::new(t.log_weight - lt.re, t.mean.clone())).collect();
        Ok(Self { n_modes: self.n_modes, terms, cov: self.cov.clone(), hbar: self.hbar })
    }

    /// Replaces the terms, keeping the covariance and ħ.
    pub(crate) fn with_terms(&self, terms: Vec<GaussianTerm>) -> Self {
        Self { n_modes: self.n_modes, terms, cov: self.cov.clone(), hbar: self.hbar }
    }

    /// Wigner function at a single real phase-space point.
    pub fn wigner_at(&self, q: &[f64]) -> Result<f64> {
        let chol = self.cholesky()?;
        self.wigner_with(&chol, q)
    }

    /// Wigner function at each of `points`.
    pub fn evaluate_wigner<P: AsRef<[f64]>>(&self, points: &[P]) -> Result<Vec<f64>> {
        let chol = self.cholesky()?;
        points.iter().map(|q| self.wigner_with(&chol, q.as_ref())).collect()
    }

    fn cholesky(&self) -> Result<Cholesky<f64, Dyn>> {
        Cholesky::new(self.cov.clone()).ok_or(Error::InvalidCovariance)
    }

    fn wigner_with(&self, chol: &Cholesky<f64, Dyn>, q: &[f64]) -> Result<f64> {
        let dim = 2 * self.n_modes;
        if q.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: q.len() });
        }
        let log_det: f64 = chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0;
        let log_norm = -0.5 * (dim as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
        let mut logs = Vec::with_capacity(self.terms.len());
        let mut abs_sum_log = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let diff_re = DVector::from_iterator(dim, q.iter().zip(t.mean.iter()).map(|(x, m)| x - m.re));
            let diff_im = DVector::from_iterator(dim, t.mean.iter().map(|m| -m.im));
            let sr = chol.solve(&diff_re);
            let si = chol.solve(&diff_im);
            // dᵀ σ⁻¹ d for complex d = a + ib (no conjugation)
            let quad = Complex64::new(diff_re.dot(&sr) - diff_im.dot(&si), diff_re.dot(&si) + diff_im.dot(&sr));
            let l = t.log_weight - 0.5 * quad + log_norm;
            abs_sum_log.push(l.re);
            logs.push(l);
        }
        let value = log_sum_exp_iter(logs.iter().copied()).exp();
        let scale = log_sum_exp_real(&abs_sum_log)?.exp().max(1.0);
        if value.im.abs() > 1e-10 * scale {
            return Err(Error::ImaginaryResidue(value.im));
        }
        Ok(value.re)
    }

    /// `ln χ(α)` for the displacement amplitudes `alpha` (one per mode).
    ///
    /// `χ(α) = Σ_j exp(w_j) exp[-(1/ħ)(Ωa)ᵀσ(Ωa) + i√(2/ħ)(Ωa)ᵀμ_j]` with
    /// `a = (Re α_1, Im α_1, ...)`. At `ħ = 2` this is the usual
    /// `exp[-½ aᵀΩσΩᵀa + i μᵀΩa]`.
    pub fn log_characteristic(&self, alpha: &[Complex64]) -> Result<Complex64> {
        if alpha.len() != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found: alpha.len() });
        }
        if !self.is_normalized() {
            return Err(Error::NotNormalized(self.trace()));
        }
        let dim = 2 * self.n_modes;
        let a = DVector::from_iterator(dim, alpha.iter().flat_map(|z| [z.re, z.im]));
        let oa = symplectic_form(self.n_modes) * a;
        let damping = -(oa.dot(&(&self.cov * &oa))) / self.hbar;
        let k = (2.0 / self.hbar).sqrt();
        let i = Complex64::new(0.0, 1.0);
        Ok(log_sum_exp_iter(self.terms.iter().map(|t| {
            let proj: Complex64 = t.mean.iter().zip(oa.iter()).map(|(m, o)| m * *o).sum();
            t.log_weight + damping + i * k * proj
        })))
    }

    pub fn evaluate_characteristic(&self, alpha: &[Complex64]) -> Result<Complex64> {
        Ok(self.log_characteristic(alpha)?.exp())
    }

    /// Checks that every term has a partner with conjugate mean and weight.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        self.terms.iter().all(|a| {
            let scale = 1.0 + a.mean.iter().map(|m| m.norm()).fold(0.0, f64::max);
            self.terms.iter().any(|b| {
                a.mean.iter().zip(b.mean.iter()).all(|(x, y)| (x - y.conj()).norm() <= tol * scale)
                    && (a.log_weight.re - b.log_weight.re).abs() <= tol * (1.0 + a.log_weight.re.abs())
                    && wrap_phase(a.log_weight.im + b.log_weight.im).abs() <= tol * (1.0 + a.log_weight.re.abs())
            })
        })
    }
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn validate_cov(cov: &DMatrix<f64>) -> Result<()> {
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidCovariance);
    }
    let scale = cov.amax().max(1.0);
    if (cov - cov.transpose()).amax() > COV_SYMMETRY_TOL * scale {
        return Err(Error::InvalidCovariance);
    }
    if Cholesky::new(cov.clone()).is_none() {
        return Err(Error::InvalidCovariance);
    }
    Ok(())
}
