//! Truncated number-basis reference simulator.
//!
//! Used to cross-check the Gaussian-mixture pipeline on small problems. All
//! operators are built from closed forms and recurrences rather than matrix
//! exponentials: displacement matrix elements from Laguerre polynomials, the
//! beam splitter by expanding `U a† U†` in the two modes, and homodyne
//! projection from Hermite functions.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::breeding::{breed_cats, CatSpec, DEFAULT_REDUCE_TOL};
use crate::error::{Error, Result};
use crate::metrics::{delta_from_log_abs, effective_squeezing, stabilizer_displacements, Lattice};

pub const DEFAULT_CUTOFF: usize = 60;

/// Largest truncated population accepted by the tail checks.
pub const TAIL_TOL: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-9;
const RANK_CUT: f64 = 1e-15;
const MAX_SQUEEZED_PHOTONS: usize = 2000;

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// A single-mode density matrix in the number basis `|0⟩ .. |dim-1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensity {
    matrix: DMatrix<C>,
}

impl FockDensity {
    /// Checks Hermiticity, trace and positivity.
    pub fn new(matrix: DMatrix<C>) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 {
            return Err(Error::EmptyInput);
        }
        if matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.ncols() });
        }
        if (&matrix - matrix.adjoint()).camax() > HERMITIAN_TOL {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if tr.re > 1.0 + 1e-9 || tr.re <= 0.0 || tr.im.abs() > HERMITIAN_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let rho = Self { matrix: hermitize(matrix) };
        let min = rho.eigen().eigenvalues.min();
        if min < -EIGEN_TOL {
            return Err(Error::NegativeDensity(min));
        }
        Ok(rho)
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        let mut v = DVector::zeros(dim.max(1));
        v[0] = c(1.0);
        Self::from_pure(&v)
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`.
    pub fn from_pure(psi: &DVector<C>) -> Result<Self> {
        let n = psi.norm_squared();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidTrace(c(n)));
        }
        Ok(Self { matrix: psi * psi.adjoint() / c(n) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `⟨n|ρ|n⟩`.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.matrix[(n, n)].re).collect()
    }

    fn eigen(&self) -> SymmetricEigen<C, nalgebra::Dyn> {
        SymmetricEigen::new(self.matrix.clone())
    }

    /// `Σ_l K_l ρ K_l†` with `⟨n-l|K_l|n⟩ = √C(n,l) η^{(n-l)/2} (1-η)^{l/2}`.
    pub fn apply_loss(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("transmissivity must lie in (0, 1], got {eta}")));
        }
        if eta == 1.0 {
            return Ok(self.clone());
        }
        let d = self.dim();
        let ln_fact = ln_factorials(d);
        let mut out = DMatrix::zeros(d, d);
        for l in 0..d {
            let k = DMatrix::from_fn(d, d, |row, col| {
                if col >= l && row == col - l {
                    let n = col;
                    let ln_binom = ln_fact[n] - ln_fact[l] - ln_fact[n - l];
                    let v =
                        (0.5 * ln_binom + 0.5 * (n - l) as f64 * eta.ln() + 0.5 * l as f64 * (1.0 - eta).ln()).exp();
                    c(v)
                } else {
                    c(0.0)
                }
            });
            out += &k * &self.matrix * k.adjoint();
        }
        Ok(Self { matrix: hermitize(out) })
    }

    /// `Tr[ρ D(β)]`.
    pub fn characteristic(&self, beta: C) -> C {
        let d = self.dim();
        let dm = displacement_matrix(beta, d, d);
        (&self.matrix * dm).trace()
    }

    /// Wigner function at `(x, p)`: `(1/πħ) Tr[ρ D(2γ) Π]` with
    /// `γ = (x + ip)/√(2ħ)` and `Π` the parity operator.
    pub fn wigner(&self, x: f64, p: f64, hbar: f64) -> f64 {
        let d = self.dim();
        let g = C::new(x, p) / (2.0 * hbar).sqrt();
        let dm = displacement_matrix(g * 2.0, d, d);
        let mut acc = c(0.0);
        for m in 0..d {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for n in 0..d {
                acc += self.matrix[(m, n)] * dm[(n, m)] * sign;
            }
        }
        acc.re / (std::f64::consts::PI * hbar)
    }

    /// Eigenpairs with weight above the rank cut, largest first.
    fn mixture(&self) -> Vec<(f64, DVector<C>)> {
        let e = self.eigen();
        let max = e.eigenvalues.max().max(0.0);
        let mut out: Vec<(f64, DVector<C>)> = e
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > RANK_CUT * max)
            .map(|(i, &l)| (l, e.eigenvectors.column(i).into_owned()))
            .collect();
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out
    }
}

fn hermitize(m: DMatrix<C>) -> DMatrix<C> {
    (&m + m.adjoint()) * c(0.5)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n + 1];
    for k in 1..=n {
        v[k] = v[k - 1] + (k as f64).ln();
    }
    v
}

/// `⟨m|D(γ)|n⟩` for `m < rows`, `n < cols`, from the associated Laguerre
/// form `√(n!/m!) γ^{m-n} e^{-|γ|²/2} L_n^{(m-n)}(|γ|²)` for `m >= n` and
/// `⟨m|D(γ)|n⟩ = ⟨n|D(-γ)|m⟩*` above the diagonal.
pub fn displacement_matrix(gamma: C, rows: usize, cols: usize) -> DMatrix<C> {
    let mut d = DMatrix::zeros(rows, cols);
    if gamma == c(0.0) {
        for k in 0..rows.min(cols) {
            d[(k, k)] = c(1.0);
        }
        return d;
    }
    let x = gamma.norm_sqr();
    let (ln_abs, arg) = (gamma.norm().ln(), gamma.arg());
    let ln_fact = ln_factorials(rows.max(cols));
    // lower triangle of D(γ) (sign = 1) or of D(-γ) (sign = -1), both indexed
    // by (larger, smaller)
    let entry = |big: usize, small: usize, lag: f64, flip: bool| {
        let k = big - small;
        let ln_pref = 0.5 * (ln_fact[small] - ln_fact[big]) + k as f64 * ln_abs - x / 2.0;
        let phase = if flip { k as f64 * (arg + std::f64::consts::PI) } else { k as f64 * arg };
        C::from_polar(ln_pref.exp() * lag, phase)
    };
    for k in 0..rows.max(cols) {
        // L_n^{(k)}(x) for n = 0, 1, ...
        let (mut l_prev, mut l) = (0.0, 1.0);
        for n in 0.. {
            let (below, above) = (n + k < rows && n < cols, n < rows && n + k < cols);
            if !below && !above {
                break;
            }
            if below {
                d[(n + k, n)] = entry(n + k, n, l, false);
            }
            if above && k > 0 {
                d[(n, n + k)] = entry(n + k, n, l, true).conj();
            }
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0 + k as f64 - x) * l - (nf + k as f64) * l_prev) / (nf + 1.0);
            l_prev = l;
            l = next;
        }
    }
    d
}

/// Number-basis amplitudes of the `x`-squeezed vacuum `S(e^r)|0⟩`, up to the
/// point where the remaining population is negligible.
fn squeezed_vacuum_amplitudes(r: f64) -> Result<Vec<f64>> {
    let t = -r.tanh();
    let mut amps = vec![0.0; 1];
    amps[0] = 1.0 / r.cosh().sqrt();
    let mut coeff = amps[0];
    let mut m = 0usize;
    // the ratio of successive amplitudes tends to tanh r < 1
    while coeff * coeff > 1e-34 || 2 * m < 8 {
        if 2 * (m + 1) >= MAX_SQUEEZED_PHOTONS {
            return Err(Error::CutoffTooSmall { cutoff: MAX_SQUEEZED_PHOTONS, tail: coeff * coeff });
        }
        // c_{2m+2} = c_{2m} · t · √((2m+1)(2m+2)) / (2(m+1))
        coeff *= t * (((2 * m + 1) * (2 * m + 2)) as f64).sqrt() / (2.0 * (m + 1) as f64);
        m += 1;
        amps.push(0.0);
        amps.push(coeff);
        if coeff == 0.0 {
            break;
        }
    }
    Ok(amps)
}

/// Pure lossless squeezed cat `S(e^r)(|α⟩ + (-1)^k|-α⟩)`, normalized, plus the
/// truncated tail population.
fn pure_cat(alpha: f64, r: f64, parity: u8, cutoff: usize) -> Result<(DVector<C>, f64)> {
    let sq = squeezed_vacuum_amplitudes(r)?;
    let g = c(alpha * (-r).exp());
    let plus = displacement_matrix(g, cutoff, sq.len());
    let minus = displacement_matrix(-g, cutoff, sq.len());
    let sign = if parity == 0 { 1.0 } else { -1.0 };
    let s = DVector::from_iterator(sq.len(), sq.iter().map(|&a| c(a)));
    let v = &plus * &s + (&minus * &s) * c(sign);
    let norm = 2.0 * (1.0 + sign * (-2.0 * alpha * alpha).exp());
    if !(norm > 0.0) {
        return Err(Error::InvalidTrace(c(norm)));
    }
    let tail = 1.0 - v.norm_squared() / norm;
    Ok((v / c(norm.sqrt()), tail))
}

/// Density matrix of a lossy squeezed cat.
pub fn cat_density_fock(spec: &CatSpec, cutoff: usize) -> Result<FockDensity> {
    spec.validate()?;
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let (v, tail) = pure_cat(spec.alpha, spec.r, spec.parity, cutoff)?;
    if tail.abs() > TAIL_TOL {
        return Err(Error::CutoffTooSmall { cutoff, tail });
    }
    FockDensity::from_pure(&v)?.apply_loss(spec.eta)
}

/// Overlaps `⟨p|n⟩ = (-i)^n ψ_n(p)`, with `ψ_n` the Hermite functions.
pub fn p_eigenstate_amplitudes(p: f64, n_max: usize, hbar: f64) -> Vec<C> {
    let y = p / hbar.sqrt();
    let mut psi = vec![0.0; n_max];
    if n_max == 0 {
        return Vec::new();
    }
    psi[0] = (std::f64::consts::PI * hbar).powf(-0.25) * (-y * y / 2.0).exp();
    if n_max > 1 {
        psi[1] = 2f64.sqrt() * y * psi[0];
    }
    for n in 1..n_max.saturating_sub(1) {
        let nf = n as f64;
        psi[n + 1] = (2.0 / (nf + 1.0)).sqrt() * y * psi[n] - (nf / (nf + 1.0)).sqrt() * psi[n - 1];
    }
    let phases = [c(1.0), C::new(0.0, -1.0), c(-1.0), C::new(0.0, 1.0)];
    psi.iter().enumerate().map(|(n, &v)| phases[n % 4] * v).collect()
}

/// `T[n1][n2] = U|n1, n2⟩` for the splitter whose Heisenberg action is
/// `a -> √η a - √(1-η) b`, `b -> √(1-η) a + √η b`. Entry `T[n1][n2][k]` is the
/// amplitude of `|k, n1 + n2 - k⟩`.
struct BeamSplitterTable {
    dim: usize,
    table: Vec<Vec<f64>>,
}

impl BeamSplitterTable {
    fn new(eta: f64, dim: usize) -> Self {
        let (ct, st) = (eta.sqrt(), (1.0 - eta).sqrt());
        let mut table: Vec<Vec<f64>> = vec![Vec::new(); dim * dim];
        table[0] = vec![1.0];
        // U a† U† = c a† + s b†, U b† U† = -s a† + c b†
        let raise = |v: &[f64], n: usize, ca: f64, cb: f64, norm: f64| {
            // v indexed by k over |k, n-k⟩; result over |k, n+1-k⟩
            let mut out = vec![0.0; n + 2];
            for (k, &a) in v.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                out[k + 1] += ca * ((k + 1) as f64).sqrt() * a;
                out[k] += cb * ((n - k + 1) as f64).sqrt() * a;
            }
            out.iter_mut().for_each(|x| *x /= norm);
            out
        };
        for n2 in 1..dim {
            let prev = table[n2 - 1].clone();
            table[n2] = raise(&prev, n2 - 1, -st, ct, (n2 as f64).sqrt());
        }
        for n1 in 1..dim {
            for n2 in 0..dim {
                let prev = table[(n1 - 1) * dim + n2].clone();
                table[n1 * dim + n2] = raise(&prev, n1 - 1 + n2, ct, st, (n1 as f64).sqrt());
            }
        }
        Self { dim, table }
    }

    /// `U(|u⟩ ⊗ |v⟩)` as a `(2·dim-1) × (2·dim-1)` amplitude array.
    fn apply(&self, u: &DVector<C>, v: &DVector<C>) -> DMatrix<C> {
        let out_dim = 2 * self.dim - 1;
        let mut psi = DMatrix::zeros(out_dim, out_dim);
        for n1 in 0..self.dim {
            if u[n1] == c(0.0) {
                continue;
            }
            for n2 in 0..self.dim {
                let a = u[n1] * v[n2];
                if a == c(0.0) {
                    continue;
                }
                let n = n1 + n2;
                for (k, &t) in self.table[n1 * self.dim + n2].iter().enumerate() {
                    psi[(k, n - k)] += a * t;
                }
            }
        }
        psi
    }
}

#[derive(Debug, Clone)]
pub struct FockBreedResult {
    pub state: FockDensity,
    /// Conditional outcome density of each step.
    pub densities: Vec<f64>,
}

/// Conditions `ρ_in ⊗ ρ_cat` after the step-`i` splitter on outcome `m` of a
/// `p` measurement on the first mode. Returns the normalized kept-mode state
/// and the outcome density.
pub fn breed_step_fock(
    rho_in: &FockDensity,
    cat: &FockDensity,
    step_index: usize,
    m: f64,
    hbar: f64,
) -> Result<(FockDensity, f64)> {
    if rho_in.dim() != cat.dim() {
        return Err(Error::DimensionMismatch { expected: rho_in.dim(), found: cat.dim() });
    }
    if step_index == 0 {
        return Err(Error::InvalidParameter("step index is 1-based".into()));
    }
    let d = rho_in.dim();
    let bs = BeamSplitterTable::new(1.0 / (step_index as f64 + 1.0), d);
    let proj = p_eigenstate_amplitudes(m, 2 * d - 1, hbar);
    let bra = DVector::from_vec(proj);

    let mut out = DMatrix::zeros(d, d);
    let mut total = 0.0;
    let mut tail = 0.0;
    for (la, u) in rho_in.mixture() {
        for (lb, v) in cat.mixture() {
            let psi = bs.apply(&u, &v);
            // ⟨p|_1 ψ: contract the first index
            let phi = psi.transpose() * &bra;
            let w = la * lb;
            let full = phi.norm_squared();
            let kept = phi.rows(0, d).into_owned();
            total += w * full;
            tail += w * (full - kept.norm_squared());
            out += (&kept * kept.adjoint()) * c(w);
        }
    }
    if !(total > 0.0) {
        return Err(Error::InvalidTrace(c(total)));
    }
    if tail / total > TAIL_TOL {
        return Err(Error::CutoffTooSmall { cutoff: d, tail: tail / total });
    }
    let state = FockDensity { matrix: hermitize(out / c(total - tail)) };
    Ok((state, total))
}

/// Breeds the given cats with fixed outcomes, mirroring the Gaussian-mixture
/// pipeline step by step.
pub fn breed_fock(cats: &[CatSpec], outcomes: &[f64], cutoff: usize, hbar: f64) -> Result<FockBreedResult> {
    if cats.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 cats, got {}", cats.len())));
    }
    if outcomes.len() != cats.len() - 1 {
        return Err(Error::DimensionMismatch { expected: cats.len() - 1, found: outcomes.len() });
    }
    let rhos = cats.iter().map(|s| cat_density_fock(s, cutoff)).collect::<Result<Vec<_>>>()?;
    let mut state = rhos[0].clone();
    let mut densities = Vec::with_capacity(outcomes.len());
    for (i, &m) in outcomes.iter().enumerate() {
        let (next, p) = breed_step_fock(&state, &rhos[i + 1], i + 1, m, hbar)?;
        densities.push(p);
        state = next;
    }
    Ok(FockBreedResult { state, densities })
}

/// Effective squeezing from `|Tr[ρ D(β)]|` on a normalized state.
pub fn effective_squeezing_fock(rho: &FockDensity, beta: C) -> Result<f64> {
    let b2 = beta.norm_sqr();
    if !(b2 > 0.0) {
        return Err(Error::InvalidParameter("stabilizer displacement must be non-zero".into()));
    }
    if (rho.trace() - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(c(rho.trace())));
    }
    delta_from_log_abs(rho.characteristic(beta).norm().ln(), b2)
}

/// Largest deviations between the Gaussian-mixture pipeline and this oracle
/// on one breeding run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    /// Over an 11 x 11 grid on `[-6, 6]²`.
    pub wigner: f64,
    pub density: f64,
    /// Linear `Δ` on both qunaught stabilizers.
    pub delta: f64,
}

/// Breeds `cats` with fixed `outcomes` in both representations and compares
/// the unaligned outputs.
pub fn compare_with_oracle(cats: &[CatSpec], outcomes: &[f64], cutoff: usize, hbar: f64) -> Result<OracleComparison> {
    let (lcog, densities) = breed_cats(cats, outcomes, hbar, DEFAULT_REDUCE_TOL)?;
    let fock = breed_fock(cats, outcomes, cutoff, hbar)?;
    let density = densities.iter().zip(&fock.densities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut wigner: f64 = 0.0;
    for i in 0..11 {
        for j in 0..11 {
            let (x, p) = (-6.0 + 1.2 * i as f64, -6.0 + 1.2 * j as f64);
            wigner = wigner.max((lcog.wigner_at(&[x, p])? - fock.state.wigner(x, p, hbar)).abs());
        }
    }
    let (a, b) = stabilizer_displacements(Lattice::Qunaught);
    let mut delta: f64 = 0.0;
    for beta in [a, b] {
        delta = delta.max((effective_squeezing(&lcog, beta)? - effective_squeezing_fock(&fock.state, beta)?).abs());
    }
    Ok(OracleComparison { wigner, density, delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breeding::{breed, squeezed_cat, BreedingConfig};
    use crate::homodyne::homodyne_pdf;
    use crate::lcg::GaussianMixtureState;
    use crate::metrics::Lattice;
    use std::f64::consts::PI;

    #[test]
    fn displacement_matrix_is_unitary_on_low_block() {
        for g in [C::new(1.1, -0.7), C::new(3.0, 2.0), C::new(5.0, 0.0), C::new(0.01, 0.02)] {
            let d = displacement_matrix(g, 400, 60);
            for n in 0..60 {
                let col: f64 = d.column(n).norm_squared();
                assert!((col - 1.0).abs() < 1e-12, "{g}, column {n}: {col}");
            }
            // D(γ)† = D(-γ)
            let a = displacement_matrix(g, 60, 60);
            let b = displacement_matrix(-g, 60, 60);
            assert!((a.adjoint() - b).camax() < 1e-12);
        }
        let coherent = displacement_matrix(C::new(0.5, 0.0), 3, 1);
        assert!((coherent[(1, 0)].re - 0.5 * (-0.125f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn vacuum_cat_is_vacuum_projector() {
        let rho = cat_density_fock(&CatSpec { alpha: 0.0, r: 0.0, parity: 0, eta: 1.0 }, 10).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((rho.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn even_cat_has_even_photon_numbers() {
        let rho = cat_density_fock(&CatSpec { alpha: 1.5, r: 0.3, parity: 0, eta: 1.0 }, 60).unwrap();
        let pops = rho.populations();
        for (n, p) in pops.iter().enumerate() {
            if n % 2 == 1 {
                assert!(p.abs() < 1e-14);
            }
        }
        assert!((rho.trace() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn small_cutoff_is_reported() {
        let err = cat_density_fock(&CatSpec { alpha: 2.0, r: 0.3, parity: 0, eta: 1.0 }, 5).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { cutoff: 5, .. }));
    }

    #[test]
    fn loss_keeps_trace_and_shrinks_coherences() {
        let spec = CatSpec { alpha: 1.2, r: 0.2, parity: 1, eta: 1.0 };
        let pure = cat_density_fock(&spec, 50).unwrap();
        let lossy = cat_density_fock(&CatSpec { eta: 0.8, ..spec }, 50).unwrap();
        assert!((lossy.trace() - pure.trace()).abs() < 1e-10);
        let purity = |r: &FockDensity| (r.matrix() * r.matrix()).trace().re;
        assert!(purity(&lossy) < purity(&pure) - 1e-3);
        assert!(FockDensity::new(lossy.matrix().clone()).is_ok());
    }

    #[test]
    fn coherent_state_p_density_peaks_at_positive_p() {
        let hbar = 2.0;
        let g = C::new(0.0, 1.0);
        let d = displacement_matrix(g, 40, 1);
        let psi = d.column(0).into_owned();
        let dens = |p: f64| {
            let a = p_eigenstate_amplitudes(p, 40, hbar);
            a.iter().zip(psi.iter()).map(|(x, y)| x * y).sum::<C>().norm_sqr()
        };
        let peak = (2.0 * hbar).sqrt() * g.im;
        assert!(dens(peak) > dens(peak + 0.3));
        assert!(dens(peak) > dens(peak - 0.3));
        assert!((dens(peak) - 1.0 / (PI * hbar).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn wigner_matches_gaussian_mixture_for_lossy_cat() {
        let spec = CatSpec { alpha: 1.5, r: 0.3, parity: 0, eta: 0.95 };
        let rho = cat_density_fock(&spec, 60).unwrap();
        let lcog = squeezed_cat(&spec, 2.0).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                let (x, p) = (-4.0 + 8.0 * i as f64 / 9.0, -4.0 + 8.0 * j as f64 / 9.0);
                let a = rho.wigner(x, p, 2.0);
                let b = lcog.wigner_at(&[x, p]).unwrap();
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst < 1e-6, "max deviation {worst}");
    }

    #[test]
    fn two_cat_breeding_matches_gaussian_mixture() {
        let spec = CatSpec { alpha: 1.5, r: 0.3, parity: 0, eta: 1.0 };
        for m in [0.0, 0.5] {
            let fock = breed_fock(&[spec, spec], &[m], 60, 2.0).unwrap();
            let mut cfg = BreedingConfig::new(2, Lattice::Qunaught, 0.0, 1.0).with_outcomes(vec![m]);
            cfg.squeezing_db = 0.3 * 20.0 / std::f64::consts::LN_10;
            cfg.alpha = Some(1.5);
            let res = breed(&cfg).unwrap();
            // breeding output before the alignment squeeze
            assert!((fock.densities[0] - res.densities[0]).abs() < 1e-6);
            let cat = squeezed_cat(&spec, 2.0).unwrap();
            let joint =
                cat.tensor(&cat).unwrap().apply_symplectic(&crate::breeding::step_transform(1).unwrap()).unwrap();
            assert!((homodyne_pdf(&joint, 0, m).unwrap() - fock.densities[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_amplitude_breeding_gives_squeezed_vacuum() {
        let spec = CatSpec { alpha: 0.0, r: 0.4, parity: 0, eta: 1.0 };
        let out = breed_fock(&[spec, spec], &[0.7], 40, 2.0).unwrap();
        let sv = cat_density_fock(&spec, 40).unwrap();
        assert!((out.state.matrix() - sv.matrix()).camax() < 1e-8);
    }

    #[test]
    fn effective_squeezing_of_vacuum_and_squeezed_vacuum() {
        let v = FockDensity::vacuum(30).unwrap();
        let d = effective_squeezing_fock(&v, C::new(0.0, PI.sqrt())).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let r = 0.4;
        let sv = cat_density_fock(&CatSpec { alpha: 0.0, r, parity: 0, eta: 1.0 }, 60).unwrap();
        let d = effective_squeezing_fock(&sv, C::new(0.0, PI.sqrt())).unwrap();
        assert!((d - (-r).exp()).abs() < 1e-8);
        let g = GaussianMixtureState::vacuum(1, 2.0).unwrap();
        assert!(g.is_normalized());
    }
}
