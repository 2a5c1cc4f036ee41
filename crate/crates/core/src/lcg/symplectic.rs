//! Gaussian unitaries as affine maps `q -> S q + d` on the quadrature vector
//! `(x_1, p_1, ..., x_N, p_N)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Block-diagonal symplectic form, one `[[0, 1], [-1, 0]]` block per mode.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// `κ± = 3^(-1/4) ± 3^(1/4)`, the entries of the hexagonal squeeze.
pub fn kappa() -> (f64, f64) {
    let q = 3f64.powf(0.25);
    (1.0 / q + q, 1.0 / q - q)
}

/// Elementary Gaussian operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Shift `x` by `dx` and `p` by `dp` on one mode.
    Displacement { mode: usize, dx: f64, dp: f64 },
    /// `S(z)`: `x -> x / z`, `p -> z p`. `z > 1` squeezes `x`.
    Squeeze { mode: usize, z: f64 },
    /// `x -> cos φ x - sin φ p`, `p -> sin φ x + cos φ p`.
    Rotation { mode: usize, phi: f64 },
    /// `q_a -> √η q_a - √(1-η) q_b`, `q_b -> √(1-η) q_a + √η q_b`.
    BeamSplitter { modes: (usize, usize), reflectivity: f64 },
    /// Squeeze by `3^(1/4)` along the π/4 axis, mapping square lattices to
    /// hexagonal ones.
    HexSqueeze { mode: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    displacement: DVector<f64>,
}

impl SymplecticTransform {
    pub fn new(matrix: DMatrix<f64>, displacement: DVector<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || matrix.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "symplectic matrix must be square with even size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if displacement.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: displacement.len() });
        }
        if displacement.iter().any(|d| !d.is_finite()) || matrix.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParameter("non-finite transform entries".into()));
        }
        let t = Self { matrix, displacement };
        let dev = t.symplectic_deviation();
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(dev));
        }
        Ok(t)
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { matrix: DMatrix::identity(2 * n_modes, 2 * n_modes), displacement: DVector::zeros(2 * n_modes) }
    }

    /// Builds the transform of a single gate acting on an `n_modes` register.
    pub fn from_gate(gate: Gate, n_modes: usize) -> Result<Self> {
        let mut t = Self::identity(n_modes);
        let check_mode = |m: usize| {
            if m >= n_modes {
                Err(Error::InvalidParameter(format!("mode {m} out of range for {n_modes} modes")))
            } else {
                Ok(())
            }
        };
        match gate {
            Gate::Displacement { mode, dx, dp } => {
                check_mode(mode)?;
                if !dx.is_finite() || !dp.is_finite() {
                    return Err(Error::InvalidParameter("non-finite displacement".into()));
                }
                t.displacement[2 * mode] = dx;
                t.displacement[2 * mode + 1] = dp;
            }
            Gate::Squeeze { mode, z } => {
                check_mode(mode)?;
                if !(z > 0.0) || !z.is_finite() {
                    return Err(Error::InvalidParameter(format!("squeeze factor must be > 0, got {z}")));
                }
                t.matrix[(2 * mode, 2 * mode)] = 1.0 / z;
                t.matrix[(2 * mode + 1, 2 * mode + 1)] = z;
            }
            Gate::Rotation { mode, phi } => {
                check_mode(mode)?;
                if !phi.is_finite() {
                    return Err(Error::InvalidParameter("non-finite rotation angle".into()));
                }
                let (s, c) = phi.sin_cos();
                let i = 2 * mode;
                t.matrix[(i, i)] = c;
                t.matrix[(i, i + 1)] = -s;
                t.matrix[(i + 1, i)] = s;
                t.matrix[(i + 1, i + 1)] = c;
            }
            Gate::BeamSplitter { modes: (a, b), reflectivity } => {
                check_mode(a)?;
                check_mode(b)?;
                if a == b {
                    return Err(Error::InvalidParameter("beam splitter modes must differ".into()));
                }
                if !(0.0..=1.0).contains(&reflectivity) {
                    return Err(Error::InvalidParameter(format!(
                        "reflectivity must lie in [0, 1], got {reflectivity}"
                    )));
                }
                let r = reflectivity.sqrt();
                let s = (1.0 - reflectivity).sqrt();
                for q in 0..2 {
                    let (ia, ib) = (2 * a + q, 2 * b + q);
                    t.matrix[(ia, ia)] = r;
                    t.matrix[(ia, ib)] = -s;
                    t.matrix[(ib, ia)] = s;
                    t.matrix[(ib, ib)] = r;
                }
            }
            Gate::HexSqueeze { mode } => {
                check_mode(mode)?;
                let (kp, km) = kappa();
                let i = 2 * mode;
                t.matrix[(i, i)] = 0.5 * kp;
                t.matrix[(i, i + 1)] = 0.5 * km;
                t.matrix[(i + 1, i)] = 0.5 * km;
                t.matrix[(i + 1, i + 1)] = 0.5 * kp;
            }
        }
        Ok(t)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Applies `self` first, then `next`.
    pub fn then(&self, next: &SymplecticTransform) -> Result<Self> {
        if self.n_modes() != next.n_modes() {
            return Err(Error::DimensionMismatch { expected: self.n_modes(), found: next.n_modes() });
        }
        Ok(Self {
            matrix: &next.matrix * &self.matrix,
            displacement: &next.matrix * &self.displacement + &next.displacement,
        })
    }

    /// `max |S Ω Sᵀ - Ω|`.
    pub fn symplectic_deviation(&self) -> f64 {
        let omega = symplectic_form(self.n_modes());
        let lhs = &self.matrix * &omega * self.matrix.transpose();
        (lhs - omega).amax()
    }
}
