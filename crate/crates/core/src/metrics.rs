//! GKP lattices, stabilizer displacements and effective squeezing.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lcg::{kappa, GaussianMixtureState};

/// Fault-tolerance threshold on the symmetric effective squeezing, in dB.
pub const FAULT_TOLERANCE_THRESHOLD_DB: f64 = 9.75;

const UNPHYSICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    LogicalSquare,
    Qunaught,
    HexLogical,
    HexQunaught,
}

impl Lattice {
    pub const ALL: [Lattice; 4] =
        [Lattice::LogicalSquare, Lattice::Qunaught, Lattice::HexLogical, Lattice::HexQunaught];

    pub fn is_hex(self) -> bool {
        matches!(self, Lattice::HexLogical | Lattice::HexQunaught)
    }

    pub fn is_qunaught(self) -> bool {
        matches!(self, Lattice::Qunaught | Lattice::HexQunaught)
    }

    /// Peak-position unit `μ_T` of the square lattice before any hex squeeze:
    /// peaks of a bred grid sit at integer multiples of it.
    pub fn half_spacing(self, hbar: f64) -> f64 {
        let pi = std::f64::consts::PI;
        if self.is_qunaught() {
            (pi * hbar / 2.0).sqrt()
        } else {
            (pi * hbar).sqrt()
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Lattice::LogicalSquare => "logical-square",
            Lattice::Qunaught => "qunaught",
            Lattice::HexLogical => "hex-logical",
            Lattice::HexQunaught => "hex-qunaught",
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lattice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "logical-square" | "logical" | "square" => Ok(Lattice::LogicalSquare),
            "qunaught" => Ok(Lattice::Qunaught),
            "hex-logical" => Ok(Lattice::HexLogical),
            "hex-qunaught" => Ok(Lattice::HexQunaught),
            other => Err(Error::InvalidParameter(format!("unknown lattice '{other}'"))),
        }
    }
}

/// The stabilizer displacement pair of a lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    pub lattice: Lattice,
    /// Displacement along `x`; probes the peak structure in `p`.
    pub alpha_stab: Complex64,
    /// Displacement along `p`; probes the peak structure in `x`.
    pub beta_stab: Complex64,
}

impl LatticeSpec {
    pub fn new(lattice: Lattice) -> Self {
        let (alpha_stab, beta_stab) = stabilizer_displacements(lattice);
        Self { lattice, alpha_stab, beta_stab }
    }
}

/// Stabilizer displacements `(α, β)` in units where `D(α)` shifts `x` by
/// `√(2ħ) Re α`.
pub fn stabilizer_displacements(lattice: Lattice) -> (Complex64, Complex64) {
    let pi = std::f64::consts::PI;
    let (kp, km) = kappa();
    match lattice {
        Lattice::LogicalSquare => (Complex64::new((2.0 * pi).sqrt(), 0.0), Complex64::new(0.0, (2.0 * pi).sqrt())),
        Lattice::Qunaught => (Complex64::new(pi.sqrt(), 0.0), Complex64::new(0.0, pi.sqrt())),
        Lattice::HexLogical => {
            let c = (pi / 2.0).sqrt();
            (Complex64::new(c * kp, c * km), Complex64::new(c * km, c * kp))
        }
        Lattice::HexQunaught => {
            let c = pi.sqrt() / 2.0;
            (Complex64::new(c * kp, c * km), Complex64::new(c * km, c * kp))
        }
    }
}

/// `Δ = √(-2 ln|χ(β)| / |β|²)` on a normalized state.
pub fn effective_squeezing(state: &GaussianMixtureState, beta: Complex64) -> Result<f64> {
    let b2 = beta.norm_sqr();
    if !(b2 > 0.0) || !b2.is_finite() {
        return Err(Error::InvalidParameter(format!("stabilizer displacement must be non-zero, got {beta}")));
    }
    let log_abs = state.log_characteristic(&[beta])?.re;
    delta_from_log_abs(log_abs, b2)
}

pub(crate) fn delta_from_log_abs(log_abs: f64, beta_sq: f64) -> Result<f64> {
    if log_abs == f64::NEG_INFINITY || log_abs.is_nan() {
        return Err(Error::UnphysicalExpectation(0.0));
    }
    if log_abs > UNPHYSICAL_TOL {
        return Err(Error::UnphysicalExpectation(log_abs.exp()));
    }
    Ok((-2.0 * log_abs.min(0.0) / beta_sq).sqrt())
}

/// `-10 log10(Δ²)`: positive for Δ < 1.
pub fn to_db(delta: f64) -> f64 {
    -10.0 * (delta * delta).log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(-db / 20.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricBundle {
    pub delta_x: f64,
    pub delta_p: f64,
    pub delta_sym: f64,
    pub db_x: f64,
    pub db_p: f64,
    pub db_sym: f64,
}

impl MetricBundle {
    pub fn from_linear(delta_x: f64, delta_p: f64) -> Self {
        let delta_sym = ((delta_x * delta_x + delta_p * delta_p) / 2.0).sqrt();
        Self { delta_x, delta_p, delta_sym, db_x: to_db(delta_x), db_p: to_db(delta_p), db_sym: to_db(delta_sym) }
    }

    pub fn is_fault_tolerant(&self, threshold_db: f64) -> bool {
        self.db_sym >= threshold_db
    }
}

/// Δx from the `p`-displacement stabilizer, Δp from the `x`-displacement one.
pub fn metric_bundle(state: &GaussianMixtureState, lattice: Lattice) -> Result<MetricBundle> {
    let spec = LatticeSpec::new(lattice);
    let dx = effective_squeezing(state, spec.beta_stab)?;
    let dp = effective_squeezing(state, spec.alpha_stab)?;
    Ok(MetricBundle::from_linear(dx, dp))
}

/// True iff the sampled Δp is at least as good as the reference (boundary
/// inclusive).
pub fn success_indicator(sample: &MetricBundle, reference: &MetricBundle) -> bool {
    sample.delta_p <= reference.delta_p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcg::{Gate, SymplecticTransform};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn squeezed_vacuum(r: f64, hbar: f64) -> GaussianMixtureState {
        GaussianMixtureState::vacuum(1, hbar)
            .unwrap()
            .apply_symplectic(&SymplecticTransform::from_gate(Gate::Squeeze { mode: 0, z: r.exp() }, 1).unwrap())
            .unwrap()
    }

    #[test]
    fn table_values() {
        let (a, b) = stabilizer_displacements(Lattice::Qunaught);
        assert_eq!(a, Complex64::new(PI.sqrt(), 0.0));
        assert_eq!(b, Complex64::new(0.0, PI.sqrt()));
        let (a, b) = stabilizer_displacements(Lattice::LogicalSquare);
        assert!((a.re - (2.0 * PI).sqrt()).abs() < 1e-15 && a.im == 0.0);
        assert!((b.im - (2.0 * PI).sqrt()).abs() < 1e-15 && b.re == 0.0);
        let (a, b) = stabilizer_displacements(Lattice::HexQunaught);
        let q = 3f64.powf(0.25);
        assert!((a.re - PI.sqrt() / 2.0 * (1.0 / q + q)).abs() < 1e-15);
        assert!((a.im - PI.sqrt() / 2.0 * (1.0 / q - q)).abs() < 1e-15);
        assert!((b.re - a.im).abs() < 1e-15 && (b.im - a.re).abs() < 1e-15);
    }

    #[test]
    fn stabilizer_area() {
        // Im(α* β) is the commutation phase: 2π logical, π qunaught
        for l in Lattice::ALL {
            let (a, b) = stabilizer_displacements(l);
            let area = (a.conj() * b).im;
            let want = if l.is_qunaught() { PI } else { 2.0 * PI };
            assert!((area - want).abs() < 1e-12, "{l}: {area}");
        }
    }

    #[test]
    fn hex_stabilizers_are_squeezed_square_ones() {
        let t = SymplecticTransform::from_gate(Gate::HexSqueeze { mode: 0 }, 1).unwrap();
        for (sq, hex) in [(Lattice::Qunaught, Lattice::HexQunaught), (Lattice::LogicalSquare, Lattice::HexLogical)] {
            let (a, b) = stabilizer_displacements(sq);
            let (ha, hb) = stabilizer_displacements(hex);
            for (s, h) in [(a, ha), (b, hb)] {
                let v = t.matrix() * nalgebra::DVector::from_vec(vec![s.re, s.im]);
                assert!((v[0] - h.re).abs() < 1e-14 && (v[1] - h.im).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn vacuum_is_zero_db_for_every_stabilizer() {
        for hbar in [1.0, 2.0] {
            let v = GaussianMixtureState::vacuum(1, hbar).unwrap();
            for l in Lattice::ALL {
                let m = metric_bundle(&v, l).unwrap();
                assert!((m.delta_x - 1.0).abs() < 1e-12);
                assert!((m.delta_p - 1.0).abs() < 1e-12);
                assert!(m.db_sym.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn squeezed_vacuum_delta_x_is_e_minus_r() {
        for hbar in [1.0, 2.0, 3.0] {
            for r in [0.1, 0.5, 1.3816] {
                let s = squeezed_vacuum(r, hbar);
                let dx = effective_squeezing(&s, Complex64::new(0.0, PI.sqrt())).unwrap();
                assert!((dx - (-r).exp()).abs() < 1e-10);
                let dp = effective_squeezing(&s, Complex64::new(PI.sqrt(), 0.0)).unwrap();
                assert!((dp - r.exp()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn lattice_parsing_round_trips() {
        for l in Lattice::ALL {
            assert_eq!(l.to_string().parse::<Lattice>().unwrap(), l);
        }
        assert_eq!("hex_qunaught".parse::<Lattice>().unwrap(), Lattice::HexQunaught);
        assert!("triangle".parse::<Lattice>().is_err());
    }

    #[test]
    fn success_is_boundary_inclusive() {
        let a = MetricBundle::from_linear(0.3, 0.4);
        assert!(success_indicator(&a, &a));
        let worse = MetricBundle::from_linear(0.3, from_db(-3.53));
        let reference = MetricBundle::from_linear(0.3, from_db(7.37));
        let better = MetricBundle::from_linear(0.3, from_db(8.70));
        assert!(!success_indicator(&worse, &reference));
        assert!(success_indicator(&better, &reference));
    }

    #[test]
    fn symmetric_combination() {
        let m = MetricBundle::from_linear(0.25, 0.25);
        assert!((m.db_sym - m.db_x).abs() < 1e-12);
        let m = MetricBundle::from_linear(0.2, 0.5);
        assert!((m.delta_sym.powi(2) - (0.04 + 0.25) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn unphysical_expectation_is_rejected() {
        assert!(delta_from_log_abs(1e-6, 1.0).is_err());
        assert!(delta_from_log_abs(f64::NEG_INFINITY, 1.0).is_err());
        assert_eq!(delta_from_log_abs(1e-14, 1.0).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn db_round_trip(d in 1e-4f64..10.0) {
            prop_assert!((from_db(to_db(d)) - d).abs() <= 1e-12 * d.max(1.0));
        }

        #[test]
        fn displacement_invariance(dx in -5.0f64..5.0, dp in -5.0f64..5.0, r in 0.0f64..1.5) {
            let s = squeezed_vacuum(r, 2.0);
            let d = s.apply_symplectic(&SymplecticTransform::from_gate(Gate::Displacement { mode: 0, dx, dp }, 1).unwrap()).unwrap();
            for l in Lattice::ALL {
                let a = metric_bundle(&s, l).unwrap();
                let b = metric_bundle(&d, l).unwrap();
                prop_assert!((a.delta_x - b.delta_x).abs() < 1e-10);
                prop_assert!((a.delta_p - b.delta_p).abs() < 1e-10);
            }
        }
    }
}
