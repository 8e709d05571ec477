//! Generalized Hadamard gates: any `d x d` unitary whose first column has
//! entries of equal modulus `d^{-1/2}`.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reflections::{apply_to_all, unitarity_defect, LocalGate};
use crate::state::{QuditShape, StateVector};

/// Pass threshold of [`validate_f`] for both reported defects.
pub const VALIDATION_THRESHOLD: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FKind {
    Householder,
    Dft,
    RandomPhase { seed: u64 },
    Custom,
}

impl fmt::Display for FKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FKind::Householder => f.write_str("householder"),
            FKind::Dft => f.write_str("dft"),
            FKind::RandomPhase { seed } => write!(f, "random:{seed}"),
            FKind::Custom => f.write_str("custom"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FGate {
    gate: LocalGate,
    kind: FKind,
}

impl FGate {
    /// Wraps an arbitrary unitary. The equal-moduli contract is not enforced
    /// here; use [`validate_f`] to check it.
    pub fn custom(matrix: DMatrix<Complex64>) -> Result<Self> {
        Ok(Self { gate: LocalGate::new(matrix)?, kind: FKind::Custom })
    }

    pub fn kind(&self) -> FKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.gate.dim()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        self.gate.matrix()
    }

    pub fn gate(&self) -> &LocalGate {
        &self.gate
    }

    /// `F^{(x)n}|0...0>` for a register of matching `d`.
    pub fn register_state(&self, shape: QuditShape) -> Result<StateVector> {
        let mut s = StateVector::zero(shape);
        apply_to_all(&mut s, &self.gate)?;
        Ok(s)
    }

    pub fn validate(&self) -> FReport {
        report(self.matrix())
    }
}

/// Unit-RMS coupling amplitudes of a multipod that realizes `F` as a single reflection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingDesign {
    pub omegas: Vec<f64>,
}

impl CouplingDesign {
    pub fn as_complex(&self) -> Vec<Complex64> {
        self.omegas.iter().map(|&w| Complex64::new(w, 0.0)).collect()
    }
}

fn check_levels(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d = {d}, need d >= 2")));
    }
    Ok(())
}

/// `Omega_0 = sqrt((1 - 1/sqrt d)/2)`, `Omega_k = sqrt(1/(2(d - sqrt d)))` for `k > 0`.
pub fn coupling_design(d: usize) -> Result<CouplingDesign> {
    check_levels(d)?;
    let df = d as f64;
    let root = df.sqrt();
    let first = (0.5 * (1.0 - 1.0 / root)).sqrt();
    let rest = (1.0 / (2.0 * (df - root))).sqrt();
    let mut omegas = vec![rest; d];
    omegas[0] = first;
    Ok(CouplingDesign { omegas })
}

/// `F = 1 - 2|xi><xi|` with `xi` the coupling design. Real symmetric and an involution.
pub fn householder_f(d: usize) -> Result<FGate> {
    let xi = DVector::from_vec(coupling_design(d)?.as_complex());
    let matrix = DMatrix::identity(d, d) - (&xi * xi.adjoint()) * Complex64::new(2.0, 0.0);
    Ok(FGate { gate: LocalGate::new(matrix)?, kind: FKind::Householder })
}

/// Unitary DFT, entries `exp(2 pi i jk/d)/sqrt d`.
pub fn dft(d: usize) -> Result<FGate> {
    check_levels(d)?;
    let scale = 1.0 / (d as f64).sqrt();
    let matrix = DMatrix::from_fn(d, d, |j, k| {
        // Reduce jk mod d before scaling so large d keeps exact roots of unity.
        let angle = 2.0 * PI * ((j * k) % d) as f64 / d as f64;
        Complex64::from_polar(scale, angle)
    });
    Ok(FGate { gate: LocalGate::new(matrix)?, kind: FKind::Dft })
}

/// `D_L F_householder D_R` with diagonal phase matrices drawn from
/// `ChaCha8Rng::seed_from_u64(seed)`: first the `d` left phases, then the `d`
/// right phases, each uniform in `[0, 2 pi)`.
pub fn random_phase_f(d: usize, seed: u64) -> Result<FGate> {
    let base = householder_f(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left: Vec<Complex64> = (0..d).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))).collect();
    let right: Vec<Complex64> = (0..d).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))).collect();
    let matrix = DMatrix::from_fn(d, d, |j, k| left[j] * base.matrix()[(j, k)] * right[k]);
    Ok(FGate { gate: LocalGate::new(matrix)?, kind: FKind::RandomPhase { seed } })
}

/// Outcome of [`validate_f`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FReport {
    pub d: usize,
    /// max entrywise `|F^dagger F - I|`
    pub unitarity_defect: f64,
    /// max `||F_{q0}| - d^{-1/2}|`
    pub column_moduli_deviation: f64,
    pub pass: bool,
}

fn report(matrix: &DMatrix<Complex64>) -> FReport {
    let d = matrix.nrows();
    let target = 1.0 / (d as f64).sqrt();
    let unitarity_defect = unitarity_defect(matrix);
    let column_moduli_deviation = matrix.column(0).iter().map(|x| (x.norm() - target).abs()).fold(0.0, f64::max);
    FReport {
        d,
        unitarity_defect,
        column_moduli_deviation,
        pass: unitarity_defect < VALIDATION_THRESHOLD && column_moduli_deviation < VALIDATION_THRESHOLD,
    }
}

/// Checks that `matrix` is unitary with an equal-moduli first column.
pub fn validate_f(matrix: &DMatrix<Complex64>) -> Result<FReport> {
    if !matrix.is_square() || matrix.nrows() == 0 {
        return Err(Error::InvalidGate(format!("expected a square matrix, got {}x{}", matrix.nrows(), matrix.ncols())));
    }
    Ok(report(matrix))
}
