//! Generalized Householder reflections `M(chi, phi) = 1 + (e^{i phi} - 1)|chi><chi|`
//! applied as rank-1 updates, single-qudit gates, and the Grover iteration built
//! from them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{check_index, dot, BasisIndex, StateVector};

/// Unitarity tolerance accepted when constructing a [`LocalGate`].
///
/// Gates synthesized from pulse integration carry integrator error, so this is
/// looser than the `1e-10` pass threshold of [`crate::fgate::validate_f`].
pub const GATE_TOLERANCE: f64 = 1e-8;

/// Axis norm tolerance for [`Reflection`] and [`diffusion_direct`].
pub const AXIS_TOLERANCE: f64 = 1e-10;

/// A reflection about a unit state with an arbitrary phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflection {
    axis: StateVector,
    phase: f64,
}

impl Reflection {
    pub fn new(axis: StateVector, phase: f64) -> Result<Self> {
        check_unit(&axis)?;
        Ok(Self { axis, phase })
    }

    pub fn axis(&self) -> &StateVector {
        &self.axis
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The reflection with the opposite phase, `M(chi, -phi)`.
    pub fn inverse(&self) -> Self {
        Self { axis: self.axis.clone(), phase: -self.phase }
    }
}

/// A `d x d` unitary acting on a single qudit.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalGate {
    matrix: DMatrix<Complex64>,
}

impl LocalGate {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidGate(format!(
                "gate must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = unitarity_defect(&matrix);
        if !(defect <= GATE_TOLERANCE) {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { matrix })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: DMatrix::identity(d, d) }
    }

    /// The qubit Hadamard gate.
    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { matrix: DMatrix::from_row_slice(2, 2, &[h, h, h, -h]) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }
}

/// Largest entrywise deviation of `G^dagger G` from the identity.
pub fn unitarity_defect(matrix: &DMatrix<Complex64>) -> f64 {
    let product = matrix.adjoint() * matrix;
    let deviation = product - DMatrix::<Complex64>::identity(matrix.ncols(), matrix.ncols());
    let worst = deviation.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if deviation.iter().any(|v| v.is_nan()) {
        f64::INFINITY
    } else {
        worst
    }
}

fn check_unit(axis: &StateVector) -> Result<()> {
    let norm = axis.norm();
    if (norm - 1.0).abs() > AXIS_TOLERANCE {
        return Err(Error::InvalidParameter(format!("reflection axis has norm {norm}, expected 1")));
    }
    Ok(())
}

fn rank_one_update(s: &mut StateVector, axis: &StateVector, phase: f64) -> Result<()> {
    s.check_shape(axis)?;
    let factor = Complex64::from_polar(1.0, phase) - 1.0;
    if factor == Complex64::new(0.0, 0.0) {
        return Ok(());
    }
    let coefficient = factor * dot(axis.amplitudes(), s.amplitudes());
    for (a, x) in s.amplitudes_mut().iter_mut().zip(axis.amplitudes()) {
        *a += coefficient * x;
    }
    Ok(())
}

/// `s <- M(chi, phi) s` in `O(N)`.
pub fn apply_reflection(s: &mut StateVector, r: &Reflection) -> Result<()> {
    rank_one_update(s, &r.axis, r.phase)
}

/// Conditional phase on a single basis state, `M(m, phi)`. Touches one amplitude.
pub fn oracle(s: &mut StateVector, marked: &BasisIndex, phase: f64) -> Result<()> {
    check_index(s.shape(), marked)?;
    s.amplitudes_mut()[marked.flat()] *= Complex64::from_polar(1.0, phase);
    Ok(())
}

/// Applies `g` to qudit `k` (0 = most significant) and the identity elsewhere.
pub fn apply_local_gate(s: &mut StateVector, g: &LocalGate, k: usize) -> Result<()> {
    let shape = s.shape();
    if k >= shape.n() {
        return Err(Error::PositionOutOfRange { position: k, n: shape.n() });
    }
    let d = shape.d();
    if g.dim() != d {
        return Err(Error::ShapeMismatch(format!("{}x{} gate on a d = {d} qudit", g.dim(), g.dim())));
    }
    let stride = shape.stride(k);
    let block = stride * d;
    let m = g.matrix();
    let amplitudes = s.amplitudes_mut();
    let mut scratch = vec![Complex64::new(0.0, 0.0); d];
    for base in (0..amplitudes.len()).step_by(block) {
        for offset in base..base + stride {
            for (q, slot) in scratch.iter_mut().enumerate() {
                *slot = amplitudes[offset + q * stride];
            }
            for row in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, x) in scratch.iter().enumerate() {
                    acc += m[(row, col)] * x;
                }
                amplitudes[offset + row * stride] = acc;
            }
        }
    }
    Ok(())
}

/// Applies `g` to every qudit of the register.
pub fn apply_to_all(s: &mut StateVector, g: &LocalGate) -> Result<()> {
    for k in 0..s.shape().n() {
        apply_local_gate(s, g, k)?;
    }
    Ok(())
}

/// Diffusion as the gate sandwich `F^{(x)n} M(0, phi) (F^dagger)^{(x)n}`.
pub fn diffusion_via_gates(s: &mut StateVector, f: &LocalGate, phase: f64) -> Result<()> {
    let defect = unitarity_defect(f.matrix());
    if !(defect <= GATE_TOLERANCE) {
        return Err(Error::NotUnitary { defect });
    }
    let zero = s.shape().index(0)?;
    apply_to_all(s, &f.adjoint())?;
    oracle(s, &zero, phase)?;
    apply_to_all(s, f)
}

/// Diffusion as a single rank-1 update about a precomputed `F^{(x)n}|0>`.
pub fn diffusion_direct(s: &mut StateVector, axis: &StateVector, phase: f64) -> Result<()> {
    check_unit(axis)?;
    rank_one_update(s, axis, phase)
}

/// One Grover iteration `G = M(aver, phi_a) M(m, phi_m)`: oracle first, then diffusion.
pub fn grover_step(
    s: &mut StateVector,
    marked: &BasisIndex,
    phase_marked: f64,
    phase_aver: f64,
    axis: &StateVector,
) -> Result<()> {
    s.check_shape(axis)?;
    oracle(s, marked, phase_marked)?;
    diffusion_direct(s, axis, phase_aver)
}
