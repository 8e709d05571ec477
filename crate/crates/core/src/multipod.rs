//! Pulse-level model of a qudit in a multipod linkage: `d` degenerate levels
//! coupled to a common ancilla `|c>` by simultaneous pulses.
//!
//! The Hamiltonian (RWA, hbar = 1, ancilla last in the basis) is
//!
//! ```text
//! H(t) = (Omega f(t) / 2) sum_k (w_k |k><c| + h.c.) + Delta |c><c|
//! ```
//!
//! with `w` the unit coupling vector and `Omega` chosen so that the RMS pulse
//! area `Omega * int f dt` equals the requested area. For an area of
//! `2(2l+1) pi` the qudit block of the propagator is the reflection
//! `M(w, phi)`; for a sech pulse `phi = pi - 2 arctan(Delta T)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fgate::{coupling_design, householder_f, FGate};
use crate::ode::{self, Tolerances};
use crate::reflections::unitarity_defect;

/// Ancilla population amplitude above which a propagator is not a qudit reflection.
pub const LEAKAGE_THRESHOLD: f64 = 1e-4;

/// Smallest integration half-window, in units of the pulse width.
pub const MIN_WINDOW: f64 = 20.0;

/// Accepted distance (radians) between a sech area and the nearest `2(2l+1) pi`.
pub const AREA_TOLERANCE: f64 = 1e-2;

/// Maximum deviation accepted by [`verify_f_pulse`].
pub const F_PULSE_TOLERANCE: f64 = 1e-5;

/// Residual below which [`pulse_check`] reports a pass.
pub const RESIDUAL_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    /// `sech(t/T)`
    Sech,
    /// `exp(-t^2/T^2)`
    Gaussian,
}

impl PulseShape {
    fn envelope(self, x: f64) -> f64 {
        match self {
            PulseShape::Sech => 1.0 / x.cosh(),
            PulseShape::Gaussian => (-x * x).exp(),
        }
    }

    /// `int f(t) dt` over the real line for unit width.
    fn unit_integral(self) -> f64 {
        match self {
            PulseShape::Sech => PI,
            PulseShape::Gaussian => PI.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseJob {
    couplings: Vec<Complex64>,
    detuning: f64,
    width: f64,
    shape: PulseShape,
    area: f64,
    window: f64,
}

impl PulseJob {
    /// Only the direction of `couplings` matters; the RMS Rabi frequency is set by `area`.
    pub fn new(couplings: Vec<Complex64>, detuning: f64, width: f64, shape: PulseShape, area: f64) -> Result<Self> {
        if couplings.len() < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 qudit levels, got {}", couplings.len())));
        }
        if couplings.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("couplings must be finite".into()));
        }
        if couplings.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidParameter("all couplings are zero".into()));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!("pulse width must be positive, got {width}")));
        }
        if !detuning.is_finite() || !area.is_finite() {
            return Err(Error::InvalidParameter("detuning and area must be finite".into()));
        }
        Ok(Self { couplings, detuning, width, shape, area, window: MIN_WINDOW })
    }

    /// Resonant `F` pulse: the coupling design of `d`, sech shape, unit width.
    pub fn f_pulse(d: usize, detuning_t: f64, area: f64) -> Result<Self> {
        Self::new(coupling_design(d)?.as_complex(), detuning_t, 1.0, PulseShape::Sech, area)
    }

    /// Integrates over `[-window T, window T]`; `window` must be at least [`MIN_WINDOW`].
    pub fn with_window(mut self, window: f64) -> Result<Self> {
        if !(window >= MIN_WINDOW) {
            return Err(Error::InvalidParameter(format!("window {window} shorter than {MIN_WINDOW} pulse widths")));
        }
        self.window = window;
        Ok(self)
    }

    pub fn levels(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[Complex64] {
        &self.couplings
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn shape(&self) -> PulseShape {
        self.shape
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Peak RMS Rabi frequency `A / int f dt`.
    pub fn peak_rabi(&self) -> f64 {
        self.area / (self.shape.unit_integral() * self.width)
    }
}

/// `(d+1) x (d+1)` propagator, qudit levels first and the ancilla last.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    matrix: DMatrix<Complex64>,
}

impl Propagator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn levels(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn qudit_block(&self) -> DMatrix<Complex64> {
        let d = self.levels();
        self.matrix.view((0, 0), (d, d)).into_owned()
    }

    /// Largest ancilla amplitude reached from any qudit level.
    pub fn leakage(&self) -> f64 {
        let d = self.levels();
        (0..d).map(|k| self.matrix[(d, k)].norm()).fold(0.0, f64::max)
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

/// Bright/dark decomposition of the qudit levels for a set of couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct MorrisShoreBasis {
    /// `sum_k Omega_k |k> / Omega`, the only qudit state `H` couples to `|c>`.
    pub bright: Vec<Complex64>,
    pub dark: Vec<Vec<Complex64>>,
    pub rms_rabi: f64,
}

/// Splits the qudit space into the bright state and an orthonormal dark complement.
pub fn morris_shore(couplings: &[Complex64]) -> Result<MorrisShoreBasis> {
    let d = couplings.len();
    let rms_rabi = couplings.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if d == 0 || rms_rabi == 0.0 || !rms_rabi.is_finite() {
        return Err(Error::InvalidParameter("couplings must contain a finite nonzero entry".into()));
    }
    let bright: Vec<Complex64> = couplings.iter().map(|c| c / rms_rabi).collect();

    // A Householder reflection taking e_0 to bright (up to the phase of bright_0)
    // has the dark states as its remaining columns.
    let phase = if bright[0].norm() > 0.0 { bright[0] / bright[0].norm() } else { Complex64::new(1.0, 0.0) };
    let rotated: Vec<Complex64> = bright.iter().map(|b| b / phase).collect();
    let mut w = DVector::from_iterator(d, rotated.iter().map(|b| -b));
    w[0] += 1.0;
    let w_norm_sqr: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let reflector = if w_norm_sqr < 1e-30 {
        DMatrix::identity(d, d)
    } else {
        DMatrix::identity(d, d) - (&w * w.adjoint()) * Complex64::new(2.0 / w_norm_sqr, 0.0)
    };
    let dark = (1..d).map(|col| reflector.column(col).iter().copied().collect()).collect();
    Ok(MorrisShoreBasis { bright, dark, rms_rabi })
}

/// Integrates the multipod Schrödinger equation for every basis state.
pub fn propagate(job: &PulseJob) -> Result<Propagator> {
    propagate_with(job, Tolerances::default())
}

pub fn propagate_with(job: &PulseJob, tol: Tolerances) -> Result<Propagator> {
    let d = job.levels();
    let basis = morris_shore(&job.couplings)?;
    let unit = basis.bright;
    let half_rabi = 0.5 * job.peak_rabi();
    let width = job.width;
    let shape = job.shape;
    let detuning = job.detuning;
    let minus_i = Complex64::new(0.0, -1.0);

    let rhs = |t: f64, y: &[Complex64], out: &mut [Complex64]| {
        let g = half_rabi * shape.envelope(t / width);
        let ancilla = y[d];
        let mut to_ancilla = Complex64::new(0.0, 0.0);
        for k in 0..d {
            out[k] = minus_i * (unit[k] * g * ancilla);
            to_ancilla += unit[k].conj() * y[k];
        }
        out[d] = minus_i * (to_ancilla * g + ancilla * detuning);
    };

    let t_end = job.window * width;
    let mut matrix = DMatrix::zeros(d + 1, d + 1);
    let mut y = vec![Complex64::new(0.0, 0.0); d + 1];
    for col in 0..=d {
        y.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        y[col] = Complex64::new(1.0, 0.0);
        ode::integrate(rhs, -t_end, t_end, &mut y, tol)?;
        for (row, value) in y.iter().enumerate() {
            matrix[(row, col)] = *value;
        }
    }
    Ok(Propagator { matrix })
}

/// Fit of a qudit block to `e^{i gamma} M(chi, phi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionFit {
    pub axis: Vec<Complex64>,
    /// In `(-pi, pi]`.
    pub phase: f64,
    pub global_phase: f64,
    /// Max entrywise deviation of the block from the fitted operator.
    pub residual: f64,
    pub leakage: f64,
}

/// Wraps an angle into `(-pi, pi]`; values within `1e-9` of `-pi` map to `pi`.
pub fn wrap_phase(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a <= -PI + 1e-9 {
        a += 2.0 * PI;
    }
    a
}

/// Reads the reflection phase off a propagator with axis given by `couplings`.
///
/// The global phase is the mean phase of the dark-state diagonal elements.
/// Areas that are even multiples of `2 pi` return the identity and fit as
/// `phi ~ 0`; callers that need a genuine reflection should check the area
/// (see [`pulse_check`]).
pub fn extract_reflection(u: &Propagator, couplings: &[Complex64]) -> Result<ReflectionFit> {
    let d = u.levels();
    if couplings.len() != d {
        return Err(Error::ShapeMismatch(format!("{} couplings for a {d}-level propagator", couplings.len())));
    }
    let leakage = u.leakage();
    if !(leakage < LEAKAGE_THRESHOLD) {
        return Err(Error::Leakage { leakage, threshold: LEAKAGE_THRESHOLD });
    }
    let basis = morris_shore(couplings)?;
    let block = u.qudit_block();
    let expectation = |v: &[Complex64]| {
        let v = DVector::from_column_slice(v);
        (v.adjoint() * &block * &v)[(0, 0)]
    };
    let dark_sum: Complex64 = basis.dark.iter().map(|v| expectation(v)).sum();
    let global = Complex64::from_polar(1.0, dark_sum.arg());
    let bright = expectation(&basis.bright);
    let phase = wrap_phase((bright / global).arg());

    let chi = DVector::from_column_slice(&basis.bright);
    let fitted = (DMatrix::identity(d, d) + (&chi * chi.adjoint()) * (Complex64::from_polar(1.0, phase) - 1.0)) * global;
    let residual = (&block - fitted).iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(ReflectionFit { axis: basis.bright, phase, global_phase: global.arg(), residual, leakage })
}

/// Reflection phase of a sech pulse with RMS area `2 pi`: `pi - 2 arctan(Delta T)`.
pub fn analytic_sech_phase(detuning_t: f64) -> f64 {
    PI - 2.0 * detuning_t.atan()
}

/// Nearest area of the form `2(2l+1) pi`, `l >= 0`.
pub fn nearest_reflection_area(area: f64) -> f64 {
    let l = ((area / (2.0 * PI) - 1.0) / 2.0).round().max(0.0);
    2.0 * (2.0 * l + 1.0) * PI
}

/// Summary of one pulse simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseReport {
    pub d: usize,
    pub detuning_t: f64,
    pub area: f64,
    pub shape: PulseShape,
    pub phase: f64,
    /// Closed-form phase wrapped like `phase`, sech pulses only.
    pub analytic_phase: Option<f64>,
    pub residual: f64,
    pub leakage: f64,
    pub unitarity_defect: f64,
    pub pass: bool,
}

/// Propagates `job`, fits the reflection and compares with the sech phase law.
///
/// Sech areas more than [`AREA_TOLERANCE`] away from `2(2l+1) pi` are refused.
/// Gaussian areas are not constrained; they are judged by leakage alone.
pub fn pulse_check(job: &PulseJob) -> Result<PulseReport> {
    if job.shape == PulseShape::Sech {
        let nearest = nearest_reflection_area(job.area);
        if (job.area - nearest).abs() > AREA_TOLERANCE {
            return Err(Error::AreaContract { area: job.area, nearest });
        }
    }
    let u = propagate(job)?;
    let fit = extract_reflection(&u, &job.couplings)?;
    let detuning_t = job.detuning * job.width;
    Ok(PulseReport {
        d: job.levels(),
        detuning_t,
        area: job.area,
        shape: job.shape,
        phase: fit.phase,
        analytic_phase: (job.shape == PulseShape::Sech).then(|| wrap_phase(analytic_sech_phase(detuning_t))),
        residual: fit.residual,
        leakage: fit.leakage,
        unitarity_defect: u.unitarity_defect(),
        pass: fit.residual < RESIDUAL_TOLERANCE,
    })
}

/// Result of synthesizing `F` with a single resonant pulse.
#[derive(Clone, Debug)]
pub struct FPulseReport {
    pub d: usize,
    /// Max entrywise deviation from `householder_f(d)` after removing the global phase.
    pub deviation: f64,
    pub phase: f64,
    pub leakage: f64,
    /// The pulse-derived qudit gate with its global phase removed.
    pub gate: FGate,
    pub pass: bool,
}

/// Runs the resonant `2 pi` sech pulse with the coupling design of `d` and
/// compares the resulting qudit gate with the Householder `F`.
pub fn verify_f_pulse(d: usize) -> Result<FPulseReport> {
    let job = PulseJob::f_pulse(d, 0.0, 2.0 * PI)?;
    let u = propagate(&job)?;
    let fit = extract_reflection(&u, job.couplings())?;
    let target = householder_f(d)?;
    let block = u.qudit_block();
    let overlap: Complex64 = target.matrix().iter().zip(block.iter()).map(|(t, b)| t.conj() * b).sum();
    let block = block * Complex64::from_polar(1.0, -overlap.arg());
    let deviation = (&block - target.matrix()).iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(FPulseReport {
        d,
        deviation,
        phase: fit.phase,
        leakage: fit.leakage,
        gate: FGate::custom(block)?,
        pass: deviation < F_PULSE_TOLERANCE,
    })
}
