//! Full Grover searches on the state vector.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fgate::{dft, householder_f, random_phase_f, FGate};
use crate::reflections::{diffusion_via_gates, grover_step, oracle};
use crate::schedule::SearchSchedule;
use crate::state::{BasisIndex, QuditShape, StateVector};

/// Largest register for which [`dense_grover_matrix`] builds the full matrix.
pub const DENSE_LIMIT: usize = 1024;

/// Which generalized Hadamard prepares the register and defines the diffusion axis.
#[derive(Clone, Debug, PartialEq)]
pub enum FChoice {
    Householder,
    Dft,
    RandomPhase(u64),
    Gate(FGate),
}

impl FChoice {
    pub fn build(&self, d: usize) -> Result<FGate> {
        let gate = match self {
            FChoice::Householder => householder_f(d)?,
            FChoice::Dft => dft(d)?,
            FChoice::RandomPhase(seed) => random_phase_f(d, *seed)?,
            FChoice::Gate(g) => g.clone(),
        };
        if gate.dim() != d {
            return Err(Error::ShapeMismatch(format!("{0}x{0} F gate for d = {d}", gate.dim())));
        }
        Ok(gate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffusionPath {
    /// One rank-1 update about the precomputed `F^{(x)n}|0>`.
    Direct,
    /// `F^{(x)n} M(0, phi) (F^dagger)^{(x)n}` with local gates.
    ViaGates,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub shape: QuditShape,
    pub marked: BasisIndex,
    pub schedule: SearchSchedule,
    pub f: FChoice,
    pub diffusion: DiffusionPath,
}

impl ExperimentConfig {
    pub fn new(shape: QuditShape, marked: BasisIndex, schedule: SearchSchedule) -> Result<Self> {
        let cfg = Self { shape, marked, schedule, f: FChoice::Householder, diffusion: DiffusionPath::Direct };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_f(mut self, f: FChoice) -> Self {
        self.f = f;
        self
    }

    pub fn with_diffusion(mut self, diffusion: DiffusionPath) -> Self {
        self.diffusion = diffusion;
        self
    }

    pub fn validate(&self) -> Result<()> {
        crate::state::check_index(self.shape, &self.marked)?;
        if self.schedule.n_items != self.shape.size() {
            return Err(Error::ShapeMismatch(format!(
                "schedule for N = {} used on a register of size {}",
                self.schedule.n_items,
                self.shape.size()
            )));
        }
        Ok(())
    }
}

/// Marked-state population after each Grover step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// Entry `k` is the population after `k` steps; entry 0 is the initial state.
    pub populations: Vec<f64>,
    /// Earliest index of the maximum.
    pub peak_step: usize,
    pub peak_population: f64,
}

impl Trajectory {
    pub fn from_populations(populations: Vec<f64>) -> Self {
        let (peak_step, peak_population) = populations
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, p)| if p > best.1 { (k, p) } else { best });
        Self { populations, peak_step, peak_population }
    }

    pub fn final_population(&self) -> f64 {
        *self.populations.last().expect("trajectory always holds the initial point")
    }
}

/// A prepared search: the initial state and the diffusion ingredients.
pub struct SearchRun {
    cfg: ExperimentConfig,
    f: FGate,
    axis: StateVector,
    state: StateVector,
}

impl SearchRun {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let f = cfg.f.build(cfg.shape.d())?;
        let mut axis = f.register_state(cfg.shape)?;
        // Gates built from pulse integration are unitary only to integrator accuracy.
        axis.normalize()?;
        let state = axis.clone();
        Ok(Self { cfg: cfg.clone(), f, axis, state })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn axis(&self) -> &StateVector {
        &self.axis
    }

    pub fn population(&self) -> f64 {
        self.state.amplitudes()[self.cfg.marked.flat()].norm_sqr()
    }

    pub fn step(&mut self) -> Result<()> {
        let phi = self.cfg.schedule.phi;
        match self.cfg.diffusion {
            DiffusionPath::Direct => grover_step(&mut self.state, &self.cfg.marked, phi, phi, &self.axis),
            DiffusionPath::ViaGates => {
                oracle(&mut self.state, &self.cfg.marked, phi)?;
                diffusion_via_gates(&mut self.state, self.f.gate(), phi)
            }
        }
    }
}

/// Prepares `F^{(x)n}|0>` and records the marked population over `schedule.steps` iterations.
pub fn run_search(cfg: &ExperimentConfig) -> Result<Trajectory> {
    run_extended(cfg, 0)
}

/// As [`run_search`], continuing `extra_steps` past the schedule.
pub fn run_extended(cfg: &ExperimentConfig, extra_steps: usize) -> Result<Trajectory> {
    let total = cfg.schedule.steps + extra_steps;
    let mut run = SearchRun::new(cfg)?;
    let mut populations = Vec::with_capacity(total + 1);
    populations.push(run.population());
    for _ in 0..total {
        run.step()?;
        populations.push(run.population());
    }
    Ok(Trajectory::from_populations(populations))
}

/// The `N x N` Grover operator of `cfg`, one column per basis state.
pub fn dense_grover_matrix(cfg: &ExperimentConfig) -> Result<DMatrix<Complex64>> {
    let size = cfg.shape.size();
    if size > DENSE_LIMIT {
        return Err(Error::TooLarge { size, limit: DENSE_LIMIT });
    }
    let mut run = SearchRun::new(cfg)?;
    let mut matrix = DMatrix::zeros(size, size);
    for col in 0..size {
        run.state = StateVector::basis_state(cfg.shape, &cfg.shape.index(col)?)?;
        run.step()?;
        for (row, a) in run.state.amplitudes().iter().enumerate() {
            matrix[(row, col)] = *a;
        }
    }
    Ok(matrix)
}
