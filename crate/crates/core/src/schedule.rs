//! Phase and step-count schedules for the Grover iteration.

use std::f64::consts::PI;
use std::fmt;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    Deterministic,
    CanonicalPi,
    Custom,
}

impl fmt::Display for ScheduleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleMode::Deterministic => "deterministic",
            ScheduleMode::CanonicalPi => "pi",
            ScheduleMode::Custom => "custom",
        })
    }
}

/// Iteration parameters. The same `phi` is used for the oracle and the diffusion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSchedule {
    /// Database size.
    pub n_items: usize,
    /// `arcsin(N^{-1/2})`
    pub beta: f64,
    /// `floor(pi/(4 beta) + 1/2)`
    pub j: usize,
    pub phi: f64,
    pub steps: usize,
    pub mode: ScheduleMode,
}

impl SearchSchedule {
    /// `phi` wrapped into `(-pi, pi]` for display.
    pub fn display_phi(&self) -> f64 {
        crate::multipod::wrap_phase(self.phi)
    }

    /// Same schedule with a different number of recorded steps.
    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }
}

fn check_size(n_items: usize) -> Result<()> {
    if n_items < 2 {
        return Err(Error::InvalidParameter(format!("database size N = {n_items}, need N >= 2")));
    }
    Ok(())
}

pub fn beta(n_items: usize) -> f64 {
    (1.0 / (n_items as f64).sqrt()).asin()
}

// floor(pi/(4 beta) + 1/2). A value within a few ulps of an integer is taken to
// be that integer (N = 4 lands exactly on 2 in exact arithmetic).
fn phase_matching_index(beta: f64) -> usize {
    let x = PI / (4.0 * beta) + 0.5;
    let nearest = x.round();
    let floor = if (x - nearest).abs() <= 4.0 * f64::EPSILON * x {
        if x != nearest {
            debug!("floor({x:e}) snapped to {nearest}");
        }
        nearest
    } else {
        let below = x.floor();
        if (x * (1.0 - f64::EPSILON)).floor() != below || (x * (1.0 + f64::EPSILON)).floor() != below {
            warn!("floor({x:e}) changes under a 1 ulp perturbation");
        }
        below
    };
    floor as usize
}

/// Oracle/diffusion phase that makes `steps` iterations land exactly on the
/// marked state: `2 arcsin(sin(pi/(4 steps + 2)) / sin beta)`.
pub fn deterministic_phase(beta: f64, steps: usize) -> f64 {
    let ratio = (PI / (4.0 * steps as f64 + 2.0)).sin() / beta.sin();
    2.0 * ratio.min(1.0).asin()
}

/// Phase-matched schedule with unit final population.
///
/// `j = floor(pi/(4 beta) + 1/2)`; the step count is `j` when `(2j+1) beta` is
/// at least as close to `pi/2` as `(2j-1) beta`, and `j + 1` otherwise. The
/// phase is evaluated for the chosen step count, so the final population is 1
/// in both cases.
pub fn deterministic_schedule(n_items: usize) -> Result<SearchSchedule> {
    check_size(n_items)?;
    let beta = beta(n_items);
    let j = phase_matching_index(beta);
    let jf = j as f64;
    let above = ((2.0 * jf + 1.0) * beta - PI / 2.0).abs();
    let below = ((2.0 * jf - 1.0) * beta - PI / 2.0).abs();
    let steps = if above <= below { j } else { j + 1 };
    Ok(SearchSchedule {
        n_items,
        beta,
        j,
        phi: deterministic_phase(beta, steps),
        steps,
        mode: ScheduleMode::Deterministic,
    })
}

/// Grover's original schedule: `phi = pi`, `round(pi/4 sqrt N)` steps (at least 1).
pub fn canonical_schedule(n_items: usize) -> Result<SearchSchedule> {
    check_size(n_items)?;
    let beta = beta(n_items);
    let steps = ((PI / 4.0) * (n_items as f64).sqrt()).round().max(1.0) as usize;
    Ok(SearchSchedule { n_items, beta, j: phase_matching_index(beta), phi: PI, steps, mode: ScheduleMode::CanonicalPi })
}

/// User-supplied phase and step count.
pub fn custom_schedule(n_items: usize, phi: f64, steps: usize) -> Result<SearchSchedule> {
    check_size(n_items)?;
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("phase {phi} is not finite")));
    }
    let beta = beta(n_items);
    Ok(SearchSchedule { n_items, beta, j: phase_matching_index(beta), phi, steps, mode: ScheduleMode::Custom })
}

/// Marked-state population after `k` phase-matched iterations from the equal
/// superposition, computed in the two-dimensional invariant subspace.
pub fn predicted_population(n_items: usize, k: usize, phi: f64) -> f64 {
    let beta = beta(n_items.max(1));
    if phi == PI {
        return ((2.0 * k as f64 + 1.0) * beta).sin().powi(2);
    }
    two_state_trajectory(n_items, k, phi)[k]
}

/// Populations after `0..=k` iterations of the restricted 2x2 Grover operator.
///
/// Basis `{|m>, |m_perp>}` with `|s> = (sin beta, cos beta)`.
pub fn two_state_trajectory(n_items: usize, k: usize, phi: f64) -> Vec<f64> {
    use num_complex::Complex64;
    let beta = beta(n_items.max(1));
    let (sb, cb) = beta.sin_cos();
    let factor = Complex64::from_polar(1.0, phi) - 1.0;
    let mut m = Complex64::new(sb, 0.0);
    let mut perp = Complex64::new(cb, 0.0);
    let mut out = Vec::with_capacity(k + 1);
    out.push(m.norm_sqr());
    for _ in 0..k {
        m *= 1.0 + factor;
        let overlap = m * sb + perp * cb;
        m += factor * overlap * sb;
        perp += factor * overlap * cb;
        out.push(m.norm_sqr());
    }
    out
}
