//! Grover search on registers of `d`-level qudits.
//!
//! The oracle and the diffusion are both generalized Householder reflections
//! `M(chi, phi) = 1 + (e^{i phi} - 1)|chi><chi|`, so one search step costs two
//! `O(N)` passes over the state vector. The diffusion axis is `F^{(x)n}|0>` for
//! any single-qudit unitary `F` whose first column has equal moduli; the
//! [`multipod`] module shows that such an `F` is produced by a single resonant
//! pulse on a multipod linkage.
//!
//! ```
//! use qudit_search::{engine, schedule, state::QuditShape};
//!
//! let shape = QuditShape::new(3, 5).unwrap();
//! let schedule = schedule::deterministic_schedule(shape.size()).unwrap();
//! let cfg = engine::ExperimentConfig::new(shape, shape.index(42).unwrap(), schedule).unwrap();
//! let trajectory = engine::run_search(&cfg).unwrap();
//! assert!(trajectory.final_population() > 0.999);
//! ```

// Negated comparisons are used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod fgate;
pub mod multipod;
pub mod ode;
pub mod reflections;
pub mod schedule;
pub mod state;

pub use error::{Error, Result};
