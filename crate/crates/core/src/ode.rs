//! Adaptive Dormand-Prince 5(4) integrator for complex linear systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, max_steps: 2_000_000 }
    }
}

/// Integration statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrates `y' = rhs(t, y)` from `t0` to `t1`, overwriting `y`.
///
/// `rhs(t, y, out)` must write the derivative into `out`.
pub fn integrate<F>(mut rhs: F, t0: f64, t1: f64, y: &mut [Complex64], tol: Tolerances) -> Result<Stats>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let dim = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let span = t1 - t0;
    if !(span > 0.0) {
        return Err(Error::InvalidParameter(format!("integration interval [{t0}, {t1}] is empty")));
    }
    let mut k = vec![vec![zero; dim]; 7];
    let mut stage = vec![zero; dim];
    let mut next = vec![zero; dim];

    let mut t = t0;
    let mut h = (span * 1e-4).min(1e-2);
    let h_min = span * 1e-14;
    let mut stats = Stats::default();
    rhs(t, y, &mut k[0]);

    while t < t1 {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err(Error::Integrator {
                t,
                steps: stats.accepted,
                reason: format!("step budget of {} exhausted", tol.max_steps),
            });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = zero;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += kj[i] * A[s][j];
                }
                stage[i] = y[i] + acc * h;
            }
            rhs(t + C[s] * h, &stage, &mut k[s]);
        }
        // Stage 7 was evaluated at the fifth-order solution.
        next.copy_from_slice(&stage);

        let mut err = 0.0;
        for i in 0..dim {
            let mut e = zero;
            for (s, ks) in k.iter().enumerate() {
                e += ks[i] * E[s];
            }
            let scale = tol.atol + tol.rtol * y[i].norm().max(next[i].norm());
            err += (e.norm() * h / scale).powi(2);
        }
        let err = (err / dim as f64).sqrt();

        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&next);
            k.swap(0, 6);
            stats.accepted += 1;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= factor;
            if h < h_min {
                return Err(Error::Integrator {
                    t,
                    steps: stats.accepted,
                    reason: format!("step size {h:.3e} fell below the minimum {h_min:.3e}"),
                });
            }
        }
    }
    Ok(stats)
}
