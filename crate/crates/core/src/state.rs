//! Qudit registers: shape, mixed-radix basis indices and dense state vectors.
//!
//! Qudits are ordered big-endian: the first qudit is the most significant
//! digit of the flat basis index.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest database size accepted by [`QuditShape::new`].
pub const MAX_STATES: usize = 1 << 31;

/// Register of `n` qudits with `d` levels each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuditShape {
    d: usize,
    n: usize,
    size: usize,
}

impl QuditShape {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidShape(format!("d = {d}, need d >= 2")));
        }
        if n < 1 {
            return Err(Error::InvalidShape(format!("n = {n}, need n >= 1")));
        }
        let size = u32::try_from(n)
            .ok()
            .and_then(|n| d.checked_pow(n))
            .filter(|&size| size <= MAX_STATES)
            .ok_or_else(|| {
                Error::InvalidShape(format!("d^n = {d}^{n} exceeds the limit of {MAX_STATES} states"))
            })?;
        Ok(Self { d, n, size })
    }

    /// Levels per qudit.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of qudits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Database size `d^n`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Distance between consecutive levels of qudit `k` in the flat index.
    pub fn stride(&self, k: usize) -> usize {
        self.d.pow((self.n - 1 - k) as u32)
    }

    pub fn index(&self, flat: usize) -> Result<BasisIndex> {
        BasisIndex::from_flat(*self, flat)
    }

    pub fn index_from_digits(&self, digits: &[usize]) -> Result<BasisIndex> {
        BasisIndex::from_digits(*self, digits)
    }
}

/// A computational basis state `|q_1 q_2 ... q_n>` of a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    digits: Vec<usize>,
    flat: usize,
}

impl BasisIndex {
    pub fn from_flat(shape: QuditShape, flat: usize) -> Result<Self> {
        if flat >= shape.size() {
            return Err(Error::IndexOutOfRange { index: flat, size: shape.size() });
        }
        let mut digits = vec![0; shape.n()];
        let mut rest = flat;
        for slot in digits.iter_mut().rev() {
            *slot = rest % shape.d();
            rest /= shape.d();
        }
        Ok(Self { digits, flat })
    }

    pub fn from_digits(shape: QuditShape, digits: &[usize]) -> Result<Self> {
        if digits.len() != shape.n() {
            return Err(Error::ShapeMismatch(format!(
                "{} digits given for a register of {} qudits",
                digits.len(),
                shape.n()
            )));
        }
        let mut flat = 0;
        for (position, &digit) in digits.iter().enumerate() {
            if digit >= shape.d() {
                return Err(Error::InvalidDigit { digit, position, d: shape.d() });
            }
            flat = flat * shape.d() + digit;
        }
        Ok(Self { digits: digits.to_vec(), flat })
    }

    pub fn flat(&self) -> usize {
        self.flat
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }
}

/// Dense pure state of a qudit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    shape: QuditShape,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros state `|00...0>`.
    pub fn zero(shape: QuditShape) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); shape.size()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { shape, amplitudes }
    }

    pub fn basis_state(shape: QuditShape, x: &BasisIndex) -> Result<Self> {
        check_index(shape, x)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); shape.size()];
        amplitudes[x.flat()] = Complex64::new(1.0, 0.0);
        Ok(Self { shape, amplitudes })
    }

    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(shape: QuditShape, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != shape.size() {
            return Err(Error::ShapeMismatch(format!(
                "{} amplitudes for a register of size {}",
                amplitudes.len(),
                shape.size()
            )));
        }
        Ok(Self { shape, amplitudes })
    }

    /// `N^{-1/2} sum_x |x>` with all phases zero.
    pub fn uniform(shape: QuditShape) -> Self {
        let a = Complex64::new(1.0 / (shape.size() as f64).sqrt(), 0.0);
        Self { shape, amplitudes: vec![a; shape.size()] }
    }

    pub fn shape(&self) -> QuditShape {
        self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `<self|other>`, summed in index order.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        self.check_shape(other)?;
        Ok(dot(&self.amplitudes, &other.amplitudes))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero or non-finite state".into()));
        }
        let scale = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok(())
    }

    /// Probability `|<x|s>|^2`.
    pub fn population(&self, x: &BasisIndex) -> Result<f64> {
        check_index(self.shape, x)?;
        Ok(self.amplitudes[x.flat()].norm_sqr())
    }

    pub(crate) fn check_shape(&self, other: &StateVector) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "(d={}, n={}) vs (d={}, n={})",
                self.shape.d(),
                self.shape.n(),
                other.shape.d(),
                other.shape.n()
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_index(shape: QuditShape, x: &BasisIndex) -> Result<()> {
    if x.flat() >= shape.size() || x.digits().len() != shape.n() {
        return Err(Error::IndexOutOfRange { index: x.flat(), size: shape.size() });
    }
    Ok(())
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}
