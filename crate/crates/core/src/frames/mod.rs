//! Signals, frames and concatenated dictionaries.

mod dictionary;
mod frame;
mod transforms;

pub use dictionary::{ConcatDictionary, Dictionary};
pub use frame::{is_parseval, Frame, FrameKind, ParsevalCheck};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Layout of a signal: a 1D sequence or a row-major 2D grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    Line(usize),
    Grid { rows: usize, cols: usize },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Line(n) => n,
            Shape::Grid { rows, cols } => rows * cols,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Shape::Grid { .. })
    }
}

/// Finite complex samples with a 1D or 2D layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<C64>,
    shape: Shape,
}

impl Signal {
    pub fn new(values: Vec<C64>, shape: Shape) -> Result<Self> {
        if let Shape::Grid { rows, cols } = shape {
            if rows * cols != values.len() {
                return Err(Error::ShapeMismatch { rows, cols, len: values.len() });
            }
        } else if shape.len() != values.len() {
            return Err(Error::LengthMismatch { expected: shape.len(), actual: values.len() });
        }
        if values.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { values, shape })
    }

    /// A 1D signal.
    pub fn from_vec(values: Vec<C64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, Shape::Line(n))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_vec(values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn grid_from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::new(v, 0.0)).collect(), Shape::Grid { rows, cols })
    }

    pub fn zeros(shape: Shape) -> Result<Self> {
        Self::new(vec![C64::new(0.0, 0.0); shape.len()], shape)
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Real parts, the natural view of image data.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: f64) -> Signal {
        Signal { values: self.values.iter().map(|v| v * alpha).collect(), shape: self.shape }
    }

    fn zip_with(&self, other: &Signal, f: impl Fn(C64, C64) -> C64) -> Result<Signal> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: other.len() });
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Signal { values, shape: self.shape })
    }

    /// Reinterprets the samples under another layout of equal length.
    pub fn reshape(self, shape: Shape) -> Result<Signal> {
        Signal::new(self.values, shape)
    }
}

/// Complex coefficient sequence, optionally split into the blocks `(c1, c2)`
/// of a two-frame dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<C64>,
    block_split: Option<usize>,
}

impl CoefficientVector {
    pub fn new(values: Vec<C64>) -> Self {
        Self { values, block_split: None }
    }

    pub fn with_split(values: Vec<C64>, split: usize) -> Result<Self> {
        if split > values.len() {
            return Err(Error::IndexOutOfRange { index: split, len: values.len() });
        }
        Ok(Self { values, block_split: Some(split) })
    }

    pub fn zeros(len: usize, block_split: Option<usize>) -> Self {
        Self { values: vec![C64::new(0.0, 0.0); len], block_split }
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn block_split(&self) -> Option<usize> {
        self.block_split
    }

    /// First block `c1` (the whole vector when unsplit).
    pub fn block1(&self) -> &[C64] {
        &self.values[..self.block_split.unwrap_or(self.values.len())]
    }

    /// Second block `c2` (empty when unsplit).
    pub fn block2(&self) -> &[C64] {
        &self.values[self.block_split.unwrap_or(self.values.len())..]
    }

    /// `1e-8 * max(1, ||values||_inf)`.
    pub fn default_threshold(&self) -> f64 {
        zero_threshold(&self.values)
    }

    /// Indices whose modulus exceeds `threshold`, ascending.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.values.iter().enumerate().filter(|(_, v)| v.norm() > threshold).map(|(i, _)| i).collect()
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(&self.values)
    }

    /// Support size under the default threshold.
    pub fn l0_count(&self) -> usize {
        self.support(self.default_threshold()).len()
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.values)
    }
}

/// Default cutoff for support counting: `1e-8 * max(1, ||v||_inf)`.
pub fn zero_threshold(values: &[C64]) -> f64 {
    1e-8 * values.iter().map(|v| v.norm()).fold(1.0, f64::max)
}

pub fn l1_norm(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm()).sum()
}

pub fn norm2(values: &[C64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = sum conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
