use nalgebra::DMatrix;

use super::{CoefficientVector, Frame, Shape, Signal};
use crate::{Error, Result, C64};

/// A linear synthesis operator with its adjoint.
///
/// Implemented by single [`Frame`]s and by [`ConcatDictionary`]. The
/// `*_into` methods skip length checks; use [`Dictionary::synthesize`] and
/// [`Dictionary::analyze`] for validated calls.
pub trait Dictionary {
    fn ambient_dim(&self) -> usize;
    fn num_atoms(&self) -> usize;
    /// Layout of the signals this dictionary synthesizes.
    fn signal_shape(&self) -> Shape;
    /// Where the second block of coefficients starts, if any.
    fn block_split(&self) -> Option<usize>;
    fn synthesize_into(&self, coeffs: &[C64], out: &mut [C64]);
    fn analyze_into(&self, x: &[C64], out: &mut [C64]);
    /// Dense synthesis matrix, atoms as columns.
    fn dense(&self) -> Result<DMatrix<C64>>;
    /// `Phi diag(w) Phi^H`.
    fn weighted_gram(&self, weights: &[f64]) -> Result<DMatrix<C64>>;

    /// `Phi c`.
    fn synthesize(&self, coeffs: &[C64]) -> Result<Signal> {
        if coeffs.len() != self.num_atoms() {
            return Err(Error::LengthMismatch { expected: self.num_atoms(), actual: coeffs.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.ambient_dim()];
        self.synthesize_into(coeffs, &mut out);
        Signal::new(out, self.signal_shape())
    }

    /// `Phi^H x` (conjugate transpose).
    fn analyze(&self, x: &Signal) -> Result<CoefficientVector> {
        let values = self.analyze_slice(x.values())?;
        Ok(match self.block_split() {
            Some(split) => CoefficientVector::with_split(values, split)?,
            None => CoefficientVector::new(values),
        })
    }

    fn analyze_slice(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.ambient_dim() {
            return Err(Error::LengthMismatch { expected: self.ambient_dim(), actual: x.len() });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.num_atoms()];
        self.analyze_into(x, &mut out);
        Ok(out)
    }
}

/// The concatenation `[Phi1 | Phi2]` of two frames on the same space.
#[derive(Debug, Clone)]
pub struct ConcatDictionary {
    first: Frame,
    second: Frame,
}

impl ConcatDictionary {
    pub fn new(first: Frame, second: Frame) -> Result<Self> {
        if first.ambient_dim() != second.ambient_dim() {
            return Err(Error::AmbientMismatch {
                first: first.ambient_dim(),
                second: second.ambient_dim(),
            });
        }
        Ok(Self { first, second })
    }

    pub fn first(&self) -> &Frame {
        &self.first
    }

    pub fn second(&self) -> &Frame {
        &self.second
    }

    /// Synthesizes each block separately: `(Phi1 c1, Phi2 c2)`.
    pub fn synthesize_components(&self, coeffs: &[C64]) -> Result<(Signal, Signal)> {
        if coeffs.len() != self.num_atoms() {
            return Err(Error::LengthMismatch { expected: self.num_atoms(), actual: coeffs.len() });
        }
        let split = self.first.num_atoms();
        Ok((self.first.synthesize(&coeffs[..split])?, self.second.synthesize(&coeffs[split..])?))
    }
}

impl Dictionary for ConcatDictionary {
    fn ambient_dim(&self) -> usize {
        self.first.ambient_dim()
    }

    fn num_atoms(&self) -> usize {
        self.first.num_atoms() + self.second.num_atoms()
    }

    fn signal_shape(&self) -> Shape {
        self.first.signal_shape()
    }

    fn block_split(&self) -> Option<usize> {
        Some(self.first.num_atoms())
    }

    fn synthesize_into(&self, coeffs: &[C64], out: &mut [C64]) {
        let split = self.first.num_atoms();
        self.first.synthesize_into(&coeffs[..split], out);
        let mut tmp = vec![C64::new(0.0, 0.0); out.len()];
        self.second.synthesize_into(&coeffs[split..], &mut tmp);
        out.iter_mut().zip(tmp).for_each(|(o, t)| *o += t);
    }

    fn analyze_into(&self, x: &[C64], out: &mut [C64]) {
        let split = self.first.num_atoms();
        let (a, b) = out.split_at_mut(split);
        self.first.analyze_into(x, a);
        self.second.analyze_into(x, b);
    }

    fn dense(&self) -> Result<DMatrix<C64>> {
        let a = self.first.dense_ref()?;
        let b = self.second.dense_ref()?;
        let n = self.ambient_dim();
        let mut m = DMatrix::zeros(n, a.ncols() + b.ncols());
        m.columns_mut(0, a.ncols()).copy_from(a);
        m.columns_mut(a.ncols(), b.ncols()).copy_from(b);
        Ok(m)
    }

    fn weighted_gram(&self, weights: &[f64]) -> Result<DMatrix<C64>> {
        if weights.len() != self.num_atoms() {
            return Err(Error::LengthMismatch { expected: self.num_atoms(), actual: weights.len() });
        }
        let split = self.first.num_atoms();
        Ok(self.first.weighted_gram(&weights[..split])? + self.second.weighted_gram(&weights[split..])?)
    }
}
