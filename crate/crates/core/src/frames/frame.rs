use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::transforms::{self, Axis, DctPlan, FourierPlan};
use super::{norm2, Dictionary, Shape};
use crate::{Error, Result, C64};

/// Largest `ambient_dim * num_atoms` that will be densified.
pub const MAX_DENSE_ENTRIES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Dirac,
    Fourier,
    Dct,
    Haar1D,
    Haar2D,
    Dct2D,
    Matrix,
}

impl FrameKind {
    pub fn name(&self) -> &'static str {
        match self {
            FrameKind::Dirac => "dirac",
            FrameKind::Fourier => "fourier",
            FrameKind::Dct => "dct",
            FrameKind::Haar1D => "haar",
            FrameKind::Haar2D => "haar2d",
            FrameKind::Dct2D => "dct2d",
            FrameKind::Matrix => "matrix",
        }
    }
}

#[derive(Debug, Clone)]
enum Operator {
    Identity,
    Fourier(FourierPlan),
    Dct(DctPlan),
    Haar,
    Separable { rows: usize, cols: usize, row_axis: Axis, col_axis: Axis },
    Matrix(DMatrix<C64>),
}

/// A synthesis operator `Phi` together with its adjoint `Phi^H`.
///
/// Frames are immutable; the dense matrix of a structured frame is built
/// lazily on first use and shared between clones.
#[derive(Debug, Clone)]
pub struct Frame {
    kind: FrameKind,
    shape: Shape,
    num_atoms: usize,
    op: Operator,
    dense: Arc<OnceLock<DMatrix<C64>>>,
}

fn check_dyadic(kind: &'static str, len: usize) -> Result<()> {
    if len.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NonDyadic { kind, len })
    }
}

impl Frame {
    /// Builds a built-in frame. `FrameKind::Matrix` must go through
    /// [`Frame::from_matrix`].
    pub fn new(kind: FrameKind, shape: Shape) -> Result<Self> {
        let n = shape.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if let Shape::Grid { rows, cols } = shape {
            if rows == 0 || cols == 0 {
                return Err(Error::ZeroDimension);
            }
        }
        let op = match kind {
            FrameKind::Dirac => Operator::Identity,
            FrameKind::Fourier => Operator::Fourier(FourierPlan::new(n)),
            FrameKind::Dct => Operator::Dct(DctPlan::new(n)),
            FrameKind::Haar1D => {
                check_dyadic("haar", n)?;
                Operator::Haar
            }
            FrameKind::Haar2D | FrameKind::Dct2D => {
                let Shape::Grid { rows, cols } = shape else {
                    return Err(Error::InvalidParameter(format!(
                        "{} needs a 2D shape",
                        kind.name()
                    )));
                };
                let (row_axis, col_axis) = if kind == FrameKind::Haar2D {
                    check_dyadic("haar2d", rows)?;
                    check_dyadic("haar2d", cols)?;
                    (Axis::Haar, Axis::Haar)
                } else {
                    (Axis::Dct(DctPlan::new(cols)), Axis::Dct(DctPlan::new(rows)))
                };
                Operator::Separable { rows, cols, row_axis, col_axis }
            }
            FrameKind::Matrix => {
                return Err(Error::InvalidParameter(
                    "matrix frames are built with Frame::from_matrix".into(),
                ))
            }
        };
        Ok(Self { kind, shape, num_atoms: n, op, dense: Arc::default() })
    }

    pub fn dirac(n: usize) -> Result<Self> {
        Self::new(FrameKind::Dirac, Shape::Line(n))
    }

    pub fn fourier(n: usize) -> Result<Self> {
        Self::new(FrameKind::Fourier, Shape::Line(n))
    }

    pub fn dct(n: usize) -> Result<Self> {
        Self::new(FrameKind::Dct, Shape::Line(n))
    }

    pub fn haar(n: usize) -> Result<Self> {
        Self::new(FrameKind::Haar1D, Shape::Line(n))
    }

    pub fn haar2d(rows: usize, cols: usize) -> Result<Self> {
        Self::new(FrameKind::Haar2D, Shape::Grid { rows, cols })
    }

    pub fn dct2d(rows: usize, cols: usize) -> Result<Self> {
        Self::new(FrameKind::Dct2D, Shape::Grid { rows, cols })
    }

    /// A dense frame whose columns are the atoms.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::ZeroDimension);
        }
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            kind: FrameKind::Matrix,
            shape: Shape::Line(matrix.nrows()),
            num_atoms: matrix.ncols(),
            op: Operator::Matrix(matrix),
            dense: Arc::default(),
        })
    }

    pub fn from_real_matrix(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::from_matrix(matrix.map(|v| C64::new(v, 0.0)))
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    /// The matrix payload of a `Matrix` frame.
    pub fn matrix(&self) -> Option<&DMatrix<C64>> {
        match &self.op {
            Operator::Matrix(m) => Some(m),
            _ => None,
        }
    }

    /// Column `index` of the synthesis operator.
    pub fn atom(&self, index: usize) -> Result<Vec<C64>> {
        if index >= self.num_atoms {
            return Err(Error::IndexOutOfRange { index, len: self.num_atoms });
        }
        let mut e = vec![C64::new(0.0, 0.0); self.num_atoms];
        e[index] = C64::new(1.0, 0.0);
        let mut out = vec![C64::new(0.0, 0.0); self.ambient_dim()];
        self.synthesize_into(&e, &mut out);
        Ok(out)
    }

    /// Cached dense synthesis matrix (`ambient_dim x num_atoms`).
    pub fn dense_ref(&self) -> Result<&DMatrix<C64>> {
        if let Operator::Matrix(m) = &self.op {
            return Ok(m);
        }
        let entries = self.ambient_dim() * self.num_atoms;
        if entries > MAX_DENSE_ENTRIES {
            return Err(Error::TooLarge { entries });
        }
        Ok(self.dense.get_or_init(|| {
            let n = self.ambient_dim();
            let mut m = DMatrix::zeros(n, self.num_atoms);
            let mut e = vec![C64::new(0.0, 0.0); self.num_atoms];
            let mut col = vec![C64::new(0.0, 0.0); n];
            for j in 0..self.num_atoms {
                e[j] = C64::new(1.0, 0.0);
                self.synthesize_into(&e, &mut col);
                e[j] = C64::new(0.0, 0.0);
                m.column_mut(j).copy_from_slice(&col);
            }
            m
        }))
    }

    /// Whether the atoms form an orthonormal basis. Built-in kinds always do;
    /// matrix frames are checked densely to `1e-10`.
    pub fn is_orthonormal_basis(&self) -> bool {
        match &self.op {
            Operator::Matrix(m) => {
                if m.nrows() != m.ncols() {
                    return false;
                }
                let g = m.adjoint() * m;
                g.iter().enumerate().all(|(idx, v)| {
                    let (i, j) = (idx % g.nrows(), idx / g.nrows());
                    let target = if i == j { 1.0 } else { 0.0 };
                    (v - C64::new(target, 0.0)).norm() <= 1e-10
                })
            }
            _ => true,
        }
    }
}

impl Dictionary for Frame {
    fn ambient_dim(&self) -> usize {
        self.shape.len()
    }

    fn num_atoms(&self) -> usize {
        self.num_atoms
    }

    fn signal_shape(&self) -> Shape {
        self.shape
    }

    fn block_split(&self) -> Option<usize> {
        None
    }

    fn synthesize_into(&self, coeffs: &[C64], out: &mut [C64]) {
        debug_assert_eq!(coeffs.len(), self.num_atoms);
        debug_assert_eq!(out.len(), self.ambient_dim());
        match &self.op {
            Operator::Matrix(m) => {
                out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                for (j, &c) in coeffs.iter().enumerate() {
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    for (o, a) in out.iter_mut().zip(m.column(j).iter()) {
                        *o += a * c;
                    }
                }
            }
            op => {
                out.copy_from_slice(coeffs);
                match op {
                    Operator::Identity => {}
                    Operator::Fourier(p) => p.synthesize(out),
                    Operator::Dct(p) => p.synthesize(out),
                    Operator::Haar => transforms::haar_synthesize(out),
                    Operator::Separable { rows, cols, row_axis, col_axis } => {
                        transforms::separable(out, *rows, *cols, row_axis, col_axis, false)
                    }
                    Operator::Matrix(_) => unreachable!(),
                }
            }
        }
    }

    fn analyze_into(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ambient_dim());
        debug_assert_eq!(out.len(), self.num_atoms);
        match &self.op {
            Operator::Matrix(m) => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = m.column(j).iter().zip(x).map(|(a, v)| a.conj() * v).sum();
                }
            }
            op => {
                out.copy_from_slice(x);
                match op {
                    Operator::Identity => {}
                    Operator::Fourier(p) => p.analyze(out),
                    Operator::Dct(p) => p.analyze(out),
                    Operator::Haar => transforms::haar_analyze(out),
                    Operator::Separable { rows, cols, row_axis, col_axis } => {
                        transforms::separable(out, *rows, *cols, row_axis, col_axis, true)
                    }
                    Operator::Matrix(_) => unreachable!(),
                }
            }
        }
    }

    fn dense(&self) -> Result<DMatrix<C64>> {
        self.dense_ref().cloned()
    }

    fn weighted_gram(&self, weights: &[f64]) -> Result<DMatrix<C64>> {
        let n = self.ambient_dim();
        if weights.len() != self.num_atoms {
            return Err(Error::LengthMismatch { expected: self.num_atoms, actual: weights.len() });
        }
        match &self.op {
            Operator::Identity => Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                n,
                weights.iter().map(|&w| C64::new(w, 0.0)),
            ))),
            Operator::Fourier(p) => {
                // Phi W Phi^H is circulant with first column n^{-1/2} * synth(w).
                let mut g: Vec<C64> = weights.iter().map(|&w| C64::new(w, 0.0)).collect();
                p.synthesize(&mut g);
                let scale = 1.0 / (n as f64).sqrt();
                Ok(DMatrix::from_fn(n, n, |s, t| g[(s + n - t) % n] * scale))
            }
            _ => {
                let a = self.dense_ref()?;
                Ok(weighted_outer(a, weights))
            }
        }
    }
}

/// `A diag(w) A^H` for a dense `A`.
pub(crate) fn weighted_outer(a: &DMatrix<C64>, weights: &[f64]) -> DMatrix<C64> {
    let mut scaled = a.clone();
    for (j, &w) in weights.iter().enumerate() {
        scaled.column_mut(j).scale_mut(w);
    }
    scaled * a.adjoint()
}

/// Outcome of a randomized Parseval test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParsevalCheck {
    pub parseval: bool,
    /// Largest observed `||Phi Phi^H x - x|| / ||x||`.
    pub max_defect: f64,
}

const PARSEVAL_SEED: u64 = 0x05EE_D0FF_4A3E;

/// Probabilistic check of `Phi Phi^H = I` on `num_probes` Gaussian probes
/// drawn from a fixed seed.
pub fn is_parseval<D: Dictionary + ?Sized>(frame: &D, num_probes: usize, tol: f64) -> ParsevalCheck {
    let n = frame.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(PARSEVAL_SEED);
    let mut coeffs = vec![C64::new(0.0, 0.0); frame.num_atoms()];
    let mut back = vec![C64::new(0.0, 0.0); n];
    let mut max_defect = 0.0f64;
    for _ in 0..num_probes.max(1) {
        let x: Vec<C64> = (0..n)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        frame.analyze_into(&x, &mut coeffs);
        frame.synthesize_into(&coeffs, &mut back);
        let diff: Vec<C64> = back.iter().zip(&x).map(|(a, b)| a - b).collect();
        max_defect = max_defect.max(norm2(&diff) / norm2(&x));
    }
    ParsevalCheck { parseval: max_defect <= tol, max_defect }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Signal;

    #[test]
    fn dirac_is_identity() {
        let f = Frame::dirac(4).unwrap();
        let x = Signal::from_real(&[1.0, -2.0, 3.5, 0.0]).unwrap();
        assert_eq!(f.analyze(&x).unwrap().values(), x.values());
        let e1 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert_eq!(f.synthesize(&e1).unwrap().values(), &e1);
    }

    #[test]
    fn fourier_dc_atom_and_constant_signal() {
        let f = Frame::fourier(4).unwrap();
        for v in f.atom(0).unwrap() {
            assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
        }
        let x = f.synthesize(&[C64::new(2.0, 0.0), C64::default(), C64::default(), C64::default()]).unwrap();
        for v in x.values() {
            assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let c = f.analyze(&Signal::from_real(&[1.0; 4]).unwrap()).unwrap();
        assert!((c.values()[0] - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(c.values()[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn fourier_atom_phase_convention() {
        // atom w=1 at t=1 is n^{-1/2} exp(2 pi i / n)
        let n = 8;
        let atom = Frame::fourier(n).unwrap().atom(1).unwrap();
        let expected = C64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * std::f64::consts::PI / n as f64);
        assert!((atom[1] - expected).norm() < 1e-15);
    }

    #[test]
    fn fourier_spike_is_flat() {
        let f = Frame::fourier(16).unwrap();
        let mut spike = vec![0.0; 16];
        spike[0] = 1.0;
        let c = f.analyze(&Signal::from_real(&spike).unwrap()).unwrap();
        assert!(c.values().iter().all(|v| (v.norm() - 0.25).abs() < 1e-15));
    }

    #[test]
    fn haar_rejects_non_dyadic() {
        assert!(matches!(Frame::haar(3), Err(Error::NonDyadic { len: 3, .. })));
        assert!(matches!(Frame::haar2d(8, 6), Err(Error::NonDyadic { len: 6, .. })));
        assert!(matches!(Frame::dirac(0), Err(Error::ZeroDimension)));
        assert!(Frame::dct2d(6, 5).is_ok());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let f = Frame::dct(8).unwrap();
        assert!(matches!(
            f.synthesize(&[C64::default(); 7]),
            Err(Error::LengthMismatch { expected: 8, actual: 7 })
        ));
        assert!(f.analyze(&Signal::from_real(&[0.0; 5]).unwrap()).is_err());
    }

    #[test]
    fn fourier_weighted_gram_matches_dense() {
        let f = Frame::fourier(8).unwrap();
        let w: Vec<f64> = (0..8).map(|i| 0.3 + i as f64).collect();
        let fast = f.weighted_gram(&w).unwrap();
        let slow = weighted_outer(f.dense_ref().unwrap(), &w);
        assert!((fast - slow).norm() < 1e-12);
    }

    #[test]
    fn parseval_checks() {
        assert!(is_parseval(&Frame::fourier(8).unwrap(), 10, 1e-12).parseval);
        // [I | I] / sqrt(2) is a tight frame; zeroing a column breaks it
        let n = 4;
        let mut m = DMatrix::<C64>::zeros(n, 2 * n);
        for i in 0..n {
            m[(i, i)] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            m[(i, n + i)] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        }
        let check = is_parseval(&Frame::from_matrix(m.clone()).unwrap(), 10, 1e-10);
        assert!(check.parseval, "{check:?}");
        m.column_mut(0).fill(C64::default());
        assert!(!is_parseval(&Frame::from_matrix(m).unwrap(), 10, 1e-10).parseval);
    }
}
