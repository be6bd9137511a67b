//! Fast orthonormal transforms backing the structured frame kinds.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};
use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Orthonormal DFT with atoms `n^{-1/2} exp(2 pi i w t / n)`.
#[derive(Clone)]
pub(crate) struct FourierPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl FourierPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: 1.0 / (n as f64).sqrt(),
        }
    }

    /// Analysis: `(Phi^H x)_w = n^{-1/2} sum_t exp(-2 pi i w t / n) x_t`.
    pub fn analyze(&self, data: &mut [C64]) {
        self.forward.process(data);
        data.iter_mut().for_each(|v| *v *= self.scale);
    }

    /// Synthesis: `x_t = n^{-1/2} sum_w exp(2 pi i w t / n) c_w`.
    pub fn synthesize(&self, data: &mut [C64]) {
        self.inverse.process(data);
        data.iter_mut().for_each(|v| *v *= self.scale);
    }
}

impl fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierPlan").field("len", &self.forward.len()).finish()
    }
}

/// Orthonormal DCT-II (analysis) and its inverse DCT-III (synthesis).
#[derive(Clone)]
pub(crate) struct DctPlan {
    dct: Arc<dyn TransformType2And3<f64>>,
    n: usize,
}

impl DctPlan {
    pub fn new(n: usize) -> Self {
        Self { dct: DctPlanner::new().plan_dct2(n), n }
    }

    fn scales(&self) -> (f64, f64) {
        let n = self.n as f64;
        ((1.0 / n).sqrt(), (2.0 / n).sqrt())
    }

    pub fn analyze(&self, data: &mut [C64]) {
        let (s0, s) = self.scales();
        self.on_parts(data, |dct, buf| dct.process_dct2(buf), |k| if k == 0 { s0 } else { s });
    }

    pub fn synthesize(&self, data: &mut [C64]) {
        let (s0, s) = self.scales();
        // DCT-III computes y_0/2 + sum_k y_k cos(..); pre-scale the DC term by 2.
        let (re, im): (Vec<f64>, Vec<f64>) = data
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let w = if k == 0 { 2.0 * s0 } else { s };
                (v.re * w, v.im * w)
            })
            .unzip();
        let (mut re, mut im) = (re, im);
        self.dct.process_dct3(&mut re);
        self.dct.process_dct3(&mut im);
        for (v, (r, i)) in data.iter_mut().zip(re.into_iter().zip(im)) {
            *v = C64::new(r, i);
        }
    }

    fn on_parts(
        &self,
        data: &mut [C64],
        transform: impl Fn(&dyn TransformType2And3<f64>, &mut [f64]),
        post_scale: impl Fn(usize) -> f64,
    ) {
        let mut re: Vec<f64> = data.iter().map(|v| v.re).collect();
        let mut im: Vec<f64> = data.iter().map(|v| v.im).collect();
        transform(self.dct.as_ref(), &mut re);
        transform(self.dct.as_ref(), &mut im);
        for (k, v) in data.iter_mut().enumerate() {
            *v = C64::new(re[k], im[k]) * post_scale(k);
        }
    }
}

impl fmt::Debug for DctPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DctPlan").field("len", &self.n).finish()
    }
}

/// Full-depth orthonormal Haar analysis. Output layout:
/// `[scaling, coarsest detail, next level (2), ..., finest level (n/2)]`.
pub(crate) fn haar_analyze(data: &mut [C64]) {
    let mut tmp = vec![C64::new(0.0, 0.0); data.len()];
    let mut len = data.len();
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            let (a, b) = (data[2 * i], data[2 * i + 1]);
            tmp[i] = (a + b) * FRAC_1_SQRT_2;
            tmp[half + i] = (a - b) * FRAC_1_SQRT_2;
        }
        data[..len].copy_from_slice(&tmp[..len]);
        len = half;
    }
}

pub(crate) fn haar_synthesize(data: &mut [C64]) {
    let n = data.len();
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        for i in 0..half {
            let (s, d) = (data[i], data[half + i]);
            tmp[2 * i] = (s + d) * FRAC_1_SQRT_2;
            tmp[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
        }
        data[..len].copy_from_slice(&tmp[..len]);
        len *= 2;
    }
}

/// One axis of a separable 2D transform.
#[derive(Debug, Clone)]
pub(crate) enum Axis {
    Haar,
    Dct(DctPlan),
}

impl Axis {
    fn apply(&self, data: &mut [C64], forward: bool) {
        match (self, forward) {
            (Axis::Haar, true) => haar_analyze(data),
            (Axis::Haar, false) => haar_synthesize(data),
            (Axis::Dct(p), true) => p.analyze(data),
            (Axis::Dct(p), false) => p.synthesize(data),
        }
    }
}

/// Applies `row_axis` along each row, then `col_axis` along each column of a
/// row-major `rows x cols` grid.
pub(crate) fn separable(
    data: &mut [C64],
    rows: usize,
    cols: usize,
    row_axis: &Axis,
    col_axis: &Axis,
    forward: bool,
) {
    for row in data.chunks_exact_mut(cols) {
        row_axis.apply(row, forward);
    }
    let mut column = vec![C64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = data[r * cols + c];
        }
        col_axis.apply(&mut column, forward);
        for r in 0..rows {
            data[r * cols + c] = column[r];
        }
    }
}
