#![allow(dead_code)]

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use mca::{Frame, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn cgauss(rng: &mut impl Rng) -> C64 {
    C64::new(gauss(rng), gauss(rng))
}

/// Real Gaussian matrix with unit-norm columns.
pub fn random_real_normalized(rng: &mut impl Rng, n: usize, p: usize) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(n, p, |_, _| gauss(rng));
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    m
}

/// Haar-distributed unitary via QR with phase correction.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    let z = DMatrix::from_fn(n, n, |_, _| cgauss(rng));
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 { C64::new(1.0, 0.0) } else { d / d.norm() };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Unitary DFT matrix.
pub fn dft(n: usize) -> DMatrix<C64> {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |t, k| C64::from_polar(s, 2.0 * std::f64::consts::PI * (t * k) as f64 / n as f64))
}

/// Diagonal of uniform random phases.
pub fn random_phases(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
    }))
}

pub fn frame(m: DMatrix<C64>) -> Frame {
    Frame::from_matrix(m).unwrap()
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

pub fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn l1(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm()).sum()
}

/// Optimal value of `min ||c||_1 s.t. A c = b` for real `A`, `b`, by LP.
pub fn lp_l1_min(a: &DMatrix<f64>, b: &[f64]) -> f64 {
    let (n, p) = a.shape();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let c: Vec<_> = (0..p).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let t: Vec<_> = (0..p).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for j in 0..p {
        lp.add_constraint([(c[j], 1.0), (t[j], -1.0)], ComparisonOp::Le, 0.0);
        lp.add_constraint([(c[j], -1.0), (t[j], -1.0)], ComparisonOp::Le, 0.0);
    }
    for i in 0..n {
        let mut row = LinearExpr::empty();
        for j in 0..p {
            row.add(c[j], a[(i, j)]);
        }
        lp.add_constraint(row, ComparisonOp::Eq, b[i]);
    }
    lp.solve().expect("feasible LP").objective()
}

/// `max sum_S s_i d_i - ||d_{S^c}||_1` over `A d = 0`, `||d||_1 <= 1`.
/// Zero (up to round-off) iff every `c` with support `S` and signs `s` is
/// the unique `l1` minimizer of `A c = A c` (boundary cases aside).
pub fn lp_uniqueness_gap(a: &DMatrix<f64>, support: &[usize], signs: &[f64]) -> f64 {
    let (n, p) = a.shape();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let mut weight = vec![0.0; p];
    let mut inside = vec![false; p];
    for (&i, &s) in support.iter().zip(signs) {
        weight[i] = s;
        inside[i] = true;
    }
    let d: Vec<_> = (0..p).map(|j| lp.add_var(weight[j], (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let t: Vec<_> = (0..p).map(|j| lp.add_var(if inside[j] { 0.0 } else { -1.0 }, (0.0, f64::INFINITY))).collect();
    for j in 0..p {
        lp.add_constraint([(d[j], 1.0), (t[j], -1.0)], ComparisonOp::Le, 0.0);
        lp.add_constraint([(d[j], -1.0), (t[j], -1.0)], ComparisonOp::Le, 0.0);
    }
    let mut total = LinearExpr::empty();
    t.iter().for_each(|&v| total.add(v, 1.0));
    lp.add_constraint(total, ComparisonOp::Le, 1.0);
    for i in 0..n {
        let mut row = LinearExpr::empty();
        for j in 0..p {
            row.add(d[j], a[(i, j)]);
        }
        lp.add_constraint(row, ComparisonOp::Eq, 0.0);
    }
    lp.solve().expect("bounded LP").objective()
}
