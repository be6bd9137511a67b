//! Exact null space property test for small real dictionaries.
//!
//! `Phi` has the NSP of order `k` iff `||1_L d||_1 < ||d||_1 / 2` for every
//! nonzero `d` in the null space and every `|L| <= k`. For fixed `d` the
//! worst `L` collects the `k` largest moduli, and that top-`k` sum is a
//! convex function of `d`. Its maximum over the polytope
//! `{d in N(Phi) : ||d||_1 <= 1}` is therefore attained at a vertex. Each
//! vertex spans the one-dimensional space `N(Phi) ∩ {d_Z = 0}` for some set
//! `Z` of `r - 1` coordinates (`r = dim N(Phi)`), so enumerating those sets
//! decides the property exactly.

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::frames::{Dictionary, Frame};
use crate::{Error, Result};

pub const MAX_AMBIENT: usize = 16;
pub const MAX_ATOMS: usize = 24;

/// Ratios within this distance of `1/2` count as violations.
const BOUNDARY_TOL: f64 = 1e-10;
/// Singular values below this make a vertex system degenerate.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NspWitness {
    /// Null space vector with `||d||_1 = 1`, first nonzero entry positive.
    pub d: Vec<f64>,
    /// Zero-based indices carrying at least half of the mass of `d`.
    pub lambda: Vec<usize>,
    /// `||1_L d||_1 / ||d||_1`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NspOutcome {
    pub holds: bool,
    /// Largest `||1_L d||_1 / ||d||_1` over the null space and `|L| = k`
    /// (zero for a trivial null space).
    pub max_ratio: f64,
    pub witness: Option<NspWitness>,
}

/// Decides the null space property of order `k` for a real frame with at
/// most 16 rows and 24 atoms.
pub fn nsp_check(frame: &Frame, k: usize) -> Result<NspOutcome> {
    let (n, p) = (frame.ambient_dim(), frame.num_atoms());
    if n > MAX_AMBIENT || p > MAX_ATOMS {
        return Err(Error::RegimeExceeded(format!(
            "nsp_check handles at most {MAX_AMBIENT}x{MAX_ATOMS}, got {n}x{p}"
        )));
    }
    if k == 0 || k >= p {
        return Err(Error::InvalidParameter(format!("order k={k} must lie in 1..{p}")));
    }
    let dense = frame.dense_ref()?;
    let scale = dense.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if dense.iter().any(|v| v.im.abs() > 1e-12 * scale.max(1.0)) {
        return Err(Error::ComplexInput);
    }
    let real = dense.map(|v| v.re);
    let basis = null_space(&real);
    let r = basis.ncols();
    if r == 0 {
        return Ok(NspOutcome { holds: true, max_ratio: 0.0, witness: None });
    }

    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    for zeros in (0..p).combinations(r - 1) {
        let Some(z) = kernel_direction(&basis, &zeros) else { continue };
        let mut d: Vec<f64> = (0..p).map(|i| (0..r).map(|c| basis[(i, c)] * z[c]).sum()).collect();
        let l1: f64 = d.iter().map(|v| v.abs()).sum();
        if l1 == 0.0 {
            continue;
        }
        let sign = d.iter().find(|v| v.abs() > 1e-14 * l1).map_or(1.0, |v| v.signum());
        d.iter_mut().for_each(|v| *v *= sign / l1);
        let (ratio, lambda) = top_k(&d, k);
        let better = match &best {
            None => true,
            Some((b, bl, _)) => ratio > b + 1e-12 || ((ratio - b).abs() <= 1e-12 && lambda < *bl),
        };
        if better {
            best = Some((ratio, lambda, d));
        }
    }
    let Some((ratio, lambda, d)) = best else {
        return Err(Error::Numerical("null space enumeration found no vertex".into()));
    };
    let holds = ratio < 0.5 - BOUNDARY_TOL;
    Ok(NspOutcome {
        holds,
        max_ratio: ratio,
        witness: (!holds).then_some(NspWitness { d, lambda, ratio }),
    })
}

/// Sum of the `k` largest moduli of `d` and their indices (ascending).
/// Moduli within `1e-12` of each other count as ties and go to the lower index.
fn top_k(d: &[f64], k: usize) -> (f64, Vec<usize>) {
    let mut taken = vec![false; d.len()];
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let max = (0..d.len()).filter(|&i| !taken[i]).map(|i| d[i].abs()).fold(0.0, f64::max);
        let pick = (0..d.len()).find(|&i| !taken[i] && d[i].abs() >= max - 1e-12).unwrap();
        taken[pick] = true;
        chosen.push(pick);
    }
    chosen.sort_unstable();
    (chosen.iter().map(|&i| d[i].abs()).sum(), chosen)
}

/// Orthonormal basis of the null space, as columns.
fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p) = a.shape();
    let mut padded = DMatrix::zeros(p.max(n), p);
    padded.rows_mut(0, n).copy_from(a);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let tol = sigma_max * (n.max(p) as f64) * f64::EPSILON * 16.0;
    let null_rows: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] <= tol).collect();
    DMatrix::from_fn(p, null_rows.len(), |i, c| v_t[(null_rows[c], i)])
}

/// Unit vector spanning `{z : basis[Z, :] z = 0}` when that space is
/// one-dimensional.
fn kernel_direction(basis: &DMatrix<f64>, zeros: &[usize]) -> Option<Vec<f64>> {
    let r = basis.ncols();
    if zeros.is_empty() {
        return (r == 1).then(|| vec![1.0]);
    }
    // one zero row pads the (r-1) x r system to square
    let mut m = DMatrix::zeros(r, r);
    for (row, &i) in zeros.iter().enumerate() {
        m.set_row(row, &basis.row(i));
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t?;
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    if r > 1 && svd.singular_values[order[1]] <= RANK_TOL {
        return None;
    }
    Some(v_t.row(order[0]).iter().copied().collect())
}
