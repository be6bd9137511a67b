use nalgebra::{DMatrix, DVector};

use crate::C64;

/// Relative singular-value cutoff for pseudo-inverses.
const RANK_TOL: f64 = 1e-10;

/// Minimum-norm least-squares solution of `a z = b` and the residual norm.
/// Returns `None` for an empty system.
pub(crate) fn least_norm(a: &DMatrix<C64>, b: &DVector<C64>) -> Option<(DVector<C64>, f64)> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return None;
    }
    let svd = a.clone().svd(true, true);
    let cutoff = svd.singular_values.max() * RANK_TOL;
    let z = svd.solve(b, cutoff).ok()?;
    let residual = (a * &z - b).norm();
    Some((z, residual))
}
