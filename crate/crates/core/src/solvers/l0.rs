use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use super::{check_signal, SolverConfig};
use crate::frames::{norm2, Dictionary};
use crate::{CoefficientVector, Error, Result, Signal, C64};

pub const L0_MAX_SPARSITY: usize = 12;
pub const L0_MAX_ATOMS: usize = 64;

/// Sparsest representation of `x` with at most `k_max` atoms, by exhaustive
/// search over supports of increasing size.
///
/// Each candidate support is solved by least squares and accepted when the
/// relative misfit is below the default feasibility tolerance. Supports are
/// visited in lexicographic order, so ties go to the lexicographically
/// smallest one.
pub fn l0_oracle<D: Dictionary + ?Sized>(dict: &D, x: &Signal, k_max: usize) -> Result<CoefficientVector> {
    check_signal(dict, x)?;
    let p = dict.num_atoms();
    if k_max > L0_MAX_SPARSITY || p > L0_MAX_ATOMS {
        return Err(Error::RegimeExceeded(format!(
            "l0_oracle handles k_max <= {L0_MAX_SPARSITY} and at most {L0_MAX_ATOMS} atoms (got k_max={k_max}, {p} atoms)"
        )));
    }
    let wrap = |values: Vec<C64>| match dict.block_split() {
        Some(split) => CoefficientVector::with_split(values, split),
        None => Ok(CoefficientVector::new(values)),
    };
    let xv = DVector::from_column_slice(x.values());
    let x_norm = norm2(x.values());
    if x_norm == 0.0 {
        return wrap(vec![C64::new(0.0, 0.0); p]);
    }
    let tol = SolverConfig::default().feasibility_tol * x_norm;
    let a = dict.dense()?;
    let gram = a.adjoint() * &a;
    let rhs = a.adjoint() * &xv;

    for size in 1..=k_max.min(p) {
        for support in (0..p).combinations(size) {
            let g = DMatrix::from_fn(size, size, |i, j| gram[(support[i], support[j])]);
            let Some(chol) = g.cholesky() else { continue };
            let b = DVector::from_fn(size, |i, _| rhs[support[i]]);
            let z = chol.solve(&b);
            let mut r = xv.clone();
            for (k, &j) in support.iter().enumerate() {
                r.axpy(-z[k], &a.column(j), C64::new(1.0, 0.0));
            }
            if r.norm() <= tol {
                let mut c = vec![C64::new(0.0, 0.0); p];
                for (k, &j) in support.iter().enumerate() {
                    c[j] = z[k];
                }
                return wrap(c);
            }
        }
    }
    Err(Error::NotFound { k_max })
}
