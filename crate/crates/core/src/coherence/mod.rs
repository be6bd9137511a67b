//! Coherence measures of dictionaries and the null space property.
//!
//! All measures are computed from dense Gram matrices, so the dictionaries
//! involved must be densifiable (see [`crate::frames::Frame::dense_ref`]).

mod nsp;

pub use nsp::{nsp_check, NspOutcome, NspWitness};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::frames::{is_parseval, ConcatDictionary, Dictionary};
use crate::{Error, Result, C64};

/// Tolerance on `| ||phi_i|| - 1 |` for measures defined on normalized frames.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Probes and tolerance used when a measure needs Parseval frames.
const PARSEVAL_PROBES: usize = 8;
const PARSEVAL_TOL: f64 = 1e-8;

/// Index clusters `Lambda1` (into the first frame) and `Lambda2` (into the
/// second frame).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSpec {
    #[serde(default)]
    pub lambda1: Vec<usize>,
    #[serde(default)]
    pub lambda2: Vec<usize>,
}

impl ClusterSpec {
    pub fn new(lambda1: Vec<usize>, lambda2: Vec<usize>) -> Self {
        Self { lambda1, lambda2 }
    }

    /// Checks ranges and duplicates against frames with `n1` and `n2` atoms.
    pub fn validate(&self, n1: usize, n2: usize) -> Result<()> {
        validate_indices(&self.lambda1, n1)?;
        validate_indices(&self.lambda2, n2)
    }

    /// Indicator masks of the two clusters.
    pub fn masks(&self, n1: usize, n2: usize) -> Result<(Vec<bool>, Vec<bool>)> {
        self.validate(n1, n2)?;
        Ok((mask(&self.lambda1, n1), mask(&self.lambda2, n2)))
    }
}

pub(crate) fn validate_indices(indices: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    for &i in indices {
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(())
}

fn mask(indices: &[usize], len: usize) -> Vec<bool> {
    let mut m = vec![false; len];
    indices.iter().for_each(|&i| m[i] = true);
    m
}

/// Every coherence measure of a two-frame dictionary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub mutual: f64,
    /// `babel[m - 1]` is the Babel function at `m`, for `m = 1..num_atoms-1`.
    pub babel: Vec<f64>,
    pub cluster_12: f64,
    pub cluster_21: f64,
    /// `None` when the frames are not Parseval.
    pub kappa_lower: Option<f64>,
    pub kappa_upper: Option<f64>,
}

/// Magnitudes of the Gram matrix `|<phi_i, phi_j>|`, after checking that
/// every atom has unit norm.
pub fn normalized_gram_magnitudes<D: Dictionary + ?Sized>(dict: &D) -> Result<DMatrix<f64>> {
    let a = dict.dense()?;
    let g = a.adjoint() * &a;
    for i in 0..g.nrows() {
        let norm = g[(i, i)].re.sqrt();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Unnormalized { index: i, norm });
        }
    }
    Ok(g.map(|v| v.norm()))
}

/// `max_{i != j} |<phi_i, phi_j>|`; zero for a single atom.
pub fn mutual_coherence<D: Dictionary + ?Sized>(dict: &D) -> Result<f64> {
    let g = normalized_gram_magnitudes(dict)?;
    Ok(max_off_diagonal(&g))
}

fn max_off_diagonal(g: &DMatrix<f64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            if i != j {
                best = best.max(g[(i, j)]);
            }
        }
    }
    best
}

/// For each column `j`, off-diagonal Gram magnitudes sorted descending.
fn sorted_columns(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..g.ncols())
        .map(|j| {
            let mut col: Vec<f64> = (0..g.nrows()).filter(|&i| i != j).map(|i| g[(i, j)]).collect();
            col.sort_by(|a, b| b.total_cmp(a));
            col
        })
        .collect()
}

/// Babel (cumulative coherence) function
/// `max_{|L| = m} max_{j not in L} sum_{i in L} |<phi_i, phi_j>|`,
/// evaluated as the largest sum of the `m` biggest off-diagonal entries of a
/// Gram column.
pub fn babel_function<D: Dictionary + ?Sized>(dict: &D, m: usize) -> Result<f64> {
    let p = dict.num_atoms();
    if m == 0 || m >= p {
        return Err(Error::InvalidParameter(format!("babel order m={m} must lie in 1..={}", p.saturating_sub(1))));
    }
    let g = normalized_gram_magnitudes(dict)?;
    Ok(sorted_columns(&g).iter().map(|c| c[..m].iter().sum::<f64>()).fold(0.0, f64::max))
}

/// The Babel function for every `m = 1..num_atoms-1`.
pub fn babel_sequence<D: Dictionary + ?Sized>(dict: &D) -> Result<Vec<f64>> {
    let g = normalized_gram_magnitudes(dict)?;
    let cols = sorted_columns(&g);
    let p = dict.num_atoms();
    let mut out = vec![0.0f64; p.saturating_sub(1)];
    for col in &cols {
        let mut acc = 0.0;
        for (m, v) in col.iter().enumerate() {
            acc += v;
            out[m] = out[m].max(acc);
        }
    }
    Ok(out)
}

/// Structured `p`-Babel function
/// `max_{L in family} ( max_{j not in L} sum_{i in L} |<phi_i, phi_j>|^p )^{1/p}`.
pub fn structured_babel<D: Dictionary + ?Sized>(dict: &D, family: &[Vec<usize>], p: f64) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("structured Babel needs a non-empty family".into()));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent p={p} must satisfy 1 <= p < inf")));
    }
    let n = dict.num_atoms();
    for set in family {
        validate_indices(set, n)?;
    }
    let g = normalized_gram_magnitudes(dict)?;
    let mut best = 0.0f64;
    for set in family {
        let inside = mask(set, n);
        for j in (0..n).filter(|&j| !inside[j]) {
            let s: f64 = set.iter().map(|&i| g[(i, j)].powf(p)).sum();
            best = best.max(s.powf(1.0 / p));
        }
    }
    Ok(best)
}

/// Cluster coherences `(mu_c(L1, Phi1; Phi2), mu_c(Phi1; L2, Phi2))`:
/// `max_j sum_{i in L1} |<phi_1i, phi_2j>|` and
/// `max_i sum_{j in L2} |<phi_1i, phi_2j>|`. Atoms need not be normalized.
pub fn cluster_coherence(dict: &ConcatDictionary, spec: &ClusterSpec) -> Result<(f64, f64)> {
    let (n1, n2) = (dict.first().num_atoms(), dict.second().num_atoms());
    spec.validate(n1, n2)?;
    let cross = cross_gram_magnitudes(dict)?;
    Ok(cluster_from_cross(&cross, spec))
}

/// `|<phi_1i, phi_2j>|` as an `n1 x n2` matrix.
pub fn cross_gram_magnitudes(dict: &ConcatDictionary) -> Result<DMatrix<f64>> {
    let a = dict.first().dense_ref()?;
    let b = dict.second().dense_ref()?;
    Ok((a.adjoint() * b).map(|v| v.norm()))
}

pub(crate) fn cluster_from_cross(cross: &DMatrix<f64>, spec: &ClusterSpec) -> (f64, f64) {
    let c12 = (0..cross.ncols())
        .map(|j| spec.lambda1.iter().map(|&i| cross[(i, j)]).sum::<f64>())
        .fold(0.0, f64::max);
    let c21 = (0..cross.nrows())
        .map(|i| spec.lambda2.iter().map(|&j| cross[(i, j)]).sum::<f64>())
        .fold(0.0, f64::max);
    (c12, c21)
}

pub(crate) fn ensure_parseval<D: Dictionary + ?Sized>(frame: &D) -> Result<()> {
    let check = is_parseval(frame, PARSEVAL_PROBES, PARSEVAL_TOL);
    if check.parseval {
        Ok(())
    } else {
        Err(Error::NotParseval { defect: check.max_defect })
    }
}

/// Certified bounds `(kappa_lower, kappa_upper)` on the joint concentration
/// `sup_x (||1_L1 Phi1^H x||_1 + ||1_L2 Phi2^H x||_1) / (||Phi1^H x||_1 + ||Phi2^H x||_1)`.
///
/// The lower bound is the best ratio over `num_probes` seeded Gaussian
/// signals and every atom of both frames; the upper bound is the larger of
/// the two cluster coherences.
pub fn joint_concentration_bounds(
    dict: &ConcatDictionary,
    spec: &ClusterSpec,
    num_probes: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if num_probes == 0 {
        return Err(Error::InvalidParameter("num_probes must be at least 1".into()));
    }
    ensure_parseval(dict.first())?;
    ensure_parseval(dict.second())?;
    let (n1, n2) = (dict.first().num_atoms(), dict.second().num_atoms());
    let (m1, m2) = spec.masks(n1, n2)?;
    let (c12, c21) = cluster_coherence(dict, spec)?;
    let upper = c12.max(c21);

    let n = dict.ambient_dim();
    let mut coeffs = vec![C64::new(0.0, 0.0); n1 + n2];
    let mut ratio = |x: &[C64]| -> f64 {
        dict.analyze_into(x, &mut coeffs);
        let (a, b) = coeffs.split_at(n1);
        let total: f64 = coeffs.iter().map(|v| v.norm()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let inside: f64 = a.iter().zip(&m1).filter(|(_, &m)| m).map(|(v, _)| v.norm()).sum::<f64>()
            + b.iter().zip(&m2).filter(|(_, &m)| m).map(|(v, _)| v.norm()).sum::<f64>();
        inside / total
    };

    let mut lower = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..num_probes {
        let x: Vec<C64> = (0..n)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        lower = lower.max(ratio(&x));
    }
    for frame in [dict.first(), dict.second()] {
        let atoms = frame.dense_ref()?;
        for j in 0..atoms.ncols() {
            let col: Vec<C64> = atoms.column(j).iter().copied().collect();
            lower = lower.max(ratio(&col));
        }
    }
    Ok((lower, upper))
}

/// Full report. Cluster measures use `spec`; the joint concentration bounds
/// are omitted (`None`) when either frame fails the Parseval check.
pub fn coherence_report(
    dict: &ConcatDictionary,
    spec: &ClusterSpec,
    num_probes: usize,
    seed: u64,
) -> Result<CoherenceReport> {
    let mutual = mutual_coherence(dict)?;
    let babel = babel_sequence(dict)?;
    let (cluster_12, cluster_21) = cluster_coherence(dict, spec)?;
    let (kappa_lower, kappa_upper) = match joint_concentration_bounds(dict, spec, num_probes, seed) {
        Ok((lo, hi)) => (Some(lo), Some(hi)),
        Err(Error::NotParseval { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(CoherenceReport { mutual, babel, cluster_12, cluster_21, kappa_lower, kappa_upper })
}
