//! The `l0` oracle and the four `l1` separation programs.
//!
//! | program | form |
//! |---|---|
//! | [`bp_synthesis`] | `min ||c1||_1 + ||c2||_1` s.t. `x = Phi1 c1 + Phi2 c2` |
//! | [`bp_analysis`] | `min ||Phi1^H x1||_1 + ||Phi2^H x2||_1` s.t. `x = x1 + x2` |
//! | [`bpdn_synthesis`] | `min ||c||_1 + lambda ||x - Phi c||_2^2` |
//! | [`bpdn_analysis`] | `min ||Phi1^H x1||_1 + ||Phi2^H x2||_1 + lambda ||x - x1 - x2||_2^2` |
//!
//! The equality-constrained programs run iteratively reweighted least
//! squares (a majorize-minimize scheme on a smoothed `l1` norm), then polish
//! the detected support and certify the result with a dual vector. The
//! denoising programs run monotone FISTA with restarts whenever both frames
//! are orthonormal bases, and reweighted least squares otherwise.

mod fista;
mod irls;
mod l0;
mod linalg;

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::frames::{norm2, Dictionary};
use crate::{Error, Result, Signal, C64};

pub use fista::bpdn_synthesis;
pub use irls::{bp_analysis, bp_synthesis, bpdn_analysis};
pub use l0::{l0_oracle, L0_MAX_ATOMS, L0_MAX_SPARSITY};

/// Iterations used for operator-norm estimates.
pub const POWER_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Relative optimality residual at which an iteration stops.
    pub convergence_tol: f64,
    /// Allowed `||x - reconstruction||_2 / ||x||_2` for equality programs.
    pub feasibility_tol: f64,
    /// Weight of the quadratic misfit in the denoising programs.
    pub lambda: f64,
    pub seed: u64,
    /// Keep a per-iteration [`TraceEntry`] log in the certificate.
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            convergence_tol: 1e-9,
            feasibility_tol: 1e-8,
            lambda: 0.0,
            seed: 0,
            record_trace: false,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        if !in_unit(self.convergence_tol) || !in_unit(self.feasibility_tol) {
            return Err(Error::InvalidParameter("tolerances must lie in (0, 1)".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        Ok(())
    }

    fn require_lambda(&self) -> Result<()> {
        self.validate()?;
        if self.lambda > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("denoising needs lambda > 0; use the equality-constrained solver".into()))
        }
    }
}

/// One logged iteration.
///
/// `objective` is the quantity the solver decreases: the smoothed `l1`
/// objective for reweighted least squares, the exact objective for FISTA.
/// `feasibility_defect` is `||x - reconstruction|| / ||x||`; for the
/// denoising programs it is the relative data misfit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub feasibility_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverCertificate {
    pub iterations_used: usize,
    /// Relative duality gap (equality programs) or relative fixed-point
    /// residual (denoising programs).
    pub final_residual: f64,
    /// `||x - reconstruction|| / ||x||`. The denoising programs keep the
    /// misfit as an explicit residual, so their defect is zero.
    pub feasibility_defect: f64,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceEntry>,
}

impl SolverCertificate {
    fn trivial() -> Self {
        Self { iterations_used: 0, final_residual: 0.0, feasibility_defect: 0.0, converged: true, trace: Vec::new() }
    }

    fn finish(mut self, config: &SolverConfig) -> Self {
        self.converged =
            self.final_residual <= config.convergence_tol && self.feasibility_defect <= config.feasibility_tol;
        self
    }
}

/// Writes a trace as CSV with header `iteration,objective,feasibility_defect`.
pub fn write_trace_csv(path: &Path, trace: &[TraceEntry]) -> Result<()> {
    crate::io::write_rows_csv(path, trace)
}

/// Whether `trace` never increases by more than `rel_tol` of its scale.
pub fn trace_is_monotone(trace: &[TraceEntry], rel_tol: f64) -> bool {
    trace.windows(2).all(|w| w[1].objective <= w[0].objective + rel_tol * w[0].objective.abs().max(1e-300))
}

/// Estimates `||Phi||_2^2` (the largest eigenvalue of `Phi^H Phi`) by seeded
/// power iteration.
pub fn operator_norm_sq<D: Dictionary + ?Sized>(dict: &D, iterations: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = dict.num_atoms();
    let mut v: Vec<C64> =
        (0..p).map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect();
    let mut image = vec![C64::new(0.0, 0.0); dict.ambient_dim()];
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let norm = norm2(&v);
        if norm == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|c| *c /= norm);
        dict.synthesize_into(&v, &mut image);
        estimate = norm2(&image).powi(2);
        dict.analyze_into(&image, &mut v);
    }
    estimate
}

fn check_signal<D: Dictionary + ?Sized>(dict: &D, x: &Signal) -> Result<()> {
    if x.len() != dict.ambient_dim() {
        return Err(Error::LengthMismatch { expected: dict.ambient_dim(), actual: x.len() });
    }
    Ok(())
}

/// Complex soft thresholding: shrinks the modulus by `t`, keeps the phase.
pub fn soft_threshold(v: C64, t: f64) -> C64 {
    let m = v.norm();
    if m <= t {
        C64::new(0.0, 0.0)
    } else {
        v * ((m - t) / m)
    }
}
