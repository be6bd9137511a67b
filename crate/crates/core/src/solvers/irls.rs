//! Iteratively reweighted least squares for the `l1` programs.
//!
//! Each step minimizes the quadratic majorizer of the smoothed norm
//! `sum sqrt(|u_i|^2 + eps^2)` at the current point, so the smoothed
//! objective never increases. `eps` shrinks by a factor of ten whenever the
//! iterate stalls relative to `sqrt(eps) / 100`. At every such stage the
//! equality programs try to finish exactly: they solve least squares on the
//! detected support and build a dual certificate bounding the duality gap.
//! At the smallest `eps` the iteration continues as long as the certified
//! gap keeps shrinking, since complex minimizers need not be vertices and the
//! support solve alone cannot always certify them.

use nalgebra::{DMatrix, DVector};

use super::linalg::least_norm;
use super::{bpdn_synthesis, check_signal, SolverCertificate, SolverConfig, TraceEntry};
use crate::coherence::ensure_parseval;
use crate::frames::{inner, l1_norm, norm2, Dictionary};
use crate::{CoefficientVector, ConcatDictionary, Error, Frame, Result, Signal, C64};

const EPS_START: f64 = 1.0;
const EPS_MIN: f64 = 1e-10;
/// Coefficients above `SUPPORT_FACTOR * eps` count as support when polishing.
const SUPPORT_FACTOR: f64 = 100.0;
/// Round-off allowance for the majorize-minimize decrease.
const MONOTONE_SLACK: f64 = 1e-13;
/// At the smallest `eps`, stop once a window of this many steps fails to
/// shrink the best gap by `FLOOR_PROGRESS`.
const FLOOR_WINDOW: usize = 1000;
const FLOOR_PROGRESS: f64 = 0.5;
/// Steps between support polishes at the smallest `eps`.
const POLISH_EVERY: usize = 100;

fn smoothed(values: &[C64], eps: f64) -> f64 {
    let e2 = eps * eps;
    values.iter().map(|v| (v.norm_sqr() + e2).sqrt()).sum()
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

struct Log {
    enabled: bool,
    entries: Vec<TraceEntry>,
}

impl Log {
    fn new(enabled: bool) -> Self {
        Self { enabled, entries: Vec::new() }
    }

    fn push(&mut self, iteration: usize, objective: f64, feasibility_defect: impl FnOnce() -> f64) {
        if self.enabled {
            self.entries.push(TraceEntry { iteration, objective, feasibility_defect: feasibility_defect() });
        }
    }

    /// Appends a final exact-objective entry if it keeps the log monotone.
    fn push_final(&mut self, iteration: usize, objective: f64, defect: f64) {
        if self.enabled && self.entries.last().is_none_or(|e| objective <= e.objective) {
            self.entries.push(TraceEntry { iteration, objective, feasibility_defect: defect });
        }
    }
}

/// Solves a Hermitian positive definite system with one refinement step,
/// falling back to a pseudo-inverse when the factorization fails.
fn hermitian_solve(m: &DMatrix<C64>, b: &DVector<C64>) -> Result<DVector<C64>> {
    match m.clone().cholesky() {
        Some(chol) => {
            let mut z = chol.solve(b);
            let r = b - m * &z;
            z += chol.solve(&r);
            Ok(z)
        }
        None => least_norm(m, b)
            .map(|(z, _)| z)
            .ok_or_else(|| Error::Numerical("singular reweighted system".into())),
    }
}

fn wrap<D: Dictionary + ?Sized>(dict: &D, values: Vec<C64>) -> Result<CoefficientVector> {
    match dict.block_split() {
        Some(split) => CoefficientVector::with_split(values, split),
        None => Ok(CoefficientVector::new(values)),
    }
}

/// A feasible point with a bound on its relative duality gap.
struct Candidate {
    values: Vec<C64>,
    gap: f64,
    defect: f64,
}

impl Candidate {
    /// Feasible points first, then the smaller gap.
    fn better_than(&self, other: &Candidate, feasibility_tol: f64) -> bool {
        let (a, b) = (self.defect <= feasibility_tol, other.defect <= feasibility_tol);
        if a != b {
            return a;
        }
        self.gap < other.gap
    }
}

fn keep_best(best: &mut Option<Candidate>, cand: Candidate, feasibility_tol: f64) {
    if best.as_ref().is_none_or(|b| cand.better_than(b, feasibility_tol)) {
        *best = Some(cand);
    }
}

/// Basis pursuit on the synthesis side:
/// `min ||c||_1` subject to `x = Phi c`.
///
/// The result is scale-equivariant: `x` is normalized internally. On
/// success `certificate.final_residual` bounds the relative suboptimality of
/// `||c||_1`. Non-convergence is reported in the certificate, not as an error.
pub fn bp_synthesis<D: Dictionary + ?Sized>(
    dict: &D,
    x: &Signal,
    config: &SolverConfig,
) -> Result<(CoefficientVector, SolverCertificate)> {
    config.validate()?;
    check_signal(dict, x)?;
    let p = dict.num_atoms();
    let scale = x.norm2();
    if scale == 0.0 {
        return Ok((wrap(dict, vec![zero(); p])?, SolverCertificate::trivial()));
    }
    let xv = DVector::from_iterator(x.len(), x.values().iter().map(|v| v / scale));
    let a = dict.dense()?;
    let defect = |c: &[C64]| (&xv - &a * DVector::from_column_slice(c)).norm();

    let step = |w: &[f64]| -> Result<(Vec<C64>, DVector<C64>)> {
        let y = hermitian_solve(&dict.weighted_gram(w)?, &xv)?;
        let mut c = vec![zero(); p];
        dict.analyze_into(y.as_slice(), &mut c);
        c.iter_mut().zip(w).for_each(|(ci, wi)| *ci *= *wi);
        Ok((c, y))
    };

    let mut log = Log::new(config.record_trace);
    let mut eps = EPS_START;
    let mut w = vec![1.0; p];
    let (mut c, mut y) = step(&w)?;
    let mut objective = smoothed(&c, eps);
    log.push(0, objective, || defect(&c));

    let mut best: Option<Candidate> = None;
    let (mut next_polish, mut window_end, mut window_gap) = (0, 0, f64::INFINITY);
    let mut iterations = 0;
    for it in 1..=config.max_iterations {
        iterations = it;
        for (wi, ci) in w.iter_mut().zip(&c) {
            *wi = (ci.norm_sqr() + eps * eps).sqrt();
        }
        let (c_new, y_new) = step(&w)?;
        let obj_new = smoothed(&c_new, eps);
        if obj_new > objective * (1.0 + MONOTONE_SLACK) {
            // round-off floor: the majorizer can no longer make progress
            break;
        }
        let change = diff_norm(&c_new, &c) / norm2(&c_new).max(f64::MIN_POSITIVE);
        (c, y, objective) = (c_new, y_new, obj_new);
        log.push(it, objective, || defect(&c));

        // at the floor, keep iterating while the dual still catches up with the primal
        let stalled = change < eps.sqrt() / 100.0;
        if stalled || eps <= EPS_MIN {
            keep_best(&mut best, irls_synthesis_candidate(&a, &xv, &c, &y, defect(&c)), config.feasibility_tol);
            if stalled && (eps > EPS_MIN || it >= next_polish) {
                if let Some(cand) = polish_synthesis(&a, &xv, &c, &y, eps) {
                    keep_best(&mut best, cand, config.feasibility_tol);
                }
                next_polish = it + POLISH_EVERY;
            }
            let done = best
                .as_ref()
                .is_some_and(|b| b.gap <= config.convergence_tol && b.defect <= config.feasibility_tol);
            let gap = best.as_ref().map_or(f64::INFINITY, |b| b.gap);
            if eps <= EPS_MIN && it >= window_end {
                if gap > window_gap * FLOOR_PROGRESS {
                    break;
                }
                (window_end, window_gap) = (it + FLOOR_WINDOW, gap);
            }
            if done || change == 0.0 {
                break;
            }
            if stalled && eps > EPS_MIN {
                eps = (eps / 10.0).max(EPS_MIN);
                objective = smoothed(&c, eps);
            }
        }
    }
    keep_best(&mut best, irls_synthesis_candidate(&a, &xv, &c, &y, defect(&c)), config.feasibility_tol);
    let best = best.expect("at least one candidate");
    log.push_final(iterations, l1_norm(&best.values), best.defect);

    let values: Vec<C64> = best.values.iter().map(|v| v * scale).collect();
    let recon = dict.synthesize(&values)?;
    let feasibility_defect = norm2(&recon.sub(x)?.into_values()) / scale;
    let cert = SolverCertificate {
        iterations_used: iterations,
        final_residual: best.gap,
        feasibility_defect,
        converged: false,
        trace: log.entries,
    }
    .finish(config);
    Ok((wrap(dict, values)?, cert))
}

/// Relative gap of `c` certified by `y` rescaled into the dual ball.
fn synthesis_gap(a: &DMatrix<C64>, xv: &DVector<C64>, l1: f64, y: &DVector<C64>) -> f64 {
    if l1 == 0.0 {
        return 0.0;
    }
    let v = a.adjoint() * y;
    let m = v.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let dual = inner(y.as_slice(), xv.as_slice()).re / m;
    ((l1 - dual) / l1).max(0.0)
}

fn irls_synthesis_candidate(a: &DMatrix<C64>, xv: &DVector<C64>, c: &[C64], y: &DVector<C64>, defect: f64) -> Candidate {
    Candidate { values: c.to_vec(), gap: synthesis_gap(a, xv, l1_norm(c), y), defect }
}

/// Least squares on the detected support, certified by the reweighting dual
/// corrected to match the signs on the support (or by the minimum-norm dual).
fn polish_synthesis(a: &DMatrix<C64>, xv: &DVector<C64>, c: &[C64], y: &DVector<C64>, eps: f64) -> Option<Candidate> {
    let n = a.nrows();
    let mut support: Vec<usize> = (0..c.len()).filter(|&i| c[i].norm() > SUPPORT_FACTOR * eps).collect();
    if support.is_empty() {
        return None;
    }
    if support.len() > n {
        support.sort_by(|&i, &j| c[j].norm().total_cmp(&c[i].norm()));
        support.truncate(n);
        support.sort_unstable();
    }
    let a_s = a.select_columns(&support);
    let (z, residual) = least_norm(&a_s, xv)?;
    if z.iter().any(|v| v.norm() == 0.0) {
        return None;
    }
    let signs = z.map(|v| v / v.norm());
    let a_s_h = a_s.adjoint();
    let corrected = least_norm(&a_s_h, &(&signs - &a_s_h * y)).map(|(d, _)| y + d);
    let minimal = least_norm(&a_s_h, &signs).map(|(d, _)| d);
    let l1: f64 = z.iter().map(|v| v.norm()).sum();
    let gap = [corrected, minimal]
        .into_iter()
        .flatten()
        .map(|dual| synthesis_gap(a, xv, l1, &dual))
        .fold(f64::INFINITY, f64::min);
    let mut values = vec![zero(); c.len()];
    for (k, &j) in support.iter().enumerate() {
        values[j] = z[k];
    }
    Some(Candidate { values, gap, defect: residual })
}

fn check_pair(frame1: &Frame, frame2: &Frame, x: &Signal) -> Result<ConcatDictionary> {
    let dict = ConcatDictionary::new(frame1.clone(), frame2.clone())?;
    check_signal(&dict, x)?;
    ensure_parseval(frame1)?;
    ensure_parseval(frame2)?;
    Ok(dict)
}

fn both_orthonormal(frame1: &Frame, frame2: &Frame) -> bool {
    frame1.is_orthonormal_basis() && frame2.is_orthonormal_basis()
}

/// Basis pursuit on the analysis side:
/// `min ||Phi1^H x1||_1 + ||Phi2^H x2||_1` subject to `x1 + x2 = x`.
///
/// Both frames must be Parseval. `x2` is always returned as `x - x1`. For two
/// orthonormal bases the program coincides with [`bp_synthesis`] on
/// `[Phi1 | Phi2]`, which is what runs. Otherwise the coefficient pair is
/// eliminated onto a dense basis of the feasible directions, which costs a
/// singular value decomposition of size `p1 + p2`.
pub fn bp_analysis(
    frame1: &Frame,
    frame2: &Frame,
    x: &Signal,
    config: &SolverConfig,
) -> Result<(Signal, Signal, SolverCertificate)> {
    config.validate()?;
    let dict = check_pair(frame1, frame2, x)?;
    let shape = x.shape();
    let scale = x.norm2();
    if scale == 0.0 {
        return Ok((Signal::zeros(shape)?, Signal::zeros(shape)?, SolverCertificate::trivial()));
    }
    if both_orthonormal(frame1, frame2) {
        let (c, cert) = bp_synthesis(&dict, x, config)?;
        let x1 = frame1.synthesize(c.block1())?;
        let x2 = x.sub(&x1)?;
        return Ok((x1, x2, cert));
    }

    let (b1, b2) = (frame1.dense_ref()?, frame2.dense_ref()?);
    let (n, p1, p2) = (x.len(), b1.ncols(), b2.ncols());
    let xv = DVector::from_iterator(n, x.values().iter().map(|v| v / scale));

    // u = (Phi1^H x1, Phi2^H (x - x1)) ranges over b + range(K) with
    // K = [Phi1^H; -Phi2^H] and b = (0, Phi2^H x). K^H K = 2I, so the program
    // is basis pursuit on u against an orthonormal basis Q of the complement.
    let mut k = DMatrix::zeros(p1 + p2, n);
    k.rows_mut(0, p1).copy_from(&b1.adjoint());
    k.rows_mut(p1, p2).copy_from(&(-b2.adjoint()));
    let q = complement_basis(&k)?;
    let mut b = DVector::zeros(p1 + p2);
    b.rows_mut(p1, p2).copy_from(&(b2.adjoint() * &xv));
    let reduced = Frame::from_matrix(q.adjoint())?;
    let target = Signal::from_vec((q.adjoint() * &b).as_slice().to_vec())?;
    let (u, inner_cert) = bp_synthesis(&reduced, &target, config)?;

    // nearest split; its exact objective is measured against the dual bound
    let uv = DVector::from_column_slice(u.values());
    let x1v = (b1 * uv.rows(0, p1) - b2 * uv.rows(p1, p2) + &xv) * C64::new(0.5, 0.0);
    let j = l1_norm((b1.adjoint() * &x1v).as_slice()) + l1_norm((b2.adjoint() * (&xv - &x1v)).as_slice());
    let dual = u.l1_norm() * (1.0 - inner_cert.final_residual);
    let gap = if j == 0.0 { 0.0 } else { ((j - dual) / j).max(0.0) };

    let x1 = Signal::new(x1v.iter().map(|v| v * scale).collect(), shape)?;
    let x2 = x.sub(&x1)?;
    let cert = SolverCertificate {
        iterations_used: inner_cert.iterations_used,
        final_residual: gap,
        feasibility_defect: 0.0,
        converged: false,
        trace: inner_cert.trace.into_iter().map(|e| TraceEntry { feasibility_defect: 0.0, ..e }).collect(),
    }
    .finish(config);
    Ok((x1, x2, cert))
}

/// Orthonormal basis of the orthogonal complement of the range of `k`,
/// which must have orthogonal columns of equal norm.
fn complement_basis(k: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (m, n) = k.shape();
    let norm2 = k.column(0).norm_squared();
    let projector = DMatrix::identity(m, m) - k * k.adjoint() / C64::new(norm2, 0.0);
    let svd = projector.svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Numerical("complement basis".into()))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    Ok(u.select_columns(&order[..m - n]))
}

/// Denoising on the analysis side:
/// `min ||Phi1^H x1||_1 + ||Phi2^H x2||_1 + lambda ||x - x1 - x2||_2^2`.
///
/// Both frames must be Parseval. With two orthonormal bases the program is
/// [`bpdn_synthesis`] in coefficient space; otherwise reweighted least
/// squares runs on the stacked unknowns `(x1, x2)`, and
/// `certificate.final_residual` is the relative change of the last step.
pub fn bpdn_analysis(
    frame1: &Frame,
    frame2: &Frame,
    x: &Signal,
    config: &SolverConfig,
) -> Result<(Signal, Signal, SolverCertificate)> {
    config.require_lambda()?;
    let dict = check_pair(frame1, frame2, x)?;
    let shape = x.shape();
    let scale = x.norm2();
    if scale == 0.0 {
        return Ok((Signal::zeros(shape)?, Signal::zeros(shape)?, SolverCertificate::trivial()));
    }
    if both_orthonormal(frame1, frame2) {
        let (c, cert) = bpdn_synthesis(&dict, x, config)?;
        let (x1, x2) = dict.synthesize_components(c.values())?;
        return Ok((x1, x2, cert));
    }

    // x -> x / s turns lambda into lambda * s
    let lambda = config.lambda * scale;
    let n = x.len();
    let (b1, b2) = (frame1.dense_ref()?, frame2.dense_ref()?);
    let xv = DVector::from_iterator(n, x.values().iter().map(|v| v / scale));
    let two_l = C64::new(2.0 * lambda, 0.0);
    let rhs = DVector::from_fn(2 * n, |i, _| xv[i % n] * two_l);
    let eval = |stacked: &DVector<C64>, eps: f64| -> (f64, f64, DVector<C64>, DVector<C64>) {
        let (x1, x2) = (stacked.rows(0, n), stacked.rows(n, n));
        let u1 = b1.adjoint() * x1;
        let u2 = b2.adjoint() * x2;
        let misfit = (&xv - x1 - x2).norm();
        let obj = smoothed(u1.as_slice(), eps) + smoothed(u2.as_slice(), eps) + lambda * misfit * misfit;
        (obj, misfit, u1, u2)
    };

    let mut log = Log::new(config.record_trace);
    let mut eps = EPS_START;
    let mut stacked = DVector::from_fn(2 * n, |i, _| xv[i % n] * 0.5);
    let (mut objective, misfit, mut u1, mut u2) = eval(&stacked, eps);
    log.push(0, objective, || misfit);
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=config.max_iterations {
        iterations = it;
        let d1: Vec<f64> = u1.iter().map(|v| 1.0 / (v.norm_sqr() + eps * eps).sqrt()).collect();
        let d2: Vec<f64> = u2.iter().map(|v| 1.0 / (v.norm_sqr() + eps * eps).sqrt()).collect();
        let m1 = frame1.weighted_gram(&d1)?;
        let m2 = frame2.weighted_gram(&d2)?;
        let h = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            let diag = if r % n == c % n { two_l } else { zero() };
            match (r < n, c < n) {
                (true, true) => m1[(r, c)] + diag,
                (false, false) => m2[(r - n, c - n)] + diag,
                _ => diag,
            }
        });
        let next = hermitian_solve(&h, &rhs)?;
        let (obj_new, misfit, u1n, u2n) = eval(&next, eps);
        if obj_new > objective * (1.0 + MONOTONE_SLACK) {
            break;
        }
        change = (&next - &stacked).norm() / next.norm().max(f64::MIN_POSITIVE);
        (stacked, objective, u1, u2) = (next, obj_new, u1n, u2n);
        log.push(it, objective, || misfit);
        if eps > EPS_MIN && change < eps.sqrt() / 100.0 {
            eps = (eps / 10.0).max(EPS_MIN);
            objective = eval(&stacked, eps).0;
        } else if eps <= EPS_MIN && change <= config.convergence_tol {
            break;
        }
    }
    let x1 = Signal::new(stacked.rows(0, n).iter().map(|v| v * scale).collect(), shape)?;
    let x2 = Signal::new(stacked.rows(n, n).iter().map(|v| v * scale).collect(), shape)?;
    let final_residual = if eps <= EPS_MIN { change } else { change.max(eps) };
    let cert = SolverCertificate {
        iterations_used: iterations,
        final_residual,
        feasibility_defect: 0.0,
        converged: false,
        trace: log.entries,
    }
    .finish(config);
    Ok((x1, x2, cert))
}
