use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::coherence::mutual_coherence;
use crate::frames::norm2;
use crate::separate::support_counts;
use crate::solvers::{bp_synthesis, SolverCertificate, SolverConfig};
use crate::{ConcatDictionary, Dictionary, Error, Frame, Result, Signal, C64};

/// Relative `l2` error at which a recovery counts as exact.
pub const SUCCESS_TOL: f64 = 1e-5;

/// Sparsity sweep over the Fourier/Dirac pair of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Inclusive range of total planted sparsity.
    pub k_range: (usize, usize),
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.k_range;
        if self.n == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if lo > hi || hi > 2 * self.n {
            return Err(Error::InvalidParameter(format!("k range {lo}..={hi} outside 0..={}", 2 * self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseTransitionRow {
    pub k: usize,
    pub success_rate: f64,
    pub mean_rel_error: f64,
    /// `k < (sqrt(2) - 1/2) sqrt(n)`.
    pub below_theorem_bound: bool,
}

/// Independent RNG stream for one trial.
pub fn trial_rng(seed: u64, k: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | trial as u64);
    rng
}

/// `k` unit-modulus coefficients with uniform phases on a support drawn
/// uniformly without replacement from `0..p`.
pub fn plant_sparse(rng: &mut impl Rng, p: usize, k: usize) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); p];
    for i in sample(rng, p, k) {
        c[i] = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
    }
    c
}

/// Sparsity bound for exact recovery with the Fourier/Dirac pair.
pub fn theorem_bound(n: usize) -> f64 {
    (2f64.sqrt() - 0.5) * (n as f64).sqrt()
}

/// Outcome of one recovery trial, passed to the observer of
/// [`phase_transition_with`].
#[derive(Debug)]
pub struct Trial<'a> {
    pub k: usize,
    pub trial: usize,
    pub rel_error: f64,
    pub certificate: &'a SolverCertificate,
}

pub fn phase_transition(config: &ExperimentConfig) -> Result<Vec<PhaseTransitionRow>> {
    phase_transition_with(config, &SolverConfig::default(), |_| {})
}

/// Plants `k`-sparse coefficient vectors in `[Fourier | Dirac]`, recovers
/// them with [`bp_synthesis`] and tallies exact recoveries per `k`.
pub fn phase_transition_with(
    config: &ExperimentConfig,
    solver: &SolverConfig,
    mut observe: impl FnMut(&Trial<'_>),
) -> Result<Vec<PhaseTransitionRow>> {
    config.validate()?;
    let n = config.n;
    let dict = ConcatDictionary::new(Frame::fourier(n)?, Frame::dirac(n)?)?;
    let mut rows = Vec::new();
    for k in config.k_range.0..=config.k_range.1 {
        let (mut successes, mut total_error) = (0usize, 0.0);
        for trial in 0..config.trials {
            let mut rng = trial_rng(config.seed, k, trial);
            let planted = plant_sparse(&mut rng, 2 * n, k);
            let x = dict.synthesize(&planted)?;
            let (c, certificate) = bp_synthesis(&dict, &x, solver)?;
            let diff: Vec<C64> = c.values().iter().zip(&planted).map(|(a, b)| a - b).collect();
            let scale = norm2(&planted);
            let rel_error = if scale == 0.0 { norm2(&diff) } else { norm2(&diff) / scale };
            if rel_error <= SUCCESS_TOL {
                successes += 1;
            }
            total_error += rel_error;
            observe(&Trial { k, trial, rel_error, certificate: &certificate });
        }
        rows.push(PhaseTransitionRow {
            k,
            success_rate: successes as f64 / config.trials as f64,
            mean_rel_error: total_error / config.trials as f64,
            below_theorem_bound: (k as f64) < theorem_bound(n),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyRow {
    /// `spike`, `comb`, `sparse_time` or `sparse_frequency`.
    pub signal: String,
    pub count_time: usize,
    pub count_frequency: usize,
    pub sum: usize,
    pub lower_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintySummary {
    pub n: usize,
    pub trials: usize,
    pub lower_bound: f64,
    pub min_sum: usize,
    pub violations: usize,
    /// Whether the period-`sqrt(n)` comb attains the bound; `None` when `n`
    /// is not a perfect square.
    pub comb_attains_bound: Option<bool>,
}

/// Exact integer square root, if any.
pub fn perfect_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Dirac comb of period `period`.
pub fn dirac_comb(n: usize, period: usize) -> Vec<f64> {
    (0..n).map(|t| if t % period == 0 { 1.0 } else { 0.0 }).collect()
}

/// Checks `||x||_0 + ||x_hat||_0 >= 2 sqrt(n)` on a spike, the comb (for
/// square `n`) and `trials` random signals sparse in time or in frequency.
pub fn uncertainty_experiment(n: usize, trials: usize, seed: u64) -> Result<(Vec<UncertaintyRow>, UncertaintySummary)> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let (dirac, fourier) = (Frame::dirac(n)?, Frame::fourier(n)?);
    let lower_bound = 2.0 / mutual_coherence(&ConcatDictionary::new(dirac.clone(), fourier.clone())?)?;
    let mut rows = Vec::new();
    let mut record = |name: &str, x: &Signal| -> Result<()> {
        let (count_time, count_frequency) = support_counts(x, &dirac, &fourier)?;
        let sum = count_time + count_frequency;
        let holds = sum as f64 >= lower_bound * (1.0 - 1e-9);
        rows.push(UncertaintyRow { signal: name.into(), count_time, count_frequency, sum, lower_bound, holds });
        Ok(())
    };

    let mut spike = vec![0.0; n];
    spike[0] = 1.0;
    record("spike", &Signal::from_real(&spike)?)?;
    let root = perfect_sqrt(n);
    if let Some(r) = root {
        record("comb", &Signal::from_real(&dirac_comb(n, r))?)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let size = rng.random_range(1..=n);
        let mut values = vec![C64::new(0.0, 0.0); n];
        for i in sample(&mut rng, n, size) {
            values[i] = C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        }
        let (name, x) = if trial % 2 == 0 {
            ("sparse_time", values)
        } else {
            ("sparse_frequency", fourier.synthesize(&values)?.into_values())
        };
        record(name, &Signal::from_vec(x)?)?;
    }
    let min_sum = rows.iter().map(|r| r.sum).min().unwrap_or(0);
    let violations = rows.iter().filter(|r| !r.holds).count();
    let comb_attains_bound =
        root.map(|r| rows.iter().any(|row| row.signal == "comb" && row.sum == 2 * r));
    let summary = UncertaintySummary { n, trials, lower_bound, min_sum, violations, comb_attains_bound };
    Ok((rows, summary))
}
