//! Two-component separation with error-bound diagnostics.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::coherence::{cluster_coherence, mutual_coherence, ClusterSpec};
use crate::frames::{is_parseval, l1_norm, zero_threshold, Dictionary};
use crate::io::{write_json, write_pgm, write_signal_csv};
use crate::solvers::{bp_analysis, bp_synthesis, bpdn_analysis, bpdn_synthesis, SolverCertificate, SolverConfig};
use crate::{CoefficientVector, ConcatDictionary, Error, Frame, Result, Signal};

/// Which of the four separation programs to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    SynthesisEq,
    AnalysisEq,
    SynthesisDenoise,
    AnalysisDenoise,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::SynthesisEq, Mode::AnalysisEq, Mode::SynthesisDenoise, Mode::AnalysisDenoise];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::SynthesisEq => "synthesis_eq",
            Mode::AnalysisEq => "analysis_eq",
            Mode::SynthesisDenoise => "synthesis_denoise",
            Mode::AnalysisDenoise => "analysis_denoise",
        }
    }

    pub fn is_denoising(&self) -> bool {
        matches!(self, Mode::SynthesisDenoise | Mode::AnalysisDenoise)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown mode '{s}'")))
    }
}

/// `2 delta / (1 - 2 mu)` when `mu < 1/2`, otherwise no information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Value(f64),
    Infeasible,
}

impl Bound {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Bound::Value(v) => Some(v),
            Bound::Infeasible => None,
        }
    }
}

/// Serializes as a number or the string `"Infeasible"`.
impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Bound::Value(v) => s.serialize_f64(v),
            Bound::Infeasible => s.serialize_str("Infeasible"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub delta: f64,
    /// Larger of the two cluster coherences.
    pub mu_c: f64,
    pub bound: Bound,
    /// Bound through the certified upper estimate of the joint concentration;
    /// `Infeasible` when the frames are not Parseval.
    pub kappa_bound: Bound,
    /// `delta` was computed from recovered rather than true components.
    pub estimated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationResult {
    pub component1: Signal,
    pub component2: Signal,
    /// `x - component1 - component2`: the removed noise for the denoising
    /// modes, round-off for the equality modes.
    pub residual: Signal,
    /// Coefficients `(c1, c2)` for the synthesis modes.
    pub coefficients: Option<CoefficientVector>,
    pub certificate: SolverCertificate,
    pub diagnostics: Option<BoundReport>,
}

impl SeparationResult {
    /// Writes `component1`, `component2` and `residual` as CSV (plus PGM for
    /// 2D signals, residual offset by 0.5), `certificate.json` and
    /// `bound_report.json` (`null` without diagnostics).
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, signal, offset) in [
            ("component1", &self.component1, 0.0),
            ("component2", &self.component2, 0.0),
            ("residual", &self.residual, 0.5),
        ] {
            write_signal_csv(&dir.join(format!("{name}.csv")), signal)?;
            if signal.shape().is_grid() {
                write_pgm(&dir.join(format!("{name}.pgm")), signal, offset)?;
            }
        }
        if let Some(c) = &self.coefficients {
            write_signal_csv(&dir.join("coefficients.csv"), &Signal::from_vec(c.values().to_vec())?)?;
        }
        write_json(&dir.join("certificate.json"), &self.certificate)?;
        write_json(&dir.join("bound_report.json"), &self.diagnostics)?;
        Ok(())
    }
}

fn pair(frame1: &Frame, frame2: &Frame) -> Result<ConcatDictionary> {
    ConcatDictionary::new(frame1.clone(), frame2.clone())
}

/// `delta = ||1_{L1^c} Phi1^H x1||_1 + ||1_{L2^c} Phi2^H x2||_1`.
pub fn relative_sparsity(frame1: &Frame, frame2: &Frame, x1: &Signal, x2: &Signal, spec: &ClusterSpec) -> Result<f64> {
    let (m1, m2) = spec.masks(frame1.num_atoms(), frame2.num_atoms())?;
    let u1 = frame1.analyze(x1)?;
    let u2 = frame2.analyze(x2)?;
    let tail = |u: &CoefficientVector, mask: &[bool]| -> f64 {
        u.values().iter().zip(mask).filter(|(_, &m)| !m).map(|(v, _)| v.norm()).sum()
    };
    Ok(tail(&u1, &m1) + tail(&u2, &m2))
}

/// `2 delta / (1 - 2 mu_c)` for `mu_c < 1/2`; `Infeasible` otherwise.
pub fn error_bound(delta: f64, mu_c: f64) -> Bound {
    if mu_c < 0.5 && delta.is_finite() {
        Bound::Value(2.0 * delta / (1.0 - 2.0 * mu_c))
    } else {
        Bound::Infeasible
    }
}

/// Diagnostics for a candidate pair `(x1, x2)` and clusters `spec`.
pub fn bound_report(
    frame1: &Frame,
    frame2: &Frame,
    x1: &Signal,
    x2: &Signal,
    spec: &ClusterSpec,
    estimated: bool,
) -> Result<BoundReport> {
    let delta = relative_sparsity(frame1, frame2, x1, x2, spec)?;
    let (c12, c21) = cluster_coherence(&pair(frame1, frame2)?, spec)?;
    let mu_c = c12.max(c21);
    let parseval = [frame1, frame2].iter().all(|f| is_parseval(*f, 8, 1e-8).parseval);
    // the certified kappa upper bound is mu_c itself
    let kappa_bound = if parseval { error_bound(delta, mu_c) } else { Bound::Infeasible };
    Ok(BoundReport { delta, mu_c, bound: error_bound(delta, mu_c), kappa_bound, estimated })
}

/// Runs one of the four programs on `x`. With `cluster_spec`, the result
/// carries a [`BoundReport`] whose `delta` is estimated from the recovered
/// components; the components themselves do not depend on `cluster_spec`.
pub fn separate(
    x: &Signal,
    frame1: &Frame,
    frame2: &Frame,
    mode: Mode,
    config: &SolverConfig,
    cluster_spec: Option<&ClusterSpec>,
) -> Result<SeparationResult> {
    let dict = pair(frame1, frame2)?;
    let (component1, component2, coefficients, certificate) = match mode {
        Mode::SynthesisEq | Mode::SynthesisDenoise => {
            let (c, cert) = if mode == Mode::SynthesisEq {
                bp_synthesis(&dict, x, config)?
            } else {
                bpdn_synthesis(&dict, x, config)?
            };
            let (x1, x2) = dict.synthesize_components(c.values())?;
            (x1, x2, Some(c), cert)
        }
        Mode::AnalysisEq => {
            let (x1, x2, cert) = bp_analysis(frame1, frame2, x, config)?;
            (x1, x2, None, cert)
        }
        Mode::AnalysisDenoise => {
            let (x1, x2, cert) = bpdn_analysis(frame1, frame2, x, config)?;
            (x1, x2, None, cert)
        }
    };
    let (component1, component2) = (component1.reshape(x.shape())?, component2.reshape(x.shape())?);
    let residual = x.sub(&component1)?.sub(&component2)?;
    let diagnostics = match cluster_spec {
        Some(spec) => Some(bound_report(frame1, frame2, &component1, &component2, spec, true)?),
        None => None,
    };
    Ok(SeparationResult { component1, component2, residual, coefficients, certificate, diagnostics })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    /// `||x1* - x1||_2 + ||x2* - x2||_2` against the truth.
    pub lhs: f64,
    pub bound: Bound,
    /// `lhs <= bound + 1e-6`, or vacuously true when the bound is infeasible.
    pub holds: bool,
    pub report: BoundReport,
}

/// Compares a separation against the true components, with `delta` taken
/// from the truth.
pub fn verify_bound(
    frame1: &Frame,
    frame2: &Frame,
    result: &SeparationResult,
    truth1: &Signal,
    truth2: &Signal,
    spec: &ClusterSpec,
) -> Result<BoundCheck> {
    let lhs = result.component1.sub(truth1)?.norm2() + result.component2.sub(truth2)?.norm2();
    let report = bound_report(frame1, frame2, truth1, truth2, spec, false)?;
    let holds = match report.bound {
        Bound::Value(b) => lhs <= b + 1e-6,
        Bound::Infeasible => true,
    };
    Ok(BoundCheck { lhs, bound: report.bound, holds, report })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyCheck {
    pub count1: usize,
    pub count2: usize,
    /// `2 / mu([Phi1 | Phi2])`.
    pub lower_bound: f64,
    pub holds: bool,
}

/// Counts the supports of `Phi1^H x` and `Phi2^H x` (default zero
/// threshold) and compares their sum with `2 / mu`. Both frames must be
/// orthonormal bases and `x` nonzero.
pub fn uncertainty_check(x: &Signal, frame1: &Frame, frame2: &Frame) -> Result<UncertaintyCheck> {
    if !frame1.is_orthonormal_basis() || !frame2.is_orthonormal_basis() {
        return Err(Error::InvalidParameter("uncertainty_check needs two orthonormal bases".into()));
    }
    if x.is_zero() {
        return Err(Error::InvalidParameter("uncertainty_check needs a nonzero signal".into()));
    }
    let dict = pair(frame1, frame2)?;
    let (count1, count2) = support_counts(x, frame1, frame2)?;
    let lower_bound = 2.0 / mutual_coherence(&dict)?;
    // the relative slack absorbs round-off in mu at exact equality
    let holds = (count1 + count2) as f64 >= lower_bound * (1.0 - 1e-9);
    Ok(UncertaintyCheck { count1, count2, lower_bound, holds })
}

/// Support sizes of `Phi1^H x` and `Phi2^H x` at the default zero threshold.
pub fn support_counts(x: &Signal, frame1: &Frame, frame2: &Frame) -> Result<(usize, usize)> {
    let count = |u: CoefficientVector| u.support(zero_threshold(u.values())).len();
    Ok((count(frame1.analyze(x)?), count(frame2.analyze(x)?)))
}

/// Smallest index sets carrying `fraction` of each component's analysis
/// `l1` mass, chosen greedily by decreasing modulus (ties by index).
pub fn default_cluster_spec(frame1: &Frame, frame2: &Frame, x1: &Signal, x2: &Signal, fraction: f64) -> Result<ClusterSpec> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("fraction {fraction} outside [0, 1]")));
    }
    let pick = |u: CoefficientVector| -> Vec<usize> {
        let total = l1_norm(u.values());
        let mut order: Vec<usize> = (0..u.len()).collect();
        order.sort_by(|&a, &b| u.values()[b].norm().total_cmp(&u.values()[a].norm()).then(a.cmp(&b)));
        let mut mass = 0.0;
        let mut chosen = Vec::new();
        for i in order {
            if mass >= fraction * total {
                break;
            }
            mass += u.values()[i].norm();
            chosen.push(i);
        }
        chosen.sort_unstable();
        chosen
    };
    Ok(ClusterSpec::new(pick(frame1.analyze(x1)?), pick(frame2.analyze(x2)?)))
}
