use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::frames::inner;
use crate::io::{write_json, write_pgm, write_signal_csv};
use crate::separate::{separate, Mode, SeparationResult};
use crate::solvers::SolverConfig;
use crate::{Error, Frame, Result, Signal};

/// Synthetic point/line scene separated with `haar2d + dct2d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub size: usize,
    pub points: usize,
    pub lines: usize,
    pub sigma: f64,
    pub seed: u64,
    /// Defaults to [`default_lambda`].
    pub lambda: Option<f64>,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig { size: 64, points: 10, lines: 3, sigma: 0.05, seed: 0, lambda: None }
    }
}

/// `lambda` whose soft threshold `1 / (2 lambda)` is `sigma / sqrt(2)`
/// (`sigma` floored at 0.01): the noise share per basis of a two-basis
/// dictionary.
pub fn default_lambda(sigma: f64) -> f64 {
    let threshold = sigma.max(0.01) / std::f64::consts::SQRT_2;
    1.0 / (2.0 * threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub points: Signal,
    pub lines: Signal,
    pub noise: Signal,
    /// `points + lines + noise`.
    pub image: Signal,
}

/// Single-pixel dots and straight segments of unit intensity plus white
/// Gaussian noise, all drawn from one seeded stream.
pub fn generate_scene(config: &DemoConfig) -> Result<Scene> {
    let n = config.size;
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NonDyadic { kind: "haar2d", len: n });
    }
    if !(config.sigma >= 0.0 && config.sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise sigma {} must be finite and >= 0", config.sigma)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points = vec![0.0; n * n];
    for _ in 0..config.points {
        let (r, c) = (rng.random_range(0..n), rng.random_range(0..n));
        points[r * n + c] = 1.0;
    }
    let mut lines = vec![0.0; n * n];
    for _ in 0..config.lines {
        let mut end = || (rng.random_range(0..n) as f64, rng.random_range(0..n) as f64);
        let ((r0, c0), (r1, c1)) = (end(), end());
        let steps = (r1 - r0).abs().max((c1 - c0).abs()).max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            let (r, c) = ((r0 + t * (r1 - r0)).round() as usize, (c0 + t * (c1 - c0)).round() as usize);
            lines[r * n + c] = 1.0;
        }
    }
    let gauss = Normal::new(0.0, config.sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let noise: Vec<f64> = (0..n * n).map(|_| gauss.sample(&mut rng)).collect();
    let image: Vec<f64> = (0..n * n).map(|i| points[i] + lines[i] + noise[i]).collect();
    Ok(Scene {
        points: Signal::grid_from_real(n, n, &points)?,
        lines: Signal::grid_from_real(n, n, &lines)?,
        noise: Signal::grid_from_real(n, n, &noise)?,
        image: Signal::grid_from_real(n, n, &image)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub size: usize,
    pub points: usize,
    pub lines: usize,
    pub sigma: f64,
    pub seed: u64,
    pub lambda: f64,
    /// `<x1, points> / ||points||^2`: share of the planted dot layer carried
    /// by the wavelet component (1 when there are no dots).
    pub dot_energy_fraction: f64,
    pub residual_norm: f64,
    /// `sqrt(pixels) sigma`.
    pub expected_noise_norm: f64,
    /// `max |x - x1 - x2 - residual|`.
    pub partition_error: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoOutcome {
    pub scene: Scene,
    pub result: SeparationResult,
    pub report: DemoReport,
}

/// Generates the scene and separates it with `analysis_denoise`.
pub fn run_demo(config: &DemoConfig) -> Result<DemoOutcome> {
    let scene = generate_scene(config)?;
    let n = config.size;
    let lambda = config.lambda.unwrap_or_else(|| default_lambda(config.sigma));
    let solver = SolverConfig::default().with_lambda(lambda);
    let (wavelets, cosines) = (Frame::haar2d(n, n)?, Frame::dct2d(n, n)?);
    let result = separate(&scene.image, &wavelets, &cosines, Mode::AnalysisDenoise, &solver, None)?;

    let dot_energy = scene.points.norm2().powi(2);
    let dot_energy_fraction = if dot_energy == 0.0 {
        1.0
    } else {
        inner(scene.points.values(), result.component1.values()).re / dot_energy
    };
    let partition_error = scene
        .image
        .values()
        .iter()
        .zip(result.component1.values())
        .zip(result.component2.values())
        .zip(result.residual.values())
        .map(|(((x, a), b), r)| (x - a - b - r).norm())
        .fold(0.0, f64::max);
    let report = DemoReport {
        size: n,
        points: config.points,
        lines: config.lines,
        sigma: config.sigma,
        seed: config.seed,
        lambda,
        dot_energy_fraction,
        residual_norm: result.residual.norm2(),
        expected_noise_norm: (n as f64) * config.sigma,
        partition_error,
        converged: result.certificate.converged,
        iterations: result.certificate.iterations_used,
    };
    Ok(DemoOutcome { scene, result, report })
}

impl DemoOutcome {
    /// Scene and truth layers (`scene`, `truth_points`, `truth_lines`,
    /// `truth_noise`), the separation outputs and `demo_report.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for (name, signal, offset) in [
            ("scene", &self.scene.image, 0.0),
            ("truth_points", &self.scene.points, 0.0),
            ("truth_lines", &self.scene.lines, 0.0),
            ("truth_noise", &self.scene.noise, 0.5),
        ] {
            write_signal_csv(&dir.join(format!("{name}.csv")), signal)?;
            write_pgm(&dir.join(format!("{name}.pgm")), signal, offset)?;
        }
        self.result.write_dir(dir)?;
        write_json(&dir.join("demo_report.json"), &self.report)
    }
}
