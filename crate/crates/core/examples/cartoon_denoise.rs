//! Splits a noisy image of dots and lines into a Haar part and a DCT part,
//! then writes the images to a temporary directory.

use mca::cli::{run_demo, DemoConfig};

fn main() -> mca::Result<()> {
    let outcome = run_demo(&DemoConfig::default())?;
    let r = &outcome.report;
    println!("lambda {:.3}, {} iterations, converged {}", r.lambda, r.iterations, r.converged);
    println!("dot energy in the Haar part: {:.3}", r.dot_energy_fraction);
    println!("residual {:.3} (noise level {:.3})", r.residual_norm, r.expected_noise_norm);

    let dir = std::env::temp_dir().join("mca-cartoon");
    outcome.write_dir(&dir)?;
    println!("images in {}", dir.display());
    Ok(())
}
