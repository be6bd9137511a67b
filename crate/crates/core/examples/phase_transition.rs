//! Success rate of basis pursuit on the Fourier/Dirac pair as the planted
//! sparsity grows past the coherence guarantee.

use mca::cli::{phase_transition, theorem_bound, ExperimentConfig};

fn main() -> mca::Result<()> {
    let config = ExperimentConfig { n: 64, k_range: (4, 48), trials: 10, seed: 0 };
    println!("guarantee: k < {:.2}", theorem_bound(config.n));
    for row in phase_transition(&config)?.iter().step_by(4) {
        let bar = "#".repeat((row.success_rate * 40.0).round() as usize);
        println!("k={:<3} {:>5.2} {bar}", row.k, row.success_rate);
    }
    Ok(())
}
