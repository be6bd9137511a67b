//! Plants a sparse coefficient vector, recovers it with the exhaustive `l0`
//! oracle and with basis pursuit, and prints the certificate.

use mca::solvers::{bp_synthesis, l0_oracle, SolverConfig};
use mca::{ConcatDictionary, Dictionary, Frame, C64};

fn main() -> mca::Result<()> {
    let n = 16;
    let d = ConcatDictionary::new(Frame::fourier(n)?, Frame::dirac(n)?)?;
    let mut c = vec![C64::new(0.0, 0.0); 2 * n];
    c[2] = C64::new(1.0, 0.5);
    c[n + 9] = C64::new(-0.8, 0.0);
    let x = d.synthesize(&c)?;

    let sparse = l0_oracle(&d, &x, 2)?;
    println!("l0 support: {:?}", sparse.support(1e-8));

    let (l1, cert) = bp_synthesis(&d, &x, &SolverConfig::default())?;
    let err: f64 = l1.values().iter().zip(&c).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    println!("l1 support: {:?}", l1.support(1e-8));
    println!(
        "l1 error {err:.1e}, iterations {}, gap {:.1e}, converged {}",
        cert.iterations_used, cert.final_residual, cert.converged
    );
    Ok(())
}
