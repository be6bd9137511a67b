//! Mutual coherence, Babel function, cluster coherence and the
//! joint-concentration interval for the Fourier/Dirac pair.

use mca::coherence::{babel_sequence, coherence_report, mutual_coherence, ClusterSpec};
use mca::{ConcatDictionary, Frame};

fn main() -> mca::Result<()> {
    for n in [16, 64, 256] {
        let d = ConcatDictionary::new(Frame::fourier(n)?, Frame::dirac(n)?)?;
        println!("n={n:<4} mu={:.5}  1/sqrt(n)={:.5}", mutual_coherence(&d)?, 1.0 / (n as f64).sqrt());
    }

    let n = 16;
    let d = ConcatDictionary::new(Frame::fourier(n)?, Frame::dirac(n)?)?;
    let babel = babel_sequence(&d)?;
    println!("babel mu_1(m) for m=1..6: {:?}", babel[..6].iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>());

    // two low frequencies against two spike positions
    let spec = ClusterSpec::new(vec![0, 1], vec![3, 11]);
    let report = coherence_report(&d, &spec, 64, 0)?;
    println!("cluster coherence: mu_c(L1) = {:.3}, mu_c(L2) = {:.3}", report.cluster_12, report.cluster_21);
    if let (Some(lo), Some(hi)) = (report.kappa_lower, report.kappa_upper) {
        println!("joint concentration in [{lo:.3}, {hi:.3}]");
    }
    Ok(())
}
