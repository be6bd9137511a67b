//! Builds the built-in frames, checks that they are Parseval and round-trips
//! a signal through analysis and synthesis.

use mca::frames::is_parseval;
use mca::{ConcatDictionary, Dictionary, Frame, Signal};

fn main() -> mca::Result<()> {
    let n = 16;
    let x = Signal::from_real(&(0..n).map(|t| (t as f64 * 0.7).sin()).collect::<Vec<_>>())?;

    for frame in [Frame::dirac(n)?, Frame::fourier(n)?, Frame::dct(n)?, Frame::haar(n)?] {
        let check = is_parseval(&frame, 8, 1e-10);
        let c = frame.analyze(&x)?;
        let back = frame.synthesize(c.values())?;
        println!(
            "{:<8} parseval={} defect={:.1e} round-trip error={:.1e} l1={:.3}",
            frame.kind().name(),
            check.parseval,
            check.max_defect,
            back.sub(&x)?.norm2(),
            c.l1_norm(),
        );
    }

    // the concatenation is a tight frame with bound 2
    let pair = ConcatDictionary::new(Frame::fourier(n)?, Frame::dirac(n)?)?;
    let c = pair.analyze(&x)?;
    let back = pair.synthesize(c.values())?;
    println!("fourier|dirac: {} atoms, ||Phi Phi^H x|| / ||x|| = {:.6}", pair.num_atoms(), back.norm2() / x.norm2());
    Ok(())
}
