//! Time/frequency support counts against `2 / mu`: random signals stay above
//! the bound and the Dirac comb meets it.

use mca::cli::{dirac_comb, uncertainty_experiment};
use mca::separate::uncertainty_check;
use mca::{Frame, Signal};

fn main() -> mca::Result<()> {
    let n = 36;
    let comb = Signal::from_real(&dirac_comb(n, 6))?;
    let check = uncertainty_check(&comb, &Frame::dirac(n)?, &Frame::fourier(n)?)?;
    println!(
        "comb: {} + {} = {} >= {:.1}",
        check.count1,
        check.count2,
        check.count1 + check.count2,
        check.lower_bound
    );

    let (_, summary) = uncertainty_experiment(n, 200, 1)?;
    println!(
        "{} random sparse signals: smallest sum {}, violations {}",
        summary.trials, summary.min_sum, summary.violations
    );
    Ok(())
}
