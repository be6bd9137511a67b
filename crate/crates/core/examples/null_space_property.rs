//! Exact null space property check on a small random real dictionary, with
//! the witness direction when the property fails.

use mca::coherence::{mutual_coherence, nsp_check};
use mca::Frame;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> mca::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let (n, p) = (6, 10);
    let mut a = DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng));
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        col /= norm;
    }
    let frame = Frame::from_real_matrix(&a)?;
    let mu = mutual_coherence(&frame)?;
    println!("mu = {mu:.3}, coherence guarantees k < {:.2}", (1.0 + 1.0 / mu) / 2.0);

    for k in 1..=4 {
        let out = nsp_check(&frame, k)?;
        print!("k={k}: holds={} max ratio={:.3}", out.holds, out.max_ratio);
        match out.witness {
            Some(w) => println!("  witness concentrates on {:?}", w.lambda),
            None => println!(),
        }
    }
    Ok(())
}
