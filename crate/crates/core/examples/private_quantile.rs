//! Exact private quantiles of a bounded sample, and the masses of the
//! pieces on which the empirical CDF is constant.

use kng::mechanisms::{PrivacyBudget, PrivateQuantile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> kng::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let y: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0f64).powi(3)).collect();
    let budget = PrivacyBudget::new(1.0)?;

    for tau in [0.1, 0.5, 0.9] {
        let q = PrivateQuantile::new(tau, -1.0, 1.0)?;
        let draws: Vec<f64> = (0..5).map(|_| q.sample(&y, budget, &mut rng)).collect::<kng::Result<_>>()?;
        println!("tau {tau}: {draws:.3?}");
    }

    let q = PrivateQuantile::new(0.5, 0.0, 1.0)?;
    for p in q.pieces(&[0.2, 0.5, 0.8], 1.0)? {
        println!("[{:.1}, {:.1})  F = {:.3}  log mass {:.4}", p.lo, p.hi, p.f_hat, p.log_mass);
    }
    Ok(())
}
