//! Draws K-norm noise in each norm and reports the average norm, which
//! should be close to `d / rate` (the mean of a Gamma(d, rate) radius).

use kng::norms::{sample_knorm_noise, KNormNoiseParams, NormKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> kng::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (dim, rate, draws) = (3, 2.0, 20_000);
    for kind in NormKind::ALL {
        let params = KNormNoiseParams::new(dim, kind, rate)?;
        let mean_norm: f64 =
            (0..draws).map(|_| kind.eval(&sample_knorm_noise(&params, &mut rng))).sum::<f64>() / draws as f64;
        let b = sample_knorm_noise(&params, &mut rng);
        println!("{kind:>4}: mean norm {mean_norm:.4} (expected {:.4}), sample {b:.4?}", dim as f64 / rate);
    }
    Ok(())
}
