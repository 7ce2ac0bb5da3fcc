//! KNG for the geometric median in the plane. Its gradient sensitivity is 2
//! whatever the data, so no bound on the points is needed beyond the box.

use kng::mechanisms::{kng, MechanismConfig, PrivacyBudget};
use kng::{DataBounds, Dataset, ObjectiveSpec, SamplerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> kng::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<Vec<f64>> = (0..2_000)
        .map(|i| {
            // Mostly a cluster near (0.3, -0.2) with some far outliers.
            if i % 10 == 0 {
                vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]
            } else {
                vec![0.3 + 0.1 * rng.random_range(-1.0..1.0), -0.2 + 0.1 * rng.random_range(-1.0..1.0)]
            }
        })
        .collect();
    let data = Dataset::from_rows(&rows, None, DataBounds::default())?;
    let spec = ObjectiveSpec::geometric_median(2, 1.0)?;
    for eps in [0.01, 0.1, 1.0] {
        let cfg = MechanismConfig::new(PrivacyBudget::new(eps)?, SamplerConfig::new(3_000, 5));
        let out = kng(&spec, &data, &cfg)?;
        println!(
            "eps {eps:>4}: {:.4?} (acceptance {:.2})",
            out.theta,
            out.diagnostics.mcmc_acceptance_rate.unwrap_or(0.0)
        );
    }
    Ok(())
}
