//! Releases a private mean three ways: the K-norm mechanism (exact noise),
//! KNG and the exponential mechanism (both by MCMC).

use kng::mechanisms::{exponential, kng, knorm_mean, MechanismConfig, PrivacyBudget};
use kng::{DataBounds, Dataset, NormKind, ObjectiveSpec, SamplerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> kng::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rows: Vec<Vec<f64>> = (0..500).map(|_| vec![rng.random_range(-0.2..0.8)]).collect();
    let data = Dataset::from_rows(&rows, None, DataBounds::default())?;
    let mean = rows.iter().map(|r| r[0]).sum::<f64>() / rows.len() as f64;

    let budget = PrivacyBudget::new(1.0)?;
    let spec = ObjectiveSpec::mean_sse(1, 1.0)?;
    let cfg = MechanismConfig::new(budget, SamplerConfig::new(5_000, 3));

    println!("sample mean   {mean:.5}");
    println!("knorm-mean    {:.5}", knorm_mean(&data, NormKind::L2, 1.0, budget, &mut rng)?.theta[0]);
    println!("kng           {:.5}", kng(&spec, &data, &cfg)?.theta[0]);
    println!("exponential   {:.5}", exponential(&spec, &data, &cfg)?.theta[0]);
    Ok(())
}
