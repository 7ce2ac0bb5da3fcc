//! Median regression: the non-private fit by projected subgradient descent,
//! then KNG and the exponential mechanism over the unit l1 ball.

use kng::mechanisms::{exponential, kng, MechanismConfig, PrivacyBudget};
use kng::optimizer::{projected_subgradient, SubgradientOptions};
use kng::simulation::{benchmark_theta, generate_regression_data};
use kng::{ObjectiveSpec, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> kng::Result<()> {
    let truth = benchmark_theta(2);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let sim = generate_regression_data(2_000, 2, &truth, &mut rng)?;
    let data = sim.scaled_dataset()?;
    let spec = ObjectiveSpec::quantile_loss(2, 0.5, 1.0, 1.0)?;

    let objective = spec.prepare(&data)?;
    let fit = projected_subgradient(
        |t, g| {
            objective.gradient_into(t, g).expect("quantile gradient is total");
            objective.value(t)
        },
        1.0,
        &[0.0, 0.0],
        &SubgradientOptions::default(),
    )?;
    let cfg = MechanismConfig::new(PrivacyBudget::new(1.0)?, SamplerConfig::new(1_000, 13));
    let show = |name: &str, t: &[f64]| println!("{name:<12} ({:.4}, {:.4})", t[0] * sim.scale, t[1] * sim.scale);

    println!("truth        ({}, {})", truth[0], truth[1]);
    show("non-private", &fit.theta);
    show("kng", &kng(&spec, &data, &cfg)?.theta);
    show("exponential", &exponential(&spec, &data, &cfg)?.theta);
    Ok(())
}
