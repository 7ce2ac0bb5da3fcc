//! Private linear regression on rescaled synthetic data with KNG, the
//! exponential mechanism and objective perturbation.

use kng::mechanisms::{exponential, kng, objective_perturbation, MechanismConfig, PrivacyBudget};
use kng::optimizer::ols;
use kng::simulation::generate_regression_data;
use kng::{ObjectiveSpec, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> kng::Result<()> {
    let truth = [0.5, -1.0, 0.25];
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let sim = generate_regression_data(5_000, truth.len(), &truth, &mut rng)?;
    let data = sim.scaled_dataset()?;

    let spec = ObjectiveSpec::linear_sse(truth.len(), 1.0)?;
    let cfg = MechanismConfig::new(PrivacyBudget::new(1.0)?, SamplerConfig::new(10_000, 21));
    let rescale = |t: Vec<f64>| t.into_iter().map(|v| v * sim.scale).collect::<Vec<_>>();

    println!("truth                  {truth:?}");
    println!("ols                    {:.4?}", rescale(ols(&sim.x, sim.n, sim.d, &sim.y_scaled)?));
    println!("kng                    {:.4?}", rescale(kng(&spec, &data, &cfg)?.theta));
    println!("exponential            {:.4?}", rescale(exponential(&spec, &data, &cfg)?.theta));
    let op = objective_perturbation(&spec, &data, &cfg, &mut rng)?;
    println!(
        "objective perturbation {:.4?} (kkt residual {:.1e})",
        rescale(op.theta),
        op.diagnostics.optimizer_final_gap.unwrap_or(f64::NAN)
    );
    Ok(())
}
