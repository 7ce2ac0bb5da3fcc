//! A small median regression experiment printed as CSV.

use kng::simulation::{run_quantile_experiment, ExperimentConfig};

fn main() -> kng::Result<()> {
    let cfg = ExperimentConfig {
        n_grid: vec![10, 100, 1_000, 10_000],
        replicates: 10,
        base_seed: 1,
        ..ExperimentConfig::quantile()
    };
    let result = run_quantile_experiment(&cfg)?;
    result.write_csv(std::io::stdout())
}
