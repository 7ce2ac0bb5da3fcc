//! A small linear regression experiment printed as CSV. Pass a sample-size
//! grid as arguments, e.g. `cargo run --release --example simulate_linear -- 100 1000`.

use kng::simulation::{run_linear_experiment, ExperimentConfig};

fn main() -> kng::Result<()> {
    let n_grid: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cfg = ExperimentConfig {
        n_grid: if n_grid.is_empty() { vec![100, 1_000, 10_000] } else { n_grid },
        replicates: 10,
        mcmc_steps: 2_000,
        base_seed: 1,
        ..ExperimentConfig::linear()
    };
    let result = run_linear_experiment(&cfg)?;
    result.write_csv(std::io::stdout())
}
