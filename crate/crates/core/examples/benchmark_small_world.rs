//! A small version of the small-world accuracy benchmark.

use rumor_source::bench::{aggregate_csv, run_experiment, ExperimentConfig};

fn main() -> rumor_source::Result<()> {
    let cfg = ExperimentConfig::parse(
        "graph = small-world:n=400,k=4,beta=0.1\n\
         p = 0.05\n\
         target = 120\n\
         instances = 20\n\
         seed = 42\n",
    )?;
    let report = run_experiment(&cfg)?;
    print!("{}", aggregate_csv(&report));
    println!("mean snapshot diameter: {:.2}", report.mean_snapshot_diameter);
    Ok(())
}
