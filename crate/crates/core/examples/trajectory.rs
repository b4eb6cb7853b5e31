//! Norm of the passed messages from the true source versus random sources.
//! Writes `trajectory.csv` with columns `t,norm,label`.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumor_source::bench::sample_snapshot;
use rumor_source::message::{passed_trajectory, trajectory_csv, trajectory_norms, Norm, TrajectorySeries};
use rumor_source::netgen::generate_small_world;

fn main() -> rumor_source::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let network = generate_small_world(1000, 4, 0.1, &mut rng)?;
    let snapshot = sample_snapshot(&network, 1, 0.05, 400, 100_000, &mut rng)?;
    let truth = snapshot.true_sources.clone().unwrap_or_default();
    let steps = 200;
    let mut series = Vec::new();
    let mut candidates = vec![("true-source".to_string(), truth)];
    for k in 0..3 {
        let v = sample(&mut rng, snapshot.graph.node_count(), 1).index(0);
        candidates.push((format!("random-source-{k}"), vec![v]));
    }
    for (label, sources) in candidates {
        for linear in [false, true] {
            let traj = passed_trajectory(&snapshot.graph, &sources, snapshot.p, steps, linear)?;
            let mode = if linear { "linear" } else { "nonlinear" };
            series.push(TrajectorySeries {
                label: format!("{label}-{mode}"),
                norms: trajectory_norms(&traj, Norm::L2),
            });
        }
    }
    for s in &series {
        println!("{:<28} |u({steps})| = {:.4}", s.label, s.norms[steps]);
    }
    std::fs::write("trajectory.csv", trajectory_csv(&series))
        .map_err(|e| rumor_source::Error::io("trajectory.csv", e))?;
    Ok(())
}
