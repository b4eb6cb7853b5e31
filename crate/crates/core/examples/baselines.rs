//! Jordan center and BFS rumor center on a snapshot, next to MSI.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumor_source::bench::{evaluate_instance, sample_snapshot};
use rumor_source::identify::identify;
use rumor_source::netgen::generate_small_world;
use rumor_source::{Method, PowerConfig};

fn main() -> rumor_source::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let network = generate_small_world(500, 4, 0.1, &mut rng)?;
    let snapshot = sample_snapshot(&network, 1, 0.1, 150, 100_000, &mut rng)?;
    println!("true source: {:?}", snapshot.true_sources.as_deref().unwrap_or(&[]));
    for method in Method::ALL {
        let result = identify(&snapshot.graph, method, 1, PowerConfig::default())?;
        let outcome = evaluate_instance(&result, &snapshot, None)?;
        println!(
            "{:>6}: chose {:?}, error distance {}",
            method.name(),
            result.chosen, outcome.error_distance
        );
    }
    Ok(())
}
