//! Spreads an SI epidemic on a small-world network and observes a snapshot.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumor_source::bench::sample_snapshot;
use rumor_source::netgen::generate_small_world;

fn main() -> rumor_source::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let network = generate_small_world(1000, 4, 0.1, &mut rng)?;
    let snapshot = sample_snapshot(&network, 1, 0.05, 400, 100_000, &mut rng)?;
    println!(
        "snapshot: {} nodes, {} edges, diameter {}",
        snapshot.graph.node_count(),
        snapshot.graph.edge_count(),
        snapshot.graph.diameter()
    );
    println!("true source (snapshot id): {:?}", snapshot.true_sources);
    print!("{}", snapshot.to_text().lines().take(5).collect::<Vec<_>>().join("\n"));
    println!("\n...");
    Ok(())
}
