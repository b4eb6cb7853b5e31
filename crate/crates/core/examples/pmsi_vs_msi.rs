//! Compares exact reduced spectral radii with their first-order estimates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rumor_source::identify::{msi, pmsi};
use rumor_source::netgen::generate_small_world;
use rumor_source::PowerConfig;

fn main() -> rumor_source::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let graph = generate_small_world(30, 4, 0.3, &mut rng)?;
    let exact = msi(&graph, 1, PowerConfig::converge())?;
    let approx = pmsi(&graph, 1, PowerConfig::converge())?;
    let lambda = |v: usize| {
        exact.ranked.iter().find(|c| c.nodes == [v]).map(|c| c.score).unwrap()
    };
    println!("node  lambda(R)  delta-lambda");
    for c in approx.ranked.iter().take(10) {
        println!("{:>4}  {:.6}  {:.6}", c.nodes[0], lambda(c.nodes[0]), c.score);
    }
    println!("msi chooses {:?}, pmsi chooses {:?}", exact.chosen, approx.chosen);
    Ok(())
}
