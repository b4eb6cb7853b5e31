//! Minimum spectral radius identification on two triangles sharing a node.

use rumor_source::identify::msi;
use rumor_source::{Graph, PowerConfig};

fn main() -> rumor_source::Result<()> {
    let bowtie = Graph::from_edge_list([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
    let result = msi(&bowtie, 1, PowerConfig::converge())?;
    for c in &result.ranked {
        println!("remove {:?}: lambda = {:.6}", c.nodes, c.score);
    }
    println!("chosen: {:?}", result.chosen);
    Ok(())
}
