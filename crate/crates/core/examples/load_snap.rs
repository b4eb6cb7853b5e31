//! Loads a SNAP-style edge list and reports its largest component.
//! Usage: `cargo run --example load_snap -- path/to/edges.txt`

use rumor_source::netgen::{largest_connected_component, load_snap_edge_list, load_snap_file};

const DEMO: &str = "# demo\n10 20\n20 30\n30 10\n40 50\n";

fn main() -> rumor_source::Result<()> {
    let graph = match std::env::args().nth(1) {
        Some(path) => load_snap_file(path.as_ref())?,
        None => load_snap_edge_list(DEMO.as_bytes())?,
    };
    let lcc = largest_connected_component(&graph)?;
    println!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
    println!(
        "largest component: {} nodes, {} edges, diameter {}",
        lcc.graph.node_count(),
        lcc.graph.edge_count(),
        lcc.graph.diameter()
    );
    Ok(())
}
