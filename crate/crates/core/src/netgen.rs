//! Synthetic networks and SNAP-style edge-list ingestion.

use std::collections::HashMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};

pub const DEFAULT_RING_NEIGHBORS: usize = 4;
pub const DEFAULT_REWIRING: f64 = 0.1;

/// Where base networks come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeneratorSpec {
    SmallWorld { n: usize, k: usize, beta: f64 },
    Lattice { rows: usize, cols: usize },
    FromFile { path: PathBuf },
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GeneratorSpec::SmallWorld { n, k, beta } => check_small_world(n, k, beta),
            GeneratorSpec::Lattice { rows, cols } => check_lattice(rows, cols),
            GeneratorSpec::FromFile { .. } => Ok(()),
        }
    }

    /// Parses `small-world:n=1000,k=4,beta=0.1` or `lattice:20x20`. Anything
    /// else is taken as a file path.
    pub fn parse(text: &str) -> Result<GeneratorSpec> {
        if let Some(rest) = text.strip_prefix("small-world") {
            let mut n = None;
            let mut k = DEFAULT_RING_NEIGHBORS;
            let mut beta = DEFAULT_REWIRING;
            for field in rest.trim_start_matches(':').split(',').filter(|f| !f.is_empty()) {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| bad_spec(text, "expected key=value"))?;
                match key.trim() {
                    "n" => n = Some(parse_field(text, value)?),
                    "k" => k = parse_field(text, value)?,
                    "beta" => beta = parse_field(text, value)?,
                    other => return Err(bad_spec(text, &format!("unknown key `{other}`"))),
                }
            }
            let n = n.ok_or_else(|| bad_spec(text, "missing n"))?;
            let spec = GeneratorSpec::SmallWorld { n, k, beta };
            spec.validate()?;
            Ok(spec)
        } else if let Some(rest) = text.strip_prefix("lattice:") {
            let (r, c) = rest
                .split_once('x')
                .ok_or_else(|| bad_spec(text, "expected ROWSxCOLS"))?;
            let spec = GeneratorSpec::Lattice {
                rows: parse_field(text, r)?,
                cols: parse_field(text, c)?,
            };
            spec.validate()?;
            Ok(spec)
        } else {
            Ok(GeneratorSpec::FromFile {
                path: PathBuf::from(text),
            })
        }
    }

    /// Builds the network. File-backed graphs are reduced to their largest
    /// connected component.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match self {
            GeneratorSpec::SmallWorld { n, k, beta } => generate_small_world(*n, *k, *beta, rng),
            GeneratorSpec::Lattice { rows, cols } => generate_lattice(*rows, *cols),
            GeneratorSpec::FromFile { path } => {
                let g = load_snap_file(path)?;
                Ok(largest_connected_component(&g)?.graph)
            }
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, GeneratorSpec::SmallWorld { .. })
    }
}

fn bad_spec(text: &str, why: &str) -> Error {
    Error::InvalidParameter(format!("graph spec `{text}`: {why}"))
}

fn parse_field<T: std::str::FromStr>(text: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| bad_spec(text, &format!("cannot parse `{value}`")))
}

fn check_small_world(n: usize, k: usize, beta: f64) -> Result<()> {
    if !k.is_multiple_of(2) || k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "small-world needs even k with 0 < k < n (n={n}, k={k})"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "rewiring probability {beta} outside [0, 1]"
        )));
    }
    Ok(())
}

fn check_lattice(rows: usize, cols: usize) -> Result<()> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidParameter(format!(
            "lattice needs at least 2x2, got {rows}x{cols}"
        )));
    }
    Ok(())
}

/// Watts–Strogatz: a ring where every node links to its `k/2` nearest
/// neighbors on each side, then each ring edge `(u, u+j)` has its far end
/// moved with probability `beta` to a uniform node that is neither `u` nor
/// already adjacent to it. The edge count stays `n·k/2`.
pub fn generate_small_world<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    beta: f64,
    rng: &mut R,
) -> Result<Graph> {
    check_small_world(n, k, beta)?;
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(k); n];
    let link = |adj: &mut Vec<Vec<usize>>, a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for u in 0..n {
        for j in 1..=k / 2 {
            link(&mut adj, u, (u + j) % n);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !rng.random_bool(beta) {
                continue;
            }
            // Rewired in an earlier pass, or u is saturated.
            if !adj[u].contains(&v) || adj[u].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n);
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].retain(|&x| x != v);
            adj[v].retain(|&x| x != u);
            link(&mut adj, u, w);
        }
    }
    let pairs = adj
        .iter()
        .enumerate()
        .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)));
    Ok(Graph::with_nodes(n, pairs))
}

/// Non-periodic `rows × cols` grid with 4-neighbor connectivity. Node
/// `(r, c)` has id `r·cols + c`.
pub fn generate_lattice(rows: usize, cols: usize) -> Result<Graph> {
    check_lattice(rows, cols)?;
    let id = |r: usize, c: usize| r * cols + c;
    let mut pairs = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                pairs.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                pairs.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Ok(Graph::with_nodes(rows * cols, pairs))
}

/// Reads whitespace-separated id pairs, skipping blank and `#` lines. Ids are
/// compacted to `0..N` in order of first appearance. Tokens after the second
/// on a line are ignored.
pub fn load_snap_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut compact: HashMap<u64, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        let Some((a, b)) = parse_pair(&line, lineno + 1)? else {
            continue;
        };
        let mut id = |raw: u64| {
            let next = compact.len();
            *compact.entry(raw).or_insert(next)
        };
        let a = id(a);
        let b = id(b);
        pairs.push((a, b));
    }
    Ok(Graph::with_nodes(compact.len(), pairs))
}

/// One edge-list line: `None` for blanks and comments.
pub(crate) fn parse_pair(line: &str, lineno: usize) -> Result<Option<(u64, u64)>> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut tokens = trimmed.split_whitespace();
    let mut next = || -> Result<u64> {
        let token = tokens.next().ok_or_else(|| Error::Parse {
            line: lineno,
            message: "expected two node ids".into(),
        })?;
        token.parse().map_err(|_| Error::Parse {
            line: lineno,
            message: format!("`{token}` is not a nonnegative integer"),
        })
    };
    let a = next()?;
    let b = next()?;
    Ok(Some((a, b)))
}

pub fn load_snap_file(path: &Path) -> Result<Graph> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_snap_edge_list(std::io::BufReader::new(file))
}

/// Induced subgraph of the largest component; equal sizes go to the component
/// holding the smallest id.
pub fn largest_connected_component(g: &Graph) -> Result<Subgraph> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let components = g.connected_components();
    let mut best = &components[0];
    for c in &components[1..] {
        if c.len() > best.len() {
            best = c;
        }
    }
    g.induced_subgraph(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ring_without_rewiring() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c6 = generate_small_world(6, 2, 0.0, &mut rng).unwrap();
        assert_eq!(c6.edge_count(), 6);
        for v in 0..6 {
            assert_eq!(c6.neighbors(v).len(), 2);
            assert!(c6.has_edge(v, (v + 1) % 6));
        }
        let ring = generate_small_world(10, 4, 0.0, &mut rng).unwrap();
        for v in 0..10 {
            assert_eq!(ring.degree(v), 4);
            for &w in ring.neighbors(v) {
                let gap = (v + 10 - w) % 10;
                assert!(gap.min(10 - gap) <= 2);
            }
        }
    }

    #[test]
    fn rewiring_keeps_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let g = generate_small_world(100, 4, 0.1, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 200);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        assert_eq!(generate_small_world(100, 4, 0.1, &mut rng).unwrap(), g);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(generate_small_world(30, 6, 1.0, &mut rng).unwrap().edge_count(), 90);
    }

    #[test]
    fn generator_parameter_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(generate_small_world(10, 3, 0.1, &mut rng).is_err());
        assert!(generate_small_world(4, 4, 0.1, &mut rng).is_err());
        assert!(generate_small_world(10, 2, 1.5, &mut rng).is_err());
        assert!(generate_lattice(1, 5).is_err());
    }

    #[test]
    fn lattices() {
        let c4 = generate_lattice(2, 2).unwrap();
        assert_eq!(c4.edge_count(), 4);
        assert!((0..4).all(|v| c4.degree(v) == 2));

        let g = generate_lattice(3, 3).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (9, 12));
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(4), 4);

        let big = generate_lattice(20, 20).unwrap();
        assert_eq!((big.node_count(), big.edge_count()), (400, 760));
    }

    #[test]
    fn spec_strings() {
        assert_eq!(
            GeneratorSpec::parse("small-world:n=50,k=6,beta=0.2").unwrap(),
            GeneratorSpec::SmallWorld { n: 50, k: 6, beta: 0.2 }
        );
        assert_eq!(
            GeneratorSpec::parse("small-world:n=50").unwrap(),
            GeneratorSpec::SmallWorld { n: 50, k: 4, beta: 0.1 }
        );
        assert_eq!(
            GeneratorSpec::parse("lattice:4x5").unwrap(),
            GeneratorSpec::Lattice { rows: 4, cols: 5 }
        );
        assert!(GeneratorSpec::parse("lattice:1x5").is_err());
        assert!(GeneratorSpec::parse("small-world:k=4").is_err());
        assert!(matches!(
            GeneratorSpec::parse("data/edges.txt").unwrap(),
            GeneratorSpec::FromFile { .. }
        ));
    }

    #[test]
    fn snap_loading() {
        let p3 = load_snap_edge_list("# comment\n0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(p3, Graph::from_edge_list([(0, 1), (1, 2)]));

        let g = load_snap_edge_list("5 9\n9 5\n".as_bytes()).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));

        let g = load_snap_edge_list("0 0\n0 1\n".as_bytes()).unwrap();
        assert_eq!(g, Graph::from_edge_list([(0, 1)]));

        let g = load_snap_edge_list("7\t3\n\n  3   4  \n".as_bytes()).unwrap();
        // 7→0, 3→1, 4→2
        assert_eq!(g, Graph::from_edge_list([(0, 1), (1, 2)]));

        match load_snap_edge_list("0 1\n1 x\n".as_bytes()) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("expected parse error on line 2, got {other:?}"),
        }
        assert!(matches!(
            load_snap_edge_list("0 -1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_snap_edge_list("4\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn largest_component() {
        let g = Graph::with_nodes(3, [(0, 1)]);
        let lcc = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.original_ids, vec![0, 1]);

        let p4 = Graph::from_edge_list([(0, 1), (1, 2), (2, 3)]);
        assert_eq!(largest_connected_component(&p4).unwrap().graph, p4);

        let two = Graph::from_edge_list([(3, 4), (4, 5), (5, 3), (0, 1), (1, 2), (2, 0)]);
        assert_eq!(largest_connected_component(&two).unwrap().original_ids, vec![0, 1, 2]);

        assert!(matches!(
            largest_connected_component(&Graph::empty(0)),
            Err(Error::EmptyGraph)
        ));
    }
}
