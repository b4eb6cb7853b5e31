//! Dense reference constructions shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use nalgebra::{DMatrix, DVector, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rumor_source::{EdgeIndex, Graph};

/// `B` entry by entry from the definition.
pub fn dense_b(index: &EdgeIndex) -> DMatrix<f64> {
    dense_r(index, &[])
}

/// `R` with the columns of edges leaving a source zeroed.
pub fn dense_r(index: &EdgeIndex, sources: &[usize]) -> DMatrix<f64> {
    let dim = index.len();
    DMatrix::from_fn(dim, dim, |e, f| {
        let (k, l) = index.endpoints(e);
        let (i, j) = index.endpoints(f);
        if l == i && j != k && !sources.contains(&i) {
            1.0
        } else {
            0.0
        }
    })
}

/// True when the support digraph of `m` has no directed cycle, i.e. `m` is
/// nilpotent. Exact, unlike a numerical spectrum.
pub fn is_nilpotent(m: &DMatrix<f64>) -> bool {
    let dim = m.nrows();
    let mut indeg = vec![0usize; dim];
    for e in 0..dim {
        for f in 0..dim {
            if m[(e, f)] != 0.0 {
                indeg[f] += 1;
            }
        }
    }
    let mut queue: VecDeque<usize> = (0..dim).filter(|&e| indeg[e] == 0).collect();
    let mut seen = 0;
    while let Some(e) = queue.pop_front() {
        seen += 1;
        for f in 0..dim {
            if m[(e, f)] != 0.0 {
                indeg[f] -= 1;
                if indeg[f] == 0 {
                    queue.push_back(f);
                }
            }
        }
    }
    seen == dim
}

/// Spectral radius from the full (complex) spectrum; exactly 0 when nilpotent.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || is_nilpotent(m) {
        return 0.0;
    }
    // The default Schur tolerance (machine epsilon, no iteration cap) never
    // terminates on permutation-like blocks; on a stall, retry on a random
    // orthogonal similarity, which has the same spectrum.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut a = m.clone();
    for _ in 0..8 {
        if let Some(schur) = Schur::try_new(a.clone(), 1e-14, 10_000) {
            return schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
        }
        let dim = m.nrows();
        let q = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        a = q.transpose() * m * q;
    }
    panic!("Schur decomposition did not converge")
}

pub fn to_dvector(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Connected graph on `n` nodes: a random tree plus `extra` random chords.
pub fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.random_range(0..v), v));
    }
    let mut added = 0;
    let mut guard = 0;
    while added < extra && guard < 1000 {
        guard += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b && !pairs.contains(&(a.min(b), a.max(b))) && !pairs.contains(&(a.max(b), a.min(b))) {
            pairs.push((a.min(b), a.max(b)));
            added += 1;
        }
    }
    Graph::with_nodes(n, pairs)
}

/// Random graph (possibly disconnected) with at most `max_edges` edges.
pub fn random_graph(seed: u64, max_nodes: usize, max_edges: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_nodes);
    let target = rng.random_range(1..=max_edges);
    let mut pairs = BTreeSet::new();
    for _ in 0..target * 4 {
        if pairs.len() == target {
            break;
        }
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    Graph::with_nodes(n, pairs)
}

pub fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// AHU encoding of a rooted tree.
fn encode(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| encode(adj, w, v))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

fn canonical(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    (0..n).map(|r| encode(&adj, r, usize::MAX)).min().unwrap()
}

/// One representative of every unlabeled tree on `n ≥ 1` nodes.
pub fn all_trees(n: usize) -> Vec<Graph> {
    let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for edges in &level {
            for attach in 0..size - 1 {
                let mut grown = edges.clone();
                grown.push((attach, size - 1));
                if seen.insert(canonical(size, &grown)) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(|edges| Graph::with_nodes(n, edges))
        .collect()
}

/// Number of node orderings starting at `root` in which every node after the
/// first is adjacent to an earlier one.
pub fn count_orderings(graph: &Graph, root: usize) -> u128 {
    fn go(graph: &Graph, infected: &mut Vec<bool>, left: usize) -> u128 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        for v in 0..graph.node_count() {
            if !infected[v] && graph.neighbors(v).iter().any(|&w| infected[w]) {
                infected[v] = true;
                total += go(graph, infected, left - 1);
                infected[v] = false;
            }
        }
        total
    }
    let mut infected = vec![false; graph.node_count()];
    infected[root] = true;
    go(graph, &mut infected, graph.node_count() - 1)
}

/// Spearman correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(x: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
        let mut r = vec![0.0; x.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && (x[order[j + 1]] - x[order[i]]).abs() <= 1e-12 {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0;
            for &k in &order[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (i + 5, (i + 2) % 5 + 5));
    Graph::from_edge_list(outer.chain(spokes).chain(inner))
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edge_list((0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_edge_list((0..n).map(|i| (i, (i + 1) % n)))
}

pub fn cube() -> Graph {
    Graph::from_edge_list(
        (0..8usize).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b))).filter(|(a, b)| a < b)),
    )
}

pub fn bowtie() -> Graph {
    Graph::from_edge_list([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
}

/// Exact limit of the passed-message vector: `u_{i→j} = 1` iff `i` is a
/// source or some `k ∈ ∂i∖j` has `u_{k→i} = 1`; every other entry stays 0.
pub fn passed_fixed_point(graph: &Graph, sources: &[usize]) -> Vec<f64> {
    let index = EdgeIndex::new(graph);
    let mut u = vec![0.0; index.len()];
    for e in 0..index.len() {
        if sources.contains(&index.tail(e)) {
            u[e] = 1.0;
        }
    }
    loop {
        let mut changed = false;
        for e in 0..index.len() {
            let (i, j) = index.endpoints(e);
            if u[e] == 0.0
                && graph
                    .neighbors(i)
                    .iter()
                    .any(|&k| k != j && u[index.edge_id(graph, k, i).unwrap()] == 1.0)
            {
                u[e] = 1.0;
                changed = true;
            }
        }
        if !changed {
            return u;
        }
    }
}
