//! Undirected simple graphs, the directed-edge coordinate system, and
//! matrix-free products with the nonbacktracking matrix `B` and its reduced
//! form `R`.
//!
//! Directed edges are laid out pairwise: the `m`-th undirected edge `{i, j}`
//! with `i < j` (edges sorted by `(i, j)`) owns index `2m` for `i→j` and
//! `2m + 1` for `j→i`, so the reciprocal of `e` is `e ^ 1`.
//!
//! `B[k→l, i→j] = 1` iff `l = i` and `j ≠ k`, and `R[k→l, i→j] = n_i B[k→l, i→j]`.
//! Neither is ever stored. A left product sums over the in-edges of the tail,
//! a right product over the out-edges of the head; both reduce to one
//! per-node partial sum minus the excluded reciprocal term, so a product costs
//! `O(M)`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

/// A subgraph together with the original id of every relabeled node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    /// `original_ids[new] = old`, ascending.
    pub original_ids: Vec<usize>,
}

impl Subgraph {
    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.original_ids.binary_search(&old).ok()
    }
}

impl Graph {
    /// Builds a graph from node-id pairs. Self-loops and duplicates are
    /// dropped; ids up to the largest one seen become nodes even if isolated.
    pub fn from_edge_list<I>(pairs: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::with_nodes(0, pairs)
    }

    /// Like [`Graph::from_edge_list`] but with at least `node_count` nodes.
    pub fn with_nodes<I>(node_count: usize, pairs: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); node_count];
        for (a, b) in pairs {
            let hi = a.max(b);
            if hi >= adjacency.len() {
                adjacency.resize_with(hi + 1, Vec::new);
            }
            if a == b {
                continue;
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut twice = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice += list.len();
        }
        Graph {
            adjacency,
            edge_count: twice / 2,
        }
    }

    pub fn empty(node_count: usize) -> Graph {
        Graph {
            adjacency: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.node_count() && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Undirected edges `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode {
                node,
                node_count: self.node_count(),
            })
        }
    }

    /// Induced subgraph on `nodes`, relabeled `0..k` in ascending original-id order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Subgraph> {
        let mut original_ids = nodes.to_vec();
        original_ids.sort_unstable();
        original_ids.dedup();
        for &v in &original_ids {
            self.check_node(v)?;
        }
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in original_ids.iter().enumerate() {
            remap[old] = new;
        }
        let adjacency: Vec<Vec<usize>> = original_ids
            .iter()
            .map(|&old| {
                // Ascending old ids map to ascending new ids, so lists stay sorted.
                self.adjacency[old]
                    .iter()
                    .filter_map(|&w| (remap[w] != usize::MAX).then_some(remap[w]))
                    .collect()
            })
            .collect();
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        Ok(Subgraph {
            graph: Graph {
                adjacency,
                edge_count,
            },
            original_ids,
        })
    }

    /// Hop distances from `root`; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, root: usize) -> Result<Vec<Option<usize>>> {
        self.check_node(root)?;
        Ok(self.multi_source_bfs(&[root]))
    }

    /// Hop distance to the nearest of `roots`. Roots must be valid.
    pub(crate) fn multi_source_bfs(&self, roots: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        for &r in roots {
            if dist[r].is_none() {
                dist[r] = Some(0);
                queue.push_back(r);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0) + 1;
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count()];
        let mut components = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.node_count() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut members = Vec::new();
            while let Some(v) = queue.pop_front() {
                members.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Largest eccentricity over all nodes, taken within each component.
    pub fn diameter(&self) -> usize {
        (0..self.node_count())
            .map(|v| {
                self.multi_source_bfs(&[v])
                    .into_iter()
                    .flatten()
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }
}

/// Which side of the matrix the vector multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Row vector times matrix, `x·B`.
    Left,
    /// Matrix times column vector, `B·x`.
    Right,
}

/// Bijection between ordered adjacent pairs and `0..2M`.
#[derive(Debug, Clone)]
pub struct EdgeIndex {
    /// CSR offsets into `out_edges`, aligned with the graph's adjacency lists.
    offsets: Vec<usize>,
    /// `out_edges[offsets[i] + r]` is the id of `i → adjacency[i][r]`.
    out_edges: Vec<usize>,
    /// `(tail, head)` of every directed edge.
    endpoints: Vec<(usize, usize)>,
}

impl EdgeIndex {
    pub fn new(graph: &Graph) -> EdgeIndex {
        let n = graph.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            offsets.push(offsets[v] + graph.degree(v));
        }
        let mut out_edges = vec![0; offsets[n]];
        let mut endpoints = Vec::with_capacity(2 * graph.edge_count());
        // Position of the next unassigned slot per node.
        let mut cursor = offsets[..n].to_vec();
        for (m, (i, j)) in graph.edges().enumerate() {
            let forward = 2 * m;
            endpoints.push((i, j));
            endpoints.push((j, i));
            // Edges come in (i, j) order, so i's slots fill in ascending j; j's
            // slots fill in ascending i. Both match the sorted adjacency.
            out_edges[cursor[i]] = forward;
            cursor[i] += 1;
            out_edges[cursor[j]] = forward + 1;
            cursor[j] += 1;
        }
        debug_assert!(cursor.iter().zip(&offsets[1..]).all(|(c, o)| c == o));
        EdgeIndex {
            offsets,
            out_edges,
            endpoints,
        }
    }

    /// Number of directed edges, `2M`.
    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Directed edge id of `tail → head`, if the nodes are adjacent.
    pub fn edge_id(&self, graph: &Graph, tail: usize, head: usize) -> Option<usize> {
        if tail >= graph.node_count() {
            return None;
        }
        let r = graph.neighbors(tail).binary_search(&head).ok()?;
        Some(self.out_edges[self.offsets[tail] + r])
    }

    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        self.endpoints[edge]
    }

    pub fn tail(&self, edge: usize) -> usize {
        self.endpoints[edge].0
    }

    pub fn head(&self, edge: usize) -> usize {
        self.endpoints[edge].1
    }

    pub fn reciprocal(edge: usize) -> usize {
        edge ^ 1
    }

    /// Ids of the edges leaving `node`, in ascending-neighbor order.
    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_edges[self.offsets[node]..self.offsets[node + 1]]
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                got: x.len(),
            })
        }
    }

    /// `x·B` or `B·x`.
    pub fn apply_b(&self, x: &[f64], side: Side) -> Result<Vec<f64>> {
        self.check_len(x)?;
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y, side, None);
        Ok(y)
    }

    /// `x·R` or `R·x` for the reduced matrix of `indicator`.
    pub fn apply_r(&self, indicator: &SourceIndicator, x: &[f64], side: Side) -> Result<Vec<f64>> {
        self.check_len(x)?;
        if indicator.node_count() != self.node_count() {
            return Err(Error::InvalidParameter(format!(
                "indicator covers {} nodes, graph has {}",
                indicator.node_count(),
                self.node_count()
            )));
        }
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y, side, Some(indicator));
        Ok(y)
    }

    /// Unchecked kernel shared by `apply_b`, `apply_r` and the eigensolvers.
    /// `mask = None` means `B`.
    pub(crate) fn apply_into(
        &self,
        x: &[f64],
        y: &mut [f64],
        side: Side,
        mask: Option<&SourceIndicator>,
    ) {
        for node in 0..self.node_count() {
            let out = self.out_edges(node);
            if mask.is_some_and(|m| m.is_source(node)) {
                match side {
                    Side::Left => out.iter().for_each(|&e| y[e] = 0.0),
                    Side::Right => out.iter().for_each(|&e| y[e ^ 1] = 0.0),
                }
                continue;
            }
            match side {
                Side::Left => {
                    // (xB)_{i→j} = Σ_{k∈∂i} x_{k→i} − x_{j→i}
                    let total: f64 = out.iter().map(|&e| x[e ^ 1]).sum();
                    for &e in out {
                        y[e] = total - x[e ^ 1];
                    }
                }
                Side::Right => {
                    // (Bx)_{k→l} = Σ_{j∈∂l} x_{l→j} − x_{l→k}
                    let total: f64 = out.iter().map(|&e| x[e]).sum();
                    for &e in out {
                        y[e ^ 1] = total - x[e];
                    }
                }
            }
        }
    }
}

/// Source set `S` and the per-node indicator `n` (`n_i = 0` on sources).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceIndicator {
    sources: Vec<usize>,
    is_source: Vec<bool>,
}

impl SourceIndicator {
    /// Indicator for a non-empty source set on a graph of `node_count` nodes.
    pub fn new(node_count: usize, sources: &[usize]) -> Result<SourceIndicator> {
        if sources.is_empty() {
            return Err(Error::InvalidParameter("source set is empty".into()));
        }
        let mut indicator = SourceIndicator::none(node_count);
        for &s in sources {
            if s >= node_count {
                return Err(Error::UnknownNode { node: s, node_count });
            }
            indicator.is_source[s] = true;
        }
        indicator.sources = sources.to_vec();
        indicator.sources.sort_unstable();
        indicator.sources.dedup();
        Ok(indicator)
    }

    /// All `n_i = 1`; `R` coincides with `B`.
    pub fn none(node_count: usize) -> SourceIndicator {
        SourceIndicator {
            sources: Vec::new(),
            is_source: vec![false; node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.is_source.len()
    }

    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn is_source(&self, node: usize) -> bool {
        self.is_source[node]
    }

    /// `n_i`.
    pub fn n(&self, node: usize) -> f64 {
        if self.is_source[node] {
            0.0
        } else {
            1.0
        }
    }

    /// `Σ_i n_i`.
    pub fn count_non_sources(&self) -> usize {
        self.node_count() - self.sources.len()
    }
}
