//! Source identification: MSI, PMSI, and the Jordan-center and
//! rumor-center (BFS tree) baselines.
//!
//! MSI scores a candidate set `Ŝ` by `λ_max(R_Ŝ)` and picks the smallest.
//! PMSI computes one eigenpair of `B` and picks the largest perturbation
//! estimate `Δλ`. Scores within [`TIE_TOLERANCE`] of the best are ties and go
//! to the lexicographically smallest set.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeIndex, Graph, SourceIndicator};
use crate::spectral::{delta_lambda, dominant_pair_b, reduced_lambda, PowerConfig, PowerResult};

pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "msi")]
    Msi,
    #[serde(rename = "pmsi")]
    Pmsi,
    #[serde(rename = "jc")]
    Jc,
    #[serde(rename = "rc-bfs")]
    RcBfs,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Msi, Method::Pmsi, Method::Jc, Method::RcBfs];

    pub fn name(self) -> &'static str {
        match self {
            Method::Msi => "msi",
            Method::Pmsi => "pmsi",
            Method::Jc => "jc",
            Method::RcBfs => "rc-bfs",
        }
    }

    pub fn single_source_only(self) -> bool {
        matches!(self, Method::Jc | Method::RcBfs)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub nodes: Vec<usize>,
    /// `λ_max(R)` for MSI, `Δλ` for PMSI, eccentricity for JC, log rumor
    /// centrality for RC-BFS.
    pub score: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationResult {
    pub method: Method,
    /// Best first.
    pub ranked: Vec<CandidateScore>,
    pub chosen: Vec<usize>,
}

impl IdentificationResult {
    fn from_ranked(method: Method, ranked: Vec<CandidateScore>) -> Result<Self> {
        let chosen = ranked
            .first()
            .map(|c| c.nodes.clone())
            .ok_or(Error::EmptyGraph)?;
        Ok(IdentificationResult {
            method,
            ranked,
            chosen,
        })
    }
}

/// All `s`-subsets of `0..n` in lexicographic order.
pub fn enumerate_candidates(n: usize, s: usize) -> Result<impl Iterator<Item = Vec<usize>>> {
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "cannot choose {s} sources among {n} nodes"
        )));
    }
    Ok((0..n).combinations(s))
}

/// Sorts ascending (or descending) by score, then moves the lexicographically
/// smallest member of the leading tie band to the front. Degenerate entries
/// always sort last.
fn rank(mut scores: Vec<CandidateScore>, descending: bool) -> Vec<CandidateScore> {
    let key = |c: &CandidateScore| if descending { -c.score } else { c.score };
    scores.sort_by(|a, b| {
        a.degenerate
            .cmp(&b.degenerate)
            .then(key(a).total_cmp(&key(b)))
            .then_with(|| a.nodes.cmp(&b.nodes))
    });
    if let Some(first) = scores.first().filter(|c| !c.degenerate) {
        let best = key(first);
        let band = scores
            .iter()
            .take_while(|c| !c.degenerate && key(c) - best <= TIE_TOLERANCE)
            .count();
        scores[..band].sort_by(|a, b| a.nodes.cmp(&b.nodes));
    }
    scores
}

/// Multi-source covering radius: the largest distance from any node to its
/// nearest candidate. Equals the eccentricity for a single candidate.
/// Unreachable nodes count as `node_count`.
fn covering_radius(graph: &Graph, nodes: &[usize]) -> usize {
    graph
        .multi_source_bfs(nodes)
        .into_iter()
        .map(|d| d.unwrap_or(graph.node_count()))
        .max()
        .unwrap_or(0)
}

fn jordan_fallback(graph: &Graph, candidates: Vec<Vec<usize>>) -> Vec<CandidateScore> {
    let scores = candidates
        .into_par_iter()
        .map(|nodes| CandidateScore {
            score: covering_radius(graph, &nodes) as f64,
            nodes,
            degenerate: false,
        })
        .collect();
    rank(scores, false)
}

fn check_request(graph: &Graph, s: usize) -> Result<()> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if s == 0 || s > graph.node_count() {
        return Err(Error::InvalidParameter(format!(
            "cannot choose {s} sources among {} nodes",
            graph.node_count()
        )));
    }
    Ok(())
}

/// Minimal `λ_max(R_Ŝ)` over all `|Ŝ| = s` candidate sets.
///
/// If every candidate's iterate collapses (all `λ = 0`, e.g. tree-like
/// snapshots) the ranking falls back to the collapse step and the last norm
/// ratio before it; when all candidates collapse at the same step the
/// covering-radius (Jordan) order is used instead.
pub fn msi(graph: &Graph, s: usize, cfg: PowerConfig) -> Result<IdentificationResult> {
    check_request(graph, s)?;
    let index = EdgeIndex::new(graph);
    let candidates: Vec<Vec<usize>> = enumerate_candidates(graph.node_count(), s)?.collect();
    let results: Vec<PowerResult> = candidates
        .par_iter()
        .map(|nodes| {
            let indicator = SourceIndicator::new(graph.node_count(), nodes)
                .expect("candidates are valid node ids");
            reduced_lambda(&index, &indicator, cfg)
        })
        .collect();
    if results.iter().all(|r| r.collapse_step.is_some()) {
        let first = results[0].collapse_step;
        if results.iter().all(|r| r.collapse_step == first) {
            let mut ranked = jordan_fallback(graph, candidates);
            // Reported scores stay λ = 0.
            ranked.iter_mut().for_each(|c| c.score = 0.0);
            return IdentificationResult::from_ranked(Method::Msi, ranked);
        }
        let mut order: Vec<(usize, f64, Vec<usize>)> = results
            .iter()
            .zip(candidates)
            .map(|(r, nodes)| (r.collapse_step.unwrap_or(0), r.tail_ratio, nodes))
            .collect();
        order.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then_with(|| a.2.cmp(&b.2)));
        let ranked = order
            .into_iter()
            .map(|(_, _, nodes)| CandidateScore {
                nodes,
                score: 0.0,
                degenerate: false,
            })
            .collect();
        return IdentificationResult::from_ranked(Method::Msi, ranked);
    }
    let scores = results
        .iter()
        .zip(candidates)
        .map(|(r, nodes)| CandidateScore {
            nodes,
            score: r.lambda,
            degenerate: false,
        })
        .collect();
    IdentificationResult::from_ranked(Method::Msi, rank(scores, false))
}

/// Maximal `Δλ` from a single eigenpair of `B`. Degenerate candidates rank
/// last; if all are degenerate the covering-radius order decides.
pub fn pmsi(graph: &Graph, s: usize, cfg: PowerConfig) -> Result<IdentificationResult> {
    check_request(graph, s)?;
    let index = EdgeIndex::new(graph);
    let pair = dominant_pair_b(&index, cfg);
    let candidates: Vec<Vec<usize>> = enumerate_candidates(graph.node_count(), s)?.collect();
    let scores: Vec<CandidateScore> = candidates
        .into_par_iter()
        .map(|nodes| match delta_lambda(&pair, &index, &nodes) {
            Ok(d) => CandidateScore {
                nodes,
                score: d.value,
                degenerate: false,
            },
            Err(_) => CandidateScore {
                nodes,
                score: f64::NEG_INFINITY,
                degenerate: true,
            },
        })
        .collect();
    if scores.iter().all(|c| c.degenerate) {
        let mut ranked = jordan_fallback(graph, scores.into_iter().map(|c| c.nodes).collect());
        ranked.iter_mut().for_each(|c| {
            c.score = f64::NEG_INFINITY;
            c.degenerate = true;
        });
        return IdentificationResult::from_ranked(Method::Pmsi, ranked);
    }
    IdentificationResult::from_ranked(Method::Pmsi, rank(scores, true))
}

/// Nodes of the largest component (smallest id wins ties), ascending.
fn main_component(graph: &Graph) -> Result<Vec<usize>> {
    if graph.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut best = Vec::new();
    for c in graph.connected_components() {
        if c.len() > best.len() {
            best = c;
        }
    }
    Ok(best)
}

/// Node of minimum eccentricity within the largest component.
pub fn jordan_center(graph: &Graph) -> Result<IdentificationResult> {
    let nodes = main_component(graph)?;
    let scores = nodes
        .par_iter()
        .map(|&v| {
            let ecc = graph
                .multi_source_bfs(&[v])
                .into_iter()
                .flatten()
                .max()
                .unwrap_or(0);
            CandidateScore {
                nodes: vec![v],
                score: ecc as f64,
                degenerate: false,
            }
        })
        .collect();
    IdentificationResult::from_ranked(Method::Jc, rank(scores, false))
}

/// BFS tree rooted at `root`: neighbors explored in ascending id, first
/// discovery is the parent. Returns the visit order and parents.
pub fn bfs_tree(graph: &Graph, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut parent = vec![None; graph.node_count()];
    let mut seen = vec![false; graph.node_count()];
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for &w in graph.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    (order, parent)
}

/// Subtree sizes `T_u` of the BFS tree of `root` over its component.
fn subtree_sizes(graph: &Graph, root: usize) -> Vec<usize> {
    let (order, parent) = bfs_tree(graph, root);
    let mut size = vec![0usize; graph.node_count()];
    for &v in order.iter().rev() {
        size[v] += 1;
        if let Some(p) = parent[v] {
            size[p] += size[v];
        }
    }
    order.iter().map(|&v| size[v]).collect()
}

/// `ln R(r, T) = ln N! − Σ_u ln T_u` on the BFS tree rooted at `root`, where
/// `N` is the size of the root's component.
pub fn log_rumor_centrality(graph: &Graph, root: usize) -> Result<f64> {
    graph.check_node(root)?;
    let sizes = subtree_sizes(graph, root);
    let log_factorial: f64 = (2..=sizes.len()).map(|k| (k as f64).ln()).sum();
    Ok(log_factorial - sizes.iter().map(|&t| (t as f64).ln()).sum::<f64>())
}

/// Exact `N!/Π T_u`, or `None` if it overflows.
pub fn rumor_centrality_count(graph: &Graph, root: usize) -> Result<Option<u128>> {
    graph.check_node(root)?;
    let sizes = subtree_sizes(graph, root);
    let mut factorial: u128 = 1;
    for k in 2..=sizes.len() as u128 {
        match factorial.checked_mul(k) {
            Some(f) => factorial = f,
            None => return Ok(None),
        }
    }
    let denominator = sizes
        .iter()
        .try_fold(1u128, |acc, &t| acc.checked_mul(t as u128));
    Ok(denominator.map(|d| factorial / d))
}

/// Maximizer of BFS-tree rumor centrality within the largest component.
pub fn rumor_center_bfs(graph: &Graph) -> Result<IdentificationResult> {
    let nodes = main_component(graph)?;
    let scores = nodes
        .par_iter()
        .map(|&v| CandidateScore {
            nodes: vec![v],
            score: log_rumor_centrality(graph, v).expect("component nodes are valid"),
            degenerate: false,
        })
        .collect();
    IdentificationResult::from_ranked(Method::RcBfs, rank(scores, true))
}

/// Dispatches on `method`. `sources` must be 1 for the baselines.
pub fn identify(
    graph: &Graph,
    method: Method,
    sources: usize,
    cfg: PowerConfig,
) -> Result<IdentificationResult> {
    if method.single_source_only() && sources != 1 {
        return Err(Error::InvalidParameter(format!(
            "{method} identifies a single source, {sources} requested"
        )));
    }
    match method {
        Method::Msi => msi(graph, sources, cfg),
        Method::Pmsi => pmsi(graph, sources, cfg),
        Method::Jc => jordan_center(graph),
        Method::RcBfs => rumor_center_bfs(graph),
    }
}
