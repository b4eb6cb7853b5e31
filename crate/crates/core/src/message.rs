//! Message-passing description of the spread on a snapshot.
//!
//! `v[i→j]` at step `t` is the probability that `i` has not yet passed the
//! rumor to `j`. The nonlinear system is
//!
//! ```text
//! v(t)[i→j] = 1 − Σ_{τ=1..t} (1−p)^{τ−1} p · (1 − n_i Π_{k∈∂i∖j} v(t−τ)[k→i])
//! ```
//!
//! starting from `v(0) = 1`. Linearizing the product around `v = 1` and
//! unrolling the geometric kernel gives, for `u = 1 − v`,
//!
//! ```text
//! u(t+1) = p(1 − n) + u(t)·[(1−p)I + pR]
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeIndex, Graph, Side, SourceIndicator};

/// Round-off allowed outside `[0, 1]` before an entry counts as a bug.
pub const ROUNDOFF: f64 = 1e-12;

/// Above this horizon the nonlinear system uses the O(1)-memory recursion
/// instead of the explicit convolution over the full history.
pub const CONVOLUTION_HORIZON: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    pub t: usize,
    /// `v[e]` per directed edge.
    pub v: Vec<f64>,
}

impl MessageState {
    pub fn initial(edge_count: usize) -> MessageState {
        MessageState {
            t: 0,
            v: vec![1.0; edge_count],
        }
    }

    /// `u = 1 − v`.
    pub fn passed(&self) -> Vec<f64> {
        self.v.iter().map(|x| 1.0 - x).collect()
    }
}

/// `P_i`: probability that node `i` is still uninfected.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSurvival(pub Vec<f64>);

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "spreading probability {p} outside (0, 1)"
        )))
    }
}

fn check_indicator(index: &EdgeIndex, n: &SourceIndicator) -> Result<()> {
    if index.node_count() == n.node_count() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "indicator covers {} nodes, graph has {}",
            n.node_count(),
            index.node_count()
        )))
    }
}

/// `1 − n_i Π_{k∈∂i∖j} v[k→i]` for every edge `i→j`. Uses prefix and suffix
/// products so zero messages need no division.
fn bracket(index: &EdgeIndex, n: &SourceIndicator, v: &[f64], out: &mut [f64]) {
    let mut prefix = Vec::new();
    for node in 0..index.node_count() {
        let edges = index.out_edges(node);
        if n.is_source(node) {
            edges.iter().for_each(|&e| out[e] = 1.0);
            continue;
        }
        prefix.clear();
        let mut acc = 1.0;
        for &e in edges {
            prefix.push(acc);
            acc *= v[e ^ 1];
        }
        let mut suffix = 1.0;
        for (r, &e) in edges.iter().enumerate().rev() {
            out[e] = 1.0 - prefix[r] * suffix;
            suffix *= v[e ^ 1];
        }
    }
}

fn settle(v: &mut [f64], step: usize) -> Result<()> {
    for (edge, x) in v.iter_mut().enumerate() {
        if *x < -ROUNDOFF || *x > 1.0 + ROUNDOFF || x.is_nan() {
            return Err(Error::OutOfRange {
                edge,
                step,
                value: *x,
            });
        }
        *x = x.clamp(0.0, 1.0);
    }
    Ok(())
}

/// States `v(0) … v(T)` of the nonlinear system.
pub fn evolve_nonlinear(
    index: &EdgeIndex,
    n: &SourceIndicator,
    p: f64,
    steps: usize,
) -> Result<Vec<MessageState>> {
    check_p(p)?;
    check_indicator(index, n)?;
    if steps > CONVOLUTION_HORIZON {
        evolve_nonlinear_recursive(index, n, p, steps)
    } else {
        evolve_nonlinear_convolution(index, n, p, steps)
    }
}

/// Direct evaluation: every step sums the weighted brackets of all past states.
pub fn evolve_nonlinear_convolution(
    index: &EdgeIndex,
    n: &SourceIndicator,
    p: f64,
    steps: usize,
) -> Result<Vec<MessageState>> {
    check_p(p)?;
    check_indicator(index, n)?;
    let dim = index.len();
    let mut states = vec![MessageState::initial(dim)];
    // brackets[s] is the bracket evaluated at state s.
    let mut brackets: Vec<Vec<f64>> = Vec::with_capacity(steps);
    for t in 1..=steps {
        let mut g = vec![0.0; dim];
        bracket(index, n, &states[t - 1].v, &mut g);
        brackets.push(g);
        let mut v = vec![1.0; dim];
        let mut weight = p;
        for tau in 1..=t {
            let g = &brackets[t - tau];
            for (x, gx) in v.iter_mut().zip(g) {
                *x -= weight * gx;
            }
            weight *= 1.0 - p;
        }
        settle(&mut v, t)?;
        states.push(MessageState { t, v });
    }
    Ok(states)
}

/// Same system through `D(t+1) = p·g(t) + (1−p)·D(t)`, `v(t) = 1 − D(t)`.
pub fn evolve_nonlinear_recursive(
    index: &EdgeIndex,
    n: &SourceIndicator,
    p: f64,
    steps: usize,
) -> Result<Vec<MessageState>> {
    check_p(p)?;
    check_indicator(index, n)?;
    let dim = index.len();
    let mut states = vec![MessageState::initial(dim)];
    let mut debt = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for t in 1..=steps {
        bracket(index, n, &states[t - 1].v, &mut g);
        for (d, gx) in debt.iter_mut().zip(&g) {
            *d = p * gx + (1.0 - p) * *d;
        }
        let mut v: Vec<f64> = debt.iter().map(|d| 1.0 - d).collect();
        settle(&mut v, t)?;
        states.push(MessageState { t, v });
    }
    Ok(states)
}

/// Iterates `u(0) … u(T)` of the linearized system. No clamping.
pub fn evolve_linear(
    index: &EdgeIndex,
    n: &SourceIndicator,
    p: f64,
    steps: usize,
) -> Result<Vec<Vec<f64>>> {
    check_p(p)?;
    check_indicator(index, n)?;
    let dim = index.len();
    let forcing: Vec<f64> = (0..dim).map(|e| p * (1.0 - n.n(index.tail(e)))).collect();
    let mut trajectory = vec![vec![0.0; dim]];
    let mut ur = vec![0.0; dim];
    for _ in 0..steps {
        let u = trajectory.last().expect("trajectory starts non-empty");
        index.apply_into(u, &mut ur, Side::Left, Some(n));
        let next = (0..dim)
            .map(|e| forcing[e] + (1.0 - p) * u[e] + p * ur[e])
            .collect();
        trajectory.push(next);
    }
    Ok(trajectory)
}

/// `P_i = n_i Π_{j∈∂i} v[j→i]`.
pub fn survival_probabilities(
    index: &EdgeIndex,
    state: &MessageState,
    n: &SourceIndicator,
) -> Result<NodeSurvival> {
    check_indicator(index, n)?;
    if state.v.len() != index.len() {
        return Err(Error::DimensionMismatch {
            expected: index.len(),
            got: state.v.len(),
        });
    }
    Ok(NodeSurvival(
        (0..index.node_count())
            .map(|i| {
                n.n(i)
                    * index
                        .out_edges(i)
                        .iter()
                        .map(|&e| state.v[e ^ 1])
                        .product::<f64>()
            })
            .collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Norm {
    L1,
    #[default]
    L2,
}

impl Norm {
    pub fn of(self, x: &[f64]) -> f64 {
        match self {
            Norm::L1 => x.iter().map(|a| a.abs()).sum(),
            Norm::L2 => x.iter().map(|a| a * a).sum::<f64>().sqrt(),
        }
    }
}

pub fn trajectory_norms(trajectory: &[Vec<f64>], norm: Norm) -> Vec<f64> {
    trajectory.iter().map(|u| norm.of(u)).collect()
}

/// One labeled curve of `‖u(t)‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySeries {
    pub label: String,
    pub norms: Vec<f64>,
}

/// `t,norm,label` rows for every series, in order.
pub fn trajectory_csv(series: &[TrajectorySeries]) -> String {
    let mut out = String::from("t,norm,label\n");
    for s in series {
        for (t, norm) in s.norms.iter().enumerate() {
            let _ = writeln!(out, "{t},{norm},{}", s.label);
        }
    }
    out
}

/// Convenience wrapper: indicator, index and both modes from a graph.
pub fn passed_trajectory(
    graph: &Graph,
    sources: &[usize],
    p: f64,
    steps: usize,
    linear: bool,
) -> Result<Vec<Vec<f64>>> {
    let index = EdgeIndex::new(graph);
    let n = SourceIndicator::new(graph.node_count(), sources)?;
    if linear {
        evolve_linear(&index, &n, p, steps)
    } else {
        Ok(evolve_nonlinear(&index, &n, p, steps)?
            .iter()
            .map(MessageState::passed)
            .collect())
    }
}
