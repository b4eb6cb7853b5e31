//! Dominant eigenpairs of `B` and `R` by power iteration, and the
//! first-order estimate of how much zeroing a source set lowers `λ_max(B)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeIndex, Side, SourceIndicator};

/// Iteration count used by the identification algorithms unless overridden.
pub const DEFAULT_POWER_ITERS: usize = 20;

/// An iterate whose norm falls below this (after unit normalization) is
/// treated as collapsed: the operator is nilpotent on it.
pub const COLLAPSE_EPS: f64 = 1e-10;

/// Relative residual below which an estimate is flagged converged.
pub const CONVERGED_RESIDUAL: f64 = 1e-6;

/// Residual target of the converge mode.
pub const CONVERGE_TARGET: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerConfig {
    /// Exactly this many products (the identification default is 20).
    Fixed(usize),
    /// Iterate until the residual is at round-off level, or `max_iters`.
    Converge { max_iters: usize },
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig::Fixed(DEFAULT_POWER_ITERS)
    }
}

impl PowerConfig {
    pub fn converge() -> Self {
        PowerConfig::Converge { max_iters: 200_000 }
    }
}

/// A square operator on edge space.
pub trait EdgeOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// `B` or `R` on one side, never materialized.
#[derive(Debug, Clone, Copy)]
pub struct Nonbacktracking<'a> {
    pub index: &'a EdgeIndex,
    pub mask: Option<&'a SourceIndicator>,
    pub side: Side,
}

impl<'a> Nonbacktracking<'a> {
    pub fn b(index: &'a EdgeIndex, side: Side) -> Self {
        Nonbacktracking {
            index,
            mask: None,
            side,
        }
    }

    pub fn r(index: &'a EdgeIndex, indicator: &'a SourceIndicator, side: Side) -> Self {
        Nonbacktracking {
            index,
            mask: Some(indicator),
            side,
        }
    }
}

impl EdgeOperator for Nonbacktracking<'_> {
    fn dim(&self) -> usize {
        self.index.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.index.apply_into(x, y, self.side, self.mask);
    }
}

/// Outcome of one power iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub lambda: f64,
    /// Unit vector, or all zeros after a collapse.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Step at which the iterate vanished, if it did.
    pub collapse_step: Option<usize>,
    /// Norm ratio of the last step before the collapse.
    pub tail_ratio: f64,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn scale(x: &mut [f64], by: f64) {
    x.iter_mut().for_each(|a| *a *= by);
}

fn residual<O: EdgeOperator + ?Sized>(op: &O, x: &[f64], lambda: f64, work: &mut [f64]) -> f64 {
    op.apply(x, work);
    work.iter()
        .zip(x)
        .map(|(ax, xi)| (ax - lambda * xi).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn collapsed(dim: usize, iterations: usize, tail_ratio: f64) -> PowerResult {
    PowerResult {
        lambda: 0.0,
        vector: vec![0.0; dim],
        iterations,
        converged: true,
        collapse_step: Some(iterations),
        tail_ratio,
    }
}

/// Power iteration from the all-ones vector.
///
/// In fixed mode the estimate is the geometric mean of the last two norm
/// ratios, which is exact for period-two oscillation. Converge mode first
/// iterates the operator itself (which detects nilpotency exactly, since the
/// nilpotency index is at most the dimension) and then switches to `A + I`,
/// whose Perron root is `λ + 1` and which has no other eigenvalue of the
/// same modulus.
pub fn power_iteration<O: EdgeOperator + ?Sized>(op: &O, cfg: PowerConfig) -> PowerResult {
    let dim = op.dim();
    if dim == 0 {
        return collapsed(0, 0, 0.0);
    }
    let mut x = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut y = vec![0.0; dim];
    let mut work = vec![0.0; dim];
    let (plain_steps, max_iters) = match cfg {
        PowerConfig::Fixed(iters) => (iters.max(1), iters.max(1)),
        PowerConfig::Converge { max_iters } => ((dim + 1).min(max_iters), max_iters),
    };
    let mut prev_ratio = f64::NAN;
    let mut ratio = 0.0;
    let mut step = 0;
    while step < plain_steps {
        step += 1;
        op.apply(&x, &mut y);
        let r = norm(&y);
        if r <= COLLAPSE_EPS {
            return collapsed(dim, step, ratio);
        }
        prev_ratio = ratio;
        ratio = r;
        scale(&mut y, 1.0 / r);
        std::mem::swap(&mut x, &mut y);
        if matches!(cfg, PowerConfig::Converge { .. })
            && residual(op, &x, r, &mut work) <= CONVERGE_TARGET * r.max(1.0)
        {
            return PowerResult {
                lambda: r,
                vector: x,
                iterations: step,
                converged: true,
                collapse_step: None,
                tail_ratio: r,
            };
        }
    }
    let lambda = if step >= 2 && prev_ratio > 0.0 {
        (prev_ratio * ratio).sqrt()
    } else {
        ratio
    };
    if let PowerConfig::Fixed(_) = cfg {
        let res = residual(op, &x, lambda, &mut work);
        return PowerResult {
            lambda,
            converged: res <= CONVERGED_RESIDUAL * lambda,
            vector: x,
            iterations: step,
            collapse_step: None,
            tail_ratio: ratio,
        };
    }
    // Shifted phase.
    let mut lambda = lambda;
    let mut res = f64::INFINITY;
    while step < max_iters {
        step += 1;
        op.apply(&x, &mut y);
        lambda = norm(&y);
        res = y
            .iter()
            .zip(&x)
            .map(|(ax, xi)| (ax - lambda * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        if res <= CONVERGE_TARGET * lambda.max(1.0) {
            break;
        }
        y.iter_mut().zip(&x).for_each(|(a, xi)| *a += xi);
        let r = norm(&y);
        scale(&mut y, 1.0 / r);
        std::mem::swap(&mut x, &mut y);
    }
    PowerResult {
        lambda,
        converged: res <= CONVERGED_RESIDUAL * lambda,
        vector: x,
        iterations: step,
        collapse_step: None,
        tail_ratio: lambda,
    }
}

/// Dominant eigenvalue with right (`B u = λ u`) and left (`vᵀB = λ vᵀ`) vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest-magnitude entry made positive.
fn fix_sign(x: &mut [f64]) {
    let pivot = x
        .iter()
        .copied()
        .fold(0.0f64, |best, a| if a.abs() > best.abs() { a } else { best });
    if pivot < 0.0 {
        x.iter_mut().for_each(|a| *a = -*a);
    }
}

/// Power iteration on `A + I` for a fixed number of steps. Same eigenvectors
/// as `A`, but no other eigenvalue shares the Perron root's modulus, so
/// periodic operators do not oscillate.
fn shifted_vector<O: EdgeOperator + ?Sized>(op: &O, iters: usize) -> Vec<f64> {
    let dim = op.dim();
    let mut x = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut y = vec![0.0; dim];
    for _ in 0..iters {
        op.apply(&x, &mut y);
        y.iter_mut().zip(&x).for_each(|(a, xi)| *a += xi);
        let r = norm(&y);
        scale(&mut y, 1.0 / r);
        std::mem::swap(&mut x, &mut y);
    }
    x
}

/// In fixed mode the eigenvalue comes from the plain iteration (so nilpotent
/// `B` still collapses to zero vectors) while the vectors come from the
/// shifted iteration with the same step count.
pub fn dominant_pair_b(index: &EdgeIndex, cfg: PowerConfig) -> EigenPair {
    let right_op = Nonbacktracking::b(index, Side::Right);
    let left_op = Nonbacktracking::b(index, Side::Left);
    let right = power_iteration(&right_op, cfg);
    let left = power_iteration(&left_op, cfg);
    let (mut u, mut v) = match cfg {
        PowerConfig::Fixed(iters) if right.collapse_step.is_none() => {
            (shifted_vector(&right_op, iters), shifted_vector(&left_op, iters))
        }
        _ => (right.vector, left.vector),
    };
    fix_sign(&mut u);
    fix_sign(&mut v);
    EigenPair {
        lambda: right.lambda,
        right: u,
        left: v,
        iterations: right.iterations.max(left.iterations),
        converged: right.converged && left.converged,
    }
}

/// `λ_max(R_S)` estimate for one candidate set.
pub fn reduced_lambda(index: &EdgeIndex, indicator: &SourceIndicator, cfg: PowerConfig) -> PowerResult {
    power_iteration(&Nonbacktracking::r(index, indicator, Side::Right), cfg)
}

/// First-order estimate of `λ_max(B) − λ_max(R_S)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaLambda {
    pub value: f64,
}

/// `(vᵀΔB u − vᵀΔB u_S) / (vᵀu − vᵀu_S)` where `ΔB = B − R` keeps the
/// columns whose tail lies in `S` and `u_S` keeps only the entries of `u` on
/// edges pointing into `S`. For one source `s` the numerator is
/// `Σ_{j∈∂s} u[s→j] Σ_{k∈∂s∖j} v[k→s]`; adjacent sources add the cross term.
pub fn delta_lambda(pair: &EigenPair, index: &EdgeIndex, sources: &[usize]) -> Result<DeltaLambda> {
    if sources.is_empty() {
        return Err(Error::InvalidParameter("empty candidate set".into()));
    }
    let indicator = SourceIndicator::new(index.node_count(), sources)?;
    let (u, v) = (&pair.right, &pair.left);
    if u.len() != index.len() || v.len() != index.len() {
        return Err(Error::DimensionMismatch {
            expected: index.len(),
            got: u.len().min(v.len()),
        });
    }
    let mut direct = 0.0;
    let mut cross = 0.0;
    let mut into_sources = 0.0;
    for &s in indicator.sources() {
        let out = index.out_edges(s);
        let inflow: f64 = out.iter().map(|&e| v[e ^ 1]).sum();
        for &e in out {
            // e = s→j; Σ_{k∈∂s∖j} v[k→s] = inflow − v[j→s]
            let term = u[e] * (inflow - v[e ^ 1]);
            direct += term;
            if indicator.is_source(index.head(e)) {
                cross += term;
            }
            into_sources += v[e ^ 1] * u[e ^ 1];
        }
    }
    let overlap: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let denominator = overlap - into_sources;
    if overlap == 0.0 || denominator.abs() <= 1e-12 * overlap.abs() {
        return Err(Error::DegenerateCandidate(indicator.sources().to_vec()));
    }
    Ok(DeltaLambda {
        value: (direct - cross) / denominator,
    })
}
