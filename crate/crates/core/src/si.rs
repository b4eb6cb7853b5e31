//! Time-slotted susceptible-infected spreading and snapshot extraction.
//!
//! Sources are infected at step 0. In step `t ≥ 1` every node infected at a
//! step `< t` independently tries each susceptible neighbor with probability
//! `p`; a node infected in step `t` starts transmitting in step `t + 1`.

use std::fmt::Write as _;
use std::io::BufRead;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::netgen::parse_pair;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpreadConfig {
    /// Per-step, per-edge transmission probability.
    pub p: f64,
    pub sources: Vec<usize>,
    pub target_infected: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl SpreadConfig {
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "spreading probability {} outside (0, 1]",
                self.p
            )));
        }
        if self.sources.is_empty() {
            return Err(Error::InvalidParameter("no sources".into()));
        }
        for &s in &self.sources {
            graph.check_node(s)?;
        }
        let mut distinct = self.sources.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if self.target_infected < distinct.len() {
            return Err(Error::InvalidParameter(format!(
                "target {} is below the {} sources",
                self.target_infected,
                distinct.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfectionTrace {
    /// Step at which each node was infected; `None` if never.
    pub infection_time: Vec<Option<usize>>,
    /// Last simulated step.
    pub step_reached: usize,
    pub sources: Vec<usize>,
}

impl InfectionTrace {
    pub fn infected(&self) -> impl Iterator<Item = usize> + '_ {
        self.infection_time
            .iter()
            .enumerate()
            .filter_map(|(v, t)| t.map(|_| v))
    }

    pub fn infected_count(&self) -> usize {
        self.infection_time.iter().filter(|t| t.is_some()).count()
    }
}

/// Runs the spread until at least `target_infected` nodes are infected.
pub fn simulate_si(graph: &Graph, cfg: &SpreadConfig) -> Result<InfectionTrace> {
    cfg.validate(graph)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut infection_time = vec![None; graph.node_count()];
    let mut infected: Vec<usize> = Vec::new();
    for &s in &cfg.sources {
        if infection_time[s].is_none() {
            infection_time[s] = Some(0);
            infected.push(s);
        }
    }
    // Infected nodes that may still have susceptible neighbors.
    let mut active = infected.clone();
    let mut step = 0;
    while infected.len() < cfg.target_infected {
        if step == cfg.max_steps {
            return Err(Error::Underfilled {
                infected: infected.len(),
                target: cfg.target_infected,
                max_steps: cfg.max_steps,
                trace: Box::new(InfectionTrace {
                    infection_time,
                    step_reached: step,
                    sources: cfg.sources.clone(),
                }),
            });
        }
        step += 1;
        let mut newly = Vec::new();
        for &v in &active {
            for &w in graph.neighbors(v) {
                if infection_time[w].is_none() && rng.random_bool(cfg.p) {
                    infection_time[w] = Some(step);
                    newly.push(w);
                }
            }
        }
        active.retain(|&v| graph.neighbors(v).iter().any(|&w| infection_time[w].is_none()));
        active.extend(newly.iter().copied());
        infected.extend(newly);
        if active.is_empty() && infected.len() < cfg.target_infected {
            // Component exhausted; nothing can change any more.
            return Err(Error::Underfilled {
                infected: infected.len(),
                target: cfg.target_infected,
                max_steps: cfg.max_steps,
                trace: Box::new(InfectionTrace {
                    infection_time,
                    step_reached: step,
                    sources: cfg.sources.clone(),
                }),
            });
        }
    }
    Ok(InfectionTrace {
        infection_time,
        step_reached: step,
        sources: cfg.sources.clone(),
    })
}

/// Observed infected subgraph with relabeled ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub graph: Graph,
    /// Relabeled true sources; `None` for externally observed snapshots.
    pub true_sources: Option<Vec<usize>>,
    pub p: f64,
    /// Id in the base network of each snapshot node (empty when unknown).
    #[serde(default)]
    pub original_ids: Vec<usize>,
}

/// Induced subgraph of exactly `target_infected` infected nodes. When the
/// last step overshoots, a uniform subset of the last-step infectees is kept;
/// earlier infectees never depend on them, so the result stays SI-feasible.
pub fn take_snapshot<R: Rng + ?Sized>(
    graph: &Graph,
    trace: &InfectionTrace,
    p: f64,
    target_infected: usize,
    rng: &mut R,
) -> Result<Snapshot> {
    let last = trace.infection_time.iter().flatten().copied().max().unwrap_or(0);
    let mut before: Vec<usize> = Vec::new();
    let mut at_last: Vec<usize> = Vec::new();
    for (v, t) in trace.infection_time.iter().enumerate() {
        match t {
            Some(t) if *t < last => before.push(v),
            Some(_) => at_last.push(v),
            None => {}
        }
    }
    if last == 0 {
        // Only sources are infected; they cannot be dropped.
        before.append(&mut at_last);
    }
    if before.len() > target_infected || before.len() + at_last.len() < target_infected {
        return Err(Error::InfeasibleTrim {
            target: target_infected,
            before_last: before.len(),
        });
    }
    let keep = target_infected - before.len();
    let mut nodes = before;
    if keep == at_last.len() {
        nodes.extend(at_last);
    } else {
        let mut picked = sample(rng, at_last.len(), keep).into_vec();
        picked.sort_unstable();
        nodes.extend(picked.into_iter().map(|i| at_last[i]));
    }
    let sub = graph.induced_subgraph(&nodes)?;
    let mut true_sources: Vec<usize> = trace
        .sources
        .iter()
        .map(|&s| {
            sub.new_id(s)
                .ok_or_else(|| Error::Invariant(format!("source {s} missing from snapshot")))
        })
        .collect::<Result<_>>()?;
    true_sources.sort_unstable();
    true_sources.dedup();
    Ok(Snapshot {
        graph: sub.graph,
        true_sources: Some(true_sources),
        p,
        original_ids: sub.original_ids,
    })
}

/// Checks that every infected non-source node among `kept` has a kept
/// neighbor infected strictly earlier.
pub fn is_si_feasible(graph: &Graph, trace: &InfectionTrace, kept: &[usize]) -> bool {
    let mut inside = vec![false; graph.node_count()];
    kept.iter().for_each(|&v| inside[v] = true);
    kept.iter().all(|&v| match trace.infection_time[v] {
        None => false,
        Some(0) => true,
        Some(t) => graph
            .neighbors(v)
            .iter()
            .any(|&w| inside[w] && trace.infection_time[w].is_some_and(|tw| tw < t)),
    })
}

impl Snapshot {
    /// Header `p=<float> sources=<ids|?>`, a `# nodes=<N>` comment, then one
    /// `u v` line per edge with `u < v`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sources = match &self.true_sources {
            Some(s) => s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            None => "?".to_string(),
        };
        let _ = writeln!(out, "p={} sources={}", self.p, sources);
        let _ = writeln!(out, "# nodes={}", self.graph.node_count());
        for (u, v) in self.graph.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parses [`Snapshot::to_text`] output. Ids are used verbatim; the node
    /// count is the `# nodes=` value when present, otherwise one past the
    /// largest id mentioned.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Snapshot> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                None => {
                    return Err(Error::Parse {
                        line: 1,
                        message: "missing snapshot header".into(),
                    })
                }
                Some((i, line)) => {
                    let line = line.map_err(|e| Error::Parse {
                        line: i + 1,
                        message: e.to_string(),
                    })?;
                    if !line.trim().is_empty() {
                        break (i + 1, line);
                    }
                }
            }
        };
        let (p, true_sources) = parse_header(&header.1, header.0)?;
        let mut declared = None;
        let mut pairs = Vec::new();
        for (i, line) in lines {
            let line = line.map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            if let Some(n) = line.trim().strip_prefix("# nodes=") {
                declared = Some(n.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("bad node count `{n}`"),
                })?);
                continue;
            }
            if let Some((a, b)) = parse_pair(&line, i + 1)? {
                pairs.push((a as usize, b as usize));
            }
        }
        let implied = pairs
            .iter()
            .map(|&(a, b)| a.max(b) + 1)
            .chain(true_sources.iter().flatten().map(|&s| s + 1))
            .max()
            .unwrap_or(0);
        let node_count = match declared {
            Some(n) if n < implied => {
                return Err(Error::Parse {
                    line: header.0,
                    message: format!("declared {n} nodes but ids reach {}", implied - 1),
                })
            }
            Some(n) => n,
            None => implied,
        };
        Ok(Snapshot {
            graph: Graph::with_nodes(node_count, pairs),
            true_sources,
            p,
            original_ids: Vec::new(),
        })
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<(f64, Option<Vec<usize>>)> {
    let err = |message: String| Error::Parse {
        line: lineno,
        message,
    };
    let mut p = None;
    let mut sources = None;
    for field in line.split_whitespace() {
        if let Some(v) = field.strip_prefix("p=") {
            p = Some(
                v.parse::<f64>()
                    .map_err(|_| err(format!("bad probability `{v}`")))?,
            );
        } else if let Some(v) = field.strip_prefix("sources=") {
            sources = Some(if v == "?" {
                None
            } else {
                Some(
                    v.split(',')
                        .map(|s| s.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| err(format!("bad source list `{v}`")))?,
                )
            });
        } else {
            return Err(err(format!("unexpected header field `{field}`")));
        }
    }
    let p = p.ok_or_else(|| err("header lacks p=".into()))?;
    let sources = sources.ok_or_else(|| err("header lacks sources=".into()))?;
    Ok((p, sources))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edge_list((0..n - 1).map(|i| (i, i + 1)))
    }

    fn cfg(p: f64, sources: Vec<usize>, target: usize, seed: u64) -> SpreadConfig {
        SpreadConfig {
            p,
            sources,
            target_infected: target,
            max_steps: 10_000,
            seed,
        }
    }

    #[test]
    fn deterministic_spread_is_bfs() {
        let trace = simulate_si(&path(5), &cfg(1.0, vec![2], 5, 0)).unwrap();
        assert_eq!(
            trace.infection_time,
            vec![Some(2), Some(1), Some(0), Some(1), Some(2)]
        );
        assert_eq!(trace.step_reached, 2);
    }

    #[test]
    fn low_probability_cycle_terminates() {
        let c6 = Graph::from_edge_list((0..6).map(|i| (i, (i + 1) % 6)));
        for seed in 0..20 {
            let trace = simulate_si(&c6, &cfg(0.1, vec![0], 6, seed)).unwrap();
            assert_eq!(trace.infected_count(), 6);
            let all: Vec<usize> = (0..6).collect();
            assert!(is_si_feasible(&c6, &trace, &all));
        }
    }

    #[test]
    fn underfilled_carries_trace() {
        let g = Graph::with_nodes(4, [(0, 1)]);
        match simulate_si(&g, &cfg(1.0, vec![0], 3, 0)) {
            Err(Error::Underfilled { infected: 2, trace, .. }) => {
                assert_eq!(trace.infected_count(), 2);
            }
            other => panic!("expected underfilled, got {other:?}"),
        }
        let mut capped = cfg(0.01, vec![0], 5, 3);
        capped.max_steps = 1;
        assert!(matches!(
            simulate_si(&path(5), &capped),
            Err(Error::Underfilled { max_steps: 1, .. })
        ));
    }

    #[test]
    fn config_validation() {
        let g = path(3);
        assert!(simulate_si(&g, &cfg(0.0, vec![0], 2, 0)).is_err());
        assert!(simulate_si(&g, &cfg(1.5, vec![0], 2, 0)).is_err());
        assert!(simulate_si(&g, &cfg(0.5, vec![], 2, 0)).is_err());
        assert!(simulate_si(&g, &cfg(0.5, vec![7], 2, 0)).is_err());
        assert!(simulate_si(&g, &cfg(0.5, vec![0, 1], 1, 0)).is_err());
    }

    #[test]
    fn exact_count_is_not_trimmed() {
        let g = path(5);
        let trace = simulate_si(&g, &cfg(1.0, vec![2], 5, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let snap = take_snapshot(&g, &trace, 1.0, 5, &mut rng).unwrap();
        assert_eq!(snap.graph, g);
        assert_eq!(snap.true_sources, Some(vec![2]));
    }

    #[test]
    fn star_overshoot_keeps_requested_leaves() {
        let star = Graph::from_edge_list((1..=6).map(|leaf| (0, leaf)));
        let trace = simulate_si(&star, &cfg(1.0, vec![0], 3, 0)).unwrap();
        assert_eq!(trace.infected_count(), 7);
        let mut seen = [0usize; 7];
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let snap = take_snapshot(&star, &trace, 1.0, 3, &mut rng).unwrap();
            assert_eq!(snap.graph.node_count(), 3);
            assert_eq!(snap.graph.edge_count(), 2);
            assert_eq!(snap.true_sources, Some(vec![0]));
            assert_eq!(snap.original_ids[0], 0);
            for &leaf in &snap.original_ids[1..] {
                seen[leaf] += 1;
            }
        }
        // Every leaf is picked sometimes.
        assert!(seen[1..].iter().all(|&c| c > 20), "{seen:?}");
    }

    #[test]
    fn infeasible_trim() {
        let g = path(5);
        let trace = simulate_si(&g, &cfg(1.0, vec![2], 5, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            take_snapshot(&g, &trace, 1.0, 2, &mut rng),
            Err(Error::InfeasibleTrim { before_last: 3, .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        let snap = Snapshot {
            graph: Graph::with_nodes(5, [(0, 1), (1, 2), (3, 1)]),
            true_sources: Some(vec![1, 4]),
            p: 0.05,
            original_ids: vec![],
        };
        let text = snap.to_text();
        assert!(text.starts_with("p=0.05 sources=1,4\n# nodes=5\n0 1\n"));
        assert_eq!(Snapshot::from_reader(text.as_bytes()).unwrap(), snap);

        let unknown = Snapshot::from_reader("p=0.1 sources=?\n0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(unknown.true_sources, None);
        assert_eq!(unknown.graph.node_count(), 3);

        assert!(Snapshot::from_reader("sources=0\n0 1\n".as_bytes()).is_err());
        assert!(Snapshot::from_reader("p=0.1 sources=a\n".as_bytes()).is_err());
        assert!(Snapshot::from_reader("p=0.1 sources=0\n# nodes=1\n0 4\n".as_bytes()).is_err());
    }
}
