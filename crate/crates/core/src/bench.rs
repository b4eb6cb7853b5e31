//! Monte-Carlo experiments: spread, observe, identify, score.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::identify::{identify, IdentificationResult, Method};
use crate::netgen::GeneratorSpec;
use crate::si::{simulate_si, take_snapshot, Snapshot, SpreadConfig};
use crate::spectral::{PowerConfig, DEFAULT_POWER_ITERS};

pub const DEFAULT_P: f64 = 0.05;

/// Graph in which error distances are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DistanceSpace {
    #[default]
    Snapshot,
    Network,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub p: f64,
    pub target_infected: usize,
    pub max_steps: usize,
    pub methods: Vec<Method>,
    pub instances: usize,
    pub source_count: usize,
    pub base_seed: u64,
    pub power: PowerConfig,
    pub distance: DistanceSpace,
    pub max_retries: usize,
    pub record_timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            generator: GeneratorSpec::SmallWorld {
                n: 1000,
                k: crate::netgen::DEFAULT_RING_NEIGHBORS,
                beta: crate::netgen::DEFAULT_REWIRING,
            },
            p: DEFAULT_P,
            target_infected: 400,
            max_steps: 100_000,
            methods: Method::ALL.to_vec(),
            instances: 500,
            source_count: 1,
            base_seed: 0,
            power: PowerConfig::default(),
            distance: DistanceSpace::Snapshot,
            max_retries: 50,
            record_timings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.instances == 0 {
            return bad("instances must be at least 1".into());
        }
        if self.source_count == 0 {
            return bad("source count must be at least 1".into());
        }
        if self.target_infected < self.source_count {
            return bad(format!(
                "target {} below source count {}",
                self.target_infected, self.source_count
            ));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return bad(format!("p = {} outside (0, 1]", self.p));
        }
        if let Some(m) = self.methods.iter().find(|m| m.single_source_only()) {
            if self.source_count != 1 {
                return bad(format!("{m} requires exactly one source"));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let mut iters = DEFAULT_POWER_ITERS;
        let mut converge = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let value = value.trim();
            fn num<T: std::str::FromStr>(v: &str, line: usize) -> Result<T> {
                v.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("cannot parse `{v}`"),
                })
            }
            match key.trim() {
                "graph" => cfg.generator = GeneratorSpec::parse(value)?,
                "p" => cfg.p = num(value, i + 1)?,
                "target" => cfg.target_infected = num(value, i + 1)?,
                "max_steps" => cfg.max_steps = num(value, i + 1)?,
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .filter(|m| !m.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                "instances" => cfg.instances = num(value, i + 1)?,
                "sources" => cfg.source_count = num(value, i + 1)?,
                "seed" => cfg.base_seed = num(value, i + 1)?,
                "power_iters" => iters = num(value, i + 1)?,
                "converge" => converge = num(value, i + 1)?,
                "distance" => {
                    cfg.distance = match value {
                        "snapshot" => DistanceSpace::Snapshot,
                        "network" => DistanceSpace::Network,
                        other => return Err(err(format!("unknown distance space `{other}`"))),
                    }
                }
                "max_retries" => cfg.max_retries = num(value, i + 1)?,
                "record_timings" => cfg.record_timings = num(value, i + 1)?,
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        cfg.power = if converge {
            PowerConfig::converge()
        } else {
            PowerConfig::Fixed(iters)
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for one attempt of one instance.
pub fn instance_seed(base: u64, instance: usize, attempt: usize) -> u64 {
    mix64(mix64(base ^ mix64(instance as u64)) ^ attempt as u64)
}

/// Optimal association between true and identified sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// Mean matched hop distance.
    pub delta: f64,
    /// `(true, identified, distance)` triples.
    pub pairs: Vec<(usize, usize, usize)>,
}

/// Minimum-cost perfect matching by exhaustive search over permutations.
/// Unreachable pairs cost the graph diameter plus one.
pub fn match_sources(truth: &[usize], identified: &[usize], graph: &Graph) -> Result<Matching> {
    if truth.len() != identified.len() {
        return Err(Error::SizeMismatch {
            truth: truth.len(),
            identified: identified.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("empty source sets".into()));
    }
    for &v in truth.iter().chain(identified) {
        graph.check_node(v)?;
    }
    let rows: Vec<Vec<Option<usize>>> = truth.iter().map(|&s| graph.multi_source_bfs(&[s])).collect();
    let unreachable = rows
        .iter()
        .any(|d| identified.iter().any(|&h| d[h].is_none()))
        .then(|| graph.diameter() + 1);
    let cost = |i: usize, h: usize| rows[i][h].or(unreachable).unwrap_or(0);
    let mut best: Option<(usize, Vec<usize>)> = None;
    for perm in (0..identified.len()).permutations(identified.len()) {
        let total: usize = perm.iter().enumerate().map(|(i, &j)| cost(i, identified[j])).sum();
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, perm));
        }
    }
    let (total, perm) = best.expect("at least one permutation");
    Ok(Matching {
        delta: total as f64 / truth.len() as f64,
        pairs: perm
            .iter()
            .enumerate()
            .map(|(i, &j)| (truth[i], identified[j], cost(i, identified[j])))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub method: Method,
    pub chosen: Vec<usize>,
    pub exact: bool,
    pub one_hop: bool,
    pub error_distance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// Scores one identification against the snapshot's ground truth, with
/// distances in `space` (snapshot graph, or `network` through the
/// snapshot's original ids).
pub fn evaluate_instance(
    result: &IdentificationResult,
    snapshot: &Snapshot,
    network: Option<&Graph>,
) -> Result<MethodOutcome> {
    let truth = snapshot.true_sources.as_ref().ok_or(Error::MissingGroundTruth)?;
    let mut chosen = result.chosen.clone();
    chosen.sort_unstable();
    let matching = match network {
        None => match_sources(truth, &chosen, &snapshot.graph)?,
        Some(base) => {
            let lift = |ids: &[usize]| -> Result<Vec<usize>> {
                ids.iter()
                    .map(|&v| {
                        snapshot.original_ids.get(v).copied().ok_or_else(|| {
                            Error::InvalidParameter("snapshot lacks original ids".into())
                        })
                    })
                    .collect()
            };
            match_sources(&lift(truth)?, &lift(&chosen)?, base)?
        }
    };
    Ok(MethodOutcome {
        method: result.method,
        exact: chosen == *truth,
        one_hop: matching.pairs.iter().all(|&(_, _, d)| d <= 1),
        error_distance: matching.delta,
        chosen,
        runtime_ms: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance: usize,
    pub attempts: usize,
    pub seed: u64,
    pub true_sources: Vec<usize>,
    pub snapshot_nodes: usize,
    pub snapshot_edges: usize,
    pub snapshot_diameter: usize,
    pub outcomes: Vec<MethodOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub accuracy: f64,
    pub one_hop_accuracy: f64,
    pub avg_error_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub summaries: Vec<MethodSummary>,
    pub mean_snapshot_diameter: f64,
    pub instances: Vec<InstanceRecord>,
}

impl MetricsReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn from_records(methods: &[Method], instances: Vec<InstanceRecord>) -> MetricsReport {
        let count = instances.len().max(1) as f64;
        let summaries = methods
            .iter()
            .map(|&method| {
                let outcomes = instances
                    .iter()
                    .flat_map(|r| r.outcomes.iter().filter(move |o| o.method == method));
                let (mut exact, mut hop, mut dist) = (0usize, 0usize, 0.0);
                for o in outcomes {
                    exact += o.exact as usize;
                    hop += o.one_hop as usize;
                    dist += o.error_distance;
                }
                MethodSummary {
                    method,
                    accuracy: exact as f64 / count,
                    one_hop_accuracy: hop as f64 / count,
                    avg_error_distance: dist / count,
                }
            })
            .collect();
        let mean_snapshot_diameter =
            instances.iter().map(|r| r.snapshot_diameter as f64).sum::<f64>() / count;
        MetricsReport {
            summaries,
            mean_snapshot_diameter,
            instances,
        }
    }
}

/// Spreads from `source_count` uniformly drawn sources of `network` until a
/// snapshot of `target` nodes can be observed.
pub fn sample_snapshot(
    network: &Graph,
    source_count: usize,
    p: f64,
    target: usize,
    max_steps: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Snapshot> {
    if network.node_count() < target {
        return Err(Error::InvalidParameter(format!(
            "network of {} nodes cannot yield {target} infected",
            network.node_count()
        )));
    }
    let mut sources = sample(rng, network.node_count(), source_count).into_vec();
    sources.sort_unstable();
    let spread = SpreadConfig {
        p,
        sources,
        target_infected: target,
        max_steps,
        seed: rng.next_u64(),
    };
    let trace = simulate_si(network, &spread)?;
    take_snapshot(network, &trace, p, target, rng)
}

fn run_instance(
    cfg: &ExperimentConfig,
    fixed: Option<&Graph>,
    instance: usize,
) -> Result<InstanceRecord> {
    let mut last = String::new();
    for attempt in 0..=cfg.max_retries {
        let seed = instance_seed(cfg.base_seed, instance, attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let built;
        let network = match fixed {
            Some(g) => g,
            None => {
                built = cfg.generator.build(&mut rng)?;
                &built
            }
        };
        let snapshot = match sample_snapshot(
            network,
            cfg.source_count,
            cfg.p,
            cfg.target_infected,
            cfg.max_steps,
            &mut rng,
        ) {
            Ok(s) => s,
            Err(e @ Error::Underfilled { .. }) => {
                last = e.to_string();
                continue;
            }
            Err(e) => return Err(e),
        };
        let space = match cfg.distance {
            DistanceSpace::Snapshot => None,
            DistanceSpace::Network => Some(network),
        };
        let mut outcomes = Vec::with_capacity(cfg.methods.len());
        for &method in &cfg.methods {
            let start = Instant::now();
            let result = identify(&snapshot.graph, method, cfg.source_count, cfg.power)?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let mut outcome = evaluate_instance(&result, &snapshot, space)?;
            if cfg.record_timings {
                outcome.runtime_ms = Some(elapsed);
            }
            outcomes.push(outcome);
        }
        return Ok(InstanceRecord {
            instance,
            attempts: attempt + 1,
            seed,
            true_sources: snapshot.true_sources.clone().unwrap_or_default(),
            snapshot_nodes: snapshot.graph.node_count(),
            snapshot_edges: snapshot.graph.edge_count(),
            snapshot_diameter: snapshot.graph.diameter(),
            outcomes,
        });
    }
    Err(Error::RetriesExhausted {
        instance,
        retries: cfg.max_retries,
        last,
    })
}

/// Runs every instance (in parallel, each with its own derived seed) and
/// aggregates the metrics. Synthetic generators build a fresh network per
/// instance; file-backed networks are loaded once.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricsReport> {
    cfg.validate()?;
    let fixed = if cfg.generator.is_random() {
        None
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed);
        Some(cfg.generator.build(&mut rng)?)
    };
    let records = (0..cfg.instances)
        .into_par_iter()
        .map(|i| run_instance(cfg, fixed.as_ref(), i))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport::from_records(&cfg.methods, records))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

pub fn aggregate_csv(report: &MetricsReport) -> String {
    let mut out = String::from("method,accuracy,one_hop_accuracy,avg_error_distance\n");
    for s in &report.summaries {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.method, s.accuracy, s.one_hop_accuracy, s.avg_error_distance
        );
    }
    out
}

pub fn instances_csv(report: &MetricsReport) -> String {
    let mut out = String::from(
        "instance,seed,method,true_sources,chosen,exact,one_hop,error_distance,snapshot_nodes,snapshot_diameter\n",
    );
    let ids = |v: &[usize]| v.iter().join(" ");
    for r in &report.instances {
        for o in &r.outcomes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.instance,
                r.seed,
                o.method,
                ids(&r.true_sources),
                ids(&o.chosen),
                o.exact as u8,
                o.one_hop as u8,
                o.error_distance,
                r.snapshot_nodes,
                r.snapshot_diameter
            );
        }
    }
    out
}

pub fn report_json(report: &MetricsReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes") + "\n"
}

pub fn parse_report_json(text: &str) -> Result<MetricsReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

/// Writes `aggregate.csv` + `instances.csv`, or `report.json`, into `dir`.
pub fn export_report(report: &MetricsReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files: Vec<(PathBuf, String)> = match format {
        ReportFormat::Csv => vec![
            (dir.join("aggregate.csv"), aggregate_csv(report)),
            (dir.join("instances.csv"), instances_csv(report)),
        ],
        ReportFormat::Json => vec![(dir.join("report.json"), report_json(report))],
    };
    for (path, body) in &files {
        std::fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}
