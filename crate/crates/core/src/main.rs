use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rumor_source::bench::{self, ExperimentConfig, ReportFormat};
use rumor_source::message::{self, Norm, TrajectorySeries};
use rumor_source::netgen::GeneratorSpec;
use rumor_source::{identify, Error, Method, PowerConfig, Result, Snapshot};

#[derive(Parser)]
#[command(name = "rumor-source", version, about = "Rumor source identification on loopy networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spread an SI epidemic and write the observed snapshot.
    Simulate {
        /// `small-world:n=..,k=..,beta=..`, `lattice:RxC`, or an edge-list file.
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = bench::DEFAULT_P)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        sources: usize,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// Snapshot file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank candidate source sets of a snapshot.
    Identify {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, default_value = "msi")]
        method: Method,
        #[arg(long, default_value_t = 1)]
        num_sources: usize,
        #[arg(long, default_value_t = rumor_source::spectral::DEFAULT_POWER_ITERS)]
        power_iters: usize,
        /// Iterate to round-off instead of a fixed count.
        #[arg(long)]
        converge: bool,
        /// Number of ranked candidates to print.
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Also write the full result as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark and write CSV and JSON reports.
    Bench {
        /// `key = value` experiment file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Norm of the message-passing state over time.
    Trajectory {
        #[arg(long)]
        snapshot: PathBuf,
        /// `true`, `random`, or `node:<id>`.
        #[arg(long, default_value = "true")]
        indicator: String,
        #[arg(long, value_enum, default_value_t = Mode::Nonlinear)]
        mode: Mode,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Spreading probability; the snapshot's own when omitted.
        #[arg(long)]
        p: Option<f64>,
        /// Size of a random indicator; the true source count when omitted.
        #[arg(long)]
        num_sources: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = NormArg::L2)]
        norm: NormArg,
        /// CSV file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Linear,
    Nonlinear,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    L1,
    L2,
}

fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Snapshot::from_reader(BufReader::new(file))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate {
            graph,
            p,
            sources,
            target,
            seed,
            max_steps,
            out,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let network = GeneratorSpec::parse(&graph)?.build(&mut rng)?;
            let snapshot = bench::sample_snapshot(&network, sources, p, target, max_steps, &mut rng)?;
            emit(out.as_deref(), &snapshot.to_text())
        }
        Command::Identify {
            snapshot,
            method,
            num_sources,
            power_iters,
            converge,
            top,
            out,
        } => {
            let snapshot = read_snapshot(&snapshot)?;
            let cfg = if converge {
                PowerConfig::converge()
            } else {
                PowerConfig::Fixed(power_iters)
            };
            let result = identify::identify(&snapshot.graph, method, num_sources, cfg)?;
            let mut text = format!("method {}\nchosen {}\n", method, join(&result.chosen));
            for (rank, c) in result.ranked.iter().take(top).enumerate() {
                text.push_str(&format!(
                    "{} {} {}{}\n",
                    rank + 1,
                    join(&c.nodes),
                    c.score,
                    if c.degenerate { " degenerate" } else { "" }
                ));
            }
            emit(None, &text)?;
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&result)
                    .map_err(|e| Error::Invariant(e.to_string()))?;
                emit(Some(&path), &json)?;
            }
            Ok(())
        }
        Command::Bench { config, out_dir } => {
            let text = fs::read_to_string(&config).map_err(|e| Error::io(&config, e))?;
            let cfg = ExperimentConfig::parse(&text)?;
            let report = bench::run_experiment(&cfg)?;
            fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            bench::export_report(&report, ReportFormat::Csv, &out_dir)?;
            bench::export_report(&report, ReportFormat::Json, &out_dir)?;
            emit(None, &bench::aggregate_csv(&report))
        }
        Command::Trajectory {
            snapshot,
            indicator,
            mode,
            steps,
            p,
            num_sources,
            seed,
            norm,
            out,
        } => {
            let snapshot = read_snapshot(&snapshot)?;
            let n = snapshot.graph.node_count();
            let (sources, label) = match indicator.as_str() {
                "true" => (
                    snapshot.true_sources.clone().ok_or(Error::MissingGroundTruth)?,
                    "true-source".to_string(),
                ),
                "random" => {
                    let k = num_sources
                        .or_else(|| snapshot.true_sources.as_ref().map(Vec::len))
                        .unwrap_or(1);
                    if k == 0 || k > n {
                        return Err(Error::InvalidParameter(format!(
                            "cannot draw {k} sources from {n} nodes"
                        )));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut s = sample(&mut rng, n, k).into_vec();
                    s.sort_unstable();
                    (s, format!("random-source-{k}"))
                }
                other => {
                    let id = other
                        .strip_prefix("node:")
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| {
                            Error::InvalidParameter(format!("unknown indicator `{other}`"))
                        })?;
                    (vec![id], format!("node-{id}"))
                }
            };
            let p = p.unwrap_or(snapshot.p);
            let norm = match norm {
                NormArg::L1 => Norm::L1,
                NormArg::L2 => Norm::L2,
            };
            let modes: &[bool] = match mode {
                Mode::Linear => &[true],
                Mode::Nonlinear => &[false],
                Mode::Both => &[false, true],
            };
            let mut series = Vec::new();
            for &linear in modes {
                let traj = message::passed_trajectory(&snapshot.graph, &sources, p, steps, linear)?;
                series.push(TrajectorySeries {
                    label: format!("{label}-{}", if linear { "linear" } else { "nonlinear" }),
                    norms: message::trajectory_norms(&traj, norm),
                });
            }
            emit(out.as_deref(), &message::trajectory_csv(&series))
        }
    }
}

fn join(nodes: &[usize]) -> String {
    nodes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                _ if e.is_invariant_violation() => 3,
                Error::InvalidParameter(_) => 1,
                _ => 2,
            })
        }
    }
}
