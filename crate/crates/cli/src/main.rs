//! `dissem`: schedules, validators, oracles and generators from the shell.
//!
//! Exit codes: 0 ok, 1 invalid input, 2 validation failed, 3 internal error.

mod suite;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dissem_core::generate::{generate_instance, DemandKind, GraphKind};
use dissem_core::gossip::radio_gossip;
use dissem_core::lp::poise::{build_poise_lp, solve_lp};
use dissem_core::multicast::{planar_mc_multicast, MulticastParams};
use dissem_core::multiflow::{pack_tpaths, terminal_cut};
use dissem_core::oracle::{brute_force_radio, brute_force_telephone};
use dissem_core::planar::{find_3path_separator, verify_separator};
use dissem_core::rounding::{round_poise_tree, RoundingParams, DEFAULT_GRID};
use dissem_core::schedule::{check_demands_met, simulate_radio_with, simulate_telephone};
use dissem_core::{text, DemandSet, Error, Graph, NodeWeights, PossessionState, RadioSemantics};

#[derive(Parser)]
#[command(name = "dissem", version, about = "Telephone and radio dissemination schedules")]
struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Main output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the metrics line to this file, or to stderr when given bare.
    #[arg(long, global = true, num_args = 0..=1, require_equals = true)]
    metrics: Option<Option<PathBuf>>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Model {
    Telephone,
    Radio,
}

#[derive(Subcommand)]
enum Cmd {
    /// Multicast schedule (telephone) or gossip schedule (radio).
    Solve {
        #[arg(long, value_enum, default_value = "telephone")]
        model: Model,
        #[arg(long)]
        graph: PathBuf,
        /// Demand file; all-pairs gossip when absent.
        #[arg(long)]
        demands: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: u64,
    },
    /// Radio gossip schedule.
    Gossip {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Checks a schedule file against a graph and demands.
    Validate {
        #[arg(long, value_enum, default_value = "telephone")]
        model: Model,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        demands: Option<PathBuf>,
        #[arg(long)]
        schedule: PathBuf,
        /// Radio transmitters hear nothing while sending.
        #[arg(long)]
        half_duplex: bool,
    },
    /// Exhaustive optimum schedule for a tiny instance.
    Oracle {
        #[arg(long, value_enum, default_value = "telephone")]
        model: Model,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        demands: Option<PathBuf>,
        /// Defaults to twice the node count.
        #[arg(long)]
        max_rounds: Option<usize>,
        #[arg(long)]
        half_duplex: bool,
    },
    /// Seeded instance generator.
    Gen(GenArgs),
    /// The poise LP of an instance.
    Lp {
        #[arg(value_enum)]
        action: LpAction,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        demands: PathBuf,
    },
    /// Three-shortest-path separator.
    Separator {
        #[arg(long)]
        graph: PathBuf,
        /// Node weights, one integer per node; unit weights when absent.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Rounds the rooted poise LP into a tree.
    RoundPoise {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        root: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        terminals: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: u64,
    },
    /// Edge-disjoint T-paths; repeated edge lines are parallel copies.
    Pack {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        terminals: Vec<usize>,
    },
    /// Runs a TOML manifest of instances and prints a metrics table.
    Suite {
        manifest: PathBuf,
        /// Adds a runtime column, which makes the table nondeterministic.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LpAction {
    Dump,
    Solve,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Grid,
    Path,
    Star,
    DaryTree,
    RandomPlanar,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemandChoice {
    None,
    Random,
    Broadcast,
    Gossip,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    cols: usize,
    /// Node count for `path` and `random-planar`.
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    leaves: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, value_enum, default_value = "none")]
    demand_kind: DemandChoice,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    root: usize,
    /// Where to write the demand file.
    #[arg(long)]
    demands_out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Invalid(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Invalid(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, body: &str) -> Result<(), Failure> {
    std::fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    Ok(text::parse_graph(&read(path)?)?)
}

fn load_demands(path: Option<&PathBuf>, n: usize) -> Result<DemandSet, Failure> {
    match path {
        Some(p) => Ok(text::parse_demands(&read(p)?, n)?),
        None => Ok(DemandSet::gossip(n)),
    }
}

fn check_ids(ids: &[usize], n: usize) -> Result<(), Failure> {
    match ids.iter().find(|&&v| v >= n) {
        Some(v) => Err(Failure::Input(format!("node {v} out of range"))),
        None => Ok(()),
    }
}

struct Output {
    body: String,
    metrics: Option<String>,
    /// Reported after the output is written.
    failure: Option<Failure>,
}

impl Output {
    fn ok(body: String, metrics: Option<String>) -> Self {
        Output { body, metrics, failure: None }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let seed = cli.seed;
    let out = match &cli.cmd {
        Cmd::Solve { model: Model::Telephone, graph, demands, grid } => {
            let g = load_graph(graph)?;
            let d = load_demands(demands.as_ref(), g.node_count())?;
            let res = planar_mc_multicast(&g, &d, MulticastParams { seed, grid: *grid })?;
            Output::ok(text::format_telephone(&res.schedule), Some(format!("depth={} lp_root={:.6} length={}", res.depth, res.lp_root, res.schedule.len())))
        }
        Cmd::Solve { model: Model::Radio, graph, demands, .. } => {
            let g = load_graph(graph)?;
            let d = load_demands(demands.as_ref(), g.node_count())?;
            let res = radio_gossip(&g)?;
            let st = simulate_radio_with(&g, &PossessionState::initial(g.node_count()), &res.schedule, RadioSemantics::FullDuplex)?;
            if !check_demands_met(&st, &d).met {
                return Err(Failure::Internal(Error::DemandsUnmet.to_string()));
            }
            Output::ok(text::format_radio(&res.schedule), Some(gossip_metrics(&res)))
        }
        Cmd::Gossip { graph } => {
            let g = load_graph(graph)?;
            let res = radio_gossip(&g)?;
            Output::ok(text::format_radio(&res.schedule), Some(gossip_metrics(&res)))
        }
        Cmd::Validate { model, graph, demands, schedule, half_duplex } => {
            let g = load_graph(graph)?;
            let n = g.node_count();
            let d = load_demands(demands.as_ref(), n)?;
            let raw = read(schedule)?;
            let init = PossessionState::initial(n);
            let sim = match model {
                Model::Telephone => text::parse_telephone(&raw).and_then(|s| Ok((s.len(), simulate_telephone(&g, &init, &s)?))),
                Model::Radio => text::parse_radio(&raw).and_then(|s| {
                    let sem = if *half_duplex { RadioSemantics::HalfDuplex } else { RadioSemantics::FullDuplex };
                    Ok((s.len(), simulate_radio_with(&g, &init, &s, sem)?))
                }),
            };
            let (len, st) = match sim {
                Ok(x) => x,
                Err(e @ Error::InvalidSchedule { .. }) => return Err(Failure::Invalid(e.to_string())),
                Err(e) => return Err(e.into()),
            };
            let check = check_demands_met(&st, &d);
            let mut body = format!("valid=true met={} length={} unmet={}\n", check.met, len, check.unmet.len());
            for (s, t) in &check.unmet {
                let _ = writeln!(body, "unmet {s} {t}");
            }
            let failure = (!check.met).then(|| Failure::Invalid(format!("{} demands unmet", check.unmet.len())));
            Output { body, metrics: Some(format!("length={len}")), failure }
        }
        Cmd::Oracle { model, graph, demands, max_rounds, half_duplex } => {
            let g = load_graph(graph)?;
            let n = g.node_count();
            let d = load_demands(demands.as_ref(), n)?;
            let bound = max_rounds.unwrap_or(2 * n);
            match model {
                Model::Telephone => {
                    let r = brute_force_telephone(&g, &d, bound)?;
                    Output::ok(text::format_telephone(&r.witness), Some(format!("opt={} explored={}", r.length, r.explored)))
                }
                Model::Radio => {
                    let sem = if *half_duplex { RadioSemantics::HalfDuplex } else { RadioSemantics::FullDuplex };
                    let r = brute_force_radio(&g, &d, sem, bound)?;
                    Output::ok(text::format_radio(&r.witness), Some(format!("opt={} explored={}", r.length, r.explored)))
                }
            }
        }
        Cmd::Gen(a) => {
            let kind = match a.kind {
                Kind::Grid => GraphKind::Grid { rows: a.rows, cols: a.cols },
                Kind::Path => GraphKind::Path { n: a.n },
                Kind::Star => GraphKind::Star { leaves: a.leaves },
                Kind::DaryTree => GraphKind::DaryTree { d: a.d, depth: a.depth },
                Kind::RandomPlanar => GraphKind::RandomPlanar { n: a.n },
            };
            let dk = match a.demand_kind {
                DemandChoice::None => DemandKind::None,
                DemandChoice::Random => DemandKind::Random { k: a.k },
                DemandChoice::Broadcast => DemandKind::Broadcast { root: a.root },
                DemandChoice::Gossip => DemandKind::Gossip,
            };
            let (g, d) = generate_instance(kind, dk, seed)?;
            if let Some(p) = &a.demands_out {
                write(p, &text::format_demands(&d))?;
            }
            Output::ok(text::format_graph(&g), Some(format!("n={} m={} k={}", g.node_count(), g.edge_count(), d.len())))
        }
        Cmd::Lp { action, graph, demands } => {
            let g = load_graph(graph)?;
            let d = text::parse_demands(&read(demands)?, g.node_count())?;
            let lp = build_poise_lp(&g, &d)?;
            match action {
                LpAction::Dump => Output::ok(lp.program.to_lp_format(), None),
                LpAction::Solve => {
                    let f = solve_lp(&lp)?;
                    let mut body = String::new();
                    for (i, &(s, t)) in f.pairs.iter().enumerate() {
                        for p in f.paths_of(i) {
                            let nodes: Vec<String> = p.nodes.iter().map(|v| v.to_string()).collect();
                            let _ = writeln!(body, "{s} {t} {:.6} {}", p.weight, nodes.join(" "));
                        }
                    }
                    Output::ok(body, Some(format!("value={:.6} l1={:.6} l2={:.6}", f.value, f.l1, f.l2)))
                }
            }
        }
        Cmd::Separator { graph, weights } => {
            let g = load_graph(graph)?;
            let n = g.node_count();
            let w = match weights {
                Some(p) => NodeWeights(text::parse_list(&read(p)?)?),
                None => NodeWeights::unit(n),
            };
            if w.0.len() != n {
                return Err(Failure::Input(format!("expected {n} weights, got {}", w.0.len())));
            }
            if !g.is_connected() {
                return Err(Error::Disconnected.into());
            }
            let all: Vec<usize> = (0..n).collect();
            let sep = find_3path_separator(&g, &w, &all)?;
            if !verify_separator(&g, &w, &all, &sep) {
                return Err(Failure::Internal("separator failed verification".into()));
            }
            let mut body = format!("{}\n", sep.root);
            for p in &sep.paths {
                let ids: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(body, "{}", ids.join(" "));
            }
            Output::ok(body, Some(format!("paths={} nodes={}", sep.paths.len(), sep.nodes().len())))
        }
        Cmd::RoundPoise { graph, root, terminals, grid } => {
            let g = load_graph(graph)?;
            check_ids(terminals, g.node_count())?;
            check_ids(&[*root], g.node_count())?;
            let d = DemandSet::rooted(g.node_count(), *root, terminals)?;
            let frac = solve_lp(&build_poise_lp(&g, &d)?)?;
            let res = round_poise_tree(&g, *root, terminals, &frac, RoundingParams { grid: *grid, seed })?;
            let t = &res.tree;
            let mut body = String::new();
            for (u, v) in &t.edges {
                let _ = writeln!(body, "{u} {v}");
            }
            let m = format!("poise={} degree={} diameter={} iters={}", t.poise(), t.max_degree, t.diameter, res.iterations);
            Output::ok(body, Some(m))
        }
        Cmd::Pack { graph, terminals } => {
            let g = text::parse_multigraph(&read(graph)?)?;
            check_ids(terminals, g.node_count())?;
            let p = pack_tpaths(&g, terminals)?;
            let bound: u64 = terminals.iter().map(|&t| terminal_cut(&g, terminals, t)).sum::<u64>() / 2;
            let mut body = String::new();
            for path in &p.paths {
                let ids: Vec<String> = path.nodes.iter().map(|v| v.to_string()).collect();
                for _ in 0..path.count {
                    let _ = writeln!(body, "{}", ids.join(" "));
                }
            }
            Output::ok(body, Some(format!("value={} bound={}", p.value(), bound)))
        }
        Cmd::Suite { manifest, timing } => {
            let report = suite::run_suite(manifest, *timing)?;
            let failure =
                (report.failed > 0).then(|| Failure::Invalid(format!("{} of {} instances failed", report.failed, report.rows)));
            Output {
                body: report.table,
                metrics: Some(format!("rows={} failed={}", report.rows, report.failed)),
                failure,
            }
        }
    };
    Ok(out)
}

fn gossip_metrics(res: &dissem_core::gossip::GossipOutcome) -> String {
    format!("L={} depth={} length={}", res.l, res.depth, res.schedule.len())
}

fn emit(cli: &Cli, body: &str, metrics: Option<&str>) -> Result<(), Failure> {
    match &cli.out {
        Some(p) => write(p, body)?,
        None => print!("{body}"),
    }
    if let (Some(m), Some(target)) = (metrics, &cli.metrics) {
        match target {
            Some(p) => write(p, &format!("{m}\n"))?,
            None => eprintln!("{m}"),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let res = run(&cli).and_then(|o| {
        emit(&cli, &o.body, o.metrics.as_deref())?;
        o.failure.map_or(Ok(()), Err)
    });
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
