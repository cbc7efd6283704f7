//! Manifest-driven batch runs.
//!
//! ```toml
//! max_ratio = 50.0
//!
//! [[instance]]
//! name = "grid"
//! model = "telephone"
//! graph = { kind = "grid", rows = 3, cols = 3 }
//! demands = { kind = "random", k = 3 }
//! seed = 7
//! ```
//!
//! One tab-separated row per instance. A failing instance gets `valid` set
//! to `false` and its error on stderr; the rest still run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dissem_core::generate::{generate_instance, DemandKind, GraphKind};
use dissem_core::gossip::radio_gossip;
use dissem_core::multicast::{planar_mc_multicast, MulticastParams};
use dissem_core::oracle::{brute_force_radio, brute_force_telephone};
use dissem_core::schedule::{check_demands_met, simulate_radio, simulate_telephone};
use dissem_core::{text, DemandSet, Error, Graph, PossessionState, RadioSemantics};
use serde::Deserialize;

use crate::Failure;

const TELEPHONE_ORACLE_NODES: usize = 8;
const RADIO_ORACLE_NODES: usize = 7;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    max_ratio: Option<f64>,
    #[serde(default)]
    instance: Vec<Instance>,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq, Default)]
#[serde(rename_all = "kebab-case")]
enum Model {
    #[default]
    Telephone,
    Radio,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Instance {
    name: String,
    #[serde(default)]
    model: Model,
    graph: GraphSource,
    demands: Option<DemandSource>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "yes")]
    oracle: bool,
    max_ratio: Option<f64>,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum GraphSource {
    Grid { rows: usize, cols: usize },
    Path { n: usize },
    Star { leaves: usize },
    DaryTree { d: usize, depth: usize },
    RandomPlanar { n: usize },
    File { path: PathBuf },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum DemandSource {
    Random { k: usize },
    Broadcast { root: usize },
    Gossip,
    File { path: PathBuf },
}

pub struct Report {
    pub table: String,
    pub rows: usize,
    pub failed: usize,
}

struct Row {
    n: usize,
    k: usize,
    lp: Option<f64>,
    length: usize,
    opt: Option<usize>,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|_| Error::BadParams("cannot read instance file"))
}

fn load(inst: &Instance, dir: &Path) -> Result<(Graph, DemandSet), Error> {
    let kind = match &inst.graph {
        GraphSource::Grid { rows, cols } => GraphKind::Grid { rows: *rows, cols: *cols },
        GraphSource::Path { n } => GraphKind::Path { n: *n },
        GraphSource::Star { leaves } => GraphKind::Star { leaves: *leaves },
        GraphSource::DaryTree { d, depth } => GraphKind::DaryTree { d: *d, depth: *depth },
        GraphSource::RandomPlanar { n } => GraphKind::RandomPlanar { n: *n },
        GraphSource::File { path } => {
            let g = text::parse_graph(&read(&dir.join(path))?)?;
            let d = match &inst.demands {
                Some(DemandSource::File { path }) => text::parse_demands(&read(&dir.join(path))?, g.node_count())?,
                Some(DemandSource::Random { .. }) => return Err(Error::BadParams("random demands need a generated graph")),
                Some(DemandSource::Broadcast { root }) => {
                    let others: Vec<usize> = (0..g.node_count()).filter(|t| t != root).collect();
                    DemandSet::rooted(g.node_count(), *root, &others)?
                }
                Some(DemandSource::Gossip) | None => DemandSet::gossip(g.node_count()),
            };
            return Ok((g, d));
        }
    };
    let dk = match &inst.demands {
        Some(DemandSource::Random { k }) => DemandKind::Random { k: *k },
        Some(DemandSource::Broadcast { root }) => DemandKind::Broadcast { root: *root },
        Some(DemandSource::Gossip) | None => DemandKind::Gossip,
        Some(DemandSource::File { path }) => {
            let (g, _) = generate_instance(kind, DemandKind::None, inst.seed)?;
            let d = text::parse_demands(&read(&dir.join(path))?, g.node_count())?;
            return Ok((g, d));
        }
    };
    generate_instance(kind, dk, inst.seed)
}

fn run_one(inst: &Instance, dir: &Path) -> Result<Row, Error> {
    let (g, d) = load(inst, dir)?;
    let n = g.node_count();
    let init = PossessionState::initial(n);
    let (lp, length, opt) = match inst.model {
        Model::Telephone => {
            let res = planar_mc_multicast(&g, &d, MulticastParams { seed: inst.seed, ..Default::default() })?;
            let st = simulate_telephone(&g, &init, &res.schedule)?;
            if !check_demands_met(&st, &d).met {
                return Err(Error::DemandsUnmet);
            }
            let len = res.schedule.len();
            let opt = (inst.oracle && n <= TELEPHONE_ORACLE_NODES)
                .then(|| brute_force_telephone(&g, &d, len).map(|o| o.length))
                .transpose()?;
            (Some(res.lp_root), len, opt)
        }
        Model::Radio => {
            let res = radio_gossip(&g)?;
            let st = simulate_radio(&g, &init, &res.schedule)?;
            if !check_demands_met(&st, &d).met {
                return Err(Error::DemandsUnmet);
            }
            let len = res.schedule.len();
            let opt = (inst.oracle && n <= RADIO_ORACLE_NODES)
                .then(|| brute_force_radio(&g, &d, RadioSemantics::FullDuplex, len).map(|o| o.length))
                .transpose()?;
            (None, len, opt)
        }
    };
    Ok(Row { n, k: d.distinct_pairs().len(), lp, length, opt })
}

pub fn run_suite(manifest: &Path, timing: bool) -> Result<Report, Failure> {
    let raw = std::fs::read_to_string(manifest).map_err(|e| Failure::Input(format!("{}: {e}", manifest.display())))?;
    let m: Manifest = toml::from_str(&raw).map_err(|e| Failure::Input(format!("{}: {e}", manifest.display())))?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let mut table = String::from("instance\tmodel\tn\tk\tlp\tlength\topt\tratio\tvalid\tpass");
    if timing {
        table.push_str("\truntime_ms");
    }
    table.push('\n');
    let mut failed = 0;
    for inst in &m.instance {
        let t0 = Instant::now();
        let res = run_one(inst, dir);
        let ms = t0.elapsed().as_millis();
        let model = match inst.model {
            Model::Telephone => "telephone",
            Model::Radio => "radio",
        };
        match res {
            Ok(r) => {
                let ratio = r.opt.map(|o| if o == 0 { 1.0 } else { r.length as f64 / o as f64 });
                let bound = inst.max_ratio.or(m.max_ratio);
                let pass = match (ratio, bound) {
                    (Some(x), Some(b)) => x <= b,
                    _ => true,
                };
                failed += usize::from(!pass);
                let lp = r.lp.map_or("-".to_string(), |v| format!("{v:.6}"));
                let opt = r.opt.map_or("-".to_string(), |v| v.to_string());
                let ratio = ratio.map_or("-".to_string(), |v| format!("{v:.4}"));
                let _ = write!(table, "{}\t{model}\t{}\t{}\t{lp}\t{}\t{opt}\t{ratio}\ttrue\t{pass}", inst.name, r.n, r.k, r.length);
            }
            Err(e) => {
                failed += 1;
                eprintln!("instance {}: {e}", inst.name);
                let _ = write!(table, "{}\t{model}\t-\t-\t-\t-\t-\t-\tfalse\tfalse", inst.name);
            }
        }
        if timing {
            let _ = write!(table, "\t{ms}");
        }
        table.push('\n');
    }
    Ok(Report { table, rows: m.instance.len(), failed })
}
