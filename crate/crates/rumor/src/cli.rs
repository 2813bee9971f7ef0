//! The `rumor` command line.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};

use rumor_core::centrality::{bfs_rumor_centrality_all, rumor_centrality_all, ScoreMode};
use rumor_core::estimators::{estimate, Estimator};
use rumor_core::generators::{
    geometric_tree, line_graph, regular_tree, scale_free, small_world, GeometricTreeSpec,
};
use rumor_core::spread::{spread_by_count, spread_by_time};
use rumor_core::{Graph, NodeId, RumorGraph};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::experiments::{
    detection_probability, detection_probability_time, error_histogram, line_detection_exact,
    poisson_tail_check, shape_check, shape_radius, subtree_distribution_check, Family, Report,
    RunOptions, TieMode,
};
use crate::io;

#[derive(Debug, Parser)]
#[command(name = "rumor", version, about = "Find the source of a rumor spreading on a network")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a host graph and write it as an edge list.
    Gen(GenArgs),
    /// Spread a rumor from a source and write the infection trace.
    Simulate(SimulateArgs),
    /// Estimate the source of an observed infected set.
    Estimate(EstimateArgs),
    /// Rumor centrality of every infected node.
    Scores(ScoresArgs),
    /// Run a Monte Carlo experiment described by a config file.
    Experiment(ExperimentArgs),
}

/// Graph family and its parameters. The same names work as config keys.
#[derive(Debug, Clone, Default, Args)]
pub struct FamilyArgs {
    /// line | regular-tree | geometric-tree | small-world | scale-free
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long = "d-star")]
    pub d_star: Option<usize>,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
}

impl FamilyArgs {
    fn to_config(&self) -> Config {
        let mut pairs: Vec<(&str, String)> = Vec::new();
        let mut put = |k, v: Option<String>| {
            if let Some(v) = v {
                pairs.push((k, v));
            }
        };
        put("family", self.family.clone());
        put("n", self.n.map(|x| x.to_string()));
        put("degree", self.degree.map(|x| x.to_string()));
        put("depth", self.depth.map(|x| x.to_string()));
        put("alpha", self.alpha.map(|x| x.to_string()));
        put("b", self.b.map(|x| x.to_string()));
        put("c", self.c.map(|x| x.to_string()));
        put("d_star", self.d_star.map(|x| x.to_string()));
        put("radius", self.radius.map(|x| x.to_string()));
        put("k", self.k.map(|x| x.to_string()));
        put("p", self.p.map(|x| x.to_string()));
        put("m", self.m.map(|x| x.to_string()));
        Config::from_pairs(pairs)
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Required for randomized families.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["by_count", "by_time"])))]
pub struct SimulateArgs {
    /// Host edge list.
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub source: u64,
    /// Stop once this many nodes are infected.
    #[arg(long)]
    pub by_count: Option<usize>,
    /// Stop at this time.
    #[arg(long)]
    pub by_time: Option<f64>,
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    /// Trace CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the infected subgraph as an edge list.
    #[arg(long)]
    pub infected_out: Option<PathBuf>,
    /// Also write the generated host as an edge list.
    #[arg(long)]
    pub graph_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Host edge list.
    #[arg(long)]
    pub graph: PathBuf,
    /// Infected set: node list, edge list or trace CSV.
    #[arg(long)]
    pub infected: PathBuf,
    /// rumor | rumor-bfs | distance | random | exact-oracle
    #[arg(long, default_value = "rumor")]
    pub estimator: String,
    /// Seed for tie-breaking.
    #[arg(long, required = true)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoresArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub infected: PathBuf,
    /// Include exact integer scores.
    #[arg(long)]
    pub exact: bool,
    /// Seeds BFS parent choice when the infected graph has cycles.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// `key = value` config file.
    pub config: PathBuf,
    /// Overrides the config's `seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores); overrides the config's `workers`.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => io::write_file(p, bytes),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::Usage(format!("{what} is randomized; pass --seed")))
}

/// Builds a finite host graph from family keys.
pub fn build_graph(cfg: &Config, seed: Option<u64>) -> Result<Graph> {
    let family = cfg.str("family")?;
    Ok(match family {
        "line" => line_graph(cfg.get("n")?)?,
        "regular-tree" => regular_tree(cfg.get("degree")?, cfg.get("depth")?)?,
        "geometric-tree" => {
            let spec = GeometricTreeSpec {
                alpha: cfg.get("alpha")?,
                b: cfg.get("b")?,
                c: cfg.get("c")?,
                d_star: cfg.get("d_star")?,
                radius: cfg.get("radius")?,
            };
            geometric_tree(&spec, need_seed(seed, "geometric-tree")?)?
        }
        "small-world" => small_world(
            cfg.get("n")?,
            cfg.get_or("k", 4)?,
            cfg.get_or("p", 0.1)?,
            need_seed(seed, "small-world")?,
        )?,
        "scale-free" => scale_free(cfg.get("n")?, cfg.get_or("m", 2)?, need_seed(seed, "scale-free")?)?,
        other => {
            return Err(Error::BadValue {
                key: "family".into(),
                msg: format!("unknown family `{other}`"),
            })
        }
    })
}

fn header(command: &str, seed: Option<u64>, cfg: &Config) -> Vec<String> {
    let mut line = format!("rumor {command}");
    for (k, v) in cfg.pairs() {
        line.push_str(&format!(" {k}={v}"));
    }
    let mut h = vec![line];
    if let Some(s) = seed {
        h.push(format!("seed={s}"));
    }
    h
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Scores(a) => cmd_scores(&a),
        Command::Experiment(a) => cmd_experiment(&a),
    }
}

pub fn cmd_gen(a: &GenArgs) -> Result<()> {
    let cfg = a.family.to_config();
    let g = build_graph(&cfg, a.seed)?;
    cfg.reject_unused()?;
    let comments = match a.seed {
        Some(_) => header("gen", a.seed, &cfg),
        None => Vec::new(),
    };
    let mut buf = Vec::new();
    io::write_edge_list(&g, &mut buf, &comments)?;
    emit(a.out.as_deref(), &buf)
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let seed = need_seed(a.seed, "simulate")?;
    let cfg = a.family.to_config();
    let (g, mut comments) = match &a.graph {
        Some(p) => (
            io::load_edge_list(p)?,
            vec![format!("rumor simulate graph={}", p.display())],
        ),
        None if a.family.family.is_some() => {
            let g = build_graph(&cfg, Some(seed))?;
            cfg.reject_unused()?;
            (g, header("simulate", None, &cfg))
        }
        None => return Err(Error::Usage("pass --graph or --family".into())),
    };
    let source = NodeId(a.source);
    let (trace, rg) = match (a.by_count, a.by_time) {
        (Some(n), None) => spread_by_count(&g, source, n, seed)?,
        (None, Some(t)) => spread_by_time(&g, source, t, seed)?,
        _ => return Err(Error::Usage("pass exactly one of --by-count and --by-time".into())),
    };
    comments.push(format!("source={source} seed={seed}"));
    let mut buf = Vec::new();
    io::write_trace(&trace, &mut buf, &comments)?;
    emit(a.out.as_deref(), &buf)?;
    if let Some(p) = &a.infected_out {
        let sub = Graph::from_nodes_and_edges(
            rg.nodes(),
            g.edges().filter(|(u, v)| rg.contains(*u) && rg.contains(*v)),
        )?;
        io::save_edge_list(&sub, p, &comments)?;
    }
    if let Some(p) = &a.graph_out {
        io::save_edge_list(&g, p, &comments)?;
    }
    Ok(())
}

fn load_rumor(graph: &Path, infected: &Path) -> Result<(Graph, Vec<NodeId>)> {
    Ok((io::load_edge_list(graph)?, io::load_infected(infected)?))
}

pub fn parse_estimator(name: &str) -> Result<Estimator> {
    Estimator::from_name(name).ok_or_else(|| Error::BadValue {
        key: "estimator".into(),
        msg: format!(
            "unknown estimator `{name}`; expected one of {}",
            Estimator::ALL.map(|e| e.name()).join(", ")
        ),
    })
}

pub fn cmd_estimate(a: &EstimateArgs) -> Result<()> {
    let seed = need_seed(a.seed, "estimate")?;
    let kind = parse_estimator(&a.estimator)?;
    let (g, nodes) = load_rumor(&a.graph, &a.infected)?;
    let rg = RumorGraph::new(&g, nodes)?;
    let r = estimate(kind, &rg, seed)?;
    let mut buf = Vec::new();
    io::write_estimate(&r, &mut buf, &[format!("seed={seed} estimate={}", r.estimate)])?;
    emit(a.out.as_deref(), &buf)
}

pub fn cmd_scores(a: &ScoresArgs) -> Result<()> {
    let (g, nodes) = load_rumor(&a.graph, &a.infected)?;
    let rg = RumorGraph::new(&g, nodes)?;
    let mode = if a.exact { ScoreMode::Exact } else { ScoreMode::Log };
    let s = if rg.is_tree() {
        rumor_centrality_all(&rg, mode)?
    } else {
        bfs_rumor_centrality_all(&rg, mode, a.seed)?
    };
    let mut buf = Vec::new();
    io::write_scores(&s, &mut buf, &[])?;
    emit(a.out.as_deref(), &buf)
}

pub fn cmd_experiment(a: &ExperimentArgs) -> Result<()> {
    let mut cfg = Config::load(&a.config)?;
    if let Some(s) = a.seed {
        cfg.set("seed", s.to_string());
    }
    if let Some(w) = a.workers {
        cfg.set("workers", w.to_string());
    }
    let out = run_config(&cfg)?;
    emit(a.out.as_deref(), out.as_bytes())
}

/// Family for experiments. Tree families are infinite; fixed graphs are
/// built once from `graph_seed` (default: `seed`).
pub fn family_from_config(cfg: &Config, seed: u64) -> Result<Family> {
    let name = cfg.str("family")?;
    Ok(match name {
        "line" => Family::Line,
        "regular-tree" => Family::RegularTree {
            degree: cfg.get("degree")?,
        },
        "geometric-tree" => Family::GeometricTree {
            alpha: cfg.get("alpha")?,
            b: cfg.get("b")?,
            c: cfg.get("c")?,
            d_star: cfg.get("d_star")?,
            radius: cfg.get_opt("radius")?,
        },
        "small-world" | "scale-free" => {
            let gseed = cfg.get_or("graph_seed", seed)?;
            let n = cfg.get_or("n", 5000)?;
            let graph = if name == "small-world" {
                small_world(n, cfg.get_or("k", 4)?, cfg.get_or("p", 0.1)?, gseed)?
            } else {
                scale_free(n, cfg.get_or("m", 2)?, gseed)?
            };
            Family::Fixed {
                name: name.into(),
                graph: Arc::new(graph),
            }
        }
        "edge-list" => Family::Fixed {
            name: "edge-list".into(),
            graph: Arc::new(io::load_edge_list(cfg.str("graph")?)?),
        },
        other => {
            return Err(Error::BadValue {
                key: "family".into(),
                msg: format!("unknown family `{other}`"),
            })
        }
    })
}

fn options(cfg: &Config, seed: u64) -> Result<RunOptions> {
    Ok(RunOptions::new(cfg.get("trials")?, seed)
        .workers(cfg.get_or("workers", 1)?)
        .tie_mode(cfg.get_or("tie_mode", TieMode::Fractional)?))
}

/// Runs the experiment named by the `experiment` key and returns its CSV
/// output, headed by the config echoed as comments.
pub fn run_config(cfg: &Config) -> Result<String> {
    let kind = cfg.str("experiment")?.to_string();
    let mut comments = vec![format!("rumor experiment {kind}")];
    comments.extend(cfg.pairs().into_iter().map(|(k, v)| format!("{k}={v}")));
    let mut buf = Vec::new();
    match kind.as_str() {
        "detection" => {
            let seed = cfg.get("seed")?;
            let family = family_from_config(cfg, seed)?;
            let est = parse_estimator(cfg.raw("estimator").unwrap_or("rumor"))?;
            let opts = options(cfg, seed)?;
            let curve = match (cfg.contains("sizes"), cfg.contains("times")) {
                (true, false) => detection_probability(&family, &cfg.list("sizes")?, est, &opts)?,
                (false, true) => {
                    detection_probability_time(&family, &cfg.list("times")?, est, &opts)?
                }
                _ => return Err(Error::Usage("set exactly one of `sizes` and `times`".into())),
            };
            cfg.reject_unused()?;
            curve.write_csv(&mut buf, &comments)?;
        }
        "histogram" => {
            let seed = cfg.get("seed")?;
            let family = family_from_config(cfg, seed)?;
            let names: Vec<String> = match cfg.raw("estimators") {
                Some(_) => cfg.list("estimators")?,
                None => vec!["rumor".into(), "rumor-bfs".into(), "distance".into()],
            };
            let kinds = names
                .iter()
                .map(|n| parse_estimator(n))
                .collect::<Result<Vec<_>>>()?;
            let h = error_histogram(&family, cfg.get("infected")?, &kinds, &options(cfg, seed)?)?;
            cfg.reject_unused()?;
            comments.extend(h.summary_lines());
            h.write_csv(&mut buf, &comments)?;
        }
        "subtree" => {
            let r = subtree_distribution_check(
                cfg.get("t")?,
                cfg.get("trials")?,
                cfg.get("seed")?,
                cfg.get_or("workers", 1)?,
            )?;
            cfg.reject_unused()?;
            buf = r.report().to_csv(&comments).into_bytes();
        }
        "shape" => {
            let t: f64 = cfg.get("t")?;
            let delta: f64 = cfg.get("delta")?;
            let spec = GeometricTreeSpec {
                alpha: cfg.get("alpha")?,
                b: cfg.get("b")?,
                c: cfg.get("c")?,
                d_star: cfg.get("d_star")?,
                radius: cfg.get_or("radius", shape_radius(t, delta, 5))?,
            };
            let r = shape_check(
                &spec,
                t,
                delta,
                cfg.get("trials")?,
                cfg.get("seed")?,
                cfg.get_or("workers", 1)?,
            )?;
            cfg.reject_unused()?;
            buf = r.report().to_csv(&comments).into_bytes();
        }
        "poisson-tail" => {
            let r = poisson_tail_check(
                cfg.get("t")?,
                cfg.get("gamma")?,
                cfg.get("trials")?,
                cfg.get("seed")?,
                cfg.get_or("workers", 1)?,
            )?;
            cfg.reject_unused()?;
            buf = r.report().to_csv(&comments).into_bytes();
        }
        "line-exact" => {
            let times: Vec<f64> = cfg.list("times")?;
            cfg.reject_unused()?;
            let rows = times
                .iter()
                .map(|&t| (format!("p_detect_t={t}"), line_detection_exact(t).to_string()))
                .collect();
            buf = Report { rows }.to_csv(&comments).into_bytes();
        }
        other => {
            return Err(Error::BadValue {
                key: "experiment".into(),
                msg: format!(
                    "unknown experiment `{other}`; expected detection, histogram, subtree, \
                     shape, poisson-tail or line-exact"
                ),
            })
        }
    }
    String::from_utf8(buf).map_err(|e| Error::Internal(e.to_string()))
}
