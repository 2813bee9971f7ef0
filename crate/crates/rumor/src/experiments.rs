//! Monte Carlo experiments: detection probability curves, hop-error
//! histograms and distributional checks of the spreading process.
//!
//! Trial `k` of a run with master seed `s` always uses the seed
//! `trial_seed(s, k)`, and results are aggregated in trial order, so output
//! does not depend on the number of workers.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use rumor_core::estimators::{estimate, random_guess, Estimator};
use rumor_core::generators::{geometric_tree, GeometricTreeSpec, LazyRegularTree};
use rumor_core::rng::{exponential, mix64, seeded, trial_seed};
use rumor_core::spread::{spread_by_count_on, spread_by_time_on, SpreadMode, SpreadTrace};
use rumor_core::{Graph, NodeId, RumorGraph};

use crate::error::{Error, Result};

/// Fraction of trials allowed to reach the edge of a finite host before a
/// run is aborted.
pub const MAX_BOUNDARY_FRACTION: f64 = 0.01;

/// Host graphs for experiments.
#[derive(Debug, Clone)]
pub enum Family {
    /// Infinite path.
    Line,
    /// Infinite `degree`-regular tree.
    RegularTree { degree: usize },
    /// Geometric tree rooted at the source. The radius is chosen per run
    /// unless `radius` is set.
    GeometricTree {
        alpha: f64,
        b: f64,
        c: f64,
        d_star: usize,
        radius: Option<usize>,
    },
    /// A fixed graph; each trial picks a uniform source.
    Fixed { name: String, graph: Arc<Graph> },
}

impl Family {
    pub fn name(&self) -> &str {
        match self {
            Family::Line => "line",
            Family::RegularTree { .. } => "regular-tree",
            Family::GeometricTree { .. } => "geometric-tree",
            Family::Fixed { name, .. } => name,
        }
    }

    /// Parameter label for CSV output (no commas).
    pub fn param(&self) -> String {
        match self {
            Family::Line => "d=2".into(),
            Family::RegularTree { degree } => format!("d={degree}"),
            Family::GeometricTree {
                alpha, b, c, d_star, ..
            } => format!("alpha={alpha} b={b} c={c} d_star={d_star}"),
            Family::Fixed { graph, .. } => {
                format!("nodes={} edges={}", graph.node_count(), graph.edge_count())
            }
        }
    }

    fn geometric_spec(&self, mode: SpreadMode) -> Option<GeometricTreeSpec> {
        let Family::GeometricTree {
            alpha,
            b,
            c,
            d_star,
            radius,
        } = *self
        else {
            return None;
        };
        let mut spec = GeometricTreeSpec {
            alpha,
            b,
            c,
            d_star,
            radius: 1,
        };
        spec.radius = radius.unwrap_or_else(|| match mode {
            // well beyond the radius a ball of n nodes needs
            SpreadMode::ByCount(n) => 3 * spec.radius_for(n) + 5,
            // first-passage distance grows about linearly in time
            SpreadMode::ByTime(t) => (2.0 * t).ceil() as usize + 2,
        });
        Some(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieMode {
    /// Credit `1 / tie_size` when the source is among the maximizers.
    #[default]
    Fractional,
    /// Break ties with the seeded generator and credit 0 or 1.
    Sampled,
}

impl std::str::FromStr for TieMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fractional" => Ok(TieMode::Fractional),
            "sampled" => Ok(TieMode::Sampled),
            _ => Err("expected `fractional` or `sampled`".into()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; 0 uses all cores.
    pub workers: usize,
    pub tie_mode: TieMode,
}

impl RunOptions {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        RunOptions {
            trials,
            master_seed,
            workers: 1,
            tie_mode: TieMode::Fractional,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn tie_mode(mut self, mode: TieMode) -> Self {
        self.tie_mode = mode;
        self
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Usage("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// Maps `f` over `0..n` on `workers` threads, keeping index order.
fn par_map<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// One simulated outbreak and the host it ran on.
struct Outbreak<'a> {
    host: Cow<'a, Graph>,
    trace: SpreadTrace,
    /// Whether an infected node sits on the rim of a finite host.
    touched: bool,
}

fn spread_on<T: rumor_core::spread::Topology>(
    topo: &mut T,
    source: NodeId,
    mode: SpreadMode,
    seed: u64,
) -> Result<SpreadTrace> {
    let mut rng = seeded(seed);
    Ok(match mode {
        SpreadMode::ByCount(n) => spread_by_count_on(topo, source, n, &mut rng)?,
        SpreadMode::ByTime(t) => spread_by_time_on(topo, source, t, &mut rng)?,
    })
}

fn outbreak(family: &Family, mode: SpreadMode, seed: u64) -> Result<Outbreak<'_>> {
    match family {
        Family::Line | Family::RegularTree { .. } => {
            let d = match family {
                Family::RegularTree { degree } => *degree,
                _ => 2,
            };
            let mut tree = LazyRegularTree::new(d)?;
            let trace = spread_on(&mut tree, NodeId(0), mode, seed)?;
            Ok(Outbreak {
                host: Cow::Owned(tree.into_graph()),
                trace,
                touched: false,
            })
        }
        Family::GeometricTree { .. } => {
            let spec = family.geometric_spec(mode).expect("geometric family");
            let g = geometric_tree(&spec, mix64(seed ^ 0x686f_7374))?;
            let mut topo = &g;
            let trace = match spread_on(&mut topo, NodeId(0), mode, seed) {
                Err(Error::Core(rumor_core::Error::Exhausted { .. })) => {
                    return Err(Error::Aborted(format!(
                        "geometric host of radius {} is too small",
                        spec.radius
                    )))
                }
                r => r?,
            };
            let depth = bfs_distances(&g, NodeId(0));
            let touched = trace
                .order
                .iter()
                .any(|&v| depth[g.index_of(v).expect("host node")] as usize >= spec.radius);
            Ok(Outbreak {
                host: Cow::Owned(g),
                trace,
                touched,
            })
        }
        Family::Fixed { graph, .. } => {
            let g: &Graph = graph;
            let need = match mode {
                SpreadMode::ByCount(n) => n,
                SpreadMode::ByTime(_) => 1,
            };
            let comp = g.component_sizes();
            let eligible: Vec<usize> = (0..g.node_count()).filter(|&i| comp[i] >= need).collect();
            if eligible.is_empty() {
                return Err(Error::Core(rumor_core::Error::Exhausted {
                    requested: need,
                    reachable: comp.iter().copied().max().unwrap_or(0),
                }));
            }
            let pick = eligible[(mix64(seed ^ 0x7372_6365) % eligible.len() as u64) as usize];
            let mut topo = g;
            let trace = spread_on(&mut topo, g.id_at(pick), mode, seed)?;
            Ok(Outbreak {
                host: Cow::Borrowed(g),
                trace,
                touched: false,
            })
        }
    }
}

/// Hop distances from `src` to every node of `g`, by host index.
/// Unreachable nodes get `u32::MAX`.
pub fn bfs_distances(g: &Graph, src: NodeId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.node_count()];
    let Some(s) = g.index_of(src) else {
        return dist;
    };
    dist[s] = 0;
    let mut queue = std::collections::VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &w in g.adjacent(u) {
            let w = w as usize;
            if dist[w] == u32::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn tie_seed(seed: u64) -> u64 {
    mix64(seed ^ 0x7469_6573)
}

/// Outcome of one estimator on one outbreak.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial_id: usize,
    pub family: String,
    pub param: String,
    pub n_infected: usize,
    pub true_source: NodeId,
    pub estimator: String,
    pub estimate: NodeId,
    pub tie_size: usize,
    pub source_in_tie: bool,
    pub hop_error: u64,
    pub wall_time: Duration,
    pub boundary_touch: bool,
}

impl TrialRecord {
    /// Detection credit under `mode`.
    pub fn credit(&self, mode: TieMode) -> f64 {
        match mode {
            TieMode::Fractional if self.source_in_tie => 1.0 / self.tie_size as f64,
            TieMode::Fractional => 0.0,
            TieMode::Sampled => f64::from(u8::from(self.estimate == self.true_source)),
        }
    }
}

/// Runs every estimator in `estimators` on the same outbreak.
fn run_trial(
    family: &Family,
    mode: SpreadMode,
    estimators: &[Estimator],
    trial_id: usize,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    let ob = outbreak(family, mode, seed)?;
    let rg = RumorGraph::new(&ob.host, ob.trace.order.iter().copied())?;
    let source = ob.trace.source;
    let dist = bfs_distances(&ob.host, source);
    let ts = tie_seed(seed);
    let mut out = Vec::with_capacity(estimators.len());
    for &kind in estimators {
        let start = Instant::now();
        let (estimate_node, tie) = if kind == Estimator::Random {
            (random_guess(&rg, ts), rg.nodes().collect::<Vec<_>>())
        } else {
            let r = estimate(kind, &rg, ts)?;
            (r.estimate, r.argmax_set().to_vec())
        };
        let wall_time = start.elapsed();
        let hop_error = dist[ob.host.index_of(estimate_node).expect("infected node")] as u64;
        out.push(TrialRecord {
            trial_id,
            family: family.name().into(),
            param: family.param(),
            n_infected: rg.len(),
            true_source: source,
            estimator: kind.name().into(),
            estimate: estimate_node,
            tie_size: tie.len(),
            source_in_tie: tie.binary_search(&source).is_ok(),
            hop_error,
            wall_time,
            boundary_touch: ob.touched,
        });
    }
    Ok(out)
}

/// Runs `opts.trials` outbreaks and evaluates `estimators` on each. Records
/// come back grouped by trial, in trial order.
pub fn run_trials(
    family: &Family,
    mode: SpreadMode,
    estimators: &[Estimator],
    opts: &RunOptions,
) -> Result<Vec<Vec<TrialRecord>>> {
    opts.check()?;
    par_map(opts.workers, opts.trials, |k| {
        run_trial(family, mode, estimators, k, trial_seed(opts.master_seed, k as u64))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    /// Infected count or time.
    pub x: f64,
    pub p_detect: f64,
    pub stderr: f64,
    /// Trials that count towards the estimate.
    pub trials: usize,
    /// Trials dropped because the rumor reached the rim of the host.
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionCurve {
    pub family: String,
    pub param: String,
    pub estimator: String,
    pub points: Vec<CurvePoint>,
}

pub const CURVE_HEADER: &str = "family,param,x,p_detect,stderr,trials";

impl DetectionCurve {
    pub fn write_csv<W: Write>(&self, w: &mut W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{CURVE_HEADER}")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                self.family, self.param, p.x, p.p_detect, p.stderr, p.trials
            )?;
        }
        Ok(())
    }
}

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn curve_point(x: f64, records: &[TrialRecord], mode: TieMode) -> Result<CurvePoint> {
    let total = records.len();
    let discarded = records.iter().filter(|r| r.boundary_touch).count();
    if discarded as f64 > MAX_BOUNDARY_FRACTION * total as f64 {
        return Err(Error::Aborted(format!(
            "{discarded} of {total} trials at x={x} reached the edge of the host \
             (limit {:.0}%); enlarge the host radius",
            MAX_BOUNDARY_FRACTION * 100.0
        )));
    }
    let kept: Vec<&TrialRecord> = records.iter().filter(|r| !r.boundary_touch).collect();
    let p = kept.iter().map(|r| r.credit(mode)).sum::<f64>() / kept.len() as f64;
    Ok(CurvePoint {
        x,
        p_detect: p,
        stderr: binomial_stderr(p, kept.len()),
        trials: kept.len(),
        discarded,
    })
}

fn detection_curve(
    family: &Family,
    modes: &[(f64, SpreadMode)],
    estimator: Estimator,
    opts: &RunOptions,
) -> Result<DetectionCurve> {
    let mut points = Vec::with_capacity(modes.len());
    for &(x, mode) in modes {
        let recs: Vec<TrialRecord> = run_trials(family, mode, &[estimator], opts)?
            .into_iter()
            .flatten()
            .collect();
        points.push(curve_point(x, &recs, opts.tie_mode)?);
    }
    Ok(DetectionCurve {
        family: family.name().into(),
        param: family.param(),
        estimator: estimator.name().into(),
        points,
    })
}

/// Detection probability after the rumor has reached each of `sizes`
/// nodes.
pub fn detection_probability(
    family: &Family,
    sizes: &[usize],
    estimator: Estimator,
    opts: &RunOptions,
) -> Result<DetectionCurve> {
    let modes: Vec<_> = sizes
        .iter()
        .map(|&n| (n as f64, SpreadMode::ByCount(n)))
        .collect();
    detection_curve(family, &modes, estimator, opts)
}

/// Detection probability at each of `times`.
pub fn detection_probability_time(
    family: &Family,
    times: &[f64],
    estimator: Estimator,
    opts: &RunOptions,
) -> Result<DetectionCurve> {
    let modes: Vec<_> = times.iter().map(|&t| (t, SpreadMode::ByTime(t))).collect();
    detection_curve(family, &modes, estimator, opts)
}

/// Detection probability of rumor centrality on an infinite line at time
/// `t`: `sum_k a_k (1 + t / (k + 1))` with `a_k = (e^-t t^k / k!)^2`. The
/// two sides hold independent Poisson(t) counts; equal counts give a
/// unique center at the source and counts one apart give a two-way tie.
pub fn line_detection_exact(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let kmax = (t + 20.0 * t.sqrt() + 50.0) as u64;
    (0..=kmax)
        .map(|k| {
            let kf = k as f64;
            let ln_a = -2.0 * t + 2.0 * kf * t.ln() - 2.0 * statrs::function::gamma::ln_gamma(kf + 1.0);
            ln_a.exp() * (1.0 + t / (kf + 1.0))
        })
        .sum()
}

/// Hop-error counts per estimator.
#[derive(Debug, Clone)]
pub struct ErrorHistogram {
    pub estimators: Vec<String>,
    pub records: Vec<TrialRecord>,
}

pub const HISTOGRAM_HEADER: &str = "estimator,hop_error,count";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub mean_hop_error: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Fraction of trials whose estimate is the source.
    pub correct_rate: f64,
    pub trials: usize,
}

impl ErrorHistogram {
    pub fn counts(&self, estimator: &str) -> BTreeMap<u64, u64> {
        let mut m = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.estimator == estimator) {
            *m.entry(r.hop_error).or_insert(0) += 1;
        }
        m
    }

    pub fn summary(&self, estimator: &str) -> ErrorSummary {
        let errs: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.estimator == estimator)
            .map(|r| r.hop_error as f64)
            .collect();
        let n = errs.len();
        let mean = errs.iter().sum::<f64>() / n as f64;
        let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n.max(2) - 1) as f64;
        ErrorSummary {
            mean_hop_error: mean,
            stderr: (var / n as f64).sqrt(),
            correct_rate: errs.iter().filter(|&&e| e == 0.0).count() as f64 / n as f64,
            trials: n,
        }
    }

    pub fn write_csv<W: Write>(&self, w: &mut W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{HISTOGRAM_HEADER}")?;
        for e in &self.estimators {
            for (h, c) in self.counts(e) {
                writeln!(w, "{e},{h},{c}")?;
            }
        }
        Ok(())
    }

    /// One comment line per estimator with its mean error and hit rate.
    pub fn summary_lines(&self) -> Vec<String> {
        self.estimators
            .iter()
            .map(|e| {
                let s = self.summary(e);
                format!(
                    "{e}: mean_hop_error={} stderr={} correct_rate={} trials={}",
                    s.mean_hop_error, s.stderr, s.correct_rate, s.trials
                )
            })
            .collect()
    }
}

/// Spreads to `n_infected` nodes `opts.trials` times and records the hop
/// distance between each estimate and the source. A uniform random guess is
/// always included as a baseline.
pub fn error_histogram(
    family: &Family,
    n_infected: usize,
    estimators: &[Estimator],
    opts: &RunOptions,
) -> Result<ErrorHistogram> {
    let mut kinds: Vec<Estimator> = estimators
        .iter()
        .copied()
        .filter(|&e| e != Estimator::Random)
        .collect();
    kinds.push(Estimator::Random);
    let records: Vec<TrialRecord> =
        run_trials(family, SpreadMode::ByCount(n_infected), &kinds, opts)?
            .into_iter()
            .flatten()
            .collect();
    let touched = records.iter().filter(|r| r.boundary_touch).count() / kinds.len();
    if touched as f64 > MAX_BOUNDARY_FRACTION * opts.trials as f64 {
        return Err(Error::Aborted(format!(
            "{touched} of {} trials reached the edge of the host",
            opts.trials
        )));
    }
    Ok(ErrorHistogram {
        estimators: kinds.iter().map(|e| e.name().to_string()).collect(),
        records: records.into_iter().filter(|r| !r.boundary_touch).collect(),
    })
}

/// A `key,value` report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<(String, String)>,
}

impl Report {
    fn push(&mut self, k: &str, v: impl ToString) {
        self.rows.push((k.into(), v.to_string()));
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.rows.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut s = String::new();
        for c in comments {
            let _ = writeln!(s, "# {c}");
        }
        s.push_str("key,value\n");
        for (k, v) in &self.rows {
            let _ = writeln!(s, "{k},{v}");
        }
        s
    }
}

/// Empirical law of the infected count in one root subtree of the
/// 3-regular tree at time `t`, against Geometric(`e^-t`) on `{0, 1, ...}`.
#[derive(Debug, Clone)]
pub struct SubtreeReport {
    pub t: f64,
    pub p: f64,
    pub trials: usize,
    /// `counts[n]`: trials with `n` infected nodes in the subtree.
    pub counts: Vec<u64>,
    pub tv_distance: f64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub mean: f64,
    pub expected_mean: f64,
}

impl SubtreeReport {
    pub fn report(&self) -> Report {
        let mut r = Report::default();
        r.push("t", self.t);
        r.push("p", self.p);
        r.push("trials", self.trials);
        r.push("tv_distance", self.tv_distance);
        r.push("chi2", self.chi2);
        r.push("dof", self.dof);
        r.push("p_value", self.p_value);
        r.push("mean", self.mean);
        r.push("expected_mean", self.expected_mean);
        r
    }
}

pub fn geometric_pmf(p: f64, n: usize) -> f64 {
    p * (1.0 - p).powi(n as i32)
}

pub fn subtree_distribution_check(
    t: f64,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<SubtreeReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Usage("t must be positive".into()));
    }
    RunOptions::new(trials, seed).check()?;
    let sizes = par_map(workers, trials, |k| {
        let mut tree = LazyRegularTree::new(3)?;
        let trace = spread_on(&mut tree, NodeId(0), SpreadMode::ByTime(t), trial_seed(seed, k as u64))?;
        // infection order is causal, so parents are classified first
        let mut inside = vec![false; tree.node_count()];
        let mut count = 0usize;
        for v in &trace.order {
            let h = v.0 as usize;
            inside[h] = h == 1 || tree.parent(h).is_some_and(|p| p != 0 && inside[p]);
            count += usize::from(inside[h]);
        }
        Ok(count)
    })?;
    let p = (-t).exp();
    let max = sizes.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max + 1];
    for &s in &sizes {
        counts[s] += 1;
    }
    let n = trials as f64;
    let mut tv = 0.0;
    let mut covered = 0.0;
    for (k, &c) in counts.iter().enumerate() {
        let q = geometric_pmf(p, k);
        covered += q;
        tv += (c as f64 / n - q).abs();
    }
    tv = 0.5 * (tv + (1.0 - covered).max(0.0));

    // chi-square over leading cells with expected count >= 5, plus a tail
    let mut obs = Vec::new();
    let mut exp = Vec::new();
    let mut tail_p = 1.0;
    let mut k = 0;
    while n * geometric_pmf(p, k) >= 5.0 && n * (tail_p - geometric_pmf(p, k)) >= 5.0 {
        obs.push(counts.get(k).copied().unwrap_or(0) as f64);
        exp.push(n * geometric_pmf(p, k));
        tail_p -= geometric_pmf(p, k);
        k += 1;
    }
    obs.push(sizes.iter().filter(|&&s| s >= k).count() as f64);
    exp.push(n * tail_p);
    let chi2: f64 = obs.iter().zip(&exp).map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = obs.len().saturating_sub(1).max(1);
    let p_value = 1.0
        - ChiSquared::new(dof as f64)
            .map_err(|e| Error::Internal(e.to_string()))?
            .cdf(chi2);
    Ok(SubtreeReport {
        t,
        p,
        trials,
        counts,
        tv_distance: tv,
        chi2,
        dof,
        p_value,
        mean: sizes.iter().sum::<usize>() as f64 / n,
        expected_mean: (1.0 - p) / p,
    })
}

/// How often the rumor on a geometric tree fills the ball of radius
/// `t (1 - eps)` around the source and stays inside radius `t (1 + eps)`,
/// with `eps = t^(-1/2 + delta)`.
#[derive(Debug, Clone)]
pub struct ShapeReport {
    pub t: f64,
    pub delta: f64,
    pub eps: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub trials: usize,
    pub inner_fraction: f64,
    pub outer_fraction: f64,
    pub pass_fraction: f64,
    pub stderr: f64,
}

impl ShapeReport {
    pub fn report(&self) -> Report {
        let mut r = Report::default();
        r.push("t", self.t);
        r.push("delta", self.delta);
        r.push("eps", self.eps);
        r.push("inner_radius", self.inner_radius);
        r.push("outer_radius", self.outer_radius);
        r.push("trials", self.trials);
        r.push("inner_fraction", self.inner_fraction);
        r.push("outer_fraction", self.outer_fraction);
        r.push("pass_fraction", self.pass_fraction);
        r.push("stderr", self.stderr);
        r
    }
}

pub fn shape_epsilon(t: f64, delta: f64) -> f64 {
    t.powf(-0.5 + delta)
}

/// `spec.radius` must exceed `t (1 + eps)`; see [`shape_radius`].
pub fn shape_check(
    spec: &GeometricTreeSpec,
    t: f64,
    delta: f64,
    trials: usize,
    seed: u64,
    workers: usize,
) -> Result<ShapeReport> {
    if !(delta > 0.0 && delta < 0.1) {
        return Err(Error::Usage("delta must lie in (0, 0.1)".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Usage("t must be positive".into()));
    }
    let eps = shape_epsilon(t, delta);
    let (inner, outer) = (t * (1.0 - eps), t * (1.0 + eps));
    if spec.radius as f64 <= outer {
        return Err(Error::Usage(format!(
            "host radius {} must exceed t(1+eps) = {outer}",
            spec.radius
        )));
    }
    RunOptions::new(trials, seed).check()?;
    let family = Family::GeometricTree {
        alpha: spec.alpha,
        b: spec.b,
        c: spec.c,
        d_star: spec.d_star,
        radius: Some(spec.radius),
    };
    let outcomes = par_map(workers, trials, |k| {
        let ob = outbreak(&family, SpreadMode::ByTime(t), trial_seed(seed, k as u64))?;
        let depth = bfs_distances(&ob.host, NodeId(0));
        let mut infected = vec![false; ob.host.node_count()];
        for v in &ob.trace.order {
            infected[ob.host.index_of(*v).expect("host node")] = true;
        }
        let filled = (0..depth.len()).all(|i| depth[i] as f64 > inner || infected[i]);
        let contained = (0..depth.len()).all(|i| !infected[i] || depth[i] as f64 <= outer);
        Ok((filled, contained))
    })?;
    let n = trials as f64;
    let frac = |f: &dyn Fn(&(bool, bool)) -> bool| outcomes.iter().filter(|o| f(o)).count() as f64 / n;
    let pass = frac(&|o| o.0 && o.1);
    Ok(ShapeReport {
        t,
        delta,
        eps,
        inner_radius: inner,
        outer_radius: outer,
        trials,
        inner_fraction: frac(&|o| o.0),
        outer_fraction: frac(&|o| o.1),
        pass_fraction: pass,
        stderr: binomial_stderr(pass, trials),
    })
}

/// Smallest integer radius strictly beyond `t (1 + eps)`, plus `margin`.
pub fn shape_radius(t: f64, delta: f64, margin: usize) -> usize {
    (t * (1.0 + shape_epsilon(t, delta))).floor() as usize + 1 + margin
}

/// `P(|P(t) - t| >= gamma t)` for a unit-rate Poisson process, estimated
/// by simulating arrivals, next to the bound `2 exp(-t gamma^2 / 4)`.
#[derive(Debug, Clone)]
pub struct TailReport {
    pub t: f64,
    pub gamma: f64,
    pub trials: usize,
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
}

impl TailReport {
    pub fn report(&self) -> Report {
        let mut r = Report::default();
        r.push("t", self.t);
        r.push("gamma", self.gamma);
        r.push("trials", self.trials);
        r.push("empirical", self.empirical);
        r.push("stderr", self.stderr);
        r.push("bound", self.bound);
        r
    }
}

pub fn poisson_tail_check(t: f64, gamma: f64, trials: usize, seed: u64, workers: usize) -> Result<TailReport> {
    if !(t > 0.0 && t.is_finite() && gamma > 0.0) {
        return Err(Error::Usage("need t > 0 and gamma > 0".into()));
    }
    RunOptions::new(trials, seed).check()?;
    let hits = par_map(workers, trials, |k| {
        let mut rng = seeded(trial_seed(seed, k as u64));
        let mut clock = exponential(&mut rng, 1.0);
        let mut arrivals = 0u64;
        while clock <= t {
            arrivals += 1;
            clock += exponential(&mut rng, 1.0);
        }
        Ok((arrivals as f64 - t).abs() >= gamma * t)
    })?;
    let empirical = hits.iter().filter(|&&h| h).count() as f64 / trials as f64;
    Ok(TailReport {
        t,
        gamma,
        trials,
        empirical,
        stderr: binomial_stderr(empirical, trials),
        bound: 2.0 * (-t * gamma * gamma / 4.0).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_series_small_values() {
        assert_eq!(line_detection_exact(0.0), 1.0);
        // t -> 0: P(N1 = N2 = 0) + P(one side has 1) / 2 ~ 1 - t
        let t = 1e-4;
        assert!((line_detection_exact(t) - (1.0 - t)).abs() < 1e-6);
        let v = line_detection_exact(10.0);
        assert!(v > 0.1 && v < 0.2, "{v}");
    }

    #[test]
    fn zero_time_detects_the_source() {
        let c = detection_probability_time(&Family::Line, &[0.0], Estimator::RumorCentrality, &RunOptions::new(50, 1)).unwrap();
        assert_eq!(c.points[0].p_detect, 1.0);
        assert_eq!(c.points[0].stderr, 0.0);
    }

    #[test]
    fn curves_do_not_depend_on_worker_count() {
        let fam = Family::RegularTree { degree: 3 };
        let o = RunOptions::new(200, 9);
        let a = detection_probability(&fam, &[30], Estimator::RumorCentrality, &o).unwrap();
        let b = detection_probability(&fam, &[30], Estimator::RumorCentrality, &o.workers(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shape_check_preconditions() {
        let spec = GeometricTreeSpec { alpha: 1.0, b: 1.0, c: 1.0, d_star: 3, radius: 10 };
        assert!(shape_check(&spec, 20.0, 0.05, 1, 0, 1).is_err());
        assert!(shape_check(&spec, 2.0, 0.2, 1, 0, 1).is_err());
        assert!(shape_check(&spec, 2.0, 0.05, 5, 0, 1).is_ok());
        assert!(shape_radius(50.0, 0.05, 0) as f64 > 50.0 * (1.0 + shape_epsilon(50.0, 0.05)));
    }

    #[test]
    fn tie_modes_parse() {
        assert_eq!("sampled".parse::<TieMode>(), Ok(TieMode::Sampled));
        assert!("x".parse::<TieMode>().is_err());
    }
}
