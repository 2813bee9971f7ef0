//! Acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the
//! process exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p rumor --test acceptance --release` for timings
//! close to the stated budgets.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;

use rumor::experiments::{
    binomial_stderr, detection_probability, detection_probability_time, error_histogram,
    line_detection_exact, poisson_tail_check, shape_check, shape_radius,
    subtree_distribution_check, Family, RunOptions, TieMode,
};
use rumor::io::{load_edge_list, load_infected};
use rumor::rumor_core::centrality::{
    distance_center, enumerate_permitted_permutations, rumor_center, rumor_centrality_all,
    ScoreMode,
};
use rumor::rumor_core::estimators::{estimate_general_tree, exact_likelihood, permutation_probability, Estimator};
use rumor::rumor_core::generators::{line_graph, regular_tree, small_world, GeometricTreeSpec};
use rumor::rumor_core::graph::bfs_tree;
use rumor::rumor_core::rng::{seeded, SimRng};
use rumor::rumor_core::spread::spread_by_count;
use rumor::rumor_core::{Graph, NodeId, RumorGraph};

type Outcome = (bool, String);

fn main() {
    let criteria: [(u32, fn() -> Outcome); 12] = [
        (1, regular_tree_limit),
        (2, line_scaling),
        (3, regular_tree_bound),
        (4, geometric_detection),
        (5, message_passing_oracle),
        (6, likelihood_oracle),
        (7, fixtures),
        (8, center_properties),
        (9, subtree_law),
        (10, shape_and_tail),
        (11, linear_scaling),
        (12, small_world_ordering),
    ];
    let mut failed = 0;
    for (id, f) in criteria {
        let start = Instant::now();
        let (ok, detail) = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {id}: {detail} [{secs:.1}s]",
            if ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn opts(trials: usize, seed: u64) -> RunOptions {
    RunOptions::new(trials, seed).workers(0)
}

fn regular_tree_limit() -> Outcome {
    let c = detection_probability(
        &Family::RegularTree { degree: 3 },
        &[400],
        Estimator::RumorCentrality,
        &opts(10_000, 1),
    )
    .unwrap();
    let p = c.points[0].p_detect;
    ((0.22..=0.28).contains(&p), format!("d=3 N=400 p={p:.4}, want [0.22, 0.28]"))
}

fn line_scaling() -> Outcome {
    let t = 10.0;
    let c = detection_probability_time(&Family::Line, &[t], Estimator::RumorCentrality, &opts(100_000, 2))
        .unwrap();
    let pt = &c.points[0];
    let exact = line_detection_exact(t);
    let series_ok = (pt.p_detect - exact).abs() <= 3.0 * pt.stderr;
    let c = detection_probability(&Family::Line, &[100, 400], Estimator::RumorCentrality, &opts(100_000, 3))
        .unwrap();
    let ratio = c.points[0].p_detect / c.points[1].p_detect;
    let ratio_ok = (1.4..=2.6).contains(&ratio);
    (
        series_ok && ratio_ok,
        format!(
            "t=10 p={:.4} vs series {exact:.4} (3 stderr = {:.4}); p(100)/p(400)={ratio:.3}, want [1.4, 2.6]",
            pt.p_detect,
            3.0 * pt.stderr
        ),
    )
}

fn regular_tree_bound() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in 3..=6 {
        let c = detection_probability(
            &Family::RegularTree { degree: d },
            &[400],
            Estimator::RumorCentrality,
            &opts(10_000, 10 + d as u64),
        )
        .unwrap();
        let p = c.points[0].p_detect;
        let limit = 0.5 + 3.0 * binomial_stderr(p, 10_000);
        ok &= p <= limit;
        parts.push(format!("d={d} p={p:.4}"));
    }
    (ok, format!("{}, each <= 0.5 + 3 stderr", parts.join(" ")))
}

fn geometric_detection() -> Outcome {
    let fam = Family::GeometricTree {
        alpha: 1.0,
        b: 1.0,
        c: 1.0,
        d_star: 3,
        radius: None,
    };
    let c = detection_probability_time(&fam, &[40.0], Estimator::RumorCentrality, &opts(1_000, 4)).unwrap();
    let p = c.points[0].p_detect;
    (p >= 0.9, format!("alpha=1 b=c=1 d*=3 t=40 p={p:.4}, want >= 0.9"))
}

/// Random labelled tree on `n` nodes with ids spread out and shuffled.
fn random_tree(rng: &mut SimRng, n: usize) -> Graph {
    let mut ids: Vec<u64> = (0..n as u64).map(|x| 7 * x + 2).collect();
    for i in (1..n).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    if n == 1 {
        return Graph::from_nodes_and_edges([NodeId(ids[0])], []).unwrap();
    }
    let edges: Vec<_> = (1..n)
        .map(|i| (NodeId(ids[i]), NodeId(ids[rng.random_range(0..i)])))
        .collect();
    Graph::from_edges(edges).unwrap()
}

fn whole(g: &Graph) -> RumorGraph<'_> {
    RumorGraph::new(g, g.nodes().iter().copied()).unwrap()
}

/// Counts orders starting at `root` in which every node after the first
/// has an earlier neighbor, by backtracking over all extensions.
fn brute_orders(g: &Graph, root: usize) -> u64 {
    fn go(g: &Graph, placed: &mut Vec<bool>, left: usize) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut total = 0;
        for v in 0..placed.len() {
            if !placed[v] && g.adjacent(v).iter().any(|&w| placed[w as usize]) {
                placed[v] = true;
                total += go(g, placed, left - 1);
                placed[v] = false;
            }
        }
        total
    }
    let mut placed = vec![false; g.node_count()];
    placed[root] = true;
    go(g, &mut placed, g.node_count() - 1)
}

fn message_passing_oracle() -> Outcome {
    let mut rng = seeded(5);
    let mut failures = 0;
    let mut roots = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=9);
        let g = random_tree(&mut rng, n);
        let s = rumor_centrality_all(&whole(&g), ScoreMode::Exact).unwrap();
        for i in 0..n {
            roots += 1;
            if s.exact_score(g.id_at(i)).unwrap() != &BigUint::from(brute_orders(&g, i)) {
                failures += 1;
            }
        }
    }
    (failures == 0, format!("200 trees, {roots} roots, {failures} mismatches"))
}

fn argmax_of<T: Ord + Clone>(xs: &[(NodeId, T)]) -> BTreeSet<NodeId> {
    let max = xs.iter().map(|x| x.1.clone()).max().unwrap();
    xs.iter().filter(|x| x.1 == max).map(|x| x.0).collect()
}

fn likelihood_oracle() -> Outcome {
    let host = regular_tree(3, 8).unwrap();
    let mut rng = seeded(6);
    let mut failures = 0;
    for k in 0..200 {
        let n = rng.random_range(1..=8);
        let (_, rg) = spread_by_count(&host, NodeId(0), n, 1000 + k).unwrap();
        let s = rumor_centrality_all(&rg, ScoreMode::Exact).unwrap();
        let by_centrality: Vec<_> = rg.nodes().map(|v| (v, s.exact_score(v).unwrap().clone())).collect();
        let by_likelihood: Vec<(NodeId, BigRational)> = rg
            .nodes()
            .map(|v| (v, exact_likelihood(&rg, v, 10).unwrap().exact))
            .collect();
        if argmax_of(&by_centrality) != argmax_of(&by_likelihood) {
            failures += 1;
        }
    }
    (failures == 0, format!("200 rumor trees in a 3-regular host, {failures} argmax mismatches"))
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fixtures() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let g = load_edge_list(fixture("five-node-tree.edges")).unwrap();
    let rg = RumorGraph::new(&g, load_infected(fixture("five-node-tree.infected")).unwrap()).unwrap();
    let s = rumor_centrality_all(&rg, ScoreMode::Exact).unwrap();
    let r1 = s.exact_score(NodeId(1)).unwrap().clone();
    let orders = enumerate_permitted_permutations(&rg, NodeId(1), 10).unwrap().len();
    ok &= r1 == BigUint::from(8u32) && orders == 8;
    notes.push(format!("five-node R(1)={r1}, {orders} orders"));

    let g = load_edge_list(fixture("pendant-star.edges")).unwrap();
    let rg = RumorGraph::new(&g, load_infected(fixture("pendant-star.infected")).unwrap()).unwrap();
    let s = rumor_centrality_all(&rg, ScoreMode::Exact).unwrap();
    let est = estimate_general_tree(&rg, 0).unwrap();
    for (v, num) in [(1u64, 6), (2, 3)] {
        let v = NodeId(v);
        let order = bfs_tree(&rg, v).unwrap().bfs_order().to_vec();
        let r = BigRational::from_integer(s.exact_score(v).unwrap().clone().into());
        let heuristic = r * permutation_probability(&g, &order).unwrap().exact();
        let likelihood = exact_likelihood(&rg, v, 10).unwrap().exact;
        let want = BigRational::new(num.into(), 64.into());
        let log_ok = (est.scores.log_score(v).unwrap() - (num as f64 / 64.0).ln()).abs() < 1e-12;
        ok &= heuristic == want && likelihood == want && log_ok;
        notes.push(format!("pendant-star v={v} score={heuristic} likelihood={likelihood}"));
    }
    let ratio = BigRational::new(
        s.exact_score(NodeId(1)).unwrap().clone().into(),
        s.exact_score(NodeId(2)).unwrap().clone().into(),
    );
    ok &= ratio == BigRational::from_integer(4.into());
    notes.push(format!("R(1)/R(2)={ratio}"));
    (ok, notes.join("; "))
}

/// Sizes of the components left when `v` is removed.
fn branch_sizes(g: &Graph, v: usize) -> Vec<usize> {
    let mut seen = vec![false; g.node_count()];
    seen[v] = true;
    let mut out = Vec::new();
    for &s in g.adjacent(v) {
        let mut stack = vec![s as usize];
        seen[s as usize] = true;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &w in g.adjacent(u) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
        out.push(size);
    }
    out
}

fn distance_sum(g: &Graph, v: usize) -> u64 {
    let mut dist = vec![u64::MAX; g.node_count()];
    dist[v] = 0;
    let mut queue = std::collections::VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        for &w in g.adjacent(u) {
            if dist[w as usize] == u64::MAX {
                dist[w as usize] = dist[u] + 1;
                queue.push_back(w as usize);
            }
        }
    }
    dist.iter().sum()
}

fn center_properties() -> Outcome {
    let mut rng = seeded(8);
    let mut violations = Vec::new();
    let mut unique = 0;
    for k in 0..1000 {
        let n = rng.random_range(1..=200);
        let g = random_tree(&mut rng, n);
        let rg = whole(&g);
        let centers = rumor_center(&rg).unwrap();
        let balanced: Vec<NodeId> = (0..n)
            .filter(|&v| branch_sizes(&g, v).iter().all(|&b| 2 * b <= n))
            .map(|v| g.id_at(v))
            .collect();
        if centers != balanced {
            violations.push(format!("tree {k}: centers {centers:?} vs balanced {balanced:?}"));
        }
        if centers.len() > 2 {
            violations.push(format!("tree {k}: {} centers", centers.len()));
        }
        if centers.len() == 1 {
            unique += 1;
            let sums: Vec<u64> = (0..n).map(|v| distance_sum(&g, v)).collect();
            let min = *sums.iter().min().unwrap();
            let brute: Vec<NodeId> = (0..n).filter(|&v| sums[v] == min).map(|v| g.id_at(v)).collect();
            if brute != centers || distance_center(&rg) != brute {
                violations.push(format!("tree {k}: rumor center {centers:?}, distance center {brute:?}"));
            }
        }
    }
    for v in violations.iter().take(5) {
        println!("  counterexample {v}");
    }
    (
        violations.is_empty(),
        format!("1000 trees ({unique} with a unique center), {} violations", violations.len()),
    )
}

fn subtree_law() -> Outcome {
    let r = subtree_distribution_check(2.0, 100_000, 9, 0).unwrap();
    (
        r.tv_distance < 0.01,
        format!("d=3 t=2 TV={:.5} (chi2 p={:.3}), want < 0.01", r.tv_distance, r.p_value),
    )
}

fn shape_and_tail() -> Outcome {
    let (t, delta) = (50.0, 0.05);
    let spec = GeometricTreeSpec {
        alpha: 1.0,
        b: 1.0,
        c: 1.0,
        d_star: 3,
        radius: shape_radius(t, delta, 2),
    };
    let s = shape_check(&spec, t, delta, 1_000, 10, 0).unwrap();
    let tail = poisson_tail_check(100.0, 0.2, 100_000, 11, 0).unwrap();
    let shape_ok = s.pass_fraction >= 0.95;
    let tail_ok = tail.empirical <= tail.bound;
    (
        shape_ok && tail_ok,
        format!(
            "shape pass fraction {:.3} (inner {:.3}, outer {:.3}), want >= 0.95; tail {:.4} <= bound {:.4}: {}",
            s.pass_fraction,
            s.inner_fraction,
            s.outer_fraction,
            tail.empirical,
            tail.bound,
            if tail_ok { "ok" } else { "violated" }
        ),
    )
}

/// Seconds per node for `rumor_centrality_all` on `g`, best of `reps`
/// timed batches.
fn per_node_time(g: &Graph, batch: usize, reps: usize) -> f64 {
    let rg = whole(g);
    let mut best = f64::INFINITY;
    for _ in 0..reps {
        let start = Instant::now();
        for _ in 0..batch {
            std::hint::black_box(rumor_centrality_all(std::hint::black_box(&rg), ScoreMode::Log).unwrap());
        }
        best = best.min(start.elapsed().as_secs_f64() / batch as f64);
    }
    best / g.node_count() as f64
}

fn linear_scaling() -> Outcome {
    let timed = |n: usize| {
        let g = random_tree(&mut seeded(n as u64), n);
        per_node_time(&g, 1_000_000 / n, 5)
    };
    let (small, large) = (timed(1_000), timed(1_000_000));
    let ratio = large / small;
    // same measurement on a path, where memory access stays local
    let path = |n: usize| per_node_time(&line_graph(n).unwrap(), 1_000_000 / n, 5);
    let path_ratio = path(1_000_000) / path(1_000);
    (
        ratio <= 2.0,
        format!(
            "random trees: {:.1} ns/node at 1e3, {:.1} ns/node at 1e6, ratio {ratio:.2}, want <= 2 (path ratio {path_ratio:.2})",
            small * 1e9,
            large * 1e9
        ),
    )
}

fn small_world_ordering() -> Outcome {
    let g = small_world(5000, 4, 0.1, 12).unwrap();
    let fam = Family::Fixed {
        name: "small-world".into(),
        graph: Arc::new(g),
    };
    let h = error_histogram(
        &fam,
        400,
        &[Estimator::RumorCentrality, Estimator::BfsHeuristic, Estimator::Distance],
        &opts(500, 13).tie_mode(TieMode::Fractional),
    )
    .unwrap();
    let random = h.summary("random");
    let rumor = h.summary("rumor");
    let distance = h.summary("distance");
    let mut ok = rumor.correct_rate > distance.correct_rate;
    let mut parts = vec![format!(
        "correct rate rumor {:.3} vs distance {:.3}",
        rumor.correct_rate, distance.correct_rate
    )];
    for e in ["rumor", "rumor-bfs", "distance"] {
        let s = h.summary(e);
        let gap = random.mean_hop_error - s.mean_hop_error;
        let sd = (s.stderr * s.stderr + random.stderr * random.stderr).sqrt();
        ok &= gap > 3.0 * sd;
        parts.push(format!("{e} hops {:.2}", s.mean_hop_error));
    }
    parts.push(format!("random hops {:.2}", random.mean_hop_error));
    (ok, parts.join(", "))
}
