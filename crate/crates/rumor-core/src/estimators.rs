//! Source estimators and likelihood oracles.
//!
//! All estimators score every infected node and pick a maximizer; ties are
//! broken uniformly with a seeded generator.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::centrality::{
    bfs_rumor_centrality_all, distance_centrality, for_each_permitted_permutation, ln_biguint,
    ln_factorial, log_argmax, product, rumor_centrality_all, CentralityScores, ScoreMode,
    DEFAULT_ENUMERATION_CAP, EXACT_TIE_LIMIT,
};
use crate::error::{Error, Result};
use crate::graph::{sampled_bfs, Graph, NodeId, RumorGraph};
use crate::rng::seeded;
use crate::spread::check_permitted;

/// Probability of one infection order under the boundary recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationProbability {
    pub log_p: f64,
    /// `n_1 .. n_{N-1}`: boundary size before each of the later infections.
    pub boundary_sequence: Vec<u64>,
}

impl PermutationProbability {
    /// `prod_k 1 / n_k` as an exact fraction.
    pub fn exact(&self) -> BigRational {
        BigRational::new(BigInt::one(), product(self.boundary_sequence.iter().copied()).into())
    }
}

/// Boundary sizes `n_k = n_{k-1} + d_k - 2`, `n_1 = d_1`, over the first
/// `N - 1` degrees. Fails when a size drops to zero.
fn boundary_recursion<I: IntoIterator<Item = usize>>(degrees: I, n: usize) -> Result<Vec<u64>> {
    let mut seq = Vec::with_capacity(n.saturating_sub(1));
    let mut cur: i64 = 0;
    for (k, d) in degrees.into_iter().take(n.saturating_sub(1)).enumerate() {
        cur += d as i64 - if k == 0 { 0 } else { 2 };
        if cur <= 0 {
            return Err(Error::EmptyBoundary { step: k + 1 });
        }
        seq.push(cur as u64);
    }
    Ok(seq)
}

fn log_of(seq: &[u64]) -> f64 {
    -seq.iter().map(|&x| libm::log(x as f64)).sum::<f64>()
}

/// Probability that the rumor infects the nodes of `sigma` in that order,
/// using host degrees. Exact when the host is a tree; on graphs with cycles
/// it is the same recursion used as a heuristic.
pub fn permutation_probability(g: &Graph, sigma: &[NodeId]) -> Result<PermutationProbability> {
    check_permitted(g, sigma)?;
    let degrees = sigma.iter().map(|&v| g.degree(v).expect("checked"));
    let seq = boundary_recursion(degrees, sigma.len())?;
    Ok(PermutationProbability {
        log_p: log_of(&seq),
        boundary_sequence: seq,
    })
}

/// The available estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    /// Rumor centrality; on infected graphs with cycles, rumor centrality of
    /// each node's BFS tree.
    RumorCentrality,
    /// Rumor centrality weighted by the probability of the BFS order.
    BfsHeuristic,
    /// Distance center.
    Distance,
    /// Uniform guess.
    Random,
    /// Exact likelihood by enumeration, small trees only.
    ExactLikelihood,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::RumorCentrality,
        Estimator::BfsHeuristic,
        Estimator::Distance,
        Estimator::Random,
        Estimator::ExactLikelihood,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::RumorCentrality => "rumor",
            Estimator::BfsHeuristic => "rumor-bfs",
            Estimator::Distance => "distance",
            Estimator::Random => "random",
            Estimator::ExactLikelihood => "exact-oracle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub estimator: Estimator,
    pub scores: CentralityScores,
    /// Chosen node, a member of the argmax set.
    pub estimate: NodeId,
    pub seed_used: u64,
}

impl EstimateResult {
    pub fn estimator_name(&self) -> &'static str {
        self.estimator.name()
    }

    pub fn argmax_set(&self) -> &[NodeId] {
        self.scores.argmax_set()
    }

    fn pick(estimator: Estimator, scores: CentralityScores, seed: u64) -> Self {
        let estimate = choose(scores.argmax_set(), seed);
        EstimateResult {
            estimator,
            scores,
            estimate,
            seed_used: seed,
        }
    }
}

fn choose(set: &[NodeId], seed: u64) -> NodeId {
    match set.len() {
        1 => set[0],
        n => set[seeded(seed).random_range(0..n)],
    }
}

/// Rumor-centrality estimator; maximum likelihood on regular trees.
pub fn estimate_regular_tree(rg: &RumorGraph<'_>, seed: u64) -> Result<EstimateResult> {
    let scores = rumor_centrality_all(rg, ScoreMode::Log)?;
    Ok(EstimateResult::pick(Estimator::RumorCentrality, scores, seed))
}

/// Scores `ln P(sigma_v | v) + ln R(v, T_bfs(v))` for every candidate `v`,
/// where `sigma_v` is the BFS order from `v`. Without the probability term
/// this is the BFS-tree rumor centrality. BFS parents are sampled as in
/// [`bfs_rumor_centrality_all`].
fn bfs_weighted_scores(rg: &RumorGraph<'_>, seed: u64) -> Result<CentralityScores> {
    let n = rg.len();
    let lnf = ln_factorial(n as u64);
    let mut logs = Vec::with_capacity(n);
    for v in 0..n {
        let (order, parent) = sampled_bfs(rg.csr(), v, seed);
        logs.push(lnf - log_sizes(&order, &parent) + bfs_log_probability(rg, &order)?);
    }
    let mut top = log_argmax(&logs);
    if top.len() > 1 && n <= EXACT_TIE_LIMIT {
        let vals: Vec<BigRational> = top.iter().map(|&v| exact_bfs_score(rg, v, seed)).collect();
        let max = vals.iter().max().expect("non-empty");
        top = top
            .iter()
            .zip(&vals)
            .filter(|(_, x)| *x == max)
            .map(|(&v, _)| v)
            .collect();
    }
    let argmax = top.into_iter().map(|k| rg.node(k)).collect();
    Ok(CentralityScores::new(rg.nodes().collect(), logs, None, argmax))
}

fn subtree_sizes(order: &[u32], parent: &[u32]) -> Vec<u64> {
    let mut s = vec![1u64; order.len()];
    for &u in order[1..].iter().rev() {
        s[parent[u as usize] as usize] += s[u as usize];
    }
    s
}

fn log_sizes(order: &[u32], parent: &[u32]) -> f64 {
    subtree_sizes(order, parent)
        .iter()
        .map(|&s| libm::log(s as f64))
        .sum()
}

fn bfs_log_probability(rg: &RumorGraph<'_>, order: &[u32]) -> Result<f64> {
    let degrees = order.iter().map(|&u| rg.host_degree(u as usize));
    Ok(log_of(&boundary_recursion(degrees, order.len())?))
}

fn exact_bfs_score(rg: &RumorGraph<'_>, v: usize, seed: u64) -> BigRational {
    let (order, parent) = sampled_bfs(rg.csr(), v, seed);
    let n = order.len() as u64;
    let r = crate::centrality::factorial(n) / product(subtree_sizes(&order, &parent));
    let degrees = order.iter().map(|&u| rg.host_degree(u as usize));
    let seq = boundary_recursion(degrees, order.len()).expect("checked in log pass");
    BigRational::new(r.into(), product(seq).into())
}

/// BFS heuristic on an infected tree: rumor centrality times the
/// probability of the BFS order from each candidate, with host degrees.
pub fn estimate_general_tree(rg: &RumorGraph<'_>, seed: u64) -> Result<EstimateResult> {
    rg.require_tree()?;
    let scores = bfs_weighted_scores(rg, seed)?;
    Ok(EstimateResult::pick(Estimator::BfsHeuristic, scores, seed))
}

/// Scoring used on infected graphs with cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeneralVariant {
    /// BFS-order probability times BFS-tree rumor centrality.
    #[default]
    Heuristic,
    /// BFS-tree rumor centrality alone.
    Unbiased,
}

/// Estimator for arbitrary connected infected subgraphs: every candidate is
/// scored on its own BFS tree.
pub fn estimate_general_graph(
    rg: &RumorGraph<'_>,
    variant: GeneralVariant,
    seed: u64,
) -> Result<EstimateResult> {
    match variant {
        GeneralVariant::Heuristic => Ok(EstimateResult::pick(
            Estimator::BfsHeuristic,
            bfs_weighted_scores(rg, seed)?,
            seed,
        )),
        GeneralVariant::Unbiased => Ok(EstimateResult::pick(
            Estimator::RumorCentrality,
            bfs_rumor_centrality_all(rg, ScoreMode::Log, seed)?,
            seed,
        )),
    }
}

/// Distance-center estimator; the score is minus the distance sum.
pub fn estimate_distance(rg: &RumorGraph<'_>, seed: u64) -> Result<EstimateResult> {
    let d = distance_centrality(rg);
    let min = *d.iter().min().ok_or(Error::Empty)?;
    let argmax = (0..d.len()).filter(|&k| d[k] == min).map(|k| rg.node(k)).collect();
    let logs = d.iter().map(|&x| -(x as f64)).collect();
    let scores = CentralityScores::new(rg.nodes().collect(), logs, None, argmax);
    Ok(EstimateResult::pick(Estimator::Distance, scores, seed))
}

/// Uniformly random infected node.
pub fn random_guess(rg: &RumorGraph<'_>, seed: u64) -> NodeId {
    rg.node(seeded(seed).random_range(0..rg.len()))
}

fn estimate_random(rg: &RumorGraph<'_>, seed: u64) -> EstimateResult {
    let nodes: Vec<NodeId> = rg.nodes().collect();
    let scores = CentralityScores::new(nodes.clone(), vec![0.0; nodes.len()], None, nodes);
    let estimate = random_guess(rg, seed);
    debug_assert_eq!(estimate, choose(scores.argmax_set(), seed));
    EstimateResult {
        estimator: Estimator::Random,
        scores,
        estimate,
        seed_used: seed,
    }
}

/// `P(G_N | v)` as a log and as an exact fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct Likelihood {
    pub log: f64,
    pub exact: BigRational,
}

/// Likelihood of the infected tree given source `v`: the sum of
/// [`permutation_probability`] over every permitted order starting at `v`.
/// This is the true likelihood when the host is a tree.
pub fn exact_likelihood(rg: &RumorGraph<'_>, v: NodeId, cap: usize) -> Result<Likelihood> {
    rg.require_tree()?;
    let host = rg.host();
    // permutations grouped by the denominator of their probability
    let mut small: BTreeMap<u128, u64> = BTreeMap::new();
    let mut large: BTreeMap<BigUint, u64> = BTreeMap::new();
    let mut failure = None;
    for_each_permitted_permutation(rg, v, cap, |sigma| {
        if failure.is_some() {
            return;
        }
        match permutation_probability(host, sigma) {
            Ok(p) => {
                let den = p
                    .boundary_sequence
                    .iter()
                    .try_fold(1u128, |acc, &x| acc.checked_mul(x as u128));
                match den {
                    Some(d) => *small.entry(d).or_insert(0) += 1,
                    None => *large.entry(product(p.boundary_sequence)).or_insert(0) += 1,
                }
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut sum = BigRational::zero();
    for (d, c) in small {
        sum += BigRational::new(BigInt::from(c), BigInt::from(d));
    }
    for (d, c) in large {
        sum += BigRational::new(BigInt::from(c), d.into());
    }
    let log = ln_biguint(&sum.numer().magnitude().clone()) - ln_biguint(sum.denom().magnitude());
    Ok(Likelihood { log, exact: sum })
}

/// Maximum-likelihood estimate by enumeration.
pub fn estimate_exact_likelihood(
    rg: &RumorGraph<'_>,
    cap: usize,
    seed: u64,
) -> Result<EstimateResult> {
    let mut logs = Vec::with_capacity(rg.len());
    let mut exact = Vec::with_capacity(rg.len());
    for v in rg.nodes() {
        let l = exact_likelihood(rg, v, cap)?;
        logs.push(l.log);
        exact.push(l.exact);
    }
    let max = exact.iter().max().expect("non-empty");
    let argmax = (0..exact.len())
        .filter(|&k| &exact[k] == max)
        .map(|k| rg.node(k))
        .collect();
    let scores = CentralityScores::new(rg.nodes().collect(), logs, None, argmax);
    Ok(EstimateResult::pick(Estimator::ExactLikelihood, scores, seed))
}

/// Runs `kind` with its default settings. The rumor-centrality and BFS
/// estimators switch to their BFS-tree forms when the infected subgraph has
/// cycles.
pub fn estimate(kind: Estimator, rg: &RumorGraph<'_>, seed: u64) -> Result<EstimateResult> {
    match kind {
        Estimator::RumorCentrality if rg.is_tree() => estimate_regular_tree(rg, seed),
        Estimator::RumorCentrality => estimate_general_graph(rg, GeneralVariant::Unbiased, seed),
        Estimator::BfsHeuristic if rg.is_tree() => estimate_general_tree(rg, seed),
        Estimator::BfsHeuristic => estimate_general_graph(rg, GeneralVariant::Heuristic, seed),
        Estimator::Distance => estimate_distance(rg, seed),
        Estimator::Random => Ok(estimate_random(rg, seed)),
        Estimator::ExactLikelihood => estimate_exact_likelihood(rg, DEFAULT_ENUMERATION_CAP, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{line_graph, regular_tree};

    fn host(edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(edges.iter().map(|&(a, b)| (NodeId(a), NodeId(b)))).unwrap()
    }

    fn ids(v: &[u64]) -> Vec<NodeId> {
        v.iter().map(|&x| NodeId(x)).collect()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Hub 1 with leaves 2..5, each leaf with an uninfected pendant 12..15.
    fn pendant_star() -> Graph {
        host(&[(1, 2), (1, 3), (1, 4), (1, 5), (2, 12), (3, 13), (4, 14), (5, 15)])
    }

    #[test]
    fn permutation_probability_examples() {
        let g = pendant_star();
        let p = permutation_probability(&g, &ids(&[1, 2, 3, 4, 5])).unwrap();
        assert_eq!(p.boundary_sequence, [4, 4, 4, 4]);
        assert_eq!(p.exact(), ratio(1, 256));
        let p = permutation_probability(&g, &ids(&[2, 1, 3, 4, 5])).unwrap();
        assert_eq!(p.exact(), ratio(1, 2 * 64));
        assert!((p.log_p - libm::log(1.0 / 128.0)).abs() < 1e-12);
        assert!(matches!(
            permutation_probability(&g, &ids(&[2, 3])),
            Err(Error::NotPermitted { .. })
        ));
    }

    #[test]
    fn empty_boundary_is_an_error() {
        let g = line_graph(2).unwrap();
        assert_eq!(
            permutation_probability(&g, &ids(&[0, 1])).unwrap().boundary_sequence,
            [1]
        );
        let g = line_graph(3).unwrap();
        // 0 then 1: boundary 1, then 1 + 2 - 2 = 1
        permutation_probability(&g, &ids(&[0, 1, 2])).unwrap();
        let g = host(&[(0, 1), (1, 2), (2, 0)]);
        // recursion ignores the closed cycle edge but stays positive here
        assert_eq!(
            permutation_probability(&g, &ids(&[0, 1, 2])).unwrap().boundary_sequence,
            [2, 2]
        );
    }

    #[test]
    fn heuristic_on_pendant_star() {
        let g = pendant_star();
        let rg = RumorGraph::new(&g, ids(&[1, 2, 3, 4, 5])).unwrap();
        let r = estimate_general_tree(&rg, 0).unwrap();
        assert_eq!(r.estimate, NodeId(1));
        let s1 = r.scores.log_score(NodeId(1)).unwrap();
        let s2 = r.scores.log_score(NodeId(2)).unwrap();
        assert!((s1 - libm::log(6.0 / 64.0)).abs() < 1e-12);
        assert!((s2 - libm::log(3.0 / 64.0)).abs() < 1e-12);
        for (v, want) in [(1, ratio(6, 64)), (2, ratio(3, 64))] {
            let l = exact_likelihood(&rg, NodeId(v), 10).unwrap();
            assert_eq!(l.exact, want);
            assert_eq!(exact_bfs_score(&rg, rg.local_index(NodeId(v)).unwrap(), 0), want);
        }
    }

    #[test]
    fn regular_tree_estimator_examples() {
        let g = host(&[(1, 2), (1, 3), (2, 4), (2, 5)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        assert_eq!(estimate_regular_tree(&rg, 0).unwrap().estimate, NodeId(2));

        let g = line_graph(5).unwrap();
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        assert_eq!(estimate_regular_tree(&rg, 0).unwrap().estimate, NodeId(2));

        let g = regular_tree(3, 3).unwrap();
        let rg = RumorGraph::new(&g, ids(&[0, 1])).unwrap();
        let picks: Vec<NodeId> = (0..2000)
            .map(|s| estimate_regular_tree(&rg, s).unwrap().estimate)
            .collect();
        let zeros = picks.iter().filter(|&&v| v == NodeId(0)).count();
        assert!((zeros as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn regular_host_likelihood_is_proportional_to_centrality() {
        let g = regular_tree(3, 3).unwrap();
        let rg = RumorGraph::new(&g, ids(&[0, 1, 2, 4, 5, 6])).unwrap();
        let r = crate::centrality::rumor_centrality_all(&rg, ScoreMode::Exact).unwrap();
        // p(3, 6) = 1 / (3 * 4 * 5 * 6 * 7)
        let p = ratio(1, 3 * 4 * 5 * 6 * 7);
        for v in rg.nodes() {
            let want = BigRational::from_integer(r.exact_score(v).unwrap().clone().into()) * &p;
            assert_eq!(exact_likelihood(&rg, v, 10).unwrap().exact, want);
        }
        let a = estimate_exact_likelihood(&rg, 10, 0).unwrap();
        assert_eq!(a.argmax_set(), r.argmax_set());
    }

    #[test]
    fn four_regular_bfs_factor() {
        // 4-regular torus, infected plus-shaped set
        let side = 6u64;
        let at = |x: u64, y: u64| (x % side) * side + (y % side);
        let mut edges = Vec::new();
        for x in 0..side {
            for y in 0..side {
                edges.push((at(x, y), at(x + 1, y)));
                edges.push((at(x, y), at(x, y + 1)));
            }
        }
        let g = host(&edges);
        let set = [at(2, 2), at(1, 2), at(3, 2), at(2, 1), at(2, 3)];
        let rg = RumorGraph::new(&g, ids(&set)).unwrap();
        for v in 0..rg.len() {
            let (order, _) = sampled_bfs(rg.csr(), v, 0);
            let seq = boundary_recursion(order.iter().map(|&u| rg.host_degree(u as usize)), 5).unwrap();
            assert_eq!(seq, [4, 6, 8, 10]);
        }
        let h = estimate_general_graph(&rg, GeneralVariant::Heuristic, 0).unwrap();
        let u = estimate_general_graph(&rg, GeneralVariant::Unbiased, 0).unwrap();
        assert_eq!(h.argmax_set(), &[NodeId(at(2, 2))]);
        assert_eq!(h.argmax_set(), u.argmax_set());
    }

    #[test]
    fn symmetric_cycle_ties() {
        let g = host(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        for variant in [GeneralVariant::Heuristic, GeneralVariant::Unbiased] {
            let r = estimate_general_graph(&rg, variant, 3).unwrap();
            assert_eq!(r.argmax_set().len(), 6);
            assert!(r.argmax_set().contains(&r.estimate));
        }
    }

    #[test]
    fn tree_input_matches_general_graph_path() {
        let g = host(&[(1, 2), (1, 3), (2, 4), (2, 5), (5, 6), (5, 7), (3, 8)]);
        let rg = RumorGraph::new(&g, ids(&[1, 2, 3, 4, 5, 6])).unwrap();
        let a = estimate_general_tree(&rg, 9).unwrap();
        let b = estimate_general_graph(&rg, GeneralVariant::Heuristic, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distance_and_random() {
        let g = line_graph(5).unwrap();
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        let d = estimate_distance(&rg, 0).unwrap();
        assert_eq!(d.estimate, NodeId(2));
        assert_eq!(d.scores.log_score(NodeId(0)), Some(-10.0));
        let single = RumorGraph::new(&g, [NodeId(3)]).unwrap();
        assert_eq!(random_guess(&single, 77), NodeId(3));
        assert_eq!(random_guess(&rg, 5), random_guess(&rg, 5));
        let r = estimate(Estimator::Random, &rg, 5).unwrap();
        assert_eq!(r.estimate, random_guess(&rg, 5));
    }

    #[test]
    fn names_round_trip() {
        for e in Estimator::ALL {
            assert_eq!(Estimator::from_name(e.name()), Some(e));
        }
        assert_eq!(Estimator::from_name("nope"), None);
    }

    #[test]
    fn exact_oracle_rejects_large_trees() {
        let g = line_graph(12).unwrap();
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        assert!(matches!(
            estimate(Estimator::ExactLikelihood, &rg, 0),
            Err(Error::CapExceeded { .. })
        ));
    }
}
