//! Rumor centrality and distance centrality.
//!
//! For a tree of `N` infected nodes, the rumor centrality of `v` is
//! `N! / prod_u T_u^v`, where `T_u^v` is the size of the subtree below `u`
//! when the tree hangs from `v`. It counts the infection orders that start
//! at `v`. All nodes are scored in linear time by passing subtree sizes up
//! towards an arbitrary root and the ratio `T / (N - T)` back down.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::graph::{layered_bfs, sampled_bfs, NodeId, RootedTree, RumorGraph};

/// Default limit on the number of nodes for brute-force enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 10;

/// Largest tree for which rankings are double-checked with exact integers.
pub const EXACT_TIE_LIMIT: usize = 64;

/// Relative tolerance for ties between log-domain scores.
pub const LOG_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreMode {
    /// Natural logarithms only.
    #[default]
    Log,
    /// Natural logarithms plus exact integers.
    Exact,
}

/// Per-node scores over the infected nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    nodes: Vec<NodeId>,
    log_score: Vec<f64>,
    exact: Option<Vec<BigUint>>,
    argmax: Vec<NodeId>,
}

impl CentralityScores {
    pub(crate) fn new(
        nodes: Vec<NodeId>,
        log_score: Vec<f64>,
        exact: Option<Vec<BigUint>>,
        argmax: Vec<NodeId>,
    ) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        CentralityScores {
            nodes,
            log_score,
            exact,
            argmax,
        }
    }

    /// Scored nodes, ascending.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn at(&self, v: NodeId) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    pub fn log_score(&self, v: NodeId) -> Option<f64> {
        self.at(v).map(|k| self.log_score[k])
    }

    /// Log scores aligned with [`nodes`](Self::nodes).
    pub fn log_scores(&self) -> &[f64] {
        &self.log_score
    }

    pub fn exact_score(&self, v: NodeId) -> Option<&BigUint> {
        let k = self.at(v)?;
        self.exact.as_ref().map(|e| &e[k])
    }

    pub fn exact_scores(&self) -> Option<&[BigUint]> {
        self.exact.as_deref()
    }

    /// All nodes attaining the maximum, ascending.
    pub fn argmax_set(&self) -> &[NodeId] {
        &self.argmax
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.nodes.iter().copied().zip(self.log_score.iter().copied())
    }
}

/// `n!` as an exact integer.
pub fn factorial(n: u64) -> BigUint {
    product(1..=n)
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Product of small integers, batched through `u128`.
pub(crate) fn product<I: IntoIterator<Item = u64>>(xs: I) -> BigUint {
    let mut acc = BigUint::one();
    let mut chunk: u128 = 1;
    for x in xs {
        match chunk.checked_mul(x as u128) {
            Some(c) => chunk = c,
            None => {
                acc *= BigUint::from(chunk);
                chunk = x as u128;
            }
        }
    }
    acc * BigUint::from(chunk)
}

/// Natural log of a positive big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return libm::log(x.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    libm::log(top) + shift as f64 * core::f64::consts::LN_2
}

/// Indices whose score is within the log tie tolerance of the maximum.
pub(crate) fn log_argmax(scores: &[f64]) -> Vec<usize> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = LOG_TIE_TOLERANCE * max.abs().max(1.0);
    (0..scores.len()).filter(|&k| max - scores[k] <= tol).collect()
}

/// Queue BFS over a tree. Returns the visit order (local indices), the
/// position of each local index in it, and each position's parent position.
/// Children always sit after their parent, and parent positions are
/// non-decreasing along the order, so passes over positions stream.
fn tree_bfs(rg: &RumorGraph<'_>, root: usize) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let adj = rg.csr();
    let n = rg.len();
    let mut order = Vec::with_capacity(n);
    let mut pos = vec![u32::MAX; n];
    let mut parent = Vec::with_capacity(n);
    order.push(root as u32);
    pos[root] = 0;
    parent.push(0);
    let mut k = 0;
    while k < order.len() {
        for &w in adj.neighbors(order[k] as usize) {
            if pos[w as usize] == u32::MAX {
                pos[w as usize] = order.len() as u32;
                order.push(w);
                parent.push(k as u32);
            }
        }
        k += 1;
    }
    (order, pos, parent)
}

/// Upward and downward messages over a tree rooted at its lowest id.
///
/// Per-node arrays are indexed by BFS position, not by local index.
#[derive(Debug, Clone)]
pub struct MessageState {
    nodes: Vec<NodeId>,
    /// Local index at each position.
    order: Vec<u32>,
    /// Position of each local index.
    pos: Vec<u32>,
    parent: Vec<u32>,
    /// Subtree size below each node, `N` at the root.
    t_up: Vec<u64>,
    /// `ln` of the upward product `t_up * prod_children p_up`.
    log_p_up: Vec<f64>,
    /// `ln R(u) - ln R(root)`.
    rel: Vec<f64>,
    log_root: f64,
}

impl MessageState {
    pub fn run(rg: &RumorGraph<'_>) -> Result<Self> {
        rg.require_tree()?;
        let n = rg.len();
        let (order, pos, parent) = tree_bfs(rg, 0);
        let mut t_up = vec![1u64; n];
        // children's sums first, then the node's own ln t on top
        let mut log_p_up = vec![0.0f64; n];
        // holds ln t_up until the downward pass replaces it
        let mut rel = vec![0.0f64; n];
        for k in (1..n).rev() {
            let p = parent[k] as usize;
            rel[k] = libm::log(t_up[k] as f64);
            log_p_up[k] += rel[k];
            t_up[p] += t_up[k];
            log_p_up[p] += log_p_up[k];
        }
        let nf = n as f64;
        log_p_up[0] += libm::log(nf);
        let log_root = ln_factorial(n as u64) - log_p_up[0];
        rel[0] = 0.0;
        for k in 1..n {
            let t = t_up[k] as f64;
            rel[k] += rel[parent[k] as usize] - libm::log(nf - t);
        }
        Ok(MessageState {
            nodes: rg.nodes().collect(),
            order,
            pos,
            parent,
            t_up,
            log_p_up,
            rel,
            log_root,
        })
    }

    pub fn root(&self) -> NodeId {
        self.nodes[self.order[0] as usize]
    }

    fn position(&self, v: NodeId) -> Option<usize> {
        let u = self.nodes.binary_search(&v).ok()?;
        Some(self.pos[u] as usize)
    }

    /// Upward message `(t, ln p)` sent by `v` to its parent.
    pub fn up_message(&self, v: NodeId) -> Option<(u64, f64)> {
        let k = self.position(v)?;
        Some((self.t_up[k], self.log_p_up[k]))
    }

    pub fn log_rumor_centrality(&self, v: NodeId) -> Option<f64> {
        self.position(v).map(|k| self.log_root + self.rel[k])
    }

    /// `ln R` for every node, by local index.
    fn log_scores(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.order.len()];
        for (k, &u) in self.order.iter().enumerate() {
            out[u as usize] = self.log_root + self.rel[k];
        }
        out
    }

    /// Local indices, ascending, of the nodes whose every branch holds at
    /// most half of the tree.
    fn balanced_nodes(&self) -> Vec<usize> {
        let n = self.order.len() as u64;
        let mut heaviest = vec![0u64; self.order.len()];
        for k in 1..self.order.len() {
            let p = self.parent[k] as usize;
            heaviest[p] = heaviest[p].max(self.t_up[k]);
            heaviest[k] = heaviest[k].max(n - self.t_up[k]);
        }
        self.local_sorted((0..heaviest.len()).filter(|&k| 2 * heaviest[k] <= n))
    }

    fn local_sorted(&self, positions: impl Iterator<Item = usize>) -> Vec<usize> {
        let mut out: Vec<usize> = positions.map(|k| self.order[k] as usize).collect();
        out.sort_unstable();
        out
    }

    /// Exact `R` for every node, by local index.
    fn exact_scores(&self) -> Vec<BigUint> {
        let n = self.order.len();
        let mut by_pos = vec![BigUint::one(); n];
        by_pos[0] = factorial(n as u64) / product(self.t_up.iter().copied());
        for k in 1..n {
            let t = self.t_up[k];
            by_pos[k] = &by_pos[self.parent[k] as usize] * t / (n as u64 - t);
        }
        let mut out = vec![BigUint::one(); n];
        for (k, r) in by_pos.into_iter().enumerate() {
            out[self.order[k] as usize] = r;
        }
        out
    }
}

/// Rumor centrality of every infected node of a tree.
///
/// The argmax set is exact in both modes: it is the set of nodes that split
/// the tree into branches of at most `N / 2` nodes.
pub fn rumor_centrality_all(rg: &RumorGraph<'_>, mode: ScoreMode) -> Result<CentralityScores> {
    let st = MessageState::run(rg)?;
    let log_score = st.log_scores();
    let argmax: Vec<NodeId> = st.balanced_nodes().iter().map(|&u| st.nodes[u]).collect();
    let exact = match mode {
        ScoreMode::Log => None,
        ScoreMode::Exact => {
            let e = st.exact_scores();
            debug_assert_eq!(exact_argmax(&e), st.balanced_nodes());
            Some(e)
        }
    };
    Ok(CentralityScores::new(st.nodes, log_score, exact, argmax))
}

fn exact_argmax(xs: &[BigUint]) -> Vec<usize> {
    let max = xs.iter().max().expect("non-empty");
    (0..xs.len()).filter(|&k| &xs[k] == max).collect()
}

/// `R(v)` from the definition: `N!` over the product of subtree sizes of
/// the tree hanging from `v`.
pub fn rumor_centrality_exact(rg: &RumorGraph<'_>, v: NodeId) -> Result<BigUint> {
    rg.require_tree()?;
    let r = rg.local_index(v).ok_or(Error::NotInfected(v))?;
    let sizes = subtree_sizes_from(rg, r);
    Ok(factorial(rg.len() as u64) / product(sizes))
}

fn subtree_sizes_from(rg: &RumorGraph<'_>, r: usize) -> Vec<u64> {
    let (order, parent, _) = layered_bfs(rg.csr(), r);
    let mut size = vec![1u64; rg.len()];
    for &u in order[1..].iter().rev() {
        size[parent[u as usize] as usize] += size[u as usize];
    }
    size
}

fn sampled_subtree_sizes(rg: &RumorGraph<'_>, r: usize, seed: u64) -> Vec<u64> {
    let (order, parent) = sampled_bfs(rg.csr(), r, seed);
    let mut size = vec![1u64; rg.len()];
    for &u in order[1..].iter().rev() {
        size[parent[u as usize] as usize] += size[u as usize];
    }
    size
}

/// Rumor center of a tree, at most two nodes.
///
/// Computed as the set of nodes whose branches all hold at most half the
/// tree, and checked against the maximizers of the scores.
pub fn rumor_center(rg: &RumorGraph<'_>) -> Result<Vec<NodeId>> {
    let st = MessageState::run(rg)?;
    let balanced = st.balanced_nodes();
    let by_score = if rg.len() <= EXACT_TIE_LIMIT {
        exact_argmax(&st.exact_scores())
    } else {
        // differences from the root are path sums of small terms, so an
        // absolute tolerance is meaningful here
        let max = st.rel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        st.local_sorted((0..st.rel.len()).filter(|&k| max - st.rel[k] <= 1e-9))
    };
    assert_eq!(balanced, by_score, "rumor center characterizations disagree");
    assert!(balanced.len() <= 2);
    Ok(balanced.into_iter().map(|u| st.nodes[u]).collect())
}

/// Distinct infection orders starting at the root of `tree`:
/// `N! / prod_u T_u`.
pub fn count_linear_extensions(tree: &RootedTree) -> BigUint {
    factorial(tree.len() as u64) / product(tree.subtree_sizes_in_order().iter().copied())
}

/// Calls `f` on every permitted infection order of the infected subgraph
/// that starts at `v` (every node after the first has an earlier
/// neighbor). Orders are produced lexicographically by id. Returns the
/// count. Refuses graphs larger than `cap` nodes.
pub fn for_each_permitted_permutation<F>(
    rg: &RumorGraph<'_>,
    v: NodeId,
    cap: usize,
    mut f: F,
) -> Result<u64>
where
    F: FnMut(&[NodeId]),
{
    if rg.len() > cap {
        return Err(Error::CapExceeded {
            nodes: rg.len(),
            cap,
        });
    }
    let r = rg.local_index(v).ok_or(Error::NotInfected(v))?;
    let mut e = Enumerator {
        rg,
        listed: vec![false; rg.len()],
        reach: vec![0u32; rg.len()],
        seq: Vec::with_capacity(rg.len()),
        ids: Vec::with_capacity(rg.len()),
        count: 0,
    };
    e.push(r);
    e.recurse(&mut f);
    Ok(e.count)
}

struct Enumerator<'a, 'g> {
    rg: &'a RumorGraph<'g>,
    listed: Vec<bool>,
    /// Number of listed neighbors.
    reach: Vec<u32>,
    seq: Vec<usize>,
    ids: Vec<NodeId>,
    count: u64,
}

impl Enumerator<'_, '_> {
    fn push(&mut self, u: usize) {
        self.listed[u] = true;
        self.seq.push(u);
        self.ids.push(self.rg.node(u));
        for &w in self.rg.csr().neighbors(u) {
            self.reach[w as usize] += 1;
        }
    }

    fn pop(&mut self) {
        let u = self.seq.pop().expect("non-empty");
        self.ids.pop();
        self.listed[u] = false;
        for &w in self.rg.csr().neighbors(u) {
            self.reach[w as usize] -= 1;
        }
    }

    fn recurse<F: FnMut(&[NodeId])>(&mut self, f: &mut F) {
        if self.seq.len() == self.listed.len() {
            self.count += 1;
            f(&self.ids);
            return;
        }
        for u in 0..self.listed.len() {
            if !self.listed[u] && self.reach[u] > 0 {
                self.push(u);
                self.recurse(f);
                self.pop();
            }
        }
    }
}

pub fn enumerate_permitted_permutations(
    rg: &RumorGraph<'_>,
    v: NodeId,
    cap: usize,
) -> Result<Vec<Vec<NodeId>>> {
    let mut out = Vec::new();
    for_each_permitted_permutation(rg, v, cap, |s| out.push(s.to_vec()))?;
    Ok(out)
}

/// Sum of hop distances from each infected node to all others, inside the
/// infected subgraph. Aligned with `rg.nodes()`.
pub fn distance_centrality(rg: &RumorGraph<'_>) -> Vec<u64> {
    let n = rg.len();
    if rg.is_tree() {
        // D(child) = D(parent) + N - 2 T_child
        let (order, parent, dist) = layered_bfs(rg.csr(), 0);
        let sizes = {
            let mut s = vec![1u64; n];
            for &u in order[1..].iter().rev() {
                s[parent[u as usize] as usize] += s[u as usize];
            }
            s
        };
        let mut d = vec![0u64; n];
        d[0] = dist.iter().map(|&x| x as u64).sum();
        for &u in &order[1..] {
            let u = u as usize;
            d[u] = d[parent[u] as usize] + n as u64 - 2 * sizes[u];
        }
        d
    } else {
        (0..n)
            .map(|v| layered_bfs(rg.csr(), v).2.iter().map(|&x| x as u64).sum())
            .collect()
    }
}

/// Distance centrality keyed by node, inside the subgraph induced by
/// `infected`.
pub fn distance_centrality_all(rg: &RumorGraph<'_>) -> BTreeMap<NodeId, u64> {
    rg.nodes().zip(distance_centrality(rg)).collect()
}

/// Nodes minimizing distance centrality, ascending.
pub fn distance_center(rg: &RumorGraph<'_>) -> Vec<NodeId> {
    let d = distance_centrality(rg);
    let min = *d.iter().min().expect("rumor graphs are non-empty");
    (0..d.len()).filter(|&k| d[k] == min).map(|k| rg.node(k)).collect()
}

/// Rumor centrality of each node measured on its own BFS tree of the
/// infected subgraph. On trees this equals [`rumor_centrality_all`].
/// Where a node has several neighbors one layer closer to the root, its
/// parent is drawn uniformly among them from a stream fixed by `seed`.
///
/// Near-ties in the log domain are re-ranked with exact integers when the
/// graph has at most [`EXACT_TIE_LIMIT`] nodes.
pub fn bfs_rumor_centrality_all(
    rg: &RumorGraph<'_>,
    mode: ScoreMode,
    seed: u64,
) -> Result<CentralityScores> {
    let n = rg.len();
    let lnf = ln_factorial(n as u64);
    let mut logs = Vec::with_capacity(n);
    let mut sizes_of = Vec::with_capacity(if mode == ScoreMode::Exact { n } else { 0 });
    for v in 0..n {
        let sizes = sampled_subtree_sizes(rg, v, seed);
        logs.push(lnf - sizes.iter().map(|&s| libm::log(s as f64)).sum::<f64>());
        if mode == ScoreMode::Exact {
            sizes_of.push(sizes);
        }
    }
    let exact: Option<Vec<BigUint>> = (mode == ScoreMode::Exact).then(|| {
        let nf = factorial(n as u64);
        sizes_of
            .iter()
            .map(|s| &nf / product(s.iter().copied()))
            .collect()
    });
    let mut top = log_argmax(&logs);
    if top.len() > 1 && n <= EXACT_TIE_LIMIT {
        let vals: Vec<BigUint> = match &exact {
            Some(e) => top.iter().map(|&k| e[k].clone()).collect(),
            None => top
                .iter()
                .map(|&k| factorial(n as u64) / product(sampled_subtree_sizes(rg, k, seed)))
                .collect(),
        };
        let best = exact_argmax(&vals);
        top = best.into_iter().map(|i| top[i]).collect();
    }
    let argmax = top.into_iter().map(|k| rg.node(k)).collect();
    Ok(CentralityScores::new(rg.nodes().collect(), logs, exact, argmax))
}

/// Maximizers of [`bfs_rumor_centrality_all`].
pub fn rumor_center_general(rg: &RumorGraph<'_>, seed: u64) -> Result<Vec<NodeId>> {
    Ok(bfs_rumor_centrality_all(rg, ScoreMode::Log, seed)?.argmax_set().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_tree, Graph};

    fn host(edges: &[(u64, u64)]) -> Graph {
        Graph::from_edges(edges.iter().map(|&(a, b)| (NodeId(a), NodeId(b)))).unwrap()
    }

    fn all(rg: &RumorGraph<'_>) -> CentralityScores {
        rumor_centrality_all(rg, ScoreMode::Exact).unwrap()
    }

    fn ex(s: &CentralityScores, v: u64) -> u64 {
        s.exact_score(NodeId(v)).unwrap().to_u64().unwrap()
    }

    #[test]
    fn five_node_tree_scores() {
        let g = host(&[(1, 2), (1, 3), (2, 4), (2, 5)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        let s = all(&rg);
        let got: Vec<u64> = (1..=5).map(|v| ex(&s, v)).collect();
        assert_eq!(got, [8, 12, 2, 3, 3]);
        assert_eq!(s.argmax_set(), &[NodeId(2)]);
        assert_eq!(rumor_center(&rg).unwrap(), [NodeId(2)]);
        assert_eq!(distance_center(&rg), [NodeId(2)]);
        assert_eq!(
            enumerate_permitted_permutations(&rg, NodeId(1), 10).unwrap().len(),
            8
        );
        for v in 1..=5 {
            let r = rumor_centrality_exact(&rg, NodeId(v)).unwrap();
            assert_eq!(r.to_u64().unwrap(), got[v as usize - 1]);
            let l = s.log_score(NodeId(v)).unwrap();
            assert!((l - libm::log(got[v as usize - 1] as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn paths_and_stars() {
        let g = host(&[(0, 1), (1, 2)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        let s = all(&rg);
        assert_eq!((ex(&s, 0), ex(&s, 1), ex(&s, 2)), (1, 2, 1));
        assert_eq!(s.argmax_set(), &[NodeId(1)]);

        let g = host(&[(0, 1), (1, 2), (2, 3)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        let s = all(&rg);
        assert_eq!((ex(&s, 1), ex(&s, 2)), (3, 3));
        assert_eq!(s.argmax_set(), &[NodeId(1), NodeId(2)]);

        let g = host(&[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        let s = all(&rg);
        assert_eq!((ex(&s, 0), ex(&s, 1)), (24, 6));

        let g = host(&[(0, 1)]);
        let rg = RumorGraph::new(&g, [NodeId(0)]).unwrap();
        let s = all(&rg);
        assert_eq!(ex(&s, 0), 1);
        assert_eq!(s.log_score(NodeId(0)), Some(0.0));
    }

    #[test]
    fn cycles_are_rejected_by_tree_routines() {
        let g = host(&[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        assert!(matches!(
            rumor_centrality_all(&rg, ScoreMode::Log),
            Err(Error::NotATree { .. })
        ));
        assert!(rumor_center(&rg).is_err());
        let s = bfs_rumor_centrality_all(&rg, ScoreMode::Exact, 0).unwrap();
        assert_eq!(s.argmax_set().len(), 4);
        assert_eq!(distance_centrality(&rg), [4, 4, 4, 4]);
        assert_eq!(
            enumerate_permitted_permutations(&rg, NodeId(0), 10).unwrap().len(),
            4
        );
    }

    #[test]
    fn enumeration_cap() {
        let g = crate::generators::line_graph(12).unwrap();
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        assert_eq!(
            enumerate_permitted_permutations(&rg, NodeId(0), DEFAULT_ENUMERATION_CAP).unwrap_err(),
            Error::CapExceeded { nodes: 12, cap: 10 }
        );
        let orders = enumerate_permitted_permutations(&rg, NodeId(5), 12).unwrap();
        // choose which 5 of the 11 later steps go left
        assert_eq!(orders.len(), 462);
        assert!(orders.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn linear_extensions_match_enumeration() {
        let g = host(&[(1, 2), (1, 3), (2, 4), (2, 5), (3, 6)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        for v in 1..=6 {
            let t = bfs_tree(&rg, NodeId(v)).unwrap();
            let n = enumerate_permitted_permutations(&rg, NodeId(v), 10).unwrap().len();
            assert_eq!(count_linear_extensions(&t).to_u64(), Some(n as u64));
        }
    }

    #[test]
    fn big_integer_helpers() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(20).to_u64(), Some(2_432_902_008_176_640_000));
        let big = factorial(500);
        assert!((ln_biguint(&big) - ln_factorial(500)).abs() < 1e-9 * ln_factorial(500));
        assert!((ln_biguint(&factorial(30)) - ln_factorial(30)).abs() < 1e-9);
        assert_eq!(product([u64::MAX, u64::MAX, 3]), BigUint::from(u64::MAX).pow(2) * 3u32);
    }

    #[test]
    fn message_state_upward_sizes() {
        let g = host(&[(1, 2), (1, 3), (2, 4), (2, 5)]);
        let rg = RumorGraph::new(&g, g.nodes().iter().copied()).unwrap();
        let st = MessageState::run(&rg).unwrap();
        assert_eq!(st.root(), NodeId(1));
        assert_eq!(st.up_message(NodeId(2)).unwrap().0, 3);
        assert!((st.up_message(NodeId(2)).unwrap().1 - libm::log(3.0)).abs() < 1e-12);
        assert_eq!(st.up_message(NodeId(1)).unwrap().0, 5);
        assert!((st.log_rumor_centrality(NodeId(2)).unwrap() - libm::log(12.0)).abs() < 1e-12);
    }
}
