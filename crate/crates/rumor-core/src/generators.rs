//! Host graph families: lines, regular trees, geometric trees, small-world
//! and scale-free graphs.
//!
//! Generated graphs use dense ids `0..n`. Stochastic generators are pure
//! functions of their parameters and seed.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::seeded;

/// Upper bound on generated node counts.
pub const MAX_GENERATED_NODES: usize = 50_000_000;

/// Path `0 - 1 - ... - (n-1)`.
pub fn line_graph(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("line graph needs n >= 1".into()));
    }
    let lists = (0..n)
        .map(|i| {
            let mut l = Vec::with_capacity(2);
            if i > 0 {
                l.push(i as u32 - 1);
            }
            if i + 1 < n {
                l.push(i as u32 + 1);
            }
            l
        })
        .collect();
    Ok(Graph::from_index_lists(lists))
}

/// Number of nodes in the radius-`depth` ball of the infinite `d`-regular tree.
pub fn regular_tree_size(d: usize, depth: usize) -> Option<usize> {
    let mut total: usize = 1;
    let mut level: usize = 1;
    for r in 0..depth {
        level = level.checked_mul(if r == 0 { d } else { d - 1 })?;
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// Ball of radius `depth` around node 0 in the infinite `d`-regular tree.
///
/// The root has `d` children and every other internal node `d - 1`. Ids are
/// assigned in BFS order, so node 0 is the root and the rim is the last
/// level.
pub fn regular_tree(d: usize, depth: usize) -> Result<Graph> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("regular tree degree {d} < 2")));
    }
    let n = regular_tree_size(d, depth)
        .filter(|&n| n <= MAX_GENERATED_NODES)
        .ok_or_else(|| Error::InvalidParameter(format!("regular tree d={d} depth={depth} is too large")))?;
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut next = 1usize;
    let mut level_start = 0usize;
    let mut level_end = 1usize;
    for r in 0..depth {
        let fan = if r == 0 { d } else { d - 1 };
        for u in level_start..level_end {
            for _ in 0..fan {
                lists[u].push(next as u32);
                lists[next].push(u as u32);
                next += 1;
            }
        }
        level_start = level_end;
        level_end = next;
    }
    debug_assert_eq!(next, n);
    Ok(Graph::from_index_lists(lists))
}

/// Parameters of a tree with polynomially growing level sizes around node 0.
///
/// Each of the `d_star` subtrees of the root has, at distance `r` from the
/// root, between `b * r^alpha` and `c * r^alpha` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricTreeSpec {
    pub alpha: f64,
    pub b: f64,
    pub c: f64,
    pub d_star: usize,
    pub radius: usize,
}

impl GeometricTreeSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("geometric tree: {m}")));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be finite and >= 0");
        }
        if !(self.b > 0.0 && self.b <= self.c && self.c.is_finite()) {
            return bad("need 0 < b <= c");
        }
        if self.d_star < 1 {
            return bad("root degree must be >= 1");
        }
        if self.radius < 1 {
            return bad("radius must be >= 1");
        }
        Ok(())
    }

    /// Whether the root degree and growth satisfy `alpha > 0` and
    /// `d_star > c / b + 1`, the regime where rumor centrality asymptotically
    /// always finds the source.
    pub fn satisfies_detection_condition(&self) -> bool {
        self.alpha > 0.0 && self.d_star >= 3 && (self.d_star as f64) > self.c / self.b + 1.0
    }

    /// Admissible integer node counts at distance `r` within one subtree.
    pub fn level_bounds(&self, r: usize) -> (usize, usize) {
        let scale = libm::pow(r as f64, self.alpha);
        let lo = libm::ceil(self.b * scale - 1e-9).max(1.0) as usize;
        let hi = libm::floor(self.c * scale + 1e-9) as usize;
        (lo, hi)
    }

    /// Smallest radius whose full ball holds at least `n` nodes using the
    /// lower level bound.
    pub fn radius_for(&self, n: usize) -> usize {
        let mut total = 1usize;
        let mut r = 0;
        while total < n {
            r += 1;
            total += self.d_star * self.level_bounds(r).0;
        }
        r
    }
}

/// Tree rooted at node 0 whose root subtrees follow the polynomial level
/// profile of `spec`.
///
/// Each level size is drawn uniformly from the admissible integers and the
/// children are spread across the previous level as evenly as possible
/// (lower ids take the remainder). The result is checked with
/// [`validate_geometric_tree`] before it is returned.
pub fn geometric_tree(spec: &GeometricTreeSpec, seed: u64) -> Result<Graph> {
    spec.validate()?;
    let mut rng = seeded(seed);
    let mut targets = Vec::with_capacity(spec.radius);
    for r in 1..=spec.radius {
        let (lo, hi) = spec.level_bounds(r);
        if lo > hi {
            return Err(Error::Construction(format!(
                "no integer level size in [{}, {}] at r={r}",
                spec.b * libm::pow(r as f64, spec.alpha),
                spec.c * libm::pow(r as f64, spec.alpha)
            )));
        }
        if r == 1 && lo > 1 {
            return Err(Error::Construction(
                "each root subtree starts with exactly one node, but b > 1".into(),
            ));
        }
        targets.push((lo, hi));
    }
    let per_subtree: usize = targets.iter().map(|&(_, hi)| hi).sum();
    if per_subtree.saturating_mul(spec.d_star) > MAX_GENERATED_NODES {
        return Err(Error::Construction("geometric tree too large".into()));
    }

    let mut lists: Vec<Vec<u32>> = vec![Vec::new()];
    let add = |lists: &mut Vec<Vec<u32>>, parent: usize| -> usize {
        let id = lists.len();
        lists.push(vec![parent as u32]);
        lists[parent].push(id as u32);
        id
    };
    for _ in 0..spec.d_star {
        let mut level = vec![add(&mut lists, 0)];
        for &(lo, hi) in &targets[1..] {
            let size = if lo == hi { lo } else { rng.random_range(lo..=hi) };
            let base = size / level.len();
            let extra = size % level.len();
            let mut next = Vec::with_capacity(size);
            for (k, &p) in level.iter().enumerate() {
                for _ in 0..base + usize::from(k < extra) {
                    next.push(add(&mut lists, p));
                }
            }
            level = next;
        }
    }
    let g = Graph::from_index_lists(lists);
    validate_geometric_tree(&g, spec)?;
    Ok(g)
}

/// Checks that `g` is a tree around node 0 with `d_star` root subtrees whose
/// level sizes (distance from node 0) stay within the bounds of `spec` for
/// every `r` up to the radius, and that nothing lies beyond the radius.
pub fn validate_geometric_tree(g: &Graph, spec: &GeometricTreeSpec) -> Result<()> {
    let fail = |m: alloc::string::String| Err(Error::Construction(m));
    let root = g.index_of(NodeId(0)).ok_or(Error::UnknownNode(NodeId(0)))?;
    if g.edge_count() + 1 != g.node_count() || !g.is_connected() {
        return fail("not a tree".into());
    }
    let kids = g.adjacent(root);
    if kids.len() != spec.d_star {
        return fail(format!("root degree {} != {}", kids.len(), spec.d_star));
    }
    // level counts per subtree via BFS restricted away from the root
    let mut seen = vec![false; g.node_count()];
    seen[root] = true;
    for (i, &k) in kids.iter().enumerate() {
        let mut level = vec![k as usize];
        seen[k as usize] = true;
        let mut r = 1;
        while !level.is_empty() {
            if r > spec.radius {
                return fail(format!("subtree {i} extends beyond radius {}", spec.radius));
            }
            let (lo, hi) = spec.level_bounds(r);
            if level.len() < lo || level.len() > hi {
                return fail(format!(
                    "subtree {i} has {} nodes at distance {r}, outside [{lo}, {hi}]",
                    level.len()
                ));
            }
            let mut next = Vec::new();
            for &u in &level {
                for &w in g.adjacent(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        next.push(w as usize);
                    }
                }
            }
            level = next;
            r += 1;
        }
        if r <= spec.radius {
            return fail(format!("subtree {i} stops at distance {}", r - 1));
        }
    }
    Ok(())
}

/// Watts-Strogatz small-world graph.
///
/// Ring lattice where every node links to its `k / 2` successors; each
/// lattice edge `(u, u + j)` is then rewired to `(u, w)` with probability `p`,
/// `w` uniform among nodes that keep the graph simple. Disconnected results
/// are retried with the seed incremented, up to `max_attempts` times.
pub fn small_world(n: usize, k: usize, p: f64, seed: u64) -> Result<Graph> {
    small_world_with_attempts(n, k, p, seed, 64)
}

pub fn small_world_with_attempts(
    n: usize,
    k: usize,
    p: f64,
    seed: u64,
    max_attempts: u32,
) -> Result<Graph> {
    if !(k >= 2 && k.is_multiple_of(2) && n > k) {
        return Err(Error::InvalidParameter(format!(
            "small world needs n > k >= 2 with k even, got n={n} k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("rewiring probability {p} not in [0, 1]")));
    }
    if n > MAX_GENERATED_NODES {
        return Err(Error::InvalidParameter("small world too large".into()));
    }
    for attempt in 0..max_attempts {
        let g = watts_strogatz(n, k, p, seed.wrapping_add(attempt as u64));
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Construction(format!(
        "no connected small-world graph after {max_attempts} attempts"
    )))
}

fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> Graph {
    let mut rng = seeded(seed);
    let mut adj: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            adj[u].insert(v as u32);
            adj[v].insert(u as u32);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() >= p {
                continue;
            }
            if adj[u].len() >= n - 1 {
                continue;
            }
            let mut w = rng.random_range(0..n);
            while w == u || adj[u].contains(&(w as u32)) {
                w = rng.random_range(0..n);
            }
            if adj[u].remove(&(v as u32)) {
                adj[v].remove(&(u as u32));
                adj[u].insert(w as u32);
                adj[w].insert(u as u32);
            }
        }
    }
    Graph::from_index_lists(adj.into_iter().map(|s| s.into_iter().collect()).collect())
}

/// Barabási-Albert preferential attachment.
///
/// Starts from a clique on `m + 1` nodes; each later node links to `m`
/// distinct earlier nodes chosen with probability proportional to degree.
pub fn scale_free(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if !(m >= 1 && n > m) {
        return Err(Error::InvalidParameter(format!(
            "scale free needs n > m >= 1, got n={n} m={m}"
        )));
    }
    if n > MAX_GENERATED_NODES {
        return Err(Error::InvalidParameter("scale free graph too large".into()));
    }
    let mut rng = seeded(seed);
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
    // every edge endpoint once, so uniform picks are degree-proportional
    let mut endpoints: Vec<u32> = Vec::with_capacity(2 * n * m);
    for u in 0..=m {
        for v in u + 1..=m {
            lists[u].push(v as u32);
            lists[v].push(u as u32);
            endpoints.push(u as u32);
            endpoints.push(v as u32);
        }
    }
    let mut chosen: Vec<u32> = Vec::with_capacity(m);
    for s in m + 1..n {
        chosen.clear();
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            lists[s].push(t);
            lists[t as usize].push(s as u32);
            endpoints.push(t);
            endpoints.push(s as u32);
        }
    }
    Ok(Graph::from_index_lists(lists))
}

/// The infinite `d`-regular tree, materialized on demand.
///
/// Node 0 is the root. Asking for the neighbors of a node creates its
/// children (fresh ids, `d` for the root and `d - 1` otherwise), so a
/// spreading process only ever builds the infected nodes and their
/// immediate neighborhood and never meets a finite rim.
#[derive(Debug, Clone)]
pub struct LazyRegularTree {
    degree: usize,
    adj: Vec<Vec<u32>>,
    expanded: Vec<bool>,
}

impl LazyRegularTree {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidParameter(format!("regular tree degree {degree} < 2")));
        }
        Ok(LazyRegularTree {
            degree,
            adj: vec![Vec::new()],
            expanded: vec![false],
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    /// Parent of node `h`; `None` for the root.
    pub fn parent(&self, h: usize) -> Option<usize> {
        (h != 0).then(|| self.adj[h][0] as usize)
    }

    /// Nodes materialized so far.
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Neighbor ids of node `h`, creating its children on first use.
    pub fn neighbors(&mut self, h: usize) -> &[u32] {
        if !self.expanded[h] {
            self.expanded[h] = true;
            let fan = if h == 0 { self.degree } else { self.degree - 1 };
            for _ in 0..fan {
                let id = self.adj.len() as u32;
                self.adj.push(vec![h as u32]);
                self.expanded.push(false);
                self.adj[h].push(id);
            }
        }
        &self.adj[h]
    }

    /// The materialized part as a finite graph.
    pub fn into_graph(self) -> Graph {
        Graph::from_index_lists(self.adj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(g: &Graph) -> Vec<usize> {
        (0..g.node_count()).map(|i| g.adjacent(i).len()).collect()
    }

    #[test]
    fn line_examples() {
        assert!(line_graph(0).is_err());
        let g = line_graph(1).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
        let g = line_graph(3).unwrap();
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))]
        );
        assert_eq!(degrees(&line_graph(5).unwrap()), [1, 2, 2, 2, 1]);
    }

    #[test]
    fn regular_tree_examples() {
        assert!(regular_tree(1, 3).is_err());
        let g = regular_tree(3, 1).unwrap();
        assert_eq!((g.node_count(), g.degree(NodeId(0))), (4, Some(3)));
        assert_eq!(regular_tree(3, 2).unwrap().node_count(), 10);
        for k in 0..5 {
            let g = regular_tree(2, k).unwrap();
            assert_eq!(g.node_count(), 2 * k + 1);
            assert_eq!(g.edge_count(), 2 * k);
            assert!(degrees(&g).iter().all(|&d| d <= 2));
        }
    }

    #[test]
    fn regular_tree_closed_form_and_degrees() {
        for d in 3..7usize {
            for depth in 0..5usize {
                let g = regular_tree(d, depth).unwrap();
                let closed = 1 + d * ((d - 1).pow(depth as u32) - 1) / (d - 2);
                assert_eq!(g.node_count(), closed);
                let dist = crate::graph::hop_distances(&g, None, NodeId(0)).unwrap();
                for (v, r) in dist {
                    let deg = g.degree(v).unwrap();
                    if (r as usize) < depth {
                        assert_eq!(deg, d);
                    } else if depth > 0 {
                        assert_eq!(deg, 1);
                    }
                }
            }
        }
    }

    fn spec(alpha: f64, b: f64, c: f64, radius: usize) -> GeometricTreeSpec {
        GeometricTreeSpec { alpha, b, c, d_star: 3, radius }
    }

    #[test]
    fn geometric_tree_forced_levels() {
        let g = geometric_tree(&spec(1.0, 1.0, 1.0, 3), 0).unwrap();
        assert_eq!(g.node_count(), 1 + 3 * (1 + 2 + 3));
        assert_eq!(g.degree(NodeId(0)), Some(3));
    }

    #[test]
    fn geometric_tree_alpha_zero_is_paths() {
        let g = geometric_tree(&spec(0.0, 1.0, 1.0, 7), 0).unwrap();
        assert_eq!(g.node_count(), 1 + 3 * 7);
        assert!(degrees(&g)[1..].iter().all(|&d| d <= 2));
        assert!(!spec(0.0, 1.0, 1.0, 7).satisfies_detection_condition());
        assert!(spec(1.0, 1.0, 1.0, 7).satisfies_detection_condition());
        assert!(!spec(1.0, 1.0, 2.0, 7).satisfies_detection_condition());
    }

    #[test]
    fn geometric_tree_random_levels_validate() {
        let s = spec(1.0, 1.0, 2.0, 12);
        for seed in 0..20 {
            let g = geometric_tree(&s, seed).unwrap();
            validate_geometric_tree(&g, &s).unwrap();
        }
        assert_eq!(geometric_tree(&s, 5).unwrap(), geometric_tree(&s, 5).unwrap());
    }

    #[test]
    fn geometric_tree_infeasible_specs() {
        assert!(matches!(
            geometric_tree(&spec(1.0, 2.0, 3.0, 3), 0),
            Err(Error::Construction(_))
        ));
        assert!(matches!(
            geometric_tree(&spec(1.0, 0.4, 0.45, 3), 0),
            Err(Error::Construction(_))
        ));
        assert!(geometric_tree(&spec(-1.0, 1.0, 1.0, 3), 0).is_err());
        assert!(geometric_tree(&spec(1.0, 2.0, 1.0, 3), 0).is_err());
    }

    #[test]
    fn validator_rejects_wrong_profiles() {
        let g = geometric_tree(&spec(1.0, 1.0, 1.0, 4), 0).unwrap();
        assert!(validate_geometric_tree(&g, &spec(1.0, 1.0, 1.0, 3)).is_err());
        assert!(validate_geometric_tree(&g, &spec(2.0, 1.0, 1.0, 4)).is_err());
        let line = line_graph(9).unwrap();
        assert!(validate_geometric_tree(&line, &spec(1.0, 1.0, 1.0, 4)).is_err());
    }

    #[test]
    fn small_world_lattice() {
        let g = small_world(6, 2, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(degrees(&g).iter().all(|&d| d == 2));
        let g = small_world(50, 4, 0.0, 1).unwrap();
        assert!(degrees(&g).iter().all(|&d| d == 4));
        assert!(small_world(4, 4, 0.1, 0).is_err());
        assert!(small_world(10, 3, 0.1, 0).is_err());
        assert!(small_world(10, 2, 1.5, 0).is_err());
    }

    #[test]
    fn small_world_rewiring_preserves_edges() {
        let g = small_world(5000, 4, 1.0, 3).unwrap();
        assert_eq!(g.edge_count(), 10_000);
        assert!(g.is_connected());
        assert_eq!(small_world(300, 4, 0.1, 9).unwrap(), small_world(300, 4, 0.1, 9).unwrap());
    }

    #[test]
    fn scale_free_examples() {
        let g = scale_free(200, 1, 4).unwrap();
        assert_eq!(g.edge_count(), 199);
        assert!(g.is_connected());
        let g = scale_free(4, 3, 4).unwrap();
        assert_eq!(g.edge_count(), 6);
        let (n, m) = (5000, 2);
        let g = scale_free(n, m, 11).unwrap();
        assert_eq!(g.edge_count(), (m + 1) * m / 2 + (n - m - 1) * m);
        assert_eq!(g, scale_free(n, m, 11).unwrap());
        assert!(scale_free(3, 3, 0).is_err());
    }

    #[test]
    fn lazy_tree_materializes_children() {
        let mut t = LazyRegularTree::new(3).unwrap();
        assert_eq!(t.neighbors(0), &[1, 2, 3]);
        assert_eq!(t.neighbors(2), &[0, 4, 5]);
        assert_eq!(t.node_count(), 6);
        assert_eq!((t.parent(0), t.parent(5)), (None, Some(2)));
        let g = t.into_graph();
        assert_eq!(g.edge_count(), 5);
        assert!(LazyRegularTree::new(1).is_err());
    }
}
