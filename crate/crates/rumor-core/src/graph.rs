//! Undirected host graphs, infected subgraphs and rooted BFS trees.
//!
//! Every adjacency list is kept sorted ascending by node id, and every
//! traversal expands its frontier in that order. The estimators for graphs
//! with cycles use [`sampled_bfs`] instead, since a fixed id order leans
//! BFS trees toward one side of the graph.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{mix64, seeded};

/// Identifier of a node in a host graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<u64> for NodeId {
    fn from(v: u64) -> Self {
        NodeId(v)
    }
}

const UNSET: u32 = u32::MAX;

/// Compressed adjacency over dense indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    /// Builds from per-node neighbor lists, sorting and deduplicating each.
    pub(crate) fn from_lists(mut lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let total: usize = lists.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        offsets.push(0);
        for list in lists.iter_mut() {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    #[inline]
    pub(crate) fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub(crate) fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub(crate) fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

/// Layered BFS over a dense adjacency.
///
/// Layers are expanded in ascending index order and a newly discovered node
/// is attached to the lowest-index neighbor of the previous layer. Returns
/// the visit order, the parent of each node (`UNSET` when unreachable, the
/// root points at itself) and hop distances (`u32::MAX` when unreachable).
pub(crate) fn layered_bfs(adj: &Csr, root: usize) -> (Vec<u32>, Vec<u32>, Vec<u32>) {
    let n = adj.len();
    let mut parent = vec![UNSET; n];
    let mut dist = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    parent[root] = root as u32;
    dist[root] = 0;
    order.push(root as u32);
    let mut layer_start = 0;
    let mut depth = 0;
    while layer_start < order.len() {
        let layer_end = order.len();
        depth += 1;
        for k in layer_start..layer_end {
            let u = order[k];
            for &w in adj.neighbors(u as usize) {
                if parent[w as usize] == UNSET {
                    parent[w as usize] = u;
                    dist[w as usize] = depth;
                    order.push(w);
                }
            }
        }
        order[layer_end..].sort_unstable();
        layer_start = layer_end;
    }
    (order, parent, dist)
}

/// BFS tree whose parents are drawn uniformly from the neighbors one layer
/// closer to the root, using a stream fixed by `seed` and `root`. Visit
/// order is that of [`layered_bfs`]. On trees the result is identical.
pub(crate) fn sampled_bfs(adj: &Csr, root: usize, seed: u64) -> (Vec<u32>, Vec<u32>) {
    let (order, mut parent, dist) = layered_bfs(adj, root);
    let mut rng = seeded(mix64(seed ^ mix64(root as u64)));
    let mut cands = Vec::new();
    for &u in order.iter().skip(1) {
        let u = u as usize;
        cands.clear();
        cands.extend(
            adj.neighbors(u)
                .iter()
                .copied()
                .filter(|&w| dist[w as usize] + 1 == dist[u]),
        );
        if cands.len() > 1 {
            parent[u] = cands[rng.random_range(0..cands.len())];
        }
    }
    (order, parent)
}

/// Undirected simple graph with sorted adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<NodeId>,
    adj: Csr,
    dense: bool,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate and reversed edges collapse
    /// into one; self-loops are rejected.
    pub fn from_edges<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::from_nodes_and_edges(core::iter::empty(), edges)
    }

    /// Like [`Graph::from_edges`] but also keeps isolated nodes.
    pub fn from_nodes_and_edges<N, I>(nodes: N, edges: I) -> Result<Self>
    where
        N: IntoIterator<Item = NodeId>,
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut b = GraphBuilder::new();
        for v in nodes {
            b.add_node(v);
        }
        for (u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Dense graph over ids `0..lists.len()` from index adjacency lists.
    /// The lists must be symmetric.
    pub(crate) fn from_index_lists(lists: Vec<Vec<u32>>) -> Self {
        let n = lists.len();
        let adj = Csr::from_lists(lists);
        debug_assert!((0..n).all(|u| adj
            .neighbors(u)
            .iter()
            .all(|&w| w as usize != u && adj.neighbors(w as usize).binary_search(&(u as u32)).is_ok())));
        Graph {
            ids: (0..n as u64).map(NodeId).collect(),
            adj,
            dense: true,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.edge_count()
    }

    /// All node ids, ascending.
    pub fn nodes(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.index_of(v).is_some()
    }

    /// Dense index of a node id.
    #[inline]
    pub fn index_of(&self, v: NodeId) -> Option<usize> {
        if self.dense {
            let i = v.0 as usize;
            (v.0 < self.ids.len() as u64).then_some(i)
        } else {
            self.ids.binary_search(&v).ok()
        }
    }

    #[inline]
    pub fn id_at(&self, index: usize) -> NodeId {
        self.ids[index]
    }

    /// Neighbor indices of the node at `index`, ascending.
    #[inline]
    pub fn adjacent(&self, index: usize) -> &[u32] {
        self.adj.neighbors(index)
    }

    pub fn neighbors(&self, v: NodeId) -> Result<impl Iterator<Item = NodeId> + '_> {
        let i = self.index_of(v).ok_or(Error::UnknownNode(v))?;
        Ok(self.adjacent(i).iter().map(move |&w| self.ids[w as usize]))
    }

    pub fn degree(&self, v: NodeId) -> Option<usize> {
        self.index_of(v).map(|i| self.adjacent(i).len())
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(i), Some(j)) => self.adjacent(i).binary_search(&(j as u32)).is_ok(),
            _ => false,
        }
    }

    /// Each undirected edge once as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.adjacent(i)
                .iter()
                .filter(move |&&w| (w as usize) > i)
                .map(move |&w| (self.ids[i], self.ids[w as usize]))
        })
    }

    pub(crate) fn csr(&self) -> &Csr {
        &self.adj
    }

    /// Size of the connected component containing each node, by index.
    pub fn component_sizes(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            let mut size = 0;
            comp[s] = c;
            stack.push(s);
            while let Some(u) = stack.pop() {
                size += 1;
                for &w in self.adjacent(u) {
                    if comp[w as usize] == usize::MAX {
                        comp[w as usize] = c;
                        stack.push(w as usize);
                    }
                }
            }
            sizes.push(size);
        }
        comp.into_iter().map(|c| sizes[c]).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        n == 0 || self.component_sizes()[0] == n
    }
}

/// Incremental graph construction.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    adj: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, v: NodeId) {
        self.adj.entry(v).or_default();
    }

    /// Inserts an undirected edge. Returns `false` if it already existed.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        if u == v {
            return Err(Error::InvalidParameter(alloc::format!("self-loop on node {u}")));
        }
        let fresh = self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
        Ok(fresh)
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn build(self) -> Graph {
        let ids: Vec<NodeId> = self.adj.keys().copied().collect();
        let dense = ids.iter().enumerate().all(|(i, v)| v.0 == i as u64);
        let lists = self
            .adj
            .values()
            .map(|nbrs| {
                nbrs.iter()
                    .map(|w| ids.binary_search(w).expect("neighbor registered") as u32)
                    .collect()
            })
            .collect();
        Graph {
            ids,
            adj: Csr::from_lists(lists),
            dense,
        }
    }
}

/// The connected subgraph induced by the infected nodes of a host graph.
#[derive(Debug, Clone)]
pub struct RumorGraph<'g> {
    host: &'g Graph,
    /// Host indices of the infected nodes, ascending.
    members: Vec<u32>,
    adj: Csr,
}

impl<'g> RumorGraph<'g> {
    pub fn new<I>(host: &'g Graph, infected: I) -> Result<Self>
    where
        I: IntoIterator<Item = NodeId>,
    {
        let mut members = Vec::new();
        for v in infected {
            members.push(host.index_of(v).ok_or(Error::UnknownNode(v))? as u32);
        }
        Self::from_host_indices(host, members)
    }

    pub(crate) fn from_host_indices(host: &'g Graph, mut members: Vec<u32>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::Empty);
        }
        let mut local = vec![UNSET; host.node_count()];
        for (k, &h) in members.iter().enumerate() {
            local[h as usize] = k as u32;
        }
        let lists = members
            .iter()
            .map(|&h| {
                host.adjacent(h as usize)
                    .iter()
                    .filter_map(|&w| {
                        let l = local[w as usize];
                        (l != UNSET).then_some(l)
                    })
                    .collect()
            })
            .collect();
        let rg = RumorGraph {
            host,
            members,
            adj: Csr::from_lists(lists),
        };
        let (order, _, _) = layered_bfs(&rg.adj, 0);
        if order.len() != rg.len() {
            return Err(Error::Disconnected);
        }
        Ok(rg)
    }

    pub fn host(&self) -> &'g Graph {
        self.host
    }

    /// Number of infected nodes.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Infected node ids, ascending.
    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.members.iter().map(move |&h| self.host.id_at(h as usize))
    }

    #[inline]
    pub fn node(&self, local: usize) -> NodeId {
        self.host.id_at(self.members[local] as usize)
    }

    pub fn local_index(&self, v: NodeId) -> Option<usize> {
        let h = self.host.index_of(v)? as u32;
        self.members.binary_search(&h).ok()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.local_index(v).is_some()
    }

    /// Edges of the induced subgraph.
    pub fn edge_count(&self) -> usize {
        self.adj.edge_count()
    }

    /// A connected graph is a tree iff it has `N - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.len()
    }

    pub(crate) fn require_tree(&self) -> Result<()> {
        if self.is_tree() {
            Ok(())
        } else {
            Err(Error::NotATree {
                nodes: self.len(),
                edges: self.edge_count(),
            })
        }
    }

    /// Degree in the host graph of the infected node at `local`.
    #[inline]
    pub fn host_degree(&self, local: usize) -> usize {
        self.host.adjacent(self.members[local] as usize).len()
    }

    #[inline]
    pub(crate) fn csr(&self) -> &Csr {
        &self.adj
    }
}

/// A spanning tree with a designated root and precomputed subtree sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    /// Nodes in BFS order; `order[0]` is the root.
    order: Vec<NodeId>,
    /// Parent position in `order`; the root points at itself.
    parent: Vec<u32>,
    depth: Vec<u32>,
    children: Csr,
    subtree: Vec<u64>,
    /// `(id, position)` sorted by id.
    position: Vec<(NodeId, u32)>,
}

impl RootedTree {
    /// Builds from `order` (BFS order, root first) and parent positions.
    fn from_order(order: Vec<NodeId>, parent: Vec<u32>) -> Self {
        let n = order.len();
        let mut depth = vec![0u32; n];
        let mut lists = vec![Vec::new(); n];
        for k in 1..n {
            let p = parent[k] as usize;
            depth[k] = depth[p] + 1;
            lists[p].push(k as u32);
        }
        for list in lists.iter_mut() {
            list.sort_unstable_by_key(|&k| order[k as usize]);
        }
        // children lists are kept in id order, which Csr::from_lists would
        // otherwise reorder by position
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(n.saturating_sub(1));
        offsets.push(0);
        for list in &lists {
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        let children = Csr { offsets, targets };
        let mut subtree = vec![1u64; n];
        for k in (1..n).rev() {
            subtree[parent[k] as usize] += subtree[k];
        }
        let mut position: Vec<(NodeId, u32)> =
            order.iter().enumerate().map(|(k, &v)| (v, k as u32)).collect();
        position.sort_unstable();
        RootedTree {
            order,
            parent,
            depth,
            children,
            subtree,
            position,
        }
    }

    /// Builds a rooted tree from `(child, parent)` pairs.
    pub fn from_parent_pairs<I>(root: NodeId, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut kids: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        let mut seen_child = BTreeSet::new();
        let mut count = 1;
        for (c, p) in pairs {
            if c == root || !seen_child.insert(c) {
                return Err(Error::InvalidParameter(alloc::format!(
                    "node {c} has more than one parent"
                )));
            }
            kids.entry(p).or_default().push(c);
            count += 1;
        }
        let mut order = vec![root];
        let mut parent = vec![0u32];
        let mut k = 0;
        while k < order.len() {
            if let Some(cs) = kids.get_mut(&order[k]) {
                cs.sort_unstable();
                for &c in cs.iter() {
                    order.push(c);
                    parent.push(k as u32);
                }
            }
            k += 1;
        }
        if order.len() != count {
            return Err(Error::Disconnected);
        }
        Ok(Self::from_order(order, parent))
    }

    pub fn root(&self) -> NodeId {
        self.order[0]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Nodes in BFS order (layer by layer, each layer ascending by id).
    pub fn bfs_order(&self) -> &[NodeId] {
        &self.order
    }

    fn pos(&self, v: NodeId) -> Option<usize> {
        self.position
            .binary_search_by_key(&v, |&(id, _)| id)
            .ok()
            .map(|i| self.position[i].1 as usize)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.pos(v).is_some()
    }

    /// Parent of `v`; the root is its own parent.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.pos(v).map(|k| self.order[self.parent[k] as usize])
    }

    /// Children of `v`, ascending by id.
    pub fn children(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let ks: &[u32] = match self.pos(v) {
            Some(k) => self.children.neighbors(k),
            None => &[],
        };
        ks.iter().map(move |&c| self.order[c as usize])
    }

    /// Hop distance from the root.
    pub fn depth(&self, v: NodeId) -> Option<u32> {
        self.pos(v).map(|k| self.depth[k])
    }

    /// Number of nodes in the subtree hanging from `v`.
    pub fn subtree_size(&self, v: NodeId) -> Option<u64> {
        self.pos(v).map(|k| self.subtree[k])
    }

    pub(crate) fn subtree_sizes_in_order(&self) -> &[u64] {
        &self.subtree
    }
}

/// BFS tree of the infected subgraph rooted at `root`.
pub fn bfs_tree(infected: &RumorGraph<'_>, root: NodeId) -> Result<RootedTree> {
    let r = infected.local_index(root).ok_or(Error::NotInfected(root))?;
    let (order, parent, _) = layered_bfs(infected.csr(), r);
    debug_assert_eq!(order.len(), infected.len());
    let mut pos = vec![0u32; infected.len()];
    for (k, &u) in order.iter().enumerate() {
        pos[u as usize] = k as u32;
    }
    let parents = order.iter().map(|&u| pos[parent[u as usize] as usize]).collect();
    let ids = order.iter().map(|&u| infected.node(u as usize)).collect();
    Ok(RootedTree::from_order(ids, parents))
}

/// `T_u^root` for every node of the tree.
pub fn subtree_sizes(tree: &RootedTree) -> BTreeMap<NodeId, u64> {
    tree.order
        .iter()
        .copied()
        .zip(tree.subtree.iter().copied())
        .collect()
}

/// Unweighted hop distances from `from`.
///
/// With `restrict`, distances are measured inside the subgraph induced by
/// that node set and every node of the set must be reachable. Without it,
/// only nodes reachable in the whole graph are returned.
pub fn hop_distances(
    g: &Graph,
    restrict: Option<&[NodeId]>,
    from: NodeId,
) -> Result<BTreeMap<NodeId, u64>> {
    match restrict {
        Some(set) => {
            let mut members = Vec::with_capacity(set.len());
            for &v in set {
                members.push(g.index_of(v).ok_or(Error::UnknownNode(v))? as u32);
            }
            members.sort_unstable();
            members.dedup();
            let fi = g.index_of(from).ok_or(Error::UnknownNode(from))? as u32;
            if members.binary_search(&fi).is_err() {
                return Err(Error::NotInfected(from));
            }
            let rg = RumorGraph::from_host_indices(g, members)?;
            let src = rg.local_index(from).expect("checked above");
            let (_, _, dist) = layered_bfs(rg.csr(), src);
            Ok(dist
                .iter()
                .enumerate()
                .map(|(k, &d)| (rg.node(k), d as u64))
                .collect())
        }
        None => {
            let fi = g.index_of(from).ok_or(Error::UnknownNode(from))?;
            let (order, _, dist) = layered_bfs(g.csr(), fi);
            Ok(order
                .iter()
                .map(|&u| (g.id_at(u as usize), dist[u as usize] as u64))
                .collect())
        }
    }
}
