//! Simulation of the susceptible-infected process.
//!
//! Every edge carries an independent Exp(1) delay. A run either stops after
//! a fixed number of infections ([`spread_by_count`]) or at a fixed time
//! ([`spread_by_time`]). Both are generic over [`Topology`], so they work on
//! a finite [`Graph`] as well as on a [`LazyRegularTree`].

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::generators::LazyRegularTree;
use crate::graph::{Graph, NodeId, RumorGraph};
use crate::rng::{exponential, seeded, SimRng};

/// Neighborhood access for the spreading process. Nodes are addressed by
/// dense handles `0..node_count()`; the count may grow as neighbors are
/// requested.
pub trait Topology {
    fn node_count(&self) -> usize;
    fn handle(&self, v: NodeId) -> Option<usize>;
    fn node_id(&self, h: usize) -> NodeId;
    fn neighbors(&mut self, h: usize) -> &[u32];
}

impl Topology for &Graph {
    fn node_count(&self) -> usize {
        Graph::node_count(self)
    }
    fn handle(&self, v: NodeId) -> Option<usize> {
        self.index_of(v)
    }
    fn node_id(&self, h: usize) -> NodeId {
        self.id_at(h)
    }
    fn neighbors(&mut self, h: usize) -> &[u32] {
        self.adjacent(h)
    }
}

impl Topology for LazyRegularTree {
    fn node_count(&self) -> usize {
        LazyRegularTree::node_count(self)
    }
    fn handle(&self, v: NodeId) -> Option<usize> {
        let h = usize::try_from(v.0).ok()?;
        (h < self.node_count()).then_some(h)
    }
    fn node_id(&self, h: usize) -> NodeId {
        NodeId(h as u64)
    }
    fn neighbors(&mut self, h: usize) -> &[u32] {
        LazyRegularTree::neighbors(self, h)
    }
}

/// How a run was stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpreadMode {
    ByCount(usize),
    ByTime(f64),
}

/// Infection order and times of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadTrace {
    pub source: NodeId,
    /// Infected nodes in infection order; `order[0]` is the source.
    pub order: Vec<NodeId>,
    /// Infection times, non-decreasing, `times[0] == 0`.
    pub times: Vec<f64>,
    /// Boundary edge count after each infection.
    pub boundary_sizes: Vec<usize>,
    pub mode: SpreadMode,
}

impl SpreadTrace {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Infected nodes, ascending.
    pub fn infected(&self) -> Vec<NodeId> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }

    /// Induced subgraph of the infected nodes in `host`.
    pub fn rumor_graph<'g>(&self, host: &'g Graph) -> Result<RumorGraph<'g>> {
        RumorGraph::new(host, self.order.iter().copied())
    }
}

/// Checks that every node after the first has a neighbor earlier in `order`.
pub fn check_permitted(g: &Graph, order: &[NodeId]) -> Result<()> {
    let first = *order.first().ok_or(Error::Empty)?;
    let mut seen = vec![false; g.node_count()];
    seen[g.index_of(first).ok_or(Error::UnknownNode(first))?] = true;
    for (k, &v) in order.iter().enumerate().skip(1) {
        let i = g.index_of(v).ok_or(Error::UnknownNode(v))?;
        if seen[i] || !g.adjacent(i).iter().any(|&w| seen[w as usize]) {
            return Err(Error::NotPermitted { position: k, node: v });
        }
        seen[i] = true;
    }
    Ok(())
}

/// Edges from the infected set to the rest of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    /// `(infected, uninfected)` pairs, sorted.
    pub edges: Vec<(NodeId, NodeId)>,
}

impl Boundary {
    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

pub fn boundary(g: &Graph, infected: &[NodeId]) -> Result<Boundary> {
    let mut mark = vec![false; g.node_count()];
    for &v in infected {
        mark[g.index_of(v).ok_or(Error::UnknownNode(v))?] = true;
    }
    let mut edges = Vec::new();
    for (i, _) in mark.iter().enumerate().filter(|(_, &m)| m) {
        for &w in g.adjacent(i) {
            if !mark[w as usize] {
                edges.push((g.id_at(i), g.id_at(w as usize)));
            }
        }
    }
    Ok(Boundary { edges })
}

fn grow(marks: &mut Vec<bool>, n: usize) {
    if marks.len() < n {
        marks.resize(n, false);
    }
}

/// Runs until `n` nodes are infected.
///
/// Uses the embedded jump chain: the next infection crosses a boundary edge
/// chosen uniformly, after an Exp(boundary size) holding time.
pub fn spread_by_count_on<T: Topology>(
    topo: &mut T,
    source: NodeId,
    n: usize,
    rng: &mut SimRng,
) -> Result<SpreadTrace> {
    if n == 0 {
        return Err(Error::InvalidParameter("infected count must be >= 1".into()));
    }
    let src = topo.handle(source).ok_or(Error::UnknownNode(source))?;
    let mut infected = vec![false; topo.node_count()];
    // target handles of boundary edges; entries become stale once the
    // target is infected and are dropped lazily
    let mut pending: Vec<u32> = Vec::new();
    let mut live = 0usize;
    let mut trace = SpreadTrace {
        source,
        order: Vec::with_capacity(n),
        times: Vec::with_capacity(n),
        boundary_sizes: Vec::with_capacity(n),
        mode: SpreadMode::ByCount(n),
    };
    let mut time = 0.0;
    infect_node(topo, &mut infected, src, &mut pending, &mut live);
    trace.order.push(source);
    trace.times.push(0.0);
    trace.boundary_sizes.push(live);
    while trace.order.len() < n {
        if live == 0 {
            return Err(Error::Exhausted {
                requested: n,
                reachable: trace.order.len(),
            });
        }
        time += exponential(rng, live as f64);
        let w = loop {
            let i = rng.random_range(0..pending.len());
            let w = pending[i] as usize;
            if infected[w] {
                pending.swap_remove(i);
            } else {
                break w;
            }
        };
        infect_node(topo, &mut infected, w, &mut pending, &mut live);
        trace.order.push(topo.node_id(w));
        trace.times.push(time);
        trace.boundary_sizes.push(live);
        if pending.len() > 4 * live + 64 {
            pending.retain(|&x| !infected[x as usize]);
        }
    }
    Ok(trace)
}

fn infect_node<T: Topology>(
    topo: &mut T,
    infected: &mut Vec<bool>,
    h: usize,
    pending: &mut Vec<u32>,
    live: &mut usize,
) {
    topo.neighbors(h);
    grow(infected, topo.node_count());
    infected[h] = true;
    for &w in topo.neighbors(h) {
        if infected[w as usize] {
            *live -= 1;
        } else {
            pending.push(w);
            *live += 1;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    node: u32,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct TimeState {
    infected: Vec<bool>,
    heap: BinaryHeap<Event>,
    seq: u64,
    live: usize,
}

impl TimeState {
    fn fire<T: Topology>(&mut self, topo: &mut T, h: usize, at: f64, rng: &mut SimRng) {
        topo.neighbors(h);
        grow(&mut self.infected, topo.node_count());
        self.infected[h] = true;
        for &w in topo.neighbors(h) {
            if self.infected[w as usize] {
                self.live -= 1;
            } else {
                self.live += 1;
                self.heap.push(Event {
                    time: at + exponential(rng, 1.0),
                    seq: self.seq,
                    node: w,
                });
                self.seq += 1;
            }
        }
    }
}

/// Runs until time `t`: every node whose first-passage time from the source
/// is at most `t` gets infected. Edge delays are drawn when their first
/// endpoint becomes infected.
pub fn spread_by_time_on<T: Topology>(
    topo: &mut T,
    source: NodeId,
    t: f64,
    rng: &mut SimRng,
) -> Result<SpreadTrace> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter("time horizon must be finite and >= 0".into()));
    }
    let src = topo.handle(source).ok_or(Error::UnknownNode(source))?;
    let infected = vec![false; topo.node_count()];
    let heap = BinaryHeap::new();
    let mut trace = SpreadTrace {
        source,
        order: Vec::new(),
        times: Vec::new(),
        boundary_sizes: Vec::new(),
        mode: SpreadMode::ByTime(t),
    };
    let mut st = TimeState { infected, heap, seq: 0, live: 0 };
    st.fire(topo, src, 0.0, rng);
    trace.order.push(source);
    trace.times.push(0.0);
    trace.boundary_sizes.push(st.live);
    while let Some(ev) = st.heap.pop() {
        if ev.time > t {
            break;
        }
        let h = ev.node as usize;
        if st.infected[h] {
            continue;
        }
        st.fire(topo, h, ev.time, rng);
        trace.order.push(topo.node_id(h));
        trace.times.push(ev.time);
        trace.boundary_sizes.push(st.live);
    }
    Ok(trace)
}

/// Seeded by-count run on a finite graph, together with its rumor graph.
pub fn spread_by_count<'g>(
    g: &'g Graph,
    source: NodeId,
    n: usize,
    seed: u64,
) -> Result<(SpreadTrace, RumorGraph<'g>)> {
    let mut rng = seeded(seed);
    let mut topo = g;
    let trace = spread_by_count_on(&mut topo, source, n, &mut rng)?;
    let rg = trace.rumor_graph(g)?;
    Ok((trace, rg))
}

/// Seeded by-time run on a finite graph, together with its rumor graph.
pub fn spread_by_time<'g>(
    g: &'g Graph,
    source: NodeId,
    t: f64,
    seed: u64,
) -> Result<(SpreadTrace, RumorGraph<'g>)> {
    let mut rng = seeded(seed);
    let mut topo = g;
    let trace = spread_by_time_on(&mut topo, source, t, &mut rng)?;
    let rg = trace.rumor_graph(g)?;
    Ok((trace, rg))
}
