use alloc::string::String;
use core::fmt;

use crate::graph::NodeId;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A node id that is not part of the graph.
    UnknownNode(NodeId),
    /// A node that was expected to be infected is not.
    NotInfected(NodeId),
    /// The node set does not induce a connected subgraph.
    Disconnected,
    /// An operation that needs a tree got a graph with cycles.
    NotATree { nodes: usize, edges: usize },
    /// Empty node set where at least one node is required.
    Empty,
    /// Spreading ran out of boundary before reaching the requested size.
    Exhausted { requested: usize, reachable: usize },
    /// A sequence that is not a permitted infection order.
    NotPermitted { position: usize, node: NodeId },
    /// The boundary recursion dropped to zero or below.
    EmptyBoundary { step: usize },
    /// Enumeration guard.
    CapExceeded { nodes: usize, cap: usize },
    /// An invalid argument.
    InvalidParameter(String),
    /// A generator could not produce a graph matching its spec.
    Construction(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownNode(v) => write!(f, "node {v} is not in the graph"),
            Error::NotInfected(v) => write!(f, "node {v} is not infected"),
            Error::Disconnected => f.write_str("node set does not induce a connected subgraph"),
            Error::NotATree { nodes, edges } => {
                write!(f, "expected a tree, got {nodes} nodes and {edges} edges")
            }
            Error::Empty => f.write_str("empty node set"),
            Error::Exhausted { requested, reachable } => write!(
                f,
                "requested {requested} infected nodes but only {reachable} are reachable from the source"
            ),
            Error::NotPermitted { position, node } => write!(
                f,
                "node {node} at position {position} has no earlier neighbor in the sequence"
            ),
            Error::EmptyBoundary { step } => write!(f, "rumor boundary is empty at step {step}"),
            Error::CapExceeded { nodes, cap } => {
                write!(f, "{nodes} nodes exceeds the enumeration cap of {cap}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Construction(msg) => write!(f, "construction failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
