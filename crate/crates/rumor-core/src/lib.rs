//! Source estimation for rumors spreading under the susceptible-infected model.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, experiments and
//! the command line live in the `rumor` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod centrality;
pub mod estimators;
pub mod generators;
pub mod graph;
pub mod rng;
pub mod spread;

pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, NodeId, RootedTree, RumorGraph};
