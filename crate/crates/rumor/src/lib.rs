//! File formats, Monte Carlo experiments and the command line built on
//! [`rumor_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;

pub use error::{Error, Result};
pub use rumor_core;
