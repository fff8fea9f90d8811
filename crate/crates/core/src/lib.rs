//! Temporal relations as finite sets of orbits over the rationals, closures
//! under the canonical binary operations, and constructive search for
//! pseudo-loops and pseudo-loop-condition witnesses.

pub mod chase;
pub mod cli;
pub mod error;
pub mod factor;
pub mod gen;
pub mod io;
pub mod loopcond;
pub mod minclean;
pub mod ops;
pub mod orbit;
pub mod pseudoloop;
pub mod relation;
pub mod slice;
pub mod term;

pub use error::{Error, Result};
