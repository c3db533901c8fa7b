//! Finite graphs, classes defined by forbidden weak subgraphs, and bounded amalgamation checks.
//!
//! The crate covers membership testing for omission classes, exhaustive enumeration of small
//! graphs and of extensions of a fixed graph, amalgam search with bounded AP / CAP / WAP
//! verification and refutation, explicit witness and gadget constructions, and finite chains
//! approximating generic limits.

pub mod amalgamation;
pub mod bits;
pub mod canon;
pub mod cert;
pub mod classes;
pub mod cli;
pub mod constructions;
pub mod embed;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod io;
pub mod limits;

pub use classes::ForbiddenClass;
pub use error::{Error, Result};
pub use graph::Graph;
