//! Even-degeneracy of random graphs.
//!
//! A graph is *even-degenerate* if its vertices can be ordered `v_1, ..., v_n`
//! so that each of `v_1, ..., v_{n-2}` has an even number of neighbours among
//! the vertices after it. This crate provides exact deciders for small graphs,
//! the randomized (U, W)-removal procedure and a recursive certifier built on
//! it, exact samplers for `G(n, p)` conditioned on parity information, and
//! enumeration oracles for the parity-uniformity estimates the analysis uses.

pub mod bitset;
pub mod degeneracy;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod removal;
pub mod revelation;
pub mod rng;
pub mod sampling;
pub mod stats;

pub use bitset::VertexSet;
pub use error::{Error, Result};
pub use graph::{Graph, PotentialEdgeSet};
pub use revelation::{verify_revelation, Revelation};
pub use rng::RandomSource;
