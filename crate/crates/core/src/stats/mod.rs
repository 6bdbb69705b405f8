//! Exact and sampled laws of parities of Bernoulli bits.
//!
//! The removal analysis rests on parities of sums of iid Bernoulli bits being
//! close to uniform in a multiplicative sense. This module computes those laws
//! exactly by enumeration (for up to 24 bits) or estimates them by sampling,
//! and checks the uniformity and conditioning inequalities against them.

mod affected;
mod bipartite;
mod distribution;
mod f2;
mod family;
mod uniformity;

pub use affected::*;
pub use bipartite::*;
pub use distribution::*;
pub use f2::*;
pub use family::*;
pub use uniformity::*;
