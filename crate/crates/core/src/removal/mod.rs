//! The (U, W)-removal procedure and everything built on it.
//!
//! A removal walks through the revealed part `A` and then an ordered list `U`,
//! removing each vertex whose parity into the remaining graph is even and
//! otherwise pairing it with an even-parity neighbour from a cyclically chosen
//! block of `W`. What survives is a subset `V_W` of `W` together with a valid
//! removal prefix for everything else.

mod certifier;
mod config;
mod double;
mod layering;
mod uw;

pub use certifier::{recursive_even_degenerate, CertifierParams, CertifierResult, LevelPath, LevelRecord};
pub use config::{
    balanced_chunks, block_count, make_uw_config, CandidatePolicy, RemovalConfig, Role, DEFAULT_S_FACTOR,
};
pub use double::{
    default_eta, double_removal, make_double_plan, DerivedSets, DoubleRemovalOutcome, DoubleRemovalPlan, PlanParams,
    Side, SideSets,
};
pub use layering::{analyze_transcript_layering, LayeringReport};
pub use uw::{
    uw_removal, verify_outcome, Branch, Candidate, EdgeProbe, RemovalOutcome, RemovalStatus, RemovalTranscript,
    RoundRecord, StarRecord,
};
