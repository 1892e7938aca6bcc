//! Incremental stable marriage and stable roommates.

mod bitset;
#[cfg(feature = "cli")]
pub mod cli;
pub mod format;
pub mod isr;
pub mod model;
pub mod oracle;
pub mod random;
pub mod reductions;
pub mod sm;
pub mod solve;
pub mod sr;
pub mod wcfcs;
pub mod xp;

pub use format::{parse_instance, serialize_instance};
pub use model::{
    blocking_pairs, matching_distance, profile_swap_distance, swap_distance, Agent,
    IncrementalInstance, Matching, ModelError, PreferenceList, PreferenceProfile, ProfileKind,
};
