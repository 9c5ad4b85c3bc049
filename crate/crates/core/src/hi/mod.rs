//! Executable history-independence checks.
//!
//! A structure is *strongly* history independent when any two operation
//! sequences that reach the same contents leave identical representations; it
//! is *weakly* history independent when that holds in distribution for
//! sequences starting from the empty state. Representations are compared at
//! the logical-node level through [`Fingerprint`]s.

pub mod check;
pub mod fingerprint;

pub use check::{
    detour_strategy, insert_only_strategy, probe_frequency, shi_check, shi_compare, whi_check,
    whi_self_check, HiMode, HiReport, Op, Strategy, WHI_TV_THRESHOLD,
};
pub use fingerprint::{Fingerprint, FingerprintWriter, Fingerprinted};
