//! Learning-augmented ordered dictionaries with history independence.
//!
//! Every structure here derives its randomness from a keyed oracle, so its
//! memory layout is a function of its contents (strong history independence)
//! or, for the dynamically rebuilt variants, of its contents and size alone in
//! distribution (weak history independence).
//!
//! - [`structures`]: zip-zip trees, learned treaps and an AVL baseline.
//! - [`threshold`]: frequency floors that bound the damage of bad predictions.
//! - [`pairing`]: a learned tree searched with a budget and a uniform backup.
//! - [`dynamics`]: rebuild schemes for unknown sizes.
//! - [`hi`]: fingerprints and executable history-independence checks.
//! - [`workloads`] and [`bench`]: the experimental harness.

pub mod bench;
pub mod dynamics;
pub mod error;
pub mod hi;
pub mod oracle;
pub mod pairing;
pub mod structures;
pub mod threshold;
pub mod workloads;

pub use error::{Error, Result};
pub use oracle::{ComparisonTally, Frequency, Key, Seed};
pub use structures::{
    AvlTree, DictEntry, Dictionary, LearnedDictionary, LearnedTreap, Payload, SearchResult,
    TreapVariant, Weight, ZipZipTree,
};
