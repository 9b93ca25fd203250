//! Grapheme-to-phoneme conversion and validation over a canonical phoneme
//! stream.
//!
//! The pieces, in pipeline order:
//!
//! - [`g2p`]: orthography to uncorrected phoneme streams (rewrite rules,
//!   lexicon with rule fallback, syllabary tables with tone merging, or
//!   passthrough of an external tool's output);
//! - [`folding`]: ordered rewrite maps that align backend output with a
//!   reference inventory, plus unknown/unseen diffs;
//! - [`inventory`]: PHOIBLE-style inventories, feature lookup and
//!   best-inventory matching;
//! - [`corpus`]: CSV corpora converted row by row with metadata preserved;
//! - [`analysis`]: frequencies, unigram information by age, feature
//!   eligibility, binomial tests and silhouette scores.
//!
//! [`stream`] defines the shared representation and [`cli`] the commands
//! behind the `phonostream` binary.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod folding;
pub mod g2p;
pub mod glyph;
pub mod inventory;
pub mod stream;

pub use folding::{DiffReport, FoldMap};
pub use g2p::Backend;
pub use inventory::Inventory;
pub use stream::{IpaSegment, PhonemeStream, StreamToken};
