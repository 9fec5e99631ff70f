//! Quran corpus index.
//!
//! Ingests a `surah|ayah|text` corpus plus surah and mushaf layout tables into
//! an immutable [`CorpusIndex`] with forward and backward serial numbers at
//! surah, ayah, word and letter granularity, and builds the abjad, statistics
//! and splitting tools on top of it.

pub mod abjad;
pub mod conventions;
pub mod corpus;
mod error;
pub mod splitter;
pub mod stats;
pub mod text;

pub use abjad::{AbjadTable, jummal};
pub use corpus::{Anchor, CorpusIndex, NavTarget, Selection, ingest, ingest_files};
pub use error::{Error, Granularity, Result};
pub use splitter::{Grouping, SplitRequest, SplitResult, SplitTarget, SplitUnit, TashkeelMode, split};
pub use stats::{Stats, StatsReport};
pub use text::{TextRules, strip_tashkeel, tokenize_ayah};
