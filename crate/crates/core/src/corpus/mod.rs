//! Corpus ingestion and the serial-number index.

mod index;
mod ingest;
pub mod metadata;
mod model;
mod persist;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

pub use index::{Anchor, CorpusIndex, NavTarget};
pub use ingest::ingest;
pub use metadata::{LayoutRow, Metadata, SurahMeta};
pub use model::*;
pub use persist::FORMAT_VERSION;

use crate::error::{Error, Result};
use crate::text::TextRules;

/// Ingests a corpus file using the metadata tables found in `meta_dir`.
pub fn ingest_files(corpus: &Path, meta_dir: &Path, rules: &TextRules) -> Result<CorpusIndex> {
    let file = File::open(corpus).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", corpus.display())))
    })?;
    let metadata = Metadata::load_dir(meta_dir)?;
    ingest(BufReader::new(file), &metadata, rules)
}
