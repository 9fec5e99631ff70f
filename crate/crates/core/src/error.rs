use std::fmt;

use thiserror::Error;

/// Granularity of a serial-numbered corpus element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Surah,
    Ayah,
    Word,
    Letter,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Surah => "surah",
            Granularity::Ayah => "ayah",
            Granularity::Word => "word",
            Granularity::Letter => "letter",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("line {line}: malformed corpus line: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: expected {expected_surah}|{expected_ayah} or {next_surah}|1, found {surah}|{ayah}")]
    OutOfSequence {
        line: usize,
        expected_surah: u32,
        expected_ayah: u32,
        next_surah: u32,
        surah: u32,
        ayah: u32,
    },

    #[error("line {line}: codepoint U+{codepoint:04X} is neither a letter, a mark nor whitespace")]
    UnknownCodepoint { line: usize, codepoint: u32 },

    #[error("surah metadata is missing surah {0}")]
    MissingSurahMetadata(u32),

    #[error("{file} line {line}: {reason}")]
    Metadata {
        file: String,
        line: usize,
        reason: String,
    },

    #[error("{granularity} {value} is out of range")]
    OutOfRange { granularity: Granularity, value: i64 },

    #[error("ayah {surah}:{ayah} does not exist")]
    UnknownAyah { surah: i64, ayah: i64 },

    #[error("unknown {kind} {value}")]
    UnknownAnchor { kind: &'static str, value: i64 },

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("codepoint U+{0:04X} has no abjad value")]
    NotAbjad(u32),

    #[error("abjad table: {0}")]
    AbjadTable(String),

    #[error("index file: {0}")]
    IndexFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
