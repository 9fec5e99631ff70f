use serde::{Deserialize, Serialize};

/// Inclusive interval of global serial numbers. Never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SerialRange {
    pub first: u32,
    pub last: u32,
}

impl SerialRange {
    pub fn new(first: u32, last: u32) -> Self {
        debug_assert!(first >= 1 && first <= last);
        Self { first, last }
    }

    pub fn len(&self) -> u32 {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, serial: u32) -> bool {
        (self.first..=self.last).contains(&serial)
    }

    pub fn is_within(&self, outer: &SerialRange) -> bool {
        outer.first <= self.first && self.last <= outer.last
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u32> {
        self.first..=self.last
    }
}

/// Serial counted from the end: `total + 1 - forward`.
pub fn backward(forward: u32, total: u32) -> u32 {
    total + 1 - forward
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurahRecord {
    pub surah_serial_no: u32,
    pub surah_serial_no_backward: u32,
    pub name: String,
    pub full_name: String,
    pub revelation_sequence_no: u32,
    pub ayah_range: SerialRange,
    pub word_range: SerialRange,
    pub letter_range: SerialRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AyahRecord {
    pub ayah_serial_no: u32,
    pub ayah_no_in_surah: u32,
    pub surah_serial_no: u32,
    pub text_with_tashkeel: String,
    pub text_no_tashkeel: String,
    pub word_range: SerialRange,
    pub letter_range: SerialRange,
    pub page_no: u32,
    pub juz_no: u32,
    pub rub_no: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRecord {
    pub word_serial_no: u32,
    pub word_no_in_ayah: u32,
    pub word_no_in_surah: u32,
    pub ayah_serial_no: u32,
    pub surah_serial_no: u32,
    pub text_with_tashkeel: String,
    pub text_no_tashkeel: String,
    pub unique_word_id: u32,
    pub letter_range: SerialRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterRecord {
    pub letter_serial_no: u32,
    pub word_serial_no: u32,
    pub letter: char,
}

/// One distinct vocalized word form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniqueWord {
    pub unique_word_id: u32,
    pub form: String,
    pub form_no_tashkeel: String,
    pub occurrence_count: u32,
}

/// Corpus-wide element counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub surahs: u32,
    pub ayahs: u32,
    pub words: u32,
    pub letters: u32,
}

/// A highlighted span inside one ayah: half-open char offsets into the
/// vocalized text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub ayah_serial_no: u32,
    pub start_offset: usize,
    pub end_offset: usize,
}
