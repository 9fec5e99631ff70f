use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::model::*;
use crate::error::{Error, Granularity, Result};
use crate::text::TextRules;

/// Immutable four-granularity index of the corpus. Dense arrays are ordered
/// by serial number; element `n` lives at position `n - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusIndex {
    source_hash: String,
    rules: TextRules,
    surahs: Vec<SurahRecord>,
    ayahs: Vec<AyahRecord>,
    words: Vec<WordRecord>,
    letters: Vec<LetterRecord>,
    unique_words: Vec<UniqueWord>,
    page_starts: Vec<u32>,
    juz_starts: Vec<u32>,
    rub_starts: Vec<u32>,
}

/// A navigation anchor from the explorer's left pane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Surah(i64),
    Juz(i64),
    Rub(i64),
    Page(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavTarget {
    pub page_no: u32,
    pub ayah_serial_no: u32,
}

fn at<T>(items: &[T], granularity: Granularity, serial: i64) -> Result<&T> {
    if serial < 1 {
        return Err(Error::OutOfRange {
            granularity,
            value: serial,
        });
    }
    items.get(serial as usize - 1).ok_or(Error::OutOfRange {
        granularity,
        value: serial,
    })
}

impl CorpusIndex {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        source_hash: String,
        rules: TextRules,
        surahs: Vec<SurahRecord>,
        ayahs: Vec<AyahRecord>,
        words: Vec<WordRecord>,
        letters: Vec<LetterRecord>,
        unique_words: Vec<UniqueWord>,
        page_starts: Vec<u32>,
        juz_starts: Vec<u32>,
        rub_starts: Vec<u32>,
    ) -> Self {
        Self {
            source_hash,
            rules,
            surahs,
            ayahs,
            words,
            letters,
            unique_words,
            page_starts,
            juz_starts,
            rub_starts,
        }
    }

    /// SHA-256 over the corpus lines, metadata and tokenizer rules.
    pub fn source_hash(&self) -> &str {
        &self.source_hash
    }

    pub fn rules(&self) -> &TextRules {
        &self.rules
    }

    pub fn totals(&self) -> Totals {
        Totals {
            surahs: self.surahs.len() as u32,
            ayahs: self.ayahs.len() as u32,
            words: self.words.len() as u32,
            letters: self.letters.len() as u32,
        }
    }

    pub fn total(&self, granularity: Granularity) -> u32 {
        let t = self.totals();
        match granularity {
            Granularity::Surah => t.surahs,
            Granularity::Ayah => t.ayahs,
            Granularity::Word => t.words,
            Granularity::Letter => t.letters,
        }
    }

    /// Serial counted from the end of the corpus at `granularity`.
    pub fn backward(&self, granularity: Granularity, forward: u32) -> u32 {
        backward(forward, self.total(granularity))
    }

    pub fn surahs(&self) -> &[SurahRecord] {
        &self.surahs
    }

    pub fn ayahs(&self) -> &[AyahRecord] {
        &self.ayahs
    }

    pub fn words(&self) -> &[WordRecord] {
        &self.words
    }

    pub fn letters(&self) -> &[LetterRecord] {
        &self.letters
    }

    pub fn unique_words(&self) -> &[UniqueWord] {
        &self.unique_words
    }

    pub fn surah(&self, surah_no: i64) -> Result<&SurahRecord> {
        at(&self.surahs, Granularity::Surah, surah_no)
    }

    pub fn ayah(&self, serial: i64) -> Result<&AyahRecord> {
        at(&self.ayahs, Granularity::Ayah, serial)
    }

    pub fn word(&self, serial: i64) -> Result<&WordRecord> {
        at(&self.words, Granularity::Word, serial)
    }

    pub fn letter(&self, serial: i64) -> Result<&LetterRecord> {
        at(&self.letters, Granularity::Letter, serial)
    }

    pub fn unique_word(&self, id: u32) -> Option<&UniqueWord> {
        self.unique_words.get((id as usize).wrapping_sub(1))
    }

    pub fn ayahs_in(&self, range: SerialRange) -> &[AyahRecord] {
        &self.ayahs[range.first as usize - 1..range.last as usize]
    }

    pub fn words_in(&self, range: SerialRange) -> &[WordRecord] {
        &self.words[range.first as usize - 1..range.last as usize]
    }

    pub fn letters_in(&self, range: SerialRange) -> &[LetterRecord] {
        &self.letters[range.first as usize - 1..range.last as usize]
    }

    pub fn page_count(&self) -> u32 {
        self.page_starts.len() as u32
    }

    pub fn juz_count(&self) -> u32 {
        self.juz_starts.len() as u32
    }

    pub fn rub_count(&self) -> u32 {
        self.rub_starts.len() as u32
    }

    /// Global serial of ayah `ayah_no_in_surah` of surah `surah_no`.
    pub fn locate_ayah(&self, surah_no: i64, ayah_no_in_surah: i64) -> Result<u32> {
        let unknown = Error::UnknownAyah {
            surah: surah_no,
            ayah: ayah_no_in_surah,
        };
        let surah = self.surah(surah_no).map_err(|_| Error::UnknownAyah {
            surah: surah_no,
            ayah: ayah_no_in_surah,
        })?;
        if ayah_no_in_surah < 1 || ayah_no_in_surah > surah.ayah_range.len() as i64 {
            return Err(unknown);
        }
        Ok(surah.ayah_range.first + ayah_no_in_surah as u32 - 1)
    }

    /// `(surah_no, ayah_no_in_surah)` of a global ayah serial.
    pub fn resolve_ayah(&self, serial: i64) -> Result<(u32, u32)> {
        let a = self.ayah(serial)?;
        Ok((a.surah_serial_no, a.ayah_no_in_surah))
    }

    /// Ayah serials displayed on `page_no`.
    pub fn page_ayahs(&self, page_no: i64) -> Result<RangeInclusive<u32>> {
        let first = *at(&self.page_starts, Granularity::Ayah, page_no).map_err(|_| Error::UnknownAnchor {
            kind: "page",
            value: page_no,
        })?;
        let last = self
            .page_starts
            .get(page_no as usize)
            .map(|next| next - 1)
            .unwrap_or(self.ayahs.len() as u32);
        Ok(first..=last)
    }

    /// Page and first ayah serial of a surah, juz, rub or page.
    pub fn navigate(&self, anchor: Anchor) -> Result<NavTarget> {
        let (kind, value, starts): (&'static str, i64, Option<&[u32]>) = match anchor {
            Anchor::Surah(n) => ("surah", n, None),
            Anchor::Juz(n) => ("juz", n, Some(&self.juz_starts)),
            Anchor::Rub(n) => ("rub", n, Some(&self.rub_starts)),
            Anchor::Page(n) => ("page", n, Some(&self.page_starts)),
        };
        let unknown = || Error::UnknownAnchor { kind, value };
        let ayah_serial_no = match starts {
            None => self.surah(value).map_err(|_| unknown())?.ayah_range.first,
            Some(starts) => {
                if value < 1 {
                    return Err(unknown());
                }
                *starts.get(value as usize - 1).ok_or_else(unknown)?
            }
        };
        Ok(NavTarget {
            page_no: self.ayahs[ayah_serial_no as usize - 1].page_no,
            ayah_serial_no,
        })
    }

    /// Moves `delta` pages from `current`, clamped to the mushaf bounds.
    pub fn step_page(&self, current: u32, delta: i64) -> u32 {
        let max = self.page_count().max(1) as i64;
        (current as i64).saturating_add(delta).clamp(1, max) as u32
    }

    /// Rub number within its juz (1-based), as printed in mushaf headers.
    pub fn rub_in_juz(&self, ayah: &AyahRecord) -> u32 {
        let juz_first = self.juz_starts[ayah.juz_no as usize - 1];
        let juz_first_rub = self.rub_starts.partition_point(|&s| s <= juz_first) as u32;
        ayah.rub_no - juz_first_rub + 1
    }
}
