//! Stats Manager reports at surah, ayah, word and selection granularity.
//!
//! Row labels and their order are fixed per granularity so that reports are
//! bit-stable for a given corpus. The surah report reproduces the classic
//! 23-row matrix; the ayah, word and selection compositions mirror it.

use serde::{Deserialize, Serialize};

use crate::abjad::AbjadTable;
use crate::corpus::{CorpusIndex, SerialRange, Selection};
use crate::error::{Error, Granularity, Result};
use crate::text::{char_slice, token_spans};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Surah,
    Ayah,
    Word,
    Selection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StatValue {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatRow {
    pub label: String,
    pub value: StatValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub granularity: ReportKind,
    pub rows: Vec<StatRow>,
}

impl StatsReport {
    fn new(granularity: ReportKind) -> Self {
        Self {
            granularity,
            rows: Vec::new(),
        }
    }

    fn int(&mut self, label: &str, value: impl Into<i64>) -> &mut Self {
        self.rows.push(StatRow {
            label: label.to_string(),
            value: StatValue::Int(value.into()),
        });
        self
    }

    fn text(&mut self, label: &str, value: &str) -> &mut Self {
        self.rows.push(StatRow {
            label: label.to_string(),
            value: StatValue::Text(value.to_string()),
        });
        self
    }

    pub fn get(&self, label: &str) -> Option<&StatValue> {
        self.rows.iter().find(|r| r.label == label).map(|r| &r.value)
    }

    pub fn get_int(&self, label: &str) -> Option<i64> {
        match self.get(label)? {
            StatValue::Int(v) => Some(*v),
            StatValue::Text(_) => None,
        }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.label.as_str()).collect()
    }
}

/// Read-only report builder over an index and an abjad table.
#[derive(Clone, Copy)]
pub struct Stats<'a> {
    index: &'a CorpusIndex,
    table: &'a AbjadTable,
}

impl<'a> Stats<'a> {
    pub fn new(index: &'a CorpusIndex, table: &'a AbjadTable) -> Self {
        Self { index, table }
    }

    fn letter_value(&self, c: char) -> u64 {
        // every indexed letter is in the letter set; tables lacking a value
        // for one were rejected when the service or CLI started
        self.table.value_of(c).unwrap_or(0) as u64
    }

    /// Jummal over a range of indexed letters.
    pub fn jummal_of_letters(&self, range: SerialRange) -> u64 {
        self.index
            .letters_in(range)
            .iter()
            .map(|l| self.letter_value(l.letter))
            .sum()
    }

    fn jummal_text(&self, text: &str) -> Result<i64> {
        crate::abjad::jummal_with(text, self.table, self.index.rules()).map(|v| v as i64)
    }

    fn serial_rows(
        &self,
        report: &mut StatsReport,
        what: &str,
        within: &str,
        g: Granularity,
        range: SerialRange,
    ) {
        let total = self.index.total(g);
        let bwd = |s: u32| crate::corpus::backward(s, total);
        report
            .int(&format!("First {what} in {within} Serial No"), range.first)
            .int(&format!("First {what} in {within} Serial No (Backward)"), bwd(range.first))
            .int(&format!("Last {what} in {within} Serial No"), range.last)
            .int(&format!("Last {what} in {within} Serial No (Backward)"), bwd(range.last))
            .int(&format!("{what} Count"), range.len());
    }

    pub fn surah(&self, surah_no: i64) -> Result<StatsReport> {
        let s = self.index.surah(surah_no)?;
        let mut r = StatsReport::new(ReportKind::Surah);
        r.int("Surah Serial No", s.surah_serial_no)
            .int("Surah Serial No (Backward)", s.surah_serial_no_backward)
            .text("Surah Name", &s.name)
            .int("Jummal Value of Surah Name", self.jummal_text(&s.name)?)
            .text("Surah Full Name", &s.full_name)
            .int("Jummal Value of Full Surah Name", self.jummal_text(&s.full_name)?)
            .int("Jummal Value of Surah Text", self.jummal_of_letters(s.letter_range) as i64)
            .int("Revelation Sequence No", s.revelation_sequence_no);
        self.serial_rows(&mut r, "Ayah", "Surah", Granularity::Ayah, s.ayah_range);
        self.serial_rows(&mut r, "Word", "Surah", Granularity::Word, s.word_range);
        self.serial_rows(&mut r, "Letter", "Surah", Granularity::Letter, s.letter_range);
        Ok(r)
    }

    pub fn ayah(&self, serial: i64) -> Result<StatsReport> {
        let a = self.index.ayah(serial)?;
        let s = self.index.surah(a.surah_serial_no as i64)?;
        let mut r = StatsReport::new(ReportKind::Ayah);
        r.int("Ayah Serial No", a.ayah_serial_no)
            .int("Ayah Serial No (Backward)", self.index.backward(Granularity::Ayah, a.ayah_serial_no))
            .int("Ayah No in Surah", a.ayah_no_in_surah)
            .int(
                "Ayah No in Surah (Backward)",
                crate::corpus::backward(a.ayah_no_in_surah, s.ayah_range.len()),
            )
            .int("Surah Serial No", s.surah_serial_no)
            .text("Surah Name", &s.name)
            .int("Jummal Value of Ayah Text", self.jummal_of_letters(a.letter_range) as i64);
        self.serial_rows(&mut r, "Word", "Ayah", Granularity::Word, a.word_range);
        self.serial_rows(&mut r, "Letter", "Ayah", Granularity::Letter, a.letter_range);
        r.int("Page No", a.page_no).int("Juz No", a.juz_no).int("Rub No", a.rub_no);
        Ok(r)
    }

    pub fn word(&self, serial: i64) -> Result<StatsReport> {
        let w = self.index.word(serial)?;
        let a = self.index.ayah(w.ayah_serial_no as i64)?;
        let s = self.index.surah(w.surah_serial_no as i64)?;
        let unique = self
            .index
            .unique_word(w.unique_word_id)
            .expect("word references a known unique form");
        let in_surah = self
            .index
            .words_in(s.word_range)
            .iter()
            .filter(|x| x.unique_word_id == w.unique_word_id)
            .count() as i64;
        let mut r = StatsReport::new(ReportKind::Word);
        r.int("Word Serial No", w.word_serial_no)
            .int("Word Serial No (Backward)", self.index.backward(Granularity::Word, w.word_serial_no))
            .int("Word No in Ayah", w.word_no_in_ayah)
            .int("Word No in Surah", w.word_no_in_surah)
            .text("Word", &w.text_with_tashkeel)
            .text("Word (No Tashkeel)", &w.text_no_tashkeel)
            .int("Unique Word Id", w.unique_word_id)
            .int("Occurrence Count in Quran", unique.occurrence_count)
            .int("Occurrence Count in Surah", in_surah)
            .int("Jummal Value of Word", self.jummal_of_letters(w.letter_range) as i64);
        self.serial_rows(&mut r, "Letter", "Word", Granularity::Letter, w.letter_range);
        r.int("Ayah Serial No", a.ayah_serial_no)
            .int("Ayah No in Surah", a.ayah_no_in_surah)
            .int("Surah Serial No", s.surah_serial_no)
            .text("Surah Name", &s.name);
        Ok(r)
    }

    pub fn selection(&self, sel: &Selection) -> Result<StatsReport> {
        let span = SelectedSpan::resolve(self.index, sel)?;
        let rules = self.index.rules();
        let letters: Vec<char> = rules.letters(span.text).collect();
        let jummal: u64 = letters.iter().map(|&c| self.letter_value(c)).sum();
        let mut r = StatsReport::new(ReportKind::Selection);
        r.text("Selected Text", span.text)
            .int("Word Count", span.words.len() as i64)
            .int("Letter Count", letters.len() as i64)
            .int("Jummal Value of Selection", jummal as i64);
        Ok(r)
    }
}

/// A validated selection: the selected substring and the char spans of the
/// tokens it touches, clipped to the selection.
pub(crate) struct SelectedSpan<'a> {
    pub text: &'a str,
    pub words: Vec<&'a str>,
}

impl<'a> SelectedSpan<'a> {
    pub fn resolve(index: &'a CorpusIndex, sel: &Selection) -> Result<Self> {
        let ayah = index
            .ayah(sel.ayah_serial_no as i64)
            .map_err(|_| Error::InvalidSelection(format!("ayah {} does not exist", sel.ayah_serial_no)))?;
        let text = ayah.text_with_tashkeel.as_str();
        let len = text.chars().count();
        if sel.start_offset >= sel.end_offset || sel.end_offset > len {
            return Err(Error::InvalidSelection(format!(
                "offsets {}..{} outside 0..{len} or empty",
                sel.start_offset, sel.end_offset
            )));
        }
        let words = token_spans(text)
            .into_iter()
            .filter(|&(s, e)| s < sel.end_offset && e > sel.start_offset)
            .map(|(s, e)| char_slice(text, s.max(sel.start_offset), e.min(sel.end_offset)))
            .collect();
        Ok(Self {
            text: char_slice(text, sel.start_offset, sel.end_offset),
            words,
        })
    }
}
