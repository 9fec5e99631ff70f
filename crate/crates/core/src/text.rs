//! Character classes, normalization and tokenization of Arabic text.
//!
//! Every codepoint of an ayah falls into exactly one class: a base letter
//! (counted, carries an abjad value), a mark (tashkeel and Quranic
//! annotation signs, never counted) or whitespace. Anything else is rejected
//! at ingest time and passed through untouched by the helpers here.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Classification of a single codepoint under a [`TextRules`] set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharClass {
    Letter,
    Mark,
    Space,
    Other,
}

/// Tokenizer settings: which codepoints are letters and which are marks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRules {
    letters: Vec<RangeInclusive<char>>,
    marks: Vec<RangeInclusive<char>>,
}

impl Default for TextRules {
    fn default() -> Self {
        Self {
            letters: vec![
                '\u{0621}'..='\u{063A}',
                '\u{0641}'..='\u{064A}',
                '\u{0671}'..='\u{0671}',
            ],
            marks: vec![
                '\u{064B}'..='\u{065F}',
                '\u{0670}'..='\u{0670}',
                '\u{06D6}'..='\u{06ED}',
                '\u{0640}'..='\u{0640}',
            ],
        }
    }
}

impl TextRules {
    /// Builds a rule set from explicit ranges. Overlapping letter and mark
    /// ranges are rejected.
    pub fn new(
        letters: Vec<RangeInclusive<char>>,
        marks: Vec<RangeInclusive<char>>,
    ) -> Result<Self, String> {
        for l in &letters {
            for m in &marks {
                if l.start() <= m.end() && m.start() <= l.end() {
                    return Err(format!(
                        "letter range U+{:04X}..U+{:04X} overlaps mark range U+{:04X}..U+{:04X}",
                        *l.start() as u32,
                        *l.end() as u32,
                        *m.start() as u32,
                        *m.end() as u32
                    ));
                }
            }
        }
        Ok(Self { letters, marks })
    }

    pub fn is_letter(&self, c: char) -> bool {
        self.letters.iter().any(|r| r.contains(&c))
    }

    pub fn is_mark(&self, c: char) -> bool {
        self.marks.iter().any(|r| r.contains(&c))
    }

    pub fn classify(&self, c: char) -> CharClass {
        if self.is_letter(c) {
            CharClass::Letter
        } else if self.is_mark(c) {
            CharClass::Mark
        } else if c.is_whitespace() {
            CharClass::Space
        } else {
            CharClass::Other
        }
    }

    /// Removes every mark, keeping letters, whitespace and unknown codepoints
    /// in their original order. Input is NFC-normalized first.
    pub fn strip_tashkeel(&self, text: &str) -> String {
        text.nfc().filter(|&c| !self.is_mark(c)).collect()
    }

    /// Number of base letters in `text`.
    pub fn letter_count(&self, text: &str) -> usize {
        text.chars().filter(|&c| self.is_letter(c)).count()
    }

    /// The base letters of `text`, in order.
    pub fn letters<'a>(&'a self, text: &'a str) -> impl Iterator<Item = char> + 'a {
        text.chars().filter(move |&c| self.is_letter(c))
    }

    /// Splits `text` into letter clusters: each base letter followed by the
    /// marks that trail it. Marks with no preceding letter in the same word
    /// are dropped; whitespace ends a cluster.
    pub fn letter_clusters(&self, text: &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut open = false;
        for c in text.chars() {
            match self.classify(c) {
                CharClass::Letter => {
                    out.push(c.to_string());
                    open = true;
                }
                CharClass::Mark => {
                    if open {
                        if let Some(last) = out.last_mut() {
                            last.push(c);
                        }
                    }
                }
                CharClass::Space | CharClass::Other => open = false,
            }
        }
        out
    }
}

/// NFC normalization applied to all text entering the index.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

/// Strips tashkeel under the default rule set.
pub fn strip_tashkeel(text: &str) -> String {
    TextRules::default().strip_tashkeel(text)
}

/// Splits an ayah on whitespace runs. Never yields empty tokens.
pub fn tokenize_ayah(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Character-offset spans (half-open, in chars) of each whitespace token.
pub fn token_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    let mut pos = 0;
    for c in text.chars() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                spans.push((s, pos));
            }
        } else if start.is_none() {
            start = Some(pos);
        }
        pos += 1;
    }
    if let Some(s) = start {
        spans.push((s, pos));
    }
    spans
}

/// Substring by half-open char offsets. Offsets past the end are clamped.
pub fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let mut indices = text.char_indices().map(|(i, _)| i).chain(std::iter::once(text.len()));
    let from = indices.nth(start).unwrap_or(text.len());
    let to = if end > start {
        indices.nth(end - start - 1).unwrap_or(text.len())
    } else {
        from
    };
    &text[from..to]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_basmala_first_word() {
        assert_eq!(strip_tashkeel("بِسْمِ"), "بسم");
    }

    #[test]
    fn strips_dagger_alef_from_rahman() {
        let stripped = strip_tashkeel("ٱلرَّحْمَٰنِ");
        let letters: Vec<char> = stripped.chars().collect();
        assert_eq!(letters, vec!['ٱ', 'ل', 'ر', 'ح', 'م', 'ن']);
    }

    #[test]
    fn strips_empty() {
        assert_eq!(strip_tashkeel(""), "");
    }

    #[test]
    fn tatweel_and_annotation_marks_are_stripped() {
        // tatweel + hamza above, small high rounded zero, small waw
        assert_eq!(strip_tashkeel("بِـَٔايَٰتِنَا۟"), "بايتنا");
        assert_eq!(strip_tashkeel("لَهُۥ"), "له");
    }

    #[test]
    fn unknown_codepoints_pass_through() {
        assert_eq!(strip_tashkeel("abc بِ"), "abc ب");
    }

    #[test]
    fn nfc_composes_alef_with_hamza() {
        let decomposed = "\u{0627}\u{0654}";
        assert_eq!(normalize(decomposed), "\u{0623}");
        assert_eq!(TextRules::default().letter_count(&normalize(decomposed)), 1);
    }

    #[test]
    fn tokenizes_basmala_into_four() {
        assert_eq!(tokenize_ayah("بِسْمِ ٱللَّهِ ٱلرَّحْمَٰنِ ٱلرَّحِيمِ").len(), 4);
    }

    #[test]
    fn tokenizes_single_word() {
        assert_eq!(tokenize_ayah("بِسْمِ"), vec!["بِسْمِ"]);
    }

    #[test]
    fn tokenizes_fatiha_seven_into_nine() {
        let ayah = "صِرَٰطَ ٱلَّذِينَ أَنْعَمْتَ عَلَيْهِمْ غَيْرِ ٱلْمَغْضُوبِ عَلَيْهِمْ وَلَا ٱلضَّآلِّينَ";
        assert_eq!(tokenize_ayah(ayah).len(), 9);
    }

    #[test]
    fn tokenize_collapses_whitespace_runs() {
        assert_eq!(tokenize_ayah("  ا \t ب  "), vec!["ا", "ب"]);
        assert!(tokenize_ayah("   ").is_empty());
    }

    #[test]
    fn clusters_attach_trailing_marks() {
        let rules = TextRules::default();
        assert_eq!(rules.letter_clusters("بِسْمِ"), vec!["بِ", "سْ", "مِ"]);
        assert_eq!(rules.letter_clusters("ِب ِس"), vec!["ب", "س"]);
    }

    #[test]
    fn spans_and_slices_agree() {
        let text = "ab  cde f";
        let spans = token_spans(text);
        assert_eq!(spans, vec![(0, 2), (4, 7), (8, 9)]);
        let words: Vec<&str> = spans.iter().map(|&(s, e)| char_slice(text, s, e)).collect();
        assert_eq!(words, tokenize_ayah(text));
        assert_eq!(char_slice("بِسْمِ", 0, 2), "بِ");
        assert_eq!(char_slice("abc", 1, 10), "bc");
        assert_eq!(char_slice("abc", 2, 2), "");
    }

    #[test]
    fn overlapping_rules_rejected() {
        assert!(TextRules::new(vec!['a'..='f'], vec!['e'..='g']).is_err());
        assert!(TextRules::new(vec!['a'..='d'], vec!['e'..='g']).is_ok());
    }
}
