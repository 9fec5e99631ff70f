//! Jummal (abjad) numeral values.

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{CharClass, TextRules};

const MASHRIQI: [(char, u32); 28] = [
    ('ا', 1),
    ('ب', 2),
    ('ج', 3),
    ('د', 4),
    ('ه', 5),
    ('و', 6),
    ('ز', 7),
    ('ح', 8),
    ('ط', 9),
    ('ي', 10),
    ('ك', 20),
    ('ل', 30),
    ('م', 40),
    ('ن', 50),
    ('س', 60),
    ('ع', 70),
    ('ف', 80),
    ('ص', 90),
    ('ق', 100),
    ('ر', 200),
    ('ش', 300),
    ('ت', 400),
    ('ث', 500),
    ('خ', 600),
    ('ذ', 700),
    ('ض', 800),
    ('ظ', 900),
    ('غ', 1000),
];

const FOLDS: [(char, char); 9] = [
    ('أ', 'ا'),
    ('إ', 'ا'),
    ('آ', 'ا'),
    ('ٱ', 'ا'),
    ('ء', 'ا'),
    ('ة', 'ه'),
    ('ى', 'ي'),
    ('ئ', 'ي'),
    ('ؤ', 'و'),
];

/// Letter → value mapping plus variant folding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbjadTable {
    values: BTreeMap<char, u32>,
    folds: BTreeMap<char, char>,
}

impl Default for AbjadTable {
    fn default() -> Self {
        Self::mashriqi()
    }
}

impl AbjadTable {
    /// The Mashriqi ordering (ا=1 … غ=1000) with hamza seats folded onto
    /// their carrier and standalone hamza folded to alef.
    pub fn mashriqi() -> Self {
        Self {
            values: MASHRIQI.into_iter().collect(),
            folds: FOLDS.into_iter().collect(),
        }
    }

    /// Base letter a variant folds to (identity for base letters).
    pub fn fold(&self, c: char) -> char {
        self.folds.get(&c).copied().unwrap_or(c)
    }

    pub fn value_of(&self, c: char) -> Option<u32> {
        self.values.get(&self.fold(c)).copied()
    }

    /// Assigns a value directly to `letter`, dropping any fold for it.
    pub fn set_value(&mut self, letter: char, value: u32) -> Result<()> {
        if value == 0 {
            return Err(Error::AbjadTable(format!("value for {letter} must be positive")));
        }
        self.folds.remove(&letter);
        self.values.insert(letter, value);
        Ok(())
    }

    pub fn set_fold(&mut self, variant: char, base: char) -> Result<()> {
        if !self.values.contains_key(&base) {
            return Err(Error::AbjadTable(format!("fold target {base} has no value")));
        }
        self.values.remove(&variant);
        self.folds.insert(variant, base);
        Ok(())
    }

    /// Letters of `rules` that have no value after folding.
    pub fn uncovered(&self, rules: &TextRules) -> Vec<char> {
        ('\u{0600}'..='\u{06FF}')
            .filter(|&c| rules.is_letter(c) && self.value_of(c).is_none())
            .collect()
    }

    /// Applies `letter<TAB>value` overrides on top of this table. Blank and
    /// `#` lines are skipped.
    pub fn apply_tsv<R: BufRead>(&mut self, reader: R) -> Result<()> {
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: String| Error::AbjadTable(format!("line {}: {m}", i + 1));
            let (letter, value) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected letter<TAB>value".into()))?;
            let mut chars = letter.trim().chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(bad(format!("{letter:?} is not a single letter")));
            };
            let value: u32 = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("{value:?} is not a positive integer")))?;
            self.set_value(c, value).map_err(|e| bad(e.to_string()))?;
        }
        Ok(())
    }
}

/// Sum of the abjad values of the letters of `text`. Marks and whitespace
/// contribute nothing; any other codepoint is an error.
pub fn jummal_with(text: &str, table: &AbjadTable, rules: &TextRules) -> Result<u64> {
    let mut sum = 0u64;
    for c in crate::text::normalize(text).chars() {
        match rules.classify(c) {
            CharClass::Letter => {
                sum += table.value_of(c).ok_or(Error::NotAbjad(c as u32))? as u64;
            }
            CharClass::Mark | CharClass::Space => {}
            CharClass::Other => return Err(Error::NotAbjad(c as u32)),
        }
    }
    Ok(sum)
}

/// [`jummal_with`] under the default letter and mark sets.
pub fn jummal(text: &str, table: &AbjadTable) -> Result<u64> {
    jummal_with(text, table, &TextRules::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surah_names() {
        let t = AbjadTable::mashriqi();
        assert_eq!(jummal("الفاتحة", &t).unwrap(), 525);
        assert_eq!(jummal("سورة الفاتحة", &t).unwrap(), 796);
        // vocalized forms as printed in the stats header
        assert_eq!(jummal("الفَاتِحَة", &t).unwrap(), 525);
        assert_eq!(jummal("سُورَةُ الْفَاتِحَةِ", &t).unwrap(), 796);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(jummal("", &AbjadTable::default()).unwrap(), 0);
        assert_eq!(jummal("   ", &AbjadTable::default()).unwrap(), 0);
    }

    #[test]
    fn basmala() {
        // ب2 س60 م40 | ا1 ل30 ل30 ه5 | ا1 ل30 ر200 ح8 م40 ن50 | ا1 ل30 ر200 ح8 ي10 م40
        let oracle: u64 = [2, 60, 40, 1, 30, 30, 5, 1, 30, 200, 8, 40, 50, 1, 30, 200, 8, 10, 40]
            .iter()
            .sum();
        assert_eq!(oracle, 786);
        let t = AbjadTable::mashriqi();
        assert_eq!(jummal("بِسْمِ ٱللَّهِ ٱلرَّحْمَٰنِ ٱلرَّحِيمِ", &t).unwrap(), oracle);
    }

    #[test]
    fn first_word_of_basmala() {
        assert_eq!(jummal("بِسْمِ", &AbjadTable::default()).unwrap(), 102);
    }

    #[test]
    fn rejects_foreign_codepoints() {
        let err = jummal("abc", &AbjadTable::default()).unwrap_err();
        assert!(matches!(err, Error::NotAbjad(0x61)));
    }

    #[test]
    fn default_table_covers_letter_set() {
        let t = AbjadTable::mashriqi();
        assert!(t.uncovered(&TextRules::default()).is_empty(), "{:?}", t.uncovered(&TextRules::default()));
        assert_eq!(t.value_of('ء'), Some(1));
        assert_eq!(t.value_of('ة'), Some(5));
        assert_eq!(t.value_of('ؤ'), Some(6));
    }

    #[test]
    fn hamza_convention_is_configurable() {
        let mut t = AbjadTable::mashriqi();
        t.set_value('ء', 3).unwrap();
        assert_eq!(jummal("ء", &t).unwrap(), 3);
        assert!(t.set_value('ء', 0).is_err());
        t.set_fold('ء', 'ا').unwrap();
        assert_eq!(jummal("ء", &t).unwrap(), 1);
    }

    #[test]
    fn tsv_override() {
        let mut t = AbjadTable::mashriqi();
        t.apply_tsv("# comment\nغ\t2000\n".as_bytes()).unwrap();
        assert_eq!(t.value_of('غ'), Some(2000));
        assert!(t.apply_tsv("غغ\t1\n".as_bytes()).is_err());
        assert!(t.apply_tsv("غ\tx\n".as_bytes()).is_err());
        assert!(t.apply_tsv("غ 5\n".as_bytes()).is_err());
    }
}
