//! Text Splitter: break a surah, ayah, word or selection into words or
//! letters, with or without tashkeel, optionally grouped with counts.

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusIndex, Selection};
use crate::error::Result;
use crate::stats::SelectedSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitTarget {
    Surah(i64),
    Ayah(i64),
    Word(i64),
    Selection(Selection),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitUnit {
    Letters,
    Words,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TashkeelMode {
    With,
    Without,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grouping {
    None,
    Grouped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRequest {
    pub target: SplitTarget,
    pub unit: SplitUnit,
    pub tashkeel: TashkeelMode,
    pub grouping: Grouping,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitRow {
    pub row_no: u32,
    pub token: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRow {
    pub token: String,
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rows", rename_all = "lowercase")]
pub enum SplitResult {
    Ungrouped(Vec<SplitRow>),
    Grouped(Vec<GroupRow>),
}

impl SplitResult {
    /// Number of tokens before grouping.
    pub fn token_count(&self) -> u32 {
        match self {
            SplitResult::Ungrouped(rows) => rows.len() as u32,
            SplitResult::Grouped(rows) => rows.iter().map(|r| r.count).sum(),
        }
    }
}

/// Vocalized and bare text of each word covered by the target, in corpus
/// order. Selections clip their boundary words.
fn target_words(index: &CorpusIndex, target: &SplitTarget) -> Result<Vec<(String, String)>> {
    let rules = index.rules();
    let from_words = |range| {
        index
            .words_in(range)
            .iter()
            .map(|w| (w.text_with_tashkeel.clone(), w.text_no_tashkeel.clone()))
            .collect()
    };
    Ok(match *target {
        SplitTarget::Surah(n) => from_words(index.surah(n)?.word_range),
        SplitTarget::Ayah(s) => from_words(index.ayah(s)?.word_range),
        SplitTarget::Word(s) => {
            let w = index.word(s)?;
            vec![(w.text_with_tashkeel.clone(), w.text_no_tashkeel.clone())]
        }
        SplitTarget::Selection(sel) => SelectedSpan::resolve(index, &sel)?
            .words
            .into_iter()
            .map(|w| (w.to_string(), rules.strip_tashkeel(w)))
            .collect(),
    })
}

pub fn split(index: &CorpusIndex, request: &SplitRequest) -> Result<SplitResult> {
    let rules = index.rules();
    let words = target_words(index, &request.target)?;
    let tokens: Vec<String> = match (request.unit, request.tashkeel) {
        (SplitUnit::Words, TashkeelMode::With) => words.into_iter().map(|(w, _)| w).collect(),
        (SplitUnit::Words, TashkeelMode::Without) => words.into_iter().map(|(_, b)| b).collect(),
        (SplitUnit::Letters, TashkeelMode::With) => words
            .iter()
            .flat_map(|(w, _)| rules.letter_clusters(w))
            .collect(),
        (SplitUnit::Letters, TashkeelMode::Without) => words
            .iter()
            .flat_map(|(_, b)| rules.letters(b).map(String::from).collect::<Vec<_>>())
            .collect(),
    };
    Ok(match request.grouping {
        Grouping::None => SplitResult::Ungrouped(
            tokens
                .into_iter()
                .enumerate()
                .map(|(i, token)| SplitRow {
                    row_no: i as u32 + 1,
                    token,
                })
                .collect(),
        ),
        Grouping::Grouped => SplitResult::Grouped(group_first_occurrence(tokens)),
    })
}

fn group_first_occurrence(tokens: Vec<String>) -> Vec<GroupRow> {
    let mut rows: Vec<GroupRow> = Vec::new();
    let mut slot: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for token in tokens {
        match slot.get(&token) {
            Some(&i) => rows[i].count += 1,
            None => {
                slot.insert(token.clone(), rows.len());
                rows.push(GroupRow { token, count: 1 });
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping_keeps_first_occurrence_order() {
        let toks = ["b", "a", "b", "c", "a", "b"].map(String::from).to_vec();
        let rows = group_first_occurrence(toks);
        let flat: Vec<(&str, u32)> = rows.iter().map(|r| (r.token.as_str(), r.count)).collect();
        assert_eq!(flat, vec![("b", 3), ("a", 2), ("c", 1)]);
    }

    #[test]
    fn request_json_shape() {
        let req = SplitRequest {
            target: SplitTarget::Surah(1),
            unit: SplitUnit::Letters,
            tashkeel: TashkeelMode::Without,
            grouping: Grouping::None,
        };
        let json = serde_json::to_string(&req).unwrap();
        assert_eq!(
            json,
            r#"{"target":{"surah":1},"unit":"letters","tashkeel":"without","grouping":"none"}"#
        );
        assert_eq!(serde_json::from_str::<SplitRequest>(&json).unwrap(), req);
    }
}
