//! Divergence report between this index's counting rules and the reference
//! totals of the Kufan 6236-ayah count.
//!
//! Ayah and surah totals must match exactly. Word and letter totals depend on
//! tokenization conventions; each known divergent convention is probed on the
//! index and listed with the count delta it accounts for. A metric passes when
//! its total delta stays under [`TOLERANCE_PCT`] of the reference.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::abjad::AbjadTable;
use crate::corpus::CorpusIndex;
use crate::stats::Stats;

pub const TOLERANCE_PCT: f64 = 0.5;

pub const REFERENCE_SURAHS: i64 = 114;
pub const REFERENCE_AYAHS: i64 = 6236;
pub const REFERENCE_WORDS: i64 = 77433;
pub const REFERENCE_LETTERS: i64 = 326159;
/// Jummal of the full text of surah 1.
pub const REFERENCE_OPENING_JUMMAL: i64 = 10143;

/// Bare forms written as one orthographic word that the reference count
/// splits into two.
const COMPOUND_FORMS: [&str; 3] = ["يبنؤم", "ويكأن", "ويكأنه"];

const TATWEEL: char = '\u{0640}';
const HAMZA_ABOVE: char = '\u{0654}';

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleProbe {
    pub rule: String,
    pub description: String,
    /// Change to the observed total if the reference convention were adopted.
    pub count_delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCheck {
    pub metric: String,
    pub reference: i64,
    pub observed: i64,
    pub delta: i64,
    pub delta_pct: f64,
    pub exact_required: bool,
    pub rules: Vec<RuleProbe>,
    /// Delta left after applying every probed rule.
    pub residual: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionsReport {
    pub corpus_hash: String,
    pub tolerance_pct: f64,
    pub metrics: Vec<MetricCheck>,
}

impl ConventionsReport {
    pub fn all_pass(&self) -> bool {
        self.metrics.iter().all(|m| m.pass)
    }

    pub fn metric(&self, name: &str) -> Option<&MetricCheck> {
        self.metrics.iter().find(|m| m.metric == name)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Counting conventions report\n");
        let _ = writeln!(s, "Generated by `mushaf conventions`. Do not edit by hand.\n");
        let _ = writeln!(s, "Corpus hash: `{}`\n", self.corpus_hash);
        let _ = writeln!(
            s,
            "Tolerance: word and letter totals may differ from the reference by less than {}%; \
             surah and ayah totals must match exactly.\n",
            self.tolerance_pct
        );
        let _ = writeln!(s, "| Metric | Reference | Observed | Delta | Delta % | Residual | Status |");
        let _ = writeln!(s, "|---|---:|---:|---:|---:|---:|---|");
        for m in &self.metrics {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {:+} | {:.4} | {:+} | {} |",
                m.metric,
                m.reference,
                m.observed,
                m.delta,
                m.delta_pct,
                m.residual,
                if m.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "\n## Divergent rules\n");
        let mut any = false;
        for m in &self.metrics {
            for r in &m.rules {
                any = true;
                let _ = writeln!(
                    s,
                    "- **{}** ({}, {:+}): {}",
                    r.rule, m.metric, r.count_delta, r.description
                );
            }
        }
        if !any {
            let _ = writeln!(s, "None.");
        }
        s
    }
}

fn check(metric: &str, reference: i64, observed: i64, exact: bool, rules: Vec<RuleProbe>) -> MetricCheck {
    let delta = observed - reference;
    let delta_pct = if reference == 0 {
        0.0
    } else {
        (delta as f64).abs() * 100.0 / reference as f64
    };
    let residual = delta + rules.iter().map(|r| r.count_delta).sum::<i64>();
    let pass = if exact { delta == 0 } else { delta_pct < TOLERANCE_PCT };
    MetricCheck {
        metric: metric.to_string(),
        reference,
        observed,
        delta,
        delta_pct,
        exact_required: exact,
        rules,
        residual,
        pass,
    }
}

/// Occurrences of compound forms kept as a single whitespace token.
pub fn compound_word_occurrences(index: &CorpusIndex) -> i64 {
    index
        .words()
        .iter()
        .filter(|w| COMPOUND_FORMS.contains(&w.text_no_tashkeel.as_str()))
        .count() as i64
}

/// Hamzas written above a tatweel seat. The hamza is a mark in the default
/// rules, so these contribute no base letter.
pub fn tatweel_hamza_seats(index: &CorpusIndex) -> i64 {
    let rules = index.rules();
    let mut n = 0;
    for w in index.words() {
        let mut on_tatweel = false;
        for c in w.text_with_tashkeel.chars() {
            if c == TATWEEL {
                on_tatweel = true;
            } else if c == HAMZA_ABOVE && on_tatweel {
                n += 1;
                on_tatweel = false;
            } else if rules.is_letter(c) {
                on_tatweel = false;
            }
        }
    }
    n
}

pub fn report(index: &CorpusIndex, table: &AbjadTable) -> ConventionsReport {
    let t = index.totals();
    let opening = index
        .surah(1)
        .map(|s| Stats::new(index, table).jummal_of_letters(s.letter_range) as i64)
        .unwrap_or(0);
    let compound = compound_word_occurrences(index);
    let seats = tatweel_hamza_seats(index);
    let metrics = vec![
        check("surahs", REFERENCE_SURAHS, t.surahs as i64, true, vec![]),
        check("ayahs", REFERENCE_AYAHS, t.ayahs as i64, true, vec![]),
        check(
            "words",
            REFERENCE_WORDS,
            t.words as i64,
            false,
            if compound > 0 {
                vec![RuleProbe {
                    rule: "compound-orthographic-words".into(),
                    description: format!(
                        "whitespace tokenization keeps {} as single words; the reference counts each as two",
                        COMPOUND_FORMS.join(", ")
                    ),
                    count_delta: compound,
                }]
            } else {
                vec![]
            },
        ),
        check(
            "letters",
            REFERENCE_LETTERS,
            t.letters as i64,
            false,
            if seats > 0 {
                vec![RuleProbe {
                    rule: "tatweel-hamza-seat".into(),
                    description: "hamza above a tatweel (U+0640 U+0654) is a mark under the letter-set rules; \
                                  the reference counts it as a letter"
                        .into(),
                    count_delta: seats,
                }]
            } else {
                vec![]
            },
        ),
        check("opening-surah-jummal", REFERENCE_OPENING_JUMMAL, opening, false, vec![]),
    ];
    ConventionsReport {
        corpus_hash: index.source_hash().to_string(),
        tolerance_pct: TOLERANCE_PCT,
        metrics,
    }
}
