use std::collections::HashMap;
use std::io::BufRead;

use sha2::{Digest, Sha256};

use super::index::CorpusIndex;
use super::metadata::{LayoutRow, Metadata};
use super::model::*;
use crate::error::{Error, Result};
use crate::text::{CharClass, TextRules, normalize, tokenize_ayah};

struct RawAyah {
    surah: u32,
    ayah: u32,
    text: String,
}

fn parse_line(line_no: usize, line: &str, rules: &TextRules) -> Result<RawAyah> {
    let malformed = |reason: &str| Error::MalformedLine {
        line: line_no,
        reason: reason.to_string(),
    };
    let mut parts = line.splitn(3, '|');
    let (Some(s), Some(a), Some(text)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(malformed("expected surah|ayah|text"));
    };
    let surah: u32 = s.trim().parse().map_err(|_| malformed("surah is not a positive integer"))?;
    let ayah: u32 = a.trim().parse().map_err(|_| malformed("ayah is not a positive integer"))?;
    if surah == 0 || ayah == 0 {
        return Err(malformed("surah and ayah numbers start at 1"));
    }
    let text = normalize(text.trim());
    if let Some(c) = text.chars().find(|&c| rules.classify(c) == CharClass::Other) {
        return Err(Error::UnknownCodepoint {
            line: line_no,
            codepoint: c as u32,
        });
    }
    let tokens = tokenize_ayah(&text);
    if tokens.is_empty() {
        return Err(malformed("empty ayah text"));
    }
    if let Some(t) = tokens.iter().find(|t| rules.letter_count(t) == 0) {
        return Err(malformed(&format!("token {t:?} has no base letter")));
    }
    Ok(RawAyah { surah, ayah, text })
}

fn read_corpus<R: BufRead>(corpus: R, rules: &TextRules, hasher: &mut Sha256) -> Result<Vec<RawAyah>> {
    let mut out: Vec<RawAyah> = Vec::new();
    for (i, line) in corpus.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let raw = parse_line(line_no, line, rules)?;
        let (expected_surah, expected_ayah) = match out.last() {
            None => (1, 1),
            Some(prev) => (prev.surah, prev.ayah + 1),
        };
        let in_sequence = (raw.surah == expected_surah && raw.ayah == expected_ayah)
            || (!out.is_empty() && raw.surah == expected_surah + 1 && raw.ayah == 1);
        if !in_sequence {
            return Err(Error::OutOfSequence {
                line: line_no,
                expected_surah,
                expected_ayah,
                next_surah: expected_surah + 1,
                surah: raw.surah,
                ayah: raw.ayah,
            });
        }
        out.push(raw);
    }
    if out.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(out)
}

/// Resolves layout rows to ayah start serials, checking density and order.
fn layout_starts(
    file: &str,
    rows: &[LayoutRow],
    surah_first_ayah: &[u32],
    surah_ayah_count: &[u32],
) -> Result<Vec<u32>> {
    let bad = |line: usize, reason: String| Error::Metadata {
        file: file.to_string(),
        line,
        reason,
    };
    if rows.is_empty() {
        return Err(bad(0, "layout table is empty".into()));
    }
    let mut starts = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let s = row.surah_no as usize;
        if s == 0 || s > surah_first_ayah.len() || row.ayah_no == 0 || row.ayah_no > surah_ayah_count[s - 1] {
            return Err(bad(
                i + 1,
                format!("unit {} starts at unknown ayah {}:{}", row.unit_no, row.surah_no, row.ayah_no),
            ));
        }
        let serial = surah_first_ayah[s - 1] + row.ayah_no - 1;
        if i == 0 && serial != 1 {
            return Err(bad(1, "first unit must start at ayah 1:1".into()));
        }
        if let Some(&prev) = starts.last() {
            if serial <= prev {
                return Err(bad(
                    i + 1,
                    format!("unit {} does not start after unit {}", row.unit_no, row.unit_no - 1),
                ));
            }
        }
        starts.push(serial);
    }
    Ok(starts)
}

fn unit_of(starts: &[u32], serial: u32) -> u32 {
    starts.partition_point(|&s| s <= serial) as u32
}

/// Builds the immutable index from a `surah|ayah|text` line stream plus
/// surah and layout metadata. Deterministic: identical inputs yield
/// identical indexes.
pub fn ingest<R: BufRead>(corpus: R, metadata: &Metadata, rules: &TextRules) -> Result<CorpusIndex> {
    let mut hasher = Sha256::new();
    let raw = read_corpus(corpus, rules, &mut hasher)?;
    hasher.update(serde_json::to_vec(metadata).expect("metadata serializes"));
    hasher.update(serde_json::to_vec(rules).expect("rules serialize"));
    let source_hash = hex::encode(hasher.finalize());

    let total_surahs = raw.last().map(|r| r.surah).unwrap_or(0);
    if metadata.surahs.len() < total_surahs as usize {
        return Err(Error::MissingSurahMetadata(metadata.surahs.len() as u32 + 1));
    }
    if metadata.surahs.len() > total_surahs as usize {
        return Err(Error::Metadata {
            file: "surahs".into(),
            line: total_surahs as usize + 1,
            reason: format!(
                "metadata lists {} surahs but the corpus has {total_surahs}",
                metadata.surahs.len()
            ),
        });
    }

    let mut surah_first_ayah = vec![0u32; total_surahs as usize];
    let mut surah_ayah_count = vec![0u32; total_surahs as usize];
    for (i, r) in raw.iter().enumerate() {
        let s = r.surah as usize - 1;
        if r.ayah == 1 {
            surah_first_ayah[s] = i as u32 + 1;
        }
        surah_ayah_count[s] += 1;
    }
    let page_starts = layout_starts("pages", &metadata.pages, &surah_first_ayah, &surah_ayah_count)?;
    let juz_starts = layout_starts("juz", &metadata.juz, &surah_first_ayah, &surah_ayah_count)?;
    let rub_starts = layout_starts("rub", &metadata.rubs, &surah_first_ayah, &surah_ayah_count)?;

    let mut ayahs = Vec::with_capacity(raw.len());
    let mut words: Vec<WordRecord> = Vec::new();
    let mut letters: Vec<LetterRecord> = Vec::new();
    let mut unique_words: Vec<UniqueWord> = Vec::new();
    let mut unique_ids: HashMap<String, u32> = HashMap::new();
    let mut word_no_in_surah = 0u32;

    for (i, r) in raw.iter().enumerate() {
        let ayah_serial_no = i as u32 + 1;
        if r.ayah == 1 {
            word_no_in_surah = 0;
        }
        let first_word = words.len() as u32 + 1;
        let first_letter = letters.len() as u32 + 1;
        for (w, token) in tokenize_ayah(&r.text).into_iter().enumerate() {
            let word_serial_no = words.len() as u32 + 1;
            word_no_in_surah += 1;
            let word_first_letter = letters.len() as u32 + 1;
            for letter in rules.letters(token) {
                letters.push(LetterRecord {
                    letter_serial_no: letters.len() as u32 + 1,
                    word_serial_no,
                    letter,
                });
            }
            let no_tashkeel = rules.strip_tashkeel(token);
            let unique_word_id = match unique_ids.get(token) {
                Some(&id) => {
                    unique_words[id as usize - 1].occurrence_count += 1;
                    id
                }
                None => {
                    let id = unique_words.len() as u32 + 1;
                    unique_ids.insert(token.to_string(), id);
                    unique_words.push(UniqueWord {
                        unique_word_id: id,
                        form: token.to_string(),
                        form_no_tashkeel: no_tashkeel.clone(),
                        occurrence_count: 1,
                    });
                    id
                }
            };
            words.push(WordRecord {
                word_serial_no,
                word_no_in_ayah: w as u32 + 1,
                word_no_in_surah,
                ayah_serial_no,
                surah_serial_no: r.surah,
                text_with_tashkeel: token.to_string(),
                text_no_tashkeel: no_tashkeel,
                unique_word_id,
                letter_range: SerialRange::new(word_first_letter, letters.len() as u32),
            });
        }
        ayahs.push(AyahRecord {
            ayah_serial_no,
            ayah_no_in_surah: r.ayah,
            surah_serial_no: r.surah,
            text_no_tashkeel: rules.strip_tashkeel(&r.text),
            text_with_tashkeel: r.text.clone(),
            word_range: SerialRange::new(first_word, words.len() as u32),
            letter_range: SerialRange::new(first_letter, letters.len() as u32),
            page_no: unit_of(&page_starts, ayah_serial_no),
            juz_no: unit_of(&juz_starts, ayah_serial_no),
            rub_no: unit_of(&rub_starts, ayah_serial_no),
        });
    }

    let mut surahs = Vec::with_capacity(total_surahs as usize);
    for (s, meta) in metadata.surahs.iter().enumerate() {
        let first = surah_first_ayah[s];
        let last = first + surah_ayah_count[s] - 1;
        let (a0, a1) = (&ayahs[first as usize - 1], &ayahs[last as usize - 1]);
        surahs.push(SurahRecord {
            surah_serial_no: s as u32 + 1,
            surah_serial_no_backward: backward(s as u32 + 1, total_surahs),
            name: meta.name.clone(),
            full_name: meta.full_name.clone(),
            revelation_sequence_no: meta.revelation_sequence_no,
            ayah_range: SerialRange::new(first, last),
            word_range: SerialRange::new(a0.word_range.first, a1.word_range.last),
            letter_range: SerialRange::new(a0.letter_range.first, a1.letter_range.last),
        });
    }

    Ok(CorpusIndex::from_parts(
        source_hash,
        rules.clone(),
        surahs,
        ayahs,
        words,
        letters,
        unique_words,
        page_starts,
        juz_starts,
        rub_starts,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(n: u32) -> Metadata {
        let row = LayoutRow {
            unit_no: 1,
            surah_no: 1,
            ayah_no: 1,
        };
        Metadata {
            surahs: (1..=n)
                .map(|i| super::super::metadata::SurahMeta {
                    serial: i,
                    name: "ب".into(),
                    full_name: "سورة ب".into(),
                    revelation_sequence_no: i,
                })
                .collect(),
            pages: vec![row],
            juz: vec![row],
            rubs: vec![row],
        }
    }

    fn run(corpus: &str, n: u32) -> Result<CorpusIndex> {
        ingest(corpus.as_bytes(), &meta(n), &TextRules::default())
    }

    #[test]
    fn empty_stream_is_an_error() {
        assert!(matches!(run("", 1), Err(Error::EmptyCorpus)));
        assert!(matches!(run("# only a comment\n\n", 1), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = run("1|1|بسم\n1|two|بسم\n", 1).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 2, .. }), "{err}");
        let err = run("1|1\n", 1).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn gap_and_duplicate_are_rejected() {
        let gap = run("1|1|بسم\n1|3|بسم\n", 1).unwrap_err();
        assert!(matches!(gap, Error::OutOfSequence { line: 2, .. }), "{gap}");
        let dup = run("1|1|بسم\n1|1|بسم\n", 1).unwrap_err();
        assert!(matches!(dup, Error::OutOfSequence { line: 2, .. }));
        let skip_surah = run("1|1|بسم\n3|1|بسم\n", 3).unwrap_err();
        assert!(matches!(skip_surah, Error::OutOfSequence { .. }));
        let late_start = run("1|2|بسم\n", 1).unwrap_err();
        assert!(matches!(late_start, Error::OutOfSequence { line: 1, .. }));
    }

    #[test]
    fn missing_surah_metadata_is_rejected() {
        let err = run("1|1|بسم\n2|1|بسم\n", 1).unwrap_err();
        assert!(matches!(err, Error::MissingSurahMetadata(2)));
    }

    #[test]
    fn foreign_codepoints_are_rejected() {
        let err = run("1|1|بسم abc\n", 1).unwrap_err();
        assert!(matches!(err, Error::UnknownCodepoint { line: 1, codepoint: 0x61 }));
    }

    #[test]
    fn mark_only_token_is_rejected() {
        let err = run("1|1|بسم ۞\n", 1).unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn comments_and_crlf_are_tolerated() {
        let idx = run("# header\r\n1|1|بِسْمِ ٱللَّهِ\r\n", 1).unwrap();
        assert_eq!(idx.totals().words, 2);
        assert_eq!(idx.totals().letters, 7);
    }

    #[test]
    fn layout_must_start_at_first_ayah() {
        let mut m = meta(1);
        m.pages[0].ayah_no = 2;
        let err = ingest("1|1|بسم\n1|2|بسم\n".as_bytes(), &m, &TextRules::default()).unwrap_err();
        assert!(err.to_string().contains("first unit"), "{err}");
    }

    #[test]
    fn layout_must_increase() {
        let mut m = meta(1);
        m.pages.push(LayoutRow {
            unit_no: 2,
            surah_no: 1,
            ayah_no: 1,
        });
        let err = ingest("1|1|بسم\n1|2|بسم\n".as_bytes(), &m, &TextRules::default()).unwrap_err();
        assert!(err.to_string().contains("does not start after"), "{err}");
    }
}
