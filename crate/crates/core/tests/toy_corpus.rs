use std::path::PathBuf;

use mushaf_core::corpus::{CorpusIndex, Metadata, Selection, ingest_files};
use mushaf_core::splitter::{GroupRow, SplitRow};
use mushaf_core::stats::StatValue;
use mushaf_core::text::normalize;
use mushaf_core::{
    AbjadTable, Anchor, Error, Granularity, Grouping, SplitRequest, SplitResult, SplitTarget, SplitUnit, Stats,
    TashkeelMode, TextRules, split,
};
use serde::Deserialize;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy")
}

fn toy() -> CorpusIndex {
    let dir = fixture_dir();
    ingest_files(&dir.join("corpus.txt"), &dir, &TextRules::default()).unwrap()
}

#[derive(Deserialize)]
struct Expected {
    totals: ExpectedTotals,
    words: Vec<ExpectedWord>,
    unique_occurrences: Vec<u32>,
}

#[derive(Deserialize)]
struct ExpectedTotals {
    surahs: u32,
    ayahs: u32,
    words: u32,
    letters: u32,
}

#[derive(Deserialize)]
struct ExpectedWord {
    serial: u32,
    ayah: u32,
    text: String,
    letters: Vec<String>,
    unique_word_id: u32,
}

fn expected() -> Expected {
    let text = std::fs::read_to_string(fixture_dir().join("expected.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn int(v: i64) -> StatValue {
    StatValue::Int(v)
}

fn text(v: &str) -> StatValue {
    StatValue::Text(normalize(v))
}

#[test]
fn totals_match_hand_count() {
    let idx = toy();
    let exp = expected();
    let t = idx.totals();
    assert_eq!(
        (t.surahs, t.ayahs, t.words, t.letters),
        (exp.totals.surahs, exp.totals.ayahs, exp.totals.words, exp.totals.letters)
    );
}

#[test]
fn words_and_letters_match_hand_enumeration() {
    let idx = toy();
    for ew in expected().words {
        let w = idx.word(ew.serial as i64).unwrap();
        assert_eq!(w.text_with_tashkeel, normalize(&ew.text));
        assert_eq!(w.ayah_serial_no, ew.ayah);
        assert_eq!(w.unique_word_id, ew.unique_word_id, "word {}", ew.serial);
        let letters: Vec<String> = idx
            .letters_in(w.letter_range)
            .iter()
            .map(|l| l.letter.to_string())
            .collect();
        assert_eq!(letters, ew.letters, "word {}", ew.serial);
    }
}

#[test]
fn unique_word_partition() {
    let idx = toy();
    let occ: Vec<u32> = idx.unique_words().iter().map(|u| u.occurrence_count).collect();
    assert_eq!(occ, expected().unique_occurrences);
    assert_eq!(occ.iter().sum::<u32>(), idx.totals().words);
}

#[test]
fn surah_two_report() {
    let idx = toy();
    let table = AbjadTable::mashriqi();
    let report = Stats::new(&idx, &table).surah(2).unwrap();
    // البقرة = 1+30+2+100+200+5; سورة = 60+6+200+5; رب ٱلله = 202 + 66
    let expected = vec![
        ("Surah Serial No", int(2)),
        ("Surah Serial No (Backward)", int(1)),
        ("Surah Name", text("البقرة")),
        ("Jummal Value of Surah Name", int(338)),
        ("Surah Full Name", text("سورة البقرة")),
        ("Jummal Value of Full Surah Name", int(609)),
        ("Jummal Value of Surah Text", int(268)),
        ("Revelation Sequence No", int(87)),
        ("First Ayah in Surah Serial No", int(3)),
        ("First Ayah in Surah Serial No (Backward)", int(1)),
        ("Last Ayah in Surah Serial No", int(3)),
        ("Last Ayah in Surah Serial No (Backward)", int(1)),
        ("Ayah Count", int(1)),
        ("First Word in Surah Serial No", int(7)),
        ("First Word in Surah Serial No (Backward)", int(2)),
        ("Last Word in Surah Serial No", int(8)),
        ("Last Word in Surah Serial No (Backward)", int(1)),
        ("Word Count", int(2)),
        ("First Letter in Surah Serial No", int(24)),
        ("First Letter in Surah Serial No (Backward)", int(6)),
        ("Last Letter in Surah Serial No", int(29)),
        ("Last Letter in Surah Serial No (Backward)", int(1)),
        ("Letter Count", int(6)),
    ];
    let got: Vec<(&str, StatValue)> = report.rows.iter().map(|r| (r.label.as_str(), r.value.clone())).collect();
    assert_eq!(got, expected);
}

#[test]
fn ayah_three_report() {
    let idx = toy();
    let table = AbjadTable::mashriqi();
    let report = Stats::new(&idx, &table).ayah(3).unwrap();
    let expected = vec![
        ("Ayah Serial No", int(3)),
        ("Ayah Serial No (Backward)", int(1)),
        ("Ayah No in Surah", int(1)),
        ("Ayah No in Surah (Backward)", int(1)),
        ("Surah Serial No", int(2)),
        ("Surah Name", text("البقرة")),
        ("Jummal Value of Ayah Text", int(268)),
        ("First Word in Ayah Serial No", int(7)),
        ("First Word in Ayah Serial No (Backward)", int(2)),
        ("Last Word in Ayah Serial No", int(8)),
        ("Last Word in Ayah Serial No (Backward)", int(1)),
        ("Word Count", int(2)),
        ("First Letter in Ayah Serial No", int(24)),
        ("First Letter in Ayah Serial No (Backward)", int(6)),
        ("Last Letter in Ayah Serial No", int(29)),
        ("Last Letter in Ayah Serial No (Backward)", int(1)),
        ("Letter Count", int(6)),
        ("Page No", int(2)),
        ("Juz No", int(1)),
        ("Rub No", int(2)),
    ];
    let got: Vec<(&str, StatValue)> = report.rows.iter().map(|r| (r.label.as_str(), r.value.clone())).collect();
    assert_eq!(got, expected);
}

#[test]
fn word_five_report() {
    let idx = toy();
    let table = AbjadTable::mashriqi();
    let report = Stats::new(&idx, &table).word(5).unwrap();
    // لله = 30+30+5; its letters are 19..=21 of 29
    let expected = vec![
        ("Word Serial No", int(5)),
        ("Word Serial No (Backward)", int(4)),
        ("Word No in Ayah", int(2)),
        ("Word No in Surah", int(5)),
        ("Word", text("لِلَّهِ")),
        ("Word (No Tashkeel)", text("لله")),
        ("Unique Word Id", int(5)),
        ("Occurrence Count in Quran", int(1)),
        ("Occurrence Count in Surah", int(1)),
        ("Jummal Value of Word", int(65)),
        ("First Letter in Word Serial No", int(19)),
        ("First Letter in Word Serial No (Backward)", int(11)),
        ("Last Letter in Word Serial No", int(21)),
        ("Last Letter in Word Serial No (Backward)", int(9)),
        ("Letter Count", int(3)),
        ("Ayah Serial No", int(2)),
        ("Ayah No in Surah", int(2)),
        ("Surah Serial No", int(1)),
        ("Surah Name", text("الفاتحة")),
    ];
    let got: Vec<(&str, StatValue)> = report.rows.iter().map(|r| (r.label.as_str(), r.value.clone())).collect();
    assert_eq!(got, expected);
}

#[test]
fn repeated_word_occurrences() {
    let idx = toy();
    let table = AbjadTable::mashriqi();
    let report = Stats::new(&idx, &table).word(8).unwrap();
    assert_eq!(report.get_int("Unique Word Id"), Some(2));
    assert_eq!(report.get_int("Occurrence Count in Quran"), Some(2));
    assert_eq!(report.get_int("Occurrence Count in Surah"), Some(1));
}

#[test]
fn stats_out_of_range() {
    let idx = toy();
    let table = AbjadTable::mashriqi();
    let stats = Stats::new(&idx, &table);
    assert!(matches!(
        stats.surah(3),
        Err(Error::OutOfRange {
            granularity: Granularity::Surah,
            value: 3
        })
    ));
    assert!(stats.ayah(0).is_err());
    assert!(stats.word(9).is_err());
}

#[test]
fn selection_reports() {
    let idx = toy();
    let table = AbjadTable::mashriqi();
    let stats = Stats::new(&idx, &table);
    let whole_len = idx.ayah(1).unwrap().text_with_tashkeel.chars().count();
    let whole = stats
        .selection(&Selection {
            ayah_serial_no: 1,
            start_offset: 0,
            end_offset: whole_len,
        })
        .unwrap();
    let ayah = stats.ayah(1).unwrap();
    assert_eq!(whole.get_int("Word Count"), ayah.get_int("Word Count"));
    assert_eq!(whole.get_int("Letter Count"), ayah.get_int("Letter Count"));
    assert_eq!(whole.get_int("Jummal Value of Selection"), Some(497));

    // "بِسْمِ" is six codepoints
    let first = stats
        .selection(&Selection {
            ayah_serial_no: 1,
            start_offset: 0,
            end_offset: 6,
        })
        .unwrap();
    assert_eq!(first.get("Selected Text"), Some(&text("بِسْمِ")));
    assert_eq!(first.get_int("Word Count"), Some(1));
    assert_eq!(first.get_int("Letter Count"), Some(3));
    assert_eq!(first.get_int("Jummal Value of Selection"), Some(102));

    // the span "مِ ٱ" touches two words
    let partial = stats
        .selection(&Selection {
            ayah_serial_no: 1,
            start_offset: 4,
            end_offset: 8,
        })
        .unwrap();
    assert_eq!(partial.get_int("Word Count"), Some(2));
    assert_eq!(partial.get_int("Letter Count"), Some(2));
}

#[test]
fn selection_rejects_bad_offsets() {
    let idx = toy();
    let table = AbjadTable::mashriqi();
    let stats = Stats::new(&idx, &table);
    for (a, s, e) in [(1, 3, 3), (1, 5, 2), (1, 0, 10_000), (9, 0, 1)] {
        let err = stats
            .selection(&Selection {
                ayah_serial_no: a,
                start_offset: s,
                end_offset: e,
            })
            .unwrap_err();
        assert!(matches!(err, Error::InvalidSelection(_)), "{a} {s} {e}");
    }
}

fn req(target: SplitTarget, unit: SplitUnit, tashkeel: TashkeelMode, grouping: Grouping) -> SplitRequest {
    SplitRequest {
        target,
        unit,
        tashkeel,
        grouping,
    }
}

#[test]
fn split_letters_and_words() {
    let idx = toy();
    let letters = split(
        &idx,
        &req(SplitTarget::Ayah(2), SplitUnit::Letters, TashkeelMode::Without, Grouping::None),
    )
    .unwrap();
    let SplitResult::Ungrouped(rows) = letters else { panic!() };
    let tokens: Vec<&str> = rows.iter().map(|r| r.token.as_str()).collect();
    assert_eq!(tokens, ["ٱ", "ل", "ح", "م", "د", "ل", "ل", "ه", "ر", "ب"]);
    assert_eq!(rows.last().unwrap().row_no, 10);

    let with = split(
        &idx,
        &req(SplitTarget::Word(6), SplitUnit::Letters, TashkeelMode::With, Grouping::None),
    )
    .unwrap();
    assert_eq!(
        with,
        SplitResult::Ungrouped(vec![
            SplitRow {
                row_no: 1,
                token: normalize("رَ")
            },
            SplitRow {
                row_no: 2,
                token: normalize("بِّ")
            },
        ])
    );

    let words = split(
        &idx,
        &req(SplitTarget::Surah(1), SplitUnit::Words, TashkeelMode::Without, Grouping::Grouped),
    )
    .unwrap();
    let SplitResult::Grouped(groups) = words else { panic!() };
    assert_eq!(groups.len(), 6);
    assert_eq!(groups[0], GroupRow { token: "بسم".into(), count: 1 });
    assert_eq!(groups.iter().map(|g| g.count).sum::<u32>(), 6);
}

#[test]
fn split_word_target_into_words_is_identity() {
    let idx = toy();
    let r = split(
        &idx,
        &req(SplitTarget::Word(3), SplitUnit::Words, TashkeelMode::With, Grouping::None),
    )
    .unwrap();
    assert_eq!(
        r,
        SplitResult::Ungrouped(vec![SplitRow {
            row_no: 1,
            token: normalize("ٱلرَّحْمَٰنِ")
        }])
    );
}

#[test]
fn split_selection_clips_words() {
    let idx = toy();
    let r = split(
        &idx,
        &req(
            SplitTarget::Selection(Selection {
                ayah_serial_no: 1,
                start_offset: 4,
                end_offset: 8,
            }),
            SplitUnit::Words,
            TashkeelMode::With,
            Grouping::None,
        ),
    )
    .unwrap();
    let SplitResult::Ungrouped(rows) = r else { panic!() };
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].token, normalize("مِ"));
    assert_eq!(rows[1].token, "ٱ");
}

#[test]
fn split_invalid_target() {
    let idx = toy();
    assert!(split(&idx, &req(SplitTarget::Surah(5), SplitUnit::Words, TashkeelMode::With, Grouping::None)).is_err());
}

#[test]
fn navigation() {
    let idx = toy();
    assert_eq!(idx.locate_ayah(1, 1).unwrap(), 1);
    assert_eq!(idx.locate_ayah(2, 1).unwrap(), 3);
    assert!(idx.locate_ayah(3, 1).is_err());
    assert!(idx.locate_ayah(1, 3).is_err());
    assert!(idx.locate_ayah(0, 1).is_err());
    assert_eq!(idx.resolve_ayah(3).unwrap(), (2, 1));
    assert!(idx.resolve_ayah(4).is_err());

    let surah1 = idx.navigate(Anchor::Surah(1)).unwrap();
    assert_eq!((surah1.page_no, surah1.ayah_serial_no), (1, 1));
    let surah2 = idx.navigate(Anchor::Surah(2)).unwrap();
    assert_eq!((surah2.page_no, surah2.ayah_serial_no), (2, 3));
    let rub2 = idx.navigate(Anchor::Rub(2)).unwrap();
    assert_eq!((rub2.page_no, rub2.ayah_serial_no), (1, 2));
    assert!(idx.navigate(Anchor::Page(0)).is_err());
    assert!(idx.navigate(Anchor::Juz(2)).is_err());
    assert_eq!(idx.page_ayahs(1).unwrap(), 1..=2);
    assert_eq!(idx.page_ayahs(2).unwrap(), 3..=3);
}

#[test]
fn page_stepping_clamps() {
    let idx = toy();
    assert_eq!(idx.step_page(1, -10), 1);
    assert_eq!(idx.step_page(1, 1), 2);
    assert_eq!(idx.step_page(2, 100), 2);
    assert_eq!(idx.step_page(2, -1), 1);
}

#[test]
fn duality_on_every_element() {
    let idx = toy();
    let t = idx.totals();
    for s in idx.surahs() {
        assert_eq!(s.surah_serial_no + s.surah_serial_no_backward, t.surahs + 1);
    }
    for (g, n) in [
        (Granularity::Ayah, t.ayahs),
        (Granularity::Word, t.words),
        (Granularity::Letter, t.letters),
    ] {
        for serial in 1..=n {
            assert_eq!(serial + idx.backward(g, serial), n + 1);
        }
    }
}

#[test]
fn containment_and_count_consistency() {
    let idx = toy();
    for w in idx.words() {
        let a = idx.ayah(w.ayah_serial_no as i64).unwrap();
        let s = idx.surah(w.surah_serial_no as i64).unwrap();
        assert!(w.letter_range.is_within(&a.letter_range));
        assert!(a.letter_range.is_within(&s.letter_range));
        assert!(a.word_range.is_within(&s.word_range));
    }
    for a in idx.ayahs() {
        let sum: u32 = idx.words_in(a.word_range).iter().map(|w| w.letter_range.len()).sum();
        assert_eq!(sum, a.letter_range.len());
    }
}

#[test]
fn persistence_roundtrip_and_determinism() {
    let a = toy();
    let b = toy();
    assert_eq!(a.to_bytes(), b.to_bytes());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.idx");
    a.save(&path).unwrap();
    assert_eq!(CorpusIndex::load(&path).unwrap(), a);

    let mut bytes = a.to_bytes();
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    assert!(CorpusIndex::from_bytes(&bytes).is_err());
    assert!(CorpusIndex::from_bytes(b"nope").is_err());
}

#[test]
fn source_hash_tracks_inputs() {
    let dir = fixture_dir();
    let meta = Metadata::load_dir(&dir).unwrap();
    let corpus = std::fs::read_to_string(dir.join("corpus.txt")).unwrap();
    let a = mushaf_core::ingest(corpus.as_bytes(), &meta, &TextRules::default()).unwrap();
    let changed = corpus.replace("رَبِّ ٱللَّهِ", "رَبِّ ٱللَّهَ");
    let b = mushaf_core::ingest(changed.as_bytes(), &meta, &TextRules::default()).unwrap();
    assert_ne!(a.source_hash(), b.source_hash());
    assert_eq!(a.source_hash().len(), 64);
}

#[test]
fn missing_corpus_file_is_io_error() {
    let dir = fixture_dir();
    let err = ingest_files(&dir.join("missing.txt"), &dir, &TextRules::default()).unwrap_err();
    assert!(matches!(err, Error::Io(_)));
    assert!(err.to_string().contains("missing.txt"));
}
