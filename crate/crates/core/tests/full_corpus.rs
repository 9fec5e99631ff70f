//! Checks against the bundled Tanzil Uthmani corpus.

use std::path::PathBuf;
use std::sync::OnceLock;

use mushaf_core::corpus::CorpusIndex;
use mushaf_core::{
    AbjadTable, Granularity, Grouping, SplitRequest, SplitResult, SplitTarget, SplitUnit, Stats, TashkeelMode,
    TextRules, conventions, ingest_files, split,
};
use proptest::prelude::*;
use unicode_normalization::UnicodeNormalization;

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn index() -> &'static CorpusIndex {
    static INDEX: OnceLock<CorpusIndex> = OnceLock::new();
    INDEX.get_or_init(|| {
        let dir = data_dir();
        ingest_files(&dir.join("quran-uthmani.txt"), &dir, &TextRules::default()).unwrap()
    })
}

/// Brute-force recount straight from the corpus file with a literal letter
/// list, bypassing the index.
struct RawCount {
    per_surah: Vec<(u32, u32, u32)>,
}

fn raw_count() -> RawCount {
    const LETTERS: &str = "ءآأؤإئابةتثجحخدذرزسشصضطظعغفقكلمنهوىيٱ";
    let text = std::fs::read_to_string(data_dir().join("quran-uthmani.txt")).unwrap();
    let mut per_surah: Vec<(u32, u32, u32)> = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
        let mut parts = line.splitn(3, '|');
        let surah: usize = parts.next().unwrap().parse().unwrap();
        let body: String = parts.nth(1).unwrap().nfc().collect();
        if per_surah.len() < surah {
            per_surah.push((0, 0, 0));
        }
        let entry = &mut per_surah[surah - 1];
        entry.0 += 1;
        entry.1 += body.split(' ').filter(|w| !w.is_empty()).count() as u32;
        entry.2 += body.chars().filter(|c| LETTERS.contains(*c)).count() as u32;
    }
    RawCount { per_surah }
}

#[test]
fn per_surah_counts_match_brute_force() {
    let idx = index();
    let raw = raw_count();
    assert_eq!(raw.per_surah.len(), 114);
    for (s, &(ayahs, words, letters)) in raw.per_surah.iter().enumerate() {
        let rec = idx.surah(s as i64 + 1).unwrap();
        assert_eq!(
            (rec.ayah_range.len(), rec.word_range.len(), rec.letter_range.len()),
            (ayahs, words, letters),
            "surah {}",
            s + 1
        );
    }
    let t = idx.totals();
    assert_eq!(t.ayahs, raw.per_surah.iter().map(|c| c.0).sum::<u32>());
    assert_eq!(t.words, raw.per_surah.iter().map(|c| c.1).sum::<u32>());
    assert_eq!(t.letters, raw.per_surah.iter().map(|c| c.2).sum::<u32>());
}

#[test]
fn opening_surah_report() {
    let idx = index();
    let table = AbjadTable::mashriqi();
    let r = Stats::new(idx, &table).surah(1).unwrap();
    let t = idx.totals();
    assert_eq!(r.rows.len(), 23);
    assert_eq!(r.get_int("Surah Serial No (Backward)"), Some(114));
    assert_eq!(r.get_int("Jummal Value of Surah Name"), Some(525));
    assert_eq!(r.get_int("Jummal Value of Full Surah Name"), Some(796));
    assert_eq!(r.get_int("Jummal Value of Surah Text"), Some(10143));
    assert_eq!(r.get_int("Revelation Sequence No"), Some(5));
    assert_eq!(r.get_int("Ayah Count"), Some(7));
    assert_eq!(r.get_int("Word Count"), Some(29));
    assert_eq!(r.get_int("Letter Count"), Some(139));
    assert_eq!(r.get_int("First Ayah in Surah Serial No (Backward)"), Some(6236));
    assert_eq!(r.get_int("Last Ayah in Surah Serial No (Backward)"), Some(6230));
    assert_eq!(r.get_int("First Word in Surah Serial No (Backward)"), Some(t.words as i64));
    assert_eq!(r.get_int("Last Word in Surah Serial No (Backward)"), Some(t.words as i64 - 28));
    assert_eq!(r.get_int("First Letter in Surah Serial No (Backward)"), Some(t.letters as i64));
    assert_eq!(r.get_int("Last Letter in Surah Serial No (Backward)"), Some(t.letters as i64 - 138));
}

#[test]
fn ayah_serial_lookups() {
    let idx = index();
    assert_eq!(idx.locate_ayah(1, 1).unwrap(), 1);
    assert_eq!(idx.locate_ayah(2, 200).unwrap(), 207);
    assert_eq!(idx.resolve_ayah(207).unwrap(), (2, 200));
    assert_eq!(idx.resolve_ayah(6236).unwrap(), (114, 6));
    assert!(idx.locate_ayah(115, 1).is_err());
    assert!(idx.resolve_ayah(6237).is_err());

    let a = idx.ayah(207).unwrap();
    assert_eq!(a.juz_no, 2);
    assert_eq!(idx.rub_in_juz(a), 4);

    let table = AbjadTable::mashriqi();
    let r = Stats::new(idx, &table).ayah(207).unwrap();
    assert_eq!(r.get_int("Surah Serial No"), Some(2));
    assert_eq!(r.get_int("Ayah No in Surah"), Some(200));
}

#[test]
fn layout_is_complete() {
    let idx = index();
    assert_eq!((idx.page_count(), idx.juz_count(), idx.rub_count()), (604, 30, 240));
    assert_eq!(idx.ayah(6236).unwrap().page_no, 604);
    let juz2 = idx.navigate(mushaf_core::Anchor::Juz(2)).unwrap();
    assert_eq!(idx.resolve_ayah(juz2.ayah_serial_no as i64).unwrap(), (2, 142));
    assert_eq!(juz2.page_no, 22);
    assert_eq!(idx.step_page(604 - 3, 100), 604);
}

#[test]
fn basmala_split() {
    let idx = index();
    let first = split(
        idx,
        &SplitRequest {
            target: SplitTarget::Surah(1),
            unit: SplitUnit::Letters,
            tashkeel: TashkeelMode::Without,
            grouping: Grouping::None,
        },
    )
    .unwrap();
    let SplitResult::Ungrouped(rows) = first else { panic!() };
    let head: Vec<&str> = rows.iter().take(3).map(|r| r.token.as_str()).collect();
    assert_eq!(head, ["ب", "س", "م"]);
    assert_eq!(rows.len(), 139);

    let grouped = split(
        idx,
        &SplitRequest {
            target: SplitTarget::Ayah(1),
            unit: SplitUnit::Letters,
            tashkeel: TashkeelMode::Without,
            grouping: Grouping::Grouped,
        },
    )
    .unwrap();
    let SplitResult::Grouped(groups) = grouped else { panic!() };
    assert_eq!(groups.len(), 10);
    assert_eq!(groups.iter().map(|g| g.count).sum::<u32>(), 19);
    assert_eq!(groups.iter().find(|g| g.token == "ل").unwrap().count, 4);
}

#[test]
fn duality_and_containment_sweep() {
    let idx = index();
    let t = idx.totals();
    for s in idx.surahs() {
        assert_eq!(s.surah_serial_no + s.surah_serial_no_backward, t.surahs + 1);
    }
    for (g, items) in [
        (Granularity::Ayah, idx.ayahs().iter().map(|a| a.ayah_serial_no).collect::<Vec<_>>()),
        (Granularity::Word, idx.words().iter().map(|w| w.word_serial_no).collect()),
        (Granularity::Letter, idx.letters().iter().map(|l| l.letter_serial_no).collect()),
    ] {
        for (i, serial) in items.into_iter().enumerate() {
            assert_eq!(serial as usize, i + 1);
            assert_eq!(serial + idx.backward(g, serial), idx.total(g) + 1);
        }
    }
    for w in idx.words() {
        let a = &idx.ayahs()[w.ayah_serial_no as usize - 1];
        let s = &idx.surahs()[w.surah_serial_no as usize - 1];
        assert!(w.letter_range.is_within(&a.letter_range));
        assert!(a.letter_range.is_within(&s.letter_range));
        assert!(a.word_range.is_within(&s.word_range));
    }
    let occurrences: u64 = idx.unique_words().iter().map(|u| u.occurrence_count as u64).sum();
    assert_eq!(occurrences, t.words as u64);
}

#[test]
fn stripped_text_invariant() {
    let idx = index();
    let rules = idx.rules();
    for a in idx.ayahs() {
        assert_eq!(a.text_no_tashkeel, rules.strip_tashkeel(&a.text_with_tashkeel));
        assert_eq!(a.word_range.len() as usize, a.text_with_tashkeel.split_whitespace().count());
    }
}

#[test]
fn conventions_within_tolerance() {
    let report = conventions::report(index(), &AbjadTable::mashriqi());
    assert!(report.all_pass(), "{}", report.to_markdown());
    let words = report.metric("words").unwrap();
    assert_eq!(words.delta, -3);
    assert_eq!(words.residual, 0);
    let letters = report.metric("letters").unwrap();
    assert!(letters.delta_pct < conventions::TOLERANCE_PCT);
    assert!(letters.residual.abs() <= 1, "{}", report.to_markdown());
}

#[test]
fn committed_conventions_report_is_current() {
    let report = conventions::report(index(), &AbjadTable::mashriqi());
    let committed = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../CONVENTIONS.md"),
    )
    .expect("CONVENTIONS.md is committed at the repository root");
    assert_eq!(committed, report.to_markdown());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn locate_resolve_roundtrip(serial in 1i64..=6236) {
        let idx = index();
        let (s, a) = idx.resolve_ayah(serial).unwrap();
        prop_assert_eq!(idx.locate_ayah(s as i64, a as i64).unwrap() as i64, serial);
    }

    #[test]
    fn split_letters_match_letter_count(serial in 1i64..=6236) {
        let idx = index();
        let table = AbjadTable::mashriqi();
        let report = Stats::new(idx, &table).ayah(serial).unwrap();
        for grouping in [Grouping::None, Grouping::Grouped] {
            let r = split(idx, &SplitRequest {
                target: SplitTarget::Ayah(serial),
                unit: SplitUnit::Letters,
                tashkeel: TashkeelMode::Without,
                grouping,
            }).unwrap();
            prop_assert_eq!(r.token_count() as i64, report.get_int("Letter Count").unwrap());
        }
        let with = split(idx, &SplitRequest {
            target: SplitTarget::Ayah(serial),
            unit: SplitUnit::Letters,
            tashkeel: TashkeelMode::With,
            grouping: Grouping::None,
        }).unwrap();
        prop_assert_eq!(with.token_count() as i64, report.get_int("Letter Count").unwrap());
    }

    #[test]
    fn split_words_reproduce_text(serial in 1i64..=6236) {
        let idx = index();
        let r = split(idx, &SplitRequest {
            target: SplitTarget::Ayah(serial),
            unit: SplitUnit::Words,
            tashkeel: TashkeelMode::With,
            grouping: Grouping::None,
        }).unwrap();
        let SplitResult::Ungrouped(rows) = r else { unreachable!() };
        let joined = rows.iter().map(|r| r.token.as_str()).collect::<Vec<_>>().join(" ");
        prop_assert_eq!(joined, idx.ayah(serial).unwrap().text_with_tashkeel.clone());
    }

    #[test]
    fn whole_ayah_selection_matches_ayah(serial in 1u32..=6236) {
        let idx = index();
        let table = AbjadTable::mashriqi();
        let stats = Stats::new(idx, &table);
        let len = idx.ayah(serial as i64).unwrap().text_with_tashkeel.chars().count();
        let sel = stats.selection(&mushaf_core::Selection { ayah_serial_no: serial, start_offset: 0, end_offset: len }).unwrap();
        let ayah = stats.ayah(serial as i64).unwrap();
        prop_assert_eq!(sel.get_int("Word Count"), ayah.get_int("Word Count"));
        prop_assert_eq!(sel.get_int("Letter Count"), ayah.get_int("Letter Count"));
        prop_assert_eq!(sel.get_int("Jummal Value of Selection"), ayah.get_int("Jummal Value of Ayah Text"));
    }
}
