#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use mushaf_core::corpus::CorpusIndex;
use mushaf_core::{AbjadTable, TextRules, ingest_files};
use mushaf_querylab::{
    DataType, DropdownSource, HyperlinkColumn, HyperlinkKind, InputMethod, ParameterSpec, QueryDefinition, Store,
    build_store,
};

pub const DETAIL_SQL: &str = "select W.AyahSerialNo, A.Ayah, A.SurahSerialNo, S.SurahName
FROM Words W join Ayahs A on W.AyahSerialNo=A.AyahSerialNo
join Surahs S on A.SurahSerialNo=S.SurahSerialNo
where W.UniqueWordId = @UniqueWordId and (A.SurahSerialNo =
@SurahNo or @SurahNo=0)";

pub const FREQUENCY_SQL: &str = "select W.UniqueWordId, U.Word, count(*) as Count
from Words W join UniqueWords U on U.UniqueWordId = W.UniqueWordId
where W.SurahSerialNo = @SurahNo or @SurahNo = 0
group by W.UniqueWordId, U.Word
order by Count desc, W.UniqueWordId";

pub struct Fixture {
    pub index: CorpusIndex,
    pub store: Store,
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn fixture() -> &'static Fixture {
    static FIXTURE: OnceLock<Fixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let data = data_dir();
        let index = ingest_files(&data.join("quran-uthmani.txt"), &data, &TextRules::default()).unwrap();
        let binary = module_path!().split("::").next().unwrap();
        let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{binary}-store.sqlite"));
        build_store(&index, &AbjadTable::mashriqi(), &path).unwrap();
        let store = Store::open(&path).unwrap();
        Fixture { index, store }
    })
}

pub fn surah_param() -> ParameterSpec {
    ParameterSpec {
        sequence_no: 1,
        display_name: "Surah Name".into(),
        name: "@SurahNo".into(),
        input_method: InputMethod::Dropdown(DropdownSource::SurahList),
        data_type: DataType::Integer,
        default_value: "0".into(),
    }
}

/// Word frequency main query with the detail query and both hyperlink kinds.
pub fn word_frequency() -> QueryDefinition {
    let mut def = QueryDefinition::new("word-frequency", "Word frequency", FREQUENCY_SQL);
    def.parameters = vec![surah_param()];
    def.detail_sql = Some(DETAIL_SQL.into());
    def.hyperlink_columns = vec![
        HyperlinkColumn {
            hyperlink_id: "h1".into(),
            info_type: HyperlinkKind::Subquery,
            backing_column: "UniqueWordId".into(),
            targeted_column: "Word".into(),
        },
        HyperlinkColumn {
            hyperlink_id: "h2".into(),
            info_type: HyperlinkKind::AyahSerialNo,
            backing_column: "AyahSerialNo".into(),
            targeted_column: "Ayah".into(),
        },
    ];
    def
}
