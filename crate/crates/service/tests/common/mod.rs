#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::{Arc, OnceLock};
use std::time::Duration;

use axum::Router;
use axum::body::{Body, Bytes, to_bytes};
use axum::http::{HeaderMap, Method, Request, StatusCode};
use mushaf_core::corpus::CorpusIndex;
use mushaf_core::{AbjadTable, TextRules, ingest_files};
use mushaf_querylab::{
    DataType, DropdownSource, HyperlinkColumn, HyperlinkKind, InputMethod, ParameterSpec, Store, ValidationReport,
    build_store, validate_query,
};
use mushaf_service::{AppState, ServiceConfig, TokenEntry, router};
use mushaf_wiki::{Decision, Principal, QueryDraft, Role, Wiki};
use serde_json::Value;
use tower::ServiceExt;

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

/// Counts to `@N` and returns the total; slow for large N.
pub const SLOW_SQL: &str = "with recursive c(x) as (select 1 union all select x + 1 from c where x < @N)
select count(*) as Total from c";

pub const DEV_TOKEN: &str = "dev-token";
pub const DEV2_TOKEN: &str = "dev2-token";
pub const ADMIN_TOKEN: &str = "admin-token";

pub struct Corpus {
    pub index: Arc<CorpusIndex>,
    pub store: Store,
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let data = data_dir();
        let index = ingest_files(&data.join("quran-uthmani.txt"), &data, &TextRules::default()).unwrap();
        let binary = module_path!().split("::").next().unwrap();
        let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("service-{binary}-store.sqlite"));
        build_store(&index, &AbjadTable::mashriqi(), &path).unwrap();
        let store = Store::open(&path).unwrap();
        Corpus {
            index: Arc::new(index),
            store,
        }
    })
}

pub fn config() -> ServiceConfig {
    let token = |token: &str, user: &str, role| TokenEntry {
        token: token.into(),
        user: user.into(),
        role,
    };
    ServiceConfig {
        tokens: vec![
            token(DEV_TOKEN, "dev1", Role::Developer),
            token(DEV2_TOKEN, "dev2", Role::Developer),
            token(ADMIN_TOKEN, "admin1", Role::Admin),
        ],
        ..ServiceConfig::default()
    }
}

fn surah_param() -> ParameterSpec {
    ParameterSpec {
        sequence_no: 1,
        display_name: "Surah Name".into(),
        name: "@SurahNo".into(),
        input_method: InputMethod::Dropdown(DropdownSource::SurahList),
        data_type: DataType::Integer,
        default_value: "0".into(),
    }
}

pub fn frequency_draft() -> QueryDraft {
    QueryDraft {
        title: "Word frequency".into(),
        description: "Occurrences of each distinct word".into(),
        main_sql: FREQUENCY_SQL.into(),
        parameters: vec![surah_param()],
        detail_sql: Some(DETAIL_SQL.into()),
        hyperlink_columns: vec![
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
        ],
    }
}

pub fn slow_draft() -> QueryDraft {
    QueryDraft {
        title: "Counter".into(),
        main_sql: SLOW_SQL.into(),
        parameters: vec![ParameterSpec {
            sequence_no: 1,
            display_name: "Upper bound".into(),
            name: "@N".into(),
            input_method: InputMethod::TextBox,
            data_type: DataType::Integer,
            default_value: "100000000".into(),
        }],
        ..QueryDraft::default()
    }
}

/// Publishes `draft` under `topic` and returns its id.
pub fn publish(wiki: &mut Wiki, store: &Store, draft: QueryDraft, topic: &[&str]) -> String {
    let dev = Principal::developer("dev1");
    let id = wiki.create_draft(&dev, draft).unwrap();
    wiki.submit(&dev, &id, |d| -> ValidationReport { validate_query(d, store) }).unwrap();
    let path: Vec<String> = topic.iter().map(|s| s.to_string()).collect();
    wiki.decide(&Principal::admin("admin1"), &id, Decision::Published, &path, None)
        .unwrap();
    id
}

pub struct TestApp {
    pub state: Arc<AppState>,
    pub router: Router,
    pub frequency_id: String,
    pub slow_id: String,
}

/// A service over the full corpus with the word frequency query (q1) and
/// the counter query (q2) published. Must be called inside a Tokio runtime.
pub fn app_with(config: ServiceConfig) -> TestApp {
    let c = corpus();
    let mut wiki = Wiki::in_memory();
    let frequency_id = publish(&mut wiki, &c.store, frequency_draft(), &["Words"]);
    let slow_id = publish(&mut wiki, &c.store, slow_draft(), &["Tests", "Load"]);
    let state = AppState::new(c.index.clone(), AbjadTable::mashriqi(), c.store.clone(), wiki, config);
    TestApp {
        router: router(state.clone()),
        state,
        frequency_id,
        slow_id,
    }
}

pub fn app() -> TestApp {
    app_with(config())
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Bytes,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }
}

pub async fn send(router: &Router, method: Method, uri: &str, token: Option<&str>, body: Body, content_type: &str) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = req.header("content-type", content_type).body(body).unwrap();
    let resp = router.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    Reply { status, headers, body }
}

pub async fn get(router: &Router, uri: &str, token: Option<&str>) -> Reply {
    send(router, Method::GET, uri, token, Body::empty(), "application/json").await
}

pub async fn call(router: &Router, method: Method, uri: &str, token: Option<&str>, body: &Value) -> Reply {
    send(router, method, uri, token, Body::from(body.to_string()), "application/json").await
}

pub async fn post(router: &Router, uri: &str, token: Option<&str>, body: &Value) -> Reply {
    call(router, Method::POST, uri, token, body).await
}

/// Polls a job until it leaves Pending/Running.
pub async fn await_job(router: &Router, job_id: &str) -> Value {
    for _ in 0..600 {
        let r = get(router, &format!("/api/jobs/{job_id}"), None).await;
        assert_eq!(r.status, StatusCode::OK, "{}", String::from_utf8_lossy(&r.body));
        let v = r.json();
        if !matches!(v["state"].as_str(), Some("Pending" | "Running")) {
            return v;
        }
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
    panic!("job {job_id} did not finish");
}
