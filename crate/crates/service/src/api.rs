use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, FromRequestParts, Path, Query, State};
use axum::http::header::{AUTHORIZATION, CONTENT_TYPE};
use axum::http::request::Parts;
use axum::http::{HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use mushaf_core::corpus::{AyahRecord, CorpusIndex};
use mushaf_core::{AbjadTable, Anchor, NavTarget, Selection, SplitRequest, SplitResult, Stats, StatsReport, split};
use mushaf_querylab::{
    Bindings, LinkOutcome, QueryDefinition, QueryState, Store, ValidatedQuery, ValidationReport, Value,
    bind_parameters, follow_link, execute_main, validate_query,
};
use mushaf_wiki::{
    Decision, MAX_DOCUMENTATION_BYTES, Principal, QueryDraft, QueryPage, QueryRecord, QuerySummary, Role, Wiki,
    WikiTopic,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::ServiceConfig;
use crate::error::{ApiError, ApiResult};
use crate::jobs::{JobError, JobManager, JobState, JobView};

pub const ELAPSED_HEADER: &str = "x-elapsed-ms";

pub struct AppState {
    pub index: Arc<CorpusIndex>,
    pub table: AbjadTable,
    pub store: Store,
    pub wiki: RwLock<Wiki>,
    pub config: ServiceConfig,
    pub jobs: JobManager,
}

impl AppState {
    /// Starts the job workers; must be called inside a Tokio runtime.
    pub fn new(index: Arc<CorpusIndex>, table: AbjadTable, store: Store, wiki: Wiki, config: ServiceConfig) -> Arc<Self> {
        let jobs = JobManager::start(config.workers, config.queue_depth, config.job_retention);
        Arc::new(AppState {
            index,
            table,
            store,
            wiki: RwLock::new(wiki),
            config,
            jobs,
        })
    }

    fn stats(&self) -> Stats<'_> {
        Stats::new(&self.index, &self.table)
    }
}

type AppRef = State<Arc<AppState>>;

/// Caller identity from the `Authorization: Bearer` header. No header means
/// the public role; an unknown token is rejected.
pub struct Caller(pub Principal);

impl FromRequestParts<Arc<AppState>> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Arc<AppState>) -> Result<Self, Self::Rejection> {
        let Some(value) = parts.headers.get(AUTHORIZATION) else {
            return Ok(Caller(Principal::public()));
        };
        let token = value
            .to_str()
            .ok()
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or_else(|| ApiError::unauthorized("expected a Bearer token"))?;
        state
            .config
            .principal(token.trim())
            .map(Caller)
            .ok_or_else(|| ApiError::unauthorized("unknown token"))
    }
}

fn require(who: &Principal, role: Role) -> ApiResult<()> {
    if who.role >= role {
        Ok(())
    } else {
        Err(ApiError::forbidden(format!("requires the {role:?} role")))
    }
}

fn job_error(e: JobError) -> ApiError {
    let msg = e.to_string();
    match e {
        JobError::QueueFull => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "queue_full", msg),
        JobError::Unknown(_) => ApiError::not_found(msg),
        JobError::Expired(_) => ApiError::new(StatusCode::GONE, "expired", msg),
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

#[derive(Serialize)]
struct SurahMeta {
    surah_serial_no: u32,
    name: String,
    full_name: String,
    revelation_sequence_no: u32,
    ayah_count: u32,
    first_ayah_serial_no: u32,
    page_no: u32,
}

#[derive(Serialize)]
struct Meta {
    corpus_hash: String,
    store_hash: String,
    totals: mushaf_core::corpus::Totals,
    page_count: u32,
    juz_count: u32,
    rub_count: u32,
    surahs: Vec<SurahMeta>,
}

async fn meta(State(app): AppRef) -> ApiResult<Json<Meta>> {
    let idx = &app.index;
    let store_hash = {
        let store = app.store.clone();
        blocking(move || store.hash().map_err(ApiError::from)).await?
    };
    let surahs = idx
        .surahs()
        .iter()
        .map(|s| SurahMeta {
            surah_serial_no: s.surah_serial_no,
            name: s.name.clone(),
            full_name: s.full_name.clone(),
            revelation_sequence_no: s.revelation_sequence_no,
            ayah_count: s.ayah_range.len(),
            first_ayah_serial_no: s.ayah_range.first,
            page_no: idx.ayahs_in(s.ayah_range)[0].page_no,
        })
        .collect();
    Ok(Json(Meta {
        corpus_hash: idx.source_hash().to_string(),
        store_hash,
        totals: idx.totals(),
        page_count: idx.page_count(),
        juz_count: idx.juz_count(),
        rub_count: idx.rub_count(),
        surahs,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AyahView {
    pub ayah_serial_no: u32,
    pub surah_serial_no: u32,
    pub surah_name: String,
    pub ayah_no_in_surah: u32,
    pub text: String,
    pub page_no: u32,
    pub juz_no: u32,
    pub rub_no: u32,
    pub rub_in_juz: u32,
}

fn ayah_view(idx: &CorpusIndex, a: &AyahRecord) -> AyahView {
    AyahView {
        ayah_serial_no: a.ayah_serial_no,
        surah_serial_no: a.surah_serial_no,
        surah_name: idx
            .surah(a.surah_serial_no as i64)
            .map(|s| s.name.clone())
            .unwrap_or_default(),
        ayah_no_in_surah: a.ayah_no_in_surah,
        text: a.text_with_tashkeel.clone(),
        page_no: a.page_no,
        juz_no: a.juz_no,
        rub_no: a.rub_no,
        rub_in_juz: idx.rub_in_juz(a),
    }
}

#[derive(Serialize)]
struct PageView {
    page_no: u32,
    page_count: u32,
    ayahs: Vec<AyahView>,
}

async fn page(State(app): AppRef, Path(n): Path<i64>) -> ApiResult<Json<PageView>> {
    let idx = &app.index;
    let range = idx.page_ayahs(n)?;
    let ayahs = range
        .map(|s| idx.ayah(s as i64).map(|a| ayah_view(idx, a)))
        .collect::<Result<_, _>>()?;
    Ok(Json(PageView {
        page_no: n as u32,
        page_count: idx.page_count(),
        ayahs,
    }))
}

#[derive(Deserialize)]
struct NavigateParams {
    surah: Option<i64>,
    juz: Option<i64>,
    rub: Option<i64>,
    page: Option<i64>,
    /// Page stepper offset; applied to `page` and clamped to the mushaf.
    delta: Option<i64>,
}

async fn navigate(State(app): AppRef, Query(q): Query<NavigateParams>) -> ApiResult<Json<NavTarget>> {
    let idx = &app.index;
    let anchors: Vec<Anchor> = [
        q.surah.map(Anchor::Surah),
        q.juz.map(Anchor::Juz),
        q.rub.map(Anchor::Rub),
        q.page.map(Anchor::Page),
    ]
    .into_iter()
    .flatten()
    .collect();
    let [anchor] = anchors.as_slice() else {
        return Err(ApiError::bad_request("give exactly one of surah, juz, rub or page"));
    };
    match (anchor, q.delta) {
        (Anchor::Page(p), Some(d)) => {
            let current = (*p).clamp(1, idx.page_count() as i64) as u32;
            let page_no = idx.step_page(current, d);
            Ok(Json(idx.navigate(Anchor::Page(page_no as i64))?))
        }
        (_, Some(_)) => Err(ApiError::bad_request("delta applies to page navigation only")),
        (a, None) => Ok(Json(idx.navigate(*a)?)),
    }
}

async fn ayah(State(app): AppRef, Path(serial): Path<i64>) -> ApiResult<Json<AyahView>> {
    let a = app.index.ayah(serial)?;
    Ok(Json(ayah_view(&app.index, a)))
}

async fn stats_surah(State(app): AppRef, Path(n): Path<i64>) -> ApiResult<Json<StatsReport>> {
    Ok(Json(app.stats().surah(n)?))
}

async fn stats_ayah(State(app): AppRef, Path(n): Path<i64>) -> ApiResult<Json<StatsReport>> {
    Ok(Json(app.stats().ayah(n)?))
}

async fn stats_word(State(app): AppRef, Path(n): Path<i64>) -> ApiResult<Json<StatsReport>> {
    Ok(Json(app.stats().word(n)?))
}

async fn stats_selection(State(app): AppRef, Json(sel): Json<Selection>) -> ApiResult<Json<StatsReport>> {
    Ok(Json(app.stats().selection(&sel)?))
}

async fn split_text(State(app): AppRef, Json(req): Json<SplitRequest>) -> ApiResult<Json<SplitResult>> {
    Ok(Json(split(&app.index, &req)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TocQuery {
    pub id: String,
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TocNode {
    pub name: String,
    pub children: Vec<TocNode>,
    pub queries: Vec<TocQuery>,
}

fn toc_node(wiki: &Wiki, t: &WikiTopic) -> TocNode {
    TocNode {
        name: t.name.clone(),
        children: t.children.iter().map(|c| toc_node(wiki, c)).collect(),
        queries: t
            .queries
            .iter()
            .map(|id| TocQuery {
                id: id.clone(),
                title: wiki
                    .state()
                    .queries
                    .get(id)
                    .map(|r| r.def.title.clone())
                    .unwrap_or_default(),
            })
            .collect(),
    }
}

async fn toc(State(app): AppRef) -> Json<TocNode> {
    let wiki = app.wiki.read().unwrap();
    Json(toc_node(&wiki, wiki.toc()))
}

async fn query_page(State(app): AppRef, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<Json<QueryPage>> {
    let wiki = app.wiki.read().unwrap();
    Ok(Json(wiki.query_page(&who, &id, &app.store)?))
}

async fn documentation(State(app): AppRef, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<Response> {
    let (doc, bytes) = app.wiki.read().unwrap().documentation(&who, &id)?;
    let disposition = format!("inline; filename=\"{}\"", doc.file_name.replace('"', ""));
    Ok((
        [
            (CONTENT_TYPE, doc.media_type),
            (HeaderName::from_static("content-disposition"), disposition),
        ],
        bytes,
    )
        .into_response())
}

fn runnable(app: &AppState, who: &Principal, id: &str) -> ApiResult<QueryDefinition> {
    Ok(app.wiki.read().unwrap().get(who, id)?.def.clone())
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct RunRequest {
    pub bindings: BTreeMap<String, String>,
}

/// An empty body means no bindings.
fn run_request(body: &[u8]) -> ApiResult<RunRequest> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(RunRequest::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

#[derive(Debug, Serialize)]
struct JobHandle {
    job_id: String,
    state: JobState,
}

/// Identical definition and bindings share one job.
fn coalesce_key(def: &QueryDefinition, bindings: &Bindings) -> String {
    let def_json = serde_json::to_string(def).unwrap_or_default();
    let b = serde_json::to_string(bindings).unwrap_or_default();
    format!("{def_json}\u{0}{b}")
}

fn enqueue(app: &Arc<AppState>, def: QueryDefinition, user_values: &BTreeMap<String, String>) -> ApiResult<(String, tokio::sync::watch::Receiver<JobState>)> {
    let query = ValidatedQuery::new(def.clone(), &app.store)?;
    let bindings = bind_parameters(&query, user_values)?;
    let key = coalesce_key(&def, &bindings);
    let store = app.store.clone();
    let limits = app.config.limits;
    let task_bindings = bindings.clone();
    app.jobs
        .submit(
            &def.id,
            &bindings,
            key,
            Box::new(move || execute_main(&store, &query, &task_bindings, &limits)),
        )
        .map_err(job_error)
}

fn finished(view: JobView) -> ApiResult<Response> {
    match (view.state, view.result, view.error) {
        (JobState::Done, Some(grid), _) => {
            let elapsed = grid.elapsed.as_millis().to_string();
            let mut resp = Json(grid.as_ref()).into_response();
            if let Ok(v) = HeaderValue::from_str(&elapsed) {
                resp.headers_mut().insert(HeaderName::from_static(ELAPSED_HEADER), v);
            }
            Ok(resp)
        }
        (_, _, Some(err)) => Err(err),
        (state, _, _) => Err(ApiError::internal(format!("job ended in {state:?} without a result"))),
    }
}

/// Runs a query inline when it finishes within the sync budget, otherwise
/// answers 202 with a job handle to poll.
async fn run_query(app: &Arc<AppState>, def: QueryDefinition, req: RunRequest) -> ApiResult<Response> {
    let (job_id, rx) = enqueue(app, def, &req.bindings)?;
    let state = JobManager::wait(rx, app.config.sync_budget).await;
    if state.is_terminal() {
        finished(app.jobs.poll(&job_id).map_err(job_error)?)
    } else {
        Ok((StatusCode::ACCEPTED, Json(JobHandle { job_id, state })).into_response())
    }
}

async fn run_published(
    State(app): AppRef,
    Caller(who): Caller,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let def = runnable(&app, &who, &id)?;
    run_query(&app, def, run_request(&body)?).await
}

#[derive(Debug, Deserialize)]
pub struct DetailRequest {
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
    pub hyperlink_id: String,
    pub value: Value,
}

async fn run_detail(
    State(app): AppRef,
    Caller(who): Caller,
    Path(id): Path<String>,
    Json(req): Json<DetailRequest>,
) -> ApiResult<Json<LinkOutcome>> {
    let def = runnable(&app, &who, &id)?;
    let app2 = app.clone();
    blocking(move || {
        let query = ValidatedQuery::new(def, &app2.store)?;
        let bindings = bind_parameters(&query, &req.bindings)?;
        Ok(follow_link(
            &app2.store,
            &query,
            &bindings,
            &req.hyperlink_id,
            &req.value,
            &app2.config.limits,
        )?)
    })
    .await
    .map(Json)
}

#[derive(Debug, Deserialize)]
pub struct JobRequest {
    pub query_id: String,
    #[serde(default)]
    pub bindings: BTreeMap<String, String>,
}

async fn submit_job(State(app): AppRef, Caller(who): Caller, Json(req): Json<JobRequest>) -> ApiResult<Response> {
    let def = runnable(&app, &who, &req.query_id)?;
    let (job_id, rx) = enqueue(&app, def, &req.bindings)?;
    let state = *rx.borrow();
    Ok((StatusCode::ACCEPTED, Json(JobHandle { job_id, state })).into_response())
}

async fn poll_job(State(app): AppRef, Path(id): Path<String>) -> ApiResult<Json<JobView>> {
    app.jobs.poll(&id).map(Json).map_err(job_error)
}

async fn dev_list(State(app): AppRef, Caller(who): Caller) -> ApiResult<Json<Vec<QuerySummary>>> {
    require(&who, Role::Developer)?;
    Ok(Json(app.wiki.read().unwrap().list(&who)))
}

async fn dev_create(State(app): AppRef, Caller(who): Caller, Json(draft): Json<QueryDraft>) -> ApiResult<Response> {
    require(&who, Role::Developer)?;
    let id = app.wiki.write().unwrap().create_draft(&who, draft)?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))).into_response())
}

async fn dev_get(State(app): AppRef, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<Json<QueryRecord>> {
    require(&who, Role::Developer)?;
    Ok(Json(app.wiki.read().unwrap().get(&who, &id)?.clone()))
}

async fn dev_update(
    State(app): AppRef,
    Caller(who): Caller,
    Path(id): Path<String>,
    Json(draft): Json<QueryDraft>,
) -> ApiResult<StatusCode> {
    require(&who, Role::Developer)?;
    app.wiki.write().unwrap().update_draft(&who, &id, draft)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn dev_delete(State(app): AppRef, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<StatusCode> {
    require(&who, Role::Developer)?;
    app.wiki.write().unwrap().delete_draft(&who, &id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn dev_validate(
    State(app): AppRef,
    Caller(who): Caller,
    Path(id): Path<String>,
) -> ApiResult<Json<ValidationReport>> {
    require(&who, Role::Developer)?;
    let def = runnable(&app, &who, &id)?;
    let store = app.store.clone();
    blocking(move || Ok(validate_query(&def, &store))).await.map(Json)
}

async fn dev_run(
    State(app): AppRef,
    Caller(who): Caller,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    require(&who, Role::Developer)?;
    let def = runnable(&app, &who, &id)?;
    run_query(&app, def, run_request(&body)?).await
}

async fn dev_submit(State(app): AppRef, Caller(who): Caller, Path(id): Path<String>) -> ApiResult<StatusCode> {
    require(&who, Role::Developer)?;
    let store = app.store.clone();
    app.wiki
        .write()
        .unwrap()
        .submit(&who, &id, |def| validate_query(def, &store))?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
struct DocParams {
    file_name: String,
}

async fn dev_documentation(
    State(app): AppRef,
    Caller(who): Caller,
    Path(id): Path<String>,
    Query(p): Query<DocParams>,
    body: Bytes,
) -> ApiResult<Json<mushaf_querylab::Documentation>> {
    require(&who, Role::Developer)?;
    let doc = app
        .wiki
        .write()
        .unwrap()
        .attach_documentation(&who, &id, &p.file_name, &body)?;
    Ok(Json(doc))
}

#[derive(Deserialize)]
struct AdminListParams {
    state: Option<QueryState>,
}

async fn admin_list(
    State(app): AppRef,
    Caller(who): Caller,
    Query(p): Query<AdminListParams>,
) -> ApiResult<Json<Vec<QuerySummary>>> {
    require(&who, Role::Admin)?;
    let all = app.wiki.read().unwrap().list(&who);
    Ok(Json(all.into_iter().filter(|q| p.state.is_none_or(|s| q.state == s)).collect()))
}

#[derive(Debug, Deserialize)]
pub struct DecideRequest {
    pub decision: Decision,
    #[serde(default)]
    pub topic_path: Vec<String>,
    #[serde(default)]
    pub reason: Option<String>,
}

async fn admin_decide(
    State(app): AppRef,
    Caller(who): Caller,
    Path(id): Path<String>,
    Json(req): Json<DecideRequest>,
) -> ApiResult<StatusCode> {
    require(&who, Role::Admin)?;
    app.wiki
        .write()
        .unwrap()
        .decide(&who, &id, req.decision, &req.topic_path, req.reason)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/meta", get(meta))
        .route("/api/pages/{n}", get(page))
        .route("/api/navigate", get(navigate))
        .route("/api/ayahs/{serial}", get(ayah))
        .route("/api/stats/surah/{n}", get(stats_surah))
        .route("/api/stats/ayah/{serial}", get(stats_ayah))
        .route("/api/stats/word/{serial}", get(stats_word))
        .route("/api/stats/selection", post(stats_selection))
        .route("/api/split", post(split_text))
        .route("/api/wiki/toc", get(toc))
        .route("/api/wiki/queries/{id}", get(query_page))
        .route("/api/wiki/queries/{id}/documentation", get(documentation))
        .route("/api/wiki/queries/{id}/run", post(run_published))
        .route("/api/wiki/queries/{id}/detail", post(run_detail))
        .route("/api/jobs", post(submit_job))
        .route("/api/jobs/{id}", get(poll_job))
        .route("/api/dev/queries", get(dev_list).post(dev_create))
        .route("/api/dev/queries/{id}", get(dev_get).put(dev_update).delete(dev_delete))
        .route("/api/dev/queries/{id}/validate", post(dev_validate))
        .route("/api/dev/queries/{id}/run", post(dev_run))
        .route("/api/dev/queries/{id}/submit", post(dev_submit))
        .route(
            "/api/dev/queries/{id}/documentation",
            put(dev_documentation).layer(DefaultBodyLimit::max(MAX_DOCUMENTATION_BYTES + 1)),
        )
        .route("/api/admin/queries", get(admin_list))
        .route("/api/admin/queries/{id}/decide", post(admin_decide))
        .fallback(fallback)
        .with_state(state)
}
