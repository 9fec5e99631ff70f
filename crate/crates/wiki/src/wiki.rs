use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use base64::Engine as _;
use base64::engine::general_purpose::STANDARD as BASE64;
use mushaf_querylab::{
    Documentation, FormField, HyperlinkColumn, ParameterSpec, QueryDefinition, QueryState, Store, ValidationReport,
    form_spec,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, WikiError};
use crate::topic::{WikiTopic, normalize_path};
use crate::workflow::{Decision, Principal, Role, transition};

pub const MAX_DOCUMENTATION_BYTES: usize = 10 * 1024 * 1024;

const STATE_FILE: &str = "wiki.json";
const BLOB_DIR: &str = "blobs";
const ARCHIVE_FORMAT: &str = "mushaf-wiki";
const ARCHIVE_VERSION: u32 = 1;

/// The fields a developer edits on a draft.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryDraft {
    pub title: String,
    #[serde(default)]
    pub description: String,
    pub main_sql: String,
    #[serde(default)]
    pub parameters: Vec<ParameterSpec>,
    #[serde(default)]
    pub detail_sql: Option<String>,
    #[serde(default)]
    pub hyperlink_columns: Vec<HyperlinkColumn>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub def: QueryDefinition,
    pub owner: String,
    #[serde(default)]
    pub rejection_reason: Option<String>,
    pub created_at: u64,
    pub updated_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub query_id: String,
    pub submitted_at: u64,
    pub decided_at: Option<u64>,
    pub decider: Option<String>,
    pub decision: Option<Decision>,
    #[serde(default)]
    pub topic_path: Vec<String>,
    #[serde(default)]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiState {
    pub next_id: u64,
    pub queries: BTreeMap<String, QueryRecord>,
    pub records: Vec<PublicationRecord>,
    pub toc: WikiTopic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySummary {
    pub id: String,
    pub title: String,
    pub state: QueryState,
    pub owner: String,
    pub topic_path: Vec<String>,
}

/// Everything a query page shows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryPage {
    pub id: String,
    pub title: String,
    pub description: String,
    pub documentation: Option<Documentation>,
    pub main_sql: String,
    pub detail_sql: Option<String>,
    pub parameters: Vec<ParameterSpec>,
    pub hyperlink_columns: Vec<HyperlinkColumn>,
    pub form: Vec<FormField>,
    pub state: QueryState,
    pub topic_path: Vec<String>,
    pub owner: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WikiArchive {
    pub format: String,
    pub version: u32,
    pub state: WikiState,
    /// Documentation blobs keyed by SHA-256, base64 encoded.
    pub blobs: BTreeMap<String, String>,
}

#[derive(Debug)]
enum Blobs {
    Memory(BTreeMap<String, Vec<u8>>),
    Dir(PathBuf),
}

impl Blobs {
    fn put(&mut self, bytes: &[u8]) -> Result<String> {
        let key = hex::encode(Sha256::digest(bytes));
        match self {
            Blobs::Memory(m) => {
                m.insert(key.clone(), bytes.to_vec());
            }
            Blobs::Dir(dir) => {
                let path = dir.join(&key);
                if !path.exists() {
                    write_atomic(&path, bytes)?;
                }
            }
        }
        Ok(key)
    }

    fn get(&self, key: &str) -> Result<Vec<u8>> {
        match self {
            Blobs::Memory(m) => m
                .get(key)
                .cloned()
                .ok_or_else(|| WikiError::Io(format!("blob {key} missing"))),
            Blobs::Dir(dir) => fs::read(dir.join(key)).map_err(|e| WikiError::Io(format!("blob {key}: {e}"))),
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_os_string();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| WikiError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| WikiError::Io(format!("{}: {e}", path.display())))
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn media_type(file_name: &str, bytes: &[u8]) -> Result<&'static str> {
    let lower = file_name.to_ascii_lowercase();
    if lower.ends_with(".pdf") {
        if bytes.starts_with(b"%PDF-") {
            Ok("application/pdf")
        } else {
            Err(WikiError::Documentation(format!("{file_name} is not a PDF file")))
        }
    } else if lower.ends_with(".md") || lower.ends_with(".markdown") {
        std::str::from_utf8(bytes)
            .map(|_| "text/markdown")
            .map_err(|_| WikiError::Documentation(format!("{file_name} is not UTF-8 text")))
    } else {
        Err(WikiError::Documentation(format!(
            "{file_name}: only PDF or Markdown documentation is accepted"
        )))
    }
}

/// Checks every structural invariant of a wiki state.
pub fn check_invariants(state: &WikiState) -> Result<()> {
    let bad = |m: String| Err(WikiError::Inconsistent(m));
    state.toc.check_names()?;
    if !state.toc.name.is_empty() {
        return bad("root topic must be unnamed".into());
    }
    let leaves = state.toc.leaves();
    let leaf_set: BTreeSet<&str> = leaves.iter().copied().collect();
    if leaf_set.len() != leaves.len() {
        return bad("a query appears more than once in the table of contents".into());
    }
    let published: BTreeSet<&str> = state
        .queries
        .values()
        .filter(|r| r.def.state == QueryState::Published)
        .map(|r| r.def.id.as_str())
        .collect();
    if leaf_set != published {
        return bad(format!("table of contents {leaf_set:?} differs from published {published:?}"));
    }
    for (id, rec) in &state.queries {
        if *id != rec.def.id {
            return bad(format!("key {id} holds query {}", rec.def.id));
        }
        let mine: Vec<&PublicationRecord> = state.records.iter().filter(|r| r.query_id == *id).collect();
        let pending = mine.iter().filter(|r| r.decision.is_none()).count();
        let approvals = mine.iter().filter(|r| r.decision == Some(Decision::Published)).count();
        match rec.def.state {
            QueryState::Published => {
                if approvals != 1 || pending != 0 {
                    return bad(format!("{id} is published with {approvals} approvals and {pending} pending"));
                }
                let on_path = state
                    .toc
                    .find(&rec.def.topic_path)
                    .is_some_and(|t| t.queries.iter().any(|q| q == id));
                if rec.def.topic_path.is_empty() || !on_path {
                    return bad(format!("{id} is not under its topic path {:?}", rec.def.topic_path));
                }
            }
            QueryState::Submitted => {
                if pending != 1 || approvals != 0 {
                    return bad(format!("{id} is submitted with {pending} pending records"));
                }
            }
            QueryState::Draft => {
                if pending != 0 || approvals != 0 {
                    return bad(format!("{id} is a draft with open or approved records"));
                }
            }
            QueryState::Rejected => return bad(format!("{id} is stored in the transient Rejected state")),
        }
    }
    for r in &state.records {
        if !state.queries.contains_key(&r.query_id) {
            return bad(format!("record for unknown query {}", r.query_id));
        }
        if r.decision.is_some() != r.decided_at.is_some() || r.decision.is_some() != r.decider.is_some() {
            return bad(format!("record for {} is half decided", r.query_id));
        }
    }
    Ok(())
}

/// Single-writer wiki store. Every mutation is applied to a copy, persisted,
/// and only then made visible.
#[derive(Debug)]
pub struct Wiki {
    state: WikiState,
    dir: Option<PathBuf>,
    blobs: Blobs,
}

impl Wiki {
    pub fn in_memory() -> Self {
        Wiki {
            state: WikiState {
                next_id: 1,
                ..WikiState::default()
            },
            dir: None,
            blobs: Blobs::Memory(BTreeMap::new()),
        }
    }

    /// Opens the store in `dir`, creating an empty one if absent.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        let blob_dir = dir.join(BLOB_DIR);
        fs::create_dir_all(&blob_dir).map_err(|e| WikiError::Io(format!("{}: {e}", blob_dir.display())))?;
        let file = dir.join(STATE_FILE);
        let state = if file.exists() {
            let text = fs::read_to_string(&file).map_err(|e| WikiError::Io(format!("{}: {e}", file.display())))?;
            let state: WikiState =
                serde_json::from_str(&text).map_err(|e| WikiError::Io(format!("{}: {e}", file.display())))?;
            check_invariants(&state)?;
            state
        } else {
            WikiState {
                next_id: 1,
                ..WikiState::default()
            }
        };
        let wiki = Wiki {
            state,
            dir: Some(dir),
            blobs: Blobs::Dir(blob_dir),
        };
        if !file.exists() {
            wiki.persist(&wiki.state)?;
        }
        Ok(wiki)
    }

    pub fn state(&self) -> &WikiState {
        &self.state
    }

    fn persist(&self, state: &WikiState) -> Result<()> {
        if let Some(dir) = &self.dir {
            let json = serde_json::to_vec_pretty(state).map_err(|e| WikiError::Io(e.to_string()))?;
            write_atomic(&dir.join(STATE_FILE), &json)?;
        }
        Ok(())
    }

    fn commit(&mut self, next: WikiState) -> Result<()> {
        debug_assert!(check_invariants(&next).is_ok(), "{:?}", check_invariants(&next));
        self.persist(&next)?;
        self.state = next;
        Ok(())
    }

    fn record(&self, id: &str) -> Result<&QueryRecord> {
        self.state
            .queries
            .get(id)
            .ok_or_else(|| WikiError::NotFound(id.to_string()))
    }

    fn can_view(who: &Principal, rec: &QueryRecord) -> bool {
        rec.def.state == QueryState::Published
            || who.role == Role::Admin
            || (who.role != Role::Public && who.user == rec.owner)
    }

    /// Owner check plus Draft state, the precondition for every edit.
    fn editable<'a>(state: &'a mut WikiState, who: &Principal, id: &str, action: &'static str) -> Result<&'a mut QueryRecord> {
        let rec = state
            .queries
            .get_mut(id)
            .ok_or_else(|| WikiError::NotFound(id.to_string()))?;
        if who.role == Role::Public || who.user != rec.owner {
            return Err(WikiError::NotAuthorized(format!("only the owner may {action} {id}")));
        }
        if rec.def.state != QueryState::Draft {
            return Err(WikiError::WrongState {
                action,
                state: rec.def.state,
            });
        }
        Ok(rec)
    }

    pub fn create_draft(&mut self, who: &Principal, draft: QueryDraft) -> Result<String> {
        if who.role == Role::Public || who.user.is_empty() {
            return Err(WikiError::NotAuthorized("creating queries needs a developer token".into()));
        }
        let mut next = self.state.clone();
        let id = format!("q{}", next.next_id);
        next.next_id += 1;
        let t = now();
        let mut def = QueryDefinition::new(id.clone(), draft.title.clone(), draft.main_sql.clone());
        apply_draft(&mut def, draft);
        next.queries.insert(
            id.clone(),
            QueryRecord {
                def,
                owner: who.user.clone(),
                rejection_reason: None,
                created_at: t,
                updated_at: t,
            },
        );
        self.commit(next)?;
        Ok(id)
    }

    pub fn update_draft(&mut self, who: &Principal, id: &str, draft: QueryDraft) -> Result<()> {
        let mut next = self.state.clone();
        let rec = Self::editable(&mut next, who, id, "edit")?;
        apply_draft(&mut rec.def, draft);
        rec.updated_at = now();
        self.commit(next)
    }

    pub fn delete_draft(&mut self, who: &Principal, id: &str) -> Result<()> {
        let mut next = self.state.clone();
        Self::editable(&mut next, who, id, "delete")?;
        next.queries.remove(id);
        next.records.retain(|r| r.query_id != id);
        self.commit(next)
    }

    pub fn attach_documentation(&mut self, who: &Principal, id: &str, file_name: &str, bytes: &[u8]) -> Result<Documentation> {
        if bytes.len() > MAX_DOCUMENTATION_BYTES {
            return Err(WikiError::Documentation(format!(
                "{} bytes exceeds the {MAX_DOCUMENTATION_BYTES} byte limit",
                bytes.len()
            )));
        }
        let media = media_type(file_name, bytes)?;
        let mut next = self.state.clone();
        Self::editable(&mut next, who, id, "attach documentation to")?;
        let sha256 = self.blobs.put(bytes)?;
        let doc = Documentation {
            file_name: file_name.to_string(),
            media_type: media.to_string(),
            size: bytes.len() as u64,
            sha256,
        };
        let rec = next.queries.get_mut(id).expect("checked by editable");
        rec.def.documentation = Some(doc.clone());
        rec.updated_at = now();
        self.commit(next)?;
        Ok(doc)
    }

    pub fn documentation(&self, who: &Principal, id: &str) -> Result<(Documentation, Vec<u8>)> {
        let rec = self.record(id)?;
        if !Self::can_view(who, rec) {
            return Err(WikiError::NotAuthorized(format!("{id} is not published")));
        }
        let doc = rec
            .def
            .documentation
            .clone()
            .ok_or_else(|| WikiError::NotFound(format!("{id} documentation")))?;
        let bytes = self.blobs.get(&doc.sha256)?;
        Ok((doc, bytes))
    }

    /// Draft to Submitted. `validate` runs the query checks; any violation
    /// leaves the query in Draft.
    pub fn submit(
        &mut self,
        who: &Principal,
        id: &str,
        validate: impl FnOnce(&QueryDefinition) -> ValidationReport,
    ) -> Result<()> {
        let mut next = self.state.clone();
        let rec = Self::editable(&mut next, who, id, "submit")?;
        let report = validate(&rec.def);
        if !report.is_valid() {
            return Err(WikiError::Validation(report));
        }
        rec.def.state = transition(rec.def.state, QueryState::Submitted)?;
        rec.rejection_reason = None;
        let t = now();
        rec.updated_at = t;
        next.records.push(PublicationRecord {
            query_id: id.to_string(),
            submitted_at: t,
            decided_at: None,
            decider: None,
            decision: None,
            topic_path: Vec::new(),
            reason: None,
        });
        self.commit(next)
    }

    /// Admin decision on a submitted query. Publishing files it under
    /// `topic_path`, creating missing topics; rejecting returns it to Draft
    /// with `reason`.
    pub fn decide(
        &mut self,
        who: &Principal,
        id: &str,
        decision: Decision,
        topic_path: &[String],
        reason: Option<String>,
    ) -> Result<()> {
        if who.role != Role::Admin {
            return Err(WikiError::NotAuthorized("only administrators decide on submissions".into()));
        }
        let mut next = self.state.clone();
        let rec = next
            .queries
            .get_mut(id)
            .ok_or_else(|| WikiError::NotFound(id.to_string()))?;
        let t = now();
        let path = match decision {
            Decision::Published => {
                let path = normalize_path(topic_path)?;
                rec.def.state = transition(rec.def.state, QueryState::Published)?;
                rec.def.topic_path = path.clone();
                path
            }
            Decision::Rejected => {
                let rejected = transition(rec.def.state, QueryState::Rejected)?;
                rec.def.state = transition(rejected, QueryState::Draft)?;
                rec.rejection_reason = Some(reason.clone().unwrap_or_default());
                Vec::new()
            }
        };
        rec.updated_at = t;
        if decision == Decision::Published {
            next.toc.ensure(&path).queries.push(id.to_string());
        }
        let pending = next
            .records
            .iter_mut()
            .rev()
            .find(|r| r.query_id == id && r.decision.is_none())
            .ok_or_else(|| WikiError::Inconsistent(format!("{id} has no pending submission")))?;
        pending.decided_at = Some(t);
        pending.decider = Some(who.user.clone());
        pending.decision = Some(decision);
        pending.topic_path = path;
        pending.reason = reason;
        self.commit(next)
    }

    pub fn toc(&self) -> &WikiTopic {
        &self.state.toc
    }

    pub fn get(&self, who: &Principal, id: &str) -> Result<&QueryRecord> {
        let rec = self.record(id)?;
        if Self::can_view(who, rec) {
            Ok(rec)
        } else {
            Err(WikiError::NotAuthorized(format!("{id} is not published")))
        }
    }

    pub fn query_page(&self, who: &Principal, id: &str, store: &Store) -> Result<QueryPage> {
        let rec = self.get(who, id)?;
        let def = &rec.def;
        let form = form_spec(def, store).map_err(|e| WikiError::Io(e.to_string()))?;
        Ok(QueryPage {
            id: def.id.clone(),
            title: def.title.clone(),
            description: def.description.clone(),
            documentation: def.documentation.clone(),
            main_sql: def.main_sql.clone(),
            detail_sql: def.detail_sql.clone(),
            parameters: def.parameters.clone(),
            hyperlink_columns: def.hyperlink_columns.clone(),
            form,
            state: def.state,
            topic_path: def.topic_path.clone(),
            owner: rec.owner.clone(),
        })
    }

    /// Queries `who` may see: all for admins, own plus published for
    /// developers, published for everyone else.
    pub fn list(&self, who: &Principal) -> Vec<QuerySummary> {
        self.state
            .queries
            .values()
            .filter(|r| Self::can_view(who, r))
            .map(|r| QuerySummary {
                id: r.def.id.clone(),
                title: r.def.title.clone(),
                state: r.def.state,
                owner: r.owner.clone(),
                topic_path: r.def.topic_path.clone(),
            })
            .collect()
    }

    pub fn records(&self, id: &str) -> Vec<&PublicationRecord> {
        self.state.records.iter().filter(|r| r.query_id == id).collect()
    }

    pub fn export(&self) -> Result<WikiArchive> {
        let mut blobs = BTreeMap::new();
        for rec in self.state.queries.values() {
            if let Some(doc) = &rec.def.documentation {
                blobs.insert(doc.sha256.clone(), BASE64.encode(self.blobs.get(&doc.sha256)?));
            }
        }
        Ok(WikiArchive {
            format: ARCHIVE_FORMAT.into(),
            version: ARCHIVE_VERSION,
            state: self.state.clone(),
            blobs,
        })
    }

    /// Replaces the whole wiki with `archive` after checking it.
    pub fn import(&mut self, archive: WikiArchive) -> Result<()> {
        if archive.format != ARCHIVE_FORMAT || archive.version != ARCHIVE_VERSION {
            return Err(WikiError::Inconsistent(format!(
                "unsupported archive {} v{}",
                archive.format, archive.version
            )));
        }
        check_invariants(&archive.state)?;
        let mut decoded = BTreeMap::new();
        for (key, b64) in &archive.blobs {
            let bytes = BASE64
                .decode(b64)
                .map_err(|e| WikiError::Inconsistent(format!("blob {key}: {e}")))?;
            if hex::encode(Sha256::digest(&bytes)) != *key {
                return Err(WikiError::Inconsistent(format!("blob {key} does not match its hash")));
            }
            decoded.insert(key.clone(), bytes);
        }
        for rec in archive.state.queries.values() {
            if let Some(doc) = &rec.def.documentation
                && !decoded.contains_key(&doc.sha256)
            {
                return Err(WikiError::Inconsistent(format!("{} documentation blob missing", rec.def.id)));
            }
        }
        for bytes in decoded.values() {
            self.blobs.put(bytes)?;
        }
        self.commit(archive.state)
    }
}

fn apply_draft(def: &mut QueryDefinition, draft: QueryDraft) {
    def.title = draft.title;
    def.description = draft.description;
    def.main_sql = draft.main_sql;
    def.parameters = draft.parameters;
    def.detail_sql = draft.detail_sql;
    def.hyperlink_columns = draft.hyperlink_columns;
}
