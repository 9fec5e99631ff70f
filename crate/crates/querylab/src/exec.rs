use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rusqlite::ErrorCode;
use rusqlite::types::{ToSqlOutput, ValueRef};
use serde::{Deserialize, Serialize};

use crate::definition::{DataType, HyperlinkKind, QueryDefinition};
use crate::error::{QueryError, Result};
use crate::store::Store;
use crate::validate::ValidatedQuery;

/// A cell or bound parameter value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Null,
    Integer(i64),
    Real(f64),
    Text(String),
    Blob(Vec<u8>),
}

impl Value {
    fn from_ref(v: ValueRef<'_>) -> Self {
        match v {
            ValueRef::Null => Value::Null,
            ValueRef::Integer(i) => Value::Integer(i),
            ValueRef::Real(f) => Value::Real(f),
            ValueRef::Text(t) => Value::Text(String::from_utf8_lossy(t).into_owned()),
            ValueRef::Blob(b) => Value::Blob(b.to_vec()),
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Integer(i) => Some(*i),
            Value::Text(t) => t.trim().parse().ok(),
            _ => None,
        }
    }
}

impl rusqlite::ToSql for Value {
    fn to_sql(&self) -> rusqlite::Result<ToSqlOutput<'_>> {
        Ok(ToSqlOutput::Borrowed(match self {
            Value::Null => ValueRef::Null,
            Value::Integer(i) => ValueRef::Integer(*i),
            Value::Real(f) => ValueRef::Real(*f),
            Value::Text(t) => ValueRef::Text(t.as_bytes()),
            Value::Blob(b) => ValueRef::Blob(b),
        }))
    }
}

/// Parameter values keyed by `@name`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bindings(BTreeMap<String, Value>);

impl Bindings {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    fn with(&self, name: String, value: Value) -> Self {
        let mut b = self.clone();
        b.0.insert(name, value);
        b
    }
}

/// Resolves user-supplied strings against the declared parameters. Names may
/// be given with or without the leading `@`; omitted parameters take their
/// default.
pub fn bind_parameters(query: &ValidatedQuery, user_values: &BTreeMap<String, String>) -> Result<Bindings> {
    let def = query.def();
    for key in user_values.keys() {
        if def.parameter(key).is_none() {
            return Err(QueryError::UnknownParameter(key.clone()));
        }
    }
    let mut out = BTreeMap::new();
    for p in &def.parameters {
        let bare = &p.name[1..];
        let given = user_values
            .get(&p.name)
            .or_else(|| user_values.get(bare))
            .map(String::as_str);
        let raw = given.unwrap_or(&p.default_value);
        let value = match p.data_type {
            DataType::Alphanumeric => Value::Text(raw.to_string()),
            DataType::Integer => {
                let t = raw.trim();
                if t.is_empty() {
                    return Err(QueryError::MissingValue(p.name.clone()));
                }
                Value::Integer(t.parse().map_err(|_| QueryError::NotInteger {
                    name: p.name.clone(),
                    value: raw.to_string(),
                })?)
            }
        };
        out.insert(p.name.clone(), value);
    }
    Ok(Bindings(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    pub row_limit: usize,
    #[serde(with = "millis")]
    pub timeout: Duration,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            row_limit: 10_000,
            timeout: Duration::from_secs(30),
        }
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkAnnotation {
    pub row: usize,
    /// Index of the targeted column.
    pub column: usize,
    pub hyperlink_id: String,
    pub kind: HyperlinkKind,
    /// Cell value of the backing column.
    pub value: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultGrid {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub links: Vec<LinkAnnotation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<Box<ResultGrid>>,
    pub truncated: bool,
    /// Wall-clock execution time. Not serialized, so identical requests
    /// produce identical JSON.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for ResultGrid {
    fn eq(&self, other: &Self) -> bool {
        self.columns == other.columns
            && self.rows == other.rows
            && self.links == other.links
            && self.detail == other.detail
            && self.truncated == other.truncated
    }
}

impl ResultGrid {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn with_detail(mut self, detail: ResultGrid) -> Self {
        self.detail = Some(Box::new(detail));
        self
    }
}

fn strip_terminator(sql: &str) -> &str {
    sql.trim_end().trim_end_matches(';').trim_end()
}

fn tiebreak_sql(sql: &str, columns: usize) -> String {
    let keys: Vec<String> = (1..=columns).map(|i| i.to_string()).collect();
    format!("{}\nORDER BY {}", strip_terminator(sql), keys.join(", "))
}

fn interrupted(e: &rusqlite::Error) -> bool {
    e.sqlite_error_code() == Some(ErrorCode::OperationInterrupted)
}

fn run_sql(store: &Store, sql: &str, tiebreak: bool, bindings: &Bindings, limits: &Limits) -> Result<ResultGrid> {
    let start = Instant::now();
    let timeout = limits.timeout;
    let conn = store.session()?;
    conn.progress_handler(100, Some(move || start.elapsed() >= timeout))?;
    let timed_out = |e: rusqlite::Error| {
        if interrupted(&e) {
            QueryError::Timeout {
                limit_ms: timeout.as_millis(),
            }
        } else {
            QueryError::from(e)
        }
    };

    let mut stmt = conn.prepare(sql).map_err(timed_out)?;
    if tiebreak && stmt.column_count() > 0 {
        let ordered = tiebreak_sql(sql, stmt.column_count());
        if let Ok(s) = conn.prepare(&ordered) {
            stmt = s;
        }
    }
    if !stmt.readonly() {
        return Err(QueryError::Sql {
            message: "statement is not read-only".into(),
            offset: None,
        });
    }
    for i in 1..=stmt.parameter_count() {
        let name = stmt.parameter_name(i).unwrap_or("?").to_string();
        let value = bindings.get(&name).ok_or(QueryError::MissingValue(name))?;
        stmt.raw_bind_parameter(i, value)?;
    }
    let columns: Vec<String> = stmt.column_names().into_iter().map(String::from).collect();
    let width = columns.len();
    let mut rows = Vec::new();
    let mut truncated = false;
    let mut cursor = stmt.raw_query();
    while let Some(row) = cursor.next().map_err(timed_out)? {
        if rows.len() == limits.row_limit {
            truncated = true;
            break;
        }
        let mut cells = Vec::with_capacity(width);
        for c in 0..width {
            cells.push(Value::from_ref(row.get_ref(c)?));
        }
        rows.push(cells);
    }
    Ok(ResultGrid {
        columns,
        rows,
        links: Vec::new(),
        detail: None,
        truncated,
        elapsed: start.elapsed(),
    })
}

/// Runs the main query and annotates every hyperlink cell.
pub fn execute_main(store: &Store, query: &ValidatedQuery, bindings: &Bindings, limits: &Limits) -> Result<ResultGrid> {
    let def = query.def();
    let mut grid = run_sql(store, &def.main_sql, query.main_tiebreak(), bindings, limits)?;
    annotate(&mut grid, def, false);
    Ok(grid)
}

/// Adds link annotations for every hyperlink whose backing and targeted
/// columns are both in `grid`. Detail grids carry only navigation links.
fn annotate(grid: &mut ResultGrid, def: &QueryDefinition, detail: bool) {
    for h in &def.hyperlink_columns {
        if detail && h.info_type != HyperlinkKind::AyahSerialNo {
            continue;
        }
        let (Some(backing), Some(target)) = (grid.column(&h.backing_column), grid.column(&h.targeted_column)) else {
            continue;
        };
        for (r, row) in grid.rows.iter().enumerate() {
            grid.links.push(LinkAnnotation {
                row: r,
                column: target,
                hyperlink_id: h.hyperlink_id.clone(),
                kind: h.info_type,
                value: row[backing].clone(),
            });
        }
    }
    grid.links.sort_by_key(|l| (l.row, l.column));
}

/// Runs the detail query with the clicked cell's backing value bound to the
/// like-named detail parameter, alongside the main query's bindings.
pub fn execute_detail(
    store: &Store,
    query: &ValidatedQuery,
    bindings: &Bindings,
    hyperlink_id: &str,
    value: &Value,
    limits: &Limits,
) -> Result<ResultGrid> {
    let def = query.def();
    let h = def
        .hyperlink(hyperlink_id)
        .ok_or_else(|| QueryError::UnknownHyperlink(hyperlink_id.to_string()))?;
    if h.info_type != HyperlinkKind::Subquery {
        return Err(QueryError::NotSubquery(hyperlink_id.to_string()));
    }
    let sql = def.detail_sql.as_deref().ok_or(QueryError::NoDetail)?;
    if *value == Value::Null {
        return Err(QueryError::NullLinkValue);
    }
    let detail_bindings = bindings.with(format!("@{}", h.backing_column), value.clone());
    let mut grid = run_sql(store, sql, query.detail_tiebreak(), &detail_bindings, limits)?;
    annotate(&mut grid, def, true);
    Ok(grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum LinkOutcome {
    Detail { grid: ResultGrid },
    Navigate { ayah_serial_no: i64 },
}

/// Dispatches a click on a hyperlink cell: detail grid for Subquery links,
/// navigation target for AyahSerialNo links.
pub fn follow_link(
    store: &Store,
    query: &ValidatedQuery,
    bindings: &Bindings,
    hyperlink_id: &str,
    value: &Value,
    limits: &Limits,
) -> Result<LinkOutcome> {
    let h = query
        .def()
        .hyperlink(hyperlink_id)
        .ok_or_else(|| QueryError::UnknownHyperlink(hyperlink_id.to_string()))?;
    match h.info_type {
        HyperlinkKind::Subquery => Ok(LinkOutcome::Detail {
            grid: execute_detail(store, query, bindings, hyperlink_id, value, limits)?,
        }),
        HyperlinkKind::AyahSerialNo => match value {
            Value::Null => Err(QueryError::NullLinkValue),
            v => v
                .as_i64()
                .filter(|n| *n > 0)
                .map(|ayah_serial_no| LinkOutcome::Navigate { ayah_serial_no })
                .ok_or_else(|| QueryError::BadLinkValue(format!("{v:?}"))),
        },
    }
}
