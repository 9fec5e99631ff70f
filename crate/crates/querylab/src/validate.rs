use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sqlparser::ast::{Query, SetExpr, Statement};
use sqlparser::dialect::SQLiteDialect;
use sqlparser::parser::Parser;
use sqlparser::tokenizer::{Token, Tokenizer};

use crate::definition::{DataType, DropdownSource, HyperlinkKind, InputMethod, QueryDefinition};
use crate::error::{QueryError, Result};
use crate::store::Store;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqlPart {
    Main,
    Detail,
}

impl fmt::Display for SqlPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SqlPart::Main => "main sql",
            SqlPart::Detail => "detail sql",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Violation {
    EmptyTitle,
    ParseError { sql: SqlPart, message: String },
    EmptyStatement { sql: SqlPart },
    MultipleStatements { sql: SqlPart, count: usize },
    NotSelect { sql: SqlPart, statement: String },
    ModifyingClause { sql: SqlPart, clause: String },
    UnsupportedPlaceholder { sql: SqlPart, marker: String },
    UndeclaredParameter { sql: SqlPart, name: String },
    EngineRejected { sql: SqlPart, message: String, offset: Option<usize> },
    NotReadOnly { sql: SqlPart },
    InvalidParameterName { name: String },
    DuplicateParameter { name: String },
    SequenceNotDense { expected: Vec<u32>, found: Vec<u32> },
    BadDefault { name: String, value: String },
    EmptyDropdown { name: String },
    DuplicateHyperlink { hyperlink_id: String },
    MissingColumn { hyperlink_id: String, column: String },
    SubqueryWithoutDetail { hyperlink_id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyTitle => write!(f, "title is empty"),
            ParseError { sql, message } => write!(f, "{sql}: parse error: {message}"),
            EmptyStatement { sql } => write!(f, "{sql}: no statement"),
            MultipleStatements { sql, count } => {
                write!(f, "{sql}: {count} statements; exactly one SELECT is allowed")
            }
            NotSelect { sql, statement } => write!(f, "{sql}: non-SELECT statement ({statement})"),
            ModifyingClause { sql, clause } => write!(f, "{sql}: {clause} is not allowed"),
            UnsupportedPlaceholder { sql, marker } => {
                write!(f, "{sql}: parameter marker {marker} is not supported; use @name")
            }
            UndeclaredParameter { sql, name } => write!(f, "{sql}: unbound parameter {name}"),
            EngineRejected { sql, message, offset } => match offset {
                Some(o) => write!(f, "{sql}: {message} (at byte {o})"),
                None => write!(f, "{sql}: {message}"),
            },
            NotReadOnly { sql } => write!(f, "{sql}: statement is not read-only"),
            InvalidParameterName { name } => {
                write!(f, "parameter name {name:?} must be @ followed by an identifier")
            }
            DuplicateParameter { name } => write!(f, "parameter {name} is declared more than once"),
            SequenceNotDense { expected, found } => {
                write!(f, "parameter sequence numbers {found:?} must be {expected:?}")
            }
            BadDefault { name, value } => write!(f, "default {value:?} of {name} is not an integer"),
            EmptyDropdown { name } => write!(f, "dropdown for {name} has no options"),
            DuplicateHyperlink { hyperlink_id } => write!(f, "hyperlink id {hyperlink_id} is used more than once"),
            MissingColumn { hyperlink_id, column } => {
                write!(f, "hyperlink {hyperlink_id}: column {column} is not in the query result")
            }
            SubqueryWithoutDetail { hyperlink_id } => {
                write!(f, "hyperlink {hyperlink_id}: Subquery links need a detail sql")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum Warning {
    MissingOrderBy { sql: SqlPart },
    UnusedParameter { name: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::MissingOrderBy { sql } => {
                write!(f, "{sql} has no ORDER BY; a tiebreak on every column is appended")
            }
            Warning::UnusedParameter { name } => write!(f, "parameter {name} is never referenced"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
struct SqlAnalysis {
    params: Vec<String>,
    columns: Option<Vec<String>>,
    needs_tiebreak: bool,
}

fn statement_keyword(stmt: &Statement) -> String {
    stmt.to_string()
        .split_whitespace()
        .next()
        .unwrap_or_default()
        .to_ascii_uppercase()
}

fn check_query(q: &Query, part: SqlPart, out: &mut Vec<Violation>) {
    if let Some(with) = &q.with {
        for cte in &with.cte_tables {
            check_query(&cte.query, part, out);
        }
    }
    check_set_expr(&q.body, part, out);
    if !q.locks.is_empty() {
        out.push(Violation::ModifyingClause {
            sql: part,
            clause: "locking clause".into(),
        });
    }
}

fn check_set_expr(body: &SetExpr, part: SqlPart, out: &mut Vec<Violation>) {
    match body {
        SetExpr::Select(s) => {
            if s.into.is_some() {
                out.push(Violation::ModifyingClause {
                    sql: part,
                    clause: "SELECT INTO".into(),
                });
            }
        }
        SetExpr::Query(q) => check_query(q, part, out),
        SetExpr::SetOperation { left, right, .. } => {
            check_set_expr(left, part, out);
            check_set_expr(right, part, out);
        }
        SetExpr::Insert(s) | SetExpr::Update(s) | SetExpr::Delete(s) | SetExpr::Merge(s) => {
            out.push(Violation::NotSelect {
                sql: part,
                statement: statement_keyword(s),
            });
        }
        _ => {}
    }
}

/// `@name` markers in source order, deduplicated, without the `@`.
fn at_parameters(sql: &str) -> Vec<String> {
    let dialect = SQLiteDialect {};
    let Ok(tokens) = Tokenizer::new(&dialect, sql).tokenize() else {
        return Vec::new();
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for pair in tokens.windows(2) {
        if let [Token::AtSign, Token::Word(w)] = pair
            && w.quote_style.is_none()
            && seen.insert(w.value.clone())
        {
            out.push(w.value.clone());
        }
    }
    out
}

fn analyze_sql(sql: &str, part: SqlPart, store: &Store, out: &mut Vec<Violation>) -> SqlAnalysis {
    let mut analysis = SqlAnalysis {
        params: at_parameters(sql),
        ..Default::default()
    };
    let statements = match Parser::parse_sql(&SQLiteDialect {}, sql) {
        Ok(s) => s,
        Err(e) => {
            out.push(Violation::ParseError {
                sql: part,
                message: e.to_string(),
            });
            return analysis;
        }
    };
    let query = match statements.as_slice() {
        [] => {
            out.push(Violation::EmptyStatement { sql: part });
            return analysis;
        }
        [Statement::Query(q)] => q,
        [other] => {
            out.push(Violation::NotSelect {
                sql: part,
                statement: statement_keyword(other),
            });
            return analysis;
        }
        many => {
            out.push(Violation::MultipleStatements {
                sql: part,
                count: many.len(),
            });
            for s in many {
                if !matches!(s, Statement::Query(_)) {
                    out.push(Violation::NotSelect {
                        sql: part,
                        statement: statement_keyword(s),
                    });
                }
            }
            return analysis;
        }
    };
    let before = out.len();
    check_query(query, part, out);
    if out.len() > before {
        return analysis;
    }
    analysis.needs_tiebreak = query.order_by.is_none() && query.limit_clause.is_none() && query.fetch.is_none();

    let conn = match store.session() {
        Ok(c) => c,
        Err(e) => {
            out.push(Violation::EngineRejected {
                sql: part,
                message: e.to_string(),
                offset: None,
            });
            return analysis;
        }
    };
    match conn.prepare(sql) {
        Ok(stmt) => {
            if !stmt.readonly() {
                out.push(Violation::NotReadOnly { sql: part });
            }
            for i in 1..=stmt.parameter_count() {
                match stmt.parameter_name(i) {
                    Some(n) if n.starts_with('@') => {}
                    other => out.push(Violation::UnsupportedPlaceholder {
                        sql: part,
                        marker: other.unwrap_or("?").to_string(),
                    }),
                }
            }
            analysis.columns = Some(stmt.column_names().into_iter().map(String::from).collect());
        }
        Err(e) => {
            let (message, offset) = match QueryError::from(e) {
                QueryError::Sql { message, offset } => (message, offset),
                other => (other.to_string(), None),
            };
            out.push(Violation::EngineRejected {
                sql: part,
                message,
                offset,
            });
        }
    }
    analysis
}

fn valid_parameter_name(name: &str) -> bool {
    let Some(rest) = name.strip_prefix('@') else {
        return false;
    };
    let mut chars = rest.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Analyzed {
    report: ValidationReport,
    main_columns: Vec<String>,
    main_tiebreak: bool,
    detail_tiebreak: bool,
}

fn analyze(def: &QueryDefinition, store: &Store) -> Analyzed {
    let mut v = Vec::new();
    let mut w = Vec::new();

    if def.title.trim().is_empty() {
        v.push(Violation::EmptyTitle);
    }

    let mut names = BTreeSet::new();
    for p in &def.parameters {
        if !valid_parameter_name(&p.name) {
            v.push(Violation::InvalidParameterName { name: p.name.clone() });
        }
        if !names.insert(p.name.as_str()) {
            v.push(Violation::DuplicateParameter { name: p.name.clone() });
        }
        if p.data_type == DataType::Integer
            && !p.default_value.is_empty()
            && p.default_value.trim().parse::<i64>().is_err()
        {
            v.push(Violation::BadDefault {
                name: p.name.clone(),
                value: p.default_value.clone(),
            });
        }
        if let InputMethod::Dropdown(DropdownSource::Static(opts)) = &p.input_method
            && opts.is_empty()
        {
            v.push(Violation::EmptyDropdown { name: p.name.clone() });
        }
    }
    let mut found: Vec<u32> = def.parameters.iter().map(|p| p.sequence_no).collect();
    found.sort_unstable();
    let expected: Vec<u32> = (1..=def.parameters.len() as u32).collect();
    if found != expected {
        v.push(Violation::SequenceNotDense { expected, found });
    }

    let main = analyze_sql(&def.main_sql, SqlPart::Main, store, &mut v);
    for name in &main.params {
        if !names.contains(format!("@{name}").as_str()) {
            v.push(Violation::UndeclaredParameter {
                sql: SqlPart::Main,
                name: format!("@{name}"),
            });
        }
    }
    if main.columns.is_some() && main.needs_tiebreak {
        w.push(Warning::MissingOrderBy { sql: SqlPart::Main });
    }

    let mut used: BTreeSet<String> = main.params.iter().map(|n| format!("@{n}")).collect();
    let mut detail_tiebreak = false;
    let mut detail_columns = None;
    if let Some(detail_sql) = def.detail_sql.as_deref().filter(|s| !s.trim().is_empty()) {
        let detail = analyze_sql(detail_sql, SqlPart::Detail, store, &mut v);
        let carried: BTreeSet<String> = def
            .hyperlink_columns
            .iter()
            .filter(|h| h.info_type == HyperlinkKind::Subquery)
            .map(|h| format!("@{}", h.backing_column))
            .collect();
        for name in &detail.params {
            let at = format!("@{name}");
            if !names.contains(at.as_str()) && !carried.contains(&at) {
                v.push(Violation::UndeclaredParameter {
                    sql: SqlPart::Detail,
                    name: at.clone(),
                });
            }
            used.insert(at);
        }
        if detail.columns.is_some() && detail.needs_tiebreak {
            w.push(Warning::MissingOrderBy { sql: SqlPart::Detail });
        }
        detail_tiebreak = detail.needs_tiebreak;
        detail_columns = detail.columns;
    }

    let mut ids = BTreeSet::new();
    for h in &def.hyperlink_columns {
        if !ids.insert(h.hyperlink_id.as_str()) {
            v.push(Violation::DuplicateHyperlink {
                hyperlink_id: h.hyperlink_id.clone(),
            });
        }
        if let Some(cols) = &main.columns {
            let has = |cols: &[String], col: &str| cols.iter().any(|c| c == col);
            let in_detail = h.info_type == HyperlinkKind::AyahSerialNo
                && detail_columns
                    .as_deref()
                    .is_some_and(|d| has(d, &h.backing_column) && has(d, &h.targeted_column));
            if !in_detail {
                for col in [&h.backing_column, &h.targeted_column] {
                    if !has(cols, col) {
                        v.push(Violation::MissingColumn {
                            hyperlink_id: h.hyperlink_id.clone(),
                            column: col.clone(),
                        });
                    }
                }
            }
        }
        if h.info_type == HyperlinkKind::Subquery && def.detail_sql.as_deref().is_none_or(|s| s.trim().is_empty()) {
            v.push(Violation::SubqueryWithoutDetail {
                hyperlink_id: h.hyperlink_id.clone(),
            });
        }
    }

    for p in &def.parameters {
        if !used.contains(&p.name) {
            w.push(Warning::UnusedParameter { name: p.name.clone() });
        }
    }

    Analyzed {
        report: ValidationReport {
            violations: v,
            warnings: w,
        },
        main_columns: main.columns.unwrap_or_default(),
        main_tiebreak: main.needs_tiebreak,
        detail_tiebreak,
    }
}

/// Checks `def` against the store schema and reports every violation found.
pub fn validate_query(def: &QueryDefinition, store: &Store) -> ValidationReport {
    analyze(def, store).report
}

/// A definition that passed [`validate_query`] with no violations. The only
/// way to reach execution.
#[derive(Debug, Clone)]
pub struct ValidatedQuery {
    def: QueryDefinition,
    main_columns: Vec<String>,
    main_tiebreak: bool,
    detail_tiebreak: bool,
    warnings: Vec<Warning>,
}

impl ValidatedQuery {
    pub fn new(def: QueryDefinition, store: &Store) -> Result<Self> {
        let a = analyze(&def, store);
        if !a.report.is_valid() {
            return Err(QueryError::Invalid(a.report));
        }
        Ok(ValidatedQuery {
            def,
            main_columns: a.main_columns,
            main_tiebreak: a.main_tiebreak,
            detail_tiebreak: a.detail_tiebreak,
            warnings: a.report.warnings,
        })
    }

    pub fn def(&self) -> &QueryDefinition {
        &self.def
    }

    pub fn main_columns(&self) -> &[String] {
        &self.main_columns
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    pub(crate) fn main_tiebreak(&self) -> bool {
        self.main_tiebreak
    }

    pub(crate) fn detail_tiebreak(&self) -> bool {
        self.detail_tiebreak
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_parameters_skip_strings_and_comments() {
        let sql = "select '@a', @b -- @c\n, @b, /* @d */ @e_1 from t where x = @B";
        assert_eq!(at_parameters(sql), vec!["b", "e_1", "B"]);
    }

    #[test]
    fn parameter_names() {
        assert!(valid_parameter_name("@SurahNo"));
        assert!(valid_parameter_name("@_x1"));
        assert!(!valid_parameter_name("SurahNo"));
        assert!(!valid_parameter_name("@1x"));
        assert!(!valid_parameter_name("@"));
        assert!(!valid_parameter_name("@a-b"));
    }
}
