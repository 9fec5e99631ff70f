//! Developer-authored read-only SQL over the corpus relational store.
//!
//! [`build_store`] writes the `Surahs`, `Ayahs`, `Words`, `UniqueWords` and
//! `Letters` tables for an index. Definitions are checked by
//! [`validate_query`]; only a [`ValidatedQuery`] can be bound and executed.
//! Every execution opens its own read-only session with an authorizer that
//! denies anything but reads, a wall-clock timeout and a row limit.

mod definition;
mod error;
mod exec;
mod form;
mod store;
mod validate;

pub use definition::{
    DataType, Documentation, DropdownOption, DropdownSource, HyperlinkColumn, HyperlinkKind, InputMethod,
    ParameterSpec, QueryDefinition, QueryState,
};
pub use error::{QueryError, Result};
pub use exec::{
    Bindings, LinkAnnotation, LinkOutcome, Limits, ResultGrid, Value, bind_parameters, execute_detail, execute_main,
    follow_link,
};
pub use form::{FormControl, FormField, form_spec};
pub use store::{Store, build_store, file_hash};
pub use validate::{SqlPart, ValidatedQuery, ValidationReport, Violation, Warning, validate_query};
