//! Query publication workflow.
//!
//! Developers own drafts; submitting requires a clean validation report;
//! administrators publish a submission under a topic path or reject it back
//! to Draft. Published queries are the leaves of the topic tree.

mod error;
mod topic;
mod wiki;
mod workflow;

pub use error::{Result, WikiError};
pub use topic::{WikiTopic, normalize_path};
pub use wiki::{
    MAX_DOCUMENTATION_BYTES, PublicationRecord, QueryDraft, QueryPage, QueryRecord, QuerySummary, Wiki, WikiArchive,
    WikiState, check_invariants,
};
pub use workflow::{ALL_STATES, Decision, Principal, Role, is_legal, transition};
