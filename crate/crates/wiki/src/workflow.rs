use mushaf_querylab::QueryState;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WikiError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Public,
    Developer,
    Admin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principal {
    pub user: String,
    pub role: Role,
}

impl Principal {
    pub fn public() -> Self {
        Principal {
            user: String::new(),
            role: Role::Public,
        }
    }

    pub fn developer(user: impl Into<String>) -> Self {
        Principal {
            user: user.into(),
            role: Role::Developer,
        }
    }

    pub fn admin(user: impl Into<String>) -> Self {
        Principal {
            user: user.into(),
            role: Role::Admin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Published,
    Rejected,
}

pub const ALL_STATES: [QueryState; 4] = [
    QueryState::Draft,
    QueryState::Submitted,
    QueryState::Published,
    QueryState::Rejected,
];

/// The lifecycle graph. Exactly four edges exist.
pub fn is_legal(from: QueryState, to: QueryState) -> bool {
    use QueryState::*;
    matches!(
        (from, to),
        (Draft, Submitted) | (Submitted, Published) | (Submitted, Rejected) | (Rejected, Draft)
    )
}

pub fn transition(from: QueryState, to: QueryState) -> Result<QueryState> {
    if is_legal(from, to) {
        Ok(to)
    } else {
        Err(WikiError::WrongState {
            action: action_name(to),
            state: from,
        })
    }
}

fn action_name(to: QueryState) -> &'static str {
    match to {
        QueryState::Draft => "revert to draft",
        QueryState::Submitted => "submit",
        QueryState::Published => "publish",
        QueryState::Rejected => "reject",
    }
}
