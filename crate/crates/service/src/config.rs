use std::time::Duration;

use mushaf_querylab::Limits;
use mushaf_wiki::{Principal, Role};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenEntry {
    pub token: String,
    pub user: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub tokens: Vec<TokenEntry>,
    pub limits: Limits,
    /// Runs that finish within this budget answer inline; slower ones
    /// answer with a job handle.
    #[serde(with = "millis")]
    pub sync_budget: Duration,
    pub workers: usize,
    pub queue_depth: usize,
    #[serde(with = "millis")]
    pub job_retention: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            tokens: Vec::new(),
            limits: Limits::default(),
            sync_budget: Duration::from_secs(2),
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            queue_depth: 64,
            job_retention: Duration::from_secs(3600),
        }
    }
}

impl ServiceConfig {
    pub fn principal(&self, token: &str) -> Option<Principal> {
        self.tokens.iter().find(|t| t.token == token).map(|t| Principal {
            user: t.user.clone(),
            role: t.role,
        })
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
