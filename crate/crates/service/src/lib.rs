//! HTTP JSON API for the explorer, statistics, splitter, wiki and query lab.
//!
//! Every endpoint lives under `/api`. Callers identify with
//! `Authorization: Bearer <token>`; no header means the public role. Query
//! runs answer inline when they finish within the sync budget and with a
//! job handle otherwise.

mod api;
mod config;
mod error;
mod jobs;

use std::net::SocketAddr;
use std::sync::Arc;

pub use api::{AppState, AyahView, DecideRequest, DetailRequest, ELAPSED_HEADER, JobRequest, RunRequest, TocNode, TocQuery, router};
pub use config::{ServiceConfig, TokenEntry};
pub use error::{ApiError, ApiResult};
pub use jobs::{JobError, JobManager, JobState, JobTimings, JobView, Task};

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
