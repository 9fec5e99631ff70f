use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use mushaf_querylab::{Bindings, QueryError, ResultGrid};
use serde::Serialize;
use thiserror::Error;
use tokio::sync::{mpsc, watch};

use crate::error::ApiError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum JobState {
    Pending,
    Running,
    Done,
    Failed,
    TimedOut,
}

impl JobState {
    pub fn is_terminal(self) -> bool {
        matches!(self, JobState::Done | JobState::Failed | JobState::TimedOut)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobTimings {
    pub submitted_at_ms: u64,
    pub started_at_ms: Option<u64>,
    pub finished_at_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobView {
    pub job_id: String,
    pub query_id: String,
    pub bindings: Bindings,
    pub state: JobState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Arc<ResultGrid>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ApiError>,
    pub timings: JobTimings,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum JobError {
    #[error("job queue is full")]
    QueueFull,
    #[error("job {0} not found")]
    Unknown(String),
    #[error("job {0} expired")]
    Expired(String),
}

pub type Task = Box<dyn FnOnce() -> Result<ResultGrid, QueryError> + Send>;

struct Job {
    view: JobView,
    key: String,
    finished: Option<Instant>,
    state_tx: watch::Sender<JobState>,
}

struct Inner {
    jobs: Mutex<HashMap<String, Job>>,
    by_key: Mutex<HashMap<String, String>>,
    expired: Mutex<std::collections::HashSet<String>>,
    next_id: AtomicU64,
    retention: Duration,
    tx: mpsc::Sender<(String, Task)>,
}

fn unix_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Bounded job pool: `workers` concurrent executions, at most `queue_depth`
/// waiting jobs, finished jobs kept for `retention`.
#[derive(Clone)]
pub struct JobManager {
    inner: Arc<Inner>,
}

impl JobManager {
    /// Spawns the worker tasks; must be called inside a Tokio runtime.
    pub fn start(workers: usize, queue_depth: usize, retention: Duration) -> Self {
        let (tx, rx) = mpsc::channel::<(String, Task)>(queue_depth.max(1));
        let inner = Arc::new(Inner {
            jobs: Mutex::new(HashMap::new()),
            by_key: Mutex::new(HashMap::new()),
            expired: Mutex::new(Default::default()),
            next_id: AtomicU64::new(1),
            retention,
            tx,
        });
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        for _ in 0..workers.max(1) {
            let rx = rx.clone();
            let inner = Arc::downgrade(&inner);
            tokio::spawn(async move {
                loop {
                    let next = rx.lock().await.recv().await;
                    let Some((id, task)) = next else { break };
                    let Some(inner) = inner.upgrade() else { break };
                    set_state(&inner, &id, JobState::Running, None);
                    let outcome = tokio::task::spawn_blocking(task).await;
                    let (state, result) = match outcome {
                        Ok(Ok(grid)) => (JobState::Done, Ok(Arc::new(grid))),
                        Ok(Err(e @ QueryError::Timeout { .. })) => (JobState::TimedOut, Err(ApiError::from(e))),
                        Ok(Err(e)) => (JobState::Failed, Err(ApiError::from(e))),
                        Err(join) => (JobState::Failed, Err(ApiError::internal(join.to_string()))),
                    };
                    set_state(&inner, &id, state, Some(result));
                }
            });
        }
        JobManager { inner }
    }

    /// Enqueues `task`, or returns the live job already registered under
    /// `key`.
    pub fn submit(
        &self,
        query_id: &str,
        bindings: &Bindings,
        key: String,
        task: Task,
    ) -> Result<(String, watch::Receiver<JobState>), JobError> {
        self.sweep();
        let mut by_key = self.inner.by_key.lock().unwrap();
        let mut jobs = self.inner.jobs.lock().unwrap();
        if let Some(job) = by_key.get(&key).and_then(|id| jobs.get(id))
            && !matches!(job.view.state, JobState::Failed | JobState::TimedOut)
        {
            return Ok((job.view.job_id.clone(), job.state_tx.subscribe()));
        }
        let id = format!("j{}", self.inner.next_id.fetch_add(1, Ordering::Relaxed));
        let (state_tx, state_rx) = watch::channel(JobState::Pending);
        jobs.insert(
            id.clone(),
            Job {
                view: JobView {
                    job_id: id.clone(),
                    query_id: query_id.to_string(),
                    bindings: bindings.clone(),
                    state: JobState::Pending,
                    result: None,
                    error: None,
                    timings: JobTimings {
                        submitted_at_ms: unix_ms(),
                        started_at_ms: None,
                        finished_at_ms: None,
                    },
                },
                key: key.clone(),
                finished: None,
                state_tx,
            },
        );
        if self.inner.tx.try_send((id.clone(), task)).is_err() {
            jobs.remove(&id);
            return Err(JobError::QueueFull);
        }
        by_key.insert(key, id.clone());
        Ok((id, state_rx))
    }

    pub fn poll(&self, id: &str) -> Result<JobView, JobError> {
        self.sweep();
        if let Some(job) = self.inner.jobs.lock().unwrap().get(id) {
            return Ok(job.view.clone());
        }
        if self.inner.expired.lock().unwrap().contains(id) {
            Err(JobError::Expired(id.to_string()))
        } else {
            Err(JobError::Unknown(id.to_string()))
        }
    }

    /// Waits up to `budget` for the job behind `rx` to finish.
    pub async fn wait(mut rx: watch::Receiver<JobState>, budget: Duration) -> JobState {
        let done = tokio::time::timeout(budget, rx.wait_for(|s| s.is_terminal()))
            .await
            .ok()
            .and_then(|r| r.ok().map(|s| *s));
        done.unwrap_or_else(|| *rx.borrow())
    }

    /// Drops finished jobs older than the retention window.
    fn sweep(&self) {
        let mut by_key = self.inner.by_key.lock().unwrap();
        let mut jobs = self.inner.jobs.lock().unwrap();
        let retention = self.inner.retention;
        let old: Vec<String> = jobs
            .iter()
            .filter(|(_, j)| j.finished.is_some_and(|t| t.elapsed() >= retention))
            .map(|(id, _)| id.clone())
            .collect();
        if old.is_empty() {
            return;
        }
        let mut expired = self.inner.expired.lock().unwrap();
        for id in old {
            if let Some(job) = jobs.remove(&id) {
                if by_key.get(&job.key) == Some(&id) {
                    by_key.remove(&job.key);
                }
                expired.insert(id);
            }
        }
    }
}

fn set_state(inner: &Inner, id: &str, state: JobState, result: Option<Result<Arc<ResultGrid>, ApiError>>) {
    let mut jobs = inner.jobs.lock().unwrap();
    let Some(job) = jobs.get_mut(id) else { return };
    if job.view.state.is_terminal() {
        return;
    }
    job.view.state = state;
    match state {
        JobState::Running => job.view.timings.started_at_ms = Some(unix_ms()),
        _ => {
            job.view.timings.finished_at_ms = Some(unix_ms());
            job.finished = Some(Instant::now());
        }
    }
    match result {
        Some(Ok(grid)) => job.view.result = Some(grid),
        Some(Err(e)) => job.view.error = Some(e),
        None => {}
    }
    job.state_tx.send_replace(state);
}
