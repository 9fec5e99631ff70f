use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result, bail};
use mushaf_service::{ServiceConfig, TokenEntry};
use serde::Deserialize;

/// Settings read from the `--config` TOML file. Every field is optional;
/// flags and environment variables override it.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub meta_dir: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub wiki_dir: Option<PathBuf>,
    pub abjad_table: Option<PathBuf>,
    pub listen: Option<SocketAddr>,
    pub row_limit: Option<usize>,
    pub timeout_ms: Option<u64>,
    pub workers: Option<usize>,
    pub queue_depth: Option<usize>,
    pub tokens: Vec<TokenEntry>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read config", path.display()))?;
        toml::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))
    }
}

/// Values given on the command line or through the environment. Clap
/// already prefers a flag over its environment variable.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub corpus: Option<PathBuf>,
    pub meta_dir: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub wiki_dir: Option<PathBuf>,
    pub abjad_table: Option<PathBuf>,
    pub listen: Option<SocketAddr>,
    pub row_limit: Option<usize>,
    pub timeout_ms: Option<u64>,
    pub workers: Option<usize>,
}

/// Resolved operator configuration.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub corpus: PathBuf,
    pub meta_dir: Option<PathBuf>,
    pub index: PathBuf,
    pub store: PathBuf,
    pub wiki_dir: PathBuf,
    pub abjad_table: Option<PathBuf>,
    pub listen: SocketAddr,
    pub service: ServiceConfig,
}

pub const DEFAULT_CORPUS: &str = "data/quran-uthmani.txt";
pub const DEFAULT_INDEX: &str = "mushaf.idx";
pub const DEFAULT_STORE: &str = "mushaf.sqlite";
pub const DEFAULT_WIKI: &str = "wiki";
pub const DEFAULT_LISTEN: &str = "127.0.0.1:8080";

impl CliConfig {
    pub fn resolve(file: FileConfig, over: Overrides) -> Result<Self> {
        let mut service = ServiceConfig {
            tokens: file.tokens,
            ..ServiceConfig::default()
        };
        if let Some(n) = over.row_limit.or(file.row_limit) {
            service.limits.row_limit = n;
        }
        if let Some(ms) = over.timeout_ms.or(file.timeout_ms) {
            service.limits.timeout = Duration::from_millis(ms);
        }
        if let Some(n) = over.workers.or(file.workers) {
            if n == 0 {
                bail!("workers must be at least 1");
            }
            service.workers = n;
        }
        if let Some(n) = file.queue_depth {
            service.queue_depth = n;
        }
        Ok(CliConfig {
            corpus: over.corpus.or(file.corpus).unwrap_or_else(|| DEFAULT_CORPUS.into()),
            meta_dir: over.meta_dir.or(file.meta_dir),
            index: over.index.or(file.index).unwrap_or_else(|| DEFAULT_INDEX.into()),
            store: over.store.or(file.store).unwrap_or_else(|| DEFAULT_STORE.into()),
            wiki_dir: over.wiki_dir.or(file.wiki_dir).unwrap_or_else(|| DEFAULT_WIKI.into()),
            abjad_table: over.abjad_table.or(file.abjad_table),
            listen: over
                .listen
                .or(file.listen)
                .unwrap_or_else(|| DEFAULT_LISTEN.parse().expect("valid default address")),
            service,
        })
    }

    /// Metadata directory for `corpus`: explicit, or the corpus file's
    /// directory.
    pub fn meta_dir_for(&self, corpus: &Path) -> PathBuf {
        self.meta_dir.clone().unwrap_or_else(|| {
            corpus
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map(Path::to_path_buf)
                .unwrap_or_else(|| ".".into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_and_defaults_fill_gaps() {
        let file: FileConfig = toml::from_str(
            r#"
            index = "file.idx"
            store = "file.sqlite"
            listen = "0.0.0.0:9000"
            timeout_ms = 500
            [[tokens]]
            token = "t"
            user = "u"
            role = "admin"
            "#,
        )
        .unwrap();
        let over = Overrides {
            index: Some("flag.idx".into()),
            timeout_ms: Some(50),
            ..Overrides::default()
        };
        let c = CliConfig::resolve(file, over).unwrap();
        assert_eq!(c.index, PathBuf::from("flag.idx"));
        assert_eq!(c.store, PathBuf::from("file.sqlite"));
        assert_eq!(c.listen, "0.0.0.0:9000".parse().unwrap());
        assert_eq!(c.service.limits.timeout, Duration::from_millis(50));
        assert_eq!(c.service.tokens.len(), 1);
        assert_eq!(c.wiki_dir, PathBuf::from(DEFAULT_WIKI));
        assert_eq!(c.meta_dir_for(&c.corpus), PathBuf::from("data"));
        assert_eq!(c.meta_dir_for(Path::new("x.txt")), PathBuf::from("."));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("colour = 1").is_err());
    }
}
