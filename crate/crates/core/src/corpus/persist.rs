//! Single-file index format.
//!
//! ```text
//! magic      8 bytes   "MSHFIDX\0"
//! version    u32 LE
//! source     64 bytes  hex SHA-256 of the ingested inputs
//! checksum   32 bytes  SHA-256 of the payload
//! payload    bincode-encoded CorpusIndex
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::index::CorpusIndex;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"MSHFIDX\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 64 + 32;

impl CorpusIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = bincode::serialize(self).expect("index serializes");
        let checksum = Sha256::digest(&payload);
        let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(self.source_hash().as_bytes());
        out.extend_from_slice(&checksum);
        out.extend_from_slice(&payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::IndexFormat(m.to_string());
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(bad("not an index file"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::IndexFormat(format!(
                "unsupported version {version} (expected {FORMAT_VERSION})"
            )));
        }
        let source = std::str::from_utf8(&bytes[12..76]).map_err(|_| bad("corrupt header"))?;
        let payload = &bytes[HEADER_LEN..];
        if Sha256::digest(payload).as_slice() != &bytes[76..108] {
            return Err(bad("payload checksum mismatch"));
        }
        let index: CorpusIndex =
            bincode::deserialize(payload).map_err(|e| Error::IndexFormat(e.to_string()))?;
        if index.source_hash() != source {
            return Err(bad("header and payload disagree on the source hash"));
        }
        Ok(index)
    }

    /// Writes atomically: a sibling temp file renamed over `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?;
        Self::from_bytes(&bytes)
    }
}
