use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use mushaf_core::corpus::CorpusIndex;
use mushaf_core::{AbjadTable, Stats};
use rusqlite::hooks::{AuthAction, AuthContext, Authorization};
use rusqlite::{Connection, OpenFlags, params};
use sha2::{Digest, Sha256};

use crate::error::{QueryError, Result};

const SCHEMA: &str = "
CREATE TABLE Surahs (
    SurahSerialNo INTEGER PRIMARY KEY,
    SurahSerialNoBackward INTEGER NOT NULL,
    SurahName TEXT NOT NULL,
    SurahFullName TEXT NOT NULL,
    RevelationSequenceNo INTEGER NOT NULL,
    AyahCount INTEGER NOT NULL,
    WordCount INTEGER NOT NULL,
    LetterCount INTEGER NOT NULL
);
CREATE TABLE Ayahs (
    AyahSerialNo INTEGER PRIMARY KEY,
    SurahSerialNo INTEGER NOT NULL REFERENCES Surahs(SurahSerialNo),
    AyahNoInSurah INTEGER NOT NULL,
    Ayah TEXT NOT NULL,
    AyahNoTashkeel TEXT NOT NULL,
    PageNo INTEGER NOT NULL,
    JuzNo INTEGER NOT NULL,
    RubNo INTEGER NOT NULL,
    WordCount INTEGER NOT NULL,
    LetterCount INTEGER NOT NULL,
    JummalValue INTEGER NOT NULL
);
CREATE TABLE UniqueWords (
    UniqueWordId INTEGER PRIMARY KEY,
    Word TEXT NOT NULL,
    WordNoTashkeel TEXT NOT NULL,
    OccurrenceCount INTEGER NOT NULL
);
CREATE TABLE Words (
    WordSerialNo INTEGER PRIMARY KEY,
    AyahSerialNo INTEGER NOT NULL REFERENCES Ayahs(AyahSerialNo),
    SurahSerialNo INTEGER NOT NULL REFERENCES Surahs(SurahSerialNo),
    WordNoInAyah INTEGER NOT NULL,
    Word TEXT NOT NULL,
    WordNoTashkeel TEXT NOT NULL,
    UniqueWordId INTEGER NOT NULL REFERENCES UniqueWords(UniqueWordId),
    LetterCount INTEGER NOT NULL,
    JummalValue INTEGER NOT NULL
);
CREATE TABLE Letters (
    LetterSerialNo INTEGER PRIMARY KEY,
    WordSerialNo INTEGER NOT NULL REFERENCES Words(WordSerialNo),
    Letter TEXT NOT NULL
);
CREATE INDEX AyahsBySurah ON Ayahs(SurahSerialNo, AyahNoInSurah);
CREATE INDEX WordsByAyah ON Words(AyahSerialNo);
CREATE INDEX WordsBySurah ON Words(SurahSerialNo);
CREATE INDEX WordsByUniqueWord ON Words(UniqueWordId);
CREATE INDEX LettersByWord ON Letters(WordSerialNo);
";

/// Writes the relational store for `index` to `path`, replacing any
/// existing file. Returns the SHA-256 of the written file.
pub fn build_store(index: &CorpusIndex, table: &AbjadTable, path: &Path) -> Result<String> {
    let tmp = tmp_path(path);
    let _ = fs::remove_file(&tmp);
    {
        let mut conn = Connection::open(&tmp)?;
        conn.execute_batch("PRAGMA journal_mode = DELETE; PRAGMA page_size = 4096;")?;
        conn.execute_batch(SCHEMA)?;
        let tx = conn.transaction()?;
        insert_all(&tx, index, table)?;
        tx.commit()?;
        conn.execute_batch("VACUUM;")?;
    }
    fs::rename(&tmp, path).map_err(|e| QueryError::Io(format!("{}: {e}", path.display())))?;
    file_hash(path)
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

fn insert_all(tx: &rusqlite::Transaction<'_>, index: &CorpusIndex, table: &AbjadTable) -> Result<()> {
    let stats = Stats::new(index, table);

    let mut st = tx.prepare("INSERT INTO Surahs VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)")?;
    for s in index.surahs() {
        st.execute(params![
            s.surah_serial_no,
            s.surah_serial_no_backward,
            s.name,
            s.full_name,
            s.revelation_sequence_no,
            s.ayah_range.len(),
            s.word_range.len(),
            s.letter_range.len(),
        ])?;
    }

    let mut st = tx.prepare("INSERT INTO Ayahs VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)")?;
    for a in index.ayahs() {
        st.execute(params![
            a.ayah_serial_no,
            a.surah_serial_no,
            a.ayah_no_in_surah,
            a.text_with_tashkeel,
            a.text_no_tashkeel,
            a.page_no,
            a.juz_no,
            a.rub_no,
            a.word_range.len(),
            a.letter_range.len(),
            stats.jummal_of_letters(a.letter_range) as i64,
        ])?;
    }

    let mut st = tx.prepare("INSERT INTO UniqueWords VALUES (?1, ?2, ?3, ?4)")?;
    for u in index.unique_words() {
        st.execute(params![u.unique_word_id, u.form, u.form_no_tashkeel, u.occurrence_count])?;
    }

    let mut st = tx.prepare("INSERT INTO Words VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9)")?;
    for w in index.words() {
        st.execute(params![
            w.word_serial_no,
            w.ayah_serial_no,
            w.surah_serial_no,
            w.word_no_in_ayah,
            w.text_with_tashkeel,
            w.text_no_tashkeel,
            w.unique_word_id,
            w.letter_range.len(),
            stats.jummal_of_letters(w.letter_range) as i64,
        ])?;
    }

    let mut st = tx.prepare("INSERT INTO Letters VALUES (?1, ?2, ?3)")?;
    let mut buf = [0u8; 4];
    for l in index.letters() {
        st.execute(params![l.letter_serial_no, l.word_serial_no, &*l.letter.encode_utf8(&mut buf)])?;
    }
    Ok(())
}

/// SHA-256 of the store file bytes, lowercase hex.
pub fn file_hash(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| QueryError::Io(format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Handle on a built store file. Every session it opens is read-only.
#[derive(Debug, Clone)]
pub struct Store {
    path: PathBuf,
}

impl Store {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        if !path.is_file() {
            return Err(QueryError::Io(format!("{}: store file not found", path.display())));
        }
        let store = Store { path };
        store.session()?;
        Ok(store)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn hash(&self) -> Result<String> {
        file_hash(&self.path)
    }

    /// Fresh read-only connection with write-denying authorizer installed.
    pub fn session(&self) -> Result<Connection> {
        let conn = Connection::open_with_flags(
            &self.path,
            OpenFlags::SQLITE_OPEN_READ_ONLY | OpenFlags::SQLITE_OPEN_NO_MUTEX | OpenFlags::SQLITE_OPEN_URI,
        )?;
        conn.busy_timeout(Duration::from_secs(5))?;
        conn.pragma_update(None, "query_only", true)?;
        conn.authorizer(Some(read_only_authorizer))?;
        Ok(conn)
    }

    /// `(serial, name)` for every surah, in order.
    pub fn surah_list(&self) -> Result<Vec<(i64, String)>> {
        let conn = self.session()?;
        let mut st = conn.prepare("SELECT SurahSerialNo, SurahName FROM Surahs ORDER BY SurahSerialNo")?;
        let rows = st
            .query_map([], |r| Ok((r.get(0)?, r.get(1)?)))?
            .collect::<rusqlite::Result<Vec<_>>>()?;
        Ok(rows)
    }
}

fn read_only_authorizer(ctx: AuthContext<'_>) -> Authorization {
    match ctx.action {
        AuthAction::Select | AuthAction::Read { .. } | AuthAction::Recursive => Authorization::Allow,
        AuthAction::Function { function_name } if !function_name.eq_ignore_ascii_case("load_extension") => {
            Authorization::Allow
        }
        _ => Authorization::Deny,
    }
}
