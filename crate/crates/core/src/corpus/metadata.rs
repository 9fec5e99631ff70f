//! Surah and mushaf layout tables.
//!
//! All tables are tab-separated UTF-8 with an optional header row. A layout
//! row marks the first ayah of a unit: `unit_no  surah_no  ayah_no`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurahMeta {
    pub serial: u32,
    pub name: String,
    pub full_name: String,
    pub revelation_sequence_no: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutRow {
    pub unit_no: u32,
    pub surah_no: u32,
    pub ayah_no: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub surahs: Vec<SurahMeta>,
    pub pages: Vec<LayoutRow>,
    pub juz: Vec<LayoutRow>,
    pub rubs: Vec<LayoutRow>,
}

pub const SURAHS_FILE: &str = "surahs.tsv";
pub const PAGES_FILE: &str = "pages.tsv";
pub const JUZ_FILE: &str = "juz.tsv";
pub const RUB_FILE: &str = "rub.tsv";

impl Metadata {
    /// Loads `surahs.tsv`, `pages.tsv`, `juz.tsv` and `rub.tsv` from `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let read = |name: &str| -> Result<String> {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| {
                Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            })
        };
        Ok(Self {
            surahs: parse_surahs(SURAHS_FILE, &read(SURAHS_FILE)?)?,
            pages: parse_layout(PAGES_FILE, &read(PAGES_FILE)?)?,
            juz: parse_layout(JUZ_FILE, &read(JUZ_FILE)?)?,
            rubs: parse_layout(RUB_FILE, &read(RUB_FILE)?)?,
        })
    }
}

fn rows<'a>(text: &'a str) -> impl Iterator<Item = (usize, Vec<&'a str>)> + 'a {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        // header rows start with a non-numeric cell
        .filter(|(_, l)| l.split('\t').next().is_some_and(|c| c.trim().parse::<u32>().is_ok()))
        .map(|(n, l)| (n, l.split('\t').map(str::trim).collect()))
}

fn number(file: &str, line: usize, cell: &str, what: &str) -> Result<u32> {
    cell.parse::<u32>().map_err(|_| Error::Metadata {
        file: file.to_string(),
        line,
        reason: format!("{what} {cell:?} is not a positive integer"),
    })
}

pub fn parse_surahs(file: &str, text: &str) -> Result<Vec<SurahMeta>> {
    let mut out = Vec::new();
    for (line, cells) in rows(text) {
        if cells.len() != 4 {
            return Err(Error::Metadata {
                file: file.to_string(),
                line,
                reason: format!("expected 4 columns, found {}", cells.len()),
            });
        }
        let serial = number(file, line, cells[0], "serial")?;
        if serial as usize != out.len() + 1 {
            return Err(Error::Metadata {
                file: file.to_string(),
                line,
                reason: format!("expected surah {}, found {serial}", out.len() + 1),
            });
        }
        out.push(SurahMeta {
            serial,
            name: normalize(cells[1]),
            full_name: normalize(cells[2]),
            revelation_sequence_no: number(file, line, cells[3], "revelation sequence")?,
        });
    }
    Ok(out)
}

pub fn parse_layout(file: &str, text: &str) -> Result<Vec<LayoutRow>> {
    let mut out = Vec::new();
    for (line, cells) in rows(text) {
        if cells.len() != 3 {
            return Err(Error::Metadata {
                file: file.to_string(),
                line,
                reason: format!("expected 3 columns, found {}", cells.len()),
            });
        }
        let unit_no = number(file, line, cells[0], "unit")?;
        if unit_no as usize != out.len() + 1 {
            return Err(Error::Metadata {
                file: file.to_string(),
                line,
                reason: format!("expected unit {}, found {unit_no}", out.len() + 1),
            });
        }
        out.push(LayoutRow {
            unit_no,
            surah_no: number(file, line, cells[1], "surah")?,
            ayah_no: number(file, line, cells[2], "ayah")?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_surah_rows_with_header() {
        let text = "serial\tname\tfull_name\trevelation_sequence_no\n1\tالفاتحة\tسورة الفاتحة\t5\n";
        let s = parse_surahs("s.tsv", text).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].revelation_sequence_no, 5);
        assert_eq!(s[0].full_name, "سورة الفاتحة");
    }

    #[test]
    fn rejects_gap_in_surah_serials() {
        let text = "1\ta\tb\t5\n3\tc\td\t6\n";
        let err = parse_surahs("s.tsv", text).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn rejects_short_layout_row() {
        let err = parse_layout("p.tsv", "1\t1\n").unwrap_err();
        assert!(err.to_string().contains("expected 3 columns"));
    }
}
