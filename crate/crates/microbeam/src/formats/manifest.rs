//! Tab-separated manifests written next to the artifacts they describe.
//!
//! `manifest.tsv` (raw cubes):
//!
//! ```text
//! # microbeam dataset manifest v1
//! index label seed file sha256    (tab-separated)
//! ```
//!
//! `spectrograms.tsv` (processed pairs):
//!
//! ```text
//! # microbeam spectrogram manifest v1
//! index label first second    (tab-separated)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use microbeam_core::Label;

use crate::error::{CliError, Result};

pub const DATASET_FILE: &str = "manifest.tsv";
pub const SPECTROGRAM_FILE: &str = "spectrograms.tsv";
const DATASET_HEADER: &str = "# microbeam dataset manifest v1";
const SPECTROGRAM_HEADER: &str = "# microbeam spectrogram manifest v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeEntry {
    pub index: usize,
    pub label: Label,
    pub seed: u64,
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairEntry {
    pub index: usize,
    pub label: Label,
    pub first: String,
    pub second: String,
}

pub fn write_dataset(entries: &[CubeEntry]) -> String {
    let mut out = format!("{DATASET_HEADER}\nindex\tlabel\tseed\tfile\tsha256\n");
    for e in entries {
        let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", e.index, e.label, e.seed, e.file, e.sha256);
    }
    out
}

pub fn write_pairs(entries: &[PairEntry]) -> String {
    let mut out = format!("{SPECTROGRAM_HEADER}\nindex\tlabel\tfirst\tsecond\n");
    for e in entries {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", e.index, e.label, e.first, e.second);
    }
    out
}

fn rows<'a>(
    text: &'a str,
    path: &Path,
    header: &str,
    columns: &str,
) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate();
    match (lines.next(), lines.next()) {
        (Some((_, h)), Some((_, c))) if h == header && c == columns => {}
        _ => {
            return Err(CliError::format(
                path,
                format!("expected `{header}` followed by the column line"),
            ))
        }
    }
    let width = columns.split('\t').count();
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != width {
            return Err(CliError::format(
                path,
                format!("line {}: expected {width} fields, found {}", i + 1, fields.len()),
            ));
        }
        out.push((i + 1, fields));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, name: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| CliError::format(path, format!("line {line}: bad {name} `{v}`")))
}

/// File names must stay inside the manifest's directory.
fn file_name(path: &Path, line: usize, v: &str) -> Result<String> {
    if v.is_empty() || v.contains('/') || v.contains('\\') || v == "." || v == ".." {
        return Err(CliError::format(path, format!("line {line}: bad file name `{v}`")));
    }
    Ok(v.to_owned())
}

pub fn parse_dataset(text: &str, path: &Path) -> Result<Vec<CubeEntry>> {
    rows(text, path, DATASET_HEADER, "index\tlabel\tseed\tfile\tsha256")?
        .into_iter()
        .map(|(line, f)| {
            let sha256 = f[4].to_ascii_lowercase();
            if sha256.len() != 64 || !sha256.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(CliError::format(path, format!("line {line}: bad sha256 `{}`", f[4])));
            }
            Ok(CubeEntry {
                index: field(path, line, "index", f[0])?,
                label: field(path, line, "label", f[1])?,
                seed: field(path, line, "seed", f[2])?,
                file: file_name(path, line, f[3])?,
                sha256,
            })
        })
        .collect()
}

pub fn parse_pairs(text: &str, path: &Path) -> Result<Vec<PairEntry>> {
    rows(text, path, SPECTROGRAM_HEADER, "index\tlabel\tfirst\tsecond")?
        .into_iter()
        .map(|(line, f)| {
            Ok(PairEntry {
                index: field(path, line, "index", f[0])?,
                label: field(path, line, "label", f[1])?,
                first: file_name(path, line, f[2])?,
                second: file_name(path, line, f[3])?,
            })
        })
        .collect()
}
