//! Dot-bracket record files.
//!
//! A file is a sequence of three-line records:
//!
//! ```text
//! >identifier
//! GGGAAACCC
//! (((...)))
//! ```
//!
//! Blank lines between records and at the end of the file are ignored.

use thiserror::Error;

use crate::arcstr::{ArcAnnotatedString, ArcError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub string: ArcAnnotatedString,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("line {line}: expected a '>' identifier line")]
    MissingHeader { line: usize },
    #[error("record '{id}' (line {line}): missing {what} line")]
    Truncated {
        id: String,
        line: usize,
        what: &'static str,
    },
    #[error("record '{id}' (line {line}): {source}")]
    Invalid {
        id: String,
        line: usize,
        #[source]
        source: ArcError,
    },
}

pub fn parse_records(text: &str) -> Result<Vec<Record>, RecordError> {
    let mut lines = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(k, l)| (k + 1, l));
    let mut out = Vec::new();
    // Blank lines are skipped between records only, so a record may carry an
    // empty string.
    while let Some((line, header)) = lines.by_ref().find(|(_, l)| !l.trim().is_empty()) {
        let id = header
            .strip_prefix('>')
            .ok_or(RecordError::MissingHeader { line })?
            .trim()
            .to_string();
        let (_, bases) = lines.next().ok_or_else(|| RecordError::Truncated {
            id: id.clone(),
            line,
            what: "sequence",
        })?;
        let (_, structure) = lines.next().ok_or_else(|| RecordError::Truncated {
            id: id.clone(),
            line,
            what: "structure",
        })?;
        let string = ArcAnnotatedString::parse_dotbracket(bases.trim(), structure.trim()).map_err(
            |source| RecordError::Invalid {
                id: id.clone(),
                line,
                source,
            },
        )?;
        out.push(Record { id, string });
    }
    Ok(out)
}

pub fn format_record(id: &str, s: &ArcAnnotatedString) -> String {
    format!(">{id}\n{}\n{}\n", s.sequence(), s.structure())
}
