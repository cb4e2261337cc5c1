//! Corpus manifests: one tab-separated record per line,
//! `path<TAB>label<TAB>technology<TAB>split`, `#` comments allowed.
//! TSV rather than CSV because audio paths may contain commas.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::derive_seed;

/// Technology tag every bonafide record must carry.
pub const HUMAN_TECHNOLOGY: &str = "human";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Bonafide,
    Spoof,
}

impl Label {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "bonafide" => Some(Label::Bonafide),
            "spoof" => Some(Label::Spoof),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Bonafide => "bonafide",
            Label::Spoof => "spoof",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "train" => Some(Split::Train),
            "validation" => Some(Split::Validation),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        })
    }
}

/// One labeled corpus entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub path: String,
    pub label: Label,
    pub technology: String,
    pub split: Split,
}

impl SampleRecord {
    /// Bonafide records must be tagged "human"; spoof records must not be.
    pub fn validate(&self) -> std::result::Result<(), String> {
        match self.label {
            Label::Bonafide if self.technology != HUMAN_TECHNOLOGY => Err(format!(
                "bonafide record '{}' must use technology '{HUMAN_TECHNOLOGY}', got '{}'",
                self.path, self.technology
            )),
            Label::Spoof if self.technology == HUMAN_TECHNOLOGY => Err(format!(
                "spoof record '{}' cannot use technology '{HUMAN_TECHNOLOGY}'",
                self.path
            )),
            _ => Ok(()),
        }
    }
}

/// Parse a manifest document. Records come back in file order; duplicate
/// paths and label/technology mismatches are rejected.
pub fn parse_manifest(text: &str) -> Result<Vec<SampleRecord>> {
    let mut records = Vec::new();
    let mut seen_paths: HashSet<&str> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::ManifestParse {
                line: line_no,
                msg: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        let (path, label_tok, technology, split_tok) =
            (fields[0], fields[1], fields[2], fields[3]);
        if path.is_empty() {
            return Err(Error::ManifestParse {
                line: line_no,
                msg: "empty path".into(),
            });
        }
        let label = Label::parse(label_tok).ok_or_else(|| Error::ManifestParse {
            line: line_no,
            msg: format!("unknown label '{label_tok}'"),
        })?;
        let split = Split::parse(split_tok).ok_or_else(|| Error::ManifestParse {
            line: line_no,
            msg: format!("unknown split '{split_tok}'"),
        })?;
        let record = SampleRecord {
            path: path.to_string(),
            label,
            technology: technology.to_string(),
            split,
        };
        record
            .validate()
            .map_err(|msg| Error::ManifestValidation { line: line_no, msg })?;
        if !seen_paths.insert(path) {
            return Err(Error::ManifestValidation {
                line: line_no,
                msg: format!("duplicate path '{path}'"),
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// Serialize records back to manifest text with LF line endings.
pub fn serialize_manifest(records: &[SampleRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", r.path, r.label, r.technology, r.split));
    }
    out
}

pub fn read_manifest(path: &Path) -> Result<Vec<SampleRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text)
}

pub fn write_manifest(path: &Path, records: &[SampleRecord]) -> Result<()> {
    std::fs::write(path, serialize_manifest(records)).map_err(|e| Error::io(path, e))
}

/// Carve a validation set out of training records, stratified by label.
/// Assignment is a pure function of each record's path and the split seed, so
/// it is stable across runs and platforms. Within each label, records are
/// ranked by a seeded hash and the top `fraction` (at least one, never all)
/// move to validation.
pub fn split_train_validation(
    records: &[SampleRecord],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<SampleRecord>, Vec<SampleRecord>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Parameter(format!(
            "validation fraction {fraction} outside [0, 1)"
        )));
    }
    let mut train = Vec::new();
    let mut validation = Vec::new();
    for label in [Label::Bonafide, Label::Spoof] {
        let mut group: Vec<&SampleRecord> =
            records.iter().filter(|r| r.label == label).collect();
        if group.is_empty() {
            continue;
        }
        group.sort_by_key(|r| {
            (derive_seed(seed, &["split", &r.path]), r.path.clone())
        });
        let mut take = (group.len() as f64 * fraction).round() as usize;
        if fraction > 0.0 {
            take = take.clamp(1, group.len().saturating_sub(1).max(1));
        }
        if group.len() == 1 {
            take = 0; // never empty the training side
        }
        for (i, r) in group.into_iter().enumerate() {
            let mut rec = r.clone();
            if i < take {
                rec.split = Split::Validation;
                validation.push(rec);
            } else {
                rec.split = Split::Train;
                train.push(rec);
            }
        }
    }
    Ok((train, validation))
}
