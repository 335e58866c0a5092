//! Evaluation manifests: CSV with header
//! `method,pair_id,fixed_seg,moving_seg,field,landmarks_fixed,landmarks_moving,mask`.
//! Relative paths resolve against the manifest's directory; the field value
//! `ZERO` selects the zero displacement.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{CliError, CliResult};

pub const ZERO_FIELD: &str = "ZERO";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldSource {
    Zero,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Job {
    pub method: String,
    pub pair_id: String,
    pub fixed_seg: PathBuf,
    pub moving_seg: PathBuf,
    pub field: FieldSource,
    pub landmarks: Option<(PathBuf, PathBuf)>,
    pub mask: Option<PathBuf>,
}

impl Job {
    /// File name of this job's report.
    pub fn report_name(&self) -> String {
        format!("{}__{}.json", self.method, self.pair_id)
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    method: String,
    pair_id: String,
    fixed_seg: String,
    moving_seg: String,
    field: String,
    #[serde(default)]
    landmarks_fixed: String,
    #[serde(default)]
    landmarks_moving: String,
    #[serde(default)]
    mask: String,
}

fn safe_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) && !s.contains("__")
}

pub fn parse_manifest(text: &str, base: &Path) -> CliResult<Vec<Job>> {
    let resolve = |s: &str| -> PathBuf {
        let p = Path::new(s);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    let opt = |s: &str| (!s.trim().is_empty()).then(|| resolve(s.trim()));
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut jobs = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| CliError::Usage(format!("manifest line {line}: {e}")))?;
        for id in [&row.method, &row.pair_id] {
            if !safe_id(id) {
                return Err(CliError::Usage(format!(
                    "manifest line {line}: id {id:?} must be non-empty [A-Za-z0-9._-] without '__'"
                )));
            }
        }
        if !seen.insert((row.method.clone(), row.pair_id.clone())) {
            return Err(CliError::Usage(format!(
                "manifest line {line}: duplicate pair {} for method {}",
                row.pair_id, row.method
            )));
        }
        let landmarks = match (opt(&row.landmarks_fixed), opt(&row.landmarks_moving)) {
            (Some(f), Some(m)) => Some((f, m)),
            (None, None) => None,
            _ => {
                return Err(CliError::Usage(format!(
                    "manifest line {line}: landmarks need both fixed and moving files"
                )))
            }
        };
        jobs.push(Job {
            field: if row.field == ZERO_FIELD {
                FieldSource::Zero
            } else {
                FieldSource::File(resolve(&row.field))
            },
            fixed_seg: resolve(&row.fixed_seg),
            moving_seg: resolve(&row.moving_seg),
            landmarks,
            mask: opt(&row.mask),
            method: row.method,
            pair_id: row.pair_id,
        });
    }
    Ok(jobs)
}

pub fn read_manifest(path: &Path) -> CliResult<Vec<Job>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_manifest(&text, path.parent().unwrap_or(Path::new(".")))
}
