use std::fs;
use std::path::{Path, PathBuf};

use regeval::volio::{read_landmarks, read_nifti, wants_gzip, write_nifti, LandmarkSet, NiftiObject};
use regeval::{DisplacementField, LabelVolume, ScalarVolume};
use serde::Serialize;

use crate::args::Units;
use crate::{CliError, CliResult};

pub fn read_labels(path: &Path) -> regeval::Result<LabelVolume> {
    read_nifti(path)?.into_labels()
}

pub fn read_scalar(path: &Path) -> regeval::Result<ScalarVolume> {
    read_nifti(path)?.into_scalar()
}

pub fn read_field(path: &Path, units: Units) -> regeval::Result<DisplacementField> {
    let f = read_nifti(path)?.into_field()?;
    Ok(match units {
        Units::Voxel => f,
        Units::Mm => f.mm_to_voxels(),
    })
}

pub fn write_field(field: DisplacementField, path: &Path, units: Units) -> regeval::Result<()> {
    let f = match units {
        Units::Voxel => field,
        Units::Mm => field.voxels_to_mm(),
    };
    write_nifti(&NiftiObject::Field(f), path, wants_gzip(path))
}

pub fn read_lms(path: &Path) -> regeval::Result<LandmarkSet> {
    read_landmarks(path)
}

pub fn out_dir(out: &Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::Failed(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_text(path, &to_json(value))
}
