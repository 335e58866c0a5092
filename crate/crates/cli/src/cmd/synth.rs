use std::path::Path;
use std::process::ExitCode;

use regeval::synth::{make_cohort, CohortSpec, SynthCase};
use regeval::volio::{write_landmarks, write_nifti, NiftiObject};
use regeval::Dims;
use serde::Serialize;

use crate::args::{Cli, SynthArgs};
use crate::io::{out_dir, write_field, write_json, write_text};
use crate::manifest::ZERO_FIELD;
use crate::{CliError, CliResult};

#[derive(Debug, Serialize)]
struct CaseFiles {
    fixed_image: String,
    moving_image: String,
    fixed_seg: String,
    moving_seg: String,
    landmarks_fixed: String,
    landmarks_moving: String,
    truth_field: String,
}

#[derive(Debug, Serialize)]
struct CaseEntry {
    case_id: String,
    phantom_seed: u64,
    velocity_seed: u64,
    diffeomorphic: bool,
    files: CaseFiles,
}

#[derive(Debug, Serialize)]
struct CohortManifest {
    spec: CohortSpec,
    units: String,
    cases: Vec<CaseEntry>,
}

fn files(id: &str) -> CaseFiles {
    CaseFiles {
        fixed_image: format!("images/{id}_fixed.nii.gz"),
        moving_image: format!("images/{id}_moving.nii.gz"),
        fixed_seg: format!("labels/{id}_fixed.nii.gz"),
        moving_seg: format!("labels/{id}_moving.nii.gz"),
        landmarks_fixed: format!("landmarks/{id}_fixed.csv"),
        landmarks_moving: format!("landmarks/{id}_moving.csv"),
        truth_field: format!("fields/{id}_truth.nii.gz"),
    }
}

fn write_case(root: &Path, case: &SynthCase, cli: &Cli) -> regeval::Result<CaseEntry> {
    let f = files(&case.case_id);
    let p = &case.pair;
    write_nifti(&NiftiObject::Scalar(p.fixed.image.clone()), root.join(&f.fixed_image), true)?;
    write_nifti(&NiftiObject::Scalar(p.moving.image.clone()), root.join(&f.moving_image), true)?;
    write_nifti(&NiftiObject::Label(p.fixed.labels.clone()), root.join(&f.fixed_seg), true)?;
    write_nifti(&NiftiObject::Label(p.moving.labels.clone()), root.join(&f.moving_seg), true)?;
    write_landmarks(&p.fixed.landmarks, root.join(&f.landmarks_fixed))?;
    write_landmarks(&p.moving.landmarks, root.join(&f.landmarks_moving))?;
    write_field(case.pair.truth.clone(), &root.join(&f.truth_field), cli.units)?;
    Ok(CaseEntry {
        case_id: case.case_id.clone(),
        phantom_seed: case.phantom_seed,
        velocity_seed: case.velocity_seed,
        diffeomorphic: true,
        files: f,
    })
}

/// Evaluation manifest listing the `truth` and `zero` methods for each case.
fn manifest_csv(cases: &[CaseEntry]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Failed(e.to_string());
    w.write_record([
        "method", "pair_id", "fixed_seg", "moving_seg", "field", "landmarks_fixed", "landmarks_moving", "mask",
    ])
    .map_err(io)?;
    for (method, zero) in [("truth", false), ("zero", true)] {
        for c in cases {
            let f = &c.files;
            let field = if zero { ZERO_FIELD } else { f.truth_field.as_str() };
            w.write_record([
                method,
                &c.case_id,
                &f.fixed_seg,
                &f.moving_seg,
                field,
                &f.landmarks_fixed,
                &f.landmarks_moving,
                "",
            ])
            .map_err(io)?;
        }
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 csv"))
}

pub fn cmd_synth(args: &SynthArgs, cli: &Cli) -> CliResult<ExitCode> {
    let mut spec = CohortSpec::new(args.cases, Dims::cube(args.size), cli.seed);
    spec.label_count = args.label_count;
    spec.amplitude = args.amplitude;
    spec.smoothness = args.smoothness;
    spec.noise_sigma = args.noise;
    let root = out_dir(&cli.out)?;
    for d in ["images", "labels", "landmarks", "fields"] {
        std::fs::create_dir_all(root.join(d)).map_err(|e| CliError::Failed(format!("{d}: {e}")))?;
    }
    let cases = make_cohort(&spec)?;
    let entries = regeval::par::map_slice(&cases, |c| write_case(&root, c, cli))
        .into_iter()
        .collect::<regeval::Result<Vec<_>>>()?;
    write_text(&root.join("manifest.csv"), &manifest_csv(&entries)?)?;
    write_json(
        &root.join("manifest.json"),
        &CohortManifest {
            spec,
            units: format!("{:?}", cli.units).to_lowercase(),
            cases: entries,
        },
    )?;
    eprintln!("wrote {} cases to {}", args.cases, root.display());
    Ok(ExitCode::SUCCESS)
}
