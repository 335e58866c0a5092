//! File formats: NIfTI-1 volumes and fields, landmark CSV.

mod landmarks;
mod nifti;

pub use landmarks::{parse_landmarks, read_landmarks, write_landmarks, Landmark, LandmarkSet};
pub use nifti::{
    decode_nifti, encode_nifti, read_nifti, wants_gzip, write_nifti, NiftiObject, HEADER_SIZE,
    MAGIC_NIP1,
};
