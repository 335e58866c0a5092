//! Per-pair evaluation metrics.

mod dsc;
mod edt;
mod hd95;
mod lncc;
mod ndv;
mod report;
mod tre;

pub use dsc::{dsc, DscResult};
pub use edt::squared_edt;
pub use hd95::{boundary_voxels, hd95, hd95_labels, Hd95};
pub use lncc::{lncc, DEFAULT_LNCC_WINDOW, LNCC_EPS};
pub(crate) use lncc::lncc_with_gradient;
pub use ndv::{ndv, KUHN_TETS};
pub use report::{evaluate_pair, PairInputs, PairReport};
pub use tre::tre;
