use crate::error::{Error, Result};
use crate::filter::{box_count, box_sum};
use crate::par;
use crate::volume::{Dims, ScalarVolume};

pub const DEFAULT_LNCC_WINDOW: usize = 9;
pub const LNCC_EPS: f64 = 1e-5;

struct Windows {
    count: Vec<f64>,
    mean_a: Vec<f64>,
    mean_b: Vec<f64>,
    cross: Vec<f64>,
    var_a: Vec<f64>,
    var_b: Vec<f64>,
}

fn windows(a: &[f64], b: &[f64], dims: Dims, window: usize) -> Windows {
    let r = window / 2;
    let count = box_count(dims, r);
    let sa = box_sum(a, dims, r);
    let sb = box_sum(b, dims, r);
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        let v: Vec<f64> = a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect();
        box_sum(&v, dims, r)
    };
    let saa = prod(&|x, _| x * x);
    let sbb = prod(&|_, y| y * y);
    let sab = prod(&|x, y| x * y);
    let n = a.len();
    let mut w = Windows {
        mean_a: vec![0.0; n],
        mean_b: vec![0.0; n],
        cross: vec![0.0; n],
        var_a: vec![0.0; n],
        var_b: vec![0.0; n],
        count,
    };
    for i in 0..n {
        let c = w.count[i];
        w.mean_a[i] = sa[i] / c;
        w.mean_b[i] = sb[i] / c;
        w.cross[i] = sab[i] - sa[i] * sb[i] / c;
        w.var_a[i] = (saa[i] - sa[i] * sa[i] / c).max(0.0);
        w.var_b[i] = (sbb[i] - sb[i] * sb[i] / c).max(0.0);
    }
    w
}

fn mean_of(values: &[f64], dims: Dims) -> f64 {
    let slice = dims.slice_len();
    let parts = par::map_range(dims.nz(), |z| values[z * slice..(z + 1) * slice].iter().sum());
    par::ordered_sum(&parts) / values.len() as f64
}

pub(crate) fn lncc_raw(a: &[f64], b: &[f64], dims: Dims, window: usize) -> f64 {
    let w = windows(a, b, dims, window);
    let cc: Vec<f64> = (0..a.len())
        .map(|i| w.cross[i] / ((w.var_a[i] + LNCC_EPS) * (w.var_b[i] + LNCC_EPS)).sqrt())
        .collect();
    mean_of(&cc, dims)
}

/// Mean local NCC and its gradient with respect to every voxel of `b`.
pub(crate) fn lncc_with_gradient(a: &[f64], b: &[f64], dims: Dims, window: usize) -> (f64, Vec<f64>) {
    let w = windows(a, b, dims, window);
    let r = window / 2;
    let n = a.len();
    let mut cc = vec![0.0; n];
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for i in 0..n {
        let vb = w.var_b[i] + LNCC_EPS;
        alpha[i] = 1.0 / ((w.var_a[i] + LNCC_EPS) * vb).sqrt();
        cc[i] = w.cross[i] * alpha[i];
        beta[i] = cc[i] / vb;
    }
    let value = mean_of(&cc, dims);
    let alpha_mean: Vec<f64> = (0..n).map(|i| alpha[i] * w.mean_a[i]).collect();
    let beta_mean: Vec<f64> = (0..n).map(|i| beta[i] * w.mean_b[i]).collect();
    let s_alpha = box_sum(&alpha, dims, r);
    let s_alpha_mean = box_sum(&alpha_mean, dims, r);
    let s_beta = box_sum(&beta, dims, r);
    let s_beta_mean = box_sum(&beta_mean, dims, r);
    let inv = 1.0 / n as f64;
    let grad = (0..n)
        .map(|i| inv * (a[i] * s_alpha[i] - s_alpha_mean[i] - b[i] * s_beta[i] + s_beta_mean[i]))
        .collect();
    (value, grad)
}

/// Local normalized cross-correlation averaged over voxels, with cubic
/// windows truncated at the grid boundary.
pub fn lncc(a: &ScalarVolume, b: &ScalarVolume, window: usize) -> Result<f64> {
    a.header.same_grid(&b.header)?;
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::BadParams(format!("lncc window must be odd and positive, got {window}")));
    }
    Ok(lncc_raw(&a.data, &b.data, a.dims(), window))
}
