use serde::{Deserialize, Serialize};

/// Neumaier-compensated mean; `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    Some((sum + comp) / values.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: f64,
    pub n: usize,
}

pub fn mean_std(values: &[f64]) -> Option<MeanStd> {
    let m = mean(values)?;
    let n = values.len();
    let std = if n < 2 {
        0.0
    } else {
        let dev: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
        (mean(&dev).unwrap() * n as f64 / (n - 1) as f64).sqrt()
    };
    Some(MeanStd { mean: m, std, n })
}

/// Cohort summary for one method: mean and spread of each per-case metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortStats {
    pub cases: usize,
    pub dsc: Option<MeanStd>,
    pub dsc30: Option<MeanStd>,
    pub hd95: Option<MeanStd>,
    pub tre: Option<MeanStd>,
    pub tre30: Option<MeanStd>,
    pub ndv: Option<MeanStd>,
}

impl CohortStats {
    /// Builds the summary from per-case reports. DSC30 and TRE30 are computed
    /// within each case and then averaged over cases.
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a crate::metrics::PairReport>) -> Self {
        let mut dsc = Vec::new();
        let mut dsc30 = Vec::new();
        let mut hd95 = Vec::new();
        let mut tre = Vec::new();
        let mut tre30 = Vec::new();
        let mut ndv = Vec::new();
        let mut cases = 0;
        for r in reports {
            cases += 1;
            if let Some(v) = r.dsc_mean {
                dsc.push(v);
            }
            let per: Vec<f64> = r.dsc_per_label.values().filter_map(|v| *v).collect();
            if let Ok(v) = super::dsc30(&per) {
                dsc30.push(v);
            }
            if let Some(v) = r.hd95_mean {
                hd95.push(v);
            }
            if let Some(v) = r.tre_mean {
                tre.push(v);
            }
            if let Ok(v) = super::tre30(&r.tre_per_landmark) {
                tre30.push(v);
            }
            ndv.push(r.ndv);
        }
        CohortStats {
            cases,
            dsc: mean_std(&dsc),
            dsc30: mean_std(&dsc30),
            hd95: mean_std(&hd95),
            tre: mean_std(&tre),
            tre30: mean_std(&tre30),
            ndv: mean_std(&ndv),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_mean_is_exact_on_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(mean(&v), Some(0.5));
    }

    #[test]
    fn sample_std() {
        let s = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.std - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_std(&[3.0]).unwrap().std, 0.0);
    }
}
