use crate::error::{Error, Result};

/// Linear interpolation between closest ranks:
/// `h = (n-1) q / 100`, `v[floor h] + frac(h) (v[floor h + 1] - v[floor h])`.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::BadQuantile(q));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::DegenerateInput("NaN in percentile input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, q))
}

pub(crate) fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * q / 100.0;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// 30th percentile of one case's per-structure Dice scores.
pub fn dsc30(per_structure: &[f64]) -> Result<f64> {
    percentile(per_structure, 30.0)
}

/// Boundary of the worst 30% of landmark errors, i.e. the 70th percentile.
pub fn tre30(per_landmark: &[f64]) -> Result<f64> {
    percentile(per_landmark, 70.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_interpolation() {
        assert_eq!(percentile(&[1.0, 2.0, 3.0, 4.0, 5.0], 50.0).unwrap(), 3.0);
        assert_eq!(percentile(&[0.0, 10.0], 95.0).unwrap(), 9.5);
        assert_eq!(percentile(&[4.0], 37.0).unwrap(), 4.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(percentile(&[], 50.0), Err(Error::EmptyInput)));
        assert!(matches!(percentile(&[1.0], 101.0), Err(Error::BadQuantile(_))));
        assert!(matches!(percentile(&[1.0], -0.5), Err(Error::BadQuantile(_))));
    }

    #[test]
    fn robustness_percentiles() {
        assert!((dsc30(&[0.8; 7]).unwrap() - 0.8).abs() < 1e-15);
        let tre: Vec<f64> = (1..=10).map(f64::from).collect();
        assert!((tre30(&tre).unwrap() - 7.3).abs() < 1e-12);
    }
}
