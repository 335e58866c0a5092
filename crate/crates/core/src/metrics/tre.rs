use crate::error::{Error, Result};
use crate::volio::{Landmark, LandmarkSet};
use crate::volume::DisplacementField;
use crate::warp::sample_trilinear;

fn check_inside(lm: &Landmark, phi: &DisplacementField) -> Result<()> {
    if phi.dims().contains_point(lm.p) {
        Ok(())
    } else {
        Err(Error::OutOfBoundsLandmark {
            name: lm.name.clone(),
            p: lm.p,
        })
    }
}

/// Distance in mm between each fixed landmark mapped through `phi` and its
/// moving counterpart.
pub fn tre(
    lm_fixed: &LandmarkSet,
    lm_moving: &LandmarkSet,
    phi: &DisplacementField,
    spacing: [f64; 3],
) -> Result<Vec<f64>> {
    lm_fixed.check_paired(lm_moving)?;
    lm_fixed
        .iter()
        .zip(lm_moving)
        .map(|(f, m)| {
            check_inside(f, phi)?;
            check_inside(m, phi)?;
            let u = sample_trilinear(phi, f.p);
            let d2: f64 = (0..3)
                .map(|a| {
                    let t = (f.p[a] + u[a] - m.p[a]) * spacing[a];
                    t * t
                })
                .sum();
            Ok(d2.sqrt())
        })
        .collect()
}
