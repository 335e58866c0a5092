use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::DEFAULT_LNCC_WINDOW;
use crate::warp::DEFAULT_SQUARINGS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// Optimize the displacement directly.
    Displacement,
    /// Optimize a stationary velocity and map it through scaling and
    /// squaring with this many squarings.
    Svf { squarings: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegConfig {
    /// Pyramid depth; level `levels - 1` is the input resolution.
    pub levels: usize,
    /// Iterations per level, coarsest first.
    pub iters_per_level: Vec<usize>,
    /// Largest per-iteration update, voxels of the current level.
    pub step_size: f64,
    pub lambda_diffusion: f64,
    pub lncc_window: usize,
    pub parameterization: Parameterization,
    /// Gaussian sigma applied to each update, voxels; 0 disables.
    pub update_smoothing_sigma: f64,
    /// Step halvings tried before a level stops early.
    pub max_halvings: u32,
    pub seed: u64,
}

impl Default for RegConfig {
    fn default() -> Self {
        RegConfig {
            levels: 3,
            iters_per_level: vec![100, 100, 50],
            step_size: 0.5,
            lambda_diffusion: 1.0,
            lncc_window: DEFAULT_LNCC_WINDOW,
            parameterization: Parameterization::Displacement,
            update_smoothing_sigma: 1.0,
            max_halvings: 8,
            seed: 0,
        }
    }
}

impl RegConfig {
    pub fn svf() -> Self {
        RegConfig {
            parameterization: Parameterization::Svf {
                squarings: DEFAULT_SQUARINGS,
            },
            ..RegConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.levels == 0 {
            return bad("levels must be >= 1".into());
        }
        if self.iters_per_level.len() != self.levels {
            return bad(format!(
                "{} iteration counts for {} levels",
                self.iters_per_level.len(),
                self.levels
            ));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return bad(format!("step_size must be > 0, got {}", self.step_size));
        }
        if !(self.lambda_diffusion >= 0.0 && self.lambda_diffusion.is_finite()) {
            return bad(format!("lambda_diffusion must be >= 0, got {}", self.lambda_diffusion));
        }
        if self.lncc_window == 0 || self.lncc_window.is_multiple_of(2) {
            return bad(format!("lncc_window must be odd, got {}", self.lncc_window));
        }
        if !(self.update_smoothing_sigma >= 0.0 && self.update_smoothing_sigma.is_finite()) {
            return bad(format!(
                "update_smoothing_sigma must be >= 0, got {}",
                self.update_smoothing_sigma
            ));
        }
        Ok(())
    }
}
