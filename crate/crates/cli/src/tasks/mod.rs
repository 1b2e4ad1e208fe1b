pub mod grid;
pub mod profile;
pub mod solve;
pub mod sweep;
pub mod validate;

use anyhow::{anyhow, Result};
use diskgap_core::bipolar::BipolarFrame;

use crate::config::RunConfig;

/// Frame for the single-configuration tasks.
pub fn single_frame(cfg: &RunConfig) -> Result<BipolarFrame> {
    let (r_i, r_e) = cfg.geometry_values()?;
    let eps = cfg.eps()?;
    BipolarFrame::derive(r_i, r_e, eps).map_err(|e| anyhow!("invalid geometry: {e}"))
}
