//! `field-grid`: |∇w| on a regular Cartesian grid over the un-translated
//! domain, masked (NaN) outside.

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use diskgap_core::bipolar::CartesianPoint;
use diskgap_core::boundary::harmonic_extension;
use diskgap_core::spectral::solve_modes;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::csvout::CsvWriter;

pub fn run(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let frame = super::single_frame(cfg)?;
    let k = cfg.k()?;
    let data = cfg.boundary_data()?;
    let (_, r_e) = cfg.geometry_values()?;
    let field = harmonic_extension(&data, r_e).map_err(|e| anyhow!("{e}"))?;
    let n = cfg
        .grid
        .as_ref()
        .ok_or_else(|| anyhow!("config needs a [grid] section"))?
        .resolution;
    if n < 2 {
        bail!("grid.resolution must be at least 2");
    }

    let sol = solve_modes(&frame, k, &field).map_err(|e| anyhow!("solver setup failed: {e}"))?;

    // Un-translated domain: disk of radius r_e about (r_e, 0). The solution
    // lives in the shifted frame, so grid values are |∇w(y + (x_0, 0))|,
    // i.e. the field presented at x − (x_0, 0).
    let step = 2.0 * r_e / (n - 1) as f64;
    let mask_r = r_e * (1.0 - 1e-9);

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let y2 = -r_e + step * i as f64;
            let sol = &sol;
            let frame = &frame;
            (0..n).map(move |j| {
                let y1 = step * j as f64;
                let inside = ((y1 - r_e) * (y1 - r_e) + y2 * y2).sqrt() <= mask_r;
                let value = if inside {
                    let x = CartesianPoint::new(y1 + frame.x_0(), y2);
                    frame
                        .to_bipolar(x)
                        .and_then(|p| sol.eval(p))
                        .map(|s| s.grad_norm())
                        .unwrap_or(f64::NAN)
                } else {
                    f64::NAN
                };
                vec![y1, y2, value]
            })
        })
        .collect();

    let mut w = CsvWriter::new(&format!(
        "diskgap {} task=field-grid",
        env!("CARGO_PKG_VERSION")
    ));
    w.comment_block("config", &cfg.describe());
    w.frame_comment(&frame, Some(k));
    w.comment("grid coordinates are un-translated; values are |grad w| at x - (x_0, 0); NaN outside the domain");
    w.header(&["x1", "x2", "grad_norm"]);
    for r in &rows {
        w.row(r);
    }

    if let Some(path) = out {
        w.write_to(path)?;
    } else {
        print!("{}", w.contents());
    }
    Ok(true)
}
