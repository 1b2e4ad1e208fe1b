//! `solve`: evaluate the full transmission solution at configured points
//! with both exact solvers and cross-check them.

use std::path::Path;

use anyhow::{anyhow, Result};
use diskgap_core::bipolar::CartesianPoint;
use diskgap_core::boundary::{harmonic_extension, BoundaryKind};
use diskgap_core::reflection::{solve_u_reflection, solve_v_reflection, ReflectionSeriesConfig};
use diskgap_core::spectral::solve_modes;

use crate::config::RunConfig;
use crate::csvout::CsvWriter;

pub fn run(cfg: &RunConfig, out: Option<&Path>, tol_override: Option<f64>) -> Result<bool> {
    let frame = super::single_frame(cfg)?;
    let k = cfg.k()?;
    let data = cfg.boundary_data()?;
    let (_, r_e) = cfg.geometry_values()?;
    let field = harmonic_extension(&data, r_e).map_err(|e| anyhow!("{e}"))?;
    let points = &cfg
        .solve
        .as_ref()
        .ok_or_else(|| anyhow!("config needs a [solve] section with points"))?
        .points;
    if points.is_empty() {
        return Err(anyhow!("solve.points must list at least one point"));
    }

    let agreement = tol_override.unwrap_or(cfg.tolerances.agreement);
    let series_cfg = ReflectionSeriesConfig {
        tol: cfg.tolerances.series_tol,
        ..Default::default()
    };

    let sol = solve_modes(&frame, k, &field).map_err(|e| anyhow!("solver setup failed: {e}"))?;

    let mut w = CsvWriter::new(&format!("diskgap {} task=solve", env!("CARGO_PKG_VERSION")));
    w.comment_block("config", &cfg.describe());
    w.frame_comment(&frame, Some(k));
    w.comment("points are in the un-translated frame; the solver frame is shifted by x_0");
    w.header(&[
        "x1",
        "x2",
        "xi",
        "theta",
        "value",
        "grad_x1",
        "grad_x2",
        "grad_xi",
        "grad_theta",
    ]);

    let mut all_ok = true;
    for (idx, point) in points.iter().enumerate() {
        let y1 = point[0].value()?;
        let y2 = point[1].value()?;
        // Shift into the bipolar-adapted frame.
        let x = CartesianPoint::new(y1 + frame.x_0(), y2);
        let p = frame
            .to_bipolar(x)
            .map_err(|e| anyhow!("point {idx} is unusable: {e}"))?;
        let spectral = sol
            .eval(p)
            .map_err(|e| anyhow!("point {idx} ({y1}, {y2}): {e}"))?;
        let refl = match data.kind() {
            BoundaryKind::Neumann => solve_u_reflection(&frame, k, &field, p, &series_cfg),
            BoundaryKind::Dirichlet => solve_v_reflection(&frame, k, &field, p, &series_cfg),
        }
        .map_err(|e| anyhow!("point {idx} ({y1}, {y2}): {e}"))?;
        let scale = spectral.grad_norm().max(1.0);
        let diff = (spectral.grad - refl.grad).norm();
        if diff > agreement * scale {
            eprintln!(
                "solver disagreement at point {idx} ({y1}, {y2}): |Δgrad| = {diff:.3e} > {agreement:.1e} × {scale:.3e}"
            );
            all_ok = false;
        }
        w.row(&[
            y1,
            y2,
            p.xi(),
            p.theta(),
            spectral.value,
            spectral.grad.x,
            spectral.grad.y,
            spectral.grad_xi,
            spectral.grad_theta,
        ]);
    }

    if let Some(path) = out {
        w.write_to(path)?;
    } else {
        print!("{}", w.contents());
    }
    Ok(all_ok)
}
