//! `boundary-profile`: θ-trace of the gradient on `∂D`.
//!
//! Emits five columns per θ: the exact `e_ξ` and `e_θ` components of the
//! requested one-sided limit (spectral solver, cross-checked against the
//! reflection solver), plus two asymptotic predictions for the requested
//! component:
//!
//! * Dirichlet, `xi`: the two kernel-argument variants;
//! * Neumann, `theta`/`xi`: the single-kernel formula for the requested side and
//!   the corresponding image-charge potential gradient;
//! * Dirichlet, `theta`: the two-kernel singular part (bounded) and the
//!   image potential.

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use diskgap_core::asymptotics::{
    grad_singular_q, grad_u_asymptotic_in, grad_v_asymptotic, AsymVariant, ImageChargeSystem,
    ImagePotentialKind,
};
use diskgap_core::bipolar::BipolarPoint;
use diskgap_core::boundary::{harmonic_extension, BoundaryKind};
use diskgap_core::reflection::{interface_trace_reflection, ReflectionSeriesConfig};
use diskgap_core::spectral::solve_modes;
use diskgap_core::{GradientSample, Side};
use rayon::prelude::*;

use crate::config::{ProfileSection, RunConfig};
use crate::csvout::CsvWriter;

#[derive(Clone, Copy, PartialEq)]
enum Component {
    Xi,
    Theta,
}

pub fn run(cfg: &RunConfig, out: Option<&Path>, tol_override: Option<f64>) -> Result<bool> {
    let frame = super::single_frame(cfg)?;
    let k = cfg.k()?;
    let data = cfg.boundary_data()?;
    let (_, r_e) = cfg.geometry_values()?;
    let field = harmonic_extension(&data, r_e).map_err(|e| anyhow!("{e}"))?;
    let default_profile = ProfileSection::default();
    let profile = cfg.profile.as_ref().unwrap_or(&default_profile);

    let side = match profile.side.to_ascii_lowercase().as_str() {
        "inner" => Side::Inner,
        "outer" => Side::Outer,
        other => bail!("profile.side must be inner or outer, got {other:?}"),
    };
    let component = match profile.component.to_ascii_lowercase().as_str() {
        "xi" => Component::Xi,
        "theta" => Component::Theta,
        other => bail!("profile.component must be xi or theta, got {other:?}"),
    };
    let n_theta = profile.n_theta;
    if n_theta < 2 {
        bail!("profile.n_theta must be at least 2");
    }

    let agreement = tol_override.unwrap_or(cfg.tolerances.agreement);
    let series_cfg = ReflectionSeriesConfig {
        tol: cfg.tolerances.series_tol,
        ..Default::default()
    };

    let sol = solve_modes(&frame, k, &field).map_err(|e| anyhow!("solver setup failed: {e}"))?;
    let (c1, c2) = field.c1_c2();
    let charges = ImageChargeSystem::new(&frame, k).ok();

    let thetas: Vec<f64> = (0..n_theta)
        .map(|j| {
            -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (j + 1) as f64 / n_theta as f64
        })
        .collect();

    struct Row {
        theta: f64,
        exact: GradientSample,
        refl: GradientSample,
        asym_primary: f64,
        asym_alternative: f64,
    }

    let rows: Result<Vec<Row>> = thetas
        .par_iter()
        .map(|&theta| {
            let exact = sol
                .interface_trace(side, theta)
                .map_err(|e| anyhow!("trace failed at theta={theta}: {e}"))?;
            let refl = interface_trace_reflection(&frame, k, &field, theta, side, &series_cfg)
                .map_err(|e| anyhow!("reflection trace failed at theta={theta}: {e}"))?;
            let p = BipolarPoint::new(frame.xi_i(), theta);
            let region = side.region();

            let (asym_primary, asym_alternative) = match (data.kind(), component) {
                (BoundaryKind::Dirichlet, Component::Xi) => {
                    let (a, _) = grad_v_asymptotic(&frame, k, c1, c2, p, AsymVariant::Primary)
                        .map_err(|e| anyhow!("{e}"))?;
                    let (b, _) = grad_v_asymptotic(&frame, k, c1, c2, p, AsymVariant::Alternative)
                        .map_err(|e| anyhow!("{e}"))?;
                    (a, b)
                }
                (BoundaryKind::Neumann, comp) => {
                    let (gxi, gth) = grad_u_asymptotic_in(&frame, k, c1, c2, p, region)
                        .map_err(|e| anyhow!("{e}"))?;
                    let formula = if comp == Component::Xi { gxi } else { gth };
                    let image = image_component(
                        &charges,
                        &frame,
                        ImagePotentialKind::UStar,
                        theta,
                        c1,
                        c2,
                        comp,
                    )?;
                    (formula, image)
                }
                (BoundaryKind::Dirichlet, Component::Theta) => {
                    let (_, gth) =
                        grad_singular_q(&frame, k, c1, c2, p, region, BoundaryKind::Dirichlet)
                            .map_err(|e| anyhow!("{e}"))?;
                    let image = image_component(
                        &charges,
                        &frame,
                        ImagePotentialKind::VStar,
                        theta,
                        c1,
                        c2,
                        component,
                    )?;
                    (gth, image)
                }
            };
            Ok(Row {
                theta,
                exact,
                refl,
                asym_primary,
                asym_alternative,
            })
        })
        .collect();
    let rows = rows?;

    // The two exact representations must agree on the trace.
    let scale = rows
        .iter()
        .map(|r| r.exact.grad_norm())
        .fold(1.0f64, f64::max);
    let mut all_ok = true;
    for r in &rows {
        let diff = (r.exact.grad - r.refl.grad).norm();
        if diff > agreement * scale {
            eprintln!(
                "exact solvers disagree at theta={}: |Δgrad| = {diff:.3e} > {agreement:.1e} × {scale:.3e}",
                r.theta
            );
            all_ok = false;
        }
    }

    let mut w = CsvWriter::new(&format!(
        "diskgap {} task=boundary-profile",
        env!("CARGO_PKG_VERSION")
    ));
    w.comment_block("config", &cfg.describe());
    w.frame_comment(&frame, Some(k));
    w.comment(&format!(
        "side={} component={} C1={} C2={}",
        profile.side,
        profile.component,
        c1 + 0.0,
        c2 + 0.0
    ));
    w.comment("exact columns from the spectral solver; reflection solver agreement checked");
    w.header(&[
        "theta",
        "exact_xi",
        "exact_theta",
        "asym_primary",
        "asym_alternative",
    ]);
    for r in &rows {
        w.row(&[
            r.theta,
            r.exact.grad_xi,
            r.exact.grad_theta,
            r.asym_primary,
            r.asym_alternative,
        ]);
    }

    if let Some(path) = out {
        w.write_to(path)?;
    } else {
        print!("{}", w.contents());
    }
    Ok(all_ok)
}

/// Component of the image-potential gradient on the interface trace.
fn image_component(
    charges: &Option<ImageChargeSystem>,
    frame: &diskgap_core::bipolar::BipolarFrame,
    kind: ImagePotentialKind,
    theta: f64,
    c1: f64,
    c2: f64,
    component: Component,
) -> Result<f64> {
    let Some(sys) = charges else {
        // k = 1: no image system, no singular part.
        return Ok(0.0);
    };
    let p = BipolarPoint::new(frame.xi_i(), theta);
    let x = frame.to_cartesian(p).map_err(|e| anyhow!("{e}"))?;
    let (_, g) = sys.potential(kind, x, c1, c2).map_err(|e| anyhow!("{e}"))?;
    let (e_xi, e_th) = frame.basis_vectors(p).map_err(|e| anyhow!("{e}"))?;
    Ok(match component {
        Component::Xi => g.dot(e_xi),
        Component::Theta => g.dot(e_th),
    })
}
