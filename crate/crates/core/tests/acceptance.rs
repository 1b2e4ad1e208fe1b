//! Acceptance suite: one test per criterion, each printing a pass line
//! with its measured value. Tolerances are pinned in the assertions.

use std::sync::OnceLock;

use diskgap_core::asymptotics::{
    directional_sup_norms, grad_u_asymptotic_in, grad_v_asymptotic, measure_sweep_point,
    AsymVariant, ChargeSupport, GridSpec, ImageChargeSystem, ImagePotentialKind,
};
use diskgap_core::bipolar::{BipolarFrame, BipolarPoint};
use diskgap_core::boundary::{
    harmonic_extension, BoundaryKind, FourierBoundaryData, HarmonicDiskField,
};
use diskgap_core::lerch::{kernel_p, kernel_p_quad, kernel_p_series, lerch_l_quad, lerch_l_series};
use diskgap_core::quadrature::integrate_real;
use diskgap_core::reflection::{solve_u_reflection, solve_v_reflection, ReflectionSeriesConfig};
use diskgap_core::spectral::{solve_modes, BipolarModeSolution, Parity};
use diskgap_core::{Complex64, Region, Side, Vec2};
use rand::{Rng, SeedableRng};

const PI: f64 = std::f64::consts::PI;

fn frame(eps: f64) -> BipolarFrame {
    BipolarFrame::derive(2.0, 5.0, eps).unwrap()
}

fn field(kind: BoundaryKind, cos: &[f64], sin: &[f64]) -> HarmonicDiskField {
    let data = FourierBoundaryData::new(kind, cos, sin).unwrap();
    harmonic_extension(&data, 5.0).unwrap()
}

/// Dirichlet blow-up schedule: k²ε = 2/25.
const DIR_SWEEP: [(f64, f64); 3] = [
    (1.0 / 50.0, 2.0),
    (1.0 / 3200.0, 16.0),
    (1.0 / 204800.0, 128.0),
];
/// Neumann blow-up schedule: k²/ε = 2.
const NEU_SWEEP: [(f64, f64); 2] = [(1.0 / 3200.0, 1.0 / 40.0), (1.0 / 204800.0, 1.0 / 320.0)];

fn dir_solutions() -> &'static Vec<(f64, f64, BipolarModeSolution)> {
    static CELL: OnceLock<Vec<(f64, f64, BipolarModeSolution)>> = OnceLock::new();
    CELL.get_or_init(|| {
        DIR_SWEEP
            .iter()
            .map(|&(eps, k)| {
                let f = frame(eps);
                let h = field(BoundaryKind::Dirichlet, &[1.0], &[]);
                (eps, k, solve_modes(&f, k, &h).unwrap())
            })
            .collect()
    })
}

fn neu_solutions() -> &'static Vec<(f64, f64, BipolarModeSolution)> {
    static CELL: OnceLock<Vec<(f64, f64, BipolarModeSolution)>> = OnceLock::new();
    CELL.get_or_init(|| {
        NEU_SWEEP
            .iter()
            .map(|&(eps, k)| {
                let f = frame(eps);
                let h = field(BoundaryKind::Neumann, &[1.0], &[]);
                (eps, k, solve_modes(&f, k, &h).unwrap())
            })
            .collect()
    })
}

#[test]
fn criterion_01_frame_constants() {
    let f = frame(1.0 / 50.0);
    let dev = (f.alpha() - 0.367534)
        .abs()
        .max((f.c_i() - 2.033490).abs())
        .max((f.c_e() - 5.013490).abs());
    assert!(dev <= 1e-5, "frame constants off by {dev}");
    println!("criterion 1 (frame constants, tol 1e-5): PASS, max deviation {dev:.3e}");
}

#[test]
fn criterion_02_dual_solver_equivalence() {
    let cfg = ReflectionSeriesConfig {
        tol: 1e-12,
        ..Default::default()
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20_260_810);
    let mut worst = 0.0f64;
    for eps in [1.0 / 8.0, 1.0 / 50.0] {
        let f = frame(eps);
        for k in [0.125, 2.0, 8.0] {
            for kind in [BoundaryKind::Neumann, BoundaryKind::Dirichlet] {
                for (cos, sin) in [
                    (&[1.0][..], &[][..]),
                    (&[][..], &[1.0][..]),
                    (&[1.0, 0.5][..], &[][..]),
                ] {
                    let h = field(kind, cos, sin);
                    let sol = solve_modes(&f, k, &h).unwrap();
                    for _ in 0..100 {
                        // Interior points: shell and core, poles avoided.
                        let p = if rng.gen_bool(0.6) {
                            BipolarPoint::new(
                                f.xi_e() + rng.gen_range(0.02..0.98) * f.xi_gap(),
                                rng.gen_range(-PI..PI),
                            )
                        } else {
                            BipolarPoint::new(
                                f.xi_i() + rng.gen_range(0.0..2.0),
                                rng.gen_range(-PI..PI),
                            )
                        };
                        let a = sol.eval(p).unwrap();
                        let b = match kind {
                            BoundaryKind::Neumann => {
                                solve_u_reflection(&f, k, &h, p, &cfg).unwrap()
                            }
                            BoundaryKind::Dirichlet => {
                                solve_v_reflection(&f, k, &h, p, &cfg).unwrap()
                            }
                        };
                        worst = worst.max((a.grad - b.grad).norm() / a.grad_norm().max(1.0));
                    }
                }
            }
        }
    }
    assert!(worst <= 1e-8, "solver disagreement {worst}");
    println!("criterion 2 (dual-solver equivalence, tol 1e-8): PASS, worst {worst:.3e}");
}

#[test]
fn criterion_03_unit_conductivity_degeneracy() {
    let cfg = ReflectionSeriesConfig::default();
    let mut worst = 0.0f64;
    for (kind, cos) in [
        (BoundaryKind::Neumann, &[1.0, 0.4][..]),
        (BoundaryKind::Dirichlet, &[1.0, 0.4][..]),
    ] {
        let f = frame(1.0 / 50.0);
        let h = field(kind, cos, &[0.3]);
        let shifted = diskgap_core::boundary::TranslatedField::new(&h, f.x_0());
        let sol = solve_modes(&f, 1.0, &h).unwrap();
        for &(xi, th) in &[(f.xi_e(), 0.0), (0.12, 2.0), (f.xi_i(), -1.0), (1.5, 0.5)] {
            let p = BipolarPoint::new(xi, th);
            let s = sol.eval(p).unwrap();
            let r = match kind {
                BoundaryKind::Neumann => solve_u_reflection(&f, 1.0, &h, p, &cfg).unwrap(),
                BoundaryKind::Dirichlet => solve_v_reflection(&f, 1.0, &h, p, &cfg).unwrap(),
            };
            let hg = shifted.grad(s.cartesian).unwrap();
            worst = worst.max((s.grad - hg).norm()).max((r.grad - hg).norm());
        }
    }
    assert!(worst <= 1e-12, "k=1 deviation {worst}");
    println!("criterion 3 (k=1 degeneracy, tol 1e-12): PASS, worst {worst:.3e}");
}

#[test]
fn criterion_04_closed_form_coefficients() {
    let f = frame(1.0 / 50.0);
    let mut worst = 0.0f64;
    for k in [2.0, 0.5] {
        let tau = (k - 1.0) / (k + 1.0);
        // Dirichlet: denominators 1 − τ e^{−2nδ} (coefficients scale with
        // C₁ = 1/r_e for the cos t data).
        let sol = solve_modes(&f, k, &field(BoundaryKind::Dirichlet, &[1.0], &[])).unwrap();
        let (p, q) = sol.shell_coeffs(Parity::Cos);
        let s = sol.core_coeffs(Parity::Cos);
        for n in 1..=64usize {
            let nf = n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let e2 = (-2.0 * nf * f.xi_gap()).exp();
            let a_n = -2.0 * f.alpha() * sign * tau / (1.0 - tau * e2);
            let b_n = 2.0 * f.alpha() * sign * tau * e2 / (1.0 - tau * e2);
            let c1 = 0.2;
            worst = worst
                .max((p[n - 1] - c1 * a_n * (-nf * f.xi_i()).exp()).abs())
                .max((q[n - 1] - c1 * b_n * (-nf * f.xi_e()).exp()).abs())
                .max((s[n - 1] - c1 * (a_n + b_n) * (-nf * f.xi_i()).exp()).abs());
        }
        // Neumann: denominators 1 + τ e^{−2nδ} (C₁ = 1).
        let sol = solve_modes(&f, k, &field(BoundaryKind::Neumann, &[1.0], &[])).unwrap();
        let (p, q) = sol.shell_coeffs(Parity::Cos);
        let s = sol.core_coeffs(Parity::Cos);
        for n in 1..=64usize {
            let nf = n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let e2 = (-2.0 * nf * f.xi_gap()).exp();
            let a_n = -2.0 * f.alpha() * sign * tau / (1.0 + tau * e2);
            let b_n = -2.0 * f.alpha() * sign * tau * e2 / (1.0 + tau * e2);
            worst = worst
                .max((p[n - 1] - a_n * (-nf * f.xi_i()).exp()).abs())
                .max((q[n - 1] - b_n * (-nf * f.xi_e()).exp()).abs())
                .max((s[n - 1] - (a_n + b_n) * (-nf * f.xi_i()).exp()).abs());
        }
    }
    assert!(worst <= 1e-10, "coefficient deviation {worst}");
    println!("criterion 4 (closed-form coefficients, tol 1e-10): PASS, worst {worst:.3e}");
}

#[test]
fn criterion_05_special_functions() {
    // Quadrature vs series on the stated grid.
    let mut worst = 0.0f64;
    for &r in &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
        for &phase in &[0.0, 1.0, 2.3, PI] {
            let z = Complex64::from_polar(r, phase);
            for &beta in &[0.5, 1.0, 5.0, 20.0] {
                worst = worst
                    .max((lerch_l_series(z, beta).unwrap() - lerch_l_quad(z, beta).unwrap()).norm())
                    .max(
                        (kernel_p_series(z, beta).unwrap() - kernel_p_quad(z, beta).unwrap())
                            .norm(),
                    );
            }
        }
    }
    assert!(worst <= 1e-10, "L/P dual-route deviation {worst}");

    let l = lerch_l_series(Complex64::new(0.5, 0.0), 1.0).unwrap();
    let closed = (l.re - (2.0 * 1.5f64.ln() - 1.0)).abs();
    assert!(closed <= 1e-6, "closed form deviation {closed}");

    // Kernel bounds hold with margin on dense grids.
    let mut ratio_mod = 0.0f64;
    let mut ratio_lip = 0.0f64;
    let mut ratio_ref = 0.0f64;
    for i in 0..20 {
        let s = 0.02 + 0.16 * i as f64;
        for j in 0..20 {
            let th = -PI + 2.0 * PI * (j as f64 + 0.5) / 20.0;
            for &beta in &[0.5, 2.0, 8.0] {
                let p = kernel_p(Complex64::from_polar((-s).exp(), th), beta).unwrap();
                ratio_mod = ratio_mod.max(p.norm() * 2.0 * beta * (s.cosh() + th.cos()));
                let p2 = kernel_p(Complex64::from_polar((-(s + 0.3)).exp(), th), beta).unwrap();
                ratio_lip = ratio_lip.max((p2 - p).norm() * 2.0 * (s.cosh() + th.cos()) / 0.3);
            }
            let beta = 1.5;
            let p = kernel_p(Complex64::from_polar((-s).exp(), -th), beta).unwrap();
            let rhs = integrate_real(
                |t| (-beta * t).exp() / (2.0 * ((s + t).cosh() + th.cos())),
                0.0,
                60.0,
                1e-13,
                1e-12,
                50_000,
            )
            .value
            .re;
            ratio_ref = ratio_ref.max(p.norm() / rhs);
        }
    }
    assert!(ratio_mod <= 1.0 + 1e-9, "modulus bound ratio {ratio_mod}");
    assert!(ratio_lip <= 1.0 + 1e-9, "Lipschitz bound ratio {ratio_lip}");
    assert!(ratio_ref <= 1.0 + 1e-8, "refined bound ratio {ratio_ref}");
    println!(
        "criterion 5 (special functions): PASS, dual-route {worst:.3e}, closed form {closed:.3e}, bound ratios {ratio_mod:.6}/{ratio_lip:.6}/{ratio_ref:.6}"
    );
}

#[test]
fn criterion_06_blow_up_rates() {
    let grid = GridSpec::default();
    // Dirichlet: shell e_ξ grows ×[6,10] per 64× gap refinement; the other
    // three norms stay within ×2 overall.
    let mut dir = Vec::new();
    for (_, _, sol) in dir_solutions() {
        dir.push((
            directional_sup_norms(sol, Region::Shell, &grid).unwrap(),
            directional_sup_norms(sol, Region::Core, &grid).unwrap(),
        ));
    }
    for step in 0..2 {
        let g = dir[step + 1].0.e_xi / dir[step].0.e_xi;
        assert!(
            (6.0..=10.0).contains(&g),
            "Dirichlet shell e_xi growth {g} outside [6,10]"
        );
    }
    for pick in [
        |p: &(
            diskgap_core::asymptotics::DirectionalNorms,
            diskgap_core::asymptotics::DirectionalNorms,
        )| p.0.e_theta,
        |p: &(
            diskgap_core::asymptotics::DirectionalNorms,
            diskgap_core::asymptotics::DirectionalNorms,
        )| p.1.e_xi,
        |p: &(
            diskgap_core::asymptotics::DirectionalNorms,
            diskgap_core::asymptotics::DirectionalNorms,
        )| p.1.e_theta,
    ] {
        let vals: Vec<f64> = dir.iter().map(pick).collect();
        let variation = vals.iter().cloned().fold(0.0f64, f64::max)
            / vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(
            variation < 2.0,
            "Dirichlet bounded-norm variation {variation}"
        );
    }

    // Neumann: core norms and shell e_θ grow ×[6,10]; shell e_ξ flat.
    let mut neu = Vec::new();
    for (_, _, sol) in neu_solutions() {
        neu.push((
            directional_sup_norms(sol, Region::Shell, &grid).unwrap(),
            directional_sup_norms(sol, Region::Core, &grid).unwrap(),
        ));
    }
    for (name, a, b) in [
        ("core e_xi", neu[0].1.e_xi, neu[1].1.e_xi),
        ("core e_theta", neu[0].1.e_theta, neu[1].1.e_theta),
        ("shell e_theta", neu[0].0.e_theta, neu[1].0.e_theta),
    ] {
        let g = b / a;
        assert!((6.0..=10.0).contains(&g), "Neumann {name} growth {g}");
    }
    let flat = neu[1].0.e_xi / neu[0].0.e_xi;
    assert!(
        (0.5..2.0).contains(&flat),
        "Neumann shell e_xi variation {flat}"
    );
    println!(
        "criterion 6 (blow-up rates): PASS, Dirichlet shell e_xi x{:.2}/x{:.2}, Neumann growths x{:.2}/x{:.2}/x{:.2}, flat {flat:.4}",
        dir[1].0.e_xi / dir[0].0.e_xi,
        dir[2].0.e_xi / dir[1].0.e_xi,
        neu[1].1.e_xi / neu[0].1.e_xi,
        neu[1].1.e_theta / neu[0].1.e_theta,
        neu[1].0.e_theta / neu[0].0.e_theta,
    );
}

#[test]
fn criterion_07_boundedness_row() {
    // C₁ = C₂ = 0 data: no directional norm may grow across the sweep.
    // (The core norms decay like 1/k on this schedule, so boundedness is
    // asserted as absence of growth over the coarsest-gap value.)
    let grid = GridSpec::default();
    let data = FourierBoundaryData::new(BoundaryKind::Dirichlet, &[1.0, 0.5], &[]).unwrap();
    let h = harmonic_extension(&data, 5.0).unwrap();
    let (c1, c2) = h.c1_c2();
    assert!(c1.abs() + c2.abs() <= 1e-14, "drivers not null: {c1}, {c2}");
    let mut norms = Vec::new();
    for &(eps, k) in &DIR_SWEEP {
        let p = measure_sweep_point(2.0, 5.0, eps, k, &data, &grid).unwrap();
        norms.push([p.shell.e_xi, p.shell.e_theta, p.core.e_xi, p.core.e_theta]);
    }
    let mut worst = 0.0f64;
    for which in 0..4 {
        let first = norms[0][which];
        for row in &norms {
            worst = worst.max(row[which] / first);
        }
    }
    assert!(worst < 2.0, "bounded-row growth factor {worst}");
    println!("criterion 7 (boundedness row, growth cap 2): PASS, worst growth {worst:.4}");
}

#[test]
fn criterion_08_asymptotic_remainder() {
    // Dirichlet side: outer ∂D trace of ∇v·e_ξ vs the asymptotic formula.
    let n = 1024;
    let mut prev_ratio = f64::INFINITY;
    let mut prev_peak = 0.0;
    let mut dir_gaps = Vec::new();
    for (i, (eps, k, sol)) in dir_solutions().iter().enumerate() {
        let f = frame(*eps);
        let (c1, c2) = sol.field().c1_c2();
        let mut gap = 0.0f64;
        let mut peak = 0.0f64;
        for j in 0..n {
            let th = -PI + 2.0 * PI * j as f64 / n as f64;
            let exact = sol.interface_trace(Side::Outer, th).unwrap().grad_xi;
            let (asym, _) = grad_v_asymptotic(
                &f,
                *k,
                c1,
                c2,
                BipolarPoint::new(f.xi_i(), th),
                AsymVariant::Primary,
            )
            .unwrap();
            gap = gap.max((exact - asym).abs());
            peak = peak.max(exact.abs());
        }
        let ratio = gap / peak;
        assert!(
            gap <= 1.0,
            "Dirichlet remainder {gap} exceeds the constant 1.0"
        );
        if i > 0 {
            assert!(ratio < prev_ratio, "error/peak ratio not decreasing");
            assert!(peak > 4.0 * prev_peak, "peak did not grow");
        }
        prev_ratio = ratio;
        prev_peak = peak;
        dir_gaps.push((gap, ratio));
    }

    // Neumann side: shell e_θ trace and core e_ξ trace vs the formulas.
    let mut neu_gaps = Vec::new();
    for (which, side, region, comp, cap) in [
        (0usize, Side::Outer, Region::Shell, "theta", 2.0),
        (1usize, Side::Inner, Region::Core, "xi", 8.0),
    ] {
        let mut prev_ratio = f64::INFINITY;
        let mut prev_peak = 0.0;
        for (i, (eps, k, sol)) in neu_solutions().iter().enumerate() {
            let f = frame(*eps);
            let (c1, c2) = sol.field().c1_c2();
            let mut gap = 0.0f64;
            let mut peak = 0.0f64;
            for j in 0..n {
                let th = -PI + 2.0 * PI * j as f64 / n as f64;
                let tr = sol.interface_trace(side, th).unwrap();
                let exact = if which == 0 {
                    tr.grad_theta
                } else {
                    tr.grad_xi
                };
                let (axi, ath) =
                    grad_u_asymptotic_in(&f, *k, c1, c2, BipolarPoint::new(f.xi_i(), th), region)
                        .unwrap();
                let asym = if which == 0 { ath } else { axi };
                gap = gap.max((exact - asym).abs());
                peak = peak.max(exact.abs());
            }
            let ratio = gap / peak;
            assert!(gap <= cap, "Neumann {comp} remainder {gap} exceeds {cap}");
            if i > 0 {
                assert!(
                    ratio < prev_ratio,
                    "Neumann {comp} error/peak not decreasing"
                );
                assert!(peak > 4.0 * prev_peak, "Neumann {comp} peak did not grow");
            }
            prev_ratio = ratio;
            prev_peak = peak;
            neu_gaps.push((gap, ratio));
        }
    }
    println!(
        "criterion 8 (asymptotic remainder): PASS, Dirichlet gaps {:?}, Neumann gaps {:?}",
        dir_gaps
            .iter()
            .map(|(g, r)| format!("{g:.3}/{r:.4}"))
            .collect::<Vec<_>>(),
        neu_gaps
            .iter()
            .map(|(g, r)| format!("{g:.3}/{r:.4}"))
            .collect::<Vec<_>>(),
    );
}

#[test]
fn criterion_09_image_charge_identities() {
    let f = frame(1.0 / 50.0);
    let sys = ImageChargeSystem::new(&f, 2.0).unwrap();

    // ψ₊(c_i) = 1 exactly (bitwise, by construction of the exponent).
    let (_, psi) = sys.density(ChargeSupport::Plus, f.c_i()).unwrap();
    assert_eq!(psi, 1.0, "psi_+(c_i) = {psi} is not exactly 1");

    // ∫φ₊ = 1 within 1e−8, φ₊ being the exact derivative of ψ₊.
    let a = f.alpha();
    let cut = a + 1e-6 * (f.c_i() - a);
    let (_, psi_cut) = sys.density(ChargeSupport::Plus, cut).unwrap();
    let body = integrate_real(
        |s| sys.density(ChargeSupport::Plus, s).unwrap().0,
        cut,
        f.c_i(),
        1e-13,
        1e-11,
        60_000,
    )
    .value
    .re;
    let total = body + psi_cut;
    assert!((total - 1.0).abs() <= 1e-8, "phi integral {total}");

    // L(e^{−(2ξ_i−ξ)−iθ};β) equals the image-charge combination up
    // to a remainder with gradient below 1/r_i, at 50 shell points.
    let beta = sys.beta();
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..5 {
            let xi = f.xi_e() + (0.08 + 0.84 * i as f64 / 9.0) * f.xi_gap();
            let th = -PI + 2.0 * PI * (j as f64 + 0.5) / 5.0;
            let p = BipolarPoint::new(xi, th);
            let x = f.to_cartesian(p).unwrap();
            let (e_xi, e_th) = f.basis_vectors(p).unwrap();
            let h = f.scale_factor(p).unwrap();
            let pv = kernel_p(
                Complex64::from_polar((-(2.0 * f.xi_i() - xi)).exp(), -th),
                beta,
            )
            .unwrap();
            let grad_l_re = (e_xi * (-pv.re) + e_th * (-pv.im)) * h;
            let grad_l_im = (e_xi * (-pv.im) + e_th * pv.re) * h;
            let (_, g_log) = sys
                .potential(ImagePotentialKind::VStar, x, 1.0, 0.0)
                .unwrap();
            let (_, g_dip) = sys
                .potential(ImagePotentialKind::VStar, x, 0.0, 1.0)
                .unwrap();
            let pref = -f.r_star() * f.r_star() * sys.tau();
            let dre = grad_l_re - g_log * (1.0 / pref);
            let dim = grad_l_im - g_dip * (1.0 / pref);
            worst = worst.max(Vec2::new(dre.norm(), dim.norm()).norm());
        }
    }
    assert!(worst <= 0.5, "image remainder gradient {worst} above 1/r_i");
    println!(
        "criterion 9 (image charges): PASS, psi exact, integral dev {:.1e}, remainder {worst:.4} <= 0.5",
        (total - 1.0).abs()
    );
}
