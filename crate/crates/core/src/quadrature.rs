//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 15-point Kronrod rule with the embedded 7-point Gauss rule supplies the
//! local error estimate; intervals are bisected until the estimate passes.
//! Integrands are complex-valued (real integrands wrap trivially). This is
//! used for the Lerch transcendent away from the series' comfort zone and
//! for the image-charge potentials.

use alloc::vec::Vec;

use crate::Complex64;

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with
// the embedded 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub converged: bool,
}

fn kronrod_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, Complex64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(mid - dx) + f(mid + dx);
        kron += fsum * WGK[j];
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    (kron * half, gauss * half)
}

/// Integrates `f` over `[a, b]` to the requested absolute/relative
/// tolerance by adaptive bisection.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> QuadResult {
    // (lo, hi, kronrod, |kronrod - gauss|)
    let mut stack: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    let (k0, g0) = kronrod_panel(&f, a, b);
    stack.push((a, b, k0, (k0 - g0).norm()));

    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    let mut panels = 1usize;
    let mut converged = true;

    while let Some((lo, hi, k, e)) = stack.pop() {
        let scale = value.norm() + k.norm();
        let width_floor = (hi - lo) <= f64::EPSILON * (1.0 + lo.abs() + hi.abs());
        if e <= tol_abs.max(0.25 * tol_rel * (scale + 1e-300))
            || width_floor
            || panels >= max_panels
        {
            if panels >= max_panels && e > tol_abs.max(tol_rel * (scale + 1e-300)) {
                converged = false;
            }
            value += k;
            err += e;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (k1, g1) = kronrod_panel(&f, lo, mid);
        let (k2, g2) = kronrod_panel(&f, mid, hi);
        panels += 1;
        stack.push((lo, mid, k1, (k1 - g1).norm()));
        stack.push((mid, hi, k2, (k2 - g2).norm()));
    }

    QuadResult {
        value,
        error_estimate: err,
        converged,
    }
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol_abs: f64,
    tol_rel: f64,
    max_panels: usize,
) -> QuadResult {
    integrate(
        |t| Complex64::new(f(t), 0.0),
        a,
        b,
        tol_abs,
        tol_rel,
        max_panels,
    )
}

/// Trapezoid rule for `2π`-periodic integrands sampled on `n` uniform nodes
/// starting at `−π`; spectrally accurate for smooth periodic functions.
pub fn trapezoid_periodic<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let step = 2.0 * core::f64::consts::PI / n as f64;
    let mut acc = 0.0;
    for j in 0..n {
        let t = -core::f64::consts::PI + step * j as f64;
        acc += f(t);
    }
    acc * step
}
