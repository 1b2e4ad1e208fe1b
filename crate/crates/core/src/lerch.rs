//! The Lerch transcendent `L(z;β)`, its kernel `P(z;β)` and the singular
//! functions assembled from them.
//!
//! ```text
//! L(z;β) = −∫₀^∞ z e^{−(β+1)t} / (1 + z e^{−t}) dt = Σ_{m≥1} (−z)^m/(β+m),
//! P(z;β) = −z ∂L/∂z = ∫₀^∞ z e^{−(β+1)t} / (1 + z e^{−t})² dt,
//! ```
//!
//! both for `|z| < 1`, `β > 0`. The power series is the independent oracle;
//! the integral (adaptive Gauss–Kronrod on `[0, T]`, `T = max(50, 40/(β+1))`,
//! with a provably negligible tail) is the production path once `|z|`
//! approaches 1 and the series slows down. Crossover at `|z| = 0.8`.
//!
//! The singular functions `q_d` (Dirichlet branch) and `q` (Neumann branch)
//! are the fixed `L`-combinations whose gradients carry the entire blow-up
//! of the transmission solutions.

#[allow(unused_imports)] // resolves f64 methods in no_std builds
use num_traits::Float;

use crate::bipolar::{BipolarFrame, BipolarPoint};
use crate::error::{Error, Result};
use crate::quadrature;
use crate::Complex64;

/// Modulus bound under which arguments are accepted.
const MAX_MODULUS: f64 = 1.0 - 1e-12;
/// Series/quadrature crossover for the production evaluators.
const SERIES_CROSSOVER: f64 = 0.8;
const SERIES_CAP: usize = 200_000;

fn check_args(z: Complex64, beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain("beta must be positive"));
    }
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > MAX_MODULUS {
        return Err(Error::Domain("argument must satisfy |z| <= 1 - 1e-12"));
    }
    Ok(())
}

/// Oracle evaluation of `L` by its alternating power series.
pub fn lerch_l_series(z: Complex64, beta: f64) -> Result<Complex64> {
    check_args(z, beta)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zp = Complex64::new(1.0, 0.0);
    for m in 1..=SERIES_CAP {
        zp *= -z;
        acc += zp / (beta + m as f64);
        if zp.norm() < 1e-17 * (1.0 + acc.norm()) {
            break;
        }
    }
    Ok(acc)
}

/// Oracle evaluation of `P` by `Σ (−1)^{m−1} m z^m/(β+m)`.
pub fn kernel_p_series(z: Complex64, beta: f64) -> Result<Complex64> {
    check_args(z, beta)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zp = Complex64::new(1.0, 0.0);
    for m in 1..=SERIES_CAP {
        zp *= -z;
        let mf = m as f64;
        acc -= zp * (mf / (beta + mf));
        if zp.norm() * mf < 1e-17 * (1.0 + acc.norm()) {
            break;
        }
    }
    Ok(acc)
}

fn upper_limit(beta: f64) -> f64 {
    (40.0 / (beta + 1.0)).max(50.0)
}

/// Quadrature evaluation of `L` on `[0, T]`; the dropped tail is below
/// `|z| e^{−(β+1)T}/(β+1) ≤ 2e−22`.
pub fn lerch_l_quad(z: Complex64, beta: f64) -> Result<Complex64> {
    check_args(z, beta)?;
    let t_max = upper_limit(beta);
    let r = quadrature::integrate(
        |t| {
            let e = (-t).exp();
            let den = Complex64::new(1.0, 0.0) + z * e;
            -z * (-(beta + 1.0) * t).exp() / den
        },
        0.0,
        t_max,
        1e-300,
        1e-13,
        100_000,
    );
    Ok(r.value)
}

/// Quadrature evaluation of `P`.
pub fn kernel_p_quad(z: Complex64, beta: f64) -> Result<Complex64> {
    check_args(z, beta)?;
    let t_max = upper_limit(beta);
    let r = quadrature::integrate(
        |t| {
            let e = (-t).exp();
            let den = Complex64::new(1.0, 0.0) + z * e;
            z * (-(beta + 1.0) * t).exp() / (den * den)
        },
        0.0,
        t_max,
        1e-300,
        1e-13,
        100_000,
    );
    Ok(r.value)
}

/// Production evaluator for `L(z;β)`.
pub fn lerch_l(z: Complex64, beta: f64) -> Result<Complex64> {
    if z.norm() < SERIES_CROSSOVER {
        lerch_l_series(z, beta)
    } else {
        lerch_l_quad(z, beta)
    }
}

/// Production evaluator for `P(z;β)`.
pub fn kernel_p(z: Complex64, beta: f64) -> Result<Complex64> {
    if z.norm() < SERIES_CROSSOVER {
        kernel_p_series(z, beta)
    } else {
        kernel_p_quad(z, beta)
    }
}

fn arg_exp(s: f64, theta: f64) -> Complex64 {
    Complex64::from_polar((-s).exp(), -theta)
}

/// Dirichlet-branch singular function on `Ω̄∖∂D`:
///
/// ```text
/// q_d = L(e^{−(2ξ_i−2ξ_e+ξ)−iθ};β) − L(e^{−(2ξ_i−ξ)−iθ};β)   (shell)
/// q_d = L(e^{−(2ξ_i−2ξ_e+ξ)−iθ};β) − L(e^{−ξ−iθ};β)          (core)
/// ```
pub fn q_d(frame: &BipolarFrame, p: BipolarPoint, beta: f64) -> Result<Complex64> {
    let (xi_i, xi_e) = (frame.xi_i(), frame.xi_e());
    let xi = p.xi();
    if xi < xi_e - 1e-12 {
        return Err(Error::Domain("point lies outside the domain"));
    }
    if xi == xi_i {
        return Err(Error::Domain("singular function is not defined on ∂D"));
    }
    let first = lerch_l(arg_exp(2.0 * (xi_i - xi_e) + xi, p.theta()), beta)?;
    let second_s = if xi < xi_i { 2.0 * xi_i - xi } else { xi };
    let second = lerch_l(arg_exp(second_s, p.theta()), beta)?;
    Ok(first - second)
}

/// Neumann-branch singular function on `Ω̄∖∂D`:
///
/// ```text
/// q = −L(e^{−ξ−2(ξ_i−ξ_e)−iθ};β) − L(e^{ξ−2ξ_i−iθ};β)   (shell)
/// q = −L(e^{−ξ−2(ξ_i−ξ_e)−iθ};β) − L(e^{−ξ−iθ};β)       (core)
/// ```
pub fn q_u(frame: &BipolarFrame, p: BipolarPoint, beta: f64) -> Result<Complex64> {
    let (xi_i, xi_e) = (frame.xi_i(), frame.xi_e());
    let xi = p.xi();
    if xi < xi_e - 1e-12 {
        return Err(Error::Domain("point lies outside the domain"));
    }
    if xi == xi_i {
        return Err(Error::Domain("singular function is not defined on ∂D"));
    }
    let first = lerch_l(arg_exp(xi + 2.0 * (xi_i - xi_e), p.theta()), beta)?;
    let second_s = if xi < xi_i { 2.0 * xi_i - xi } else { xi };
    let second = lerch_l(arg_exp(second_s, p.theta()), beta)?;
    Ok(-first - second)
}
