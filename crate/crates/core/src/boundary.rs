//! Boundary data on `∂Ω` and its harmonic extension into the disk.
//!
//! Data is stored spectrally: a mean-zero trigonometric series in the
//! boundary parameter `t ↦ (r_e + r_e cos t, r_e sin t)`. The harmonic
//! extension is then exact per mode, and the regularity hypotheses on the
//! data become coefficient-decay statements enforced by a hard mode cap.
//!
//! The extension `H` (Neumann data `g`) or `H_d` (Dirichlet data `g_d`) is a
//! harmonic polynomial-like series about the disk center; its gradient at
//! the boundary point `(0, 0)` closest to the inclusion yields the two
//! numbers `(C₁, C₂)` that alone drive the gradient blow-up.

use alloc::vec::Vec;

#[allow(unused_imports)] // resolves f64 methods in no_std builds
use num_traits::Float;

use crate::bipolar::CartesianPoint;
use crate::error::{Error, Result};
use crate::vec2::Vec2;
use crate::Complex64;

/// Default cap on the number of stored modes.
pub const DEFAULT_MODE_CAP: usize = 64;

/// Relative slack accepted when testing membership in the closed disk, so
/// that boundary traces survive round-off.
const DISK_TOL: f64 = 1e-9;

/// Outer boundary condition type of the transmission problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Flux data `∂u/∂ν = g` on `∂Ω`.
    Neumann,
    /// Trace data `v = g_d` on `∂Ω`.
    Dirichlet,
}

/// Mean-zero trigonometric boundary data
/// `t ↦ Σ_{n≥1} aₙ cos nt + bₙ sin nt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBoundaryData {
    kind: BoundaryKind,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl FourierBoundaryData {
    /// Builds data from cosine and sine coefficients (index 0 is mode
    /// `n = 1`; there is no `n = 0` slot, so the data is mean-zero by
    /// construction). Modes past [`DEFAULT_MODE_CAP`] are truncated.
    pub fn new(kind: BoundaryKind, cos: &[f64], sin: &[f64]) -> Result<Self> {
        Self::with_mode_cap(kind, cos, sin, DEFAULT_MODE_CAP)
    }

    /// Same as [`FourierBoundaryData::new`] with an explicit truncation cap.
    pub fn with_mode_cap(kind: BoundaryKind, cos: &[f64], sin: &[f64], cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::Domain("mode cap must be at least 1"));
        }
        if cos.iter().chain(sin.iter()).any(|c| !c.is_finite()) {
            return Err(Error::Domain("boundary coefficients must be finite"));
        }
        let n = cos.len().max(sin.len()).min(cap);
        let mut c = Vec::with_capacity(n);
        let mut s = Vec::with_capacity(n);
        for i in 0..n {
            c.push(cos.get(i).copied().unwrap_or(0.0));
            s.push(sin.get(i).copied().unwrap_or(0.0));
        }
        Ok(FourierBoundaryData {
            kind,
            cos: c,
            sin: s,
        })
    }

    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn n_modes(&self) -> usize {
        self.cos.len()
    }

    /// Boundary trace at parameter `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let n = (i + 1) as f64;
            acc += a * (n * t).cos() + b * (n * t).sin();
        }
        acc
    }

    /// The decay proxy `Σ n^{1+δ}(|aₙ| + |bₙ|)`; finite by construction for
    /// stored data, used to report the regularity scale of inputs.
    pub fn regularity_sum(&self, delta: f64) -> f64 {
        let mut acc = 0.0;
        for (i, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            acc += ((i + 1) as f64).powf(1.0 + delta) * (a.abs() + b.abs());
        }
        acc
    }
}

/// Harmonic extension of boundary data into the closed disk `Ω̄`, stored as
/// the complex coefficients `γₙ` of `Re Σ γₙ wⁿ` with `w = (x₁ − r_e) + i x₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicDiskField {
    r_e: f64,
    kind: BoundaryKind,
    gamma: Vec<Complex64>,
}

/// Solves the disk problem for the stored data:
/// for Neumann data the mode `cos nt` extends to `(r_e/n)(ρ/r_e)ⁿ cos nφ`
/// (flux 1 per unit amplitude on `∂Ω`), for Dirichlet data to
/// `(ρ/r_e)ⁿ cos nφ`.
pub fn harmonic_extension(data: &FourierBoundaryData, r_e: f64) -> Result<HarmonicDiskField> {
    if !(r_e.is_finite() && r_e > 0.0) {
        return Err(Error::Domain("outer radius must be positive"));
    }
    let mut gamma = Vec::with_capacity(data.n_modes());
    for (i, (a, b)) in data.cos_coeffs().iter().zip(data.sin_coeffs()).enumerate() {
        let n = (i + 1) as f64;
        let scale = match data.kind() {
            BoundaryKind::Neumann => r_e / (n * r_e.powf(n)),
            BoundaryKind::Dirichlet => 1.0 / r_e.powf(n),
        };
        gamma.push(Complex64::new(a * scale, -b * scale));
    }
    Ok(HarmonicDiskField {
        r_e,
        kind: data.kind(),
        gamma,
    })
}

impl HarmonicDiskField {
    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn r_e(&self) -> f64 {
        self.r_e
    }

    pub fn n_modes(&self) -> usize {
        self.gamma.len()
    }

    fn check_in_disk(&self, x: CartesianPoint) -> Result<Complex64> {
        if !x.is_finite() {
            return Err(Error::Domain("point has non-finite components"));
        }
        let w = Complex64::new(x.x1 - self.r_e, x.x2);
        if w.norm() > self.r_e * (1.0 + DISK_TOL) {
            return Err(Error::Domain("point lies outside the closed disk"));
        }
        Ok(w)
    }

    /// Field value at a point of `Ω̄`.
    pub fn eval(&self, x: CartesianPoint) -> Result<f64> {
        let w = self.check_in_disk(x)?;
        let mut p = Complex64::new(0.0, 0.0);
        for g in self.gamma.iter().rev() {
            p = p * w + g;
        }
        Ok((p * w).re)
    }

    /// Field gradient at a point of `Ω̄`.
    pub fn grad(&self, x: CartesianPoint) -> Result<Vec2> {
        let w = self.check_in_disk(x)?;
        Ok(self.grad_at(w))
    }

    /// Value and gradient in one pass.
    pub fn value_and_grad(&self, x: CartesianPoint) -> Result<(f64, Vec2)> {
        let w = self.check_in_disk(x)?;
        let mut p = Complex64::new(0.0, 0.0);
        for g in self.gamma.iter().rev() {
            p = p * w + g;
        }
        Ok(((p * w).re, self.grad_at(w)))
    }

    fn grad_at(&self, w: Complex64) -> Vec2 {
        // d/dw of Σ γₙ wⁿ; ∇Re f = (Re f′, −Im f′).
        let mut d = Complex64::new(0.0, 0.0);
        for (i, g) in self.gamma.iter().enumerate().rev() {
            d = d * w + g * (i + 1) as f64;
        }
        Vec2::new(d.re, -d.im)
    }

    /// The blow-up drivers `(C₁, C₂) = (∂H/∂x₁, ∂H/∂x₂)` at the
    /// un-translated origin `(0, 0) ∈ ∂Ω`.
    pub fn c1_c2(&self) -> (f64, f64) {
        let g = self.grad_at(Complex64::new(-self.r_e, 0.0));
        (g.x, g.y)
    }

    /// Upper bound for `sup_{Ω̄} |∇H|`: `Σ n |γₙ| r_e^{n−1}`.
    pub fn sup_grad_bound(&self) -> f64 {
        let mut acc = 0.0;
        for (i, g) in self.gamma.iter().enumerate() {
            let n = (i + 1) as f64;
            acc += n * g.norm() * self.r_e.powf(n - 1.0);
        }
        acc
    }
}

/// View of a field translated by `(x_0, 0)`: evaluates `H̃(x) = H(x − (x_0, 0))`
/// on the translated disk `B̄_e`.
#[derive(Debug, Clone, Copy)]
pub struct TranslatedField<'a> {
    field: &'a HarmonicDiskField,
    x_0: f64,
}

impl<'a> TranslatedField<'a> {
    pub fn new(field: &'a HarmonicDiskField, x_0: f64) -> Self {
        TranslatedField { field, x_0 }
    }

    pub fn field(&self) -> &HarmonicDiskField {
        self.field
    }

    fn back(&self, x: CartesianPoint) -> CartesianPoint {
        CartesianPoint::new(x.x1 - self.x_0, x.x2)
    }

    pub fn eval(&self, x: CartesianPoint) -> Result<f64> {
        self.field.eval(self.back(x))
    }

    pub fn grad(&self, x: CartesianPoint) -> Result<Vec2> {
        self.field.grad(self.back(x))
    }

    pub fn value_and_grad(&self, x: CartesianPoint) -> Result<(f64, Vec2)> {
        self.field.value_and_grad(self.back(x))
    }
}
