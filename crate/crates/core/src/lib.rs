//! Solvers for the two-dimensional conductivity transmission problem on a
//! disk inclusion nearly touching the boundary of a disk domain.
//!
//! The domain is a disk `Ω` of radius `r_e` containing a disk inclusion `D`
//! of radius `r_i` with conductivity ratio `k`, separated from `∂Ω` by a gap
//! `ε`. The potential solves the Laplace equation in `D` and `Ω∖D̄` with a
//! flux jump of factor `k` across `∂D`, driven by mean-zero Neumann data `g`
//! or Dirichlet data `g_d` on `∂Ω`. As `ε → 0` together with a degenerating
//! contrast (`k → ∞` or `k → 0`) the field gradient blows up in the gap.
//!
//! The crate provides:
//!
//! * [`bipolar`] — the bipolar coordinate frame adapted to the two circles,
//!   with conversions, reflections, scale factor and local basis;
//! * [`boundary`] — trigonometric boundary data and its harmonic extension
//!   into the disk, plus the two blow-up drivers `(C₁, C₂)`;
//! * [`spectral`] — an exact mode-by-mode solver in bipolar coordinates,
//!   used as the reference oracle;
//! * [`reflection`] — the constructive solution by repeated reflections and
//!   the layer-potential density series;
//! * [`lerch`] — the Lerch transcendent `L(z;β)`, the kernel `P(z;β)` and
//!   the singular functions built from them;
//! * [`asymptotics`] — gradient blow-up approximations, image line charges
//!   and blow-up rate sweeps;
//! * [`quadrature`] — an adaptive Gauss–Kronrod rule used by the special
//!   functions and the image potentials.
//!
//! The library is `no_std` (with `alloc`); all floating point goes through
//! `libm`. IO, configuration and the command line live in the companion
//! `diskgap-cli` crate.
//!
//! Double precision is used throughout. Geometry derivation is accurate for
//! gaps `ε ≥ 1e-10`; below that the frame constants lose precision to
//! cancellation.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod bipolar;
pub mod boundary;
mod error;
pub mod lerch;
pub mod quadrature;
pub mod reflection;
mod sample;
pub mod spectral;
mod vec2;

pub use error::{Error, Result};
pub use sample::{GradientSample, Region, Side};
pub use vec2::Vec2;

/// Complex double, re-exported for callers of the special functions.
pub type Complex64 = num_complex::Complex<f64>;
