//! Bipolar coordinate frame adapted to the translated disk pair.
//!
//! The physical domain is the disk `Ω` of radius `r_e` centered at
//! `(r_e, 0)` with the inclusion `D` of radius `r_i` centered at
//! `(r_i + ε, 0)`. Both are translated by `x_0` so that the pair becomes
//! the level circles `{ξ = ξ_e}` (boundary of `B_e`) and `{ξ = ξ_i}`
//! (boundary of `B_i`) of the bipolar chart
//!
//! ```text
//! e^{ξ + iθ} = (α + z)/(α − z),    z = x₁ + i x₂,
//! ```
//!
//! whose poles sit at `(±α, 0)`. The gap `ε` enters only through `α`; the
//! inclusion is the region `ξ > ξ_i` (the pole `(α, 0)` lies inside it) and
//! the shell `Ω∖D̄` is `ξ_e < ξ < ξ_i`.

#[allow(unused_imports)] // resolves f64 methods in no_std builds
use num_traits::Float;

use crate::error::{Error, Result};
use crate::vec2::Vec2;
use crate::Complex64;

const PI: f64 = core::f64::consts::PI;

/// Normalizes an angle into `(−π, π]`, mapping `−π` to `+π`.
pub(crate) fn normalize_theta(theta: f64) -> f64 {
    let r = (PI - theta) % (2.0 * PI);
    let r = if r < 0.0 { r + 2.0 * PI } else { r };
    PI - r
}

/// The three primitive lengths of the problem: inclusion radius,
/// outer radius and boundary gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPairGeometry {
    r_i: f64,
    r_e: f64,
    eps: f64,
}

impl DiskPairGeometry {
    /// Validates `0 < r_i < r_e` and `0 < ε < r_e − r_i`.
    ///
    /// The upper bound on `ε` keeps the disks non-concentric with the
    /// inclusion strictly inside; at `ε = r_e − r_i` the center formulas
    /// divide by zero and the bipolar poles disappear.
    pub fn new(r_i: f64, r_e: f64, eps: f64) -> Result<Self> {
        if !(r_i.is_finite() && r_e.is_finite() && eps.is_finite()) {
            return Err(Error::Domain("geometry parameters must be finite"));
        }
        if !(r_i > 0.0 && r_e > r_i) {
            return Err(Error::Domain("radii must satisfy 0 < r_i < r_e"));
        }
        if !(eps > 0.0 && eps < r_e - r_i) {
            return Err(Error::Domain("gap must satisfy 0 < eps < r_e - r_i"));
        }
        Ok(DiskPairGeometry { r_i, r_e, eps })
    }

    pub fn r_i(&self) -> f64 {
        self.r_i
    }

    pub fn r_e(&self) -> f64 {
        self.r_e
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// Derived geometric constants of the bipolar frame.
///
/// `c_i` and `c_e` are the centers of the translated disks `B_i`, `B_e`,
/// `x_0` is the translation, `ξ_i > ξ_e > 0` are the level values of the two
/// circles and `r_* = √(2 r_i r_e/(r_e − r_i))` is the scale entering
/// `α = r_* √ε + O(ε^{3/2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipolarFrame {
    geom: DiskPairGeometry,
    alpha: f64,
    c_i: f64,
    c_e: f64,
    x_0: f64,
    xi_i: f64,
    xi_e: f64,
    xi_gap: f64,
    r_star: f64,
}

impl BipolarFrame {
    /// Builds the frame from a validated geometry.
    pub fn from_geometry(geom: DiskPairGeometry) -> Self {
        let (r_i, r_e, eps) = (geom.r_i, geom.r_e, geom.eps);
        let d = r_e - r_i - eps;
        let c_i = (r_e * r_e - r_i * r_i - d * d) / (2.0 * d);
        let c_e = c_i + d;
        let x_0 = c_e - r_e;
        let alpha = (eps * (2.0 * r_i + eps) * (2.0 * r_e - eps) * (2.0 * r_e - 2.0 * r_i - eps))
            .sqrt()
            / (2.0 * d);
        // Written as a difference of logs so that ln((c−α)/(c+α)) cancels
        // exactly against ξ in downstream exponentials.
        let xi_i = 0.5 * ((c_i + alpha).ln() - (c_i - alpha).ln());
        let xi_e = 0.5 * ((c_e + alpha).ln() - (c_e - alpha).ln());
        // ξ_i − ξ_e in one expression; the gap is the critical O(√ε)
        // parameter and the individual ξ values nearly cancel at small ε.
        let xi_gap = (alpha * (c_e - c_i) / (c_i * c_e - alpha * alpha)).atanh();
        let r_star = (2.0 * r_i * r_e / (r_e - r_i)).sqrt();
        BipolarFrame {
            geom,
            alpha,
            c_i,
            c_e,
            x_0,
            xi_i,
            xi_e,
            xi_gap,
            r_star,
        }
    }

    /// Convenience constructor from the raw lengths.
    pub fn derive(r_i: f64, r_e: f64, eps: f64) -> Result<Self> {
        Ok(Self::from_geometry(DiskPairGeometry::new(r_i, r_e, eps)?))
    }

    pub fn geometry(&self) -> &DiskPairGeometry {
        &self.geom
    }

    /// Pole half-distance `α`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Center of the translated inclusion `B_i`.
    pub fn c_i(&self) -> f64 {
        self.c_i
    }

    /// Center of the translated outer disk `B_e`.
    pub fn c_e(&self) -> f64 {
        self.c_e
    }

    /// Translation distance between the physical and the bipolar-adapted
    /// configuration.
    pub fn x_0(&self) -> f64 {
        self.x_0
    }

    /// Level value of `∂B_i`.
    pub fn xi_i(&self) -> f64 {
        self.xi_i
    }

    /// Level value of `∂B_e`.
    pub fn xi_e(&self) -> f64 {
        self.xi_e
    }

    /// The gap `ξ_i − ξ_e`, evaluated cancellation-free.
    pub fn xi_gap(&self) -> f64 {
        self.xi_gap
    }

    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    /// Unit complex factor `e^{−ξ−iθ}` or `e^{ξ+iθ}`, whichever has modulus
    /// at most one. `dz/dξ = 2α m/(1+m)²` is invariant under `m ↦ 1/m`, so
    /// all chart derivatives can be formed from the non-overflowing branch.
    #[inline]
    fn chart_factor(p: BipolarPoint) -> Complex64 {
        if p.xi >= 0.0 {
            Complex64::from_polar((-p.xi).exp(), -p.theta)
        } else {
            Complex64::from_polar(p.xi.exp(), p.theta)
        }
    }

    /// Maps bipolar coordinates to the plane,
    /// `z = α (e^{ξ+iθ} − 1)/(e^{ξ+iθ} + 1)`.
    pub fn to_cartesian(&self, p: BipolarPoint) -> Result<CartesianPoint> {
        if p.xi == 0.0 && p.theta == PI {
            return Err(Error::SingularPoint);
        }
        let z = if p.xi >= 0.0 {
            let m = Self::chart_factor(p);
            (Complex64::new(1.0, 0.0) - m) / (Complex64::new(1.0, 0.0) + m) * self.alpha
        } else {
            let m = Self::chart_factor(p);
            (m - Complex64::new(1.0, 0.0)) / (m + Complex64::new(1.0, 0.0)) * self.alpha
        };
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::SingularPoint);
        }
        Ok(CartesianPoint::new(z.re, z.im))
    }

    /// Inverts the chart; `θ` lands in `(−π, π]`. The poles `(±α, 0)` have
    /// no finite coordinates and are rejected.
    pub fn to_bipolar(&self, x: CartesianPoint) -> Result<BipolarPoint> {
        if !x.is_finite() {
            return Err(Error::Domain("point has non-finite components"));
        }
        let num = Complex64::new(self.alpha + x.x1, x.x2);
        let den = Complex64::new(self.alpha - x.x1, -x.x2);
        let (nsq, dsq) = (num.norm_sqr(), den.norm_sqr());
        if dsq == 0.0 || nsq == 0.0 {
            return Err(Error::Pole);
        }
        let xi = 0.5 * (nsq / dsq).ln();
        if !xi.is_finite() {
            return Err(Error::Pole);
        }
        let t = num * den.conj();
        let theta = normalize_theta(t.im.atan2(t.re));
        Ok(BipolarPoint::new(xi, theta))
    }

    /// Metric scale factor `h(ξ, θ) = (cosh ξ + cos θ)/α`.
    ///
    /// Both coordinate tangents have length `1/h`, and gradients convert by
    /// `∇f = h (∂_ξ f · e_ξ + ∂_θ f · e_θ)`.
    pub fn scale_factor(&self, p: BipolarPoint) -> Result<f64> {
        let den = p.xi.cosh() + p.theta.cos();
        if den <= 0.0 || (p.xi == 0.0 && p.theta == PI) {
            return Err(Error::SingularPoint);
        }
        Ok(den / self.alpha)
    }

    /// Reflection across the level circle `{ξ = ξ₀}`, `ξ₀ ≠ 0`:
    /// `(ξ, θ) ↦ (2ξ₀ − ξ, θ)`.
    ///
    /// Coincides with the Euclidean inversion `c + r²(x−c)/|x−c|²` of that
    /// circle. The circle center `(2ξ₀, π)` maps to the point at infinity
    /// and is rejected.
    pub fn reflect_level(&self, xi_0: f64, p: BipolarPoint) -> Result<BipolarPoint> {
        if xi_0 == 0.0 || !xi_0.is_finite() {
            return Err(Error::Domain("level curve xi = 0 is a line, not a circle"));
        }
        if p.xi == 2.0 * xi_0 && p.theta == PI {
            return Err(Error::Domain(
                "reflection maps the circle center to the point at infinity",
            ));
        }
        Ok(BipolarPoint::new(2.0 * xi_0 - p.xi, p.theta))
    }

    /// Orthonormal basis `(e_ξ, e_θ)` with `e_ξ` along `∇ξ` and
    /// `e_θ = e_ξ` rotated by +90°.
    ///
    /// On a circle `{ξ = ξ₀}` with `ξ₀ > 0` the outward unit normal is
    /// `ν = −e_ξ`.
    pub fn basis_vectors(&self, p: BipolarPoint) -> Result<(Vec2, Vec2)> {
        if p.xi == 0.0 && p.theta == PI {
            return Err(Error::SingularPoint);
        }
        let m = Self::chart_factor(p);
        let one = Complex64::new(1.0, 0.0);
        let d = m / ((one + m) * (one + m));
        let n = d.norm();
        let e_xi = if n.is_finite() && n > 0.0 {
            Vec2::new(d.re / n, d.im / n)
        } else if n == 0.0 && p.xi != 0.0 {
            // |m| underflowed; the direction limit of m/(1+m)² is m itself.
            if p.xi > 0.0 {
                Vec2::new(p.theta.cos(), -p.theta.sin())
            } else {
                Vec2::new(p.theta.cos(), p.theta.sin())
            }
        } else {
            return Err(Error::SingularPoint);
        };
        Ok((e_xi, e_xi.rot90()))
    }
}

/// A point in bipolar coordinates; `θ` normalized into `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipolarPoint {
    xi: f64,
    theta: f64,
}

impl BipolarPoint {
    pub fn new(xi: f64, theta: f64) -> Self {
        BipolarPoint {
            xi,
            theta: normalize_theta(theta),
        }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// A point in Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartesianPoint {
    pub x1: f64,
    pub x2: f64,
}

impl CartesianPoint {
    pub fn new(x1: f64, x2: f64) -> Self {
        CartesianPoint { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub(crate) fn to_vec(self) -> Vec2 {
        Vec2::new(self.x1, self.x2)
    }
}
