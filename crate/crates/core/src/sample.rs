use crate::bipolar::{BipolarPoint, CartesianPoint};
use crate::vec2::Vec2;

/// Which side of the inclusion boundary `∂D` a trace is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Limit from inside the inclusion (`ξ > ξ_i`).
    Inner,
    /// Limit from the shell (`ξ < ξ_i`).
    Outer,
}

/// Region of the transmission problem a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// The shell `Ω∖D̄`, `ξ_e ≤ ξ ≤ ξ_i`.
    Shell,
    /// The inclusion `D`, `ξ ≥ ξ_i`.
    Core,
}

impl Side {
    pub fn region(self) -> Region {
        match self {
            Side::Inner => Region::Core,
            Side::Outer => Region::Shell,
        }
    }
}

/// A field evaluation: the point in both coordinate systems, the value, and
/// the gradient in Cartesian and in `(e_ξ, e_θ)` components.
///
/// Series-based solvers report their truncation-tail estimate in
/// `tail_bound` and set `converged = false` when the term cap was reached
/// before the tail dropped below the requested tolerance.
#[derive(Debug, Clone, Copy)]
pub struct GradientSample {
    pub bipolar: BipolarPoint,
    pub cartesian: CartesianPoint,
    pub value: f64,
    pub grad: Vec2,
    pub grad_xi: f64,
    pub grad_theta: f64,
    pub tail_bound: f64,
    pub converged: bool,
}

impl GradientSample {
    /// Magnitude of the gradient.
    pub fn grad_norm(&self) -> f64 {
        self.grad.norm()
    }
}
