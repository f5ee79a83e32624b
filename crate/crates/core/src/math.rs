//! Thin wrappers over `libm` so results do not depend on whether `std` is
//! linked into the final binary.

use crate::Complex;

pub use core::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

/// `exp(j·phase)`.
#[inline]
pub fn cis(phase: f64) -> Complex {
    let (s, c) = libm::sincos(phase);
    Complex::new(c, s)
}

/// Cosine of an angle in degrees, exact at 90°.
///
/// Evaluated as `sin(90° − θ)` so that broadside yields exactly zero.
#[inline]
pub fn cos_deg(theta_deg: f64) -> f64 {
    libm::sin((90.0 - theta_deg) * PI / 180.0)
}
