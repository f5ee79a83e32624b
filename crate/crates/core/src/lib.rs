//! Multi-beam FMCW micro-Doppler classification core.
//!
//! Everything in this crate is allocation-only (`alloc`) and free of IO so it
//! can run on the host, inside a worker pool, or on an embedded target. The
//! processing chain is
//!
//! ```text
//! scene ──► raw cube (N×M) ──► beamform ──► reshape (P×Q) ──► range map
//!        ──► range gate ──► slow-time signal ──► spectrogram (F×T)
//!        ──► 2D-PCA projection (F×K) ×2 beams ──► fused feature ──► 1-NN
//! ```
//!
//! Angles follow the `cos θ` phase convention, so broadside is 90°.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod array;
pub mod classify;
pub mod dsp;
pub mod eigen;
mod error;
pub mod features;
pub mod fft;
pub mod math;
pub mod matrix;
pub mod scene;

pub use error::{Error, Result};
pub use matrix::Matrix;

/// Complex sample type used throughout the chain.
pub type Complex = num_complex::Complex64;

/// Class label attached to examples and features.
pub type Label = u32;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
