use alloc::vec::Vec;

use crate::error::domain;
use crate::math::{cos, TAU};
use crate::Result;

/// Tapering window applied to each STFT frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum WindowKind {
    Rectangular,
    #[default]
    Hamming,
    Hann,
    Blackman,
}

impl WindowKind {
    pub const ALL: [WindowKind; 4] = [
        WindowKind::Rectangular,
        WindowKind::Hamming,
        WindowKind::Hann,
        WindowKind::Blackman,
    ];

    /// Stable numeric id used in file headers.
    pub fn id(self) -> u32 {
        match self {
            WindowKind::Rectangular => 0,
            WindowKind::Hamming => 1,
            WindowKind::Hann => 2,
            WindowKind::Blackman => 3,
        }
    }

    pub fn from_id(id: u32) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.id() == id)
            .ok_or_else(|| domain!("unknown window id {id}"))
    }

    pub fn name(self) -> &'static str {
        match self {
            WindowKind::Rectangular => "rectangular",
            WindowKind::Hamming => "hamming",
            WindowKind::Hann => "hann",
            WindowKind::Blackman => "blackman",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|w| w.name() == name)
            .ok_or_else(|| domain!("unknown window '{name}'"))
    }

    /// Symmetric window of length `len`.
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        if len == 1 {
            return alloc::vec![1.0];
        }
        let denom = (len - 1) as f64;
        (0..len)
            .map(|m| {
                let x = TAU * m as f64 / denom;
                match self {
                    WindowKind::Rectangular => 1.0,
                    WindowKind::Hamming => 0.54 - 0.46 * cos(x),
                    WindowKind::Hann => 0.5 - 0.5 * cos(x),
                    WindowKind::Blackman => 0.42 - 0.5 * cos(x) + 0.08 * cos(2.0 * x),
                }
            })
            .collect()
    }
}
