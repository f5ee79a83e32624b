//! Uniform linear array geometry, steering vectors and beamformer weights.
//!
//! Element `m` of the steering vector toward azimuth `θ` is
//! `exp(j·2π·(d/λ)·m·cos θ)`. With this `cos θ` convention the array axis is
//! at 0° and 180°, and **broadside is 90°** (many texts use `sin θ` with
//! broadside at 0°). All public angles are in degrees and must lie in
//! `[0, 180]`.

use alloc::vec::Vec;

use crate::error::domain;
use crate::math::{cis, cos_deg, TAU};
use crate::{Complex, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize, spacing_wavelengths: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(domain!("array needs at least one element"));
        }
        if !(spacing_wavelengths > 0.0 && spacing_wavelengths.is_finite()) {
            return Err(domain!(
                "element spacing must be positive, got {spacing_wavelengths} wavelengths"
            ));
        }
        Ok(Self {
            num_elements,
            spacing_wavelengths,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    /// Inter-element spacing `d/λ`.
    pub fn spacing_wavelengths(&self) -> f64 {
        self.spacing_wavelengths
    }
}

impl Default for ArrayGeometry {
    /// Four elements at half-wavelength spacing.
    fn default() -> Self {
        Self {
            num_elements: 4,
            spacing_wavelengths: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SteeringVector {
    elements: Vec<Complex>,
    angle_deg: f64,
}

impl SteeringVector {
    pub fn elements(&self) -> &[Complex] {
        &self.elements
    }

    pub fn angle_deg(&self) -> f64 {
        self.angle_deg
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamWeights {
    weights: Vec<Complex>,
    look_angle_deg: f64,
}

impl BeamWeights {
    /// Selects a single receive channel, i.e. processing without beamforming.
    ///
    /// An isolated element has no look direction; the nominal angle recorded
    /// is broadside.
    pub fn single_element(num_elements: usize, index: usize) -> Result<Self> {
        if index >= num_elements {
            return Err(domain!(
                "element {index} does not exist in a {num_elements}-element array"
            ));
        }
        let weights = (0..num_elements)
            .map(|m| Complex::new(if m == index { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Ok(Self {
            weights,
            look_angle_deg: 90.0,
        })
    }

    pub fn weights(&self) -> &[Complex] {
        &self.weights
    }

    pub fn look_angle_deg(&self) -> f64 {
        self.look_angle_deg
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

fn check_angle(theta_deg: f64) -> Result<()> {
    if (0.0..=180.0).contains(&theta_deg) {
        Ok(())
    } else {
        Err(domain!("azimuth {theta_deg}° outside [0°, 180°]"))
    }
}

pub fn steering_vector(geometry: &ArrayGeometry, theta_deg: f64) -> Result<SteeringVector> {
    check_angle(theta_deg)?;
    let increment = TAU * geometry.spacing_wavelengths * cos_deg(theta_deg);
    let elements = (0..geometry.num_elements)
        .map(|m| {
            if m == 0 {
                Complex::new(1.0, 0.0)
            } else {
                cis(increment * m as f64)
            }
        })
        .collect();
    Ok(SteeringVector {
        elements,
        angle_deg: theta_deg,
    })
}

/// Matched weights for `theta_deg`: the conjugated steering vector.
///
/// Weights are applied as a plain inner product per time sample,
/// `y[n] = Σ_m s[n, m]·w[m]`, so a unit plane wave from the look angle sums
/// coherently to a gain of exactly `M`.
pub fn beam_weights(geometry: &ArrayGeometry, theta_deg: f64) -> Result<BeamWeights> {
    let steering = steering_vector(geometry, theta_deg)?;
    Ok(BeamWeights {
        weights: steering.elements.iter().map(|a| a.conj()).collect(),
        look_angle_deg: theta_deg,
    })
}

/// Response of a beam steered to `look_deg` to a unit source at `source_deg`.
pub fn array_response(geometry: &ArrayGeometry, look_deg: f64, source_deg: f64) -> Result<Complex> {
    let weights = beam_weights(geometry, look_deg)?;
    let source = steering_vector(geometry, source_deg)?;
    Ok(weights
        .weights
        .iter()
        .zip(&source.elements)
        .map(|(w, a)| w * a)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn broadside_is_all_ones() {
        let g = ArrayGeometry::default();
        let a = steering_vector(&g, 90.0).unwrap();
        assert!(a.elements().iter().all(|&e| e == c(1.0, 0.0)));
        for m in [1, 3, 8] {
            for d in [0.25, 0.5, 1.7] {
                let g = ArrayGeometry::new(m, d).unwrap();
                let a = steering_vector(&g, 90.0).unwrap();
                assert!(a.elements().iter().all(|&e| e == c(1.0, 0.0)));
            }
        }
    }

    #[test]
    fn endfire_alternates() {
        let a = steering_vector(&ArrayGeometry::default(), 0.0).unwrap();
        let expected = [c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)];
        for (got, want) in a.elements().iter().zip(expected) {
            assert!(close(*got, want, 1e-12));
        }
    }

    #[test]
    fn sixty_degrees_quarter_turns() {
        // phase increment 2π·0.5·cos 60° = π/2, evaluated directly
        let a = steering_vector(&ArrayGeometry::default(), 60.0).unwrap();
        let direct: Vec<Complex> = (0..4)
            .map(|m| {
                let phase = TAU * 0.5 * libm::cos(60.0_f64.to_radians()) * m as f64;
                c(libm::cos(phase), libm::sin(phase))
            })
            .collect();
        let expected = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for m in 0..4 {
            assert!(close(a.elements()[m], expected[m], 1e-12));
            assert!(close(a.elements()[m], direct[m], 1e-12));
        }
    }

    #[test]
    fn angle_domain_checked() {
        let g = ArrayGeometry::default();
        assert!(matches!(steering_vector(&g, -0.1), Err(crate::Error::Domain(_))));
        assert!(matches!(beam_weights(&g, 180.5), Err(crate::Error::Domain(_))));
        assert!(array_response(&g, 90.0, f64::NAN).is_err());
        assert!(steering_vector(&g, 180.0).is_ok());
    }

    #[test]
    fn geometry_invariants() {
        assert!(ArrayGeometry::new(0, 0.5).is_err());
        assert!(ArrayGeometry::new(4, 0.0).is_err());
        assert!(ArrayGeometry::new(4, -1.0).is_err());
    }

    #[test]
    fn weights_are_conjugate_and_matched() {
        let g = ArrayGeometry::default();
        let w = beam_weights(&g, 90.0).unwrap();
        assert_eq!(w.weights(), &vec![c(1.0, 0.0); 4][..]);
        let w = beam_weights(&g, 37.0).unwrap();
        let a = steering_vector(&g, 37.0).unwrap();
        for (wi, ai) in w.weights().iter().zip(a.elements()) {
            assert_eq!(*wi, ai.conj());
        }
        let gain: Complex = w.weights().iter().zip(a.elements()).map(|(x, y)| x * y).sum();
        assert!(close(gain, c(4.0, 0.0), 1e-12));
    }

    #[test]
    fn broadside_beam_nulls_endfire() {
        // geometric-sum oracle: Σ_m exp(jmδ) = (1 − e^{jMδ}) / (1 − e^{jδ}), δ = π
        let delta = core::f64::consts::PI;
        let num = c(1.0, 0.0) - cis(4.0 * delta);
        let den = c(1.0, 0.0) - cis(delta);
        let oracle = num / den;
        let r = array_response(&ArrayGeometry::default(), 90.0, 0.0).unwrap();
        assert!(close(r, oracle, 1e-12));
        assert!(r.norm() < 1e-12);
    }

    #[test]
    fn response_at_look_is_m() {
        let g = ArrayGeometry::default();
        for look in [0.0, 33.0, 90.0, 151.0, 180.0] {
            assert!(close(array_response(&g, look, look).unwrap(), c(4.0, 0.0), 1e-12));
        }
    }

    #[test]
    fn single_element_selection() {
        let w = BeamWeights::single_element(4, 0).unwrap();
        assert_eq!(w.weights()[0], c(1.0, 0.0));
        assert!(w.weights()[1..].iter().all(|v| *v == c(0.0, 0.0)));
        assert!(BeamWeights::single_element(4, 4).is_err());
    }
}
