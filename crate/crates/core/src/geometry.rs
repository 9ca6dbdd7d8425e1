//! Antenna array geometry.
//!
//! Lengths are expressed in wavelengths throughout, so a position at radius
//! `r` sits at electrical distance `k·r·λ = 2π·r` from the aperture origin
//! and no separate carrier wavelength is carried around.

use crate::{Error, Result};

/// Reduce an angle into `[-π, π)`.
pub fn wrap_to_pi(x: f64) -> f64 {
    use std::f64::consts::PI;
    let w = x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor();
    // Guard the upper edge against rounding in the floor argument.
    if w >= PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Polar antenna position relative to the aperture origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPosition {
    radius: f64,
    azimuth: f64,
}

impl AntennaPosition {
    pub fn new(radius: f64, azimuth: f64) -> Result<Self> {
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "antenna radius must be finite and >= 0, got {radius}"
            )));
        }
        if !azimuth.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "antenna azimuth must be finite, got {azimuth}"
            )));
        }
        Ok(Self {
            radius,
            azimuth: wrap_to_pi(azimuth),
        })
    }

    /// Distance from the aperture origin, in wavelengths.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Azimuth in `[-π, π)`.
    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }
}

/// An ordered antenna array together with the radius of the disc that
/// encloses it (the aperture radius used for mode truncation).
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<AntennaPosition>,
    aperture_radius: f64,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<AntennaPosition>, aperture_radius: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidArgument(
                "array must contain at least one antenna".into(),
            ));
        }
        let max_r = positions.iter().map(|p| p.radius).fold(0.0, f64::max);
        if !aperture_radius.is_finite() || aperture_radius < max_r {
            return Err(Error::InvalidArgument(format!(
                "aperture radius {aperture_radius} does not contain all antennas (max element radius {max_r})"
            )));
        }
        Ok(Self {
            positions,
            aperture_radius,
        })
    }

    pub fn positions(&self) -> &[AntennaPosition] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn aperture_radius(&self) -> f64 {
        self.aperture_radius
    }

    /// Mode half-width for this aperture; see [`mode_count`].
    pub fn mode_count(&self) -> usize {
        mode_count(self.aperture_radius).expect("aperture radius validated at construction")
    }
}

/// `n` antennas equally spaced on a ring, first element at azimuth 0.
/// The aperture radius equals the ring radius.
pub fn uniform_circular_array(n: usize, ring_radius: f64) -> Result<ArrayGeometry> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "uniform circular array needs n >= 1 elements".into(),
        ));
    }
    let positions = (0..n)
        .map(|j| {
            AntennaPosition::new(
                ring_radius,
                2.0 * std::f64::consts::PI * j as f64 / n as f64,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    ArrayGeometry::new(positions, ring_radius)
}

/// Half-width M of the effective mode window for an aperture of the given
/// radius (in wavelengths): `M = ⌈π e r⌉`, so an aperture carries `2M + 1`
/// effective modes.
pub fn mode_count(aperture_radius: f64) -> Result<usize> {
    if !aperture_radius.is_finite() || aperture_radius < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "aperture radius must be finite and >= 0, got {aperture_radius}"
        )));
    }
    Ok((std::f64::consts::PI * std::f64::consts::E * aperture_radius).ceil() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mode_count_examples() {
        assert_eq!(mode_count(0.5).unwrap(), 5); // 11 effective modes
        assert_eq!(mode_count(0.0).unwrap(), 0); // point aperture, 1 mode
        assert_eq!(mode_count(1.0).unwrap(), 9); // ceil(pi*e) = 9
        assert!(mode_count(-0.1).is_err());
    }

    #[test]
    fn mode_count_monotone_in_radius() {
        let mut prev = 0;
        for i in 0..200 {
            let r = i as f64 * 0.025;
            let m = mode_count(r).unwrap();
            assert!(m >= prev, "mode count decreased at r={r}");
            prev = m;
        }
    }

    #[test]
    fn uca_single_element() {
        let g = uniform_circular_array(1, 0.5).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.positions()[0].radius(), 0.5);
        assert_eq!(g.positions()[0].azimuth(), 0.0);
        assert_eq!(g.aperture_radius(), 0.5);
    }

    #[test]
    fn uca_three_elements() {
        let g = uniform_circular_array(3, 0.5).unwrap();
        let want = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];
        for (p, &w) in g.positions().iter().zip(&want) {
            assert_eq!(p.radius(), 0.5);
            assert!(wrap_to_pi(p.azimuth() - w).abs() < 1e-15);
        }
        assert_eq!(g.aperture_radius(), 0.5);
    }

    #[test]
    fn uca_four_elements() {
        let g = uniform_circular_array(4, 0.25).unwrap();
        let want = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (p, &w) in g.positions().iter().zip(&want) {
            assert_eq!(p.radius(), 0.25);
            assert!(wrap_to_pi(p.azimuth() - w).abs() < 1e-15);
        }
    }

    #[test]
    fn uca_zero_elements_rejected() {
        assert!(uniform_circular_array(0, 0.5).is_err());
    }

    #[test]
    fn uca_rotationally_uniform() {
        // Consecutive azimuth increments are all 2π/n: the constructor output
        // is invariant under index rotation up to a global azimuth shift.
        for n in 2..8 {
            let g = uniform_circular_array(n, 0.3).unwrap();
            let step = 2.0 * PI / n as f64;
            for w in g.positions().windows(2) {
                let d = wrap_to_pi(w[1].azimuth() - w[0].azimuth() - step);
                assert!(d.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn aperture_containment_enforced() {
        let p = vec![AntennaPosition::new(0.5, 0.0).unwrap()];
        assert!(ArrayGeometry::new(p.clone(), 0.4).is_err());
        assert!(ArrayGeometry::new(p, 0.5).is_ok());
    }

    #[test]
    fn azimuth_is_normalized() {
        let p = AntennaPosition::new(1.0, 3.0 * PI).unwrap();
        assert!(p.azimuth() >= -PI && p.azimuth() < PI);
        assert!((p.azimuth() - wrap_to_pi(3.0 * PI)).abs() < 1e-15);
        let q = AntennaPosition::new(1.0, -PI).unwrap();
        assert_eq!(q.azimuth(), -PI);
    }

    #[test]
    fn duplicate_positions_permitted() {
        // Coincident antennas are allowed; the resulting rank-deficient
        // correlation is handled downstream by the PSD square root.
        let p = AntennaPosition::new(0.2, 1.0).unwrap();
        let g = ArrayGeometry::new(vec![p, p], 0.2).unwrap();
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn wrap_to_pi_range() {
        for i in -100..100 {
            let x = i as f64 * 0.37;
            let w = wrap_to_pi(x);
            assert!((-PI..PI).contains(&w), "wrap({x}) = {w}");
            assert!(((x - w) / (2.0 * PI)).rem_euclid(1.0) < 1e-9);
        }
    }
}
