//! Spatial-to-mode functions and configuration matrices.
//!
//! In a 2-D (azimuth-only) scattering environment the coupling of an antenna
//! at polar position `(r, φ)` to the n-th circular harmonic of its
//! scatterer-free region is
//!
//! ```text
//! 𝒥_n(r, φ) = J_n(2π r) · exp(i n (φ - π/2))
//! ```
//!
//! with `r` in wavelengths and `J_n` the Bessel function of the first kind.
//! Stacking these over the antennas of an array and the mode window
//! `-M..=M` gives the deterministic configuration matrix of that array.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bessel::bessel_j_sequence;
use crate::geometry::{AntennaPosition, ArrayGeometry};

/// Which end of the link a configuration matrix describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Transmitter,
    Receiver,
}

/// Spatial-to-mode function of integer order `n`.
pub fn smf(n: i64, position: &AntennaPosition) -> Complex64 {
    let x = 2.0 * std::f64::consts::PI * position.radius();
    let na = n.unsigned_abs() as usize;
    let mut j = bessel_j_sequence(na, x)[na];
    if n < 0 && n % 2 != 0 {
        j = -j;
    }
    j * Complex64::from_polar(
        1.0,
        n as f64 * (position.azimuth() - std::f64::consts::FRAC_PI_2),
    )
}

/// Antennas-by-modes matrix of SMF values for one array.
///
/// Row `r` holds antenna `r`; column `j` holds mode order `j - M`, so the
/// columns run over `-M..=M` left to right.
#[derive(Debug, Clone)]
pub struct ConfigurationMatrix {
    entries: DMatrix<Complex64>,
    mode_half_width: usize,
    side: Side,
}

impl ConfigurationMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Mode half-width M; the matrix has `2M + 1` columns.
    pub fn mode_half_width(&self) -> usize {
        self.mode_half_width
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn antennas(&self) -> usize {
        self.entries.nrows()
    }

    pub fn modes(&self) -> usize {
        self.entries.ncols()
    }
}

/// Build the configuration matrix of `geometry` for mode half-width `m`.
pub fn configuration_matrix(geometry: &ArrayGeometry, m: usize, side: Side) -> ConfigurationMatrix {
    let n = geometry.len();
    let cols = 2 * m + 1;
    let mut entries = DMatrix::zeros(n, cols);
    for (r, pos) in geometry.positions().iter().enumerate() {
        let x = 2.0 * std::f64::consts::PI * pos.radius();
        let j_seq = bessel_j_sequence(m, x);
        for col in 0..cols {
            let order = col as i64 - m as i64;
            let na = order.unsigned_abs() as usize;
            let mut j = j_seq[na];
            if order < 0 && order % 2 != 0 {
                j = -j;
            }
            entries[(r, col)] = j * Complex64::from_polar(
                1.0,
                order as f64 * (pos.azimuth() - std::f64::consts::FRAC_PI_2),
            );
        }
    }
    ConfigurationMatrix {
        entries,
        mode_half_width: m,
        side,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::uniform_circular_array;
    use std::f64::consts::{FRAC_PI_2, PI};

    const J0_PI: f64 = -0.30424217764409380; // J_0(π), 40-digit reference
    const J2_PI: f64 = 0.48543393263150912; // J_2(π)

    fn pos(r: f64, az: f64) -> AntennaPosition {
        AntennaPosition::new(r, az).unwrap()
    }

    #[test]
    fn smf_at_origin() {
        for az in [0.0, 1.0, -2.5] {
            let p = pos(0.0, az);
            assert_eq!(smf(0, &p), Complex64::new(1.0, 0.0));
            assert_eq!(smf(1, &p).norm(), 0.0);
            assert_eq!(smf(-3, &p).norm(), 0.0);
        }
    }

    #[test]
    fn smf_order_two_half_wavelength() {
        // radius 0.5λ at azimuth π/2: phase factor is exp(i·2·0) = 1
        let v = smf(2, &pos(0.5, FRAC_PI_2));
        assert!((v.re - J2_PI).abs() < 1e-12, "{v}");
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn smf_conjugate_order_symmetry() {
        // smf(-n, w) = (-1)^n conj(smf(n, w))
        for &(n, r, az) in &[
            (1i64, 0.3, 0.4),
            (2, 0.5, -1.0),
            (5, 0.9, 2.8),
            (4, 1.4, 0.0),
        ] {
            let p = pos(r, az);
            let plus = smf(n, &p);
            let minus = smf(-n, &p);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((minus - sign * plus.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn smf_magnitude_ignores_azimuth() {
        for n in -4i64..=4 {
            let a = smf(n, &pos(0.7, 0.3)).norm();
            let b = smf(n, &pos(0.7, -2.1)).norm();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn configuration_matrix_single_antenna_origin() {
        let g = ArrayGeometry::new(vec![pos(0.0, 0.0)], 0.0).unwrap();
        let c = configuration_matrix(&g, 1, Side::Transmitter);
        assert_eq!(c.entries().shape(), (1, 3));
        assert_eq!(c.entries()[(0, 0)].norm(), 0.0);
        assert_eq!(c.entries()[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(c.entries()[(0, 2)].norm(), 0.0);
    }

    #[test]
    fn configuration_matrix_uca_center_column() {
        let g = uniform_circular_array(3, 0.5).unwrap();
        let c = configuration_matrix(&g, 5, Side::Receiver);
        assert_eq!(c.entries().shape(), (3, 11));
        // column 5 is mode 0: J_0(π) for every element
        let v = c.entries()[(0, 5)];
        assert!((v.re - J0_PI).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
        assert_eq!(c.mode_half_width(), 5);
        assert_eq!(c.side(), Side::Receiver);
    }

    #[test]
    fn configuration_matrix_zero_mode_window() {
        let g = uniform_circular_array(4, 0.25).unwrap();
        let c = configuration_matrix(&g, 0, Side::Transmitter);
        assert_eq!(c.entries().shape(), (4, 1));
        for r in 0..4 {
            let want = crate::bessel::bessel_j(0, 2.0 * PI * 0.25);
            assert!((c.entries()[(r, 0)].re - want).abs() < 1e-15);
            assert!(c.entries()[(r, 0)].im.abs() < 1e-15);
        }
    }

    #[test]
    fn configuration_matrix_matches_pointwise_smf() {
        let g = uniform_circular_array(3, 0.4).unwrap();
        let c = configuration_matrix(&g, 3, Side::Transmitter);
        for (r, p) in g.positions().iter().enumerate() {
            for col in 0..7 {
                let order = col as i64 - 3;
                assert!((c.entries()[(r, col)] - smf(order, p)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gram_products_are_hermitian_psd() {
        // J̄_T J_Tᵀ and J_R J_Rᴴ feed the i.i.d. special case downstream and
        // must be Hermitian positive semidefinite.
        let g = uniform_circular_array(3, 0.5).unwrap();
        let jt = configuration_matrix(&g, 5, Side::Transmitter);
        let jr = configuration_matrix(&g, 5, Side::Receiver);
        let gt = jt.entries().conjugate() * jt.entries().transpose();
        let gr = jr.entries() * jr.entries().adjoint();
        for m in [gt, gr] {
            let herm_dev = (&m - m.adjoint()).norm();
            assert!(herm_dev < 1e-12);
            let eig = m.symmetric_eigen();
            for ev in eig.eigenvalues.iter() {
                assert!(*ev > -1e-12, "eigenvalue {ev}");
            }
        }
    }
}
