//! Spatial correlation of MIMO channels in general scattering environments.
//!
//! The channel between compact transmit and receive apertures is decomposed
//! into deterministic configuration matrices (antenna geometry sampled
//! through circular-harmonic spatial-to-mode functions) and a random
//! scattering matrix whose second-order statistics are the 2-D Fourier
//! coefficients of a bi-angular power spectral density over departure and
//! arrival angles. The crate builds those modal correlation matrices in
//! closed form and by quadrature, forms the full channel correlation, its
//! separable (Kronecker) approximation from the marginal spectra, and
//! estimates ergodic mutual information by seeded Monte Carlo.
//!
//! Modules follow the pipeline: [`geometry`] -> [`smf`] -> [`psd`] ->
//! [`correlation`] -> [`capacity`], with [`cli`] driving scenario files
//! end to end. [`bessel`] and [`quadrature`] are the numerical kernels
//! underneath.

pub mod bessel;
pub mod capacity;
pub mod cli;
pub mod correlation;
mod error;
pub mod geometry;
pub mod psd;
pub mod quadrature;
pub mod smf;

pub use error::{Error, Result};
