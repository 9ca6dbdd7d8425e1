//! Bi-angular power spectral densities over departure and arrival azimuth.
//!
//! A PSD `G(φ, φᵣ)` describes how scattering power couples departure angles
//! at the transmit aperture to arrival angles at the receive aperture. It is
//! normalized to unit total power over `[-π, π)²`. Three uni-modal families
//! are provided, each parameterized by mean angles, per-side spreads and the
//! angle covariance `rho` that controls non-separability:
//!
//! * uniform-limited (Morgenstern family):
//!   `1/(4 Δt Δr) - rho (φ-φ₀)(φᵣ-φᵣ₀) / (4 Δt² Δr²)` on its support box;
//! * truncated Gaussian: `Ω_G exp(-Q / (2 (1-rho²)))`;
//! * truncated Laplacian: `Ω_L K₀(√(Q / (1-rho²)))`,
//!
//! with `Q` the standard elliptical quadratic form in the wrapped offsets.
//! The Gaussian and Laplacian normalization constants are computed by
//! adaptive tensor quadrature at construction. Finite mixtures of uni-modal
//! members model multi-cluster environments, and [`BiAngularPsd::kronecker_psd`]
//! forms the separable product of the two marginal spectra.
//!
//! Angle arguments are reduced modulo 2π into `[-π, π)` everywhere, so
//! supports may wrap across ±π.

use crate::bessel::bessel_k0;
use crate::geometry::wrap_to_pi;
use crate::quadrature::{
    integrate_2d, scale_ladder, AxisRule, BASE_PANELS, GL_ORDER, MAX_REFINE_LEVEL, REFINE_TOL,
};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Mass below which a distribution is reported as degenerate.
pub const DEGENERATE_MASS: f64 = 1e-12;

/// Uni-modal PSD families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    UniformLimited,
    Gaussian,
    Laplacian,
}

/// Which angular axis of the joint PSD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Departure,
    Arrival,
}

/// Parameters of a uni-modal bi-angular PSD. Angles and spreads are in
/// radians; `spread_t`/`spread_r` are `Δ` half-widths for the
/// uniform-limited family and `σ` standard deviations otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdParams {
    pub mean_departure: f64,
    pub mean_arrival: f64,
    pub spread_t: f64,
    pub spread_r: f64,
    pub rho: f64,
}

impl PsdParams {
    fn validate(&self, family: Family) -> Result<()> {
        for (name, v) in [
            ("mean_departure", self.mean_departure),
            ("mean_arrival", self.mean_arrival),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        for (name, v) in [("spread_t", self.spread_t), ("spread_r", self.spread_r)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
            if family == Family::UniformLimited && v > PI {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be <= pi for the uniform-limited family, got {v}"
                )));
            }
        }
        if !self.rho.is_finite() || self.rho.abs() > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "rho must be in [-1, 1], got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

/// A validated, normalized uni-modal component.
#[derive(Debug, Clone)]
pub(crate) struct Component {
    family: Family,
    params: PsdParams,
    /// Multiplies the raw kernel so the truncated density integrates to 1.
    norm: f64,
}

impl Component {
    fn new(family: Family, params: PsdParams) -> Result<Self> {
        params.validate(family)?;
        match family {
            Family::UniformLimited => Ok(Self {
                family,
                params,
                // The kernel carries the analytic 1/(4 Δt Δr) constant and
                // the rho term integrates to zero, so the mass is exactly 1.
                norm: 1.0,
            }),
            Family::Gaussian | Family::Laplacian => {
                if 1.0 - params.rho * params.rho < 1e-12 {
                    return Err(Error::DegenerateDistribution(format!(
                        "rho = {} collapses the {family:?} density onto a line",
                        params.rho
                    )));
                }
                let mut draft = Self {
                    family,
                    params,
                    norm: 1.0,
                };
                let mass = draft.raw_mass()?;
                if mass < DEGENERATE_MASS {
                    return Err(Error::DegenerateDistribution(format!(
                        "unnormalized mass {mass:e} below {DEGENERATE_MASS:e} for {family:?} with spreads ({}, {})",
                        params.spread_t, params.spread_r
                    )));
                }
                draft.norm = 1.0 / mass;
                Ok(draft)
            }
        }
    }

    pub(crate) fn family(&self) -> Family {
        self.family
    }

    pub(crate) fn params(&self) -> &PsdParams {
        &self.params
    }

    /// Raw (unnormalized) kernel in wrapped offsets from the means.
    fn kernel(&self, u: f64, v: f64) -> f64 {
        let p = &self.params;
        match self.family {
            Family::UniformLimited => {
                if u.abs() <= p.spread_t && v.abs() <= p.spread_r {
                    1.0 / (4.0 * p.spread_t * p.spread_r)
                        - p.rho * u * v / (4.0 * p.spread_t.powi(2) * p.spread_r.powi(2))
                } else {
                    0.0
                }
            }
            Family::Gaussian => {
                let a = u / p.spread_t;
                let b = v / p.spread_r;
                let q = (a * a - 2.0 * p.rho * a * b + b * b).max(0.0);
                (-q / (2.0 * (1.0 - p.rho * p.rho))).exp()
            }
            Family::Laplacian => {
                let a = u / p.spread_t;
                let b = v / p.spread_r;
                let q = (a * a - 2.0 * p.rho * a * b + b * b).max(0.0);
                bessel_k0((q / (1.0 - p.rho * p.rho)).sqrt())
            }
        }
    }

    /// Normalized density at wrapped offsets from the means.
    pub(crate) fn density_centered(&self, u: f64, v: f64) -> f64 {
        self.norm * self.kernel(u, v)
    }

    pub(crate) fn density(&self, phi: f64, phi_r: f64) -> f64 {
        self.density_centered(
            wrap_to_pi(phi - self.params.mean_departure),
            wrap_to_pi(phi_r - self.params.mean_arrival),
        )
    }

    /// Quadrature breakpoints (centered coordinates) that resolve this
    /// kernel along one axis: support edges, a dyadic ladder on the peak
    /// scale and, for the Laplacian, grading into the log singularity.
    fn centered_breaks(&self, axis: Axis) -> Vec<f64> {
        let spread = match axis {
            Axis::Departure => self.params.spread_t,
            Axis::Arrival => self.params.spread_r,
        };
        match self.family {
            Family::UniformLimited => vec![-spread, 0.0, spread],
            Family::Gaussian => scale_ladder(0.0, spread, PI, 2),
            Family::Laplacian => scale_ladder(0.0, spread, PI, 22),
        }
    }

    /// Breakpoints in absolute angle (wrapped), including the antipode of
    /// the mean where the wrapped kernel meets itself.
    fn axis_breakpoints(&self, axis: Axis) -> Vec<f64> {
        let mean = match axis {
            Axis::Departure => self.params.mean_departure,
            Axis::Arrival => self.params.mean_arrival,
        };
        let mut pts: Vec<f64> = self
            .centered_breaks(axis)
            .into_iter()
            .map(|d| wrap_to_pi(mean + d))
            .collect();
        pts.push(wrap_to_pi(mean + PI));
        pts
    }

    /// Integral of the raw kernel over the wrapped square, refined until two
    /// successive panel doublings agree.
    fn raw_mass(&self) -> Result<f64> {
        let bt = self.centered_breaks(Axis::Departure);
        let br = self.centered_breaks(Axis::Arrival);
        let mut prev: Option<f64> = None;
        for level in 0..=MAX_REFINE_LEVEL {
            let ru = AxisRule::graded(-PI, PI, BASE_PANELS << level, &bt, GL_ORDER);
            let rv = AxisRule::graded(-PI, PI, BASE_PANELS << level, &br, GL_ORDER);
            let mass = integrate_2d(|u, v| self.kernel(u, v), &ru, &rv);
            if let Some(p) = prev {
                if (mass - p).abs() < REFINE_TOL {
                    return Ok(mass);
                }
            }
            prev = Some(mass);
        }
        Err(Error::NumericalFailure(format!(
            "normalization quadrature for {:?} did not converge below {REFINE_TOL:e}",
            self.family
        )))
    }

    fn marginal(&self, axis: Axis) -> Marginal {
        match self.family {
            Family::UniformLimited => {
                let (center, half_width) = match axis {
                    Axis::Departure => (self.params.mean_departure, self.params.spread_t),
                    Axis::Arrival => (self.params.mean_arrival, self.params.spread_r),
                };
                Marginal {
                    repr: MarginalRepr::Uniform {
                        center: wrap_to_pi(center),
                        half_width,
                    },
                }
            }
            Family::Gaussian | Family::Laplacian => Marginal {
                repr: MarginalRepr::Slice {
                    component: self.clone(),
                    axis,
                },
            },
        }
    }
}

/// A univariate angular power density, normalized to unit mass on `[-π, π)`
/// up to the truncation tail of its parent joint density.
#[derive(Debug, Clone)]
pub struct Marginal {
    repr: MarginalRepr,
}

#[derive(Debug, Clone)]
enum MarginalRepr {
    Uniform { center: f64, half_width: f64 },
    Slice { component: Component, axis: Axis },
    Mixture(Vec<(f64, Marginal)>),
}

impl Marginal {
    /// Density at an angle (wrapped into `[-π, π)`).
    pub fn density(&self, angle: f64) -> f64 {
        match &self.repr {
            MarginalRepr::Uniform { center, half_width } => {
                if wrap_to_pi(angle - center).abs() <= *half_width {
                    1.0 / (2.0 * half_width)
                } else {
                    0.0
                }
            }
            MarginalRepr::Slice { component, axis } => {
                let p = component.params();
                // The kernel is symmetric under swapping (u, spread_t) with
                // (v, spread_r), so a slice along either axis integrates the
                // other coordinate with the roles exchanged.
                let (mean, sig_u, sig_v) = match axis {
                    Axis::Departure => (p.mean_departure, p.spread_t, p.spread_r),
                    Axis::Arrival => (p.mean_arrival, p.spread_r, p.spread_t),
                };
                let u = wrap_to_pi(angle - mean);
                // Conditional peak location and width along the inner axis.
                let vstar = p.rho * sig_v * u / sig_u;
                let scale = (sig_v * (1.0 - p.rho * p.rho).sqrt()).max(1e-12);
                let inward = match component.family() {
                    Family::Laplacian => 22,
                    _ => 2,
                };
                let features = scale_ladder(vstar, scale, 2.0 * PI, inward);
                let rule = AxisRule::graded(-PI, PI, 8, &features, GL_ORDER);
                match axis {
                    Axis::Departure => rule.integrate(|v| component.density_centered(u, v)),
                    Axis::Arrival => rule.integrate(|v| component.density_centered(v, u)),
                }
            }
            MarginalRepr::Mixture(parts) => parts.iter().map(|(w, m)| w * m.density(angle)).sum(),
        }
    }

    /// Quadrature breakpoints (absolute, wrapped angles) for integrals
    /// against this marginal.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            MarginalRepr::Uniform { center, half_width } => vec![
                wrap_to_pi(center - half_width),
                *center,
                wrap_to_pi(center + half_width),
            ],
            MarginalRepr::Slice { component, axis } => component.axis_breakpoints(*axis),
            MarginalRepr::Mixture(parts) => {
                parts.iter().flat_map(|(_, m)| m.breakpoints()).collect()
            }
        }
    }
}

/// A bi-angular power spectral density: a uni-modal family member, a finite
/// mixture of them, or the separable product of two marginals.
#[derive(Debug, Clone)]
pub struct BiAngularPsd {
    repr: PsdRepr,
}

#[derive(Debug, Clone)]
enum PsdRepr {
    Single(Component),
    Mixture(Vec<(f64, Component)>),
    Separable { tx: Marginal, rx: Marginal },
}

impl BiAngularPsd {
    pub fn new(family: Family, params: PsdParams) -> Result<Self> {
        Ok(Self {
            repr: PsdRepr::Single(Component::new(family, params)?),
        })
    }

    pub fn uniform_limited(params: PsdParams) -> Result<Self> {
        Self::new(Family::UniformLimited, params)
    }

    pub fn gaussian(params: PsdParams) -> Result<Self> {
        Self::new(Family::Gaussian, params)
    }

    pub fn laplacian(params: PsdParams) -> Result<Self> {
        Self::new(Family::Laplacian, params)
    }

    /// Weighted mixture of uni-modal PSDs. Weights must be positive and sum
    /// to 1 within 1e-12.
    pub fn mixture(components: Vec<(f64, BiAngularPsd)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("mixture must not be empty".into()));
        }
        let mut parts = Vec::with_capacity(components.len());
        let mut total = 0.0;
        for (w, psd) in components {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "mixture weight must be > 0, got {w}"
                )));
            }
            total += w;
            match psd.repr {
                PsdRepr::Single(c) => parts.push((w, c)),
                _ => {
                    return Err(Error::InvalidArgument(
                        "mixture components must be uni-modal PSDs".into(),
                    ))
                }
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mixture weights must sum to 1, got {total}"
            )));
        }
        Ok(Self {
            repr: PsdRepr::Mixture(parts),
        })
    }

    /// Joint density at `(φ, φᵣ)`; angles are wrapped into `[-π, π)`.
    pub fn density(&self, phi: f64, phi_r: f64) -> f64 {
        match &self.repr {
            PsdRepr::Single(c) => c.density(phi, phi_r),
            PsdRepr::Mixture(parts) => parts.iter().map(|(w, c)| w * c.density(phi, phi_r)).sum(),
            PsdRepr::Separable { tx, rx } => tx.density(phi) * rx.density(phi_r),
        }
    }

    /// Marginal power density over departure angles.
    pub fn marginal_tx(&self) -> Marginal {
        self.marginal(Axis::Departure)
    }

    /// Marginal power density over arrival angles.
    pub fn marginal_rx(&self) -> Marginal {
        self.marginal(Axis::Arrival)
    }

    fn marginal(&self, axis: Axis) -> Marginal {
        match &self.repr {
            PsdRepr::Single(c) => c.marginal(axis),
            PsdRepr::Mixture(parts) => Marginal {
                repr: MarginalRepr::Mixture(
                    parts.iter().map(|(w, c)| (*w, c.marginal(axis))).collect(),
                ),
            },
            PsdRepr::Separable { tx, rx } => match axis {
                Axis::Departure => tx.clone(),
                Axis::Arrival => rx.clone(),
            },
        }
    }

    /// The separable PSD `G̃(φ, φᵣ) = P_Tx(φ) P_Rx(φᵣ)` built from this
    /// density's marginals — the joint density the Kronecker model implies.
    pub fn kronecker_psd(&self) -> BiAngularPsd {
        BiAngularPsd {
            repr: PsdRepr::Separable {
                tx: self.marginal_tx(),
                rx: self.marginal_rx(),
            },
        }
    }

    /// Family and parameters when this is a single uni-modal density.
    pub fn as_single(&self) -> Option<(Family, &PsdParams)> {
        match &self.repr {
            PsdRepr::Single(c) => Some((c.family(), c.params())),
            _ => None,
        }
    }

    /// The two marginals when this is a separable product density.
    pub fn separable_parts(&self) -> Option<(&Marginal, &Marginal)> {
        match &self.repr {
            PsdRepr::Separable { tx, rx } => Some((tx, rx)),
            _ => None,
        }
    }

    /// Quadrature breakpoints along one axis (absolute wrapped angles).
    pub(crate) fn axis_breakpoints(&self, axis: Axis) -> Vec<f64> {
        match &self.repr {
            PsdRepr::Single(c) => c.axis_breakpoints(axis),
            PsdRepr::Mixture(parts) => parts
                .iter()
                .flat_map(|(_, c)| c.axis_breakpoints(axis))
                .collect(),
            PsdRepr::Separable { tx, rx } => match axis {
                Axis::Departure => tx.breakpoints(),
                Axis::Arrival => rx.breakpoints(),
            },
        }
    }
}
