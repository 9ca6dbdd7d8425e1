//! Modal and channel correlation matrices.
//!
//! Under uncorrelated scattering the correlation between the complex gains
//! coupling transmit mode `m` to receive mode `ℓ` and transmit mode `m'` to
//! receive mode `ℓ'` depends only on the index differences and equals a 2-D
//! Fourier coefficient of the joint angular PSD:
//!
//! ```text
//! γ(dm, dl) = ∬ G(φ, φᵣ) e^{i dm φ} e^{-i dl φᵣ} dφᵣ dφ,   dm = m - m', dl = ℓ - ℓ'
//! ```
//!
//! Each catalog family has a closed form for γ; [`gamma_quadrature`] is the
//! independent numerical route (and the only route for mixtures). The modal
//! correlation matrix `R_S` collects γ over the mode windows in
//! transmit-mode-major blocks. The Kronecker model replaces the joint PSD by
//! the product of its marginals, factoring `R_S` as `F_T ⊗ F_R` with the
//! one-sided coefficients `γ_t(dm) = ∫ P_Tx e^{i dm φ} dφ` and
//! `γ_r(dl) = ∫ P_Rx e^{-i dl φᵣ} dφᵣ` ([`build_rs_kronecker`]). The full
//! channel correlation is the congruence
//!
//! ```text
//! R = (J̄_T ⊗ J_R) R_S (J_Tᵀ ⊗ J_Rᴴ)
//! ```
//!
//! for the configuration matrices of the two arrays, with `vec(H)` stacking
//! the channel matrix column-wise (receiver index fastest).

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::{self, Write};

use crate::psd::{Axis, BiAngularPsd, Family, Marginal, PsdParams};
use crate::quadrature::{
    fourier_2d, AxisRule, BASE_PANELS, GL_ORDER, MAX_REFINE_LEVEL, REFINE_TOL,
};
use crate::smf::ConfigurationMatrix;
use crate::{Error, Result};

/// Largest entry magnitude of a complex matrix.
pub fn max_entry_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Unnormalized sinc: sin(x)/x with sinc(0) = 1.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Closed-form modal correlation coefficient of a uni-modal family.
///
/// The uniform-limited form is exact. The Gaussian form neglects the
/// truncation of the density to `[-π, π)²` (excellent for spreads up to a
/// few tens of degrees). The Laplacian form is the exact characteristic
/// function of the untruncated density; against the truncated density it
/// carries an O(1e-4) tail error at 15° spreads.
pub fn gamma_closed_form(family: Family, params: &PsdParams, dm: i64, dl: i64) -> Complex64 {
    if dm == 0 && dl == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let p = params;
    let (a, b) = (dm as f64, dl as f64);
    let phase = Complex64::from_polar(1.0, a * p.mean_departure - b * p.mean_arrival);
    match family {
        Family::UniformLimited => {
            let (dt, dr) = (p.spread_t, p.spread_r);
            if dl == 0 {
                phase * sinc(a * dt)
            } else if dm == 0 {
                phase * sinc(b * dr)
            } else {
                let gamma_box = sinc(a * dt) * sinc(b * dr)
                    + p.rho / (a * b * dt * dr)
                        * ((a * dt).cos() - sinc(a * dt))
                        * (sinc(b * dr) - (b * dr).cos());
                phase * gamma_box
            }
        }
        Family::Gaussian => {
            let q = p.spread_t.powi(2) * a * a - 2.0 * p.rho * p.spread_t * p.spread_r * a * b
                + p.spread_r.powi(2) * b * b;
            phase * (-0.5 * q).exp()
        }
        Family::Laplacian => {
            let q = p.spread_t.powi(2) * a * a - 2.0 * p.rho * p.spread_t * p.spread_r * a * b
                + p.spread_r.powi(2) * b * b;
            phase / (1.0 + q)
        }
    }
}

/// Batched Fourier coefficients `γ(dm, dl)` of a PSD, one value per
/// `(dm, dl)` pair of the cross product, sharing a single density grid.
///
/// Separable product PSDs factor into two 1-D transforms of the marginals;
/// everything else is integrated on a feature-graded tensor grid refined
/// until two levels agree below [`REFINE_TOL`].
pub fn fourier_block(psd: &BiAngularPsd, dms: &[i64], dls: &[i64]) -> Result<Vec<Vec<Complex64>>> {
    if let Some((tx, rx)) = psd.separable_parts() {
        let ft = marginal_fourier(tx, dms, 1.0)?;
        let fr = marginal_fourier(rx, dls, -1.0)?;
        return Ok(ft
            .iter()
            .map(|a| fr.iter().map(|b| a * b).collect())
            .collect());
    }
    let bu = psd.axis_breakpoints(Axis::Departure);
    let bv = psd.axis_breakpoints(Axis::Arrival);
    let mut prev: Option<Vec<Vec<Complex64>>> = None;
    let mut delta = f64::INFINITY;
    for level in 0..=MAX_REFINE_LEVEL {
        let ru = AxisRule::graded(-PI, PI, BASE_PANELS << level, &bu, GL_ORDER);
        let rv = AxisRule::graded(-PI, PI, BASE_PANELS << level, &bv, GL_ORDER);
        let vals = fourier_2d(|u, v| psd.density(u, v), &ru, &rv, dms, dls);
        if let Some(p) = &prev {
            delta = max_abs_diff(&vals, p);
            if delta < REFINE_TOL {
                return Ok(vals);
            }
        }
        prev = Some(vals);
    }
    Err(Error::NumericalFailure(format!(
        "modal-coefficient quadrature did not converge: last refinement delta {delta:.3e} \
         after {MAX_REFINE_LEVEL} panel doublings"
    )))
}

fn max_abs_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

/// Modal correlation coefficient by 2-D quadrature of the PSD's defining
/// Fourier integral. Serves as the independent oracle for the closed forms
/// and as the only path for mixtures.
pub fn gamma_quadrature(psd: &BiAngularPsd, dm: i64, dl: i64) -> Result<Complex64> {
    Ok(fourier_block(psd, &[dm], &[dl])?[0][0])
}

/// One-sided Fourier moments of a marginal density:
/// `∫ P(φ) e^{i sign k φ} dφ` for each `k`, refined to convergence.
pub fn marginal_fourier(marginal: &Marginal, ks: &[i64], sign: f64) -> Result<Vec<Complex64>> {
    let breaks = marginal.breakpoints();
    let mut prev: Option<Vec<Complex64>> = None;
    let mut delta = f64::INFINITY;
    for level in 0..=MAX_REFINE_LEVEL {
        let rule = AxisRule::graded(-PI, PI, BASE_PANELS << level, &breaks, GL_ORDER);
        let vals = rule.fourier(|x| marginal.density(x), ks, sign);
        if let Some(p) = &prev {
            delta = vals
                .iter()
                .zip(p)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            if delta < REFINE_TOL {
                return Ok(vals);
            }
        }
        prev = Some(vals);
    }
    Err(Error::NumericalFailure(format!(
        "marginal-coefficient quadrature did not converge: last delta {delta:.3e}"
    )))
}

/// How to fill the modal correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsMethod {
    /// Family closed forms; single uni-modal PSDs only.
    ClosedForm,
    /// 2-D quadrature of the defining integral; works for any PSD.
    Quadrature,
}

/// Hermitian modal correlation matrix `R_S` of size
/// `(2 M_T + 1)(2 M_R + 1)`, laid out as `(2 M_T + 1)²` transmit-mode
/// blocks of `(2 M_R + 1) × (2 M_R + 1)` receive-mode entries.
#[derive(Debug, Clone)]
pub struct ModalCorrelationMatrix {
    entries: DMatrix<Complex64>,
    m_t: usize,
    m_r: usize,
}

impl ModalCorrelationMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn mode_half_width_tx(&self) -> usize {
        self.m_t
    }

    pub fn mode_half_width_rx(&self) -> usize {
        self.m_r
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// The `(i, j)`-th transmit-mode block (0-based indices over
    /// `0..2M_T+1`), a `(2M_R+1) × (2M_R+1)` matrix.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<Complex64> {
        let nr = 2 * self.m_r + 1;
        self.entries.view((i * nr, j * nr), (nr, nr)).into()
    }

    /// Identity R_S of the given mode window (i.i.d. scattering gains).
    pub fn identity(m_t: usize, m_r: usize) -> Self {
        let n = (2 * m_t + 1) * (2 * m_r + 1);
        Self {
            entries: DMatrix::identity(n, n),
            m_t,
            m_r,
        }
    }
}

/// Fill R_S from a γ lookup, mirroring the half-plane so Hermitian symmetry
/// holds by construction.
fn assemble_rs(
    m_t: usize,
    m_r: usize,
    mut gamma: impl FnMut(i64, i64) -> Complex64,
) -> ModalCorrelationMatrix {
    let nt = 2 * m_t + 1;
    let nr = 2 * m_r + 1;
    let (wt, wr) = (2 * m_t as i64, 2 * m_r as i64);
    // Table over dm in [-2M_T, 2M_T], dl in [-2M_R, 2M_R]; the dm < 0 and
    // (dm = 0, dl < 0) half is the conjugate mirror of the other.
    let mut table =
        vec![vec![Complex64::new(0.0, 0.0); (4 * m_r + 1).max(1)]; (4 * m_t + 1).max(1)];
    for dm in 0..=wt {
        for dl in -wr..=wr {
            if dm == 0 && dl < 0 {
                continue;
            }
            let g = gamma(dm, dl);
            table[(dm + wt) as usize][(dl + wr) as usize] = g;
            table[(wt - dm) as usize][(wr - dl) as usize] = g.conj();
        }
    }
    let mut entries = DMatrix::zeros(nt * nr, nt * nr);
    for pm in 0..nt {
        for pl in 0..nr {
            let row = pm * nr + pl;
            for qm in 0..nt {
                for ql in 0..nr {
                    let col = qm * nr + ql;
                    let dm = pm as i64 - qm as i64;
                    let dl = pl as i64 - ql as i64;
                    entries[(row, col)] = table[(dm + wt) as usize][(dl + wr) as usize];
                }
            }
        }
    }
    ModalCorrelationMatrix { entries, m_t, m_r }
}

/// Build the modal correlation matrix of a PSD for the given mode window.
pub fn build_rs(
    psd: &BiAngularPsd,
    m_t: usize,
    m_r: usize,
    method: RsMethod,
) -> Result<ModalCorrelationMatrix> {
    match method {
        RsMethod::ClosedForm => {
            let (family, params) = psd.as_single().ok_or_else(|| {
                Error::UnsupportedMethod(
                    "closed-form modal correlations exist only for single uni-modal PSDs; \
                     use the quadrature method"
                        .into(),
                )
            })?;
            let params = *params;
            Ok(assemble_rs(m_t, m_r, |dm, dl| {
                gamma_closed_form(family, &params, dm, dl)
            }))
        }
        RsMethod::Quadrature => {
            let dms: Vec<i64> = (0..=2 * m_t as i64).collect();
            let dls: Vec<i64> = (-(2 * m_r as i64)..=2 * m_r as i64).collect();
            let block = fourier_block(psd, &dms, &dls)?;
            let wr = 2 * m_r as i64;
            Ok(assemble_rs(m_t, m_r, |dm, dl| {
                block[dm as usize][(dl + wr) as usize]
            }))
        }
    }
}

/// Build the Kronecker-model modal correlation matrix `F_T ⊗ F_R` from the
/// PSD's marginal spectra (one-sided 1-D quadrature).
pub fn build_rs_kronecker(
    psd: &BiAngularPsd,
    m_t: usize,
    m_r: usize,
) -> Result<ModalCorrelationMatrix> {
    let ks_t: Vec<i64> = (0..=2 * m_t as i64).collect();
    let ks_r: Vec<i64> = (0..=2 * m_r as i64).collect();
    let gt = marginal_fourier(&psd.marginal_tx(), &ks_t, 1.0)?;
    let gr = marginal_fourier(&psd.marginal_rx(), &ks_r, -1.0)?;
    let one_sided = |vals: &[Complex64], d: i64| -> Complex64 {
        if d >= 0 {
            vals[d as usize]
        } else {
            vals[(-d) as usize].conj()
        }
    };
    let nt = 2 * m_t + 1;
    let nr = 2 * m_r + 1;
    let f_t = DMatrix::from_fn(nt, nt, |p, q| one_sided(&gt, p as i64 - q as i64));
    let f_r = DMatrix::from_fn(nr, nr, |p, q| one_sided(&gr, p as i64 - q as i64));
    Ok(ModalCorrelationMatrix {
        entries: f_t.kronecker(&f_r),
        m_t,
        m_r,
    })
}

/// Hermitian PSD correlation matrix of the vectorized channel, of size
/// `n_T n_R`, with `vec(H)` column-stacked (receiver index fastest).
#[derive(Debug, Clone)]
pub struct ChannelCorrelation {
    entries: DMatrix<Complex64>,
    n_t: usize,
    n_r: usize,
    asymmetry: f64,
}

impl ChannelCorrelation {
    /// Wrap an externally assembled matrix, validating shape and
    /// Hermitianity (within 1e-9 of the entry scale) before symmetrizing.
    pub fn from_entries(entries: DMatrix<Complex64>, n_t: usize, n_r: usize) -> Result<Self> {
        let n = n_t * n_r;
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::InvalidArgument(format!(
                "correlation matrix must be {n}x{n} for {n_t} tx and {n_r} rx antennas, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let adj = entries.adjoint();
        let asymmetry = max_entry_norm(&(&entries - &adj));
        let scale = max_entry_norm(&entries).max(1.0);
        if asymmetry > 1e-9 * scale {
            return Err(Error::InvalidArgument(format!(
                "matrix is not Hermitian: max |R - R^H| = {asymmetry:e}"
            )));
        }
        Ok(Self {
            entries: (entries + adj) * Complex64::new(0.5, 0.0),
            n_t,
            n_r,
            asymmetry,
        })
    }

    /// Identity correlation (i.i.d. channel entries).
    pub fn identity(n_t: usize, n_r: usize) -> Self {
        Self {
            entries: DMatrix::identity(n_t * n_r, n_t * n_r),
            n_t,
            n_r,
            asymmetry: 0.0,
        }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    /// Max entrywise deviation from Hermitianity before symmetrization.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn trace_re(&self) -> f64 {
        self.entries.trace().re
    }
}

/// Form the full channel correlation `R = (J̄_T ⊗ J_R) R_S (J_Tᵀ ⊗ J_Rᴴ)`.
pub fn build_r(
    j_t: &ConfigurationMatrix,
    j_r: &ConfigurationMatrix,
    r_s: &ModalCorrelationMatrix,
) -> Result<ChannelCorrelation> {
    let nt_modes = 2 * r_s.mode_half_width_tx() + 1;
    let nr_modes = 2 * r_s.mode_half_width_rx() + 1;
    if j_t.modes() != nt_modes || j_r.modes() != nr_modes {
        return Err(Error::InvalidArgument(format!(
            "mode window mismatch: J_T has {} columns / J_R {} but R_S expects {} / {}",
            j_t.modes(),
            j_r.modes(),
            nt_modes,
            nr_modes
        )));
    }
    let a = j_t.entries().conjugate().kronecker(j_r.entries());
    let raw = &a * r_s.entries() * a.adjoint();
    let adj = raw.adjoint();
    let asymmetry = max_entry_norm(&(&raw - &adj));
    Ok(ChannelCorrelation {
        entries: (raw + adj) * Complex64::new(0.5, 0.0),
        n_t: j_t.antennas(),
        n_r: j_r.antennas(),
        asymmetry,
    })
}

/// Write a complex matrix as CSV with interleaved re/im columns.
pub fn write_matrix_csv<W: Write>(m: &DMatrix<Complex64>, out: &mut W) -> io::Result<()> {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                write!(out, ",")?;
            }
            write!(out, "{:?},{:?}", m[(r, c)].re, m[(r, c)].im)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
