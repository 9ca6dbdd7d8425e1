//! Composite Gauss-Legendre quadrature on panel decompositions.
//!
//! Integrands here are smooth except at isolated "features": support edges
//! of limited-azimuth spectra, the scale of a narrow peak, or the log
//! singularity of the Laplacian kernel. A rule is therefore built from a
//! base uniform split of the axis plus caller-supplied breakpoints (which
//! may be dyadically graded toward a singular point). Nodes never land on a
//! breakpoint, so integrable singularities are sampled but not evaluated.
//!
//! Refinement doubles the base panel count while keeping the feature
//! breakpoints fixed; callers iterate until two successive estimates agree.

use num_complex::Complex64;

/// Gauss-Legendre points per panel.
pub const GL_ORDER: usize = 16;

/// Convergence target for iterated refinement.
pub const REFINE_TOL: f64 = 1e-10;

/// Base panels per axis at refinement level 0 (doubled per level).
pub const BASE_PANELS: usize = 4;

/// Deepest refinement level tried before reporting non-convergence.
pub const MAX_REFINE_LEVEL: usize = 4;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// A fully laid-out 1-D rule: absolute nodes with their weights.
#[derive(Debug, Clone)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    /// Build a rule over `[lo, hi]` from `base_panels` uniform panels merged
    /// with the given feature breakpoints (values outside the interval are
    /// dropped, duplicates collapsed).
    pub fn graded(
        lo: f64,
        hi: f64,
        base_panels: usize,
        features: &[f64],
        order: usize,
    ) -> AxisRule {
        assert!(hi > lo);
        let mut breaks: Vec<f64> = Vec::with_capacity(base_panels + features.len() + 2);
        for i in 0..=base_panels {
            breaks.push(lo + (hi - lo) * i as f64 / base_panels as f64);
        }
        for &f in features {
            if f > lo && f < hi {
                breaks.push(f);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

        let (gn, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (&x, &wt) in gn.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        AxisRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate a 1-D function.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Fourier moments of a real 1-D function: for each k in `ks`, computes
    /// the integral of `f(x) exp(i sign k x)`.
    pub fn fourier(&self, f: impl Fn(f64) -> f64, ks: &[i64], sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); ks.len()];
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let fx = w * f(x);
            if fx == 0.0 {
                continue;
            }
            for (slot, &k) in out.iter_mut().zip(ks) {
                *slot += fx * Complex64::from_polar(1.0, sign * k as f64 * x);
            }
        }
        out
    }
}

/// Tensor-product integral of `f(u, v)` over the two rules.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64, ru: &AxisRule, rv: &AxisRule) -> f64 {
    let mut total = 0.0;
    for (&u, &wu) in ru.nodes.iter().zip(&ru.weights) {
        let mut inner = 0.0;
        for (&v, &wv) in rv.nodes.iter().zip(&rv.weights) {
            inner += wv * f(u, v);
        }
        total += wu * inner;
    }
    total
}

/// Batched 2-D Fourier coefficients of a real function:
/// `out[a][b] = ∬ f(u,v) exp(i dm_a u) exp(-i dl_b v) du dv`.
///
/// The function is evaluated once per tensor node and shared across all
/// requested (dm, dl) pairs.
pub fn fourier_2d(
    f: impl Fn(f64, f64) -> f64,
    ru: &AxisRule,
    rv: &AxisRule,
    dms: &[i64],
    dls: &[i64],
) -> Vec<Vec<Complex64>> {
    // Pre-weighted arrival-side phases: phase_v[b][j] = w_j exp(-i dl_b v_j)
    let phase_v: Vec<Vec<Complex64>> = dls
        .iter()
        .map(|&dl| {
            rv.nodes
                .iter()
                .zip(&rv.weights)
                .map(|(&v, &w)| w * Complex64::from_polar(1.0, -(dl as f64) * v))
                .collect()
        })
        .collect();

    let mut out = vec![vec![Complex64::new(0.0, 0.0); dls.len()]; dms.len()];
    let mut row = vec![0.0; rv.len()];
    for (&u, &wu) in ru.nodes.iter().zip(&ru.weights) {
        for (slot, &v) in row.iter_mut().zip(&rv.nodes) {
            *slot = f(u, v);
        }
        // inner[b] = sum_j row_j w_j exp(-i dl_b v_j)
        let inner: Vec<Complex64> = phase_v
            .iter()
            .map(|ph| ph.iter().zip(&row).map(|(p, &r)| p * r).sum::<Complex64>())
            .collect();
        for (a, &dm) in dms.iter().enumerate() {
            let pu = wu * Complex64::from_polar(1.0, dm as f64 * u);
            for (b, i) in inner.iter().enumerate() {
                out[a][b] += pu * i;
            }
        }
    }
    out
}

/// Dyadic ladder of offsets around a center, used as feature breakpoints:
/// `center`, then `center ± scale·2^j` outward while inside the span, and
/// `center ± scale/2^j` inward for `inward_levels` halvings.
pub fn scale_ladder(center: f64, scale: f64, span: f64, inward_levels: usize) -> Vec<f64> {
    let mut pts = vec![center];
    let mut s = scale;
    while s < span && pts.len() < 200 {
        pts.push(center - s);
        pts.push(center + s);
        s *= 2.0;
    }
    let mut s = scale / 2.0;
    for _ in 0..inward_levels {
        pts.push(center - s);
        pts.push(center + s);
        s /= 2.0;
    }
    pts
}
