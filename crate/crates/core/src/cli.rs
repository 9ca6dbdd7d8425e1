//! Scenario-driven front end.
//!
//! A scenario is a TOML file describing the two arrays, the scattering PSD,
//! the SNR sweep and the model variants to simulate. Angles in config files
//! are degrees; they are converted to radians at parse time. Running a
//! scenario writes one capacity CSV per variant plus a manifest recording
//! every numeric choice. With a fixed seed the CSV outputs are byte
//! identical across runs.
//!
//! ```toml
//! id = "uni-modal-gaussian"
//! seed = 7
//! trials = 20000
//! snr_db = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
//! variants = ["exact", "kronecker", "iid"]
//!
//! [tx_array]
//! kind = "uca"
//! elements = 3
//! radius = 0.5            # wavelengths
//!
//! [rx_array]
//! kind = "uca"
//! elements = 3
//! radius = 0.5
//!
//! [psd]
//! family = "gaussian"      # uniform | gaussian | laplacian | mixture
//! mean_departure_deg = 90.0
//! mean_arrival_deg = 90.0
//! spread_t_deg = 10.0
//! spread_r_deg = 30.0
//! rho = 0.8
//! ```
//!
//! Mixtures replace the scalar parameters with `[[psd.components]]` tables
//! carrying a `weight` plus the same per-component fields.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::capacity::{
    average_mi, CapacityCurve, RealizationEngine, EIGEN_CLAMP_REL, SQRT_RECONSTRUCTION_REL,
};
use crate::correlation::{build_r, build_rs, build_rs_kronecker, RsMethod};
use crate::geometry::{uniform_circular_array, AntennaPosition, ArrayGeometry};
use crate::psd::{BiAngularPsd, Family, PsdParams, DEGENERATE_MASS};
use crate::quadrature::{BASE_PANELS, GL_ORDER, MAX_REFINE_LEVEL, REFINE_TOL};
use crate::smf::{configuration_matrix, Side};
use crate::Error;

/// Front-end errors carrying the process exit code: 2 for configuration
/// problems, 3 for numerical failures.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NumericalFailure(m) => CliError::Numerical(m),
            Error::NotPositiveSemidefinite(m) => {
                CliError::Numerical(format!("matrix not positive semidefinite: {m}"))
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Model variants a scenario can simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Full non-separable correlation from the joint PSD.
    Exact,
    /// Separable approximation from the marginal spectra.
    Kronecker,
    /// Identity correlation (i.i.d. channel entries).
    Iid,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Exact => "exact",
            Variant::Kronecker => "kronecker",
            Variant::Iid => "iid",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// On-disk scenario schema (see the module docs for an example).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub seed: u64,
    pub trials: u64,
    pub snr_db: Vec<f64>,
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub grid_resolution: Option<usize>,
    pub tx_array: ArraySpec,
    pub rx_array: ArraySpec,
    pub psd: PsdSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ArraySpec {
    Uca {
        elements: usize,
        /// Ring radius in wavelengths.
        radius: f64,
    },
    Custom {
        /// `[radius_wavelengths, azimuth_deg]` per antenna.
        positions: Vec<[f64; 2]>,
        /// Defaults to the largest element radius.
        #[serde(default)]
        aperture_radius: Option<f64>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsdSpec {
    /// `uniform` | `gaussian` | `laplacian` | `mixture`
    pub family: String,
    #[serde(default)]
    pub mean_departure_deg: Option<f64>,
    #[serde(default)]
    pub mean_arrival_deg: Option<f64>,
    #[serde(default)]
    pub spread_t_deg: Option<f64>,
    #[serde(default)]
    pub spread_r_deg: Option<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub components: Option<Vec<ComponentSpec>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub weight: f64,
    pub family: String,
    pub mean_departure_deg: f64,
    pub mean_arrival_deg: f64,
    pub spread_t_deg: f64,
    pub spread_r_deg: f64,
    pub rho: f64,
}

fn parse_family(field: &str, name: &str) -> Result<Family, CliError> {
    match name {
        "uniform" => Ok(Family::UniformLimited),
        "gaussian" => Ok(Family::Gaussian),
        "laplacian" => Ok(Family::Laplacian),
        other => Err(CliError::Config(format!(
            "{field}: unknown family {other:?} (expected uniform, gaussian, laplacian or mixture)"
        ))),
    }
}

fn require(field: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("{field}: missing")))
}

fn check_rho(field: &str, rho: f64) -> Result<f64, CliError> {
    if !rho.is_finite() || rho.abs() > 1.0 {
        return Err(CliError::Config(format!(
            "{field}: must be within [-1, 1], got {rho}"
        )));
    }
    Ok(rho)
}

fn unimodal_params(field: &str, spec: &PsdSpec) -> Result<PsdParams, CliError> {
    Ok(PsdParams {
        mean_departure: require(
            &format!("{field}.mean_departure_deg"),
            spec.mean_departure_deg,
        )?
        .to_radians(),
        mean_arrival: require(&format!("{field}.mean_arrival_deg"), spec.mean_arrival_deg)?
            .to_radians(),
        spread_t: require(&format!("{field}.spread_t_deg"), spec.spread_t_deg)?.to_radians(),
        spread_r: require(&format!("{field}.spread_r_deg"), spec.spread_r_deg)?.to_radians(),
        rho: check_rho(
            &format!("{field}.rho"),
            require(&format!("{field}.rho"), spec.rho)?,
        )?,
    })
}

fn build_psd(spec: &PsdSpec) -> Result<BiAngularPsd, CliError> {
    if spec.family == "mixture" {
        let comps = spec.components.as_ref().ok_or_else(|| {
            CliError::Config("psd.components: missing for family = \"mixture\"".into())
        })?;
        let mut parts = Vec::with_capacity(comps.len());
        for (i, c) in comps.iter().enumerate() {
            let field = format!("psd.components[{i}]");
            let family = parse_family(&format!("{field}.family"), &c.family)?;
            let params = PsdParams {
                mean_departure: c.mean_departure_deg.to_radians(),
                mean_arrival: c.mean_arrival_deg.to_radians(),
                spread_t: c.spread_t_deg.to_radians(),
                spread_r: c.spread_r_deg.to_radians(),
                rho: check_rho(&format!("{field}.rho"), c.rho)?,
            };
            let single = BiAngularPsd::new(family, params)
                .map_err(|e| CliError::Config(format!("{field}: {e}")))?;
            parts.push((c.weight, single));
        }
        BiAngularPsd::mixture(parts).map_err(|e| CliError::Config(format!("psd.components: {e}")))
    } else {
        if spec.components.is_some() {
            return Err(CliError::Config(format!(
                "psd.components: only valid for family = \"mixture\", not {:?}",
                spec.family
            )));
        }
        let family = parse_family("psd.family", &spec.family)?;
        let params = unimodal_params("psd", spec)?;
        BiAngularPsd::new(family, params).map_err(|e| CliError::Config(format!("psd: {e}")))
    }
}

fn build_array(field: &str, spec: &ArraySpec) -> Result<ArrayGeometry, CliError> {
    match spec {
        ArraySpec::Uca { elements, radius } => uniform_circular_array(*elements, *radius)
            .map_err(|e| CliError::Config(format!("{field}: {e}"))),
        ArraySpec::Custom {
            positions,
            aperture_radius,
        } => {
            let pos = positions
                .iter()
                .map(|[r, az_deg]| AntennaPosition::new(*r, az_deg.to_radians()))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(|e| CliError::Config(format!("{field}.positions: {e}")))?;
            let max_r = pos.iter().map(|p| p.radius()).fold(0.0, f64::max);
            ArrayGeometry::new(pos, aperture_radius.unwrap_or(max_r))
                .map_err(|e| CliError::Config(format!("{field}: {e}")))
        }
    }
}

/// A validated scenario, ready to run. All angles are radians, all lengths
/// wavelengths.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub seed: u64,
    pub trials: u64,
    pub snr_db: Vec<f64>,
    pub variants: Vec<Variant>,
    pub out_dir: PathBuf,
    pub grid_resolution: usize,
    pub tx_array: ArrayGeometry,
    pub rx_array: ArrayGeometry,
    pub psd: BiAngularPsd,
}

impl Scenario {
    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self, CliError> {
        if cfg.id.is_empty()
            || !cfg
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(CliError::Config(format!(
                "id: must be non-empty and use only [A-Za-z0-9_-], got {:?}",
                cfg.id
            )));
        }
        if cfg.trials == 0 {
            return Err(CliError::Config("trials: must be >= 1".into()));
        }
        if cfg.snr_db.is_empty() || cfg.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(CliError::Config(
                "snr_db: must be a non-empty list of finite values".into(),
            ));
        }
        if cfg.variants.is_empty() {
            return Err(CliError::Config("variants: must not be empty".into()));
        }
        let resolution = cfg.grid_resolution.unwrap_or(181);
        if resolution < 3 {
            return Err(CliError::Config("grid_resolution: must be >= 3".into()));
        }
        Ok(Scenario {
            id: cfg.id.clone(),
            seed: cfg.seed,
            trials: cfg.trials,
            snr_db: cfg.snr_db.clone(),
            variants: cfg.variants.clone(),
            out_dir: cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
            grid_resolution: resolution,
            tx_array: build_array("tx_array", &cfg.tx_array)?,
            rx_array: build_array("rx_array", &cfg.rx_array)?,
            psd: build_psd(&cfg.psd)?,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: ScenarioConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_config(&cfg)
    }
}

/// Optional command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub trials: Option<u64>,
}

impl Overrides {
    fn apply(&self, s: &mut Scenario) {
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(dir) = &self.out_dir {
            s.out_dir = dir.clone();
        }
        if let Some(trials) = self.trials {
            s.trials = trials;
        }
    }
}

#[derive(Debug, Serialize)]
struct VariantReport {
    variant: String,
    output_file: String,
    min_eigenvalue: f64,
    clamped_eigenvalues: usize,
    correlation_trace: f64,
    build_seconds: f64,
    monte_carlo_seconds: f64,
}

/// Run manifest: everything needed to audit a run, including every numeric
/// tolerance in play. Timings vary run to run; the CSV payloads do not.
#[derive(Debug, Serialize)]
struct Manifest {
    id: String,
    tool: String,
    version: String,
    config_format: u32,
    seed: u64,
    trials: u64,
    snr_db: Vec<f64>,
    variants: Vec<String>,
    angle_unit_in_config: String,
    n_t: usize,
    n_r: usize,
    aperture_radius_t: f64,
    aperture_radius_r: f64,
    mode_half_width_t: usize,
    mode_half_width_r: usize,
    quadrature_gl_order: usize,
    quadrature_base_panels: usize,
    quadrature_max_refine_level: usize,
    quadrature_refine_tol: f64,
    degenerate_mass_floor: f64,
    eigen_clamp_rel: f64,
    sqrt_reconstruction_rel: f64,
    grid_resolution: usize,
    total_seconds: f64,
    runs: Vec<VariantReport>,
}

/// Artifacts produced by [`run_scenario`].
#[derive(Debug)]
pub struct RunOutputs {
    pub curve_files: Vec<(Variant, PathBuf)>,
    pub manifest_file: PathBuf,
    pub curves: Vec<(Variant, CapacityCurve)>,
}

/// Build the requested correlation variants, sweep SNR by Monte Carlo and
/// write one CSV per variant plus the manifest.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutputs, CliError> {
    fs::create_dir_all(&scenario.out_dir)?;
    let started = Instant::now();
    let m_t = scenario.tx_array.mode_count();
    let m_r = scenario.rx_array.mode_count();
    let j_t = configuration_matrix(&scenario.tx_array, m_t, Side::Transmitter);
    let j_r = configuration_matrix(&scenario.rx_array, m_r, Side::Receiver);

    let mut curve_files = Vec::new();
    let mut curves = Vec::new();
    let mut reports = Vec::new();
    for &variant in &scenario.variants {
        let t_build = Instant::now();
        let r = match variant {
            Variant::Exact => {
                let rs = build_rs(&scenario.psd, m_t, m_r, RsMethod::Quadrature)?;
                build_r(&j_t, &j_r, &rs)?
            }
            Variant::Kronecker => {
                let rs = build_rs_kronecker(&scenario.psd, m_t, m_r)?;
                build_r(&j_t, &j_r, &rs)?
            }
            Variant::Iid => crate::correlation::ChannelCorrelation::identity(
                scenario.tx_array.len(),
                scenario.rx_array.len(),
            ),
        };
        let build_seconds = t_build.elapsed().as_secs_f64();
        let engine = RealizationEngine::new(&r, scenario.seed)?;
        let t_mc = Instant::now();
        let curve = average_mi(
            &engine,
            &scenario.snr_db,
            scenario.trials,
            &format!("{}:{}", scenario.id, variant.name()),
        )?;
        let monte_carlo_seconds = t_mc.elapsed().as_secs_f64();

        let file = scenario
            .out_dir
            .join(format!("{}_{}.csv", scenario.id, variant.name()));
        let mut out = fs::File::create(&file)?;
        curve.write_csv(&mut out)?;
        reports.push(VariantReport {
            variant: variant.name().to_string(),
            output_file: file
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            min_eigenvalue: engine.min_eigenvalue(),
            clamped_eigenvalues: engine.clamped_eigenvalues(),
            correlation_trace: r.trace_re(),
            build_seconds,
            monte_carlo_seconds,
        });
        curve_files.push((variant, file));
        curves.push((variant, curve));
    }

    let manifest = Manifest {
        id: scenario.id.clone(),
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_format: 1,
        seed: scenario.seed,
        trials: scenario.trials,
        snr_db: scenario.snr_db.clone(),
        variants: scenario
            .variants
            .iter()
            .map(|v| v.name().to_string())
            .collect(),
        angle_unit_in_config: "degrees".to_string(),
        n_t: scenario.tx_array.len(),
        n_r: scenario.rx_array.len(),
        aperture_radius_t: scenario.tx_array.aperture_radius(),
        aperture_radius_r: scenario.rx_array.aperture_radius(),
        mode_half_width_t: m_t,
        mode_half_width_r: m_r,
        quadrature_gl_order: GL_ORDER,
        quadrature_base_panels: BASE_PANELS,
        quadrature_max_refine_level: MAX_REFINE_LEVEL,
        quadrature_refine_tol: REFINE_TOL,
        degenerate_mass_floor: DEGENERATE_MASS,
        eigen_clamp_rel: EIGEN_CLAMP_REL,
        sqrt_reconstruction_rel: SQRT_RECONSTRUCTION_REL,
        grid_resolution: scenario.grid_resolution,
        total_seconds: started.elapsed().as_secs_f64(),
        runs: reports,
    };
    let manifest_file = scenario
        .out_dir
        .join(format!("{}_manifest.toml", scenario.id));
    let body = toml::to_string_pretty(&manifest)
        .map_err(|e| CliError::Numerical(format!("manifest serialization: {e}")))?;
    fs::write(&manifest_file, body)?;

    Ok(RunOutputs {
        curve_files,
        manifest_file,
        curves,
    })
}

/// Convenience wrapper: load, override, validate, run.
pub fn run_scenario_file(path: &Path, overrides: &Overrides) -> Result<RunOutputs, CliError> {
    let mut scenario = Scenario::from_path(path)?;
    overrides.apply(&mut scenario);
    run_scenario(&scenario)
}

/// Which joint density to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridVariant {
    Exact,
    Kronecker,
}

impl GridVariant {
    pub fn name(&self) -> &'static str {
        match self {
            GridVariant::Exact => "exact",
            GridVariant::Kronecker => "kronecker",
        }
    }
}

/// A joint density tabulated on a periodic uniform angle grid (degrees).
/// `values[i][j]` is the density at `(phi_deg[i], phi_r_deg[j])`.
#[derive(Debug, Clone)]
pub struct PsdGrid {
    pub phi_deg: Vec<f64>,
    pub phi_r_deg: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Tabulate the exact or Kronecker-product density of a scenario's PSD on a
/// `resolution × resolution` periodic grid over `[-180°, 180°)`.
///
/// The Laplacian density is infinite exactly at a component mean; a grid
/// point landing there is capped by re-evaluating half a cell away.
pub fn psd_grid(scenario: &Scenario, which: GridVariant, resolution: usize) -> PsdGrid {
    let psd = match which {
        GridVariant::Exact => scenario.psd.clone(),
        GridVariant::Kronecker => scenario.psd.kronecker_psd(),
    };
    let step = 360.0 / resolution as f64;
    let angles_deg: Vec<f64> = (0..resolution).map(|i| -180.0 + step * i as f64).collect();
    let rad: Vec<f64> = angles_deg.iter().map(|d| d.to_radians()).collect();
    let half_cell = (step / 2.0).to_radians();

    let values = if let Some((tx, rx)) = psd.separable_parts() {
        // Separable: evaluate each marginal once per axis point.
        let tv: Vec<f64> = rad.iter().map(|&a| tx.density(a)).collect();
        let rv: Vec<f64> = rad.iter().map(|&a| rx.density(a)).collect();
        tv.iter()
            .map(|&t| rv.iter().map(|&r| t * r).collect())
            .collect()
    } else {
        rad.iter()
            .map(|&u| {
                rad.iter()
                    .map(|&v| {
                        let d = psd.density(u, v);
                        if d.is_finite() {
                            d
                        } else {
                            psd.density(u + half_cell, v + half_cell)
                        }
                    })
                    .collect()
            })
            .collect()
    };
    PsdGrid {
        phi_deg: angles_deg.clone(),
        phi_r_deg: angles_deg,
        values,
    }
}

/// CSV schema: `phi_deg,phi_r_deg,density`, row-major over φ then φᵣ.
pub fn write_grid_csv<W: std::io::Write>(grid: &PsdGrid, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "phi_deg,phi_r_deg,density")?;
    for (i, &p) in grid.phi_deg.iter().enumerate() {
        for (j, &q) in grid.phi_r_deg.iter().enumerate() {
            writeln!(out, "{:?},{:?},{:?}", p, q, grid.values[i][j])?;
        }
    }
    Ok(())
}

/// Count local maxima above `rel_threshold` of the global maximum, using
/// 8-neighbor strict dominance on the periodic grid.
///
/// A maximum is a connected component of equal-valued cells every outside
/// neighbor of which is strictly smaller. For generic data components are
/// single cells and this is plain strict dominance; the component form keeps
/// the count right when a symmetric density ties two adjacent cells exactly
/// (which happens whenever grid offsets land symmetrically about a ridge).
pub fn count_local_maxima(grid: &PsdGrid, rel_threshold: f64) -> usize {
    let n = grid.phi_deg.len();
    let m = grid.phi_r_deg.len();
    let global = grid
        .values
        .iter()
        .flatten()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let floor = rel_threshold * global;
    let neighbors = |i: usize, j: usize| {
        let mut out = [(0usize, 0usize); 8];
        let mut k = 0;
        for di in [-1i64, 0, 1] {
            for dj in [-1i64, 0, 1] {
                if di == 0 && dj == 0 {
                    continue;
                }
                out[k] = (
                    (i as i64 + di).rem_euclid(n as i64) as usize,
                    (j as i64 + dj).rem_euclid(m as i64) as usize,
                );
                k += 1;
            }
        }
        out
    };
    let mut visited = vec![vec![false; m]; n];
    let mut count = 0;
    for i in 0..n {
        for j in 0..m {
            let v = grid.values[i][j];
            if visited[i][j] || v <= floor {
                continue;
            }
            // Flood-fill the plateau of exactly equal values.
            let mut stack = vec![(i, j)];
            visited[i][j] = true;
            let mut dominates = true;
            while let Some((ci, cj)) = stack.pop() {
                for (ni, nj) in neighbors(ci, cj) {
                    let nv = grid.values[ni][nj];
                    if nv == v {
                        if !visited[ni][nj] {
                            visited[ni][nj] = true;
                            stack.push((ni, nj));
                        }
                    } else if nv > v {
                        dominates = false;
                    }
                }
            }
            if dominates {
                count += 1;
            }
        }
    }
    count
}

/// Tabulate a scenario PSD and write `<id>_psd_<variant>.csv` in the
/// scenario's output directory. Returns the path and the grid.
pub fn export_psd_grid(
    scenario: &Scenario,
    which: GridVariant,
    resolution: usize,
) -> Result<(PathBuf, PsdGrid), CliError> {
    if resolution < 3 {
        return Err(CliError::Config("resolution: must be >= 3".into()));
    }
    fs::create_dir_all(&scenario.out_dir)?;
    let grid = psd_grid(scenario, which, resolution);
    let file = scenario
        .out_dir
        .join(format!("{}_psd_{}.csv", scenario.id, which.name()));
    let mut out = fs::File::create(&file)?;
    write_grid_csv(&grid, &mut out)?;
    out.flush()?;
    Ok((file, grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_config(rho: f64) -> String {
        format!(
            r#"
id = "demo"
seed = 7
trials = 50
snr_db = [0.0, 10.0]
variants = ["exact", "kronecker", "iid"]

[tx_array]
kind = "uca"
elements = 2
radius = 0.25

[rx_array]
kind = "uca"
elements = 2
radius = 0.25

[psd]
family = "gaussian"
mean_departure_deg = 90.0
mean_arrival_deg = 90.0
spread_t_deg = 10.0
spread_r_deg = 10.0
rho = {rho}
"#
        )
    }

    fn three_cluster_config() -> &'static str {
        r#"
id = "клуб"
seed = 1
trials = 10
snr_db = [10.0]
variants = ["exact"]

[tx_array]
kind = "uca"
elements = 3
radius = 0.5

[rx_array]
kind = "uca"
elements = 3
radius = 0.5

[psd]
family = "mixture"

[[psd.components]]
weight = 0.33333333333333333
family = "gaussian"
mean_departure_deg = -40.0
mean_arrival_deg = 40.0
spread_t_deg = 5.0
spread_r_deg = 5.0
rho = 0.8

[[psd.components]]
weight = 0.33333333333333333
family = "gaussian"
mean_departure_deg = 0.0
mean_arrival_deg = -40.0
spread_t_deg = 5.0
spread_r_deg = 5.0
rho = 0.8

[[psd.components]]
weight = 0.33333333333333334
family = "gaussian"
mean_departure_deg = 50.0
mean_arrival_deg = 0.0
spread_t_deg = 5.0
spread_r_deg = 5.0
rho = 0.8
"#
    }

    fn scenario_from_str(text: &str) -> Result<Scenario, CliError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Scenario::from_config(&cfg)
    }

    #[test]
    fn parses_complete_config() {
        let s = scenario_from_str(&gaussian_config(0.8)).unwrap();
        assert_eq!(s.id, "demo");
        assert_eq!(s.tx_array.len(), 2);
        assert_eq!(s.variants.len(), 3);
        assert!(s.psd.as_single().is_some());
        let (_, p) = s.psd.as_single().unwrap();
        assert!((p.mean_departure - 90f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn invalid_rho_error_names_the_field() {
        let err = scenario_from_str(&gaussian_config(1.5)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("rho"), "message should name the field: {msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn mixture_id_with_bad_characters_rejected() {
        // the sample deliberately uses a non-ASCII id
        let err = scenario_from_str(three_cluster_config()).unwrap_err();
        assert!(err.to_string().contains("id"));
    }

    #[test]
    fn mixture_parses_and_weights_validate() {
        let fixed = three_cluster_config().replace("клуб", "three-cluster");
        let s = scenario_from_str(&fixed).unwrap();
        assert!(s.psd.as_single().is_none());
        let broken = fixed.replace("weight = 0.33333333333333334", "weight = 0.5");
        let err = scenario_from_str(&broken).unwrap_err();
        assert!(err.to_string().contains("sum to 1"), "{err}");
    }

    #[test]
    fn missing_field_is_config_error() {
        let text = gaussian_config(0.8).replace("spread_t_deg = 10.0\n", "");
        let err = scenario_from_str(&text).unwrap_err();
        assert!(err.to_string().contains("spread_t_deg"), "{err}");
    }

    #[test]
    fn unknown_variant_rejected_at_parse() {
        let text = gaussian_config(0.8).replace("\"iid\"", "\"waterfilling\"");
        let err = scenario_from_str(&text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn run_writes_curves_and_manifest_deterministically() {
        let tmp = tempfile::tempdir().unwrap();
        let mut s = scenario_from_str(&gaussian_config(0.8)).unwrap();
        s.out_dir = tmp.path().join("a");
        let out1 = run_scenario(&s).unwrap();
        assert_eq!(out1.curve_files.len(), 3);
        assert!(out1.manifest_file.exists());

        s.out_dir = tmp.path().join("b");
        let out2 = run_scenario(&s).unwrap();
        for ((_, f1), (_, f2)) in out1.curve_files.iter().zip(&out2.curve_files) {
            let b1 = std::fs::read(f1).unwrap();
            let b2 = std::fs::read(f2).unwrap();
            assert_eq!(b1, b2, "CSV bytes differ between identical runs");
            assert!(!b1.is_empty());
        }
        let manifest = std::fs::read_to_string(&out1.manifest_file).unwrap();
        for needle in [
            "quadrature_refine_tol",
            "eigen_clamp_rel",
            "sqrt_reconstruction_rel",
            "trials",
            "seed",
        ] {
            assert!(manifest.contains(needle), "manifest missing {needle}");
        }
    }

    #[test]
    fn different_seed_changes_curves() {
        let tmp = tempfile::tempdir().unwrap();
        let mut s = scenario_from_str(&gaussian_config(0.8)).unwrap();
        s.variants = vec![Variant::Iid];
        s.out_dir = tmp.path().join("a");
        let out1 = run_scenario(&s).unwrap();
        s.seed = 8;
        s.out_dir = tmp.path().join("b");
        let out2 = run_scenario(&s).unwrap();
        assert_ne!(
            std::fs::read(&out1.curve_files[0].1).unwrap(),
            std::fs::read(&out2.curve_files[0].1).unwrap()
        );
    }

    #[test]
    fn grid_counts_modes_of_three_cluster_mixture() {
        let fixed = three_cluster_config().replace("клуб", "three-cluster");
        let s = scenario_from_str(&fixed).unwrap();
        let exact = psd_grid(&s, GridVariant::Exact, 121);
        assert_eq!(count_local_maxima(&exact, 0.01), 3);
        let kron = psd_grid(&s, GridVariant::Kronecker, 121);
        assert_eq!(count_local_maxima(&kron, 0.01), 9);
    }

    #[test]
    fn grid_unimodal_kronecker_has_single_mode() {
        let s = scenario_from_str(&gaussian_config(0.8)).unwrap();
        let kron = psd_grid(&s, GridVariant::Kronecker, 121);
        assert_eq!(count_local_maxima(&kron, 0.01), 1);
    }

    #[test]
    fn grid_csv_export_schema_and_determinism() {
        let tmp = tempfile::tempdir().unwrap();
        let mut s = scenario_from_str(&gaussian_config(0.8)).unwrap();
        s.out_dir = tmp.path().to_path_buf();
        let (file, grid) = export_psd_grid(&s, GridVariant::Exact, 31).unwrap();
        let text = std::fs::read_to_string(&file).unwrap();
        assert!(text.starts_with("phi_deg,phi_r_deg,density\n"));
        assert_eq!(text.lines().count(), 31 * 31 + 1);
        assert_eq!(grid.values.len(), 31);
        let (file2, _) = export_psd_grid(&s, GridVariant::Exact, 31).unwrap();
        assert_eq!(
            std::fs::read(&file).unwrap(),
            std::fs::read(&file2).unwrap()
        );
    }

    #[test]
    fn laplacian_grid_point_on_mean_is_capped() {
        // Mean at exactly 0°: with an odd resolution the grid hits it.
        let text = gaussian_config(0.5)
            .replace("family = \"gaussian\"", "family = \"laplacian\"")
            .replace("mean_departure_deg = 90.0", "mean_departure_deg = 0.0")
            .replace("mean_arrival_deg = 90.0", "mean_arrival_deg = 0.0");
        let s = scenario_from_str(&text).unwrap();
        let grid = psd_grid(&s, GridVariant::Exact, 120); // grid point at 0
        for row in &grid.values {
            for &v in row {
                assert!(v.is_finite());
            }
        }
    }
}
