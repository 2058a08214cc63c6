//! TOML run configuration: model parameters, initial profile presets,
//! observation schedule, PDE discretization and output paths. One root seed
//! feeds every named substream; `AEP_SEED` overrides it for CI runs.

use aep_core::dynamics::AngleKind;
use aep_core::hydro::{PdeConfig, TimeScheme};
use aep_core::lattice::InitialProfile;
use aep_core::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub profile: ProfileSection,
    #[serde(default)]
    pub observation: ObservationSection,
    #[serde(default)]
    pub pde: PdeSection,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub selfdiff: SelfdiffSection,
    pub paths: PathsSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub n: usize,
    pub lambda: f64,
    pub beta: f64,
    pub t_end: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub replicas: usize,
    /// "two-type" or "continuum".
    #[serde(default = "default_angles")]
    pub angles: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    /// "uniform", "two-type", "two-type-smooth" or "cosine-density".
    pub preset: String,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub amp: f64,
    #[serde(default)]
    pub plus: f64,
    #[serde(default)]
    pub minus: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservationSection {
    /// Snapshot times; must be sorted and nonnegative. Empty means initial
    /// and final time only.
    pub times: Vec<f64>,
    /// Output grid side; the block side is N / grid.
    pub grid: usize,
    /// Shared angle-bin count (observables and PDE).
    pub bins: usize,
    /// Full-cluster box radii tracked along the run.
    pub cluster_p: Vec<usize>,
}

impl Default for ObservationSection {
    fn default() -> Self {
        ObservationSection {
            times: Vec::new(),
            grid: 8,
            bins: 8,
            cluster_p: vec![1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdeSection {
    /// Grid side of the PDE solve.
    pub cells: usize,
    /// Time step; 0 means 0.8 of the stability bound.
    pub dt: f64,
    /// "euler" or "heun".
    pub scheme: String,
    pub gamma_samples: usize,
    pub limiter: bool,
    pub cfl_safety: f64,
    /// "none" or "heat": compare the final density against the closed-form
    /// heat kernel decay (valid for the cosine-density preset at lambda = 0).
    pub reference: String,
}

impl Default for PdeSection {
    fn default() -> Self {
        PdeSection {
            cells: 64,
            dt: 0.0,
            scheme: "heun".into(),
            gamma_samples: 2000,
            limiter: true,
            cfl_safety: 0.25,
            reference: "none".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    /// Lattice sides to compare against the PDE solution.
    pub sizes: Vec<usize>,
    /// Side of the shared coarse grid.
    pub grid: usize,
    /// PDE grid side used for the reference solve.
    pub pde_cells: usize,
}

impl Default for CompareSection {
    fn default() -> Self {
        CompareSection {
            sizes: vec![32, 64, 96],
            grid: 8,
            pde_cells: 32,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelfdiffSection {
    pub densities: Vec<f64>,
    pub n: usize,
    pub t_end: f64,
    pub replicas: usize,
}

impl Default for SelfdiffSection {
    fn default() -> Self {
        SelfdiffSection {
            densities: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            n: 64,
            t_end: 0.1,
            replicas: 16,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub output: PathBuf,
    #[serde(default)]
    pub ds_table: Option<PathBuf>,
}

fn one() -> usize {
    1
}

fn default_angles() -> String {
    "two-type".into()
}

impl RunConfig {
    /// Parses a config file and applies the `AEP_SEED` override.
    pub fn load(path: &Path) -> Result<(RunConfig, String)> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("config parse error: {e}")))?;
        if let Ok(seed) = std::env::var("AEP_SEED") {
            cfg.model.seed = seed
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("bad AEP_SEED: {e}")))?;
        }
        cfg.validate()?;
        Ok((cfg, text))
    }

    pub fn angle_kind(&self) -> Result<AngleKind> {
        match self.model.angles.as_str() {
            "two-type" => Ok(AngleKind::TwoType),
            "continuum" => Ok(AngleKind::Continuum),
            other => Err(Error::InvalidParameter(format!(
                "model.angles must be \"two-type\" or \"continuum\", got {other:?}"
            ))),
        }
    }

    /// Builds the initial profile from the preset.
    pub fn build_profile(&self) -> Result<InitialProfile> {
        let p = &self.profile;
        match p.preset.as_str() {
            "uniform" => Ok(InitialProfile::uniform(p.alpha)),
            "two-type" => {
                let (plus, minus) = (p.plus, p.minus);
                Ok(InitialProfile::two_type(move |_, _| plus, move |_, _| minus))
            }
            "two-type-smooth" => {
                let (plus, minus, amp) = (p.plus, p.minus, p.amp);
                Ok(InitialProfile::two_type(
                    move |u1, _| plus + amp * (std::f64::consts::TAU * u1).cos(),
                    move |_, u2| minus + amp * (std::f64::consts::TAU * u2).sin(),
                ))
            }
            "cosine-density" => {
                let (alpha, amp) = (p.alpha, p.amp);
                Ok(InitialProfile::continuum(move |u1, _, _| {
                    alpha / std::f64::consts::TAU * (1.0 + amp * (std::f64::consts::TAU * u1).cos())
                }))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown profile preset {other:?}"
            ))),
        }
    }

    /// Snapshot schedule: the configured times, or {0, t_end} by default.
    pub fn schedule(&self) -> Vec<f64> {
        if self.observation.times.is_empty() {
            if self.model.t_end == 0.0 {
                vec![0.0]
            } else {
                vec![0.0, self.model.t_end]
            }
        } else {
            self.observation.times.clone()
        }
    }

    /// PDE configuration on `cells` grid cells with the shared bin count.
    pub fn pde_config(&self, cells: usize) -> Result<PdeConfig> {
        let scheme = match self.pde.scheme.as_str() {
            "euler" => TimeScheme::Euler,
            "heun" => TimeScheme::Heun,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "pde.scheme must be \"euler\" or \"heun\", got {other:?}"
                )))
            }
        };
        let mut cfg = PdeConfig::new(cells, self.observation.bins, self.model.lambda, self.model.beta);
        cfg.kind = self.angle_kind()?;
        if cfg.kind == AngleKind::TwoType {
            cfg.m = 2;
        }
        cfg.t_end = self.model.t_end;
        cfg.scheme = scheme;
        cfg.gamma_samples = self.pde.gamma_samples;
        cfg.limiter = self.pde.limiter;
        cfg.cfl_safety = self.pde.cfl_safety;
        cfg.seed = self.model.seed;
        if self.pde.dt > 0.0 {
            cfg.dt = self.pde.dt;
        } else {
            cfg.dt = 0.8 * cfg.cfl_bound();
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        let m = &self.model;
        if m.n == 0 {
            bad.push("model.n must be positive".to_string());
        }
        if m.lambda < 0.0 || m.lambda > m.n as f64 {
            bad.push(format!(
                "model.lambda = {} outside [0, N = {}]",
                m.lambda, m.n
            ));
        }
        if m.beta < 0.0 {
            bad.push("model.beta must be nonnegative".into());
        }
        if m.t_end < 0.0 {
            bad.push("model.t_end must be nonnegative".into());
        }
        if m.replicas == 0 {
            bad.push("model.replicas must be positive".into());
        }
        let obs = &self.observation;
        if obs.grid == 0 || self.model.n % obs.grid != 0 {
            bad.push(format!(
                "observation.grid = {} must divide model.n = {}",
                obs.grid, m.n
            ));
        }
        if obs.bins == 0 || obs.bins % 2 != 0 {
            bad.push(format!("observation.bins = {} must be positive and even", obs.bins));
        }
        if obs.times.windows(2).any(|w| w[1] <= w[0]) || obs.times.first().is_some_and(|&t| t < 0.0)
        {
            bad.push("observation.times must be sorted, distinct and nonnegative".into());
        }
        if obs.times.last().is_some_and(|&t| t > m.t_end) {
            bad.push("observation.times must not exceed model.t_end".into());
        }
        if self.angle_kind().is_err() {
            bad.push(format!("model.angles = {:?} unknown", m.angles));
        }
        match self.build_profile() {
            Err(e) => bad.push(format!("profile: {e}")),
            Ok(profile) => {
                // pointwise sub-unit mass on a coarse probe grid
                for i in 0..=16 {
                    for j in 0..=16 {
                        let (u1, u2) = (i as f64 / 16.0, j as f64 / 16.0);
                        if let Err(e) = profile.check_submass(u1, u2) {
                            bad.push(format!("profile: {e}"));
                            break;
                        }
                    }
                    if !bad.is_empty() && bad.last().unwrap().starts_with("profile:") {
                        break;
                    }
                }
                if matches!(profile, InitialProfile::Atomic { .. })
                    && self.model.angles != "two-type"
                {
                    bad.push("atomic profile presets require model.angles = \"two-type\"".into());
                }
            }
        }
        for &s in &self.compare.sizes {
            if self.compare.grid == 0 || s % self.compare.grid != 0 {
                bad.push(format!(
                    "compare.grid = {} must divide compare size {}",
                    self.compare.grid, s
                ));
            }
        }
        if self.compare.grid != 0 && self.compare.pde_cells % self.compare.grid != 0 {
            bad.push(format!(
                "compare.grid = {} must divide compare.pde_cells = {}",
                self.compare.grid, self.compare.pde_cells
            ));
        }
        for &rho in &self.selfdiff.densities {
            if !(0.0..=1.0).contains(&rho) {
                bad.push(format!("selfdiff density {rho} outside [0, 1]"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(bad.join("; ")))
        }
    }
}
