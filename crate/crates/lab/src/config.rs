//! JSON experiment configuration and its validation into a runnable [`Plan`].

use std::fmt;
use std::path::{Path, PathBuf};

use kreiss_core::grid::Grid;
use kreiss_core::operators::{build_diagonal, build_jordan, build_wave};
use kreiss_core::{CMat, CVec, OperatorSystem, WaveTruncationParams};
use num_complex::Complex64;
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub operator: OperatorSpec,
    /// `ω` in `A + ω`; applied after `reverse`.
    #[serde(default)]
    pub shift: f64,
    /// Replace `A` by `-A`.
    #[serde(default)]
    pub reverse: bool,
    pub alpha: f64,
    #[serde(default)]
    pub grids: GridsSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Trial vectors; default is the all-ones vector.
    #[serde(default)]
    pub vectors: Option<Vec<Vec<ComplexValue>>>,
    #[serde(default)]
    pub identities: IdentitiesSpec,
    #[serde(default)]
    pub fit: FitSpec,
    #[serde(default)]
    pub wave_demo: WaveDemoSpec,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub stages: Vec<Stage>,
    /// Worker threads; default is the available parallelism.
    #[serde(default)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OperatorSpec {
    Diagonal {
        eigenvalues: Vec<ComplexValue>,
    },
    Jordan {
        eigenvalue: ComplexValue,
        size: usize,
    },
    Wave {
        nx: usize,
        ny: usize,
    },
    Matrix {
        entries: Vec<Vec<ComplexValue>>,
        #[serde(default)]
        weight: Option<Vec<f64>>,
    },
}

/// A complex number written as `x` or `[re, im]`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexValue> for Complex64 {
    fn from(v: ComplexValue) -> Self {
        match v {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A grid written as an explicit list or as `{"min", "max", "count", "spacing"}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Spaced(SpacedGrid),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacedGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl GridSpec {
    fn to_grid(&self) -> Grid {
        match self {
            GridSpec::Values(v) => Grid::Values(v.clone()),
            GridSpec::Spaced(g) => match g.spacing {
                Spacing::Linear => Grid::linear(g.min, g.max, g.count),
                Spacing::Log => Grid::log(g.min, g.max, g.count),
            },
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsSpec {
    /// `r = -Re λ` for the sweep. Default: 25 log-spaced points in `[1e-2, 10]`.
    pub r: Option<GridSpec>,
    /// `Im λ` for the sweep. Default: 161 points in `[-20, 20]`.
    pub beta: Option<GridSpec>,
    /// Times for the Cesàro and bound stages. Default: `4, 8, 16, 32, 64`.
    pub t: Option<GridSpec>,
    /// Times for the growth fit. Default: `2, 2.5, …, 64`.
    pub fit_t: Option<GridSpec>,
    /// Enables the strip-restricted Kreiss check in the `kreiss` stage.
    pub strip_r: Option<GridSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance of the resolvent line integrals.
    #[serde(default = "default_quadrature_tol")]
    pub quadrature: f64,
}

fn default_quadrature_tol() -> f64 {
    1e-6
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quadrature: default_quadrature_tol(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesSpec {
    /// Contour distance for the Plancherel check.
    #[serde(default = "default_plancherel_r")]
    pub plancherel_r: f64,
    /// Times for the resolvent-to-Cesàro check. Default: `2, 4, 8`.
    #[serde(default)]
    pub cesaro_t: Option<GridSpec>,
    /// Contour distances for the `L²` resolvent estimate. Default: `0.1, 1, 10`.
    #[serde(default)]
    pub lemma_r: Option<GridSpec>,
}

fn default_plancherel_r() -> f64 {
    1.0
}

impl Default for IdentitiesSpec {
    fn default() -> Self {
        IdentitiesSpec {
            plancherel_r: default_plancherel_r(),
            cesaro_t: None,
            lemma_r: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    #[serde(default = "default_models")]
    pub models: Vec<String>,
    /// Fixed exponential rate for the `shifted` model.
    #[serde(default)]
    pub omega: Option<f64>,
}

fn default_models() -> Vec<String> {
    vec!["power".into(), "power-log".into()]
}

impl Default for FitSpec {
    fn default() -> Self {
        FitSpec {
            models: default_models(),
            omega: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveDemoSpec {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default)]
    pub strip_r: Option<GridSpec>,
    #[serde(default)]
    pub strip_beta: Option<GridSpec>,
    #[serde(default)]
    pub theorem_t: Option<GridSpec>,
    #[serde(default)]
    pub fit_t: Option<GridSpec>,
}

fn default_t_max() -> f64 {
    30.0
}

impl Default for WaveDemoSpec {
    fn default() -> Self {
        WaveDemoSpec {
            t_max: default_t_max(),
            strip_r: None,
            strip_beta: None,
            theorem_t: None,
            fit_t: None,
        }
    }
}

/// Pipeline stages, declared in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    ResolventSweep,
    Kreiss,
    Cesaro,
    VerifyTheorem,
    VerifyIdentities,
    FitGrowth,
    WaveDemo,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::ResolventSweep => "resolvent-sweep",
            Stage::Kreiss => "kreiss",
            Stage::Cesaro => "cesaro",
            Stage::VerifyTheorem => "verify-theorem",
            Stage::VerifyIdentities => "verify-identities",
            Stage::FitGrowth => "fit-growth",
            Stage::WaveDemo => "wave-demo",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated configuration: every grid satisfies the preconditions of the
/// stages that consume it.
#[derive(Debug, Clone)]
pub struct Plan {
    pub system: OperatorSystem,
    /// Set for `wave` operators.
    pub wave: Option<WaveTruncationParams>,
    pub alpha: f64,
    /// Sorted and deduplicated.
    pub stages: Vec<Stage>,
    pub r: Vec<f64>,
    pub beta: Vec<f64>,
    pub t: Vec<f64>,
    pub fit_t: Vec<f64>,
    pub strip_r: Option<Vec<f64>>,
    pub tol: f64,
    pub vectors: Vec<CVec>,
    pub plancherel_r: f64,
    pub cesaro_t: Vec<f64>,
    pub lemma_r: Vec<f64>,
    pub models: Vec<kreiss_core::bounds::GrowthModel>,
    pub omega: Option<f64>,
    pub wave_demo: WaveDemoPlan,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct WaveDemoPlan {
    pub t_max: f64,
    pub grids: kreiss_core::bounds::DemoGrids,
}

impl Plan {
    pub fn has(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }
}

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

/// Reads and parses a config file. Errors name the offending field path.
pub fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        Failure::Config(msg) => config_err(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<ExperimentConfig, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            config_err(inner.to_string())
        } else {
            config_err(format!("at `{path}`: {inner}"))
        }
    })
}

fn values(spec: &Option<GridSpec>, default: Grid, field: &str) -> Result<Vec<f64>, Failure> {
    let grid = spec.as_ref().map_or(default, GridSpec::to_grid);
    grid.validate()
        .map_err(|e| config_err(format!("grid `{field}`: {e}")))?;
    Ok(grid.values())
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(config_err(msg()))
    }
}

fn build_system(spec: &OperatorSpec) -> Result<(OperatorSystem, Option<WaveTruncationParams>), Failure> {
    let sys = match spec {
        OperatorSpec::Diagonal { eigenvalues } => {
            let eigs: Vec<Complex64> = eigenvalues.iter().map(|&v| v.into()).collect();
            build_diagonal(&eigs)?
        }
        OperatorSpec::Jordan { eigenvalue, size } => build_jordan((*eigenvalue).into(), *size)?,
        OperatorSpec::Wave { nx, ny } => {
            let params = WaveTruncationParams::new(*nx, *ny)?;
            return Ok((build_wave(params)?, Some(params)));
        }
        OperatorSpec::Matrix { entries, weight } => {
            let n = entries.len();
            require(n > 0, || "operator.entries must be nonempty".into())?;
            if let Some((i, row)) = entries.iter().enumerate().find(|(_, row)| row.len() != n) {
                return Err(config_err(format!(
                    "operator.entries[{i}] has {} entries, expected {n}",
                    row.len()
                )));
            }
            let gen = CMat::from_fn(n, n, |i, j| entries[i][j].into());
            let weight = weight.clone().unwrap_or_else(|| vec![1.0; n]);
            OperatorSystem::new(gen, weight, "matrix")?
        }
    };
    Ok((sys, None))
}

impl ExperimentConfig {
    /// Builds the system and checks every enabled stage's preconditions.
    pub fn plan(&self) -> Result<Plan, Failure> {
        require(self.alpha.is_finite() && self.alpha > 0.0, || {
            format!("alpha must be positive, got {}", self.alpha)
        })?;
        require(!self.stages.is_empty(), || "stages must list at least one stage".into())?;
        require(self.shift.is_finite(), || "shift must be finite".into())?;
        if let Some(w) = self.workers {
            require(w >= 1, || "workers must be at least 1".into())?;
        }
        let mut stages = self.stages.clone();
        stages.sort();
        stages.dedup();

        let (mut system, wave) = build_system(&self.operator)?;
        if self.reverse {
            system = system.reversed();
        }
        system = system.shifted(self.shift);

        let tol = self.tolerances.quadrature;
        require(tol > 0.0 && tol < 1.0, || {
            format!("tolerances.quadrature must lie in (0, 1), got {tol}")
        })?;

        let vectors: Vec<CVec> = match &self.vectors {
            None => vec![CVec::from_element(system.dim(), Complex64::new(1.0, 0.0))],
            Some(list) => {
                require(!list.is_empty(), || "vectors must not be empty".into())?;
                let mut out = Vec::with_capacity(list.len());
                for (k, v) in list.iter().enumerate() {
                    require(v.len() == system.dim(), || {
                        format!("vectors[{k}] has length {}, system dimension is {}", v.len(), system.dim())
                    })?;
                    let x = CVec::from_iterator(v.len(), v.iter().map(|&z| Complex64::from(z)));
                    require(x.iter().all(|z| z.re.is_finite() && z.im.is_finite()), || {
                        format!("vectors[{k}] has non-finite entries")
                    })?;
                    require(system.norm_sqr(&x) > 0.0, || format!("vectors[{k}] is zero"))?;
                    out.push(x);
                }
                out
            }
        };

        let g = &self.grids;
        let r = values(&g.r, Grid::log(1e-2, 10.0, 25), "grids.r")?;
        let beta = values(&g.beta, Grid::linear(-20.0, 20.0, 161), "grids.beta")?;
        let t = values(&g.t, Grid::Values(vec![4.0, 8.0, 16.0, 32.0, 64.0]), "grids.t")?;
        let fit_t = values(&g.fit_t, Grid::linear(2.0, 64.0, 125), "grids.fit_t")?;
        let strip_r = match &g.strip_r {
            Some(_) => Some(values(&g.strip_r, Grid::Values(vec![]), "grids.strip_r")?),
            None => None,
        };
        let id = &self.identities;
        let cesaro_t = values(&id.cesaro_t, Grid::Values(vec![2.0, 4.0, 8.0]), "identities.cesaro_t")?;
        let lemma_r = values(&id.lemma_r, Grid::Values(vec![0.1, 1.0, 10.0]), "identities.lemma_r")?;

        let has = |s: Stage| stages.contains(&s);
        if has(Stage::ResolventSweep) || has(Stage::Kreiss) {
            require(r.iter().all(|v| *v > 0.0), || "grids.r values must be positive".into())?;
        }
        if let Some(strip) = &strip_r {
            require(strip.iter().all(|v| *v > 0.0 && *v < 1.0), || {
                "grids.strip_r values must lie in (0, 1)".into()
            })?;
        }
        if has(Stage::Cesaro) {
            require(t.iter().all(|v| *v > 1.0), || "cesaro stage needs grids.t > 1".into())?;
        }
        if has(Stage::VerifyTheorem) {
            let (bound, which) = if self.alpha <= 1.0 { (2.0, "2") } else { (3.0, "3") };
            require(t.iter().all(|v| *v > bound), || {
                format!("verify-theorem with alpha = {} needs grids.t > {which}", self.alpha)
            })?;
        }
        if has(Stage::VerifyIdentities) {
            require(id.plancherel_r.is_finite() && id.plancherel_r > 0.0, || {
                "identities.plancherel_r must be positive".into()
            })?;
            require(cesaro_t.iter().all(|v| *v > 1.0), || {
                "identities.cesaro_t values must exceed 1".into()
            })?;
            require(lemma_r.iter().all(|v| *v > 0.0), || {
                "identities.lemma_r values must be positive".into()
            })?;
        }
        let mut models = Vec::new();
        for name in &self.fit.models {
            let model = kreiss_core::bounds::GrowthModel::parse(name).ok_or_else(|| {
                config_err(format!("fit.models: unknown model `{name}` (power | power-log | shifted)"))
            })?;
            models.push(model);
        }
        if has(Stage::FitGrowth) {
            require(!models.is_empty(), || "fit.models must not be empty".into())?;
            require(fit_t.len() >= 3, || "grids.fit_t needs at least 3 points".into())?;
            require(fit_t.iter().all(|v| *v >= 2.0), || "grids.fit_t values must be >= 2".into())?;
            require(fit_t.windows(2).all(|w| w[1] > w[0]), || {
                "grids.fit_t must be strictly increasing".into()
            })?;
            if models.contains(&kreiss_core::bounds::GrowthModel::Shifted) {
                require(self.fit.omega.is_some_and(f64::is_finite), || {
                    "the shifted model needs a finite fit.omega".into()
                })?;
            }
        }

        let wd = &self.wave_demo;
        let demo_grid = |spec: &Option<GridSpec>, field: &str| -> Result<Option<Grid>, Failure> {
            match spec {
                None => Ok(None),
                Some(s) => {
                    let grid = s.to_grid();
                    grid.validate()
                        .map_err(|e| config_err(format!("grid `wave_demo.{field}`: {e}")))?;
                    Ok(Some(grid))
                }
            }
        };
        let mut demo_grids = kreiss_core::bounds::DemoGrids::default();
        if let Some(grid) = demo_grid(&wd.strip_r, "strip_r")? {
            demo_grids.strip_r = grid;
        }
        demo_grids.strip_beta = demo_grid(&wd.strip_beta, "strip_beta")?;
        demo_grids.theorem_t = demo_grid(&wd.theorem_t, "theorem_t")?;
        demo_grids.fit_t = demo_grid(&wd.fit_t, "fit_t")?;
        if has(Stage::WaveDemo) {
            require(wave.is_some(), || "wave-demo needs an operator of kind `wave`".into())?;
            require(wd.t_max.is_finite() && wd.t_max >= 8.0, || {
                format!("wave_demo.t_max must be at least 8, got {}", wd.t_max)
            })?;
            require(
                demo_grids.strip_r.values().iter().all(|v| *v > 0.0 && *v < 1.0),
                || "wave_demo.strip_r values must lie in (0, 1)".into(),
            )?;
            if let Some(g) = &demo_grids.theorem_t {
                require(g.values().iter().all(|v| *v > 2.0), || {
                    "wave_demo.theorem_t values must exceed 2".into()
                })?;
            }
            if let Some(g) = &demo_grids.fit_t {
                let v = g.values();
                require(v.len() >= 3 && v.iter().all(|x| *x >= 2.0), || {
                    "wave_demo.fit_t needs at least 3 values >= 2".into()
                })?;
                require(v.windows(2).all(|w| w[1] > w[0]), || {
                    "wave_demo.fit_t must be strictly increasing".into()
                })?;
            }
        }

        Ok(Plan {
            system,
            wave,
            alpha: self.alpha,
            stages,
            r,
            beta,
            t,
            fit_t,
            strip_r,
            tol,
            vectors,
            plancherel_r: id.plancherel_r,
            cesaro_t,
            lemma_r,
            models,
            omega: self.fit.omega,
            wave_demo: WaveDemoPlan {
                t_max: wd.t_max,
                grids: demo_grids,
            },
            output_dir: self.output_dir.clone(),
            workers: self.workers,
        })
    }
}
