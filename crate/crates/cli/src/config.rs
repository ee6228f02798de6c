//! JSON run configuration.
//!
//! Every block except `task`, `grid`, `exponent.p_inf` and `potential.v_inf`
//! has defaults; [`RawConfig`] with defaults filled in is written back next to
//! the outputs so that each run can be replayed.

use std::path::Path;
use std::sync::Arc;

use nlground::analysis::{DipFamily, TrialSpec};
use nlground::exprlang::{parse, sample, Expr};
use nlground::{
    Exponent, Field, Grid, GridKind, InitProfile, Potential, ProblemSpec, SolveOptions,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Solve,
    SolveLimit,
    CheckCriterion,
    TrialBound,
    FindMinA,
    TranslateExperiment,
    SymmetryDefect,
    VerifyLemmas,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Solve => "solve",
            Task::SolveLimit => "solve-limit",
            Task::CheckCriterion => "check-criterion",
            Task::TrialBound => "trial-bound",
            Task::FindMinA => "find-min-a",
            Task::TranslateExperiment => "translate-experiment",
            Task::SymmetryDefect => "symmetry-defect",
            Task::VerifyLemmas => "verify-lemmas",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub dim: usize,
    pub kind: String,
    pub r_dom: f64,
    pub h: f64,
}

fn tail_tol() -> f64 {
    0.05
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentBlock {
    /// Defaults to the constant `p_inf`.
    #[serde(default)]
    pub expr: Option<String>,
    pub p_inf: f64,
    /// `p` is replaced by `max(p, clamp_floor)` when set.
    #[serde(default)]
    pub clamp_floor: Option<f64>,
    #[serde(default = "tail_tol")]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialBlock {
    #[serde(default)]
    pub expr: Option<String>,
    pub v_inf: f64,
    #[serde(default = "tail_tol")]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Gaussian,
    SolitonGuess,
    User,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub max_iter: usize,
    pub tol_grad: f64,
    pub tol_residual: f64,
    pub step_init: f64,
    pub armijo_shrink: f64,
    pub armijo_slope: f64,
    pub init_profile: InitKind,
    /// Required when `init_profile` is `user`.
    pub init_expr: Option<String>,
    pub rng_seed: u64,
    pub init_perturbation: f64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let d = SolveOptions::<f64>::default();
        SolverBlock {
            max_iter: d.max_iter,
            tol_grad: d.tol_grad,
            tol_residual: d.tol_residual,
            step_init: d.step_init,
            armijo_shrink: d.armijo_shrink,
            armijo_slope: d.armijo_slope,
            init_profile: InitKind::Gaussian,
            init_expr: None,
            rng_seed: d.rng_seed,
            init_perturbation: d.init_perturbation,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialBlock {
    pub psi: String,
    pub radius: f64,
    #[serde(default)]
    pub a: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FindMinABlock {
    pub a0: f64,
    pub a_max: f64,
    pub floor: f64,
}

impl Default for FindMinABlock {
    fn default() -> Self {
        FindMinABlock { a0: 0.125, a_max: 64.0, floor: 2.1 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateBlock {
    /// Field to translate; should vanish near the boundary.
    pub u_expr: String,
    pub shifts: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymmetryBlock {
    /// Candidate axes; when empty the direction is searched.
    pub axes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriterionBlock {
    pub rtol: f64,
}

impl Default for CriterionBlock {
    fn default() -> Self {
        CriterionBlock { rtol: nlground::analysis::DEFAULT_CRITERION_RTOL }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyBlock {
    pub samples: usize,
    pub seed: u64,
    pub slack: f64,
    pub identity_tol: f64,
    pub translate_tol: f64,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        VerifyBlock {
            samples: 100,
            seed: 0,
            slack: 1e-9,
            identity_tol: 1e-10,
            translate_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: String,
    pub profiles: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: "out".into(), profiles: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub task: Task,
    pub grid: GridBlock,
    pub exponent: ExponentBlock,
    pub potential: PotentialBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub trial: Option<TrialBlock>,
    #[serde(default)]
    pub find_min_a: FindMinABlock,
    #[serde(default)]
    pub translate: Option<TranslateBlock>,
    #[serde(default)]
    pub symmetry: SymmetryBlock,
    #[serde(default)]
    pub criterion: CriterionBlock,
    #[serde(default)]
    pub verify: VerifyBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// A validated configuration with every expression compiled and sampled.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub raw: RawConfig,
    pub grid: Arc<Grid<f64>>,
    pub spec: ProblemSpec<f64>,
    pub solve: SolveOptions<f64>,
    pub trial: Option<TrialSpec<f64>>,
    pub translate_u: Option<Field<f64>>,
}

fn at(key: &str) -> impl Fn(nlground::Error) -> CliError + '_ {
    move |e| CliError::Config { key: key.to_string(), message: e.to_string() }
}

fn bad(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config { key: key.to_string(), message: message.into() }
}

fn compile(key: &str, src: &str) -> Result<Expr, CliError> {
    parse(src).map_err(at(key))
}

fn sampled(key: &str, src: &str, grid: &Arc<Grid<f64>>) -> Result<Field<f64>, CliError> {
    let e = compile(key, src)?;
    sample(&e, grid).map_err(at(key))
}

/// Parses JSON text; deserialization errors carry the failing key path.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        CliError::Config { key, message: e.into_inner().to_string() }
    })?;
    validate(raw)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn validate(raw: RawConfig) -> Result<RunConfig, CliError> {
    let kind: GridKind = raw.grid.kind.parse().map_err(at("grid.kind"))?;
    let grid = Arc::new(Grid::build(raw.grid.dim, kind, raw.grid.r_dom, raw.grid.h).map_err(at("grid"))?);

    let e = &raw.exponent;
    let p_field = match &e.expr {
        Some(src) => sampled("exponent.expr", src, &grid)?,
        None => Field::constant(grid.clone(), e.p_inf),
    };
    let p_field = match e.clamp_floor {
        Some(f) if !(f > 2.0 && f <= e.p_inf) => {
            return Err(bad("exponent.clamp_floor", format!("must lie in (2, p_inf], got {f}")))
        }
        Some(f) => p_field.map(|p| p.max(f)),
        None => p_field,
    };
    let p = Exponent::new(p_field, e.p_inf, e.tail_tol).map_err(at("exponent"))?;

    let v = &raw.potential;
    let v_field = match &v.expr {
        Some(src) => sampled("potential.expr", src, &grid)?,
        None => Field::constant(grid.clone(), v.v_inf),
    };
    let v = Potential::new(v_field, v.v_inf, v.tail_tol).map_err(at("potential"))?;
    let spec = ProblemSpec::new(p, v).map_err(at("exponent"))?;

    let s = &raw.solver;
    let init_profile = match s.init_profile {
        InitKind::Gaussian => InitProfile::Gaussian,
        InitKind::SolitonGuess => InitProfile::SolitonGuess,
        InitKind::User => {
            let src = s
                .init_expr
                .as_deref()
                .ok_or_else(|| bad("solver.init_expr", "required when init_profile is user"))?;
            InitProfile::User(sampled("solver.init_expr", src, &grid)?)
        }
    };
    let solve = SolveOptions {
        max_iter: s.max_iter,
        tol_grad: s.tol_grad,
        tol_residual: s.tol_residual,
        step_init: s.step_init,
        armijo_shrink: s.armijo_shrink,
        armijo_slope: s.armijo_slope,
        init_profile,
        rng_seed: s.rng_seed,
        init_perturbation: s.init_perturbation,
        record_history: true,
    };
    solve.validate().map_err(at("solver"))?;

    let trial = match &raw.trial {
        Some(t) => Some(
            TrialSpec::new(compile("trial.psi", &t.psi)?, t.radius, t.a).map_err(at("trial"))?,
        ),
        None => None,
    };
    let translate_u = match &raw.translate {
        Some(t) => Some(sampled("translate.u_expr", &t.u_expr, &grid)?),
        None => None,
    };

    if !(raw.criterion.rtol >= 0.0 && raw.criterion.rtol.is_finite()) {
        return Err(bad("criterion.rtol", "must be finite and non-negative"));
    }
    if raw.verify.samples == 0 {
        return Err(bad("verify.samples", "must be positive"));
    }

    let cfg = RunConfig { raw, grid, spec, solve, trial, translate_u };
    cfg.check_task_blocks()?;
    Ok(cfg)
}

impl RunConfig {
    fn check_task_blocks(&self) -> Result<(), CliError> {
        match self.raw.task {
            Task::TrialBound | Task::FindMinA if self.trial.is_none() => {
                Err(bad("trial", format!("block required for task {}", self.raw.task.name())))
            }
            Task::TranslateExperiment if self.translate_u.is_none() => {
                Err(bad("translate", "block required for task translate-experiment"))
            }
            Task::TranslateExperiment if self.grid.kind() == GridKind::RadialNd => {
                Err(bad("grid.kind", "translations need a line1d or cartesian2d grid"))
            }
            Task::SymmetryDefect if self.grid.kind() != GridKind::Cartesian2d => {
                Err(bad("grid.kind", "symmetry-defect needs a cartesian2d grid"))
            }
            _ => Ok(()),
        }
    }

    /// Overrides the seeds of the solver and the lemma checks.
    pub fn set_seed(&mut self, seed: u64) {
        self.raw.solver.rng_seed = seed;
        self.raw.verify.seed = seed;
        self.solve.rng_seed = seed;
    }

    pub fn dip_family(&self) -> Result<DipFamily<f64>, CliError> {
        let t = self.raw.trial.as_ref().ok_or_else(|| bad("trial", "block required"))?;
        let f = &self.raw.find_min_a;
        let family = DipFamily {
            potential: self.spec.potential().clone(),
            p_inf: self.raw.exponent.p_inf,
            psi: compile("trial.psi", &t.psi)?,
            radius: t.radius,
            floor: f.floor,
            a0: f.a0,
            a_max: f.a_max,
        };
        family.exponent(f.a0).map_err(at("find_min_a"))?;
        Ok(family)
    }
}
