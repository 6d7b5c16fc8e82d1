//! Configuration-driven experiment runner.
//!
//! A run is described by one JSON file (see [`ExperimentConfig`]). All
//! artifacts are computed in memory and written only after the experiment
//! succeeds, so a failed run leaves the output directory untouched.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::criteria::{self, criterion_gradient, eval_criterion, CriterionKind};
use crate::dynamics::{
    integrate, sample_gaussian, sample_pairs, train_online, IntegratorConfig, Method, PcaSystem,
    RateSchedule, SvdSystem, Trajectory,
};
use crate::error::Error;
use crate::linalg::rng::{self, tag};
use crate::linalg::{default_step, fd_gradient, make_cross, make_spd, vector, Mat};
use crate::rules_pca::{self, PcaRuleKind, PcaState};
use crate::rules_svd::{self, SvdRuleKind, SvdState};
use crate::stability::{analyze_all, StabilityReport};

pub const DEFAULT_OUTPUT_DIR: &str = "out";

/// Relative-error bound reported as `pass` in `derivcheck.json`.
pub const DERIVCHECK_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Averaged,
    Online,
    Stability,
    Derivcheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Pca,
    Svd,
}

/// Union of the PCA and SVD kind names; [`ExperimentConfig::validate`]
/// checks the name against the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleName {
    L2,
    L2Ala,
    L2Simple,
    SumExact,
    SumMod,
    SumFull,
}

impl RuleName {
    pub fn pca(self) -> Option<PcaRuleKind> {
        match self {
            Self::L2 => Some(PcaRuleKind::L2),
            Self::L2Ala => Some(PcaRuleKind::L2Ala),
            Self::SumExact => Some(PcaRuleKind::SumExact),
            Self::SumMod => Some(PcaRuleKind::SumMod),
            Self::L2Simple | Self::SumFull => None,
        }
    }

    pub fn svd(self) -> Option<SvdRuleKind> {
        match self {
            Self::L2 => Some(SvdRuleKind::L2),
            Self::L2Simple => Some(SvdRuleKind::L2Simple),
            Self::SumFull => Some(SvdRuleKind::SumFull),
            Self::SumMod => Some(SvdRuleKind::SumMod),
            Self::L2Ala | Self::SumExact => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSource {
    /// Seeded matrix with a prescribed spectrum: eigenvalues for PCA,
    /// singular values for SVD. `cols` defaults to the spectrum length and
    /// `rows` to `cols`; `seed` defaults to the experiment seed.
    Generated {
        spectrum: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cols: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `rows,cols` header line followed by comma-separated rows. Relative
    /// paths are resolved against the config file's directory.
    Csv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSettings {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
    /// Record every `thin`-th state; the first and last are always kept.
    pub thin: usize,
    /// Stop once the residual falls below this value.
    pub stop_residual: Option<f64>,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            dt: d.dt,
            steps: d.steps,
            method: d.method,
            thin: d.thin,
            stop_residual: d.stop_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OnlineSettings {
    /// Number of samples, one update each.
    pub samples: usize,
    pub schedule: RateSchedule,
    /// Standard deviation of the additive output noise (SVD only).
    pub noise: f64,
}

impl Default for OnlineSettings {
    fn default() -> Self {
        Self {
            samples: 100_000,
            schedule: RateSchedule::default(),
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DerivcheckSettings {
    /// Seeded inputs per kernel.
    pub count: usize,
}

impl Default for DerivcheckSettings {
    fn default() -> Self {
        Self { count: 100 }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(DEFAULT_OUTPUT_DIR)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Required for `averaged` and `online`; `stability` implies `svd`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<Problem>,
    /// Required for `averaged` and `online`; `stability` implies `SUM_MOD`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixSource>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub online: OnlineSettings,
    #[serde(default)]
    pub derivcheck: DerivcheckSettings,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Adds `wall_time_s` to `summary.json`; off by default because it
    /// makes repeated runs differ.
    #[serde(default)]
    pub record_wall_time: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Io(String),
    Numeric(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Config(_) => "config",
            CliError::Numeric(Error::Divergence { .. }) => "divergence",
            CliError::Numeric(Error::GuardedScalar { .. }) => "guarded_scalar",
            CliError::Numeric(_) => "numeric",
        }
    }

    /// Single-line JSON diagnostic.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.category(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid config: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

fn config_err(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Strict parse: unknown keys, unknown enum values and invalid
/// combinations are errors. Relative CSV paths are resolved against the
/// file's directory.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_config_str(&text, base)
}

pub fn parse_config_str(text: &str, base: &Path) -> Result<ExperimentConfig, CliError> {
    let mut cfg: ExperimentConfig = serde_json::from_str(text).map_err(config_err)?;
    if let Some(MatrixSource::Csv { path }) = &mut cfg.matrix {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The problem a validated config runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Pca(PcaRuleKind),
    Svd(SvdRuleKind),
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let i = &self.integrator;
        if !(i.dt > 0.0 && i.dt.is_finite()) {
            return Err(config_err(format!("integrator.dt must be positive, got {}", i.dt)));
        }
        if i.steps == 0 {
            return Err(config_err("integrator.steps must be positive"));
        }
        if i.thin == 0 {
            return Err(config_err("integrator.thin must be at least 1"));
        }
        if let Some(tol) = i.stop_residual {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(config_err(format!("integrator.stop_residual must be positive, got {tol}")));
            }
        }
        let o = &self.online;
        if o.samples == 0 {
            return Err(config_err("online.samples must be positive"));
        }
        if !(o.noise >= 0.0 && o.noise.is_finite()) {
            return Err(config_err(format!("online.noise must be finite and ≥ 0, got {}", o.noise)));
        }
        o.schedule.validate().map_err(config_err)?;
        if self.derivcheck.count == 0 {
            return Err(config_err("derivcheck.count must be positive"));
        }
        match self.mode {
            Mode::Derivcheck => {
                if self.problem.is_some() || self.rule.is_some() || self.matrix.is_some() {
                    return Err(config_err("derivcheck mode takes no problem, rule or matrix"));
                }
            }
            _ => {
                self.rule()?;
                self.load_matrix()?;
            }
        }
        Ok(())
    }

    /// Problem and rule kind; `None` in derivcheck mode.
    pub fn rule(&self) -> Result<Option<Rule>, CliError> {
        let rule = match self.mode {
            Mode::Derivcheck => return Ok(None),
            Mode::Stability => {
                if self.problem == Some(Problem::Pca) {
                    return Err(config_err("stability mode analyzes the SVD problem only"));
                }
                if self.rule.is_some_and(|r| r != RuleName::SumMod) {
                    return Err(config_err("stability mode analyzes the SUM_MOD rule only"));
                }
                Rule::Svd(SvdRuleKind::SumMod)
            }
            Mode::Averaged | Mode::Online => {
                let problem = self.problem.ok_or_else(|| config_err("missing `problem`"))?;
                let name = self.rule.ok_or_else(|| config_err("missing `rule`"))?;
                match problem {
                    Problem::Pca => Rule::Pca(
                        name.pca()
                            .ok_or_else(|| config_err(format!("rule {name:?} is not a PCA rule")))?,
                    ),
                    Problem::Svd => Rule::Svd(
                        name.svd()
                            .ok_or_else(|| config_err(format!("rule {name:?} is not an SVD rule")))?,
                    ),
                }
            }
        };
        if self.mode == Mode::Online && rule == Rule::Svd(SvdRuleKind::SumFull) {
            return Err(config_err("SUM_FULL has no online form"));
        }
        Ok(Some(rule))
    }

    pub fn load_matrix(&self) -> Result<Mat, CliError> {
        let source = self.matrix.as_ref().ok_or_else(|| config_err("missing `matrix`"))?;
        let svd = !matches!(self.rule()?, Some(Rule::Pca(_)));
        let a = match source {
            MatrixSource::Csv { path } => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_err(format!("cannot read matrix {}: {e}", path.display())))?;
                Mat::from_csv(&text).map_err(config_err)?
            }
            MatrixSource::Generated { spectrum, rows, cols, seed } => {
                let n = cols.unwrap_or(spectrum.len());
                let m = rows.unwrap_or(n);
                let seed = seed.unwrap_or(self.seed);
                if svd {
                    make_cross(spectrum, m, n, seed).map_err(config_err)?
                } else {
                    if m != spectrum.len() || n != spectrum.len() {
                        return Err(config_err("a generated covariance is square with one eigenvalue per row"));
                    }
                    make_spd(spectrum, seed).map_err(config_err)?
                }
            }
        };
        if a.rows() < 2 || a.cols() < 2 {
            return Err(config_err(format!("matrix must be at least 2x2, got {}x{}", a.rows(), a.cols())));
        }
        if !vector::all_finite(a.as_slice()) {
            return Err(config_err("matrix has non-finite entries"));
        }
        if !svd {
            a.require_symmetric(crate::linalg::eig::SYMMETRY_TOL).map_err(config_err)?;
        }
        Ok(a)
    }

    fn integrator_config(&self) -> IntegratorConfig {
        let i = &self.integrator;
        IntegratorConfig {
            dt: i.dt,
            steps: i.steps,
            method: i.method,
            thin: i.thin,
            stop_residual: i.stop_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum StateJson {
    Pca(PcaState),
    Svd(SvdState),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mode: Mode,
    pub problem: Problem,
    pub rule: RuleName,
    /// Integration steps or samples consumed.
    pub steps: usize,
    pub final_state: StateJson,
    /// Stationary point the rule should approach.
    pub oracle_state: StateJson,
    /// Norm of the zero-point function at the final state.
    pub final_residual: f64,
    /// Largest of `factor_angles`.
    pub angle: f64,
    /// `arccos |cos|` between each estimated factor and its oracle, radians.
    pub factor_angles: Vec<f64>,
    /// `|estimate − oracle| / |oracle|` for each scalar.
    pub scalar_relative_errors: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelError {
    pub name: String,
    pub max_relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivReport {
    pub seed: u64,
    pub count: usize,
    pub tolerance: f64,
    pub kernels: Vec<KernelError>,
    pub pass: bool,
}

/// Files of a finished run, in write order.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        for (name, content) in &self.files {
            let path = dir.join(name);
            fs::write(&path, content).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn relative(estimate: f64, oracle: f64) -> f64 {
    (estimate - oracle).abs() / oracle.abs()
}

/// Runs the experiment and returns its artifacts without touching disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<Artifacts, CliError> {
    cfg.validate()?;
    let files = match cfg.mode {
        Mode::Derivcheck => {
            let report = derivative_check(cfg.seed, cfg.derivcheck.count).map_err(CliError::Numeric)?;
            vec![("derivcheck.json".to_string(), to_json(&report))]
        }
        Mode::Stability => {
            let a = cfg.load_matrix()?;
            let reports: Vec<StabilityReport> = analyze_all(&a).map_err(|e| match e {
                Error::UnsupportedOrientation { .. } => config_err(e),
                e => CliError::Numeric(e),
            })?;
            vec![("stability.json".to_string(), to_json(&reports))]
        }
        Mode::Averaged | Mode::Online => {
            let started = Instant::now();
            let (traj, mut summary) = run_dynamics(cfg)?;
            if cfg.record_wall_time {
                summary.wall_time_s = Some(started.elapsed().as_secs_f64());
            }
            vec![
                ("trajectory.csv".to_string(), traj.to_csv()),
                ("summary.json".to_string(), to_json(&summary)),
            ]
        }
    };
    Ok(Artifacts { files })
}

/// [`execute`], then write the artifacts to `out` (or the configured
/// output directory).
pub fn run(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Artifacts, CliError> {
    let artifacts = execute(cfg)?;
    artifacts.write(out.unwrap_or(&cfg.output_dir))?;
    Ok(artifacts)
}

fn run_dynamics(cfg: &ExperimentConfig) -> Result<(Trajectory, Summary), CliError> {
    let a = cfg.load_matrix()?;
    let online = cfg.mode == Mode::Online;
    let rule = cfg.rule()?.expect("dynamics modes have a rule");
    let numeric = CliError::Numeric;
    let (traj, final_state, oracle_state, factor_angles, scalar_relative_errors) = match rule {
        Rule::Pca(kind) => {
            let system = PcaSystem::new(kind, a.clone()).map_err(config_err)?;
            let z0 = rules_pca::init_state(kind, &a, cfg.seed, online).map_err(numeric)?.to_vec();
            let traj = if online {
                let samples = sample_gaussian(&a, cfg.seed, cfg.online.samples).map_err(config_err)?;
                train_online(&system, samples, &z0, &cfg.online.schedule, cfg.online.samples, cfg.integrator.thin)
            } else {
                integrate(&system, &z0, &cfg.integrator_config())
            }
            .map_err(numeric)?;
            let s = PcaState::from_slice(&traj.last().state).map_err(numeric)?;
            let oracle = system.oracle_state().map_err(numeric)?;
            let angles = vec![vector::line_angle(&s.w, &system.oracle_w)];
            let errs = vec![relative(s.lambda, oracle.lambda)];
            (traj, StateJson::Pca(s), StateJson::Pca(oracle), angles, errs)
        }
        Rule::Svd(kind) => {
            let system = SvdSystem::new(kind, a.clone()).map_err(config_err)?;
            let z0 = rules_svd::init_state(kind, &a, cfg.seed, online).map_err(numeric)?.to_vec();
            let traj = if online {
                let samples = sample_pairs(&a, cfg.seed, cfg.online.samples, cfg.online.noise).map_err(config_err)?;
                train_online(&system, samples, &z0, &cfg.online.schedule, cfg.online.samples, cfg.integrator.thin)
            } else {
                integrate(&system, &z0, &cfg.integrator_config())
            }
            .map_err(numeric)?;
            let (m, n) = system.dims();
            let s = SvdState::from_slice(&traj.last().state, m, n, kind.is_sum()).map_err(numeric)?;
            let oracle = system.oracle_state().map_err(numeric)?;
            let angles = vec![
                vector::line_angle(&s.u, &system.oracle_u),
                vector::line_angle(&s.v, &system.oracle_v),
            ];
            let mut errs = vec![relative(s.sigma, oracle.sigma)];
            if let (Some(r), Some(r0)) = (s.rho, oracle.rho) {
                errs.push(relative(r, r0));
            }
            (traj, StateJson::Svd(s), StateJson::Svd(oracle), angles, errs)
        }
    };
    let last = traj.last();
    let summary = Summary {
        mode: cfg.mode,
        problem: if matches!(rule, Rule::Pca(_)) { Problem::Pca } else { Problem::Svd },
        rule: cfg.rule.expect("validated"),
        steps: last.step,
        final_residual: last.obs.residual,
        angle: factor_angles.iter().copied().fold(0.0, f64::max),
        factor_angles,
        scalar_relative_errors,
        final_state,
        oracle_state,
        wall_time_s: None,
        config: cfg.clone(),
    };
    Ok((traj, summary))
}

fn relative_error(approx: &[f64], exact: &[f64]) -> f64 {
    let scale = vector::norm(exact).max(vector::norm(approx)).max(f64::MIN_POSITIVE);
    vector::norm(&vector::sub(approx, exact)) / scale
}

/// Largest relative error between each closed-form gradient and central
/// differences over `count` seeded inputs per kernel.
pub fn derivative_check(seed: u64, count: usize) -> crate::Result<DerivReport> {
    let mut r = rng::stream(seed, tag::DERIVCHECK);
    let mut worst = [0.0f64; 5];
    for _ in 0..count {
        let n = 2 + (rng::uniform(&mut r, 0.0, 7.0) as usize).min(6);
        let m = n + (rng::uniform(&mut r, 0.0, 3.0) as usize).min(2);
        let b = Mat::from_fn(n, n, |_, _| rng::normal(&mut r));
        let c = b.add(&b.transpose()).scale(0.5);
        let w = rng::normal_vec(&mut r, n);
        let a = rng::normal_vec(&mut r, n);
        let lambda = rng::uniform(&mut r, 0.5, 3.0);
        let cross = Mat::from_fn(m, n, |_, _| rng::normal(&mut r));
        let u = rng::normal_vec(&mut r, m);
        let v = rng::normal_vec(&mut r, n);
        let sigma = rng::uniform(&mut r, 0.5, 3.0);

        let h = default_step(&w);
        let fd = fd_gradient(|x| criteria::rayleigh_quotient(&c, x), &w, h)?;
        worst[0] = worst[0].max(relative_error(&criteria::rayleigh_gradient(&c, &w)?, &fd));

        let fd = fd_gradient(|x| Ok(vector::dot(&a, x) / vector::norm(x)), &w, h)?;
        worst[1] = worst[1].max(relative_error(&criteria::unit_scalar_gradient(&a, &w)?, &fd));

        let spd = c.shifted(c.frobenius() + 1.0);
        let pca = PcaState::new(w.clone(), lambda);
        for (k, kind) in [(2, CriterionKind::PPca1), (3, CriterionKind::PPca2)] {
            let z = pca.to_vec();
            let fd = fd_gradient(
                |x| eval_criterion(kind, &spd, &PcaState::from_slice(x)?),
                &z,
                default_step(&z),
            )?;
            worst[k] = worst[k].max(relative_error(&criterion_gradient(kind, &spd, &pca)?, &fd));
        }

        let svd = SvdState::new(u, v, sigma, None);
        let z = svd.to_vec();
        let fd = fd_gradient(
            |x| eval_criterion(CriterionKind::PSvd1, &cross, &SvdState::from_slice(x, m, n, false)?),
            &z,
            default_step(&z),
        )?;
        worst[4] = worst[4].max(relative_error(&criterion_gradient(CriterionKind::PSvd1, &cross, &svd)?, &fd));
    }
    let names = ["rayleigh_gradient", "unit_scalar_gradient", "P_PCA1", "P_PCA2", "P_SVD1"];
    let kernels: Vec<KernelError> = names
        .iter()
        .zip(worst)
        .map(|(name, e)| KernelError { name: name.to_string(), max_relative_error: e })
        .collect();
    Ok(DerivReport {
        seed,
        count,
        tolerance: DERIVCHECK_TOL,
        pass: kernels.iter().all(|k| k.max_relative_error < DERIVCHECK_TOL),
        kernels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        parse_config_str(text, Path::new(""))
    }

    const MINIMAL: &str = r#"{"mode":"averaged","problem":"pca","rule":"L2",
        "matrix":{"generated":{"spectrum":[10,1]}},"seed":7}"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse(MINIMAL).unwrap();
        assert_eq!(cfg.integrator, IntegratorSettings::default());
        assert_eq!(cfg.integrator.dt, 0.05);
        assert_eq!(cfg.integrator.steps, 10_000);
        assert_eq!(cfg.online, OnlineSettings::default());
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
        assert!(!cfg.record_wall_time);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("\"seed\":7", "\"integrator\":{\"dtt\":0.1}");
        let err = parse(&text).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("dtt"), "{err}");
    }

    #[test]
    fn online_sum_full_is_rejected() {
        let text = r#"{"mode":"online","problem":"svd","rule":"SUM_FULL",
            "matrix":{"generated":{"spectrum":[3,1]}}}"#;
        let err = parse(text).unwrap_err();
        assert!(err.to_string().contains("SUM_FULL"), "{err}");
        let averaged = text.replace("online", "averaged");
        assert!(parse(&averaged).is_ok());
    }

    #[test]
    fn rule_must_match_problem() {
        let text = MINIMAL.replace("\"L2\"", "\"L2_SIMPLE\"");
        assert_eq!(parse(&text).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn nonpositive_dt_is_a_config_error() {
        let text = MINIMAL.replace("\"seed\":7", "\"integrator\":{\"dt\":0}");
        assert_eq!(parse(&text).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn averaged_pca_reaches_oracle() {
        let cfg = parse(MINIMAL).unwrap();
        let (traj, summary) = run_dynamics(&cfg).unwrap();
        assert!(summary.angle < 1e-6);
        assert!(traj.last().step <= 10_000);
    }

    #[test]
    fn diagnostics_are_single_line_json() {
        let err = CliError::Numeric(Error::Divergence { step: 3, norm: 1e13 });
        let line = err.to_json();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["error"], "divergence");
        assert_eq!(v["exit_code"], 2);
    }

    #[test]
    fn derivative_kernels_pass() {
        let report = derivative_check(0, 20).unwrap();
        assert!(report.pass, "{report:?}");
    }
}
