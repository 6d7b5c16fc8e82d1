//! Fixed-step integration of the averaged rules, seeded sample streams
//! with prescribed second moments, and the online trainer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rng::{self, tag, Stream};
use crate::linalg::{fmt_f64, svd_factor, sym_eig, vector, Mat};
use crate::rules_pca::{self, constraint_map_sum, PcaRuleKind, PcaState};
use crate::rules_svd::{self, SvdRuleKind, SvdState};

/// State norms above this abort integration.
pub const DIVERGENCE_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Euler,
    #[default]
    Rk4,
}

/// Diagnostics recorded alongside each state.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Observation {
    /// `‖f(z)‖` of the zero-point function.
    pub residual: f64,
    pub constraint_u: f64,
    pub constraint_v: f64,
    /// Radians between the estimate and the oracle direction (the larger
    /// of the two factor angles for SVD).
    pub angle: f64,
}

pub trait OdeSystem {
    fn rhs(&self, z: &[f64]) -> Result<Vec<f64>>;

    fn observe(&self, z: &[f64]) -> Result<Observation> {
        Ok(Observation {
            residual: vector::norm(&self.rhs(z)?),
            ..Observation::default()
        })
    }

    fn state_names(&self, len: usize) -> Vec<String> {
        (0..len).map(|i| format!("z{i}")).collect()
    }
}

/// A system that can also be driven one sample at a time.
pub trait OnlineRule: OdeSystem {
    type Sample;
    fn sample_rhs(&self, sample: &Self::Sample, z: &[f64]) -> Result<Vec<f64>>;
}

/// Plain vector field without rule-specific diagnostics.
pub struct FieldFn<F>(pub F);

impl<F: Fn(&[f64]) -> Result<Vec<f64>>> OdeSystem for FieldFn<F> {
    fn rhs(&self, z: &[f64]) -> Result<Vec<f64>> {
        (self.0)(z)
    }
}

/// PCA rule of a given kind on a fixed covariance matrix, with the
/// principal eigenvector as oracle.
#[derive(Debug, Clone)]
pub struct PcaSystem {
    pub kind: PcaRuleKind,
    pub c: Mat,
    pub oracle_w: Vec<f64>,
    pub oracle_lambda: f64,
}

impl PcaSystem {
    pub fn new(kind: PcaRuleKind, c: Mat) -> Result<Self> {
        c.require_symmetric(crate::linalg::eig::SYMMETRY_TOL)?;
        if c.rows() < 2 {
            return Err(Error::Dimension("PCA needs dimension ≥ 2".into()));
        }
        let spec = sym_eig(&c)?;
        Ok(Self {
            kind,
            oracle_w: spec.vector(0),
            oracle_lambda: spec.values[0],
            c,
        })
    }

    /// The stationary state the rule should converge to.
    pub fn oracle_state(&self) -> Result<PcaState> {
        let w = if self.kind.is_sum() {
            constraint_map_sum(&self.oracle_w)?
        } else {
            self.oracle_w.clone()
        };
        Ok(PcaState::new(w, self.oracle_lambda))
    }
}

impl OdeSystem for PcaSystem {
    fn rhs(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(rules_pca::pca_rhs(self.kind, &self.c, &PcaState::from_slice(z)?)?.to_vec())
    }

    fn observe(&self, z: &[f64]) -> Result<Observation> {
        let s = PcaState::from_slice(z)?;
        let f = rules_pca::pca_residual(self.kind, &self.c, &s)?;
        Ok(Observation {
            residual: vector::norm(&f),
            constraint_u: f[f.len() - 1],
            constraint_v: 0.0,
            angle: vector::line_angle(&s.w, &self.oracle_w),
        })
    }

    fn state_names(&self, len: usize) -> Vec<String> {
        let mut names: Vec<String> = (0..len.saturating_sub(1)).map(|i| format!("w{i}")).collect();
        names.push("lambda".into());
        names
    }
}

impl OnlineRule for PcaSystem {
    type Sample = Vec<f64>;

    fn sample_rhs(&self, x: &Vec<f64>, z: &[f64]) -> Result<Vec<f64>> {
        Ok(rules_pca::pca_online_rhs(self.kind, x, &PcaState::from_slice(z)?)?.to_vec())
    }
}

/// SVD rule of a given kind on a fixed cross-covariance matrix, with the
/// principal singular pair as oracle.
#[derive(Debug, Clone)]
pub struct SvdSystem {
    pub kind: SvdRuleKind,
    pub a: Mat,
    pub oracle_u: Vec<f64>,
    pub oracle_v: Vec<f64>,
    pub oracle_sigma: f64,
}

impl SvdSystem {
    pub fn new(kind: SvdRuleKind, a: Mat) -> Result<Self> {
        if a.rows() < 2 || a.cols() < 2 {
            return Err(Error::Dimension("SVD needs a matrix of at least 2x2".into()));
        }
        let f = svd_factor(&a)?;
        Ok(Self {
            kind,
            oracle_u: f.u(0),
            oracle_v: f.v(0),
            oracle_sigma: f.singular[0],
            a,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a.rows(), self.a.cols())
    }

    /// The stationary state the rule should converge to. For the
    /// constant-sum kinds the scalars are `1ᵀAv` and `1ᵀAᵀu`.
    pub fn oracle_state(&self) -> Result<SvdState> {
        if self.kind.is_sum() {
            let u = constraint_map_sum(&self.oracle_u)?;
            let v = constraint_map_sum(&self.oracle_v)?;
            let sigma = vector::sum(&self.a.mul_vec(&v));
            let rho = vector::sum(&self.a.tr_mul_vec(&u));
            Ok(SvdState::new(u, v, sigma, Some(rho)))
        } else {
            Ok(SvdState::new(self.oracle_u.clone(), self.oracle_v.clone(), self.oracle_sigma, None))
        }
    }

    fn state(&self, z: &[f64]) -> Result<SvdState> {
        let (m, n) = self.dims();
        SvdState::from_slice(z, m, n, self.kind.is_sum())
    }
}

impl OdeSystem for SvdSystem {
    fn rhs(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(rules_svd::svd_rhs(self.kind, &self.a, &self.state(z)?)?.to_vec())
    }

    fn observe(&self, z: &[f64]) -> Result<Observation> {
        let s = self.state(z)?;
        let f = rules_svd::svd_residual(self.kind, &self.a, &s)?;
        let (cu, cv) = if self.kind.is_sum() {
            (vector::sum(&s.u) - 1.0, vector::sum(&s.v) - 1.0)
        } else {
            (0.5 * (vector::norm_sq(&s.u) - 1.0), 0.5 * (vector::norm_sq(&s.v) - 1.0))
        };
        let angle = vector::line_angle(&s.u, &self.oracle_u).max(vector::line_angle(&s.v, &self.oracle_v));
        Ok(Observation {
            residual: vector::norm(&f),
            constraint_u: cu,
            constraint_v: cv,
            angle,
        })
    }

    fn state_names(&self, _len: usize) -> Vec<String> {
        let (m, n) = self.dims();
        let mut names: Vec<String> = (0..m).map(|i| format!("u{i}")).collect();
        names.extend((0..n).map(|i| format!("v{i}")));
        names.push("sigma".into());
        if self.kind.is_sum() {
            names.push("rho".into());
        }
        names
    }
}

impl OnlineRule for SvdSystem {
    type Sample = (Vec<f64>, Vec<f64>);

    fn sample_rhs(&self, (y, x): &(Vec<f64>, Vec<f64>), z: &[f64]) -> Result<Vec<f64>> {
        Ok(rules_svd::svd_online_rhs(self.kind, y, x, &self.state(z)?)?.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub step: usize,
    /// Integration time for averaged runs, sample count for online runs.
    pub t: f64,
    pub state: Vec<f64>,
    pub obs: Observation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state_names: Vec<String>,
    pub records: Vec<Record>,
}

impl Trajectory {
    fn new<S: OdeSystem + ?Sized>(system: &S, len: usize) -> Self {
        Self {
            state_names: system.state_names(len),
            records: Vec::new(),
        }
    }

    fn push<S: OdeSystem + ?Sized>(&mut self, system: &S, step: usize, t: f64, z: &[f64]) -> Result<()> {
        let obs = system.observe(z)?;
        self.records.push(Record { step, t, state: z.to_vec(), obs });
        Ok(())
    }

    pub fn last(&self) -> &Record {
        self.records.last().expect("a trajectory always holds its initial state")
    }

    /// Header `step,t,<state>,residual,constraint_u,constraint_v,angle`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,t,");
        for name in &self.state_names {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("residual,constraint_u,constraint_v,angle\n");
        for r in &self.records {
            let mut fields = vec![r.step.to_string(), fmt_f64(r.t)];
            fields.extend(r.state.iter().map(|&x| fmt_f64(x)));
            fields.extend(
                [r.obs.residual, r.obs.constraint_u, r.obs.constraint_v, r.obs.angle].map(fmt_f64),
            );
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
    pub method: Method,
    /// Record every `thin`-th step; the first and last are always kept.
    pub thin: usize,
    /// Stop early once the observed residual drops below this.
    pub stop_residual: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            steps: 10_000,
            method: Method::Rk4,
            thin: 1,
            stop_residual: None,
        }
    }
}

fn check_state(step: usize, z: &[f64]) -> Result<()> {
    let norm = vector::norm(z);
    if norm.is_finite() && norm <= DIVERGENCE_NORM {
        Ok(())
    } else {
        Err(Error::Divergence { step, norm })
    }
}

fn offset(z: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    z.iter().zip(k).map(|(z, k)| z + h * k).collect()
}

pub fn step<S: OdeSystem + ?Sized>(system: &S, z: &[f64], dt: f64, method: Method) -> Result<Vec<f64>> {
    let k1 = system.rhs(z)?;
    match method {
        Method::Euler => Ok(offset(z, &k1, dt)),
        Method::Rk4 => {
            let k2 = system.rhs(&offset(z, &k1, 0.5 * dt))?;
            let k3 = system.rhs(&offset(z, &k2, 0.5 * dt))?;
            let k4 = system.rhs(&offset(z, &k3, dt))?;
            Ok((0..z.len())
                .map(|i| z[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect())
        }
    }
}

pub fn integrate<S: OdeSystem + ?Sized>(system: &S, z0: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory> {
    if !(cfg.dt > 0.0) || !cfg.dt.is_finite() {
        return Err(Error::Precondition(format!("dt must be positive, got {}", cfg.dt)));
    }
    let thin = cfg.thin.max(1);
    check_state(0, z0)?;
    let mut traj = Trajectory::new(system, z0.len());
    traj.push(system, 0, 0.0, z0)?;
    let mut z = z0.to_vec();
    for k in 1..=cfg.steps {
        z = step(system, &z, cfg.dt, cfg.method)?;
        check_state(k, &z)?;
        let t = k as f64 * cfg.dt;
        let done = k == cfg.steps;
        if let Some(tol) = cfg.stop_residual {
            let obs = system.observe(&z)?;
            if obs.residual < tol {
                traj.records.push(Record { step: k, t, state: z, obs });
                return Ok(traj);
            }
        }
        if done || k % thin == 0 {
            traj.push(system, k, t, &z)?;
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateSchedule {
    Constant { rate: f64 },
    /// `γₜ = γ₀ t₀ / (t₀ + t)`
    InverseTime { rate: f64, offset: f64 },
}

impl Default for RateSchedule {
    fn default() -> Self {
        RateSchedule::InverseTime { rate: 0.05, offset: 100.0 }
    }
}

impl RateSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RateSchedule::Constant { rate } => rate > 0.0 && rate.is_finite(),
            RateSchedule::InverseTime { rate, offset } => {
                rate > 0.0 && rate.is_finite() && offset > 0.0 && offset.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("invalid learning-rate schedule {self:?}")))
        }
    }

    pub fn rate(&self, t: usize) -> f64 {
        match *self {
            RateSchedule::Constant { rate } => rate,
            RateSchedule::InverseTime { rate, offset } => rate * offset / (offset + t as f64),
        }
    }
}

/// Forward updates `z ← z + γₜ · online_rhs(sampleₜ, z)`.
pub fn train_online<R, I>(
    rule: &R,
    samples: I,
    z0: &[f64],
    schedule: &RateSchedule,
    steps: usize,
    thin: usize,
) -> Result<Trajectory>
where
    R: OnlineRule + ?Sized,
    I: IntoIterator<Item = R::Sample>,
{
    schedule.validate()?;
    let thin = thin.max(1);
    check_state(0, z0)?;
    let mut traj = Trajectory::new(rule, z0.len());
    traj.push(rule, 0, 0.0, z0)?;
    let mut z = z0.to_vec();
    let mut samples = samples.into_iter();
    for k in 1..=steps {
        let sample = samples.next().ok_or(Error::StreamExhausted(k - 1))?;
        let d = rule.sample_rhs(&sample, &z)?;
        vector::axpy(schedule.rate(k - 1), &d, &mut z);
        check_state(k, &z)?;
        if k == steps || k % thin == 0 {
            traj.push(rule, k, k as f64, &z)?;
        }
    }
    Ok(traj)
}

/// Zero-mean Gaussian vectors `x = W Λ^½ g` with covariance `C = WΛWᵀ`.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    factor: Mat,
    rng: Stream,
    remaining: usize,
}

pub fn sample_gaussian(c: &Mat, seed: u64, count: usize) -> Result<GaussianStream> {
    c.require_symmetric(crate::linalg::eig::SYMMETRY_TOL)?;
    let spec = sym_eig(c)?;
    if let Some(&low) = spec.values.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Spectrum(format!("covariance is not positive definite (eigenvalue {low:e})")));
    }
    let n = c.rows();
    let factor = Mat::from_fn(n, n, |i, j| spec.vectors[(i, j)] * spec.values[j].sqrt());
    Ok(GaussianStream {
        factor,
        rng: rng::stream(seed, tag::SAMPLES),
        remaining: count,
    })
}

impl Iterator for GaussianStream {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let g = rng::normal_vec(&mut self.rng, self.factor.cols());
        Some(self.factor.mul_vec(&g))
    }
}

/// Pairs `(y, x)` with `x ~ N(0, I)` and `y = Ax + noise · g'`, so that
/// `E{yxᵀ} = A`.
#[derive(Debug, Clone)]
pub struct PairStream {
    a: Mat,
    noise: f64,
    x_rng: Stream,
    noise_rng: Stream,
    remaining: usize,
}

pub fn sample_pairs(a: &Mat, seed: u64, count: usize, noise: f64) -> Result<PairStream> {
    if !(noise >= 0.0) || !noise.is_finite() {
        return Err(Error::Precondition(format!("noise must be a finite value ≥ 0, got {noise}")));
    }
    if !vector::all_finite(a.as_slice()) {
        return Err(Error::NonFinite("cross-covariance".into()));
    }
    Ok(PairStream {
        a: a.clone(),
        noise,
        x_rng: rng::stream(seed, tag::SAMPLES),
        noise_rng: rng::stream(seed, tag::NOISE),
        remaining: count,
    })
}

/// `Ax + noise · g`
pub fn respond(a: &Mat, x: &[f64], noise: f64, g: &[f64]) -> Vec<f64> {
    let mut y = a.mul_vec(x);
    if noise > 0.0 {
        vector::axpy(noise, g, &mut y);
    }
    y
}

impl Iterator for PairStream {
    type Item = (Vec<f64>, Vec<f64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let x = rng::normal_vec(&mut self.x_rng, self.a.cols());
        let g = if self.noise > 0.0 {
            rng::normal_vec(&mut self.noise_rng, self.a.rows())
        } else {
            Vec::new()
        };
        Some((respond(&self.a, &x, self.noise, &g), x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(z0: Vec<f64>) -> FieldFn<impl Fn(&[f64]) -> Result<Vec<f64>>> {
        FieldFn(move |z: &[f64]| Ok(vector::sub(&z0, z)))
    }

    fn run(method: Method) -> f64 {
        let z0 = vec![1.0, -2.0];
        let cfg = IntegratorConfig { dt: 0.1, steps: 10, method, ..Default::default() };
        let traj = integrate(&linear(z0.clone()), &[3.0, 1.0], &cfg).unwrap();
        let d0 = vector::norm(&vector::sub(&[3.0, 1.0], &z0));
        let d1 = vector::norm(&vector::sub(&traj.last().state, &z0));
        (d1 / d0 - (-1f64).exp()).abs()
    }

    #[test]
    fn linear_decay_per_unit_time() {
        let z0 = vec![1.0, -2.0];
        let start = [3.0, 1.0];
        let cfg = IntegratorConfig { dt: 0.1, steps: 200, ..Default::default() };
        let traj = integrate(&linear(z0.clone()), &start, &cfg).unwrap();
        let dist = |r: &Record| vector::norm(&vector::sub(&r.state, &z0));
        for pair in traj.records.windows(11).step_by(10) {
            let ratio = dist(&pair[10]) / dist(&pair[0]);
            assert!((ratio / (-1f64).exp() - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn rk4_beats_euler_by_three_orders() {
        let (e_rk4, e_euler) = (run(Method::Rk4), run(Method::Euler));
        assert!(e_rk4 <= 1e-3 * e_euler, "rk4 {e_rk4:e}, euler {e_euler:e}");
    }

    #[test]
    fn fixed_point_and_zero_field_are_constant() {
        let sys = PcaSystem::new(PcaRuleKind::L2, Mat::diag(&[2.0, 1.0])).unwrap();
        let cfg = IntegratorConfig { steps: 50, ..Default::default() };
        let traj = integrate(&sys, &[1.0, 0.0, 2.0], &cfg).unwrap();
        assert!(traj.records.iter().all(|r| r.state == vec![1.0, 0.0, 2.0] && r.obs.residual == 0.0));

        let zero = FieldFn(|z: &[f64]| Ok(vec![0.0; z.len()]));
        let traj = integrate(&zero, &[0.3, 0.4], &cfg).unwrap();
        assert!(traj.records.iter().all(|r| r.state == vec![0.3, 0.4]));
    }

    #[test]
    fn thinning_keeps_first_and_last() {
        let cfg = IntegratorConfig { steps: 25, thin: 10, ..Default::default() };
        let traj = integrate(&linear(vec![0.0]), &[1.0], &cfg).unwrap();
        let steps: Vec<usize> = traj.records.iter().map(|r| r.step).collect();
        assert_eq!(steps, vec![0, 10, 20, 25]);
    }

    #[test]
    fn divergence_is_reported() {
        let blowup = FieldFn(|z: &[f64]| Ok(vector::scale(z, 10.0)));
        let cfg = IntegratorConfig { dt: 1.0, steps: 100, method: Method::Euler, ..Default::default() };
        let err = integrate(&blowup, &[1.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::Divergence { step: 12, .. }), "{err:?}");
        let cfg = IntegratorConfig { dt: 0.0, ..Default::default() };
        assert!(matches!(integrate(&blowup, &[1.0], &cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn csv_header_and_rows() {
        let sys = PcaSystem::new(PcaRuleKind::SumMod, Mat::diag(&[2.0, 1.0])).unwrap();
        let cfg = IntegratorConfig { steps: 2, ..Default::default() };
        let csv = integrate(&sys, &[1.0, 0.0, 2.0], &cfg).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("step,t,w0,w1,lambda,residual,constraint_u,constraint_v,angle"));
        assert_eq!(lines.count(), 3);
    }

    #[test]
    fn schedules() {
        let s = RateSchedule::default();
        assert_eq!(s.rate(0), 0.05);
        assert!((s.rate(100) - 0.025).abs() < 1e-15);
        assert!(RateSchedule::Constant { rate: 0.0 }.validate().is_err());
        assert!(RateSchedule::InverseTime { rate: 0.1, offset: -1.0 }.validate().is_err());
    }

    #[test]
    fn gaussian_covariance() {
        let check = |c: Mat, tol: f64| {
            let count = 100_000;
            let n = c.rows();
            let mut emp = Mat::zeros(n, n);
            for x in sample_gaussian(&c, 3, count).unwrap() {
                emp = emp.add(&Mat::from_fn(n, n, |i, j| x[i] * x[j]));
            }
            let emp = emp.scale(1.0 / count as f64);
            emp.sub(&c).frobenius() / c.frobenius() < tol
        };
        assert!(check(Mat::identity(2), 0.05));
        assert!(check(Mat::diag(&[4.0, 1.0]), 0.05));
        let a: Vec<_> = sample_gaussian(&Mat::diag(&[4.0, 1.0]), 9, 5).unwrap().collect();
        let b: Vec<_> = sample_gaussian(&Mat::diag(&[4.0, 1.0]), 9, 5).unwrap().collect();
        assert_eq!(a, b);
        assert!(sample_gaussian(&Mat::diag(&[1.0, -1.0]), 0, 1).is_err());
    }

    #[test]
    fn variance_ratio() {
        let (mut v0, mut v1) = (0.0, 0.0);
        for x in sample_gaussian(&Mat::diag(&[4.0, 1.0]), 21, 100_000).unwrap() {
            v0 += x[0] * x[0];
            v1 += x[1] * x[1];
        }
        assert!((v0 / v1 / 4.0 - 1.0).abs() < 0.1);
    }

    #[test]
    fn pair_cross_covariance() {
        let a = Mat::diag(&[3.0, 1.0]);
        let count = 100_000;
        let mut emp = Mat::zeros(2, 2);
        for (y, x) in sample_pairs(&a, 5, count, 0.0).unwrap() {
            emp = emp.add(&Mat::from_fn(2, 2, |i, j| y[i] * x[j]));
        }
        let emp = emp.scale(1.0 / count as f64);
        assert!(emp.sub(&a).frobenius() / a.frobenius() < 0.05);
        assert_eq!(respond(&a, &[1.0, 0.0], 0.0, &[]), a.col(0));
        let p: Vec<_> = sample_pairs(&a, 5, 4, 0.5).unwrap().collect();
        let q: Vec<_> = sample_pairs(&a, 5, 4, 0.5).unwrap().collect();
        assert_eq!(p, q);
    }

    #[test]
    fn online_zero_stream_freezes_w_and_hits_floor() {
        let sys = PcaSystem::new(PcaRuleKind::L2, Mat::diag(&[10.0, 1.0])).unwrap();
        let zeros = std::iter::repeat(vec![0.0, 0.0]);
        let sched = RateSchedule::Constant { rate: 0.5 };
        let err = train_online(&sys, zeros, &[0.6, 0.8, 1.0], &sched, 1000, 1).unwrap_err();
        assert!(matches!(err, Error::GuardedScalar { name: "lambda", .. }), "{err:?}");
        let zeros = std::iter::repeat(vec![0.0, 0.0]);
        let traj = train_online(&sys, zeros, &[0.6, 0.8, 1.0], &sched, 5, 1).unwrap();
        for r in &traj.records {
            assert_eq!(&r.state[..2], &[0.6, 0.8]);
        }
        assert_eq!(traj.last().state[2], 0.5f64.powi(5));
    }

    #[test]
    fn online_pca_constant_rate() {
        let c = Mat::diag(&[10.0, 1.0]);
        let sys = PcaSystem::new(PcaRuleKind::L2, c.clone()).unwrap();
        let z0 = rules_pca::init_state(PcaRuleKind::L2, &c, 1, true).unwrap().to_vec();
        let stream = sample_gaussian(&c, 1, 20_000).unwrap();
        let sched = RateSchedule::Constant { rate: 0.01 };
        let traj = train_online(&sys, stream, &z0, &sched, 20_000, 1000).unwrap();
        let w = &traj.last().state[..2];
        assert!(vector::abs_cosine(w, &[1.0, 0.0]) > 0.998);
    }

    #[test]
    fn online_steps_zero_and_exhaustion() {
        let sys = PcaSystem::new(PcaRuleKind::L2, Mat::diag(&[2.0, 1.0])).unwrap();
        let sched = RateSchedule::default();
        let traj = train_online(&sys, Vec::<Vec<f64>>::new(), &[1.0, 0.0, 1.0], &sched, 0, 1).unwrap();
        assert_eq!(traj.records.len(), 1);
        let err = train_online(&sys, vec![vec![1.0, 0.0]], &[1.0, 0.0, 1.0], &sched, 2, 1).unwrap_err();
        assert_eq!(err, Error::StreamExhausted(1));
    }
}
