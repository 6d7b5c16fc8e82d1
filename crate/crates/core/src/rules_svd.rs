//! Coupled SVD rules for the principal singular triple of a
//! cross-covariance matrix `A` (m×n).
//!
//! Euclidean kinds carry a single scalar `σ`; constant-sum kinds carry
//! `σ` for the left and `ρ` for the right factor, since the rescaled
//! vectors `u = ũ/(1ᵀũ)` and `v = ṽ/(1ᵀṽ)` give `Av = σu` and `Aᵀu = ρv`
//! with `σρ = μ²` for the unit-norm singular value `μ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{vector, Mat};
use crate::rules_pca::{guard, perturbed_uniform, FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SvdRuleKind {
    /// Euclidean constraint with norm-correction terms.
    L2,
    /// Euclidean constraint near the fixed point: `σ̇ = uᵀAv − σ`, no
    /// correction terms.
    L2Simple,
    /// Constant sum including the cross terms in `μ`.
    SumFull,
    /// Constant sum with the cross terms dropped.
    SumMod,
}

impl SvdRuleKind {
    pub const ALL: [SvdRuleKind; 4] = [Self::L2, Self::L2Simple, Self::SumFull, Self::SumMod];

    pub fn is_sum(self) -> bool {
        matches!(self, Self::SumFull | Self::SumMod)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::L2 => "L2",
            Self::L2Simple => "L2_SIMPLE",
            Self::SumFull => "SUM_FULL",
            Self::SumMod => "SUM_MOD",
        }
    }
}

/// One point of the SVD state space; also used for its time derivative.
/// `rho` is present exactly for the constant-sum kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub sigma: f64,
    pub rho: Option<f64>,
}

impl SvdState {
    pub fn new(u: Vec<f64>, v: Vec<f64>, sigma: f64, rho: Option<f64>) -> Self {
        Self { u, v, sigma, rho }
    }

    /// Flat layout `(u, v, σ)` or `(u, v, σ, ρ)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.u.len() + self.v.len() + 2);
        z.extend_from_slice(&self.u);
        z.extend_from_slice(&self.v);
        z.push(self.sigma);
        z.extend(self.rho);
        z
    }

    pub fn from_slice(z: &[f64], m: usize, n: usize, with_rho: bool) -> Result<Self> {
        let len = m + n + 1 + usize::from(with_rho);
        if z.len() != len {
            return Err(Error::Dimension(format!(
                "SVD state for {m}x{n} needs {len} components, got {}",
                z.len()
            )));
        }
        Ok(Self::new(
            z[..m].to_vec(),
            z[m..m + n].to_vec(),
            z[m + n],
            with_rho.then(|| z[m + n + 1]),
        ))
    }

    fn rho_or_sigma(&self) -> f64 {
        self.rho.unwrap_or(self.sigma)
    }
}

fn check(kind: SvdRuleKind, a: &Mat, s: &SvdState) -> Result<()> {
    let (m, n) = (s.u.len(), s.v.len());
    if m < 2 || n < 2 {
        return Err(Error::Dimension(format!("u and v need dimension ≥ 2, got {m} and {n}")));
    }
    if a.rows() != m || a.cols() != n {
        return Err(Error::Dimension(format!(
            "A is {}x{} but (u, v) have dimensions ({m}, {n})",
            a.rows(),
            a.cols()
        )));
    }
    check_state(kind, s)
}

fn check_state(kind: SvdRuleKind, s: &SvdState) -> Result<()> {
    if kind.is_sum() != s.rho.is_some() {
        return Err(Error::Dimension(format!(
            "rule kind {} {} a second scalar estimate",
            kind.name(),
            if kind.is_sum() { "requires" } else { "does not take" }
        )));
    }
    let scalars_finite = s.sigma.is_finite() && s.rho.is_none_or(f64::is_finite);
    if !scalars_finite || !vector::all_finite(&s.u) || !vector::all_finite(&s.v) {
        return Err(Error::NonFinite("SVD state".into()));
    }
    Ok(())
}

/// Euclidean kinds need `σ ≥ FLOOR`. The constant-sum scalars carry the
/// sign of `1ᵀũ · 1ᵀṽ` at a stationary point, so only `|σ|, |ρ| ≥ FLOOR`
/// is required there.
fn guard_scalars(s: &SvdState) -> Result<()> {
    match s.rho {
        None => guard("sigma", s.sigma),
        Some(rho) => {
            guard_magnitude("sigma", s.sigma)?;
            guard_magnitude("rho", rho)
        }
    }
}

fn guard_magnitude(name: &'static str, value: f64) -> Result<()> {
    guard(name, value.abs()).map_err(|_| Error::GuardedScalar { name, value, floor: FLOOR })
}

/// Zero-point function: `(Av − σu ; Aᵀu − σv ; ½(uᵀu − 1))` for the
/// Euclidean kinds, `(Av − σu ; Aᵀu − ρv ; 1ᵀu − 1 ; 1ᵀv − 1)` for
/// constant sum.
pub fn svd_residual(kind: SvdRuleKind, a: &Mat, s: &SvdState) -> Result<Vec<f64>> {
    check(kind, a, s)?;
    let mut f = a.mul_vec(&s.v);
    vector::axpy(-s.sigma, &s.u, &mut f);
    let mut g = a.tr_mul_vec(&s.u);
    vector::axpy(-s.rho_or_sigma(), &s.v, &mut g);
    f.extend(g);
    if kind.is_sum() {
        f.push(vector::sum(&s.u) - 1.0);
        f.push(vector::sum(&s.v) - 1.0);
    } else {
        f.push(0.5 * (vector::norm_sq(&s.u) - 1.0));
    }
    Ok(f)
}

/// Averaged field. For [`SvdRuleKind::SumFull`] the unit-norm singular
/// value estimate is taken in closed form, `μ = uᵀAv / (‖u‖‖v‖)`.
pub fn svd_rhs(kind: SvdRuleKind, a: &Mat, s: &SvdState) -> Result<SvdState> {
    check(kind, a, s)?;
    guard_scalars(s)?;
    let av = a.mul_vec(&s.v);
    let atu = a.tr_mul_vec(&s.u);
    let uav = vector::dot(&s.u, &av);
    if kind.is_sum() {
        let rho = s.rho_or_sigma();
        let (sum_av, sum_atu) = (vector::sum(&av), vector::sum(&atu));
        let du = relax(&av, sum_av, &s.u, 1.0 / s.sigma);
        let dv = relax(&atu, sum_atu, &s.v, 1.0 / rho);
        let mut dsigma = sum_av - s.sigma;
        let mut drho = sum_atu - rho;
        if kind == SvdRuleKind::SumFull {
            let (nu, nv) = (vector::norm(&s.u), vector::norm(&s.v));
            guard("|u|", nu)?;
            guard("|v|", nv)?;
            let nn = nu * nv;
            let mu = uav / nn;
            let (utu, vtv) = (nu * nu, nv * nv);
            dsigma -= mu / (rho * nn) * (vtv * sum_atu - vector::dot(&s.v, &atu));
            drho -= mu / (s.sigma * nn) * (utu * sum_av - uav);
        }
        Ok(SvdState::new(du, dv, dsigma, Some(drho)))
    } else {
        let inv = 1.0 / s.sigma;
        let mut du = relax(&av, uav, &s.u, inv);
        let mut dv = relax(&atu, uav, &s.v, inv);
        let dsigma = if kind == SvdRuleKind::L2 {
            let (utu, vtv) = (vector::norm_sq(&s.u), vector::norm_sq(&s.v));
            vector::axpy(0.5 * (utu - 1.0), &s.u, &mut du);
            vector::axpy(0.5 * (vtv - 1.0), &s.v, &mut dv);
            uav - 0.5 * s.sigma * (utu + vtv)
        } else {
            uav - s.sigma
        };
        Ok(SvdState::new(du, dv, dsigma, None))
    }
}

/// `gain · (target − coeff · x)`
fn relax(target: &[f64], coeff: f64, x: &[f64], gain: f64) -> Vec<f64> {
    target.iter().zip(x).map(|(t, x)| gain * (t - coeff * x)).collect()
}

/// Single-sample field for a pair `(y, x)` with activities `ξ = vᵀx` and
/// `η = uᵀy`. Its expectation under `E{yxᵀ} = A` is [`svd_rhs`].
/// [`SvdRuleKind::SumFull`] has no online form.
pub fn svd_online_rhs(kind: SvdRuleKind, y: &[f64], x: &[f64], s: &SvdState) -> Result<SvdState> {
    if kind == SvdRuleKind::SumFull {
        return Err(Error::UnsupportedKind("SUM_FULL (online)"));
    }
    if y.len() != s.u.len() || x.len() != s.v.len() || s.u.len() < 2 || s.v.len() < 2 {
        return Err(Error::Dimension(format!(
            "sample dimensions ({}, {}) do not match (u, v) dimensions ({}, {})",
            y.len(),
            x.len(),
            s.u.len(),
            s.v.len()
        )));
    }
    check_state(kind, s)?;
    guard_scalars(s)?;
    let xi = vector::dot(&s.v, x);
    let eta = vector::dot(&s.u, y);
    if kind == SvdRuleKind::SumMod {
        let rho = s.rho_or_sigma();
        let (sum_y, sum_x) = (vector::sum(y), vector::sum(x));
        let du = relax(y, sum_y, &s.u, xi / s.sigma);
        let dv = relax(x, sum_x, &s.v, eta / rho);
        return Ok(SvdState::new(du, dv, sum_y * xi - s.sigma, Some(sum_x * eta - rho)));
    }
    let inv = 1.0 / s.sigma;
    let mut du = relax(y, eta, &s.u, inv * xi);
    let mut dv = relax(x, xi, &s.v, inv * eta);
    let dsigma = if kind == SvdRuleKind::L2 {
        let (utu, vtv) = (vector::norm_sq(&s.u), vector::norm_sq(&s.v));
        vector::axpy(0.5 * (utu - 1.0), &s.u, &mut du);
        vector::axpy(0.5 * (vtv - 1.0), &s.v, &mut dv);
        eta * xi - 0.5 * s.sigma * (utu + vtv)
    } else {
        eta * xi - s.sigma
    };
    Ok(SvdState::new(du, dv, dsigma, None))
}

/// Default start: `u = 1/m`, `v = 1/n` plus seeded noise of norm
/// [`crate::rules_pca::INIT_NOISE`] (zero-sum for the constant-sum kinds).
/// Averaged runs start the scalars at `σ = ‖Av‖/‖u‖` and `ρ = ‖Aᵀu‖/‖v‖`
/// (for the Euclidean kinds `ρ` is dropped), the magnitudes they take at
/// any stationary point; online runs start them at `1`.
///
/// For the Euclidean kinds `v` is negated when `uᵀAv < 0`, which selects
/// the sign-equivalent triple with a positive scalar.
pub fn init_state(kind: SvdRuleKind, a: &Mat, seed: u64, online: bool) -> Result<SvdState> {
    let (m, n) = (a.rows(), a.cols());
    if m < 2 || n < 2 {
        return Err(Error::Dimension(format!("A must be at least 2x2, got {m}x{n}")));
    }
    let u = perturbed_uniform(m, seed, 0, kind.is_sum());
    let mut v = perturbed_uniform(n, seed, m, kind.is_sum());
    let av = a.mul_vec(&v);
    if !kind.is_sum() && vector::dot(&u, &av) < 0.0 {
        v.iter_mut().for_each(|e| *e = -*e);
    }
    let (sigma, rho) = if online {
        (1.0, 1.0)
    } else {
        let sigma = vector::norm(&av) / vector::norm(&u);
        let rho = vector::norm(&a.tr_mul_vec(&u)) / vector::norm(&v);
        (sigma.max(FLOOR), rho.max(FLOOR))
    };
    Ok(SvdState::new(u, v, sigma, kind.is_sum().then_some(rho)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d31() -> Mat {
        Mat::diag(&[3.0, 1.0])
    }

    fn e(k: usize) -> Vec<f64> {
        vector::basis(2, k)
    }

    fn zero(rho: bool) -> SvdState {
        SvdState::new(vec![0.0; 2], vec![0.0; 2], 0.0, rho.then_some(0.0))
    }

    #[test]
    fn residual_examples() {
        let s = SvdState::new(e(0), e(0), 3.0, None);
        assert_eq!(svd_residual(SvdRuleKind::L2, &d31(), &s).unwrap(), vec![0.0; 5]);
        let s = SvdState::new(e(0), e(0), 3.0, Some(3.0));
        assert_eq!(svd_residual(SvdRuleKind::SumMod, &d31(), &s).unwrap(), vec![0.0; 6]);
        // Av − σu = (3, 0) − (0, 1); Aᵀu − σv = (0, 1) − (1, 0).
        let s = SvdState::new(e(1), e(0), 1.0, None);
        assert_eq!(
            svd_residual(SvdRuleKind::L2, &d31(), &s).unwrap(),
            vec![3.0, -1.0, -1.0, 1.0, 0.0]
        );
    }

    #[test]
    fn averaged_examples() {
        let s = SvdState::new(e(0), e(0), 3.0, None);
        assert_eq!(svd_rhs(SvdRuleKind::L2, &d31(), &s).unwrap(), zero(false));
        assert_eq!(svd_rhs(SvdRuleKind::L2Simple, &d31(), &s).unwrap(), zero(false));
        let s = SvdState::new(e(0), e(0), 3.0, Some(3.0));
        assert_eq!(svd_rhs(SvdRuleKind::SumMod, &d31(), &s).unwrap(), zero(true));
        assert_eq!(svd_rhs(SvdRuleKind::SumFull, &d31(), &s).unwrap(), zero(true));
        let s = SvdState::new(e(0), e(0), 1.0, None);
        let d = svd_rhs(SvdRuleKind::L2, &d31(), &s).unwrap();
        assert_eq!(d, SvdState::new(vec![0.0; 2], vec![0.0; 2], 2.0, None));
    }

    #[test]
    fn online_examples() {
        let s = SvdState::new(e(0), e(0), 3.0, None);
        let d = svd_online_rhs(SvdRuleKind::L2, &[0.0, 0.0], &[0.0, 0.0], &s).unwrap();
        assert_eq!(d, SvdState::new(vec![0.0; 2], vec![0.0; 2], -3.0, None));
        let d = svd_online_rhs(SvdRuleKind::L2Simple, &[3.0, 0.0], &[1.0, 0.0], &s).unwrap();
        assert_eq!(d, zero(false));
        let s = SvdState::new(e(0), e(0), 1.0, Some(1.0));
        let d = svd_online_rhs(SvdRuleKind::SumMod, &[1.0, 1.0], &[1.0, 0.0], &s).unwrap();
        assert_eq!(d, SvdState::new(vec![-1.0, 1.0], vec![0.0; 2], 1.0, Some(0.0)));
    }

    #[test]
    fn sum_full_is_averaged_only() {
        let s = SvdState::new(e(0), e(0), 1.0, Some(1.0));
        let r = svd_online_rhs(SvdRuleKind::SumFull, &[1.0, 1.0], &[1.0, 0.0], &s);
        assert!(matches!(r, Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn scalar_layout_must_match_kind() {
        let s = SvdState::new(e(0), e(0), 3.0, None);
        assert!(matches!(svd_rhs(SvdRuleKind::SumMod, &d31(), &s), Err(Error::Dimension(_))));
        let s = SvdState::new(e(0), e(0), 3.0, Some(3.0));
        assert!(matches!(svd_residual(SvdRuleKind::L2, &d31(), &s), Err(Error::Dimension(_))));
    }

    #[test]
    fn floors_are_enforced() {
        let s = SvdState::new(e(0), e(0), 3.0, Some(1e-9));
        let err = svd_rhs(SvdRuleKind::SumMod, &d31(), &s).unwrap_err();
        assert!(matches!(err, Error::GuardedScalar { name: "rho", .. }));
        let s = SvdState::new(e(0), e(0), -3.0, Some(-3.0));
        assert!(svd_rhs(SvdRuleKind::SumMod, &d31(), &s).is_ok());
        let s = SvdState::new(e(0), e(0), -3.0, None);
        assert!(svd_rhs(SvdRuleKind::L2, &d31(), &s).is_err());
        let s = SvdState::new(vec![0.0; 2], e(0), 3.0, Some(3.0));
        let err = svd_rhs(SvdRuleKind::SumFull, &d31(), &s).unwrap_err();
        assert!(matches!(err, Error::GuardedScalar { name: "|u|", .. }));
    }

    #[test]
    fn flat_round_trip() {
        let s = SvdState::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0], 6.0, Some(7.0));
        assert_eq!(SvdState::from_slice(&s.to_vec(), 3, 2, true).unwrap(), s);
        assert!(SvdState::from_slice(&s.to_vec(), 3, 2, false).is_err());
    }

    #[test]
    fn init_positive_scalar_and_constraint() {
        let a = Mat::from_rows(&[[-3.0, 0.0], [0.0, -1.0], [0.5, 0.2]]);
        let s = init_state(SvdRuleKind::L2, &a, 5, false).unwrap();
        assert!(vector::dot(&s.u, &a.mul_vec(&s.v)) > 0.0);
        assert_eq!(s.sigma, vector::norm(&a.mul_vec(&s.v)) / vector::norm(&s.u));
        let s = init_state(SvdRuleKind::SumMod, &a, 5, false).unwrap();
        assert!((vector::sum(&s.u) - 1.0).abs() < 1e-15);
        assert!((vector::sum(&s.v) - 1.0).abs() < 1e-15);
        assert_eq!(s.rho, Some(vector::norm(&a.tr_mul_vec(&s.u)) / vector::norm(&s.v)));
        let s = init_state(SvdRuleKind::SumMod, &a, 5, true).unwrap();
        assert_eq!((s.sigma, s.rho), (1.0, Some(1.0)));
    }
}
