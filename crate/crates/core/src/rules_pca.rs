//! Coupled PCA rules: a vector estimate `w` and an eigenvalue estimate `λ`
//! evolve together so that `w` approaches the principal eigenvector of `C`
//! with a speed independent of the eigenvalue scale.
//!
//! Two constraints are supported. The Euclidean kinds keep `wᵀw = 1` near
//! the fixed point; the constant-sum kinds keep `1ᵀw = 1`, whose fixed
//! points are eigenvectors rescaled by [`constraint_map_sum`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rng::{self, tag};
use crate::linalg::{vector, Mat};

/// Minimum admissible value of a scalar estimate during rule evaluation.
pub const FLOOR: f64 = 1e-8;

/// Magnitude of the seeded perturbation added by [`init_state`].
pub const INIT_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PcaRuleKind {
    /// Euclidean constraint with the norm-correction term.
    L2,
    /// Euclidean constraint assuming `wᵀw ≈ 1`: no correction term and
    /// `λ̇ = wᵀCw − λ`.
    L2Ala,
    /// Constant sum with the Rayleigh quotient in the eigenvalue rule.
    SumExact,
    /// Constant sum with `λ̇ = 1ᵀCw − λ`.
    SumMod,
}

impl PcaRuleKind {
    pub const ALL: [PcaRuleKind; 4] = [Self::L2, Self::L2Ala, Self::SumExact, Self::SumMod];

    pub fn is_sum(self) -> bool {
        matches!(self, Self::SumExact | Self::SumMod)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::L2 => "L2",
            Self::L2Ala => "L2_ALA",
            Self::SumExact => "SUM_EXACT",
            Self::SumMod => "SUM_MOD",
        }
    }
}

/// One point of the PCA state space; also used for its time derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaState {
    pub w: Vec<f64>,
    pub lambda: f64,
}

impl PcaState {
    pub fn new(w: Vec<f64>, lambda: f64) -> Self {
        Self { w, lambda }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Flat layout `(w, λ)`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut z = self.w.clone();
        z.push(self.lambda);
        z
    }

    pub fn from_slice(z: &[f64]) -> Result<Self> {
        match z.split_last() {
            Some((&lambda, w)) if w.len() >= 2 => Ok(Self::new(w.to_vec(), lambda)),
            _ => Err(Error::Dimension(format!(
                "PCA state needs at least 3 components, got {}",
                z.len()
            ))),
        }
    }
}

fn check(c: &Mat, s: &PcaState) -> Result<()> {
    let n = s.dim();
    if n < 2 {
        return Err(Error::Dimension(format!("w must have dimension ≥ 2, got {n}")));
    }
    if c.rows() != n || c.cols() != n {
        return Err(Error::Dimension(format!(
            "C is {}x{} but w has dimension {n}",
            c.rows(),
            c.cols()
        )));
    }
    if !s.lambda.is_finite() || !vector::all_finite(&s.w) {
        return Err(Error::NonFinite("PCA state".into()));
    }
    Ok(())
}

pub(crate) fn guard(name: &'static str, value: f64) -> Result<()> {
    if value >= FLOOR {
        Ok(())
    } else {
        Err(Error::GuardedScalar { name, value, floor: FLOOR })
    }
}

/// Zero-point function `(Cw − λw ; g(w))` with `g = ½(wᵀw − 1)` for the
/// Euclidean kinds and `g = 1ᵀw − 1` for the constant-sum kinds.
pub fn pca_residual(kind: PcaRuleKind, c: &Mat, s: &PcaState) -> Result<Vec<f64>> {
    check(c, s)?;
    let mut f = c.mul_vec(&s.w);
    vector::axpy(-s.lambda, &s.w, &mut f);
    f.push(if kind.is_sum() {
        vector::sum(&s.w) - 1.0
    } else {
        0.5 * (vector::norm_sq(&s.w) - 1.0)
    });
    Ok(f)
}

/// Averaged field `(ẇ, λ̇)`.
pub fn pca_rhs(kind: PcaRuleKind, c: &Mat, s: &PcaState) -> Result<PcaState> {
    check(c, s)?;
    guard("lambda", s.lambda)?;
    let cw = c.mul_vec(&s.w);
    let wcw = vector::dot(&s.w, &cw);
    let wtw = vector::norm_sq(&s.w);
    let inv = 1.0 / s.lambda;
    // Projection coefficient: wᵀCw for the Euclidean kinds, 1ᵀCw for constant sum.
    let proj = if kind.is_sum() { vector::sum(&cw) } else { wcw };
    let mut dw: Vec<f64> = cw.iter().zip(&s.w).map(|(a, w)| inv * (a - proj * w)).collect();
    let dlambda = match kind {
        PcaRuleKind::L2 => {
            vector::axpy(0.5 * (wtw - 1.0), &s.w, &mut dw);
            wcw - s.lambda * wtw
        }
        PcaRuleKind::L2Ala => wcw - s.lambda,
        PcaRuleKind::SumExact => wcw / wtw - s.lambda,
        PcaRuleKind::SumMod => vector::sum(&cw) - s.lambda,
    };
    Ok(PcaState::new(dw, dlambda))
}

/// Single-sample field with activity `ξ = wᵀx`. Its expectation over a
/// zero-mean distribution with covariance `C` is [`pca_rhs`].
pub fn pca_online_rhs(kind: PcaRuleKind, x: &[f64], s: &PcaState) -> Result<PcaState> {
    let n = s.dim();
    if n < 2 || x.len() != n {
        return Err(Error::Dimension(format!(
            "sample has dimension {} but w has dimension {n}",
            x.len()
        )));
    }
    if !s.lambda.is_finite() || !vector::all_finite(&s.w) {
        return Err(Error::NonFinite("PCA state".into()));
    }
    guard("lambda", s.lambda)?;
    let xi = vector::dot(&s.w, x);
    let wtw = vector::norm_sq(&s.w);
    let inv = 1.0 / s.lambda;
    let proj = if kind.is_sum() { vector::sum(x) } else { xi };
    let mut dw: Vec<f64> = x.iter().zip(&s.w).map(|(a, w)| inv * xi * (a - proj * w)).collect();
    let dlambda = match kind {
        PcaRuleKind::L2 => {
            vector::axpy(0.5 * (wtw - 1.0), &s.w, &mut dw);
            xi * xi - wtw * s.lambda
        }
        PcaRuleKind::L2Ala => xi * xi - s.lambda,
        PcaRuleKind::SumExact => xi * xi / wtw - s.lambda,
        PcaRuleKind::SumMod => vector::sum(x) * xi - s.lambda,
    };
    Ok(PcaState::new(dw, dlambda))
}

/// Rescale a unit eigenvector onto the constant-sum plane: `w̃ / (1ᵀw̃)`.
pub fn constraint_map_sum(w_tilde: &[f64]) -> Result<Vec<f64>> {
    let total = vector::sum(w_tilde);
    if total.abs() <= FLOOR || !total.is_finite() {
        return Err(Error::ConstraintDegenerate(total));
    }
    Ok(vector::scale(w_tilde, 1.0 / total))
}

/// Default start: `w = 1/n` plus seeded noise of norm [`INIT_NOISE`],
/// `λ = wᵀCw` for averaged runs and `λ = 1` for online runs.
///
/// For the constant-sum kinds the noise is projected to zero sum so the
/// start lies on the constraint plane.
pub fn init_state(kind: PcaRuleKind, c: &Mat, seed: u64, online: bool) -> Result<PcaState> {
    let n = c.rows();
    if n < 2 || !c.is_square() {
        return Err(Error::Dimension(format!(
            "C must be square with dimension ≥ 2, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let w = perturbed_uniform(n, seed, 0, kind.is_sum());
    let lambda = if online {
        1.0
    } else {
        vector::dot(&w, &c.mul_vec(&w)).max(FLOOR)
    };
    Ok(PcaState::new(w, lambda))
}

/// `1/n + noise` with noise of Euclidean norm [`INIT_NOISE`], drawn from
/// the `(seed, INIT)` stream after skipping `skip` variates.
pub(crate) fn perturbed_uniform(n: usize, seed: u64, skip: usize, zero_sum: bool) -> Vec<f64> {
    let mut r = rng::stream(seed, tag::INIT);
    for _ in 0..skip {
        rng::normal(&mut r);
    }
    let mut noise = rng::normal_vec(&mut r, n);
    if zero_sum {
        let mean = vector::sum(&noise) / n as f64;
        noise.iter_mut().for_each(|e| *e -= mean);
    }
    let len = vector::norm(&noise);
    let k = if len > 0.0 { INIT_NOISE / len } else { 0.0 };
    noise.iter().map(|e| 1.0 / n as f64 + k * e).collect()
}
