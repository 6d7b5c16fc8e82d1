//! Objective functions whose stationary points are the principal pairs and
//! triples, the derivative kernels used to derive the rules, the generic
//! Newton zero-finder field, and the Lagrange saddle Hessian.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::lu::Lu;
use crate::linalg::{default_step, fd_jacobian, gen_eig, vector, Mat};
use crate::rules_pca::PcaState;
use crate::rules_svd::SvdState;

/// Jacobians at or above this 1-norm condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CriterionKind {
    /// `wᵀCw/λ − wᵀw + ln λ`
    PPca1,
    /// `wᵀCw − λwᵀw + λ`
    PPca2,
    /// `uᵀAv/σ − ½uᵀu − ½vᵀv + ln σ`
    PSvd1,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 3] = [Self::PPca1, Self::PPca2, Self::PSvd1];

    pub fn name(self) -> &'static str {
        match self {
            Self::PPca1 => "P_PCA1",
            Self::PPca2 => "P_PCA2",
            Self::PSvd1 => "P_SVD1",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pca(&'a PcaState),
    Svd(&'a SvdState),
}

impl<'a> From<&'a PcaState> for StateRef<'a> {
    fn from(s: &'a PcaState) -> Self {
        StateRef::Pca(s)
    }
}

impl<'a> From<&'a SvdState> for StateRef<'a> {
    fn from(s: &'a SvdState) -> Self {
        StateRef::Svd(s)
    }
}

fn pca_parts<'a>(kind: CriterionKind, c: &Mat, state: StateRef<'a>) -> Result<&'a PcaState> {
    match state {
        StateRef::Pca(s) if c.is_square() && c.rows() == s.w.len() => Ok(s),
        StateRef::Pca(_) => Err(Error::Dimension("C does not match w".into())),
        StateRef::Svd(_) => Err(Error::Dimension(format!("{} takes a PCA state", kind.name()))),
    }
}

fn svd_parts<'a>(a: &Mat, state: StateRef<'a>) -> Result<&'a SvdState> {
    match state {
        StateRef::Svd(s) if a.rows() == s.u.len() && a.cols() == s.v.len() => Ok(s),
        StateRef::Svd(_) => Err(Error::Dimension("A does not match (u, v)".into())),
        StateRef::Pca(_) => Err(Error::Dimension("P_SVD1 takes an SVD state".into())),
    }
}

fn positive_log(name: &'static str, x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(x.ln())
    } else {
        Err(Error::GuardedScalar { name, value: x, floor: 0.0 })
    }
}

pub fn eval_criterion<'a>(kind: CriterionKind, matrix: &Mat, state: impl Into<StateRef<'a>>) -> Result<f64> {
    let state = state.into();
    match kind {
        CriterionKind::PPca1 | CriterionKind::PPca2 => {
            let s = pca_parts(kind, matrix, state)?;
            let wcw = vector::dot(&s.w, &matrix.mul_vec(&s.w));
            let wtw = vector::norm_sq(&s.w);
            if kind == CriterionKind::PPca1 {
                Ok(wcw / s.lambda - wtw + positive_log("lambda", s.lambda)?)
            } else {
                Ok(wcw - wtw * s.lambda + s.lambda)
            }
        }
        CriterionKind::PSvd1 => {
            let s = svd_parts(matrix, state)?;
            let uav = vector::dot(&s.u, &matrix.mul_vec(&s.v));
            let log = positive_log("sigma", s.sigma)?;
            Ok(uav / s.sigma - 0.5 * vector::norm_sq(&s.u) - 0.5 * vector::norm_sq(&s.v) + log)
        }
    }
}

/// Analytic gradient in the flat state layout (`(w, λ)` or `(u, v, σ)`).
pub fn criterion_gradient<'a>(
    kind: CriterionKind,
    matrix: &Mat,
    state: impl Into<StateRef<'a>>,
) -> Result<Vec<f64>> {
    let state = state.into();
    match kind {
        CriterionKind::PPca1 | CriterionKind::PPca2 => {
            let s = pca_parts(kind, matrix, state)?;
            let cw = matrix.mul_vec(&s.w);
            let wcw = vector::dot(&s.w, &cw);
            let (mut g, dl) = if kind == CriterionKind::PPca1 {
                positive_log("lambda", s.lambda)?;
                let g: Vec<f64> = cw.iter().zip(&s.w).map(|(a, w)| 2.0 * a / s.lambda - 2.0 * w).collect();
                (g, 1.0 / s.lambda - wcw / (s.lambda * s.lambda))
            } else {
                let g: Vec<f64> = cw.iter().zip(&s.w).map(|(a, w)| 2.0 * a - 2.0 * s.lambda * w).collect();
                (g, 1.0 - vector::norm_sq(&s.w))
            };
            g.push(dl);
            Ok(g)
        }
        CriterionKind::PSvd1 => {
            let s = svd_parts(matrix, state)?;
            positive_log("sigma", s.sigma)?;
            let av = matrix.mul_vec(&s.v);
            let uav = vector::dot(&s.u, &av);
            let inv = 1.0 / s.sigma;
            let mut g: Vec<f64> = av.iter().zip(&s.u).map(|(a, u)| inv * a - u).collect();
            let atu = matrix.tr_mul_vec(&s.u);
            g.extend(atu.iter().zip(&s.v).map(|(a, v)| inv * a - v));
            g.push(inv - uav * inv * inv);
            Ok(g)
        }
    }
}

/// Plain quotient `wᵀCw / wᵀw` (the objective is half of it).
pub fn rayleigh_quotient(c: &Mat, w: &[f64]) -> Result<f64> {
    let wtw = vector::norm_sq(w);
    if wtw == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(vector::dot(w, &c.mul_vec(w)) / wtw)
}

/// `(2/wᵀw)(Cw − w · wᵀCw/wᵀw)`, the gradient of [`rayleigh_quotient`].
pub fn rayleigh_gradient(c: &Mat, w: &[f64]) -> Result<Vec<f64>> {
    let wtw = vector::norm_sq(w);
    if wtw == 0.0 {
        return Err(Error::ZeroVector);
    }
    let cw = c.mul_vec(w);
    let q = vector::dot(w, &cw) / wtw;
    Ok(cw.iter().zip(w).map(|(a, w)| 2.0 / wtw * (a - q * w)).collect())
}

/// `(a‖x‖ − (aᵀx) x/‖x‖) / xᵀx`, the gradient of `aᵀx / ‖x‖` in `x`.
pub fn unit_scalar_gradient(a: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let xtx = vector::norm_sq(x);
    if xtx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let nx = xtx.sqrt();
    let ax = vector::dot(a, x);
    Ok(a.iter().zip(x).map(|(a, x)| (a * nx - ax * x / nx) / xtx).collect())
}

/// `−J⁻¹(z) f(z)` with `J` from central differences.
pub fn newton_zero_field<F>(f: F, z: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let fz = f(z)?;
    let j = fd_jacobian(&f, z, default_step(z))?;
    if j.rows() != z.len() {
        return Err(Error::Dimension(format!(
            "Newton field needs a square system, f maps {} to {}",
            z.len(),
            j.rows()
        )));
    }
    let lu = Lu::factor(&j)?;
    let cond = lu.condition_1();
    if !(cond < MAX_CONDITION) {
        return Err(Error::Singular(cond));
    }
    Ok(vector::scale(&lu.solve(&fz), -1.0))
}

/// `[[I, 1], [1ᵀ, 0]]` of size `(n+1)×(n+1)`: the Hessian of `½wᵀw`
/// constrained to `1ᵀw = 1` via a Lagrange multiplier.
pub fn lagrange_hessian(n: usize) -> Result<Mat> {
    if n < 1 {
        return Err(Error::Dimension("Lagrange Hessian needs n ≥ 1".into()));
    }
    Ok(Mat::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) => f64::from(u8::from(i == j)),
        (false, false) => 0.0,
        _ => 1.0,
    }))
}

pub fn lagrange_hessian_eigenvalues(n: usize) -> Result<Vec<Complex64>> {
    gen_eig(&lagrange_hessian(n)?)
}
