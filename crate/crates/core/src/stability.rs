//! Linear stability of the constant-sum SVD rule (`SUM_MOD`) at its
//! stationary points.
//!
//! Each singular triple `(ũᵢ, ṽᵢ, μᵢ)` of an m×n matrix `A` (m ≥ n) yields
//! a stationary quadruple `uᵢ = ũᵢ/sᵢ`, `vᵢ = ṽᵢ/rᵢ`, `σᵢ = μᵢsᵢ/rᵢ`,
//! `ρᵢ = μᵢrᵢ/sᵢ` with `sᵢ = 1ᵀũᵢ`, `rᵢ = 1ᵀṽᵢ`. At such a point the
//! Jacobian has the block form built by [`analytic_jacobian_at_stationary`].
//!
//! Two closed-form spectra are provided. [`predicted_spectrum`] is the
//! closed-form prediction: `−1` with multiplicity `m+2−n`, the pair
//! `−1 ± (|μ₁|/|μᵢ|)·√((1 − |s₁|‖uᵢ‖)(1 − |r₁|‖vᵢ‖))`, and `−1 ± |μⱼ|/|μᵢ|`
//! for `j = 2..n`. It is exact at the principal triple. [`exact_spectrum`]
//! evaluates the same block structure in the frame of triple `i` itself,
//! giving `−1` with multiplicity `m+4−n` and `−1 ± |μⱼ|/|μᵢ|` for all
//! `j ≠ i`; it agrees with the numeric spectrum at every triple.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::newton_zero_field;
use crate::error::{Error, Result};
use crate::linalg::{default_step, fd_jacobian, gen_eig, svd_factor, vector, Mat, Svd};
use crate::rules_pca::constraint_map_sum;
use crate::rules_svd::{svd_residual, svd_rhs, SvdRuleKind, SvdState};

/// Real parts within this band of zero count as zero.
pub const HYPERBOLIC_BAND: f64 = 1e-6;
/// Admissible violation of a stationarity equation, relative to `max(1, ‖A‖)`.
pub const STATIONARITY_TOL: f64 = 1e-8;
pub const POLISH_STEPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Attractor,
    Saddle,
    NonHyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// 1-based index of the singular triple.
    pub triple_index: usize,
    pub state: SvdState,
    #[serde(with = "complex_pairs")]
    pub predicted: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub numeric: Vec<Complex64>,
    /// From the numeric spectrum.
    pub classification: Classification,
    pub predicted_classification: Classification,
    /// The closed form gives no data-independent verdict for this triple.
    pub data_dependent: bool,
    /// Largest distance between greedily paired predicted and numeric values.
    pub match_distance: f64,
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

fn require_orientation(a: &Mat) -> Result<()> {
    if a.rows() < a.cols() {
        return Err(Error::UnsupportedOrientation { rows: a.rows(), cols: a.cols() });
    }
    if a.cols() < 2 {
        return Err(Error::Dimension("stability analysis needs at least 2 columns".into()));
    }
    Ok(())
}

fn triple(svd: &Svd, n: usize, i: usize) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if i < 1 || i > n {
        return Err(Error::Precondition(format!("triple index {i} outside 1..={n}")));
    }
    let mu = svd.singular[i - 1];
    if mu <= 0.0 {
        return Err(Error::Spectrum(format!("singular value {i} is zero")));
    }
    Ok((svd.u(i - 1), svd.v(i - 1), mu))
}

/// Stationary quadruple of triple `i` (1-based) from the SVD oracle and
/// the constant-sum maps, polished by Newton steps on the residual.
pub fn stationary_quadruple(a: &Mat, i: usize) -> Result<SvdState> {
    require_orientation(a)?;
    let svd = svd_factor(a)?;
    let (ut, vt, _) = triple(&svd, a.cols(), i)?;
    let u = constraint_map_sum(&ut)?;
    let v = constraint_map_sum(&vt)?;
    let sigma = vector::sum(&a.mul_vec(&v));
    let rho = vector::sum(&a.tr_mul_vec(&u));
    let (m, n) = (a.rows(), a.cols());
    let residual = |z: &[f64]| svd_residual(SvdRuleKind::SumMod, a, &SvdState::from_slice(z, m, n, true)?);
    let mut z = SvdState::new(u, v, sigma, Some(rho)).to_vec();
    for _ in 0..POLISH_STEPS {
        if vector::max_abs(&residual(&z)?) == 0.0 {
            break;
        }
        let dz = newton_zero_field(residual, &z)?;
        z = vector::add(&z, &dz);
    }
    SvdState::from_slice(&z, m, n, true)
}

/// Block Jacobian of the `SUM_MOD` field at a stationary point, state
/// order `(u, v, σ, ρ)`:
///
/// ```text
/// [ −I_m               σ⁻¹(A − u1ᵀA)   0   0 ]
/// [ ρ⁻¹(Aᵀ − v1ᵀAᵀ)    −I_n            0   0 ]
/// [ 0ᵀ                 1ᵀA            −1   0 ]
/// [ 1ᵀAᵀ               0ᵀ              0  −1 ]
/// ```
pub fn analytic_jacobian_at_stationary(a: &Mat, s: &SvdState) -> Result<Mat> {
    let (m, n) = (a.rows(), a.cols());
    let rho = s.rho.ok_or_else(|| Error::Dimension("constant-sum state needs rho".into()))?;
    if s.u.len() != m || s.v.len() != n {
        return Err(Error::Dimension(format!("state does not match a {m}x{n} matrix")));
    }
    let av = a.mul_vec(&s.v);
    let atu = a.tr_mul_vec(&s.u);
    let tol = STATIONARITY_TOL * a.frobenius().max(1.0);
    let checks = [
        ("Av = σu", vector::max_abs(&vector::sub(&av, &vector::scale(&s.u, s.sigma)))),
        ("Aᵀu = ρv", vector::max_abs(&vector::sub(&atu, &vector::scale(&s.v, rho)))),
        ("1ᵀu = 1", (vector::sum(&s.u) - 1.0).abs()),
        ("1ᵀv = 1", (vector::sum(&s.v) - 1.0).abs()),
        ("σ = 1ᵀAv", (vector::sum(&av) - s.sigma).abs()),
        ("ρ = 1ᵀAᵀu", (vector::sum(&atu) - rho).abs()),
    ];
    for (eq, violation) in checks {
        if !(violation <= tol) {
            return Err(Error::Precondition(format!("not stationary: {eq} violated by {violation:e}")));
        }
    }
    let sum_rows_a: Vec<f64> = (0..n).map(|j| vector::sum(&a.col(j))).collect(); // 1ᵀA
    let sum_cols_a: Vec<f64> = (0..m).map(|i| vector::sum(a.row(i))).collect(); // 1ᵀAᵀ
    let dim = m + n + 2;
    let (is, ir) = (m + n, m + n + 1);
    let mut j = Mat::zeros(dim, dim);
    for r in 0..m {
        j[(r, r)] = -1.0;
        for c in 0..n {
            j[(r, m + c)] = (a[(r, c)] - s.u[r] * sum_rows_a[c]) / s.sigma;
        }
    }
    for r in 0..n {
        j[(m + r, m + r)] = -1.0;
        for c in 0..m {
            j[(m + r, c)] = (a[(c, r)] - s.v[r] * sum_cols_a[c]) / rho;
        }
    }
    for c in 0..n {
        j[(is, m + c)] = sum_rows_a[c];
    }
    for c in 0..m {
        j[(ir, c)] = sum_cols_a[c];
    }
    j[(is, is)] = -1.0;
    j[(ir, ir)] = -1.0;
    Ok(j)
}

fn pair(center: f64, offset: Complex64) -> [Complex64; 2] {
    let c = Complex64::new(center, 0.0);
    [c + offset, c - offset]
}

/// Closed-form predicted spectrum at triple `i` (1-based).
pub fn predicted_spectrum(a: &Mat, i: usize) -> Result<Vec<Complex64>> {
    require_orientation(a)?;
    let (m, n) = (a.rows(), a.cols());
    let svd = svd_factor(a)?;
    let (ui, vi, mu) = triple(&svd, n, i)?;
    let (s1, r1) = (vector::sum(&svd.u(0)).abs(), vector::sum(&svd.v(0)).abs());
    let u_norm = vector::norm(&constraint_map_sum(&ui)?);
    let v_norm = vector::norm(&constraint_map_sum(&vi)?);
    let mut out = vec![Complex64::new(-1.0, 0.0); m + 2 - n];
    let radicand = (1.0 - s1 * u_norm) * (1.0 - r1 * v_norm);
    let root = Complex64::new(radicand, 0.0).sqrt();
    out.extend(pair(-1.0, root * (svd.singular[0] / mu)));
    for j in 2..=n {
        out.extend(pair(-1.0, Complex64::new(svd.singular[j - 1] / mu, 0.0)));
    }
    Ok(out)
}

/// Spectrum of the block Jacobian evaluated in the frame of triple `i`.
pub fn exact_spectrum(a: &Mat, i: usize) -> Result<Vec<Complex64>> {
    require_orientation(a)?;
    let (m, n) = (a.rows(), a.cols());
    let svd = svd_factor(a)?;
    let (_, _, mu) = triple(&svd, n, i)?;
    let mut out = vec![Complex64::new(-1.0, 0.0); m + 4 - n];
    for j in (1..=n).filter(|&j| j != i) {
        out.extend(pair(-1.0, Complex64::new(svd.singular[j - 1] / mu, 0.0)));
    }
    Ok(out)
}

/// Eigenvalues of the finite-difference Jacobian of the `SUM_MOD` field.
pub fn numeric_spectrum(a: &Mat, s: &SvdState) -> Result<Vec<Complex64>> {
    let (m, n) = (a.rows(), a.cols());
    let z = s.to_vec();
    let field = |z: &[f64]| {
        Ok(svd_rhs(SvdRuleKind::SumMod, a, &SvdState::from_slice(z, m, n, true)?)?.to_vec())
    };
    gen_eig(&fd_jacobian(field, &z, default_step(&z))?)
}

pub fn classify(eigenvalues: &[Complex64]) -> Classification {
    let top = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    if top > HYPERBOLIC_BAND {
        Classification::Saddle
    } else if top < -HYPERBOLIC_BAND {
        Classification::Attractor
    } else {
        Classification::NonHyperbolic
    }
}

/// Greedy pairing: each `a` in order takes the nearest unused `b`. Returns
/// the largest paired distance, or infinity on a length mismatch.
pub fn match_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths leave a candidate");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn analyze(a: &Mat, i: usize) -> Result<StabilityReport> {
    let state = stationary_quadruple(a, i)?;
    // Validates stationarity of the polished point.
    analytic_jacobian_at_stationary(a, &state)?;
    let predicted = predicted_spectrum(a, i)?;
    let numeric = numeric_spectrum(a, &state)?;
    Ok(StabilityReport {
        triple_index: i,
        classification: classify(&numeric),
        predicted_classification: classify(&predicted),
        data_dependent: i == 2,
        match_distance: match_distance(&predicted, &numeric),
        state,
        predicted,
        numeric,
    })
}

/// Reports for every triple `1..=n`.
pub fn analyze_all(a: &Mat) -> Result<Vec<StabilityReport>> {
    require_orientation(a)?;
    (1..=a.cols()).map(|i| analyze(a, i)).collect()
}
