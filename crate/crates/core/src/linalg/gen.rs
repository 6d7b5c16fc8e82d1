//! Reproducible test matrices with prescribed spectra.

use crate::error::{Error, Result};
use crate::linalg::rng::{self, tag, Stream};
use crate::linalg::{vector, Mat};

/// Minimum relative gap between consecutive prescribed values.
pub const MIN_RELATIVE_GAP: f64 = 1e-6;
/// `make_cross` re-draws until `|1ᵀũ₁|` and `|1ᵀṽ₁|` exceed this.
pub const MIN_SUM_PROJECTION: f64 = 1e-6;
const MAX_REDRAWS: u64 = 64;

/// Symmetric positive definite `QᵀΛQ` with `Q` from the QR factorization
/// of a seeded Gaussian matrix.
pub fn make_spd(eigenvalues: &[f64], seed: u64) -> Result<Mat> {
    check_spectrum(eigenvalues)?;
    let n = eigenvalues.len();
    let q = random_orthogonal(n, &mut rng::stream(seed, tag::SPD_MATRIX));
    let qt_lambda = Mat::from_fn(n, n, |i, j| q[(j, i)] * eigenvalues[j]);
    let c = qt_lambda.matmul(&q);
    // Exact symmetry; rounding in the product is not symmetric.
    Ok(Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)])))
}

/// `m×n` matrix `U S Vᵀ` with seeded orthogonal `U`, `V` and the given
/// singular values (padded with zeros to `min(m, n)`).
///
/// The principal pair is arranged so that `1ᵀũ₁` and `1ᵀṽ₁` are both
/// positive and above [`MIN_SUM_PROJECTION`]: the factors are re-drawn with
/// an incremented sub-seed when a projection is too small, and `ũ₁` is
/// negated when the projections disagree in sign. The latter keeps the
/// constant-sum scalar estimates of the principal triple positive.
pub fn make_cross(singulars: &[f64], m: usize, n: usize, seed: u64) -> Result<Mat> {
    if m < 1 || n < 1 {
        return Err(Error::Dimension(format!("cross-covariance must be at least 1x1, got {m}x{n}")));
    }
    if singulars.len() > m.min(n) {
        return Err(Error::Spectrum(format!(
            "{} singular values do not fit a {m}x{n} matrix",
            singulars.len()
        )));
    }
    check_spectrum(singulars)?;
    for attempt in 0..MAX_REDRAWS {
        let sub = attempt << 32;
        let mut u = random_orthogonal(m, &mut rng::stream(seed, tag::CROSS_LEFT + sub));
        let v = random_orthogonal(n, &mut rng::stream(seed, tag::CROSS_RIGHT + sub));
        let s1 = vector::sum(&u.col(0));
        let r1 = vector::sum(&v.col(0));
        if s1.abs() <= MIN_SUM_PROJECTION || r1.abs() <= MIN_SUM_PROJECTION {
            continue;
        }
        if s1 * r1 < 0.0 {
            let flipped = vector::scale(&u.col(0), -1.0);
            u.set_col(0, &flipped);
        }
        let s = Mat::from_diag(m, n, singulars);
        return Ok(u.matmul(&s).matmul(&v.transpose()));
    }
    Err(Error::Spectrum(format!(
        "no admissible factors after {MAX_REDRAWS} draws"
    )))
}

fn check_spectrum(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Spectrum("empty spectrum".into()));
    }
    if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::Spectrum("values must be finite and positive".into()));
    }
    let scale = values[0];
    for w in values.windows(2) {
        if w[0] - w[1] < MIN_RELATIVE_GAP * scale {
            return Err(Error::Spectrum(format!(
                "values must be strictly descending with relative gaps ≥ {MIN_RELATIVE_GAP:e} ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt QR of a Gaussian matrix
/// with the signs of `R`'s diagonal folded into `Q`.
pub fn random_orthogonal(n: usize, rng: &mut Stream) -> Mat {
    let g = Mat::from_fn(n, n, |_, _| rng::normal(rng));
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = g.col(j);
        for _ in 0..2 {
            for prev in &q {
                let d = vector::dot(prev, &c);
                vector::axpy(-d, prev, &mut c);
            }
        }
        let r = vector::norm(&c);
        // Gaussian columns are independent with probability one.
        q.push(vector::scale(&c, 1.0 / r));
    }
    Mat::from_cols(n, &q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{svd_factor, sym_eig};

    #[test]
    fn spd_trace_matches_eigenvalue_sum() {
        let c = make_spd(&[2.0, 1.0], 9).unwrap();
        assert!((c.trace() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn spd_condition_number() {
        let c = make_spd(&[10.0, 1.0, 0.1], 3).unwrap();
        let s = sym_eig(&c).unwrap();
        let cond = s.values[0] / s.values[2];
        assert!((cond - 100.0).abs() < 1e-6);
    }

    #[test]
    fn spd_is_deterministic_per_seed() {
        let a = make_spd(&[3.0, 2.0, 1.0], 77).unwrap();
        let b = make_spd(&[3.0, 2.0, 1.0], 77).unwrap();
        let c = make_spd(&[3.0, 2.0, 1.0], 78).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn degenerate_or_invalid_spectra_are_rejected() {
        assert!(matches!(make_spd(&[1.0, 1.0], 0), Err(Error::Spectrum(_))));
        assert!(matches!(make_spd(&[1.0, 2.0], 0), Err(Error::Spectrum(_))));
        assert!(matches!(make_spd(&[1.0, -1.0], 0), Err(Error::Spectrum(_))));
        assert!(matches!(make_cross(&[2.0, 2.0], 2, 2, 0), Err(Error::Spectrum(_))));
        assert!(matches!(make_cross(&[3.0, 2.0, 1.0], 3, 2, 0), Err(Error::Spectrum(_))));
        assert!(matches!(make_cross(&[1.0], 0, 2, 0), Err(Error::Dimension(_))));
    }

    #[test]
    fn cross_frobenius_norm() {
        let a = make_cross(&[3.0, 1.0], 2, 2, 4).unwrap();
        assert!((a.frobenius() - 10f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn cross_rank_one() {
        let a = make_cross(&[5.0], 3, 2, 4).unwrap();
        let s = svd_factor(&a).unwrap();
        assert!((s.singular[0] - 5.0).abs() < 1e-9);
        assert!(s.singular[1] < 1e-9);
    }

    #[test]
    fn cross_principal_sums_are_positive() {
        for seed in 0..40 {
            let a = make_cross(&[4.0, 2.0, 1.0], 4, 3, seed).unwrap();
            let s = svd_factor(&a).unwrap();
            let (s1, r1) = (vector::sum(&s.u(0)), vector::sum(&s.v(0)));
            assert!(s1.abs() > 1e-6 && r1.abs() > 1e-6);
            assert!(s1 * r1 > 0.0, "seed {seed}");
        }
    }
}
