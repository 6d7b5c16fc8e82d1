//! Singular value decomposition: right vectors from the symmetric
//! eigenproblem of `AᵀA`, refined by one-sided Jacobi sweeps on `AV`.

use crate::error::{Error, Result};
use crate::linalg::eig::{canonical_sign, sym_eig};
use crate::linalg::{vector, Mat};

/// Singular values below this fraction of `‖A‖` are treated as zero.
const RANK_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 30;

/// Full SVD `A = U S Vᵀ` with square orthogonal `left` (m×m) and `right`
/// (n×n); `singular` has `min(m, n)` nonnegative descending entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub left: Mat,
    pub singular: Vec<f64>,
    pub right: Mat,
}

impl Svd {
    pub fn u(&self, i: usize) -> Vec<f64> {
        self.left.col(i)
    }

    pub fn v(&self, i: usize) -> Vec<f64> {
        self.right.col(i)
    }

    /// `U S Vᵀ`
    pub fn reconstruct(&self) -> Mat {
        let s = Mat::from_diag(self.left.rows(), self.right.rows(), &self.singular);
        self.left.matmul(&s).matmul(&self.right.transpose())
    }
}

pub fn svd_factor(a: &Mat) -> Result<Svd> {
    if !vector::all_finite(a.as_slice()) {
        return Err(Error::NonFinite("svd input".into()));
    }
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    let ata = a.transpose().matmul(a);
    let mut right = sym_eig(&ata)?.vectors;
    let scale = a.frobenius();
    let mut w = a.matmul(&right);
    one_sided_jacobi(&mut w, &mut right, RANK_TOL * scale)?;

    let norms: Vec<f64> = (0..n).map(|j| vector::norm(&w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let right_cols: Vec<Vec<f64>> = order.iter().map(|&j| right.col(j)).collect();
    let mut right = Mat::from_cols(n, &right_cols);

    let mut singular = Vec::with_capacity(k);
    let mut left_cols: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, &j) in order.iter().enumerate().take(k) {
        let mut v = right.col(i);
        let mut av = w.col(j);
        if canonical_sign(&mut v) {
            av.iter_mut().for_each(|x| *x = -*x);
        }
        right.set_col(i, &v);
        let sigma = norms[j];
        if sigma > RANK_TOL * scale {
            singular.push(sigma);
            left_cols.push(vector::scale(&av, 1.0 / sigma));
        } else {
            singular.push(0.0);
        }
    }
    for i in k..n {
        let mut v = right.col(i);
        canonical_sign(&mut v);
        right.set_col(i, &v);
    }
    complete_basis(&mut left_cols, m);
    let left = Mat::from_cols(m, &left_cols);
    Ok(Svd {
        left,
        singular,
        right,
    })
}

/// Rotate column pairs of `w` until they are mutually orthogonal to
/// working precision, applying the same rotations to `v`. Columns shorter
/// than `negligible` are left alone.
fn one_sided_jacobi(w: &mut Mat, v: &mut Mat, negligible: f64) -> Result<()> {
    let floor = negligible * negligible;
    let n = w.cols();
    // Dot products over m rows carry about m·ε relative rounding.
    let tol = w.rows().max(1) as f64 * f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (wp, wq) = (w.col(p), w.col(q));
                let alpha = vector::norm_sq(&wp);
                let beta = vector::norm_sq(&wq);
                let gamma = vector::dot(&wp, &wq);
                if alpha <= floor || beta <= floor || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(w, p, q, c, s);
                rotate(v, p, q, c, s);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::Convergence {
        algorithm: "one-sided Jacobi",
        lo: 0,
        hi: n.saturating_sub(1),
    })
}

fn rotate(x: &mut Mat, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..x.rows() {
        let (a, b) = (x[(i, p)], x[(i, q)]);
        x[(i, p)] = c * a - s * b;
        x[(i, q)] = s * a + c * b;
    }
}

/// Extend orthonormal `cols` to a basis of R^m with Gram-Schmidt over the
/// canonical vectors (two passes for stability).
fn complete_basis(cols: &mut Vec<Vec<f64>>, m: usize) {
    let mut k = 0;
    while cols.len() < m && k < m {
        let mut e = vector::basis(m, k);
        for _ in 0..2 {
            for c in cols.iter() {
                let d = vector::dot(c, &e);
                vector::axpy(-d, c, &mut e);
            }
        }
        let nrm = vector::norm(&e);
        if nrm > 1e-8 {
            let mut e = vector::scale(&e, 1.0 / nrm);
            canonical_sign(&mut e);
            cols.push(e);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gen::make_cross;

    fn orthonormality_defect(q: &Mat) -> f64 {
        q.transpose().matmul(q).sub(&Mat::identity(q.cols())).max_abs()
    }

    #[test]
    fn diagonal() {
        let s = svd_factor(&Mat::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(s.singular, vec![3.0, 1.0]);
        assert_eq!(s.left, Mat::identity(2));
        assert_eq!(s.right, Mat::identity(2));
    }

    #[test]
    fn rank_one_outer_product() {
        let a_vec = vector::normalized(&[1.0, 2.0, 2.0]).unwrap();
        let b_vec = vector::normalized(&[3.0, -4.0]).unwrap();
        let a = Mat::from_fn(3, 2, |i, j| 2.0 * a_vec[i] * b_vec[j]);
        let s = svd_factor(&a).unwrap();
        assert!((s.singular[0] - 2.0).abs() < 1e-14);
        assert!(s.singular[1].abs() < 1e-12);
        assert!(vector::abs_cosine(&s.u(0), &a_vec) > 1.0 - 1e-14);
        assert!(vector::abs_cosine(&s.v(0), &b_vec) > 1.0 - 1e-14);
        assert!(orthonormality_defect(&s.left) < 1e-12);
        assert!(orthonormality_defect(&s.right) < 1e-12);
    }

    #[test]
    fn recovers_constructed_singulars() {
        let spectrum = [10.0, 2.0, 1.0, 0.5];
        let a = make_cross(&spectrum, 6, 4, 5).unwrap();
        let s = svd_factor(&a).unwrap();
        for (got, want) in s.singular.iter().zip(spectrum) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        for i in 0..4 {
            let r1 = vector::sub(&a.mul_vec(&s.v(i)), &vector::scale(&s.u(i), s.singular[i]));
            let r2 = vector::sub(&a.tr_mul_vec(&s.u(i)), &vector::scale(&s.v(i), s.singular[i]));
            assert!(vector::norm(&r1) < 1e-9 * a.frobenius());
            assert!(vector::norm(&r2) < 1e-9 * a.frobenius());
        }
        assert!(s.reconstruct().sub(&a).frobenius() < 1e-8 * a.frobenius());
        assert!(orthonormality_defect(&s.left) < 1e-9);
    }

    #[test]
    fn wide_matrix() {
        let a = make_cross(&[4.0, 1.5], 2, 5, 3).unwrap();
        let s = svd_factor(&a).unwrap();
        assert_eq!(s.singular.len(), 2);
        assert_eq!((s.left.rows(), s.right.rows()), (2, 5));
        assert!(s.reconstruct().sub(&a).frobenius() < 1e-9 * a.frobenius());
        assert!(orthonormality_defect(&s.right) < 1e-9);
    }
}
