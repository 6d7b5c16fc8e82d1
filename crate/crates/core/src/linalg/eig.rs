//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Relative asymmetry accepted by [`sym_eig`].
pub const SYMMETRY_TOL: f64 = 1e-10;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 30;

/// Eigen- or singular values with their orthonormal vectors as columns.
///
/// Values are sorted descending; each vector's first component with
/// magnitude above `1e-12` is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.col(i)
    }
}

pub fn sym_eig(c: &Mat) -> Result<Spectrum> {
    c.require_symmetric(SYMMETRY_TOL)?;
    let n = c.rows();
    // Work on the exactly symmetrized copy so rotations see one triangle.
    let mut a = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let mut v = Mat::identity(n);
    let scale = a.frobenius();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a) <= OFF_DIAGONAL_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal(&a) > OFF_DIAGONAL_TOL * scale {
        return Err(Error::Convergence {
            algorithm: "jacobi",
            lo: 0,
            hi: n - 1,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let mut col = v.col(i);
        canonical_sign(&mut col);
        vectors.set_col(k, &col);
    }
    Ok(Spectrum { values, vectors })
}

fn off_diagonal(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut Mat, v: &mut Mat, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Flip `x` so that its first component with `|x_i| > 1e-12` is positive.
/// Returns whether `x` was negated.
pub fn canonical_sign(x: &mut [f64]) -> bool {
    match x.iter().copied().find(|v| v.abs() > 1e-12) {
        Some(first) if first < 0.0 => {
            x.iter_mut().for_each(|v| *v = -*v);
            true
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gen::make_spd, vector};

    #[test]
    fn diagonal_matrix() {
        let s = sym_eig(&Mat::diag(&[2.0, 1.0])).unwrap();
        assert_eq!(s.values, vec![2.0, 1.0]);
        assert_eq!(s.vector(0), vec![1.0, 0.0]);
        assert_eq!(s.vector(1), vec![0.0, 1.0]);
    }

    #[test]
    fn symmetric_two_by_two_closed_form() {
        let s = sym_eig(&Mat::from_rows(&[[2.0, 1.0], [1.0, 2.0]])).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.values[0] - 3.0).abs() < 1e-14);
        assert!((s.values[1] - 1.0).abs() < 1e-14);
        for (got, want) in s.vector(0).iter().zip([r, r]) {
            assert!((got - want).abs() < 1e-14);
        }
        for (got, want) in s.vector(1).iter().zip([r, -r]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn random_spd_pairs_have_small_residual() {
        let c = make_spd(&[8.0, 7.0, 5.0, 3.0, 2.0, 1.0, 0.5, 0.1], 11).unwrap();
        let s = sym_eig(&c).unwrap();
        for i in 0..8 {
            let v = s.vector(i);
            let r = vector::sub(&c.mul_vec(&v), &vector::scale(&v, s.values[i]));
            assert!(vector::norm(&r) < 1e-9, "pair {i}: {:e}", vector::norm(&r));
        }
    }

    #[test]
    fn rejects_asymmetric_and_rectangular() {
        assert!(matches!(
            sym_eig(&Mat::from_rows(&[[1.0, 0.5], [0.0, 1.0]])),
            Err(Error::Asymmetric(_))
        ));
        assert!(matches!(sym_eig(&Mat::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn indefinite_sorted_by_value() {
        let s = sym_eig(&Mat::diag(&[-3.0, 1.0, 2.0])).unwrap();
        assert_eq!(s.values, vec![2.0, 1.0, -3.0]);
    }
}
