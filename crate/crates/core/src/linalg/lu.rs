//! LU factorization with partial pivoting.

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Debug, Clone)]
pub struct Lu {
    /// Unit-lower `L` below the diagonal, `U` on and above it.
    factors: Mat,
    perm: Vec<usize>,
    norm_1: f64,
}

impl Lu {
    /// Fails with [`Error::Singular`] when a pivot vanishes exactly.
    pub fn factor(a: &Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| f[(i, k)].abs().total_cmp(&f[(j, k)].abs()))
                .unwrap_or(k);
            if f[(p, k)] == 0.0 {
                return Err(Error::Singular(f64::INFINITY));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = f[(p, j)];
                    f[(p, j)] = f[(k, j)];
                    f[(k, j)] = t;
                }
            }
            let pivot = f[(k, k)];
            for i in k + 1..n {
                let l = f[(i, k)] / pivot;
                f[(i, k)] = l;
                for j in k + 1..n {
                    f[(i, j)] -= l * f[(k, j)];
                }
            }
        }
        Ok(Self {
            factors: f,
            perm,
            norm_1: a.norm_1(),
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let f = &self.factors;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= f[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= f[(i, j)] * x[j];
            }
            x[i] /= f[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Mat {
        let n = self.perm.len();
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| self.solve(&crate::linalg::vector::basis(n, j)))
            .collect();
        Mat::from_cols(n, &cols)
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, computed from the explicit inverse.
    pub fn condition_1(&self) -> f64 {
        self.norm_1 * self.inverse().norm_1()
    }
}
