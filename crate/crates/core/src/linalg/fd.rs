//! Central finite-difference Jacobians and gradients.

use crate::error::{Error, Result};
use crate::linalg::{vector, Mat};

/// `1e-5 · (1 + ‖z‖)`
pub fn default_step(z: &[f64]) -> f64 {
    1e-5 * (1.0 + vector::norm(z))
}

/// Column `j` is `(f(z + h eⱼ) − f(z − h eⱼ)) / 2h`.
pub fn fd_jacobian<F>(f: F, z: &[f64], h: f64) -> Result<Mat>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let n = z.len();
    let mut zp = z.to_vec();
    let mut cols = Vec::with_capacity(n);
    let mut rows = None;
    for j in 0..n {
        zp[j] = z[j] + h;
        let hi = zp[j];
        let plus = eval_finite(&f, &zp)?;
        zp[j] = z[j] - h;
        // The representable spread, not 2h, keeps linear maps exact.
        let width = hi - zp[j];
        let minus = eval_finite(&f, &zp)?;
        zp[j] = z[j];
        if *rows.get_or_insert(plus.len()) != plus.len() || plus.len() != minus.len() {
            return Err(Error::Dimension("function output length changed".into()));
        }
        cols.push(
            plus.iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / width)
                .collect::<Vec<_>>(),
        );
    }
    Ok(Mat::from_cols(rows.unwrap_or(0), &cols))
}

pub fn fd_gradient<G>(g: G, z: &[f64], h: f64) -> Result<Vec<f64>>
where
    G: Fn(&[f64]) -> Result<f64>,
{
    let j = fd_jacobian(|x| g(x).map(|v| vec![v]), z, h)?;
    Ok(j.row(0).to_vec())
}

fn eval_finite<F>(f: &F, z: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let y = f(z)?;
    if !vector::all_finite(&y) {
        return Err(Error::NonFinite("function value during finite differencing".into()));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map() {
        let z = [0.3, -2.0, 5.0];
        let j = fd_jacobian(|x| Ok(x.to_vec()), &z, default_step(&z)).unwrap();
        assert!(j.sub(&Mat::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn linear_map() {
        let c = Mat::from_rows(&[[2.0, 1.0], [1.0, 2.0]]);
        let z = [0.7, -0.1];
        let j = fd_jacobian(|x| Ok(c.mul_vec(x)), &z, default_step(&z)).unwrap();
        assert!(j.sub(&c).max_abs() < 1e-8);
    }

    #[test]
    fn half_squared_norm_gradient() {
        let z = [1.0, -2.0, 0.5];
        let g = fd_gradient(|x| Ok(0.5 * vector::norm_sq(x)), &z, default_step(&z)).unwrap();
        for (a, b) in g.iter().zip(z) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = fd_gradient(|_| Ok(4.2), &[1.0, 2.0], 1e-5).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn non_finite_values_are_reported() {
        let r = fd_jacobian(|x| Ok(vec![1.0 / x[0]]), &[0.0], 1e-5);
        assert!(r.is_ok(), "±h avoids the pole");
        let r = fd_jacobian(|_| Ok(vec![f64::NAN]), &[1.0], 1e-5);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn quadratic_map_error_is_second_order() {
        // f(z) = (z0^3, z0 z1); exact Jacobian [[3 z0^2, 0], [z1, z0]].
        let f = |x: &[f64]| Ok(vec![x[0].powi(3), x[0] * x[1]]);
        let z = [1.3, 0.4];
        let exact = Mat::from_rows(&[[3.0 * 1.3 * 1.3, 0.0], [0.4, 1.3]]);
        let e1 = fd_jacobian(f, &z, 1e-2).unwrap().sub(&exact).max_abs();
        let e2 = fd_jacobian(f, &z, 5e-3).unwrap().sub(&exact).max_abs();
        assert!(e1 / e2 >= 3.0, "ratio {}", e1 / e2);
    }
}
