use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems whose reciprocal 1-norm condition number falls below this are
/// treated as singular.
pub const RCOND_MIN: f64 = 1e-12;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `a x = b` by LU with partial pivoting.
///
/// The condition number is computed from the explicit inverse, which is
/// affordable at feeder sizes (a few hundred buses at most).
pub fn solve_dense(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(DVector::zeros(0));
    }
    let lu = a.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::SingularSystem { rcond: 0.0 })?;
    let rcond = 1.0 / (norm1(a) * norm1(&inv));
    if !(rcond >= RCOND_MIN) {
        return Err(Error::SingularSystem { rcond });
    }
    lu.solve(b).ok_or(Error::SingularSystem { rcond })
}
