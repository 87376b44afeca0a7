//! Small dense helpers over nalgebra shared by the estimators.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Relative singular-value threshold below which a direction counts as null.
pub const RANK_TOL: f64 = 1e-10;

/// Least-squares solution of `X b = Y` for one or more right-hand sides.
pub struct LeastSquares {
    /// `cols(X) x cols(Y)`
    pub coef: DMatrix<f64>,
    /// `(X'X)^-1` (pseudo-inverse when truncated)
    pub xtx_inv: DMatrix<f64>,
    #[allow(dead_code)]
    pub rank: usize,
}

/// Solves via SVD. With `strict`, a rank-deficient design is an error;
/// otherwise the minimum-norm solution is returned.
pub fn least_squares(x: &DMatrix<f64>, y: &DMatrix<f64>, strict: bool) -> Result<LeastSquares> {
    let cols = x.ncols();
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} design rows vs {} response rows",
            x.nrows(),
            y.nrows()
        )));
    }
    if cols == 0 {
        return Ok(LeastSquares {
            coef: DMatrix::zeros(0, y.ncols()),
            xtx_inv: DMatrix::zeros(0, 0),
            rank: 0,
        });
    }
    // Column scaling keeps the rank test meaningful when regressors differ
    // wildly in magnitude.
    let scale: Vec<f64> = (0..cols)
        .map(|j| {
            let n = x.column(j).norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut xs = x.clone();
    for (j, s) in scale.iter().enumerate() {
        xs.column_mut(j).unscale_mut(*s);
    }
    let svd = xs.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let s = &svd.singular_values;
    let s_max = s.iter().cloned().fold(0.0, f64::max);
    let tol = RANK_TOL * s_max;
    let rank = s.iter().filter(|&&v| v > tol).count();
    if strict && rank < cols {
        return Err(Error::RankDeficient { rank, cols });
    }
    let k = s.len();
    let mut inv_s = DVector::zeros(k);
    for i in 0..k {
        if s[i] > tol {
            inv_s[i] = 1.0 / s[i];
        }
    }
    // b_scaled = V S^+ U' Y
    let uty = u.transpose() * y;
    let mut scaled = uty;
    for i in 0..k {
        scaled.row_mut(i).scale_mut(inv_s[i]);
    }
    let v = v_t.transpose();
    let mut coef = &v * scaled;
    // (Xs'Xs)^+ = V S^-2 V'
    let mut vs = v.clone();
    for i in 0..k {
        vs.column_mut(i).scale_mut(inv_s[i]);
    }
    let mut xtx_inv = &vs * vs.transpose();
    for (j, sj) in scale.iter().enumerate() {
        coef.row_mut(j).unscale_mut(*sj);
        xtx_inv.row_mut(j).unscale_mut(*sj);
        xtx_inv.column_mut(j).unscale_mut(*sj);
    }
    Ok(LeastSquares {
        coef,
        xtx_inv,
        rank,
    })
}

/// Residuals `Y - X b` of a least-squares projection; with no regressors
/// the response is returned unchanged.
pub fn residualize(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() == 0 {
        return Ok(y.clone());
    }
    let fit = least_squares(x, y, false)?;
    Ok(y - x * fit.coef)
}

/// `ln det` of a symmetric positive-definite matrix, `None` if the
/// Cholesky factorisation fails.
pub fn log_det_spd(m: &DMatrix<f64>) -> Option<f64> {
    let chol = m.clone().cholesky()?;
    let l = chol.l();
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        let d = l[(i, i)];
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        acc += 2.0 * d.ln();
    }
    Some(acc)
}

/// Lower Cholesky factor.
pub fn cholesky_lower(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let l = m.clone().cholesky()?.l();
    if (0..l.nrows()).all(|i| l[(i, i)] > 0.0) {
        Some(l)
    } else {
        None
    }
}

/// Builds a matrix from row vectors.
pub fn from_rows(rows: &[Vec<f64>], ncols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_solution_and_inverse() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 3.0]);
        let ls = least_squares(&x, &y, true).unwrap();
        assert!((ls.coef[0] - 1.2).abs() < 1e-12);
        assert!((ls.coef[1] - 0.7).abs() < 1e-12);
        let xtx = x.transpose() * &x;
        let id = &xtx * &ls.xtx_inv;
        assert!((id - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn rank_deficiency_detected() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let y = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!(matches!(
            least_squares(&x, &y, true),
            Err(Error::RankDeficient { rank: 1, cols: 2 })
        ));
        let ls = least_squares(&x, &y, false).unwrap();
        assert_eq!(ls.rank, 1);
        assert!(((&x * &ls.coef) - &y).abs().max() < 1e-12);
    }

    #[test]
    fn log_det() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 3.0]);
        assert!((log_det_spd(&m).unwrap() - 8.0_f64.ln()).abs() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(log_det_spd(&bad).is_none());
    }
}
