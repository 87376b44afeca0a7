//! Vector autoregressions: lag-order selection, estimation, stability,
//! orthogonalised impulse responses and variance decompositions.

use nalgebra::DMatrix;

use crate::dataset::DataTable;
use crate::linalg::{cholesky_lower, from_rows, least_squares, log_det_spd};
use crate::stats::Distribution;
use crate::{Error, Result};

/// One row of a lag-order selection table.
#[derive(Debug, Clone, PartialEq)]
pub struct LagRow {
    pub lag: usize,
    pub logl: f64,
    /// Sequential modified LR statistic against `lag - 1`; `None` at lag 0.
    pub lr: Option<f64>,
    pub fpe: f64,
    pub aic: f64,
    pub sc: f64,
    pub hq: f64,
    /// `K (K lag + 1)`.
    pub n_params: usize,
}

/// Lag chosen by each criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarredLags {
    /// `None` when no sequential LR test rejects at 5%.
    pub lr: Option<usize>,
    pub fpe: usize,
    pub aic: usize,
    pub sc: usize,
    pub hq: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagSelection {
    pub rows: Vec<LagRow>,
    pub starred: StarredLags,
    /// Common sample size shared by every row.
    pub effective_t: usize,
    pub n_vars: usize,
}

/// Regressor rows `[1, y_{t-1}', ..., y_{t-p}']` for `t = start..n`.
fn lagged_design(rows: &[Vec<f64>], p: usize, start: usize) -> DMatrix<f64> {
    let k = rows.first().map_or(0, Vec::len);
    let t = rows.len() - start;
    DMatrix::from_fn(t, k * p + 1, |i, j| {
        if j == 0 {
            1.0
        } else {
            let lag = (j - 1) / k + 1;
            let var = (j - 1) % k;
            rows[start + i - lag][var]
        }
    })
}

struct LsVar {
    coef: DMatrix<f64>,
    resid: DMatrix<f64>,
}

fn fit_system(rows: &[Vec<f64>], p: usize, start: usize, strict: bool) -> Result<LsVar> {
    let k = rows[0].len();
    let z = lagged_design(rows, p, start);
    let y = from_rows(&rows[start..], k);
    let ls = least_squares(&z, &y, strict)?;
    let resid = &y - &z * &ls.coef;
    Ok(LsVar {
        coef: ls.coef.transpose(),
        resid,
    })
}

fn check_sample(n: usize, k: usize, p: usize, start: usize) -> Result<usize> {
    let t = n.saturating_sub(start);
    if t <= k * p + 1 {
        return Err(Error::SampleTooShortForLag {
            lag: p,
            vars: k,
            observations: t,
        });
    }
    Ok(t)
}

/// Fits VAR(0..=max_lag) on the common sample that drops the first
/// `max_lag` observations and tabulates LogL, LR, FPE, AIC, SC and HQ.
pub fn select_lag(data: &DataTable, max_lag: usize) -> Result<LagSelection> {
    let rows = data.rows();
    let k = data.n_columns();
    let t = check_sample(rows.len(), k, max_lag, max_lag)?;
    let tf = t as f64;
    let kf = k as f64;

    let mut log_dets = Vec::with_capacity(max_lag + 1);
    let mut out = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let fit = fit_system(&rows, lag, max_lag, false)?;
        let sigma = fit.resid.transpose() * &fit.resid / tf;
        let log_det = log_det_spd(&sigma).ok_or(Error::SingularCovariance(lag))?;
        let n_params = k * (k * lag + 1);
        let np = n_params as f64;
        let logl = -(tf * kf / 2.0) * (1.0 + (2.0 * std::f64::consts::PI).ln()) - tf / 2.0 * log_det;
        let m = (k * lag + 1) as f64;
        let lr = (lag > 0).then(|| (tf - m) * (log_dets[lag - 1] - log_det));
        out.push(LagRow {
            lag,
            logl,
            lr,
            fpe: ((tf + m) / (tf - m)).powi(k as i32) * log_det.exp(),
            aic: (-2.0 * logl + 2.0 * np) / tf,
            sc: (-2.0 * logl + np * tf.ln()) / tf,
            hq: (-2.0 * logl + 2.0 * np * tf.ln().ln()) / tf,
            n_params,
        });
        log_dets.push(log_det);
    }

    let argmin = |f: fn(&LagRow) -> f64| {
        out.iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, r)| {
                let v = f(r);
                if v < bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            })
            .0
    };
    let chi = Distribution::ChiSquare { df: kf * kf };
    let mut lr_star = None;
    for row in out.iter().rev() {
        if let Some(lr) = row.lr {
            if chi.sf(lr)? < 0.05 {
                lr_star = Some(row.lag);
                break;
            }
        }
    }
    let starred = StarredLags {
        lr: lr_star,
        fpe: argmin(|r| r.fpe),
        aic: argmin(|r| r.aic),
        sc: argmin(|r| r.sc),
        hq: argmin(|r| r.hq),
    };
    Ok(LagSelection {
        rows: out,
        starred,
        effective_t: t,
        n_vars: k,
    })
}

/// Estimated VAR(p) with intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    pub names: Vec<String>,
    pub p: usize,
    /// `K x (K p + 1)`: row `i` is `[c_i, A_1[i,:], ..., A_p[i,:]]`.
    pub coefficients: DMatrix<f64>,
    /// `T x K`.
    pub residuals: DMatrix<f64>,
    /// Residual covariance with divisor `T`.
    pub sigma_ml: DMatrix<f64>,
    /// Residual covariance with divisor `T - (K p + 1)`.
    pub sigma_df: DMatrix<f64>,
    pub effective_t: usize,
}

impl VarModel {
    /// Builds a model from known parameters, e.g. for simulation studies.
    /// `lags[i]` is `A_{i+1}`.
    pub fn from_parts(
        names: Vec<String>,
        intercept: &[f64],
        lags: &[DMatrix<f64>],
        sigma: DMatrix<f64>,
    ) -> Result<Self> {
        let k = names.len();
        if intercept.len() != k
            || lags.iter().any(|a| a.shape() != (k, k))
            || sigma.shape() != (k, k)
        {
            return Err(Error::DimensionMismatch("VAR parts".into()));
        }
        let p = lags.len();
        let coefficients = DMatrix::from_fn(k, k * p + 1, |i, j| {
            if j == 0 {
                intercept[i]
            } else {
                lags[(j - 1) / k][(i, (j - 1) % k)]
            }
        });
        Ok(Self {
            names,
            p,
            coefficients,
            residuals: DMatrix::zeros(0, k),
            sigma_ml: sigma.clone(),
            sigma_df: sigma,
            effective_t: 0,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn intercept(&self) -> Vec<f64> {
        self.coefficients.column(0).iter().copied().collect()
    }

    /// `A_lag` for `lag` in `1..=p`.
    pub fn lag_matrix(&self, lag: usize) -> DMatrix<f64> {
        let k = self.n_vars();
        assert!((1..=self.p).contains(&lag), "lag out of range");
        self.coefficients
            .columns(1 + (lag - 1) * k, k)
            .into_owned()
    }

    /// `Kp x Kp` companion matrix.
    pub fn companion(&self) -> DMatrix<f64> {
        let k = self.n_vars();
        let kp = k * self.p;
        let mut c = DMatrix::zeros(kp, kp);
        for lag in 1..=self.p {
            c.view_mut((0, (lag - 1) * k), (k, k))
                .copy_from(&self.lag_matrix(lag));
        }
        for i in k..kp {
            c[(i, i - k)] = 1.0;
        }
        c
    }

    /// MA coefficient matrices `Psi_0..=Psi_h`.
    pub fn ma_matrices(&self, horizon: usize) -> Vec<DMatrix<f64>> {
        let k = self.n_vars();
        let lags: Vec<DMatrix<f64>> = (1..=self.p).map(|l| self.lag_matrix(l)).collect();
        let mut psi: Vec<DMatrix<f64>> = vec![DMatrix::identity(k, k)];
        for h in 1..=horizon {
            let mut acc = DMatrix::zeros(k, k);
            for i in 1..=h.min(self.p) {
                acc += &lags[i - 1] * &psi[h - i];
            }
            psi.push(acc);
        }
        psi
    }
}

/// Equation-by-equation OLS of each variable on an intercept and `p` lags of
/// every variable.
pub fn var_fit(data: &DataTable, p: usize) -> Result<VarModel> {
    let rows = data.rows();
    let k = data.n_columns();
    let t = check_sample(rows.len(), k, p, p)?;
    let fit = fit_system(&rows, p, p, true)?;
    let cross = fit.resid.transpose() * &fit.resid;
    let df = (t - (k * p + 1)) as f64;
    Ok(VarModel {
        names: data.names().iter().map(|s| s.to_string()).collect(),
        p,
        coefficients: fit.coef,
        sigma_ml: &cross / t as f64,
        sigma_df: cross / df,
        residuals: fit.resid,
        effective_t: t,
    })
}

/// Companion-matrix eigenvalue moduli in descending order.
pub fn var_stability(model: &VarModel) -> Vec<f64> {
    if model.p == 0 || model.n_vars() == 0 {
        return Vec::new();
    }
    let mut moduli: Vec<f64> = model
        .companion()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli
}

/// Cholesky ordering as a permutation of variable indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering(Vec<usize>);

impl Ordering {
    pub fn identity(k: usize) -> Self {
        Ordering((0..k).collect())
    }

    pub fn new(perm: Vec<usize>, k: usize) -> Result<Self> {
        let mut seen = vec![false; k];
        if perm.len() != k {
            return Err(Error::InvalidOrdering(format!(
                "expected {k} entries, got {}",
                perm.len()
            )));
        }
        for &i in &perm {
            if i >= k || seen[i] {
                return Err(Error::InvalidOrdering(format!("{perm:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Ordering(perm))
    }

    /// Resolves variable names against `names`.
    pub fn from_names<S: AsRef<str>>(order: &[S], names: &[String]) -> Result<Self> {
        let perm = order
            .iter()
            .map(|o| {
                names
                    .iter()
                    .position(|n| n == o.as_ref())
                    .ok_or_else(|| Error::InvalidOrdering(format!("unknown variable `{}`", o.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(perm, names.len())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Impact matrix `B` with `B B' = sigma` whose columns are the orthogonal
/// shocks, lower triangular in the permuted coordinates.
fn impact_matrix(sigma: &DMatrix<f64>, ordering: &Ordering) -> Result<DMatrix<f64>> {
    let k = sigma.nrows();
    let perm = ordering.as_slice();
    if perm.len() != k {
        return Err(Error::InvalidOrdering("length differs from model".into()));
    }
    let permuted = DMatrix::from_fn(k, k, |i, j| sigma[(perm[i], perm[j])]);
    let l = cholesky_lower(&permuted).ok_or(Error::CovarianceNotPD)?;
    let mut b = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            b[(perm[i], perm[j])] = l[(i, j)];
        }
    }
    Ok(b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    pub names: Vec<String>,
    pub ordering: Ordering,
    /// `responses[h][(i, j)]`: response of variable `i` at horizon `h` to a
    /// one-standard-deviation orthogonal shock in variable `j`, for
    /// `h = 0..=H`.
    pub responses: Vec<DMatrix<f64>>,
}

impl ImpulseResponse {
    /// Path of `response` to a shock in `impulse` over all horizons.
    pub fn path(&self, response: usize, impulse: usize) -> Vec<f64> {
        self.responses.iter().map(|m| m[(response, impulse)]).collect()
    }
}

/// Orthogonalised impulse responses using the Cholesky factor of
/// `sigma_df` under `ordering`. Results are indexed in the model's own
/// variable order.
pub fn irf(model: &VarModel, horizon: usize, ordering: &Ordering) -> Result<ImpulseResponse> {
    let b = impact_matrix(&model.sigma_df, ordering)?;
    let responses = model
        .ma_matrices(horizon)
        .into_iter()
        .map(|psi| psi * &b)
        .collect();
    Ok(ImpulseResponse {
        names: model.names.clone(),
        ordering: ordering.clone(),
        responses,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fevd {
    pub names: Vec<String>,
    pub ordering: Ordering,
    /// `shares[h - 1][(i, j)]`: fraction of variable `i`'s `h`-step forecast
    /// error variance due to shock `j`, for `h = 1..=H`.
    pub shares: Vec<DMatrix<f64>>,
}

impl Fevd {
    pub fn shares_of(&self, variable: usize, shock: usize) -> Vec<f64> {
        self.shares.iter().map(|m| m[(variable, shock)]).collect()
    }
}

/// Forecast-error variance decomposition for horizons `1..=H`.
pub fn fevd(model: &VarModel, horizon: usize, ordering: &Ordering) -> Result<Fevd> {
    if horizon == 0 {
        return Err(Error::Config("FEVD horizon must be at least 1".into()));
    }
    let ir = irf(model, horizon - 1, ordering)?;
    let k = model.n_vars();
    let mut acc = DMatrix::<f64>::zeros(k, k);
    let mut shares = Vec::with_capacity(horizon);
    for theta in &ir.responses {
        acc += theta.component_mul(theta);
        let mut s = acc.clone();
        for i in 0..k {
            let total: f64 = acc.row(i).sum();
            s.row_mut(i).unscale_mut(total);
        }
        shares.push(s);
    }
    Ok(Fevd {
        names: model.names.clone(),
        ordering: ordering.clone(),
        shares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TimeSeries;

    fn univariate(phi: f64, sigma: f64) -> VarModel {
        VarModel::from_parts(
            vec!["y".into()],
            &[0.0],
            &[DMatrix::from_element(1, 1, phi)],
            DMatrix::from_element(1, 1, sigma * sigma),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_ar1_recovered() {
        let mut y = vec![1.0];
        for _ in 0..30 {
            let last = *y.last().unwrap();
            y.push(0.5 * last);
        }
        let t = DataTable::new(vec![TimeSeries::new("y", 1, y, "").unwrap()]).unwrap();
        let m = var_fit(&t, 1).unwrap();
        assert!((m.coefficients[(0, 1)] - 0.5).abs() < 1e-12);
        assert!(m.coefficients[(0, 0)].abs() < 1e-12);
        assert!(m.residuals.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn stability_examples() {
        assert!((var_stability(&univariate(0.5, 1.0))[0] - 0.5).abs() < 1e-12);
        assert!((var_stability(&univariate(1.0, 1.0))[0] - 1.0).abs() < 1e-12);
        let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.3]);
        let m = VarModel::from_parts(vec!["a".into(), "b".into()], &[0.0, 0.0], &[a], DMatrix::identity(2, 2)).unwrap();
        let moduli = var_stability(&m);
        assert!((moduli[0] - 0.5).abs() < 1e-12 && (moduli[1] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn closed_form_irf() {
        let m = univariate(0.5, 2.0);
        let r = irf(&m, 20, &Ordering::identity(1)).unwrap();
        for (h, resp) in r.responses.iter().enumerate() {
            assert!((resp[(0, 0)] - 2.0 * 0.5_f64.powi(h as i32)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_coefficients_do_not_propagate() {
        let z = DMatrix::zeros(2, 2);
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]);
        let m = VarModel::from_parts(vec!["a".into(), "b".into()], &[0.0, 0.0], &[z.clone(), z], sigma).unwrap();
        let r = irf(&m, 6, &Ordering::identity(2)).unwrap();
        assert!(r.responses[1..].iter().all(|x| x.iter().all(|v| *v == 0.0)));
        assert_eq!(r.responses[0][(0, 1)], 0.0);
    }

    #[test]
    fn fevd_diagonal_system() {
        let a = DMatrix::from_row_slice(2, 2, &[0.7, 0.0, 0.0, -0.4]);
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]);
        let m = VarModel::from_parts(vec!["a".into(), "b".into()], &[0.0, 0.0], &[a], sigma).unwrap();
        let f = fevd(&m, 8, &Ordering::new(vec![1, 0], 2).unwrap()).unwrap();
        for s in &f.shares {
            assert!((s[(0, 0)] - 1.0).abs() < 1e-15 && (s[(1, 1)] - 1.0).abs() < 1e-15);
        }
        assert!(fevd(&m, 0, &Ordering::identity(2)).is_err());
    }

    #[test]
    fn ordering_validation() {
        assert!(Ordering::new(vec![0, 0], 2).is_err());
        assert!(Ordering::new(vec![0], 2).is_err());
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(Ordering::from_names(&["y", "x"], &names).unwrap().as_slice(), &[1, 0]);
        assert!(Ordering::from_names(&["y", "z"], &names).is_err());
    }

    #[test]
    fn non_pd_covariance() {
        let m = VarModel::from_parts(
            vec!["a".into(), "b".into()],
            &[0.0, 0.0],
            &[DMatrix::zeros(2, 2)],
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]),
        )
        .unwrap();
        assert!(matches!(irf(&m, 3, &Ordering::identity(2)), Err(Error::CovarianceNotPD)));
    }
}
