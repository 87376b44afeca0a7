//! Least squares with the usual diagnostics, variance inflation factors,
//! and ridge regression in correlation form.

use nalgebra::{DMatrix, DVector};

use crate::linalg::least_squares;
use crate::stats::{t_two_sided, Distribution};
use crate::{Error, Result};

/// Regressor block. When built with an intercept, column 0 is all ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    data: DMatrix<f64>,
    names: Vec<String>,
    has_intercept: bool,
}

impl DesignMatrix {
    /// Columns given as `(name, values)`; an intercept named `const` is
    /// prepended when `intercept` is set.
    pub fn new(columns: &[(&str, &[f64])], intercept: bool) -> Result<Self> {
        let n = columns
            .first()
            .map(|c| c.1.len())
            .ok_or_else(|| Error::DimensionMismatch("no regressors".into()))?;
        if let Some((name, _)) = columns.iter().find(|c| c.1.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "column `{name}` length differs"
            )));
        }
        let offset = usize::from(intercept);
        let mut names = Vec::with_capacity(columns.len() + offset);
        if intercept {
            names.push("const".to_string());
        }
        names.extend(columns.iter().map(|c| c.0.to_string()));
        let data = DMatrix::from_fn(n, columns.len() + offset, |i, j| {
            if intercept && j == 0 {
                1.0
            } else {
                columns[j - offset].1[i]
            }
        });
        Self::from_matrix(data, names, intercept)
    }

    pub fn from_matrix(data: DMatrix<f64>, names: Vec<String>, has_intercept: bool) -> Result<Self> {
        if names.len() != data.ncols() {
            return Err(Error::DimensionMismatch("names vs columns".into()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite design entry".into()));
        }
        if has_intercept && data.column(0).iter().any(|&v| v != 1.0) {
            return Err(Error::MissingIntercept);
        }
        Ok(Self {
            data,
            names,
            has_intercept,
        })
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_intercept(&self) -> bool {
        self.has_intercept
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Indices of the non-intercept columns.
    fn slope_columns(&self) -> std::ops::Range<usize> {
        usize::from(self.has_intercept)..self.ncols()
    }

    /// The regressors without the intercept column.
    pub fn without_intercept(&self) -> DesignMatrix {
        let r = self.slope_columns();
        DesignMatrix {
            data: self.data.columns(r.start, r.len()).into_owned(),
            names: self.names[r].to_vec(),
            has_intercept: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// `B_j * sd(x_j) / sd(y)`; `None` for the intercept.
    pub standardized_coefficients: Vec<Option<f64>>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    /// `None` for the intercept.
    pub vif_per_regressor: Vec<Option<f64>>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// `+inf` for an exact fit.
    pub f_stat: f64,
    pub f_pvalue: f64,
    pub residuals: Vec<f64>,
    /// Residual variance with divisor `n - k`.
    pub sigma2: f64,
    pub sse: f64,
    pub n_obs: usize,
    pub log_likelihood: f64,
}

impl OlsFit {
    /// Gaussian AIC `-2 logL + 2k`.
    pub fn aic(&self) -> f64 {
        -2.0 * self.log_likelihood + 2.0 * self.coefficients.len() as f64
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

/// An exact fit leaves residual mass at rounding level only.
fn is_exact_fit(sse: f64, scale: f64) -> bool {
    sse <= 1e-24 * scale.max(f64::MIN_POSITIVE)
}

/// R² and F with the intercept-only null (or the zero null without an
/// intercept). Returns `(r2, adj_r2, f, f_p)`.
fn fit_summary(
    y: &[f64],
    sse: f64,
    n: usize,
    k: usize,
    has_intercept: bool,
) -> Result<(f64, f64, f64, f64)> {
    let ybar = mean(y);
    let sst: f64 = if has_intercept {
        y.iter().map(|v| (v - ybar).powi(2)).sum()
    } else {
        y.iter().map(|v| v * v).sum()
    };
    if sst <= 0.0 {
        return Err(Error::DegenerateResponse);
    }
    let r2 = (1.0 - sse / sst).clamp(0.0, 1.0);
    let df_model = k - usize::from(has_intercept);
    let df_resid = (n - k) as f64;
    let df_total = if has_intercept { n - 1 } else { n } as f64;
    let adj = 1.0 - (1.0 - r2) * df_total / df_resid;
    let (f, fp) = if df_model == 0 {
        (f64::NAN, f64::NAN)
    } else if is_exact_fit(sse, sst) {
        (f64::INFINITY, 0.0)
    } else {
        let f = (r2 / df_model as f64) / ((1.0 - r2) / df_resid);
        let fp = Distribution::FisherF {
            d1: df_model as f64,
            d2: df_resid,
        }
        .sf(f)?;
        (f, fp)
    };
    Ok((r2, adj, f, fp))
}

/// Ordinary least squares. The design must have more rows than columns and
/// full column rank.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    fit_ols(x, y, true)
}

/// As [`ols_fit`] without the VIF auxiliary regressions.
pub(crate) fn ols_fit_lean(x: &DesignMatrix, y: &[f64]) -> Result<OlsFit> {
    fit_ols(x, y, false)
}

fn fit_ols(x: &DesignMatrix, y: &[f64], with_vif: bool) -> Result<OlsFit> {
    let (n, k) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} design rows vs {} responses",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::DimensionMismatch(format!(
            "{n} observations for {k} coefficients"
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::DimensionMismatch("non-finite response".into()));
    }
    let yv = DMatrix::from_column_slice(n, 1, y);
    let ls = least_squares(x.matrix(), &yv, true)?;
    let beta: Vec<f64> = ls.coef.column(0).iter().copied().collect();
    let fitted = x.matrix() * &ls.coef;
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[(i, 0)]).collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let (r2, adj, f, fp) = fit_summary(y, sse, n, k, x.has_intercept())?;
    let sst: f64 = {
        let m = mean(y);
        y.iter().map(|v| (v - m).powi(2)).sum()
    };
    let exact = is_exact_fit(sse, sst.max(y.iter().map(|v| v * v).sum()));
    let df = (n - k) as f64;
    let sigma2 = if exact { 0.0 } else { sse / df };
    let se: Vec<f64> = (0..k)
        .map(|j| (sigma2 * ls.xtx_inv[(j, j)]).max(0.0).sqrt())
        .collect();
    let t: Vec<f64> = beta.iter().zip(&se).map(|(b, s)| b / s).collect();
    let p = t
        .iter()
        .map(|&tv| t_two_sided(df, tv))
        .collect::<Result<Vec<_>>>()?;

    let sd_y = sample_sd(y);
    let slopes = x.slope_columns();
    let standardized = (0..k)
        .map(|j| {
            slopes.contains(&j).then(|| {
                let col: Vec<f64> = x.matrix().column(j).iter().copied().collect();
                beta[j] * sample_sd(&col) / sd_y
            })
        })
        .collect();

    let n_slopes = slopes.len();
    let vifs = if !with_vif {
        vec![f64::NAN; n_slopes]
    } else if n_slopes >= 2 {
        vif(&x.without_intercept(), x.has_intercept())?
    } else {
        vec![1.0; n_slopes]
    };
    let mut vif_per_regressor = vec![None; k];
    for (j, v) in slopes.zip(vifs) {
        vif_per_regressor[j] = with_vif.then_some(v);
    }

    let nf = n as f64;
    let log_likelihood = if exact {
        f64::INFINITY
    } else {
        -0.5 * nf * ((2.0 * std::f64::consts::PI).ln() + (sse / nf).ln() + 1.0)
    };

    Ok(OlsFit {
        names: x.names().to_vec(),
        coefficients: beta,
        standard_errors: se,
        standardized_coefficients: standardized,
        t_stats: t,
        p_values: p,
        vif_per_regressor,
        r_squared: r2,
        adj_r_squared: adj,
        f_stat: f,
        f_pvalue: fp,
        residuals,
        sigma2,
        sse,
        n_obs: n,
        log_likelihood,
    })
}

/// Variance inflation factors `1 / (1 - R²_j)` of each column regressed on
/// the others (plus an intercept when `add_intercept`). Perfect collinearity
/// yields `+inf`.
pub fn vif(x: &DesignMatrix, add_intercept: bool) -> Result<Vec<f64>> {
    let plain = if x.has_intercept() {
        x.without_intercept()
    } else {
        x.clone()
    };
    let (n, p) = (plain.nrows(), plain.ncols());
    if p < 2 {
        return Err(Error::DimensionMismatch(
            "VIF needs at least two regressors".into(),
        ));
    }
    let m = plain.matrix();
    (0..p)
        .map(|j| {
            let target = m.column(j).into_owned();
            let others: Vec<usize> = (0..p).filter(|&i| i != j).collect();
            let offset = usize::from(add_intercept);
            let aux = DMatrix::from_fn(n, others.len() + offset, |r, c| {
                if add_intercept && c == 0 {
                    1.0
                } else {
                    m[(r, others[c - offset])]
                }
            });
            let target_m = DMatrix::from_column_slice(n, 1, target.as_slice());
            let ls = least_squares(&aux, &target_m, false)?;
            let resid = &target_m - &aux * &ls.coef;
            let sse: f64 = resid.iter().map(|e| e * e).sum();
            let t: Vec<f64> = target.iter().copied().collect();
            let sst: f64 = if add_intercept {
                let mu = mean(&t);
                t.iter().map(|v| (v - mu).powi(2)).sum()
            } else {
                t.iter().map(|v| v * v).sum()
            };
            if sst <= 0.0 || is_exact_fit(sse, sst) {
                return Ok(f64::INFINITY);
            }
            let r2 = 1.0 - sse / sst;
            Ok(1.0 / (1.0 - r2))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeFit {
    pub k: f64,
    pub names: Vec<String>,
    /// Original-scale coefficients, intercept first.
    pub coefficients: Vec<f64>,
    /// `None` for the intercept.
    pub standardized_coefficients: Vec<Option<f64>>,
    /// Approximate, from `sigma² A⁻¹ X'X A⁻¹` with `A` the penalised cross-product.
    pub standard_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub f_stat: f64,
    pub f_pvalue: f64,
    pub residuals: Vec<f64>,
    pub sigma2: f64,
}

impl RidgeFit {
    /// Euclidean norm of the standardized slopes.
    pub fn standardized_norm(&self) -> f64 {
        self.standardized_coefficients
            .iter()
            .flatten()
            .map(|b| b * b)
            .sum::<f64>()
            .sqrt()
    }

    pub fn standardized_slopes(&self) -> Vec<f64> {
        self.standardized_coefficients.iter().flatten().copied().collect()
    }
}

/// Centring and population scaling of the slope columns and the response.
struct Standardized {
    x_mean: Vec<f64>,
    x_sd: Vec<f64>,
    y_mean: f64,
    y_sd: f64,
    /// Correlation matrix of the regressors.
    corr: DMatrix<f64>,
    /// Correlations of each regressor with the response.
    corr_y: DVector<f64>,
    /// Centred regressors.
    xc: DMatrix<f64>,
}

fn standardize(x: &DesignMatrix, y: &[f64]) -> Result<Standardized> {
    let plain = x.without_intercept();
    let (n, p) = (plain.nrows(), plain.ncols());
    let nf = n as f64;
    let m = plain.matrix();
    let x_mean: Vec<f64> = (0..p).map(|j| m.column(j).sum() / nf).collect();
    let xc = DMatrix::from_fn(n, p, |i, j| m[(i, j)] - x_mean[j]);
    let x_sd: Vec<f64> = (0..p)
        .map(|j| (xc.column(j).norm_squared() / nf).sqrt())
        .collect();
    if let Some(j) = x_sd.iter().position(|&s| s == 0.0) {
        return Err(Error::RankDeficient { rank: j, cols: p });
    }
    let y_mean = mean(y);
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let y_sd = (yc.iter().map(|v| v * v).sum::<f64>() / nf).sqrt();
    if y_sd == 0.0 {
        return Err(Error::DegenerateResponse);
    }
    let z = DMatrix::from_fn(n, p, |i, j| xc[(i, j)] / x_sd[j]);
    let corr = z.transpose() * &z / nf;
    let zy = DVector::from_iterator(n, yc.iter().map(|v| v / y_sd));
    let corr_y = z.transpose() * zy / nf;
    Ok(Standardized {
        x_mean,
        x_sd,
        y_mean,
        y_sd,
        corr,
        corr_y,
        xc,
    })
}

fn ridge_standardized_solution(s: &Standardized, k: f64) -> Result<DVector<f64>> {
    let p = s.corr.nrows();
    let a = &s.corr + DMatrix::identity(p, p) * k;
    let ls = least_squares(&a, &DMatrix::from_column_slice(p, 1, s.corr_y.as_slice()), k == 0.0)?;
    Ok(ls.coef.column(0).into_owned())
}

/// Ridge regression: standardized slopes solve `(R + k I) b = r_xy` with
/// `R` the regressor correlation matrix, then map back to original units
/// with the intercept recovered from the means. The design must contain an
/// intercept column.
pub fn ridge_fit(x: &DesignMatrix, y: &[f64], k: f64) -> Result<RidgeFit> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::NegativeK(k));
    }
    if !x.has_intercept() {
        return Err(Error::MissingIntercept);
    }
    let (n, kcols) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::DimensionMismatch("response length".into()));
    }
    if n <= kcols {
        return Err(Error::DimensionMismatch(format!(
            "{n} observations for {kcols} coefficients"
        )));
    }
    let s = standardize(x, y)?;
    let p = s.x_sd.len();
    let b_std = ridge_standardized_solution(&s, k)?;
    let slopes: Vec<f64> = (0..p).map(|j| b_std[j] * s.y_sd / s.x_sd[j]).collect();
    let intercept = s.y_mean - slopes.iter().zip(&s.x_mean).map(|(b, m)| b * m).sum::<f64>();

    let mut coefficients = vec![intercept];
    coefficients.extend(&slopes);
    let fitted = x.matrix() * DVector::from_vec(coefficients.clone());
    let residuals: Vec<f64> = (0..n).map(|i| y[i] - fitted[i]).collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let (r2, _, f, fp) = fit_summary(y, sse, n, kcols, true)?;
    let df = (n - kcols) as f64;
    let sst = s.y_sd * s.y_sd * n as f64;
    let sigma2 = if is_exact_fit(sse, sst) { 0.0 } else { sse / df };

    // Cov(b) = sigma² A⁻¹ Xc'Xc A⁻¹ with A = Xc'Xc + k n D² (D = sd).
    let nf = n as f64;
    let xtx = s.xc.transpose() * &s.xc;
    let mut a = xtx.clone();
    for j in 0..p {
        a[(j, j)] += k * nf * s.x_sd[j] * s.x_sd[j];
    }
    let a_inv = least_squares(&a, &DMatrix::identity(p, p), k == 0.0)?.coef;
    let cov = &a_inv * &xtx * &a_inv * sigma2;
    let xm = DVector::from_vec(s.x_mean.clone());
    let var_intercept = sigma2 / nf + (xm.transpose() * &cov * &xm)[(0, 0)];
    let mut standard_errors = vec![var_intercept.max(0.0).sqrt()];
    standard_errors.extend((0..p).map(|j| cov[(j, j)].max(0.0).sqrt()));
    let t_stats: Vec<f64> = coefficients
        .iter()
        .zip(&standard_errors)
        .map(|(b, s)| b / s)
        .collect();
    let p_values = t_stats
        .iter()
        .map(|&t| t_two_sided(df, t))
        .collect::<Result<Vec<_>>>()?;
    let mut standardized_coefficients = vec![None];
    standardized_coefficients.extend(b_std.iter().map(|&b| Some(b)));

    Ok(RidgeFit {
        k,
        names: x.names().to_vec(),
        coefficients,
        standardized_coefficients,
        standard_errors,
        t_stats,
        p_values,
        r_squared: r2,
        f_stat: f,
        f_pvalue: fp,
        residuals,
        sigma2,
    })
}

/// Standardized coefficient paths over a grid and the selected `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeTrace {
    pub selected_k: f64,
    pub threshold: f64,
    pub grid: Vec<f64>,
    /// `paths[i]` holds the standardized slopes at `grid[i]`.
    pub paths: Vec<Vec<f64>>,
}

pub const DEFAULT_STABILITY_THRESHOLD: f64 = 0.01;

/// `0.01, 0.02, ..., 1.00`.
pub fn default_k_grid() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 100.0).collect()
}

/// Picks the smallest grid `k` at which every standardized coefficient has
/// moved by less than `threshold` (relative) since the previous grid point.
/// The predecessor of the first grid point is the unpenalised fit, `k = 0`.
pub fn ridge_trace(x: &DesignMatrix, y: &[f64], k_grid: &[f64], threshold: f64) -> Result<RidgeTrace> {
    if k_grid.is_empty() {
        return Err(Error::InvalidGrid("empty".into()));
    }
    if k_grid.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
        return Err(Error::InvalidGrid("grid values must be positive".into()));
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid must be strictly ascending".into()));
    }
    if !x.has_intercept() {
        return Err(Error::MissingIntercept);
    }
    let s = standardize(x, y)?;
    let unpenalised = least_squares(
        &s.corr,
        &DMatrix::from_column_slice(s.corr.nrows(), 1, s.corr_y.as_slice()),
        false,
    )?
    .coef
    .column(0)
    .into_owned();
    let paths = k_grid
        .iter()
        .map(|&k| Ok(ridge_standardized_solution(&s, k)?.iter().copied().collect()))
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mut previous: Vec<f64> = unpenalised.iter().copied().collect();
    let mut selected = None;
    for (i, path) in paths.iter().enumerate() {
        let change = path
            .iter()
            .zip(&previous)
            .map(|(b, a)| (b - a).abs() / a.abs().max(1e-12))
            .fold(0.0, f64::max);
        if change < threshold {
            selected = Some(k_grid[i]);
            break;
        }
        previous.clone_from(path);
    }
    let selected_k = selected.ok_or(Error::NoStableK { threshold })?;
    Ok(RidgeTrace {
        selected_k,
        threshold,
        grid: k_grid.to_vec(),
        paths,
    })
}
