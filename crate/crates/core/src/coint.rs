//! Johansen reduced-rank analysis: trace test and VECM estimation.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::dataset::DataTable;
use crate::linalg::{cholesky_lower, least_squares, residualize};
use crate::stats::{johansen_critical_values, johansen_pvalue, CriticalValues, JohansenCase};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct JohansenResult {
    pub names: Vec<String>,
    /// Descending; one per variable.
    pub eigenvalues: Vec<f64>,
    /// `trace_stats[r]` tests the null "rank <= r".
    pub trace_stats: Vec<f64>,
    pub critical_values: Vec<CriticalValues>,
    /// `None` where the stored table has no p-value surface for the case.
    pub p_values: Vec<Option<f64>>,
    /// First `r` whose null is not rejected at 5%, or `K` if all are.
    pub rank_decision: usize,
    pub det_case: JohansenCase,
    pub lags_in_levels: usize,
    pub effective_t: usize,
}

impl JohansenResult {
    pub fn critical_values_5pct(&self) -> Vec<f64> {
        self.critical_values.iter().map(|c| c.five_pct).collect()
    }

    pub fn rejected_5pct(&self) -> Vec<bool> {
        self.trace_stats
            .iter()
            .zip(&self.critical_values)
            .map(|(t, c)| *t > c.five_pct)
            .collect()
    }

    /// Every null rejected: the test points to a stationary system.
    pub fn full_rank(&self) -> bool {
        self.rank_decision == self.eigenvalues.len()
    }
}

/// Residual moment matrices of the concentrated likelihood.
struct Moments {
    names: Vec<String>,
    t: usize,
    /// `T x K`, `ΔY_t`
    dy: DMatrix<f64>,
    /// `T x m`, `Y_{t-1}` plus any restricted deterministic term
    y1: DMatrix<f64>,
    /// `T x q`, lagged differences then unrestricted deterministics
    z: DMatrix<f64>,
    n_lag_cols: usize,
    s00: DMatrix<f64>,
    s01: DMatrix<f64>,
    s11: DMatrix<f64>,
}

fn is_singular(s: &DMatrix<f64>) -> bool {
    let eig = SymmetricEigen::new(s.clone());
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    !(max > 0.0) || min <= 1e-12 * max
}

fn moments(data: &DataTable, p_levels: usize, case: JohansenCase) -> Result<Moments> {
    if p_levels == 0 {
        return Err(Error::Config("levels lag must be at least 1".into()));
    }
    let rows = data.rows();
    let n = rows.len();
    let k = data.n_columns();
    let t = n.saturating_sub(p_levels);
    if t <= k * p_levels + 1 {
        return Err(Error::LagTooLargeForSample {
            lag: p_levels,
            observations: t,
        });
    }
    let restricted = usize::from(case != JohansenCase::UnrestrictedConstant);
    let unrestricted_const = usize::from(case != JohansenCase::RestrictedConstant);
    let n_lag_cols = k * (p_levels - 1);
    let diff = |s: usize, j: usize| rows[s][j] - rows[s - 1][j];

    let dy = DMatrix::from_fn(t, k, |i, j| diff(p_levels + i, j));
    let y1 = DMatrix::from_fn(t, k + restricted, |i, j| {
        let s = p_levels + i;
        if j < k {
            rows[s - 1][j]
        } else if case == JohansenCase::RestrictedConstant {
            1.0
        } else {
            s as f64
        }
    });
    let z = DMatrix::from_fn(t, n_lag_cols + unrestricted_const, |i, j| {
        let s = p_levels + i;
        if j < n_lag_cols {
            diff(s - (j / k + 1), j % k)
        } else {
            1.0
        }
    });
    let r0 = residualize(&z, &dy)?;
    let r1 = residualize(&z, &y1)?;
    let tf = t as f64;
    let s00 = r0.transpose() * &r0 / tf;
    let s11 = r1.transpose() * &r1 / tf;
    let s01 = r0.transpose() * &r1 / tf;
    if is_singular(&s00) {
        return Err(Error::SingularMoment("S00"));
    }
    if is_singular(&s11) {
        return Err(Error::SingularMoment("S11"));
    }
    Ok(Moments {
        names: data.names().iter().map(|s| s.to_string()).collect(),
        t,
        dy,
        y1,
        z,
        n_lag_cols,
        s00,
        s01,
        s11,
    })
}

/// Eigenvalues (descending) and `S11`-orthonormal eigenvectors of
/// `S10 S00^-1 S01` relative to `S11`, via Cholesky reduction of `S11`.
fn reduced_rank(m: &Moments) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let l = cholesky_lower(&m.s11).ok_or(Error::SingularMoment("S11"))?;
    let dim = l.nrows();
    let l_inv = l
        .solve_lower_triangular(&DMatrix::identity(dim, dim))
        .ok_or(Error::SingularMoment("S11"))?;
    let s00_inv = m
        .s00
        .clone()
        .cholesky()
        .ok_or(Error::SingularMoment("S00"))?
        .inverse();
    let s10 = m.s01.transpose();
    let inner = &s10 * &s00_inv * &m.s01;
    let sym = &l_inv * inner * l_inv.transpose();
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    let vectors = l_inv.transpose() * v;
    Ok((values, vectors))
}

/// Trace statistics `-T sum_{i>r} ln(1 - lambda_i)` for `r = 0..K`.
pub fn trace_statistics(eigenvalues: &[f64], t: usize) -> Vec<f64> {
    let tf = t as f64;
    (0..eigenvalues.len())
        .map(|r| -tf * eigenvalues[r..].iter().map(|l| (1.0 - l).ln()).sum::<f64>())
        .collect()
}

/// Johansen trace test on level data with `p_levels` lags in the levels VAR.
pub fn johansen_trace(data: &DataTable, p_levels: usize, case: JohansenCase) -> Result<JohansenResult> {
    let m = moments(data, p_levels, case)?;
    let k = data.n_columns();
    let (values, _) = reduced_rank(&m)?;
    let eigenvalues: Vec<f64> = values[..k].to_vec();
    let trace_stats = trace_statistics(&eigenvalues, m.t);
    let critical_values = (0..k)
        .map(|r| johansen_critical_values(k - r, case))
        .collect::<Result<Vec<_>>>()?;
    let p_values = (0..k)
        .map(|r| johansen_pvalue(trace_stats[r], k - r, case))
        .collect::<Result<Vec<_>>>()?;
    let rank_decision = (0..k)
        .find(|&r| trace_stats[r] <= critical_values[r].five_pct)
        .unwrap_or(k);
    Ok(JohansenResult {
        names: m.names,
        eigenvalues,
        trace_stats,
        critical_values,
        p_values,
        rank_decision,
        det_case: case,
        lags_in_levels: p_levels,
        effective_t: m.t,
    })
}

/// Vector error-correction model
/// `ΔY_t = alpha beta' Y*_{t-1} + sum Gamma_i ΔY_{t-i} + mu + e_t`, where
/// `Y*` appends the restricted deterministic term (cases 2 and 4).
#[derive(Debug, Clone, PartialEq)]
pub struct VecmModel {
    pub names: Vec<String>,
    pub rank: usize,
    pub det_case: JohansenCase,
    pub p_levels: usize,
    /// `K x r` adjustment loadings.
    pub alpha: DMatrix<f64>,
    /// `m x r` cointegrating vectors, leading `r x r` block the identity;
    /// `m = K + 1` when a deterministic term is restricted to the relation.
    pub beta: DMatrix<f64>,
    /// Short-run matrices `Gamma_1..Gamma_{p-1}`, each `K x K`.
    pub gamma: Vec<DMatrix<f64>>,
    /// Unrestricted constant (cases 3 and 4).
    pub intercept: Option<Vec<f64>>,
    /// `T x K`.
    pub residuals: DMatrix<f64>,
    /// Divisor `T`.
    pub residual_cov: DMatrix<f64>,
    pub effective_t: usize,
    /// In-sample fitted `ΔY_t`, `T x K`.
    pub fitted_differences: DMatrix<f64>,
}

/// Level-VAR representation implied by a VECM.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelVar {
    /// `A_1..A_p`.
    pub lags: Vec<DMatrix<f64>>,
    pub constant: Vec<f64>,
    /// Coefficient on the observation index `t` (case 4 only).
    pub trend: Option<Vec<f64>>,
}

impl LevelVar {
    /// One-step prediction of `Y_t` from rows `t-1..t-p` of `rows`.
    pub fn predict(&self, rows: &[Vec<f64>], t: usize) -> Vec<f64> {
        let k = self.constant.len();
        let mut out = self.constant.clone();
        if let Some(tr) = &self.trend {
            for (o, c) in out.iter_mut().zip(tr) {
                *o += c * t as f64;
            }
        }
        for (i, a) in self.lags.iter().enumerate() {
            let prev = &rows[t - i - 1];
            for (r, o) in out.iter_mut().enumerate().take(k) {
                *o += (0..k).map(|c| a[(r, c)] * prev[c]).sum::<f64>();
            }
        }
        out
    }
}

impl VecmModel {
    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    /// `alpha beta'`, `K x m`.
    pub fn pi(&self) -> DMatrix<f64> {
        &self.alpha * self.beta.transpose()
    }

    pub fn to_level_var(&self) -> LevelVar {
        let k = self.n_vars();
        let pi = self.pi();
        let pi_y = pi.columns(0, k).into_owned();
        let p = self.p_levels;
        let mut lags = Vec::with_capacity(p);
        for i in 1..=p {
            let mut a = DMatrix::zeros(k, k);
            if i == 1 {
                a += DMatrix::identity(k, k) + &pi_y;
            }
            if i < p {
                a += &self.gamma[i - 1];
            }
            if i >= 2 {
                a -= &self.gamma[i - 2];
            }
            lags.push(a);
        }
        let mut constant = self.intercept.clone().unwrap_or_else(|| vec![0.0; k]);
        let mut trend = None;
        match self.det_case {
            JohansenCase::RestrictedConstant => {
                for (c, v) in constant.iter_mut().zip(pi.column(k).iter()) {
                    *c += v;
                }
            }
            JohansenCase::RestrictedTrend => {
                trend = Some(pi.column(k).iter().copied().collect());
            }
            JohansenCase::UnrestrictedConstant => {}
        }
        LevelVar {
            lags,
            constant,
            trend,
        }
    }
}

/// Estimates a VECM with cointegration rank `rank`.
pub fn vecm_fit(data: &DataTable, rank: usize, p_levels: usize, case: JohansenCase) -> Result<VecmModel> {
    let k = data.n_columns();
    if rank > k {
        return Err(Error::RankOutOfRange { rank, vars: k });
    }
    let m = moments(data, p_levels, case)?;
    let (_, vectors) = reduced_rank(&m)?;
    let dim = vectors.nrows();

    let (alpha, beta) = if rank == 0 {
        (DMatrix::zeros(k, 0), DMatrix::zeros(dim, 0))
    } else {
        let raw = vectors.columns(0, rank).into_owned();
        let lead = raw.rows(0, rank).into_owned();
        let lead_inv = lead
            .try_inverse()
            .ok_or(Error::SingularMoment("beta leading block"))?;
        let mut beta = &raw * lead_inv;
        for i in 0..rank {
            for j in 0..rank {
                beta[(i, j)] = if i == j { 1.0 } else { 0.0 };
            }
        }
        let btsb = beta.transpose() * &m.s11 * &beta;
        let inv = btsb
            .try_inverse()
            .ok_or(Error::SingularMoment("beta' S11 beta"))?;
        let alpha = &m.s01 * &beta * inv;
        (alpha, beta)
    };

    // OLS of ΔY on [beta'Y*_{t-1}, lagged differences, deterministics]
    let ect = &m.y1 * &beta;
    let q = m.z.ncols();
    let regs = DMatrix::from_fn(m.t, rank + q, |i, j| {
        if j < rank {
            ect[(i, j)]
        } else {
            m.z[(i, j - rank)]
        }
    });
    let ls = least_squares(&regs, &m.dy, true)?;
    let fitted = &regs * &ls.coef;
    let residuals = &m.dy - &fitted;
    let coef = ls.coef.transpose(); // K x (r + q)
    let gamma = (0..p_levels - 1)
        .map(|i| coef.columns(rank + i * k, k).into_owned())
        .collect();
    let intercept = (q > m.n_lag_cols).then(|| coef.column(rank + m.n_lag_cols).iter().copied().collect());
    let residual_cov = residuals.transpose() * &residuals / m.t as f64;

    Ok(VecmModel {
        names: m.names,
        rank,
        det_case: case,
        p_levels,
        alpha,
        beta,
        gamma,
        intercept,
        residuals,
        residual_cov,
        effective_t: m.t,
        fitted_differences: fitted,
    })
}

/// Singular values of `Pi`, descending.
pub fn pi_singular_values(model: &VecmModel) -> Vec<f64> {
    let mut s: Vec<f64> = model.pi().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with tolerance `1e-8` relative to the leading singular value.
pub fn numerical_rank(values: &[f64]) -> usize {
    let lead = values.first().copied().unwrap_or(0.0);
    values.iter().filter(|&&s| s > 1e-8 * lead && lead > 0.0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{difference_table, TimeSeries};
    use crate::rng::Lcg64;
    use crate::varmod::var_fit;

    fn table(cols: Vec<Vec<f64>>) -> DataTable {
        DataTable::new(
            cols.into_iter()
                .enumerate()
                .map(|(i, v)| TimeSeries::new(format!("y{i}"), 1900, v, "").unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// `y0` a random walk, `y1 = y0 + stationary noise`.
    fn cointegrated_pair(n: usize, seed: u64) -> DataTable {
        let mut g = Lcg64::new(seed);
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for t in 0..n {
            x[t] = if t == 0 { 0.0 } else { x[t - 1] } + 0.3 + g.next_normal();
            y[t] = x[t] + 0.5 * g.next_normal();
        }
        table(vec![x, y])
    }

    #[test]
    fn beta_recovers_unit_relation() {
        let d = cointegrated_pair(2000, 8);
        let m = vecm_fit(&d, 1, 2, JohansenCase::UnrestrictedConstant).unwrap();
        assert_eq!(m.beta[(0, 0)], 1.0);
        assert!((m.beta[(1, 0)] + 1.0).abs() < 0.02, "{}", m.beta);
        let j = johansen_trace(&d, 2, JohansenCase::UnrestrictedConstant).unwrap();
        assert_eq!(j.rank_decision, 1, "{:?}", j.trace_stats);
    }

    #[test]
    fn rank_zero_is_var_in_differences() {
        let d = cointegrated_pair(200, 9);
        let m = vecm_fit(&d, 0, 3, JohansenCase::UnrestrictedConstant).unwrap();
        let v = var_fit(&difference_table(&d, 1).unwrap(), 2).unwrap();
        for (a, b) in m.gamma.iter().zip(1..=2) {
            assert!((a - v.lag_matrix(b)).abs().max() < 1e-9);
        }
        let mu = m.intercept.clone().unwrap();
        for (a, b) in mu.iter().zip(v.intercept()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(numerical_rank(&pi_singular_values(&m)), 0);
    }

    #[test]
    fn constant_shift_leaves_trace_unchanged() {
        let d = cointegrated_pair(120, 2);
        let shifted = table(
            d.columns()
                .iter()
                .map(|c| c.values.iter().map(|v| v + 1000.0).collect())
                .collect(),
        );
        let a = johansen_trace(&d, 2, JohansenCase::UnrestrictedConstant).unwrap();
        let b = johansen_trace(&shifted, 2, JohansenCase::UnrestrictedConstant).unwrap();
        for (x, y) in a.trace_stats.iter().zip(&b.trace_stats) {
            assert!((x - y).abs() < 1e-6 * x.abs().max(1.0));
        }
    }

    #[test]
    fn level_var_reproduces_vecm_fit() {
        let d = cointegrated_pair(150, 4);
        let rows = d.rows();
        for case in [
            JohansenCase::RestrictedConstant,
            JohansenCase::UnrestrictedConstant,
            JohansenCase::RestrictedTrend,
        ] {
            for p in 1..=3 {
                let m = vecm_fit(&d, 1, p, case).unwrap();
                let lv = m.to_level_var();
                for i in 0..m.effective_t {
                    let t = p + i;
                    let pred = lv.predict(&rows, t);
                    for k in 0..2 {
                        let direct = rows[t - 1][k] + m.fitted_differences[(i, k)];
                        assert!((pred[k] - direct).abs() < 1e-8, "{case} p={p}");
                    }
                }
                assert_eq!(numerical_rank(&pi_singular_values(&m)), 1);
            }
        }
    }

    #[test]
    fn errors() {
        let d = cointegrated_pair(20, 1);
        assert!(matches!(
            vecm_fit(&d, 3, 1, JohansenCase::UnrestrictedConstant),
            Err(Error::RankOutOfRange { rank: 3, vars: 2 })
        ));
        assert!(matches!(
            johansen_trace(&d, 9, JohansenCase::UnrestrictedConstant),
            Err(Error::LagTooLargeForSample { .. })
        ));
        let c = d.columns()[0].values.clone();
        let dup = table(vec![c.clone(), c]);
        assert!(matches!(
            johansen_trace(&dup, 1, JohansenCase::UnrestrictedConstant),
            Err(Error::SingularMoment(_))
        ));
    }

    #[test]
    fn trace_formula_spot_value() {
        let t = trace_statistics(&[0.5], 100);
        assert!((t[0] - 69.3147).abs() < 1e-4);
    }

    #[test]
    fn numerical_rank_counts() {
        assert_eq!(numerical_rank(&[3.0, 1e-3, 1e-12]), 2);
        assert_eq!(numerical_rank(&[]), 0);
    }
}
