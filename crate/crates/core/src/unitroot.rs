//! Augmented Dickey–Fuller tests.

use crate::dataset::{difference, TimeSeries};
use crate::regress::{ols_fit_lean, DesignMatrix, OlsFit};
use crate::stats::{adf_critical_values, adf_pvalue, AdfCase, CriticalValues};
use crate::{Error, Result};

/// Augmentation lags of the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagSpec {
    Fixed(usize),
    /// Minimise AIC over `0..=max_lag` on a common sample; `None` uses
    /// [`default_max_lag`].
    Auto { max_lag: Option<usize> },
}

impl Default for LagSpec {
    fn default() -> Self {
        LagSpec::Auto { max_lag: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdfResult {
    pub series: String,
    /// t-statistic on the lagged level.
    pub tau: f64,
    pub p_value: f64,
    pub critical_values: CriticalValues,
    pub lags_used: usize,
    pub det_case: AdfCase,
    /// Observations in the final test regression.
    pub effective_t: usize,
    /// `-2 logL + 2n` of the chosen specification. In auto mode this is the
    /// value from the common selection sample, otherwise from the test
    /// regression itself.
    pub regression_aic: f64,
    /// `tau < 5% critical value`: the unit-root null is rejected.
    pub reject_5pct: bool,
}

/// Default upper bound `ceil(12 (n/100)^(1/4))`, capped at `n/2 - d - 1`
/// where `d` counts deterministic terms.
pub fn default_max_lag(n: usize, case: AdfCase) -> usize {
    let schwert = (12.0 * (n as f64 / 100.0).powf(0.25)).ceil() as usize;
    schwert.min((n / 2).saturating_sub(case.n_terms() + 1))
}

/// Regression of `Δy_t` on deterministics, `y_{t-1}` and `lags` lagged
/// differences, using `Δy` rows `first..`.
fn test_regression(y: &[f64], dy: &[f64], case: AdfCase, lags: usize, first: usize) -> Result<OlsFit> {
    let rows = first..dy.len();
    let level: Vec<f64> = rows.clone().map(|t| y[t]).collect();
    let lagged: Vec<Vec<f64>> = (1..=lags)
        .map(|i| rows.clone().map(|t| dy[t - i]).collect())
        .collect();
    let trend: Vec<f64> = rows.clone().map(|t| (t + 1) as f64).collect();
    let lag_names: Vec<String> = (1..=lags).map(|i| format!("dy_l{i}")).collect();
    let mut cols: Vec<(&str, &[f64])> = vec![("y_l1", &level)];
    for (name, col) in lag_names.iter().zip(&lagged) {
        cols.push((name, col));
    }
    if case == AdfCase::ConstantTrend {
        cols.push(("trend", &trend));
    }
    let x = DesignMatrix::new(&cols, case != AdfCase::None)?;
    let response = &dy[first..];
    let fit = ols_fit_lean(&x, response).map_err(|e| match e {
        Error::DegenerateResponse | Error::RankDeficient { .. } => Error::DegenerateRegression,
        other => other,
    })?;
    let scale: f64 = response.iter().map(|v| v * v).sum();
    if fit.sse <= 1e-20 * scale || !fit.log_likelihood.is_finite() {
        return Err(Error::DegenerateRegression);
    }
    Ok(fit)
}

pub fn adf_test(s: &TimeSeries, case: AdfCase, lag_spec: LagSpec) -> Result<AdfResult> {
    let y = &s.values;
    let n = y.len();
    let max_lag = match lag_spec {
        LagSpec::Fixed(p) => p,
        LagSpec::Auto { max_lag } => max_lag.unwrap_or_else(|| default_max_lag(n, case)),
    };
    if n < 10 + max_lag {
        return Err(Error::SeriesTooShort {
            needed: 10 + max_lag,
            got: n,
        });
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    if dy.iter().all(|&d| d == 0.0) {
        return Err(Error::DegenerateRegression);
    }

    let (lags, selection_aic) = match lag_spec {
        LagSpec::Fixed(p) => (p, None),
        LagSpec::Auto { .. } => {
            let mut best: Option<(f64, usize)> = None;
            for p in 0..=max_lag {
                let aic = test_regression(y, &dy, case, p, max_lag)?.aic();
                if best.is_none_or(|(b, _)| aic < b) {
                    best = Some((aic, p));
                }
            }
            let (aic, p) = best.expect("at least one candidate");
            (p, Some(aic))
        }
    };

    let fit = test_regression(y, &dy, case, lags, lags)?;
    let level_idx = usize::from(case != AdfCase::None);
    let tau = fit.t_stats[level_idx];
    let effective_t = fit.n_obs;
    let critical_values = adf_critical_values(effective_t, case)?;
    Ok(AdfResult {
        series: s.name.clone(),
        tau,
        p_value: adf_pvalue(tau, case),
        reject_5pct: tau < critical_values.five_pct,
        critical_values,
        lags_used: lags,
        det_case: case,
        effective_t,
        regression_aic: selection_aic.unwrap_or_else(|| fit.aic()),
    })
}

/// One row of a by-differencing-order table.
#[derive(Debug, Clone, PartialEq)]
pub struct AdfDiffRow {
    pub diff_order: usize,
    pub result: AdfResult,
}

/// Runs [`adf_test`] on `difference(s, d)` for `d = 0..=max_diff`, stopping
/// early once a differenced series becomes too short.
pub fn adf_by_difference(
    s: &TimeSeries,
    max_diff: usize,
    case: AdfCase,
    lag_spec: LagSpec,
) -> Result<Vec<AdfDiffRow>> {
    let mut rows = Vec::with_capacity(max_diff + 1);
    for d in 0..=max_diff {
        let series = match difference(s, d) {
            Ok(series) => series,
            Err(Error::SeriesTooShort { .. }) if d > 0 => break,
            Err(e) => return Err(e),
        };
        match adf_test(&series, case, lag_spec) {
            Ok(mut result) => {
                result.series = s.name.clone();
                rows.push(AdfDiffRow { diff_order: d, result });
            }
            Err(Error::SeriesTooShort { .. }) if d > 0 => break,
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_walk, Lcg64};

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new("y", 1900, v, "").unwrap()
    }

    #[test]
    fn alternating_series_is_degenerate() {
        let v: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(matches!(
            adf_test(&ts(v), AdfCase::None, LagSpec::default()),
            Err(Error::DegenerateRegression)
        ));
    }

    #[test]
    fn ramp_degenerates_after_one_difference() {
        let v: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let r = adf_by_difference(&ts(v), 2, AdfCase::None, LagSpec::Fixed(0));
        assert!(matches!(r, Err(Error::DegenerateRegression)));
        // d = 0 alone is fine without a constant
        let v: Vec<f64> = (0..40).map(|i| i as f64).collect();
        assert!(adf_by_difference(&ts(v), 0, AdfCase::None, LagSpec::Fixed(0)).is_ok());
    }

    #[test]
    fn too_short() {
        let mut g = Lcg64::new(3);
        let v = random_walk(&mut g, 12);
        assert!(matches!(
            adf_test(&ts(v), AdfCase::Constant, LagSpec::Fixed(4)),
            Err(Error::SeriesTooShort { needed: 14, got: 12 })
        ));
    }

    #[test]
    fn effective_t_and_decision_invariants() {
        let mut g = Lcg64::new(11);
        let v = random_walk(&mut g, 80);
        for spec in [LagSpec::Fixed(0), LagSpec::Fixed(3), LagSpec::default()] {
            let r = adf_test(&ts(v.clone()), AdfCase::Constant, spec).unwrap();
            assert_eq!(r.effective_t, 80 - 1 - r.lags_used);
            assert_eq!(r.reject_5pct, r.tau < r.critical_values.five_pct);
        }
    }

    #[test]
    fn schwert_bound() {
        assert_eq!(default_max_lag(40, AdfCase::Constant), 10);
        assert_eq!(default_max_lag(38, AdfCase::Constant), 10);
        assert_eq!(default_max_lag(200, AdfCase::Constant), 15);
        assert_eq!(default_max_lag(12, AdfCase::Constant), 4);
    }
}
