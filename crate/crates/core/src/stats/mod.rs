//! Distribution functions and stored critical-value surfaces.

mod dist;
mod mackinnon;
pub mod special;
mod trace;

pub use dist::{normal_cdf, t_two_sided, Distribution};
pub use mackinnon::{adf_critical_values, adf_critical_values_at, adf_pvalue};
pub use trace::{johansen_critical_values, johansen_pvalue, stored_constants, MAX_DIMENSION};

use std::fmt;

/// Deterministic terms of an ADF test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AdfCase {
    None,
    #[default]
    Constant,
    ConstantTrend,
}

impl AdfCase {
    /// Number of deterministic regressors.
    pub fn n_terms(self) -> usize {
        match self {
            AdfCase::None => 0,
            AdfCase::Constant => 1,
            AdfCase::ConstantTrend => 2,
        }
    }
}

impl fmt::Display for AdfCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdfCase::None => "none",
            AdfCase::Constant => "constant",
            AdfCase::ConstantTrend => "constant_trend",
        })
    }
}

/// Deterministic specification of the Johansen procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JohansenCase {
    /// Case 2: constant inside the cointegrating relation only.
    RestrictedConstant,
    /// Case 3: unrestricted constant, no trend.
    #[default]
    UnrestrictedConstant,
    /// Case 4: unrestricted constant, trend inside the cointegrating relation.
    RestrictedTrend,
}

impl fmt::Display for JohansenCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JohansenCase::RestrictedConstant => "case2_restricted_const",
            JohansenCase::UnrestrictedConstant => "case3_unrestricted_const",
            JohansenCase::RestrictedTrend => "case4_const_trend",
        })
    }
}

/// Test-statistic thresholds. Left-tailed for ADF (`one_pct < five_pct`),
/// right-tailed for the trace test (`one_pct > five_pct`). Levels missing
/// from the source table are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValues {
    pub one_pct: Option<f64>,
    pub five_pct: f64,
    pub ten_pct: Option<f64>,
}

/// Conventional significance stars: `***` at 1%, `**` at 5%, `*` at 10%.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}
