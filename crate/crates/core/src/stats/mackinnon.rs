//! Dickey–Fuller critical values and p-values for a single unit-root
//! regressor (MacKinnon response surfaces).

use super::{dist::normal_cdf, AdfCase, CriticalValues};
use crate::{Error, Result};

/// Finite-sample critical-value surface `b0 + b1/T + b2/T^2 + b3/T^3`,
/// rows are the 1%, 5% and 10% levels (MacKinnon 2010, table 2, N = 1).
const CV_NONE: [[f64; 4]; 3] = [
    [-2.56574, -2.2358, -3.627, 0.0],
    [-1.94100, -0.2686, -3.365, 31.223],
    [-1.61682, 0.2656, -2.714, 25.364],
];
const CV_CONSTANT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const CV_TREND: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

/// Asymptotic p-value surface (MacKinnon 1994, table 3, N = 1):
/// `p = Phi(poly(tau))` with the small-p polynomial below `tau_star`
/// and the large-p polynomial above it; 0 below `tau_min`, 1 above `tau_max`.
struct PvalueSurface {
    tau_min: f64,
    tau_star: f64,
    tau_max: f64,
    small_p: [f64; 3],
    large_p: [f64; 4],
}

const P_NONE: PvalueSurface = PvalueSurface {
    tau_min: -19.04,
    tau_star: -1.04,
    tau_max: 1.51,
    small_p: [0.6344, 1.2378, 3.2496e-2],
    large_p: [0.4797, 9.3557e-1, -0.6999e-1, 3.3066e-2],
};
const P_CONSTANT: PvalueSurface = PvalueSurface {
    tau_min: -18.83,
    tau_star: -1.61,
    tau_max: 2.74,
    small_p: [2.1659, 1.4412, 3.8269e-2],
    large_p: [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2],
};
const P_TREND: PvalueSurface = PvalueSurface {
    tau_min: -16.18,
    tau_star: -2.89,
    tau_max: 0.70,
    small_p: [3.2512, 1.6047, 4.9588e-2],
    large_p: [2.5261, 6.1654e-1, -3.7956e-1, -6.0285e-2],
};

fn horner(coefs: &[f64], x: f64) -> f64 {
    coefs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn cv_table(case: AdfCase) -> &'static [[f64; 4]; 3] {
    match case {
        AdfCase::None => &CV_NONE,
        AdfCase::Constant => &CV_CONSTANT,
        AdfCase::ConstantTrend => &CV_TREND,
    }
}

/// Critical values at effective sample size `t`.
pub fn adf_critical_values(t: usize, case: AdfCase) -> Result<CriticalValues> {
    if t < 10 {
        return Err(Error::SampleTooSmall(t));
    }
    Ok(adf_critical_values_at(t as f64, case))
}

/// Surface evaluated at a real-valued `t`; `t = f64::INFINITY` gives the
/// asymptotic values.
pub fn adf_critical_values_at(t: f64, case: AdfCase) -> CriticalValues {
    let inv = 1.0 / t;
    let eval = |b: &[f64; 4]| b[0] + inv * (b[1] + inv * (b[2] + inv * b[3]));
    let tab = cv_table(case);
    CriticalValues {
        one_pct: Some(eval(&tab[0])),
        five_pct: eval(&tab[1]),
        ten_pct: Some(eval(&tab[2])),
    }
}

/// Asymptotic p-value of an ADF tau statistic.
pub fn adf_pvalue(tau: f64, case: AdfCase) -> f64 {
    let s = match case {
        AdfCase::None => &P_NONE,
        AdfCase::Constant => &P_CONSTANT,
        AdfCase::ConstantTrend => &P_TREND,
    };
    if tau.is_nan() {
        return f64::NAN;
    }
    if tau > s.tau_max {
        return 1.0;
    }
    if tau < s.tau_min {
        return 0.0;
    }
    let z = if tau <= s.tau_star {
        horner(&s.small_p, tau)
    } else {
        horner(&s.large_p, tau)
    };
    normal_cdf(z).clamp(0.0, 1.0)
}
