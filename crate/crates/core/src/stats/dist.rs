use super::special::{beta_reg, gamma_p, gamma_q};
use crate::{Error, Result};

/// Continuous reference distributions used for p-values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    StandardNormal,
    StudentT { df: f64 },
    FisherF { d1: f64, d2: f64 },
    ChiSquare { df: f64 },
}

impl Distribution {
    fn validate(&self) -> Result<()> {
        let bad = |v: f64| !(v >= 1.0 && v.is_finite());
        match *self {
            Distribution::StandardNormal => Ok(()),
            Distribution::StudentT { df } | Distribution::ChiSquare { df } if bad(df) => {
                Err(Error::InvalidDegreesOfFreedom(df))
            }
            Distribution::FisherF { d1, d2 } if bad(d1) || bad(d2) => {
                Err(Error::InvalidDegreesOfFreedom(if bad(d1) { d1 } else { d2 }))
            }
            _ => Ok(()),
        }
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Distribution::StandardNormal => normal_cdf(x),
            Distribution::StudentT { df } => t_cdf(df, x),
            Distribution::FisherF { d1, d2 } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    beta_reg(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))
                }
            }
            Distribution::ChiSquare { df } => gamma_p(df / 2.0, x.max(0.0) / 2.0),
        })
    }

    /// `P(X > x)`, computed without cancellation in the upper tail.
    pub fn sf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Distribution::StandardNormal => normal_cdf(-x),
            Distribution::StudentT { df } => t_cdf(df, -x),
            Distribution::FisherF { d1, d2 } => {
                if x <= 0.0 {
                    1.0
                } else if x.is_infinite() {
                    0.0
                } else {
                    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))
                }
            }
            Distribution::ChiSquare { df } => gamma_q(df / 2.0, x.max(0.0) / 2.0),
        })
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let half_tail = 0.5 * gamma_q(0.5, 0.5 * x * x);
    if x < 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

fn t_cdf(df: f64, t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * beta_reg(df / 2.0, 0.5, df / (df + t * t));
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided(df: f64, t: f64) -> Result<f64> {
    Ok(2.0 * Distribution::StudentT { df }.sf(t.abs())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_reference_values() {
        let n = Distribution::StandardNormal;
        assert_eq!(n.cdf(0.0).unwrap(), 0.5);
        assert!((n.cdf(1.959963984540054).unwrap() - 0.975).abs() < 1e-12);
        assert!((n.cdf(-1.0).unwrap() - 0.15865525393145707).abs() < 1e-13);
        assert!((n.sf(5.0).unwrap() - 2.866515718791939e-7).abs() < 1e-18);
    }

    #[test]
    fn t_table_quantile() {
        let t = Distribution::StudentT { df: 20.0 };
        assert!((t.cdf(2.086).unwrap() - 0.975).abs() < 5e-4);
        // df = 1 is Cauchy
        let c = Distribution::StudentT { df: 1.0 };
        let x: f64 = 0.7;
        let cauchy = 0.5 + x.atan() / std::f64::consts::PI;
        assert!((c.cdf(x).unwrap() - cauchy).abs() < 1e-13);
    }

    #[test]
    fn chi_square_reference_values() {
        let c = Distribution::ChiSquare { df: 1.0 };
        assert!((c.cdf(3.841458820694124).unwrap() - 0.95).abs() < 1e-12);
        // df = 2 is exponential with mean 2
        let c2 = Distribution::ChiSquare { df: 2.0 };
        assert!((c2.sf(3.0).unwrap() - (-1.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn f_equals_squared_t() {
        for &nu in &[1.0, 3.0, 10.0, 37.0] {
            for &t in &[0.1, 0.5, 1.0, 2.0, 3.3, 8.0] {
                let f = Distribution::FisherF { d1: 1.0, d2: nu }.cdf(t * t).unwrap();
                let two_sided = 2.0 * (1.0 - Distribution::StudentT { df: nu }.cdf(t).unwrap());
                assert!((f - (1.0 - two_sided)).abs() < 1e-12, "nu={nu} t={t}");
            }
        }
    }

    #[test]
    fn rejects_bad_df() {
        assert!(matches!(
            Distribution::StudentT { df: 0.5 }.cdf(1.0),
            Err(Error::InvalidDegreesOfFreedom(_))
        ));
        assert!(Distribution::FisherF { d1: 2.0, d2: 0.0 }.cdf(1.0).is_err());
        assert!(Distribution::ChiSquare { df: f64::NAN }.cdf(1.0).is_err());
    }
}
