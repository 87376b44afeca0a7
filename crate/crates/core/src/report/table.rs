//! Result tables rendered as CSV or aligned Markdown.

use std::fmt;
use std::str::FromStr;

use crate::coint::JohansenResult;
use crate::regress::{OlsFit, RidgeFit};
use crate::report::format::{fixed, scientific, significant};
use crate::stats::stars;
use crate::unitroot::{AdfDiffRow, AdfResult};
use crate::varmod::{Fevd, ImpulseResponse, LagSelection, VarModel};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Markdown => "md",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(Error::Config(format!("unknown format `{other}` (expected csv or md)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// A rectangular table of preformatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Table {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// CSV carries header and rows only; Markdown adds the title and notes.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Markdown => self.to_markdown(),
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("write to Vec");
        for row in &self.rows {
            w.write_record(row).expect("write to Vec");
        }
        String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8 input")
    }

    fn to_markdown(&self) -> String {
        let width = |s: &str| s.chars().count();
        let mut widths: Vec<usize> = self.header.iter().map(|h| width(h).max(3)).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(width(cell));
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c}{}", " ".repeat(w - width(c))))
                .collect();
            format!("| {} |\n", padded.join(" | "))
        };
        let mut out = format!("**{}**\n\n", self.title);
        out.push_str(&line(&self.header));
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for n in &self.notes {
                out.push_str(&format!("{n}\n"));
            }
        }
        out
    }
}

/// Results that have a canonical tabular form.
pub trait Tabular {
    fn table(&self) -> Table;
}

pub fn emit_table<T: Tabular + ?Sized>(result: &T, format: Format) -> String {
    result.table().render(format)
}

const STAR_NOTE: &str = "Note: ***, **, * denote significance at the 1%, 5%, 10% levels.";

/// Three-decimal p-value with significance stars, e.g. `0.036**`.
pub fn p_cell(p: f64) -> String {
    format!("{}{}", fixed(p, 3), stars(p))
}

fn opt3(v: Option<f64>) -> String {
    v.map(|x| fixed(x, 3)).unwrap_or_default()
}

impl Tabular for [AdfResult] {
    fn table(&self) -> Table {
        let mut t = Table::new(
            "ADF unit-root tests (levels)",
            &["variable", "t", "P", "lags", "cv_1%", "cv_5%", "cv_10%"],
        );
        for r in self {
            t.push(vec![
                r.series.clone(),
                fixed(r.tau, 3),
                p_cell(r.p_value),
                r.lags_used.to_string(),
                opt3(r.critical_values.one_pct),
                fixed(r.critical_values.five_pct, 3),
                opt3(r.critical_values.ten_pct),
            ]);
        }
        t.note(STAR_NOTE)
    }
}

impl Tabular for [AdfDiffRow] {
    fn table(&self) -> Table {
        let name = self.first().map(|r| r.result.series.as_str()).unwrap_or("");
        let mut t = Table::new(
            format!("ADF tests for {name} by differencing order"),
            &["variable", "diff_order", "t", "P", "AIC", "cv_1%", "cv_5%", "cv_10%"],
        );
        for (i, row) in self.iter().enumerate() {
            let r = &row.result;
            t.push(vec![
                if i == 0 { name.to_string() } else { String::new() },
                row.diff_order.to_string(),
                fixed(r.tau, 3),
                p_cell(r.p_value),
                fixed(r.regression_aic, 3),
                opt3(r.critical_values.one_pct),
                fixed(r.critical_values.five_pct, 3),
                opt3(r.critical_values.ten_pct),
            ]);
        }
        t.note(STAR_NOTE)
    }
}

fn f_cell(f: f64, p: f64) -> String {
    format!("{}({})", fixed(f, 3), p_cell(p))
}

impl Tabular for OlsFit {
    fn table(&self) -> Table {
        let mut t = Table::new(
            "OLS regression",
            &["term", "B", "std_err", "Beta", "t", "P", "VIF", "R2", "F"],
        );
        for i in 0..self.names.len() {
            let beta = self.standardized_coefficients[i].map(|b| fixed(b, 3)).unwrap_or_default();
            let vif = self.vif_per_regressor[i].map(|v| fixed(v, 3)).unwrap_or_default();
            let first = i == 0;
            t.push(vec![
                self.names[i].clone(),
                fixed(self.coefficients[i], 3),
                fixed(self.standard_errors[i], 3),
                beta,
                fixed(self.t_stats[i], 3),
                p_cell(self.p_values[i]),
                vif,
                if first { fixed(self.r_squared, 3) } else { String::new() },
                if first { f_cell(self.f_stat, self.f_pvalue) } else { String::new() },
            ]);
        }
        t.note(STAR_NOTE)
    }
}

impl Tabular for RidgeFit {
    fn table(&self) -> Table {
        let mut t = Table::new(
            format!("Ridge regression (k = {})", fixed(self.k, 2)),
            &["term", "B", "std_err", "Beta", "t", "P", "R2", "F"],
        );
        for i in 0..self.names.len() {
            let first = i == 0;
            t.push(vec![
                self.names[i].clone(),
                fixed(self.coefficients[i], 3),
                fixed(self.standard_errors[i], 3),
                self.standardized_coefficients[i].map(|b| fixed(b, 3)).unwrap_or_default(),
                fixed(self.t_stats[i], 3),
                p_cell(self.p_values[i]),
                if first { fixed(self.r_squared, 3) } else { String::new() },
                if first { f_cell(self.f_stat, self.f_pvalue) } else { String::new() },
            ]);
        }
        t.note(STAR_NOTE)
    }
}

/// `None`, `At most 1`, ... for the sequential trace nulls.
pub fn rank_null_label(r: usize) -> String {
    if r == 0 {
        "None".into()
    } else {
        format!("At most {r}")
    }
}

impl Tabular for JohansenResult {
    fn table(&self) -> Table {
        let mut t = Table::new(
            format!(
                "Johansen trace test ({}, {} lag(s) in levels, T = {})",
                self.det_case, self.lags_in_levels, self.effective_t
            ),
            &["null_hypothesis", "eigenvalue", "trace_statistic", "cv_5%", "P"],
        );
        let rejected = self.rejected_5pct();
        for r in 0..self.eigenvalues.len() {
            t.push(vec![
                format!("{}{}", rank_null_label(r), if rejected[r] { "*" } else { "" }),
                fixed(self.eigenvalues[r], 6),
                significant(self.trace_stats[r], 7),
                significant(self.critical_values[r].five_pct, 7),
                self.p_values[r].map(|p| fixed(p, 4)).unwrap_or_else(|| "NA".into()),
            ]);
        }
        t.note("Note: * denotes rejection of the null at the 5% level.")
    }
}

impl Tabular for LagSelection {
    fn table(&self) -> Table {
        let mut t = Table::new(
            format!("VAR lag order selection (T = {})", self.effective_t),
            &["lag", "LogL", "LR", "FPE", "AIC", "SC", "HQ"],
        );
        let s = self.starred;
        let mark = |on: bool| if on { "*" } else { "" };
        for row in &self.rows {
            let l = row.lag;
            t.push(vec![
                l.to_string(),
                significant(row.logl, 7),
                row.lr
                    .map(|v| format!("{}{}", significant(v, 7), mark(s.lr == Some(l))))
                    .unwrap_or_else(|| "NA".into()),
                format!("{}{}", scientific(row.fpe, 2), mark(s.fpe == l)),
                format!("{}{}", significant(row.aic, 7), mark(s.aic == l)),
                format!("{}{}", significant(row.sc, 7), mark(s.sc == l)),
                format!("{}{}", significant(row.hq, 7), mark(s.hq == l)),
            ]);
        }
        t.note("Note: * marks the lag chosen by each criterion.")
    }
}

impl Tabular for VarModel {
    fn table(&self) -> Table {
        let k = self.n_vars();
        let mut header = vec!["regressor".to_string()];
        header.extend(self.names.iter().cloned());
        let mut t = Table {
            title: format!("VAR({}) coefficients (T = {})", self.p, self.effective_t),
            header,
            rows: Vec::new(),
            notes: Vec::new(),
        };
        let intercept = self.intercept();
        let mut row = vec!["const".to_string()];
        row.extend(intercept.iter().map(|c| fixed(*c, 6)));
        t.push(row);
        for lag in 1..=self.p {
            let a = self.lag_matrix(lag);
            for j in 0..k {
                let mut row = vec![format!("{}(-{lag})", self.names[j])];
                row.extend((0..k).map(|i| fixed(a[(i, j)], 6)));
                t.push(row);
            }
        }
        t.note("Columns are equations; rows are regressors.")
    }
}

impl Tabular for ImpulseResponse {
    fn table(&self) -> Table {
        let k = self.names.len();
        let mut header = vec!["horizon".to_string()];
        for i in 0..k {
            for j in 0..k {
                header.push(format!("{} <- {}", self.names[i], self.names[j]));
            }
        }
        let mut t = Table {
            title: "Orthogonalised impulse responses".into(),
            header,
            rows: Vec::new(),
            notes: Vec::new(),
        };
        for (h, m) in self.responses.iter().enumerate() {
            let mut row = vec![(h + 1).to_string()];
            for i in 0..k {
                for j in 0..k {
                    row.push(fixed(m[(i, j)], 6));
                }
            }
            t.push(row);
        }
        t.note("Horizon 1 is the impact period.")
    }
}

impl Tabular for Fevd {
    fn table(&self) -> Table {
        let k = self.names.len();
        let mut header = vec!["horizon".to_string()];
        for i in 0..k {
            for j in 0..k {
                header.push(format!("{} <- {}", self.names[i], self.names[j]));
            }
        }
        let mut t = Table {
            title: "Forecast-error variance decomposition (percent)".into(),
            header,
            rows: Vec::new(),
            notes: Vec::new(),
        };
        for (h, m) in self.shares.iter().enumerate() {
            let mut row = vec![(h + 1).to_string()];
            for i in 0..k {
                for j in 0..k {
                    row.push(fixed(100.0 * m[(i, j)], 4));
                }
            }
            t.push(row);
        }
        t
    }
}
