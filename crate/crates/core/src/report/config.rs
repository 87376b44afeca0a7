//! Pipeline configuration and the flat `key = value` file format.

use std::path::{Path, PathBuf};

use crate::regress::{default_k_grid, DEFAULT_STABILITY_THRESHOLD};
use crate::report::table::Format;
use crate::stats::{AdfCase, JohansenCase};
use crate::unitroot::LagSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// `None` uses the bundled fixture.
    pub data_path: Option<PathBuf>,
    /// Index columns are "previous year = 100" and need chaining.
    pub chain_index: bool,
    /// `None` uses the first sample year.
    pub base_year: Option<i32>,
    pub adf_case: AdfCase,
    pub adf_lags: LagSpec,
    pub johansen_case: JohansenCase,
    pub levels_lag: usize,
    pub var_max_lag: usize,
    /// `None` fits the lag starred by AIC.
    pub var_lag: Option<usize>,
    pub horizon: usize,
    /// Variable names, `D(...)` optional; `None` keeps data order.
    pub ordering: Option<Vec<String>>,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub ridge_grid: Vec<f64>,
    pub ridge_threshold: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            data_path: None,
            chain_index: false,
            base_year: None,
            adf_case: AdfCase::Constant,
            adf_lags: LagSpec::default(),
            johansen_case: JohansenCase::UnrestrictedConstant,
            levels_lag: 2,
            var_max_lag: 8,
            var_lag: None,
            horizon: 10,
            ordering: None,
            out_dir: PathBuf::from("replication_output"),
            formats: vec![Format::Csv],
            ridge_grid: default_k_grid(),
            ridge_threshold: DEFAULT_STABILITY_THRESHOLD,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Config(format!("`{key}` expects true/false, got `{other}`"))),
    }
}

pub fn parse_adf_case(value: &str) -> Result<AdfCase> {
    match value.trim() {
        "none" => Ok(AdfCase::None),
        "const" | "constant" => Ok(AdfCase::Constant),
        "trend" | "const_trend" => Ok(AdfCase::ConstantTrend),
        other => Err(Error::Config(format!("unknown deterministic case `{other}` (none|const|trend)"))),
    }
}

/// `none` restricts a constant to the relation, `const` leaves it
/// unrestricted, `trend` adds a restricted trend. `case2..case4` are
/// accepted as aliases.
pub fn parse_johansen_case(value: &str) -> Result<JohansenCase> {
    match value.trim() {
        "none" | "case2" => Ok(JohansenCase::RestrictedConstant),
        "const" | "case3" => Ok(JohansenCase::UnrestrictedConstant),
        "trend" | "case4" => Ok(JohansenCase::RestrictedTrend),
        other => Err(Error::Config(format!("unknown Johansen case `{other}` (none|const|trend)"))),
    }
}

/// Either a comma list or `start:step:end`.
pub fn parse_grid(value: &str) -> Result<Vec<f64>> {
    let v = value.trim();
    let parts: Vec<&str> = v.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parse_num("ridge-grid", parts[0])?;
        let step: f64 = parse_num("ridge-grid", parts[1])?;
        let end: f64 = parse_num("ridge-grid", parts[2])?;
        if !(step > 0.0) || end < start {
            return Err(Error::InvalidGrid(format!("`{v}` is not an ascending range")));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + step * i as f64).collect());
    }
    v.split(',').map(|s| parse_num("ridge-grid", s)).collect()
}

impl PipelineConfig {
    /// Applies one setting. Keys mirror the CLI flags.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "data" => self.data_path = Some(PathBuf::from(value)),
            "chain-index" => self.chain_index = parse_bool(key, value)?,
            "base-year" => self.base_year = Some(parse_num(key, value)?),
            "det" => self.adf_case = parse_adf_case(value)?,
            "johansen-det" => self.johansen_case = parse_johansen_case(value)?,
            "adf-lags" => {
                self.adf_lags = if value == "auto" {
                    LagSpec::default()
                } else {
                    LagSpec::Fixed(parse_num(key, value)?)
                }
            }
            "levels-lag" => self.levels_lag = parse_num(key, value)?,
            "max-lag" => self.var_max_lag = parse_num(key, value)?,
            "var-lag" => self.var_lag = Some(parse_num(key, value)?),
            "horizon" => self.horizon = parse_num(key, value)?,
            "ordering" => {
                self.ordering = Some(value.split(',').map(|s| s.trim().to_string()).collect())
            }
            "out" => self.out_dir = PathBuf::from(value),
            "format" => {
                self.formats = value.split(',').map(str::parse).collect::<Result<Vec<_>>>()?;
                if self.formats.is_empty() {
                    return Err(Error::Config("`format` is empty".into()));
                }
            }
            "ridge-grid" => self.ridge_grid = parse_grid(value)?,
            "ridge-threshold" => self.ridge_threshold = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = PipelineConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }
}
