//! End-to-end replication run: data construction, every estimator, and
//! the full set of tables, figures and the written report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::coint::{johansen_trace, vecm_fit, JohansenResult, VecmModel};
use crate::dataset::{
    chain_index, construct_variables, difference_table, load_csv, parse_csv, DataTable, RAW_SCHEMA,
    BUNDLED_FIXTURE,
};
use crate::regress::{ols_fit, ridge_fit, ridge_trace, DesignMatrix, OlsFit, RidgeFit, RidgeTrace};
use crate::report::config::PipelineConfig;
use crate::report::figure::{emit_figure, Series, SeriesSet, Style};
use crate::report::format::fixed;
use crate::report::table::{emit_table, Format};
use crate::unitroot::{adf_by_difference, adf_test, AdfDiffRow, AdfResult};
use crate::varmod::{fevd, irf, select_lag, var_fit, Fevd, ImpulseResponse, LagSelection, Ordering, VarModel};
use crate::{Error, Result};

/// Tags an error with the pipeline stage that produced it.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        })
    }
}

/// Loads the raw table named by the config (or the bundled fixture),
/// chaining indices if requested, and returns it with the constructed
/// analysis variables.
pub fn load_dataset(cfg: &PipelineConfig) -> Result<(DataTable, DataTable)> {
    let mut raw = match &cfg.data_path {
        Some(p) => load_csv(p, &RAW_SCHEMA)?,
        None => parse_csv(BUNDLED_FIXTURE, &RAW_SCHEMA)?,
    };
    if cfg.chain_index {
        let cols = raw
            .columns()
            .iter()
            .map(|c| {
                if c.name.ends_with("_index") {
                    chain_index(c)
                } else {
                    Ok(c.clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        raw = DataTable::new(cols)?;
    }
    let base = cfg.base_year.unwrap_or_else(|| raw.start_year());
    let vars = construct_variables(&raw, base)?;
    Ok((raw, vars))
}

/// Resolves user-supplied names against model names, accepting `X` for
/// `D(X)`.
pub fn resolve_ordering(names: &[String], order: Option<&[String]>) -> Result<Ordering> {
    let Some(order) = order else {
        return Ok(Ordering::identity(names.len()));
    };
    let resolved: Vec<String> = order
        .iter()
        .map(|o| {
            if names.contains(o) {
                o.clone()
            } else {
                let wrapped = format!("D({o})");
                if names.contains(&wrapped) {
                    wrapped
                } else {
                    o.clone()
                }
            }
        })
        .collect();
    Ordering::from_names(&resolved, names)
}

/// Every estimate produced by a run.
#[derive(Debug, Clone)]
pub struct PipelineResults {
    pub variables: DataTable,
    pub base_year: i32,
    pub adf_levels: Vec<AdfResult>,
    pub ols: OlsFit,
    pub ridge_trace: RidgeTrace,
    pub ridge: RidgeFit,
    pub johansen: JohansenResult,
    /// Trace tests for levels lags 1..=4; errors kept as messages.
    pub johansen_by_lag: Vec<(usize, std::result::Result<JohansenResult, String>)>,
    pub vecm: VecmModel,
    /// LGDP, LURC, LRRC by differencing order.
    pub adf_by_difference: Vec<Vec<AdfDiffRow>>,
    pub lag_selection: LagSelection,
    pub var: VarModel,
    pub irf: ImpulseResponse,
    pub fevd: Fevd,
}

/// Rendered artifacts keyed by file name relative to the output directory.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub files: BTreeMap<String, String>,
    pub notes: Vec<String>,
    pub results: PipelineResults,
}

impl ReportBundle {
    pub fn table_files(&self) -> Vec<&str> {
        self.files.keys().filter(|k| k.starts_with("table")).map(String::as_str).collect()
    }

    pub fn figure_files(&self) -> Vec<&str> {
        self.files.keys().filter(|k| k.starts_with("fig")).map(String::as_str).collect()
    }

    /// Writes every file under `dir`. If any write fails, files already
    /// written by this call are removed.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| Error::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        for (name, content) in &self.files {
            let path = dir.join(name);
            if let Err(e) = std::fs::write(&path, content).map_err(io(&path)) {
                for p in &written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e);
            }
            written.push(path);
        }
        Ok(written)
    }
}

const LEVEL_VARS: [&str; 3] = ["LGDP", "lurc", "lrrc"];
const TOTAL_VARS: [&str; 3] = ["LGDP", "LURC", "LRRC"];

fn series_set(table: &DataTable, names: &[&str], title: &str) -> Result<SeriesSet> {
    let x = table.years().into_iter().map(f64::from).collect();
    let series = names
        .iter()
        .map(|n| table.column(n).map(|c| Series::new(*n, c.values.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesSet {
        title: title.into(),
        x_label: "year".into(),
        x,
        series,
    })
}

/// `LGDP = a + b * lurc + c * lrrc` with three-decimal coefficients.
pub fn equation(response: &str, names: &[String], coefficients: &[f64]) -> String {
    let mut s = format!("{response} = {}", fixed(coefficients[0], 3));
    for (n, c) in names.iter().zip(coefficients).skip(1) {
        let sign = if *c < 0.0 { '-' } else { '+' };
        let _ = write!(s, " {sign} {} * {n}", fixed(c.abs(), 3));
    }
    s
}

/// Runs every analysis in memory.
pub fn build_report(cfg: &PipelineConfig) -> Result<ReportBundle> {
    let (raw, vars) = load_dataset(cfg).stage("load")?;
    let base_year = cfg.base_year.unwrap_or_else(|| raw.start_year());

    let adf_levels = LEVEL_VARS
        .iter()
        .map(|n| adf_test(vars.column(n)?, cfg.adf_case, cfg.adf_lags))
        .collect::<Result<Vec<_>>>()
        .stage("adf_levels")?;

    let (lurc, lrrc, lgdp) = (
        vars.column("lurc")?.values.clone(),
        vars.column("lrrc")?.values.clone(),
        vars.column("LGDP")?.values.clone(),
    );
    let design = DesignMatrix::new(&[("lurc", &lurc), ("lrrc", &lrrc)], true).stage("ols")?;
    let ols = ols_fit(&design, &lgdp).stage("ols")?;
    let trace = ridge_trace(&design, &lgdp, &cfg.ridge_grid, cfg.ridge_threshold).stage("ridge")?;
    let ridge = ridge_fit(&design, &lgdp, trace.selected_k).stage("ridge")?;

    let levels = vars.select(&LEVEL_VARS).stage("johansen")?;
    let johansen = johansen_trace(&levels, cfg.levels_lag, cfg.johansen_case).stage("johansen")?;
    let johansen_by_lag = (1..=4)
        .map(|p| {
            (
                p,
                johansen_trace(&levels, p, cfg.johansen_case).map_err(|e| e.to_string()),
            )
        })
        .collect();
    let vecm = vecm_fit(&levels, johansen.rank_decision, cfg.levels_lag, cfg.johansen_case).stage("vecm")?;

    let adf_diff = TOTAL_VARS
        .iter()
        .map(|n| adf_by_difference(vars.column(n)?, 2, cfg.adf_case, cfg.adf_lags))
        .collect::<Result<Vec<_>>>()
        .stage("adf_differences")?;

    let diffs = difference_table(&vars.select(&TOTAL_VARS)?, 1).stage("select_lag")?;
    let lag_selection = select_lag(&diffs, cfg.var_max_lag).stage("select_lag")?;
    let var_lag = cfg.var_lag.unwrap_or(lag_selection.starred.aic).max(1);
    let var = var_fit(&diffs, var_lag).stage("var")?;
    let ordering = resolve_ordering(&var.names, cfg.ordering.as_deref()).stage("var")?;
    if cfg.horizon == 0 {
        return Err(Error::Config("horizon must be at least 1".into())).stage("irf");
    }
    let ir = irf(&var, cfg.horizon - 1, &ordering).stage("irf")?;
    let fe = fevd(&var, cfg.horizon, &ordering).stage("fevd")?;

    let results = PipelineResults {
        variables: vars,
        base_year,
        adf_levels,
        ols,
        ridge_trace: trace,
        ridge,
        johansen,
        johansen_by_lag,
        vecm,
        adf_by_difference: adf_diff,
        lag_selection,
        var,
        irf: ir,
        fevd: fe,
    };
    render(cfg, results).stage("render")
}

fn render(cfg: &PipelineConfig, r: PipelineResults) -> Result<ReportBundle> {
    let mut files = BTreeMap::new();
    let tables: [(&str, &dyn Fn(Format) -> String); 8] = [
        ("table1", &|f| emit_table(r.adf_levels.as_slice(), f)),
        ("table2", &|f| emit_table(&r.ols, f)),
        ("table3", &|f| emit_table(&r.ridge, f)),
        ("table4", &|f| emit_table(&r.johansen, f)),
        ("table5", &|f| emit_table(r.adf_by_difference[0].as_slice(), f)),
        ("table6", &|f| emit_table(r.adf_by_difference[1].as_slice(), f)),
        ("table7", &|f| emit_table(r.adf_by_difference[2].as_slice(), f)),
        ("table8", &|f| emit_table(&r.lag_selection, f)),
    ];
    for (name, render) in tables {
        for &f in &cfg.formats {
            files.insert(format!("{name}.{}", f.extension()), render(f));
        }
    }

    let v = &r.variables;
    let fig1 = series_set(v, &["LGDP"], "LGDP over time")?;
    let fig2 = series_set(v, &["LURC", "LRRC"], "LURC and LRRC over time")?;
    let fig3 = series_set(v, &LEVEL_VARS, "LGDP, lurc and lrrc over time")?;
    let target = 0;
    let h: Vec<f64> = (1..=r.irf.responses.len()).map(|i| i as f64).collect();
    let fig4 = SeriesSet {
        title: format!("Response of {} to orthogonalised shocks", r.var.names[target]),
        x_label: "period".into(),
        x: h.clone(),
        series: (0..r.var.n_vars())
            .map(|j| Series::new(format!("shock {}", r.var.names[j]), r.irf.path(target, j)))
            .collect(),
    };
    let fig5 = SeriesSet {
        title: format!("Variance decomposition of {}", r.var.names[target]),
        x_label: "period".into(),
        x: (1..=r.fevd.shares.len()).map(|i| i as f64).collect(),
        series: (0..r.var.n_vars())
            .map(|j| Series::new(r.var.names[j].clone(), r.fevd.shares_of(target, j)))
            .collect(),
    };
    files.insert("fig1.svg".into(), emit_figure(&fig1, Style::Line)?);
    files.insert("fig2.svg".into(), emit_figure(&fig2, Style::Line)?);
    files.insert("fig3.svg".into(), emit_figure(&fig3, Style::Line)?);
    files.insert("fig4.svg".into(), emit_figure(&fig4, Style::Line)?);
    files.insert("fig5.svg".into(), emit_figure(&fig5, Style::Stacked)?);

    let notes = notes(cfg, &r);
    files.insert("replication_report.md".into(), report_text(cfg, &r, &notes));
    Ok(ReportBundle {
        files,
        notes,
        results: r,
    })
}

fn verdict(reject: bool) -> &'static str {
    if reject {
        "stationary"
    } else {
        "unit root not rejected"
    }
}

fn notes(cfg: &PipelineConfig, r: &PipelineResults) -> Vec<String> {
    let mut notes = Vec::new();
    let v = &r.variables;
    let ls = &r.lag_selection;
    notes.push(format!(
        "Sample {}-{} ({} observations, base year {}). Lag selection on first differences with max lag {} uses T = {} common observations.",
        v.start_year(),
        v.end_year(),
        v.len(),
        r.base_year,
        cfg.var_max_lag,
        ls.effective_t
    ));
    let high_vif = r.ols.vif_per_regressor.iter().flatten().fold(0.0_f64, |a, b| a.max(*b));
    if high_vif > 10.0 {
        notes.push(format!(
            "VIF = {} exceeds 10: the OLS regressors are collinear, so a ridge fit is reported alongside.",
            fixed(high_vif, 3)
        ));
    }
    notes.push(format!(
        "Ridge k = {} chosen as the first grid point ({} to {}, {} points) where every standardized coefficient changes by less than {}% from the previous point.",
        fixed(r.ridge.k, 2),
        fixed(r.ridge_trace.grid[0], 2),
        fixed(*r.ridge_trace.grid.last().expect("non-empty grid"), 2),
        r.ridge_trace.grid.len(),
        fixed(100.0 * r.ridge_trace.threshold, 1)
    ));
    let j = &r.johansen;
    if j.full_rank() {
        let nonstat: Vec<&str> = r
            .adf_levels
            .iter()
            .filter(|a| !a.reject_5pct)
            .map(|a| a.series.as_str())
            .collect();
        notes.push(format!(
            "WARNING: every trace null is rejected at 5% (rank decision = K = {}). Full rank implies stationary levels, which contradicts the level ADF results{}. The VECM below is fitted at rank {} regardless.",
            j.eigenvalues.len(),
            if nonstat.is_empty() {
                String::new()
            } else {
                format!(" (unit root not rejected for {})", nonstat.join(", "))
            },
            j.rank_decision
        ));
    }
    for (name, rows) in TOTAL_VARS.iter().zip(&r.adf_by_difference) {
        let per_row: Vec<String> = rows
            .iter()
            .map(|row| format!("d={}: {}", row.diff_order, verdict(row.result.reject_5pct)))
            .collect();
        if rows.iter().any(|row| !row.result.reject_5pct) {
            notes.push(format!(
                "{name} is not stationary at every differencing order ({}); verdicts are reported per row.",
                per_row.join(", ")
            ));
        }
    }
    if ls.starred.lr.is_none() {
        notes.push("No sequential LR test rejects at 5%; the LR column carries no star.".into());
    }
    notes
}

fn report_text(cfg: &PipelineConfig, r: &PipelineResults, notes: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Replication report\n");
    let _ = writeln!(
        s,
        "Data: {}\n",
        cfg.data_path
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "bundled fixture (1980-2019)".into())
    );
    let _ = writeln!(s, "## Notes\n");
    for n in notes {
        let _ = writeln!(s, "- {n}");
    }

    let _ = writeln!(s, "\n## Unit-root tests on levels\n");
    s.push_str(&emit_table(r.adf_levels.as_slice(), Format::Markdown));

    let _ = writeln!(s, "\n## OLS\n");
    s.push_str(&emit_table(&r.ols, Format::Markdown));
    let _ = writeln!(s, "\nFitted equation:\n\n    {}", equation("LGDP", &r.ols.names, &r.ols.coefficients));

    let _ = writeln!(s, "\n## Ridge regression\n");
    s.push_str(&emit_table(&r.ridge, Format::Markdown));
    let _ = writeln!(
        s,
        "\nFitted equation (k = {}):\n\n    {}",
        fixed(r.ridge.k, 2),
        equation("LGDP", &r.ridge.names, &r.ridge.coefficients)
    );

    let _ = writeln!(s, "\n## Johansen trace test\n");
    s.push_str(&emit_table(&r.johansen, Format::Markdown));
    let _ = writeln!(s, "\nSensitivity to the levels lag ({}):\n", r.johansen.det_case);
    let _ = writeln!(s, "| levels lag | T | eigenvalues | trace statistics | rank |");
    let _ = writeln!(s, "|---|---|---|---|---|");
    for (p, res) in &r.johansen_by_lag {
        match res {
            Ok(j) => {
                let ev: Vec<String> = j.eigenvalues.iter().map(|x| fixed(*x, 4)).collect();
                let tr: Vec<String> = j.trace_stats.iter().map(|x| fixed(*x, 2)).collect();
                let _ = writeln!(
                    s,
                    "| {p} | {} | {} | {} | {} |",
                    j.effective_t,
                    ev.join(", "),
                    tr.join(", "),
                    j.rank_decision
                );
            }
            Err(e) => {
                let _ = writeln!(s, "| {p} | - | {e} | | |");
            }
        }
    }
    let vecm = &r.vecm;
    let _ = writeln!(
        s,
        "\nVECM at the sequential rank decision r = {}, {} levels lag(s), T = {}.",
        vecm.rank, vecm.p_levels, vecm.effective_t
    );
    if vecm.rank > 0 {
        let rows: Vec<String> = (0..vecm.beta.nrows())
            .map(|i| {
                let cells: Vec<String> = vecm.beta.row(i).iter().map(|x| fixed(*x, 4)).collect();
                cells.join(", ")
            })
            .collect();
        let _ = writeln!(s, "\nbeta (rows = variables{}):\n", if vecm.beta.nrows() > vecm.n_vars() { " then deterministic" } else { "" });
        for row in rows {
            let _ = writeln!(s, "    {row}");
        }
        let _ = writeln!(s, "\nalpha:\n");
        for i in 0..vecm.alpha.nrows() {
            let cells: Vec<String> = vecm.alpha.row(i).iter().map(|x| fixed(*x, 4)).collect();
            let _ = writeln!(s, "    {}: {}", vecm.names[i], cells.join(", "));
        }
    }

    for rows in &r.adf_by_difference {
        let _ = writeln!(s);
        s.push_str(&emit_table(rows.as_slice(), Format::Markdown));
    }

    let _ = writeln!(s, "\n## Lag-order selection\n");
    s.push_str(&emit_table(&r.lag_selection, Format::Markdown));
    let _ = writeln!(
        s,
        "\nVAR({}) fitted on {} (T = {}); impulse responses and variance decomposition over {} periods, ordering {}.",
        r.var.p,
        r.var.names.join(", "),
        r.var.effective_t,
        cfg.horizon,
        r.irf
            .ordering
            .as_slice()
            .iter()
            .map(|&i| r.var.names[i].as_str())
            .collect::<Vec<_>>()
            .join(" -> ")
    );
    let _ = writeln!(s, "\n## Variance decomposition\n");
    s.push_str(&emit_table(&r.fevd, Format::Markdown));
    s
}

/// Runs the pipeline and writes every artifact to `cfg.out_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<ReportBundle> {
    let bundle = build_report(cfg)?;
    bundle.write(&cfg.out_dir).stage("write")?;
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equation_format() {
        let names: Vec<String> = ["const", "lurc", "lrrc"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            equation("LGDP", &names, &[-0.229, 1.253, -0.2091]),
            "LGDP = -0.229 + 1.253 * lurc - 0.209 * lrrc"
        );
    }

    #[test]
    fn missing_file_names_load_stage() {
        let cfg = PipelineConfig {
            data_path: Some("/nonexistent/data.csv".into()),
            ..Default::default()
        };
        let e = build_report(&cfg).unwrap_err();
        assert_eq!(e.stage(), Some("load"));
    }

    #[test]
    fn oversized_lag_names_select_lag_stage() {
        let cfg = PipelineConfig {
            var_max_lag: 12,
            ..Default::default()
        };
        let e = build_report(&cfg).unwrap_err();
        assert_eq!(e.stage(), Some("select_lag"));
        assert!(matches!(e.root(), Error::SampleTooShortForLag { .. }));
    }
}
