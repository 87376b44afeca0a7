use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use macrots::coint::johansen_trace;
use macrots::dataset::{difference_table, DataTable};
use macrots::regress::{ols_fit, ridge_fit, ridge_trace, DesignMatrix};
use macrots::report::config::{parse_adf_case, parse_johansen_case};
use macrots::report::figure::{emit_figure, Series, SeriesSet, Style};
use macrots::report::pipeline::{load_dataset, resolve_ordering, run_pipeline, StageContext};
use macrots::report::{emit_table, PipelineConfig};
use macrots::unitroot::{adf_by_difference, adf_test};
use macrots::varmod::{fevd, irf, select_lag, var_fit, var_stability};
use macrots::{Error, ErrorKind, Result};

#[derive(Parser)]
#[command(name = "macrots", version, about = "Unit roots, cointegration and VAR analysis of annual macro series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Default)]
struct Common {
    /// Raw CSV (defaults to the bundled 1980-2019 sample)
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Deflation base year (defaults to the first sample year)
    #[arg(long, global = true)]
    base_year: Option<i32>,
    /// Deterministic terms: none|const|trend
    #[arg(long, global = true)]
    det: Option<String>,
    /// Largest VAR lag for lag selection
    #[arg(long, global = true)]
    max_lag: Option<usize>,
    /// Lags of the levels VAR in the Johansen test
    #[arg(long, global = true)]
    levels_lag: Option<usize>,
    /// Impulse-response / variance-decomposition horizon
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Cholesky ordering, e.g. LGDP,LURC,LRRC
    #[arg(long, global = true)]
    ordering: Option<String>,
    /// Output directory (pipeline) or file (plot)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or md
    #[arg(long, global = true)]
    format: Option<String>,
    /// key = value file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Index columns are "previous year = 100"
    #[arg(long, global = true)]
    chain_index: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full replication run: 8 tables, 5 figures and a report
    Pipeline,
    /// ADF tests
    Adf {
        #[arg(long, value_delimiter = ',', default_value = "LGDP,lurc,lrrc")]
        vars: Vec<String>,
        /// Also test differences up to this order (one table per variable)
        #[arg(long)]
        max_diff: Option<usize>,
    },
    /// OLS with VIF
    Ols {
        #[arg(long, default_value = "LGDP")]
        response: String,
        #[arg(long, value_delimiter = ',', default_value = "lurc,lrrc")]
        regressors: Vec<String>,
    },
    /// Ridge regression; k from the trace rule unless given
    Ridge {
        #[arg(long, default_value = "LGDP")]
        response: String,
        #[arg(long, value_delimiter = ',', default_value = "lurc,lrrc")]
        regressors: Vec<String>,
        #[arg(long)]
        k: Option<f64>,
    },
    /// Johansen trace test on log levels
    Johansen {
        #[arg(long, value_delimiter = ',', default_value = "LGDP,lurc,lrrc")]
        vars: Vec<String>,
    },
    /// VAR lag-order selection on first differences
    Lagselect {
        #[arg(long, value_delimiter = ',', default_value = "LGDP,LURC,LRRC")]
        vars: Vec<String>,
    },
    /// VAR on first differences
    Var {
        #[arg(long, value_delimiter = ',', default_value = "LGDP,LURC,LRRC")]
        vars: Vec<String>,
        /// Lag order (defaults to the AIC choice)
        #[arg(long)]
        lag: Option<usize>,
    },
    /// Orthogonalised impulse responses of the VAR on first differences
    Irf {
        #[arg(long, value_delimiter = ',', default_value = "LGDP,LURC,LRRC")]
        vars: Vec<String>,
        #[arg(long)]
        lag: Option<usize>,
    },
    /// Forecast-error variance decomposition of the VAR on first differences
    Fevd {
        #[arg(long, value_delimiter = ',', default_value = "LGDP,LURC,LRRC")]
        vars: Vec<String>,
        #[arg(long)]
        lag: Option<usize>,
    },
    /// Line chart of constructed variables as SVG
    Plot {
        #[arg(long, value_delimiter = ',', default_value = "LURC,LRRC")]
        vars: Vec<String>,
    },
}

fn config(common: &Common) -> Result<PipelineConfig> {
    let mut cfg = match &common.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    let mut set = |key: &str, value: Option<String>| -> Result<()> {
        match value {
            Some(v) => cfg.set(key, &v),
            None => Ok(()),
        }
    };
    set("data", common.data.as_ref().map(|p| p.display().to_string()))?;
    set("base-year", common.base_year.map(|v| v.to_string()))?;
    set("max-lag", common.max_lag.map(|v| v.to_string()))?;
    set("levels-lag", common.levels_lag.map(|v| v.to_string()))?;
    set("horizon", common.horizon.map(|v| v.to_string()))?;
    set("ordering", common.ordering.clone())?;
    set("out", common.out.as_ref().map(|p| p.display().to_string()))?;
    set("format", common.format.clone())?;
    if common.chain_index {
        cfg.chain_index = true;
    }
    Ok(cfg)
}

fn select(vars: &DataTable, names: &[String]) -> Result<DataTable> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    vars.select(&refs)
}

fn design(vars: &DataTable, regressors: &[String]) -> Result<DesignMatrix> {
    let cols = regressors
        .iter()
        .map(|n| Ok((n.as_str(), vars.column(n)?.values.as_slice())))
        .collect::<Result<Vec<_>>>()?;
    DesignMatrix::new(&cols, true)
}

fn fitted_var(cfg: &PipelineConfig, vars: &DataTable, names: &[String], lag: Option<usize>) -> Result<macrots::varmod::VarModel> {
    let diffs = difference_table(&select(vars, names)?, 1)?;
    let p = match lag {
        Some(p) => p,
        None => select_lag(&diffs, cfg.var_max_lag)?.starred.aic.max(1),
    };
    var_fit(&diffs, p)
}

fn run(cli: Cli) -> Result<()> {
    let c = &cli.common;
    let mut cfg = config(c).stage("config")?;
    let format = cfg.formats[0];
    if let Command::Pipeline = cli.command {
        if let Some(d) = &c.det {
            cfg.adf_case = parse_adf_case(d).stage("config")?;
        }
        let bundle = run_pipeline(&cfg)?;
        for name in bundle.files.keys() {
            println!("{}", cfg.out_dir.join(name).display());
        }
        for n in &bundle.notes {
            eprintln!("note: {n}");
        }
        return Ok(());
    }

    let (_, vars) = load_dataset(&cfg).stage("load")?;
    let out = match cli.command {
        Command::Pipeline => unreachable!(),
        Command::Adf { vars: names, max_diff } => {
            let case = match &c.det {
                Some(d) => parse_adf_case(d).stage("config")?,
                None => cfg.adf_case,
            };
            match max_diff {
                None => {
                    let rows = names
                        .iter()
                        .map(|n| adf_test(vars.column(n)?, case, cfg.adf_lags))
                        .collect::<Result<Vec<_>>>()
                        .stage("adf")?;
                    emit_table(rows.as_slice(), format)
                }
                Some(d) => {
                    let mut s = String::new();
                    for n in &names {
                        let rows = adf_by_difference(vars.column(n).stage("adf")?, d, case, cfg.adf_lags).stage("adf")?;
                        s.push_str(&emit_table(rows.as_slice(), format));
                    }
                    s
                }
            }
        }
        Command::Ols { response, regressors } => {
            let x = design(&vars, &regressors).stage("ols")?;
            let fit = ols_fit(&x, &vars.column(&response).stage("ols")?.values).stage("ols")?;
            emit_table(&fit, format)
        }
        Command::Ridge { response, regressors, k } => {
            let x = design(&vars, &regressors).stage("ridge")?;
            let y = &vars.column(&response).stage("ridge")?.values;
            let k = match k {
                Some(k) => k,
                None => ridge_trace(&x, y, &cfg.ridge_grid, cfg.ridge_threshold).stage("ridge")?.selected_k,
            };
            emit_table(&ridge_fit(&x, y, k).stage("ridge")?, format)
        }
        Command::Johansen { vars: names } => {
            let case = match &c.det {
                Some(d) => parse_johansen_case(d).stage("config")?,
                None => cfg.johansen_case,
            };
            let data = select(&vars, &names).stage("johansen")?;
            emit_table(&johansen_trace(&data, cfg.levels_lag, case).stage("johansen")?, format)
        }
        Command::Lagselect { vars: names } => {
            let diffs = difference_table(&select(&vars, &names).stage("select_lag")?, 1).stage("select_lag")?;
            emit_table(&select_lag(&diffs, cfg.var_max_lag).stage("select_lag")?, format)
        }
        Command::Var { vars: names, lag } => {
            let model = fitted_var(&cfg, &vars, &names, lag).stage("var")?;
            let moduli: Vec<String> = var_stability(&model).iter().map(|m| format!("{m:.6}")).collect();
            format!("{}companion eigenvalue moduli: {}\n", emit_table(&model, format), moduli.join(", "))
        }
        Command::Irf { vars: names, lag } => {
            let model = fitted_var(&cfg, &vars, &names, lag).stage("irf")?;
            let ord = resolve_ordering(&model.names, cfg.ordering.as_deref()).stage("irf")?;
            if cfg.horizon == 0 {
                return Err(Error::Config("horizon must be at least 1".into())).stage("irf");
            }
            emit_table(&irf(&model, cfg.horizon - 1, &ord).stage("irf")?, format)
        }
        Command::Fevd { vars: names, lag } => {
            let model = fitted_var(&cfg, &vars, &names, lag).stage("fevd")?;
            let ord = resolve_ordering(&model.names, cfg.ordering.as_deref()).stage("fevd")?;
            emit_table(&fevd(&model, cfg.horizon, &ord).stage("fevd")?, format)
        }
        Command::Plot { vars: names } => {
            let series = names
                .iter()
                .map(|n| Ok(Series::new(n.clone(), vars.column(n)?.values.clone())))
                .collect::<Result<Vec<_>>>()
                .stage("plot")?;
            let set = SeriesSet {
                title: names.join(", "),
                x_label: "year".into(),
                x: vars.years().into_iter().map(f64::from).collect(),
                series,
            };
            let svg = emit_figure(&set, Style::Line).stage("plot")?;
            if let Some(path) = &c.out {
                std::fs::write(path, &svg)
                    .map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })
                    .stage("plot")?;
                return Ok(());
            }
            svg
        }
    };
    print!("{out}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let stage = e.stage().unwrap_or("run");
            eprintln!("error [stage {stage}]: {}", e.root());
            ExitCode::from(match e.kind() {
                ErrorKind::Config => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numerical => 4,
            })
        }
    }
}
