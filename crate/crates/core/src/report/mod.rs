//! Tables, figures, configuration and the replication pipeline.

pub mod config;
pub mod figure;
pub mod format;
pub mod pipeline;
pub mod table;

pub use config::PipelineConfig;
pub use figure::{emit_figure, Series, SeriesSet, Style};
pub use pipeline::{build_report, run_pipeline, ReportBundle};
pub use table::{emit_table, Format, Table, Tabular};
