use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("years are not contiguous: {previous} is followed by {next}")]
    GapInYears { previous: i32, next: i32 },
    #[error("cannot parse `{value}` at row {row}, column `{column}`")]
    UnparsableCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("series `{0}` has no observations")]
    EmptySeries(String),
    #[error("series `{name}` has a non-finite value in {year}")]
    NonFiniteValue { name: String, year: i32 },
    #[error("base year {0} is outside the sample")]
    BaseYearOutOfRange(i32),
    #[error("index `{name}` is not positive in {year}")]
    NonPositiveIndex { name: String, year: i32 },
    #[error("index `{name}` is {value} in base year {year}, expected 100")]
    IndexNotBased { name: String, year: i32, value: f64 },
    #[error("series `{0}` and `{1}` are not aligned")]
    MisalignedSeries(String, String),
    #[error("series `{name}` has a non-positive value in {year}")]
    NonPositiveValue { name: String, year: i32 },
    #[error("differencing order {0} exceeds 2")]
    OrderTooLarge(usize),
    #[error("series too short: need {needed} observations, have {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("invalid degrees of freedom {0}")]
    InvalidDegreesOfFreedom(f64),
    #[error("effective sample size {0} is below the surface minimum of 10")]
    SampleTooSmall(usize),
    #[error("no stored trace critical values for k-r = {0}")]
    DimensionOutOfTable(usize),

    #[error("design and response disagree: {0}")]
    DimensionMismatch(String),
    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },
    #[error("response has zero variance")]
    DegenerateResponse,
    #[error("design has no intercept column")]
    MissingIntercept,
    #[error("ridge parameter must be non-negative, got {0}")]
    NegativeK(f64),
    #[error("ridge trace never stabilised below {threshold}; widen the grid")]
    NoStableK { threshold: f64 },
    #[error("invalid ridge grid: {0}")]
    InvalidGrid(String),

    #[error("test regression fits exactly; the statistic is undefined")]
    DegenerateRegression,

    #[error("{observations} usable observations cannot support lag {lag} with {vars} variables")]
    SampleTooShortForLag {
        lag: usize,
        vars: usize,
        observations: usize,
    },
    #[error("residual covariance is singular at lag {0}")]
    SingularCovariance(usize),
    #[error("residual covariance is not positive definite")]
    CovarianceNotPD,
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),

    #[error("moment matrix {0} is numerically singular")]
    SingularMoment(&'static str),
    #[error("levels lag {lag} leaves too few observations ({observations})")]
    LagTooLargeForSample { lag: usize, observations: usize },
    #[error("cointegration rank {rank} outside 0..={vars}")]
    RankOutOfRange { rank: usize, vars: usize },

    #[error("figure has no series")]
    EmptySeriesSet,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Stage { source, .. } => source.kind(),
            Config(_) | InvalidOrdering(_) | InvalidGrid(_) | NegativeK(_) | OrderTooLarge(_)
            | BaseYearOutOfRange(_) | RankOutOfRange { .. } | InvalidDegreesOfFreedom(_) => {
                ErrorKind::Config
            }
            Io { .. }
            | Csv(_)
            | MissingColumn(_)
            | DuplicateColumn(_)
            | GapInYears { .. }
            | UnparsableCell { .. }
            | EmptySeries(_)
            | NonFiniteValue { .. }
            | NonPositiveIndex { .. }
            | IndexNotBased { .. }
            | MisalignedSeries(..)
            | NonPositiveValue { .. }
            | SeriesTooShort { .. }
            | EmptySeriesSet
            | DimensionMismatch(_) => ErrorKind::Data,
            _ => ErrorKind::Numerical,
        }
    }

    /// Pipeline stage that raised the error, if any.
    pub fn stage(&self) -> Option<&'static str> {
        match self {
            Error::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }

    /// The underlying error with any stage wrapper removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
