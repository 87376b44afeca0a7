//! Annual series, aligned tables, and the variable-construction steps
//! (deflation, per-capita to total aggregation, logs, differences).

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Column names of the raw input file, in file order (after `year`).
pub const RAW_SCHEMA: [&str; 8] = [
    "gdp_nominal",
    "gdp_index",
    "urc_nominal",
    "urc_index",
    "rrc_nominal",
    "rrc_index",
    "urban_pop",
    "rural_pop",
];

/// The bundled 1980–2019 national-accounts sample.
pub const BUNDLED_FIXTURE: &str = include_str!("../data/china_1980_2019.csv");

/// A named annual series without gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub name: String,
    pub start_year: i32,
    pub values: Vec<f64>,
    pub unit: String,
}

impl TimeSeries {
    pub fn new(
        name: impl Into<String>,
        start_year: i32,
        values: Vec<f64>,
        unit: impl Into<String>,
    ) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::EmptySeries(name));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                name,
                year: start_year + i as i32,
            });
        }
        Ok(Self {
            name,
            start_year,
            values,
            unit: unit.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.start_year + i as i32)
    }

    pub fn value_at(&self, year: i32) -> Option<f64> {
        let offset = year.checked_sub(self.start_year)?;
        usize::try_from(offset)
            .ok()
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn is_aligned_with(&self, other: &TimeSeries) -> bool {
        self.start_year == other.start_year && self.len() == other.len()
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn check_aligned(&self, other: &TimeSeries) -> Result<()> {
        if self.is_aligned_with(other) {
            Ok(())
        } else {
            Err(Error::MisalignedSeries(
                self.name.clone(),
                other.name.clone(),
            ))
        }
    }

    fn check_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| v <= 0.0) {
            Some(i) => Err(Error::NonPositiveValue {
                name: self.name.clone(),
                year: self.start_year + i as i32,
            }),
            None => Ok(()),
        }
    }
}

/// Columns sharing one contiguous year axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    start_year: i32,
    len: usize,
    columns: Vec<TimeSeries>,
}

impl DataTable {
    pub fn new(columns: Vec<TimeSeries>) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::EmptySeries("<table>".into()))?;
        let (start_year, len) = (first.start_year, first.len());
        for (i, c) in columns.iter().enumerate() {
            first.check_aligned(c)?;
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Self {
            start_year,
            len,
            columns,
        })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.len as i32 - 1
    }

    /// Number of observations per column.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn years(&self) -> Vec<i32> {
        (0..self.len).map(|i| self.start_year + i as i32).collect()
    }

    pub fn columns(&self) -> &[TimeSeries] {
        &self.columns
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Result<&TimeSeries> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    /// Sub-table with the named columns in the given order.
    pub fn select(&self, names: &[&str]) -> Result<DataTable> {
        let cols = names
            .iter()
            .map(|n| self.column(n).cloned())
            .collect::<Result<Vec<_>>>()?;
        DataTable::new(cols)
    }

    /// Row-major copy of the values, one `Vec` per year.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len)
            .map(|t| self.columns.iter().map(|c| c.values[t]).collect())
            .collect()
    }

    /// Serialises as CSV with a leading `year` column. Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("year");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for t in 0..self.len {
            let _ = write!(out, "{}", self.start_year + t as i32);
            for c in &self.columns {
                let _ = write!(out, ",{}", c.values[t]);
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Reads a CSV whose first column is `year`. Every name in `schema` must be
/// present; an empty schema accepts whatever columns the header lists.
pub fn load_csv(path: &Path, schema: &[&str]) -> Result<DataTable> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text, schema)
}

pub fn parse_csv(text: &str, schema: &[&str]) -> Result<DataTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.first().map(String::as_str) != Some("year") {
        return Err(Error::MissingColumn("year".into()));
    }
    for want in schema {
        if !header.iter().any(|h| h == want) {
            return Err(Error::MissingColumn(want.to_string()));
        }
    }

    let mut years: Vec<i32> = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); header.len() - 1];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let row = i + 1;
        let cell = |j: usize| record.get(j).unwrap_or("");
        let year: i32 = cell(0).parse().map_err(|_| Error::UnparsableCell {
            row,
            column: "year".into(),
            value: cell(0).into(),
        })?;
        if let Some(&previous) = years.last() {
            if year != previous + 1 {
                return Err(Error::GapInYears {
                    previous,
                    next: year,
                });
            }
        }
        years.push(year);
        for (j, col) in values.iter_mut().enumerate() {
            let raw = cell(j + 1);
            let v: f64 = raw
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::UnparsableCell {
                    row,
                    column: header[j + 1].clone(),
                    value: raw.into(),
                })?;
            col.push(v);
        }
    }
    let start_year = *years
        .first()
        .ok_or_else(|| Error::EmptySeries("<csv>".into()))?;
    let columns = header[1..]
        .iter()
        .zip(values)
        .map(|(name, v)| TimeSeries::new(name.clone(), start_year, v, ""))
        .collect::<Result<Vec<_>>>()?;
    DataTable::new(columns)
}

/// Converts a "preceding year = 100" index into a cumulative index that is
/// 100 in the first year.
pub fn chain_index(previous_year_100: &TimeSeries) -> Result<TimeSeries> {
    if let Some(i) = previous_year_100.values.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositiveIndex {
            name: previous_year_100.name.clone(),
            year: previous_year_100.start_year + i as i32,
        });
    }
    let mut level = 100.0;
    let values = previous_year_100
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if i > 0 {
                level *= v / 100.0;
            }
            level
        })
        .collect();
    TimeSeries::new(
        previous_year_100.name.clone(),
        previous_year_100.start_year,
        values,
        previous_year_100.unit.clone(),
    )
}

/// Rescales a cumulative index so that it equals exactly 100 in `base_year`.
pub fn rebase_index(index: &TimeSeries, base_year: i32) -> Result<TimeSeries> {
    let base = index
        .value_at(base_year)
        .ok_or(Error::BaseYearOutOfRange(base_year))?;
    if let Some(i) = index.values.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositiveIndex {
            name: index.name.clone(),
            year: index.start_year + i as i32,
        });
    }
    let values = index
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if index.start_year + i as i32 == base_year {
                100.0
            } else {
                v * 100.0 / base
            }
        })
        .collect();
    TimeSeries::new(
        index.name.clone(),
        index.start_year,
        values,
        index.unit.clone(),
    )
}

/// Constant `base_year` prices: `real_t = nominal_base * index_t / 100`.
pub fn deflate(nominal: &TimeSeries, volume_index: &TimeSeries, base_year: i32) -> Result<TimeSeries> {
    nominal.check_aligned(volume_index)?;
    let base_index = volume_index
        .value_at(base_year)
        .ok_or(Error::BaseYearOutOfRange(base_year))?;
    if let Some(i) = volume_index.values.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositiveIndex {
            name: volume_index.name.clone(),
            year: volume_index.start_year + i as i32,
        });
    }
    if (base_index - 100.0).abs() > 1e-9 {
        return Err(Error::IndexNotBased {
            name: volume_index.name.clone(),
            year: base_year,
            value: base_index,
        });
    }
    let base_value = nominal.value_at(base_year).expect("aligned");
    let values = volume_index
        .values
        .iter()
        .map(|&idx| base_value * idx / 100.0)
        .collect();
    TimeSeries::new(
        nominal.name.clone(),
        nominal.start_year,
        values,
        format!("{} ({} prices)", nominal.unit, base_year),
    )
}

/// Per-capita consumption (元) times population (万人), in 亿元.
///
/// The result is named after the per-capita series in upper case
/// (`urc` becomes `URC`).
pub fn total_consumption(per_capita: &TimeSeries, population: &TimeSeries) -> Result<TimeSeries> {
    per_capita.check_aligned(population)?;
    per_capita.check_positive()?;
    population.check_positive()?;
    let values = per_capita
        .values
        .iter()
        .zip(&population.values)
        .map(|(c, p)| c * p / 1e4)
        .collect();
    TimeSeries::new(
        per_capita.name.to_uppercase(),
        per_capita.start_year,
        values,
        "亿元",
    )
}

/// Natural log. Upper-case names gain an `L` prefix, others an `l`.
pub fn log_transform(s: &TimeSeries) -> Result<TimeSeries> {
    s.check_positive()?;
    let prefix = if s.name.starts_with(|c: char| c.is_uppercase()) {
        'L'
    } else {
        'l'
    };
    TimeSeries::new(
        format!("{prefix}{}", s.name),
        s.start_year,
        s.values.iter().map(|v| v.ln()).collect(),
        format!("ln {}", s.unit),
    )
}

/// Repeated first difference. The result starts `order` years later and is
/// named `D(x)` or `D(x,2)`.
pub fn difference(s: &TimeSeries, order: usize) -> Result<TimeSeries> {
    if order > 2 {
        return Err(Error::OrderTooLarge(order));
    }
    if s.len() <= order {
        return Err(Error::SeriesTooShort {
            needed: order + 1,
            got: s.len(),
        });
    }
    if order == 0 {
        return Ok(s.clone());
    }
    let mut values = s.values.clone();
    for _ in 0..order {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let name = if order == 1 {
        format!("D({})", s.name)
    } else {
        format!("D({},{order})", s.name)
    };
    TimeSeries::new(name, s.start_year + order as i32, values, s.unit.clone())
}

/// First-differences every column of a table.
pub fn difference_table(table: &DataTable, order: usize) -> Result<DataTable> {
    let cols = table
        .columns()
        .iter()
        .map(|c| difference(c, order))
        .collect::<Result<Vec<_>>>()?;
    DataTable::new(cols)
}

/// Builds the ten analysis variables from a raw table following
/// [`RAW_SCHEMA`]: real `GDP`, `urc`, `rrc`, the totals `URC`, `RRC`, and
/// the logs `LGDP`, `lurc`, `lrrc`, `LURC`, `LRRC`.
///
/// Indices are rebased to `base_year` before deflating, so any cumulative
/// base is accepted.
pub fn construct_variables(raw: &DataTable, base_year: i32) -> Result<DataTable> {
    let real = |nominal: &str, index: &str, name: &str, unit: &str| -> Result<TimeSeries> {
        let mut n = raw.column(nominal)?.clone();
        n.unit = unit.into();
        let idx = rebase_index(raw.column(index)?, base_year)?;
        Ok(deflate(&n, &idx, base_year)?.renamed(name))
    };
    let gdp = real("gdp_nominal", "gdp_index", "GDP", "亿元")?;
    let urc = real("urc_nominal", "urc_index", "urc", "元")?;
    let rrc = real("rrc_nominal", "rrc_index", "rrc", "元")?;
    let urc_total = total_consumption(&urc, raw.column("urban_pop")?)?;
    let rrc_total = total_consumption(&rrc, raw.column("rural_pop")?)?;
    let logs = [&gdp, &urc, &rrc, &urc_total, &rrc_total]
        .into_iter()
        .map(log_transform)
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec![gdp, urc, rrc, urc_total, rrc_total];
    cols.extend(logs);
    DataTable::new(cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(name: &str, start: i32, v: &[f64]) -> TimeSeries {
        TimeSeries::new(name, start, v.to_vec(), "").unwrap()
    }

    #[test]
    fn loads_small_file() {
        let t = parse_csv("year,gdp\n1980,4587.6\n1981,4935.8\n1982,5373.4", &["gdp"]).unwrap();
        assert_eq!(t.n_columns(), 1);
        assert_eq!(t.start_year(), 1980);
        assert_eq!(t.len(), 3);
        assert_eq!(t.column("gdp").unwrap().values[2], 5373.4);
    }

    #[test]
    fn rejects_gaps_missing_columns_and_bad_cells() {
        assert!(matches!(
            parse_csv("year,gdp\n1980,1\n1982,2\n", &["gdp"]),
            Err(Error::GapInYears { previous: 1980, next: 1982 })
        ));
        assert!(matches!(
            parse_csv("year,gdp\n1980,1\n", &["gdp", "cpi"]),
            Err(Error::MissingColumn(c)) if c == "cpi"
        ));
        match parse_csv("year,gdp\n1980,1\n1981,abc\n", &[]) {
            Err(Error::UnparsableCell { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "gdp", "abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_csv("yr,gdp\n1980,1\n", &[]),
            Err(Error::MissingColumn(c)) if c == "year"
        ));
        assert!(parse_csv("year,gdp\n1980,\n", &[]).is_err());
    }

    #[test]
    fn bundled_fixture_shape() {
        let t = parse_csv(BUNDLED_FIXTURE, &RAW_SCHEMA).unwrap();
        assert_eq!(t.n_columns(), 8);
        assert_eq!(t.len(), 40);
        assert_eq!((t.start_year(), t.end_year()), (1980, 2019));
    }

    #[test]
    fn table_invariants() {
        let a = ts("a", 1980, &[1.0, 2.0]);
        assert!(matches!(
            DataTable::new(vec![a.clone(), ts("b", 1981, &[1.0, 2.0])]),
            Err(Error::MisalignedSeries(..))
        ));
        assert!(matches!(
            DataTable::new(vec![a.clone(), a.clone()]),
            Err(Error::DuplicateColumn(_))
        ));
        assert!(TimeSeries::new("e", 1980, vec![], "").is_err());
        assert!(TimeSeries::new("n", 1980, vec![f64::NAN], "").is_err());
        assert_eq!(a.end_year(), 1981);
        assert_eq!(a.value_at(1981), Some(2.0));
        assert_eq!(a.value_at(1979), None);
    }

    #[test]
    fn deflate_examples() {
        let n = ts("gdp", 2000, &[100.0, 110.0]);
        let i = ts("idx", 2000, &[100.0, 105.0]);
        assert_eq!(deflate(&n, &i, 2000).unwrap().values, vec![100.0, 105.0]);

        let n = ts("gdp", 2000, &[100.0, 250.0, 300.0]);
        let flat = ts("idx", 2000, &[100.0; 3]);
        assert_eq!(deflate(&n, &flat, 2000).unwrap().values, vec![100.0; 3]);

        let n = ts("gdp", 2000, &[100.0, 121.0, 133.1]);
        let i = ts("idx", 2000, &[100.0, 110.0, 121.0]);
        let r = deflate(&n, &i, 2000).unwrap();
        for (a, b) in r.values.iter().zip([100.0, 110.0, 121.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(r.unit.contains("2000"));
    }

    #[test]
    fn deflate_errors() {
        let n = ts("gdp", 2000, &[100.0, 110.0]);
        let i = ts("idx", 2000, &[100.0, 0.0]);
        assert!(matches!(deflate(&n, &i, 2005), Err(Error::BaseYearOutOfRange(2005))));
        assert!(matches!(deflate(&n, &i, 2000), Err(Error::NonPositiveIndex { year: 2001, .. })));
        let i = ts("idx", 2000, &[90.0, 100.0]);
        assert!(matches!(deflate(&n, &i, 2000), Err(Error::IndexNotBased { .. })));
    }

    #[test]
    fn chain_and_rebase() {
        let prev = ts("idx", 2000, &[100.0, 110.0, 110.0]);
        let cum = chain_index(&prev).unwrap();
        assert!((cum.values[2] - 121.0).abs() < 1e-12);
        let re = rebase_index(&cum, 2001).unwrap();
        assert_eq!(re.values[1], 100.0);
        assert!((re.values[2] - 110.0).abs() < 1e-12);
        assert!((re.values[0] - 100.0 / 1.1).abs() < 1e-12);
    }

    #[test]
    fn total_consumption_examples() {
        let c = ts("urc", 1990, &[1000.0]);
        let p = ts("pop", 1990, &[40000.0]);
        let t = total_consumption(&c, &p).unwrap();
        assert_eq!(t.values, vec![4000.0]);
        assert_eq!(t.name, "URC");

        let t = total_consumption(&ts("urc", 1990, &[2567.0]), &ts("pop", 1990, &[30195.0])).unwrap();
        assert_eq!(format!("{:.2}", t.values[0]), "7751.06");

        assert!(matches!(
            total_consumption(&ts("urc", 1990, &[0.0, 0.0]), &ts("pop", 1990, &[1.0, 1.0])),
            Err(Error::NonPositiveValue { .. })
        ));
        assert!(matches!(
            total_consumption(&c, &ts("pop", 1991, &[1.0])),
            Err(Error::MisalignedSeries(..))
        ));
    }

    #[test]
    fn log_examples() {
        let e = std::f64::consts::E;
        let l = log_transform(&ts("GDP", 2000, &[1.0, e, e * e])).unwrap();
        assert_eq!(l.name, "LGDP");
        for (a, b) in l.values.iter().zip([0.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(log_transform(&ts("urc", 2000, &[1.0])).unwrap().name, "lurc");
        assert!(matches!(
            log_transform(&ts("x", 2000, &[1.0, -1.0])),
            Err(Error::NonPositiveValue { year: 2001, .. })
        ));
    }

    #[test]
    fn difference_examples() {
        let s = ts("x", 2000, &[1.0, 3.0, 6.0, 10.0]);
        let d1 = difference(&s, 1).unwrap();
        assert_eq!(d1.values, vec![2.0, 3.0, 4.0]);
        assert_eq!((d1.start_year, d1.name.as_str()), (2001, "D(x)"));
        assert_eq!(difference(&s, 0).unwrap(), s);
        let d2 = difference(&s, 2).unwrap();
        assert_eq!(d2.values, vec![1.0, 1.0]);
        assert_eq!(d2.start_year, 2002);
        assert!(matches!(difference(&s, 3), Err(Error::OrderTooLarge(3))));
        assert!(matches!(
            difference(&ts("x", 2000, &[1.0, 2.0]), 2),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn fixture_variables_are_near_linear_in_logs() {
        let raw = parse_csv(BUNDLED_FIXTURE, &RAW_SCHEMA).unwrap();
        let vars = construct_variables(&raw, 1980).unwrap();
        assert_eq!(
            vars.names(),
            ["GDP", "urc", "rrc", "URC", "RRC", "LGDP", "lurc", "lrrc", "LURC", "LRRC"]
        );
        let d = difference(vars.column("LGDP").unwrap(), 1).unwrap();
        assert!(d.values.iter().all(|&g| (0.0..=0.20).contains(&g)));
        // base-year real value equals the nominal one
        assert_eq!(vars.column("GDP").unwrap().values[0], 4587.6);
    }
}
