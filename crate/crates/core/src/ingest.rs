//! CSV ingestion of the source tables and byte-stable export of results.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::series::{AnnualSeries, Year};
use crate::units::Unit;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORTS_FILE: &str = "reports.json";
pub const JSON_OUTPUT_FILE: &str = "outputs.json";
pub const CSV_HEADER: [&str; 4] = ["year", "value", "unit", "label"];
/// Relative tolerance for the supplement's W/E column against W ÷ E.
pub const SUPPLEMENT_RATIO_TOLERANCE: f64 = 0.005;

/// What to do with an empty or `NA` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NaPolicy {
    /// Leave the cell's year out of that column's series.
    #[default]
    Skip,
    Error,
}

/// How negative years in a file are numbered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalendarConvention {
    /// Year 0 exists; values are used as written.
    #[default]
    Astronomical,
    /// BCE-style numbering with no year 0: `-n` becomes `-n + 1`.
    Historical,
}

impl CalendarConvention {
    pub fn to_astronomical(self, year: Year) -> std::result::Result<Year, String> {
        match self {
            CalendarConvention::Astronomical => Ok(year),
            CalendarConvention::Historical if year == 0 => {
                Err("year 0 does not exist in historical numbering".into())
            }
            CalendarConvention::Historical if year < 0 => Ok(year + 1),
            CalendarConvention::Historical => Ok(year),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTableSpec {
    pub path: PathBuf,
    pub delimiter: u8,
    pub year_column: String,
    pub value_columns: Vec<(String, Unit)>,
    pub na_policy: NaPolicy,
    pub calendar: CalendarConvention,
}

impl CsvTableSpec {
    pub fn new(path: impl Into<PathBuf>, value_columns: Vec<(String, Unit)>) -> Self {
        CsvTableSpec {
            path: path.into(),
            delimiter: b',',
            year_column: "year".into(),
            value_columns,
            na_policy: NaPolicy::default(),
            calendar: CalendarConvention::default(),
        }
    }

    /// Same unit for every named column.
    pub fn uniform(path: impl Into<PathBuf>, columns: &[&str], unit: Unit) -> Self {
        Self::new(
            path,
            columns.iter().map(|c| (c.to_string(), unit.clone())).collect(),
        )
    }

    pub fn with_na_policy(mut self, policy: NaPolicy) -> Self {
        self.na_policy = policy;
        self
    }

    pub fn with_calendar(mut self, calendar: CalendarConvention) -> Self {
        self.calendar = calendar;
        self
    }

    pub fn with_delimiter(mut self, delimiter: u8) -> Self {
        self.delimiter = delimiter;
        self
    }
}

fn is_na(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "N/A" | "NaN" | "nan" | ".")
}

fn csv_error(path: &Path, source: csv::Error) -> Error {
    if let csv::ErrorKind::Io(_) = source.kind() {
        let csv::ErrorKind::Io(io) = source.into_kind() else { unreachable!() };
        return Error::io(path, io);
    }
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Column names of a CSV file.
pub fn read_header(path: &Path, delimiter: u8) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?;
    Ok(headers.iter().map(|h| h.trim().to_string()).collect())
}

/// Reads one series per declared value column, in declaration order.
pub fn read_series(spec: &CsvTableSpec) -> Result<Vec<AnnualSeries>> {
    let path = spec.path.as_path();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let index_of = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: path.to_path_buf(),
                column: name.to_string(),
            })
    };
    let year_index = index_of(&spec.year_column)?;
    let value_indices = spec
        .value_columns
        .iter()
        .map(|(name, _)| index_of(name))
        .collect::<Result<Vec<_>>>()?;

    let mut columns: Vec<Vec<(Year, f64)>> = vec![Vec::new(); value_indices.len()];
    let mut seen: HashMap<Year, u64> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_error = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.iter().all(str::is_empty) {
            continue;
        }
        let raw_year = record.get(year_index).unwrap_or("");
        let year: Year = raw_year
            .parse()
            .map_err(|_| parse_error(format!("year '{raw_year}' is not an integer")))?;
        let year = spec.calendar.to_astronomical(year).map_err(parse_error)?;
        if let Some(first) = seen.insert(year, line) {
            return Err(parse_error(format!("duplicate year {year} (first on line {first})")));
        }
        for (column, &index) in columns.iter_mut().zip(&value_indices) {
            let cell = record.get(index).unwrap_or("");
            if is_na(cell) {
                match spec.na_policy {
                    NaPolicy::Skip => continue,
                    NaPolicy::Error => {
                        return Err(parse_error(format!(
                            "missing value in column '{}'",
                            &headers[index]
                        )))
                    }
                }
            }
            let value: f64 = cell
                .parse()
                .map_err(|_| parse_error(format!("'{cell}' in column '{}' is not a number", &headers[index])))?;
            if !value.is_finite() {
                return Err(parse_error(format!("non-finite value '{cell}' in column '{}'", &headers[index])));
            }
            column.push((year, value));
        }
    }

    spec.value_columns
        .iter()
        .zip(columns)
        .map(|((name, unit), points)| AnnualSeries::from_unsorted(name.clone(), unit.clone(), points))
        .collect()
}

/// Column names of the cumulative-production supplement export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupplementLayout {
    pub year: String,
    pub y: String,
    pub e: String,
    pub w: String,
    pub w_over_e: String,
    /// Base year of the supplement's dollars.
    pub base_year: i32,
}

impl Default for SupplementLayout {
    fn default() -> Self {
        SupplementLayout {
            year: "year".into(),
            y: "Y".into(),
            e: "E".into(),
            w: "W".into(),
            w_over_e: "W_over_E".into(),
            base_year: 1990,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupplementColumns {
    pub y: AnnualSeries,
    pub e: AnnualSeries,
    pub w: AnnualSeries,
    pub w_over_e: AnnualSeries,
}

/// A year where the W/E column disagrees with W ÷ E.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupplementWarning {
    pub year: Year,
    pub column: f64,
    pub computed: f64,
    pub relative_error: f64,
}

pub fn read_supplement(
    path: &Path,
    layout: &SupplementLayout,
) -> Result<(SupplementColumns, Vec<SupplementWarning>)> {
    let usd = Unit::TrillionUsd {
        base_year: layout.base_year,
    };
    let mut spec = CsvTableSpec::new(
        path,
        vec![
            (layout.y.clone(), usd.clone()),
            (layout.e.clone(), Unit::Exajoule),
            (layout.w.clone(), usd.clone()),
            (layout.w_over_e.clone(), Unit::ratio(&usd, &Unit::Exajoule)),
        ],
    );
    spec.year_column = layout.year.clone();
    let mut series = read_series(&spec)?.into_iter();
    let mut next = || series.next().expect("four columns requested");
    let columns = SupplementColumns {
        y: next(),
        e: next(),
        w: next(),
        w_over_e: next(),
    };

    let mut warnings = Vec::new();
    for &(year, column) in columns.w_over_e.points() {
        let (Some(w), Some(e)) = (columns.w.get(year), columns.e.get(year)) else {
            continue;
        };
        if e == 0.0 {
            continue;
        }
        let computed = w / e;
        let relative_error = if computed == 0.0 {
            column.abs()
        } else {
            (column - computed).abs() / computed.abs()
        };
        if relative_error > SUPPLEMENT_RATIO_TOLERANCE {
            warnings.push(SupplementWarning {
                year,
                column,
                computed,
                relative_error,
            });
        }
    }
    Ok((columns, warnings))
}

/// Serialised form of a series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub label: String,
    pub unit: Unit,
    pub points: Vec<(Year, f64)>,
}

impl From<&AnnualSeries> for SeriesRecord {
    fn from(s: &AnnualSeries) -> Self {
        SeriesRecord {
            label: s.label().to_string(),
            unit: s.unit().clone(),
            points: s.points().to_vec(),
        }
    }
}

impl TryFrom<SeriesRecord> for AnnualSeries {
    type Error = Error;

    fn try_from(r: SeriesRecord) -> Result<Self> {
        AnnualSeries::new(r.label, r.unit, r.points)
    }
}

pub fn serialize_series<S: Serializer>(series: &AnnualSeries, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    SeriesRecord::from(series).serialize(serializer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown output format '{other}' (expected csv or json)"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    series: Vec<SeriesRecord>,
    reports: Vec<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    series: Vec<String>,
}

/// File name used for a series label: anything outside `[A-Za-z0-9_.-]` becomes `_`.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.') { c } else { '_' })
        .collect()
}

/// Formats a value with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes `series` and `reports` under the directory `dir`.
///
/// CSV: one `<label>.csv` per series plus a manifest recording their order,
/// and `reports.json` when there are reports. JSON: a single `outputs.json`.
/// Returns the paths written, in order.
pub fn write_outputs(
    series: &[AnnualSeries],
    reports: &[serde_json::Value],
    format: OutputFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    match format {
        OutputFormat::Json => {
            let doc = JsonDocument {
                series: series.iter().map(SeriesRecord::from).collect(),
                reports: reports.to_vec(),
            };
            let path = dir.join(JSON_OUTPUT_FILE);
            write_file(&path, &to_json_bytes(&doc)?)?;
            written.push(path);
        }
        OutputFormat::Csv => {
            let mut names = Vec::with_capacity(series.len());
            for s in series {
                let name = format!("{}.csv", file_stem(s.label()));
                if names.contains(&name) {
                    return Err(Error::InvalidInput(format!("two series would both be written to {name}")));
                }
                let path = dir.join(&name);
                write_file(&path, &series_csv_bytes(s)?)?;
                written.push(path);
                names.push(name);
            }
            let path = dir.join(MANIFEST_FILE);
            write_file(&path, &to_json_bytes(&Manifest { series: names })?)?;
            written.push(path);
            if !reports.is_empty() {
                let path = dir.join(REPORTS_FILE);
                write_file(&path, &to_json_bytes(&reports)?)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

fn series_csv_bytes(series: &AnnualSeries) -> Result<Vec<u8>> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let unit = series.unit().to_string();
    let wrap = |e: csv::Error| Error::Csv {
        path: PathBuf::from(series.label()),
        source: e,
    };
    writer.write_record(CSV_HEADER).map_err(wrap)?;
    for &(year, value) in series.points() {
        writer
            .write_record([year.to_string().as_str(), &format_value(value), &unit, series.label()])
            .map_err(wrap)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("flushing '{}': {e}", series.label())))
}

/// Reads one `year,value,unit,label` file back into a series.
pub fn read_series_csv(path: &Path) -> Result<AnnualSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut meta: Option<(String, String)> = None;
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        let year: Year = record[0].parse().map_err(|_| bad(format!("bad year '{}'", &record[0])))?;
        let value: f64 = record[1].parse().map_err(|_| bad(format!("bad value '{}'", &record[1])))?;
        let row_meta = (record[2].to_string(), record[3].to_string());
        match &meta {
            None => meta = Some(row_meta),
            Some(m) if *m != row_meta => return Err(bad("unit or label changes within one file".into())),
            Some(_) => {}
        }
        points.push((year, value));
    }
    let (unit, label) = meta.ok_or_else(|| Error::InvalidInput(format!("{}: no rows", path.display())))?;
    AnnualSeries::new(label, unit.parse()?, points)
}

/// Reads back everything [`write_outputs`] wrote to `dir` in either format.
pub fn read_outputs(dir: &Path) -> Result<(Vec<AnnualSeries>, Vec<serde_json::Value>)> {
    let json_path = dir.join(JSON_OUTPUT_FILE);
    if json_path.exists() {
        let bytes = fs::read(&json_path).map_err(|e| Error::io(&json_path, e))?;
        let doc: JsonDocument = serde_json::from_slice(&bytes)?;
        let series = doc.series.into_iter().map(AnnualSeries::try_from).collect::<Result<_>>()?;
        return Ok((series, doc.reports));
    }
    let manifest_path = dir.join(MANIFEST_FILE);
    let bytes = fs::read(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: Manifest = serde_json::from_slice(&bytes)?;
    let series = manifest
        .series
        .iter()
        .map(|name| read_series_csv(&dir.join(name)))
        .collect::<Result<_>>()?;
    let reports_path = dir.join(REPORTS_FILE);
    let reports = if reports_path.exists() {
        let bytes = fs::read(&reports_path).map_err(|e| Error::io(&reports_path, e))?;
        serde_json::from_slice(&bytes)?
    } else {
        Vec::new()
    };
    Ok((series, reports))
}
