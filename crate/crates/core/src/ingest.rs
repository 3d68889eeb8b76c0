//! Maddison-style tables: wide CSV (one column per entity) and long CSV
//! (`entity,year,gdp_millions`), plus aggregation into regional series.
//!
//! Values are kept in the source unit (millions of 1990 GK$) until
//! [`to_billions`] is applied.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Observation, TimeSeries};

pub const LONG_HEADER: [&str; 3] = ["entity", "year", "gdp_millions"];

/// Entity name to series, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    entities: IndexMap<String, TimeSeries>,
}

fn normalize_name(name: &str) -> String {
    name.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, series: TimeSeries) -> Result<()> {
        let name = name.into();
        if self.entities.contains_key(&name) {
            return Err(Error::DuplicateEntity(name));
        }
        self.entities.insert(name, series);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entities.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &TimeSeries)> {
        self.entities.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Looks up an entity by exact name, then by case- and whitespace-insensitive name.
    pub fn get(&self, name: &str) -> Option<&TimeSeries> {
        if let Some(ts) = self.entities.get(name) {
            return Some(ts);
        }
        let wanted = normalize_name(name);
        self.entities
            .iter()
            .find(|(k, _)| normalize_name(k) == wanted)
            .map(|(_, v)| v)
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn records(text: &str) -> Result<Vec<csv::StringRecord>> {
    reader(text)
        .records()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Parse {
                row: i + 1,
                column: 0,
                message: e.to_string(),
            })
        })
        .collect()
}

fn parse_year(cell: &str, row: usize, column: usize) -> Result<i32> {
    match cell.trim().parse::<i32>() {
        Ok(y) if y >= 1 => Ok(y),
        _ => Err(Error::Parse {
            row,
            column,
            message: format!("{cell:?} is not a year label (integer >= 1)"),
        }),
    }
}

fn parse_value(cell: &str, row: usize, column: usize) -> Result<f64> {
    match cell.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(Error::Parse {
            row,
            column,
            message: format!("GDP value {v} is not positive"),
        }),
        Err(_) => Err(Error::Parse {
            row,
            column,
            message: format!("{cell:?} is not numeric"),
        }),
    }
}

fn is_blank(rec: &csv::StringRecord) -> bool {
    rec.iter().all(|c| c.trim().is_empty())
}

fn into_dataset(columns: Vec<(String, Vec<Observation>)>) -> Result<Dataset> {
    let mut ds = Dataset::new();
    for (name, mut points) in columns {
        if points.is_empty() {
            continue;
        }
        points.sort_by_key(|p| p.year);
        ds.insert(name, TimeSeries::new(points)?)?;
    }
    Ok(ds)
}

/// Parses the wide layout: row `header_row` (0-based) holds entity names,
/// column 0 holds year labels, empty cells are missing observations.
///
/// Rows above the header and fully blank rows are skipped. Columns with an
/// empty header cell are ignored. Positions in errors are 1-based.
pub fn parse_wide_csv(text: &str, header_row: usize) -> Result<Dataset> {
    let rows = records(text)?;
    let header = rows.get(header_row).ok_or_else(|| Error::Parse {
        row: header_row + 1,
        column: 0,
        message: "missing header row".into(),
    })?;

    let mut columns: Vec<(usize, String, Vec<Observation>)> = Vec::new();
    for (col, name) in header.iter().enumerate().skip(1) {
        let name = name.trim();
        if name.is_empty() {
            continue;
        }
        if columns.iter().any(|(_, n, _)| n == name) {
            return Err(Error::DuplicateEntity(name.to_string()));
        }
        columns.push((col, name.to_string(), Vec::new()));
    }

    let mut seen_years = std::collections::HashSet::new();
    for (i, rec) in rows.iter().enumerate().skip(header_row + 1) {
        let row = i + 1;
        if is_blank(rec) {
            continue;
        }
        let year = parse_year(rec.get(0).unwrap_or(""), row, 1)?;
        if !seen_years.insert(year) {
            return Err(Error::DuplicateYear { year, row });
        }
        for (col, _, points) in columns.iter_mut() {
            let cell = rec.get(*col).unwrap_or("").trim();
            if cell.is_empty() {
                continue;
            }
            points.push(Observation::new(year, parse_value(cell, row, *col + 1)?));
        }
    }
    into_dataset(columns.into_iter().map(|(_, n, p)| (n, p)).collect())
}

/// Parses the long layout `entity,year,gdp_millions`; the header is at `header_row`.
/// Rows with an empty value are missing observations.
pub fn parse_long_csv(text: &str, header_row: usize) -> Result<Dataset> {
    let rows = records(text)?;
    match rows.get(header_row) {
        Some(h) if is_long_header(h) => {}
        _ => {
            return Err(Error::Parse {
                row: header_row + 1,
                column: 1,
                message: format!("expected header {}", LONG_HEADER.join(",")),
            })
        }
    }
    let mut columns: IndexMap<String, Vec<Observation>> = IndexMap::new();
    let mut seen = std::collections::HashSet::new();
    for (i, rec) in rows.iter().enumerate().skip(header_row + 1) {
        let row = i + 1;
        if is_blank(rec) {
            continue;
        }
        let entity = rec.get(0).unwrap_or("").trim();
        if entity.is_empty() {
            return Err(Error::Parse {
                row,
                column: 1,
                message: "empty entity name".into(),
            });
        }
        let year = parse_year(rec.get(1).unwrap_or(""), row, 2)?;
        if !seen.insert((entity.to_string(), year)) {
            return Err(Error::DuplicateYear { year, row });
        }
        let points = columns.entry(entity.to_string()).or_default();
        let cell = rec.get(2).unwrap_or("").trim();
        if !cell.is_empty() {
            points.push(Observation::new(year, parse_value(cell, row, 3)?));
        }
    }
    into_dataset(columns.into_iter().collect())
}

fn is_long_header(rec: &csv::StringRecord) -> bool {
    rec.len() >= 3
        && rec
            .iter()
            .take(3)
            .zip(LONG_HEADER)
            .all(|(c, h)| c.trim().eq_ignore_ascii_case(h))
}

/// Parses either layout, choosing long when the header row matches [`LONG_HEADER`].
pub fn parse_document(text: &str, header_row: usize) -> Result<Dataset> {
    let rows = records(text)?;
    if rows.get(header_row).is_some_and(is_long_header) {
        parse_long_csv(text, header_row)
    } else {
        parse_wide_csv(text, header_row)
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .flexible(false)
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 input")
}

/// Writes the wide layout: header `year,<entities...>`, one row per year in the union of years.
pub fn write_wide_csv(ds: &Dataset) -> String {
    let mut years: Vec<i32> = ds.iter().flat_map(|(_, ts)| ts.years()).collect();
    years.sort_unstable();
    years.dedup();

    let mut w = writer();
    let mut header = vec!["year".to_string()];
    header.extend(ds.names().map(str::to_string));
    w.write_record(&header).expect("in-memory write");
    for year in years {
        let mut row = vec![year.to_string()];
        row.extend(
            ds.iter()
                .map(|(_, ts)| ts.value_at(year).map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

/// Writes the long layout, entities in dataset order.
pub fn write_long_csv(ds: &Dataset) -> String {
    let mut w = writer();
    w.write_record(LONG_HEADER).expect("in-memory write");
    for (name, ts) in ds.iter() {
        for p in ts.points() {
            w.write_record([name, &p.year.to_string(), &p.value.to_string()])
                .expect("in-memory write");
        }
    }
    finish(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMode {
    SumMembers,
    UsePrebuiltTotal,
}

/// A named group of entities and how to combine them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub name: String,
    pub members: Vec<String>,
    pub mode: AggregationMode,
}

impl RegionSpec {
    pub fn sum(
        name: impl Into<String>,
        members: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        Self {
            name: name.into(),
            members: members.into_iter().map(Into::into).collect(),
            mode: AggregationMode::SumMembers,
        }
    }

    pub fn prebuilt(name: impl Into<String>, total: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            members: vec![total.into()],
            mode: AggregationMode::UsePrebuiltTotal,
        }
    }
}

/// Combines the members of `spec` into one series.
///
/// `SumMembers` keeps only years present for every member and sums values in
/// ascending order, so the result does not depend on member order.
pub fn aggregate(ds: &Dataset, spec: &RegionSpec) -> Result<TimeSeries> {
    let resolve = |name: &String| {
        ds.get(name)
            .ok_or_else(|| Error::UnknownEntity(name.clone()))
    };
    match spec.mode {
        AggregationMode::UsePrebuiltTotal => {
            let [total] = spec.members.as_slice() else {
                return Err(Error::InvalidParams(format!(
                    "region {:?} must name exactly one prebuilt total",
                    spec.name
                )));
            };
            resolve(total).cloned()
        }
        AggregationMode::SumMembers => {
            if spec.members.is_empty() {
                return Err(Error::InvalidParams(format!(
                    "region {:?} has no members",
                    spec.name
                )));
            }
            let series = spec
                .members
                .iter()
                .map(resolve)
                .collect::<Result<Vec<_>>>()?;
            let mut points = Vec::new();
            let mut values = Vec::with_capacity(series.len());
            for year in series[0].years() {
                values.clear();
                for ts in &series {
                    match ts.value_at(year) {
                        Some(v) => values.push(v),
                        None => break,
                    }
                }
                if values.len() == series.len() {
                    values.sort_by(f64::total_cmp);
                    points.push(Observation::new(year, values.iter().sum()));
                }
            }
            if points.is_empty() {
                return Err(Error::EmptyResult(spec.name.clone()));
            }
            TimeSeries::new(points)
        }
    }
}

/// Millions to billions.
pub fn to_billions(ts: &TimeSeries) -> TimeSeries {
    ts.map_values(|v| v / 1000.0)
}

/// Billions to millions.
pub fn to_millions(ts: &TimeSeries) -> TimeSeries {
    ts.map_values(|v| v * 1000.0)
}
