//! Cohort CSV files.
//!
//! One header row, comma separated. Mandatory columns `RBC,Hb,HCT,MCV,MCH,MCHC`
//! and optional `RDW`, `label` (`IDA`/`BTT`/`NORMAL`) and `class`
//! (`I`/`II`/`III`), matched case-insensitively in any order. Other columns
//! are ignored. Empty optional cells mean "absent".

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use hemadisc_core::data::DataError;
use hemadisc_core::{CbcIndex, CbcSample, ClassTag, Cohort, Label};

use crate::atomic;

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed CSV: {0}")]
    Parse(#[from] csv::Error),
    #[error("missing mandatory column {0}")]
    MissingColumn(&'static str),
    #[error("column {0} appears twice")]
    DuplicateColumn(String),
    #[error("row {row}, column {column}: {value:?} is not a number")]
    BadNumber { row: usize, column: &'static str, value: String },
    #[error("row {row}, column {column}: {source}")]
    BadToken { row: usize, column: &'static str, source: DataError },
    #[error("row {row}: {source}")]
    InvalidSample { row: usize, source: DataError },
    #[error("empty cohort")]
    EmptyCohort,
}

const OPTIONAL: [&str; 3] = ["RDW", "label", "class"];

struct Layout {
    indices: [usize; 6],
    rdw: Option<usize>,
    label: Option<usize>,
    class: Option<usize>,
}

fn layout(header: &csv::StringRecord) -> Result<Layout, CsvError> {
    let find = |name: &str| -> Result<Option<usize>, CsvError> {
        let mut hits = header.iter().enumerate().filter(|(_, h)| h.trim().eq_ignore_ascii_case(name));
        let first = hits.next().map(|(i, _)| i);
        if hits.next().is_some() {
            return Err(CsvError::DuplicateColumn(name.into()));
        }
        Ok(first)
    };
    let mut indices = [0; 6];
    for (slot, idx) in indices.iter_mut().zip(CbcIndex::ALL) {
        *slot = find(idx.name())?.ok_or(CsvError::MissingColumn(idx.name()))?;
    }
    let [rdw, label, class] = OPTIONAL.map(find);
    Ok(Layout { indices, rdw: rdw?, label: label?, class: class? })
}

fn number(row: usize, column: &'static str, cell: &str) -> Result<f64, CsvError> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| CsvError::BadNumber { row, column, value: cell.into() })
}

fn optional(record: &csv::StringRecord, at: Option<usize>) -> Option<&str> {
    at.and_then(|i| record.get(i)).map(str::trim).filter(|c| !c.is_empty())
}

/// Parses a cohort; `source` becomes the cohort's provenance text.
pub fn read_cohort<R: Read>(reader: R, source: &str) -> Result<Cohort, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(false).from_reader(reader);
    let lay = layout(rdr.headers()?)?;
    let mut samples = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let row = k + 1;
        let mut values = [0.0; 6];
        for ((v, &col), idx) in values.iter_mut().zip(&lay.indices).zip(CbcIndex::ALL) {
            *v = number(row, idx.name(), record.get(col).unwrap_or(""))?;
        }
        let rdw = optional(&record, lay.rdw).map(|c| number(row, "RDW", c)).transpose()?;
        let label = optional(&record, lay.label)
            .map(|c| c.parse::<Label>())
            .transpose()
            .map_err(|source| CsvError::BadToken { row, column: "label", source })?;
        let class = optional(&record, lay.class)
            .map(|c| c.parse::<ClassTag>())
            .transpose()
            .map_err(|source| CsvError::BadToken { row, column: "class", source })?;
        samples.push(CbcSample::new(values, rdw, label, class).map_err(|source| CsvError::InvalidSample { row, source })?);
    }
    if samples.is_empty() {
        return Err(CsvError::EmptyCohort);
    }
    Cohort::new(samples, source).map_err(|_| CsvError::EmptyCohort)
}

pub fn load_csv(path: &Path) -> Result<Cohort, CsvError> {
    let file = std::fs::File::open(path).map_err(|source| CsvError::Io { path: path.into(), source })?;
    read_cohort(std::io::BufReader::new(file), &path.display().to_string())
}

/// Writes the mandatory columns plus each optional column that at least one
/// sample carries. Numbers use the shortest representation that reads back
/// exactly.
pub fn write_cohort<W: Write>(cohort: &Cohort, writer: W) -> Result<(), CsvError> {
    let has_rdw = cohort.iter().any(|s| s.rdw().is_some());
    let has_label = cohort.iter().any(|s| s.label().is_some());
    let has_class = cohort.iter().any(|s| s.class_tag().is_some());
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = CbcIndex::ALL.iter().map(|i| i.name()).collect();
    for (present, name) in [(has_rdw, "RDW"), (has_label, "label"), (has_class, "class")] {
        if present {
            header.push(name);
        }
    }
    w.write_record(&header)?;
    for s in cohort {
        let mut row: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
        if has_rdw {
            row.push(s.rdw().map(|v| v.to_string()).unwrap_or_default());
        }
        if has_label {
            row.push(s.label().map(|l| l.token().to_string()).unwrap_or_default());
        }
        if has_class {
            row.push(s.class_tag().map(|c| c.token().to_string()).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| CsvError::Io { path: PathBuf::from("<writer>"), source })?;
    Ok(())
}

pub fn to_csv_string(cohort: &Cohort) -> String {
    let mut buf = Vec::new();
    write_cohort(cohort, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

pub fn write_csv(cohort: &Cohort, path: &Path) -> crate::error::Result<()> {
    atomic::write_bytes(path, to_csv_string(cohort).as_bytes())
}
