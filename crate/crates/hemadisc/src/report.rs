//! Metric tables, as aligned text and as CSV.

use std::fmt::Write as _;

use hemadisc_core::metrics::{report, METRIC_NAMES};
use hemadisc_core::ConfusionMatrix;

pub const CSV_HEADER: [&str; 11] = ["method", "tp", "tn", "fp", "fn", "sens", "spec", "ppv", "npv", "acc", "yi"];

/// One method's outcome; `None` when the method could not be applied.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub confusion: Option<ConfusionMatrix>,
}

impl ReportRow {
    pub fn new(method: impl Into<String>, confusion: ConfusionMatrix) -> Self {
        Self { method: method.into(), confusion: Some(confusion) }
    }

    pub fn unavailable(method: impl Into<String>) -> Self {
        Self { method: method.into(), confusion: None }
    }

    fn cells(&self) -> [String; 11] {
        let na = || "n/a".to_string();
        let mut out: [String; 11] = std::array::from_fn(|_| na());
        out[0] = self.method.clone();
        if let Some(cm) = self.confusion {
            let counts = [cm.true_positive, cm.true_negative, cm.false_positive, cm.false_negative];
            for (o, c) in out[1..5].iter_mut().zip(counts) {
                *o = c.to_string();
            }
            for (o, v) in out[5..].iter_mut().zip(report(&cm).rounded()) {
                *o = v.map_or_else(na, |x| format!("{x:.1}"));
            }
        }
        out
    }
}

pub fn to_text(rows: &[ReportRow]) -> String {
    let mut header = CSV_HEADER.map(str::to_uppercase);
    header[0] = "Method".into();
    for (h, name) in header[5..].iter_mut().zip(METRIC_NAMES) {
        *h = name.to_uppercase();
    }
    let table: Vec<[String; 11]> = std::iter::once(header).chain(rows.iter().map(ReportRow::cells)).collect();
    let widths: Vec<usize> = (0..11).map(|c| table.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for row in &table {
        let _ = write!(s, "{:<w$}", row[0], w = widths[0]);
        for (c, w) in row[1..].iter().zip(&widths[1..]) {
            let _ = write!(s, "  {c:>w$}");
        }
        s.push('\n');
    }
    s
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory cannot fail");
    for r in rows {
        w.write_record(r.cells()).expect("writing to memory cannot fail");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}
