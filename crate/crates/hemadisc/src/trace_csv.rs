//! Plot-ready optimizer traces: `iteration,best_fitness,hmcr,par`.
//!
//! Row 0 holds the best fitness of the initial memory (or population) with
//! empty rate cells; the GA leaves the rate cells empty throughout.

use std::path::Path;

use hemadisc_core::hs::Trace;

use crate::atomic;
use crate::error::Result;

pub const HEADER: [&str; 4] = ["iteration", "best_fitness", "hmcr", "par"];

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn to_trace_string(trace: &Trace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut write = |row: [String; 4]| w.write_record(&row).expect("writing to memory cannot fail");
    write(HEADER.map(String::from));
    write(["0".into(), trace.initial_best.to_string(), String::new(), String::new()]);
    for r in &trace.records {
        write([r.iteration.to_string(), r.best_fitness.to_string(), cell(r.hmcr), cell(r.par)]);
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV output is UTF-8")
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    atomic::write_bytes(path, to_trace_string(trace).as_bytes())
}
