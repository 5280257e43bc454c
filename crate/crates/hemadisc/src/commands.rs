//! Subcommand bodies. Each returns the text destined for standard output;
//! files go through [`crate::atomic`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hemadisc_core::baselines::TraditionalIndex;
use hemadisc_core::data::{generate_synthetic_cohort, split, SplitSpec};
use hemadisc_core::discriminator::{self, Optimizer, TrainConfig};
use hemadisc_core::hs::Trace;
use hemadisc_core::metrics::{confusion, ConfusionMatrix};
use hemadisc_core::pbis::{select_indices, SimilarityMatrix};
use hemadisc_core::{CbcIndex, Cohort, Label, TrainedModel};

use crate::atomic;
use crate::cohort_csv::{load_csv, write_csv};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::model_file::{load_model, save_model};
use crate::report::{self, ReportRow};
use crate::trace_csv::write_trace;

pub const MODEL_FILE: &str = "model.txt";
pub const TRACE_FILE: &str = "trace.csv";
pub const CONFIG_FILE: &str = "run.config";
pub const SUMMARY_FILE: &str = "summary.csv";

fn drop_normals(cohort: &Cohort, out: &mut String) -> Result<Cohort> {
    let n = cohort.count_label(Label::Normal);
    if n == 0 {
        return Ok(cohort.clone());
    }
    let _ = writeln!(out, "# note: excluded {n} NORMAL rows");
    Ok(cohort.without_normals()?)
}

fn model_method(model: &TrainedModel) -> String {
    let p = model.provenance();
    format!("{} {}/{}", p.optimizer.token().to_uppercase(), p.iterations, p.memory_size)
}

fn evaluate_rows(model: &TrainedModel, cohort: &Cohort) -> Result<ConfusionMatrix> {
    let truths: Vec<Option<Label>> = cohort.iter().map(|s| s.label()).collect();
    if let Some(pos) = truths.iter().position(|t| *t == Some(Label::Normal)) {
        return Err(hemadisc_core::metrics::MetricsError::NormalTruth(pos).into());
    }
    let predictions = model.predict_all(cohort)?;
    Ok(confusion(&predictions, &truths)?)
}

/// Similarity matrix over all six indices plus the selected subset.
pub fn pbis(cohort_path: &Path, cfg: &RunConfig) -> Result<String> {
    let cohort = load_csv(cohort_path)?;
    let selected = select_indices(&cohort, &CbcIndex::ALL, cfg.k, &cfg.ranges)?;
    let m = SimilarityMatrix::compute(&cohort, &CbcIndex::ALL, &cfg.ranges);
    let mut out = String::new();
    for i in CbcIndex::ALL {
        let _ = write!(out, ",{i}");
    }
    out.push('\n');
    for (a, i) in CbcIndex::ALL.iter().enumerate() {
        out.push_str(i.name());
        for b in 0..m.dim() {
            let _ = write!(out, ",{:.4}", m.get(a, b));
        }
        out.push('\n');
    }
    let names: Vec<&str> = selected.iter().map(|i| i.name()).collect();
    let _ = writeln!(out, "selected={}", names.join(","));
    Ok(out)
}

/// Trains on the cohort (or on its train part when split counts are set)
/// and writes the model, trace and resolved config into `out_dir`.
pub fn train(cohort_path: &Path, cfg: &RunConfig, out_dir: &Path) -> Result<String> {
    let tc = cfg.train_config()?;
    let split_spec = cfg.split_spec()?;
    let mut out = String::new();
    let cohort = drop_normals(&load_csv(cohort_path)?, &mut out)?;
    atomic::create_dir(out_dir)?;
    let train_part = match split_spec {
        Some(spec) => {
            let (tr, te) = split(&cohort, spec)?;
            write_csv(&tr, &out_dir.join("train.csv"))?;
            write_csv(&te, &out_dir.join("test.csv"))?;
            tr
        }
        None => cohort,
    };
    let outcome = discriminator::train(&train_part, &tc)?;
    save_model(&outcome.model, &out_dir.join(MODEL_FILE))?;
    write_trace(&outcome.trace, &out_dir.join(TRACE_FILE))?;
    let stamp = cfg.to_config_string();
    atomic::write_bytes(&out_dir.join(CONFIG_FILE), stamp.as_bytes())?;
    let _ = writeln!(out, "final_fitness={}", outcome.model.provenance().final_fitness);
    let _ = writeln!(out, "scheme={}", outcome.model.genome().scheme());
    out.push_str(&stamp);
    Ok(out)
}

/// One line per sample: `row,output,prediction`.
pub fn predict(model_path: &Path, cohort_path: &Path) -> Result<String> {
    let model = load_model(model_path)?;
    let cohort = load_csv(cohort_path)?;
    let mut out = String::from("row,output,prediction\n");
    for (k, s) in cohort.iter().enumerate() {
        let y = model.output(s)?;
        let _ = writeln!(out, "{},{},{}", k + 1, y, model.calibration().decide(y));
    }
    Ok(out)
}

/// Text report followed by the CSV rows; the CSV also goes to `csv_out`.
pub fn evaluate(model_path: &Path, cohort_path: &Path, csv_out: Option<&Path>) -> Result<String> {
    let model = load_model(model_path)?;
    let cohort = load_csv(cohort_path)?;
    let rows = [ReportRow::new(model_method(&model), evaluate_rows(&model, &cohort)?)];
    emit_report(&rows, csv_out, String::new())
}

fn emit_report(rows: &[ReportRow], csv_out: Option<&Path>, mut out: String) -> Result<String> {
    let csv = report::to_csv(rows);
    if let Some(p) = csv_out {
        atomic::write_bytes(p, csv.as_bytes())?;
    }
    out.push_str(&report::to_text(rows));
    out.push('\n');
    out.push_str(&csv);
    Ok(out)
}

/// The seven index formulas, plus the model when given. Formulas that need
/// RDW are reported as unavailable unless every sample has it.
pub fn baselines(cohort_path: &Path, model_path: Option<&Path>, csv_out: Option<&Path>) -> Result<String> {
    let mut out = String::new();
    let cohort = drop_normals(&load_csv(cohort_path)?, &mut out)?;
    let truths: Vec<Option<Label>> = cohort.iter().map(|s| s.label()).collect();
    let has_rdw = cohort.iter().all(|s| s.rdw().is_some());
    let mut rows = Vec::new();
    for idx in TraditionalIndex::ALL {
        if idx.needs_rdw() && !has_rdw {
            let _ = writeln!(out, "# note: {} needs RDW for every sample; unavailable", idx.symbol());
            rows.push(ReportRow::unavailable(idx.symbol()));
            continue;
        }
        let predictions = cohort.iter().map(|s| idx.classify(s)).collect::<Result<Vec<_>, _>>()?;
        rows.push(ReportRow::new(idx.symbol(), confusion(&predictions, &truths)?));
    }
    if let Some(p) = model_path {
        let model = load_model(p)?;
        rows.push(ReportRow::new(model_method(&model), evaluate_rows(&model, &cohort)?));
    }
    emit_report(&rows, csv_out, out)
}

pub fn synth(n_ida: usize, n_btt: usize, seed: u64, out: &Path) -> Result<String> {
    let cohort = generate_synthetic_cohort(n_ida, n_btt, seed)?;
    write_csv(&cohort, out)?;
    Ok(format!("wrote {} samples to {}\n", cohort.len(), out.display()))
}

pub fn split_cohort(cohort_path: &Path, spec: SplitSpec, out_dir: &Path) -> Result<String> {
    let mut out = String::new();
    let cohort = drop_normals(&load_csv(cohort_path)?, &mut out)?;
    let (tr, te) = split(&cohort, spec)?;
    atomic::create_dir(out_dir)?;
    write_csv(&tr, &out_dir.join("train.csv"))?;
    write_csv(&te, &out_dir.join("test.csv"))?;
    let _ = writeln!(out, "train={} test={}", tr.len(), te.len());
    Ok(out)
}

/// Per-seed result of [`compare_hs`].
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub seed: u64,
    pub hs: Trace,
    pub dhs: Trace,
}

/// Paired standard-HS and dynamic-HS runs, one pair per seed, in parallel.
pub fn compare_traces(cohort: &Cohort, cfg: &RunConfig, seeds: &[u64]) -> Result<Vec<Comparison>> {
    let base = cfg.train_config()?;
    let run = |seed: u64, dynamic: bool| -> Result<Trace> {
        let p = cfg.hs_params(dynamic).with_seed(seed);
        let tc = TrainConfig { optimizer: Optimizer::Hs(p), ..base.clone() };
        Ok(discriminator::train(cohort, &tc)?.trace)
    };
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let run = &run;
                scope.spawn(move || -> Result<Comparison> { Ok(Comparison { seed, hs: run(seed, false)?, dhs: run(seed, true)? }) })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("comparison thread panicked")).collect()
    })
}

pub fn median(values: &mut [usize]) -> f64 {
    values.sort_unstable();
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2] as f64
    } else {
        (values[n / 2 - 1] + values[n / 2]) as f64 / 2.0
    }
}

pub const FRACTION: f64 = 0.95;

pub fn compare_hs(cohort_path: &Path, cfg: &RunConfig, seeds: &[u64], out_dir: &Path) -> Result<String> {
    if seeds.is_empty() {
        return Err(Error::Usage("compare-hs needs at least one seed".into()));
    }
    let mut out = String::new();
    let cohort = drop_normals(&load_csv(cohort_path)?, &mut out)?;
    let cohort = match cfg.split_spec()? {
        Some(spec) => split(&cohort, spec)?.0,
        None => cohort,
    };
    let results = compare_traces(&cohort, cfg, seeds)?;
    atomic::create_dir(out_dir)?;
    let mut summary = String::from("seed,hs,dhs\n");
    let (mut hs, mut dhs) = (Vec::new(), Vec::new());
    for c in &results {
        write_trace(&c.hs, &trace_path(out_dir, "hs", c.seed))?;
        write_trace(&c.dhs, &trace_path(out_dir, "dhs", c.seed))?;
        let (a, b) = (c.hs.iterations_to_fraction(FRACTION), c.dhs.iterations_to_fraction(FRACTION));
        let _ = writeln!(summary, "{},{a},{b}", c.seed);
        hs.push(a);
        dhs.push(b);
    }
    atomic::write_bytes(&out_dir.join(SUMMARY_FILE), summary.as_bytes())?;
    atomic::write_bytes(&out_dir.join(CONFIG_FILE), cfg.to_config_string().as_bytes())?;
    out.push_str(&summary);
    let _ = writeln!(out, "median,{},{}", median(&mut hs), median(&mut dhs));
    Ok(out)
}

pub fn trace_path(dir: &Path, variant: &str, seed: u64) -> PathBuf {
    dir.join(format!("{variant}_seed{seed}.csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3, 1, 2]), 2.0);
        assert_eq!(median(&mut [4, 1, 3, 2]), 2.5);
        assert!(median(&mut []).is_nan());
    }
}
