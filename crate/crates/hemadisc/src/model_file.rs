//! Trained-model files.
//!
//! Line-oriented `key=value` text. Floating-point fields carry 17 significant
//! digits so every value reads back bit-exact. The final line is
//! `checksum=sha256:<hex>` over all preceding bytes.

use std::collections::HashMap;
use std::path::Path;

use hemadisc_core::discriminator::{Calibration, InputScaling, MinMax, OptimizerKind, Provenance};
use hemadisc_core::poly_tree::{TreeGenome, COEFFICIENT_COUNT};
use hemadisc_core::{CbcIndex, TrainedModel};
use sha2::{Digest, Sha256};

use crate::atomic;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelFileError {
    #[error("unsupported model format_version {found:?} (expected {FORMAT_VERSION})")]
    Version { found: String },
    #[error("model file is missing field {0}")]
    MissingField(String),
    #[error("line {line}: unknown field {key:?}")]
    UnknownField { line: usize, key: String },
    #[error("line {line}: field {key} appears twice")]
    DuplicateField { line: usize, key: String },
    #[error("line {line}: expected key=value")]
    MalformedLine { line: usize },
    #[error("field {field}: cannot parse {value:?}")]
    Malformed { field: String, value: String },
    #[error("checksum must be the last line")]
    ChecksumPlacement,
    #[error("checksum mismatch: file says {stated}, content hashes to {actual}")]
    Checksum { stated: String, actual: String },
    #[error("invalid model: {0}")]
    Invalid(String),
}

fn field_names() -> Vec<String> {
    let mut names: Vec<String> = ["format_version", "optimizer", "scheme_id"].map(String::from).into();
    names.extend((0..COEFFICIENT_COUNT).map(|k| format!("coef_{k}")));
    names.extend(["threshold", "ida_above", "selected"].map(String::from));
    names.extend((0..4).map(|k| format!("scale_min_{k}")));
    names.extend((0..4).map(|k| format!("scale_max_{k}")));
    names.extend(["seed", "improvisations", "hms", "final_fitness", "checksum"].map(String::from));
    names
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

pub fn to_model_string(model: &TrainedModel) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    let p = model.provenance();
    put("format_version", FORMAT_VERSION.to_string());
    put("optimizer", p.optimizer.token().into());
    put("scheme_id", model.genome().scheme().id().to_string());
    for (k, c) in model.genome().coefficients().iter().enumerate() {
        put(&format!("coef_{k}"), float(*c));
    }
    put("threshold", float(model.threshold()));
    put("ida_above", model.ida_above().to_string());
    let selected: Vec<&str> = model.selected_indices().iter().map(|i| i.name()).collect();
    put("selected", selected.join(","));
    let ranges = model.scaling().ranges();
    for (k, r) in ranges.iter().enumerate() {
        put(&format!("scale_min_{k}"), float(r.min));
    }
    for (k, r) in ranges.iter().enumerate() {
        put(&format!("scale_max_{k}"), float(r.max));
    }
    put("seed", p.seed.to_string());
    put("improvisations", p.iterations.to_string());
    put("hms", p.memory_size.to_string());
    put("final_fitness", float(p.final_fitness));
    let sum = digest(out.as_bytes());
    out.push_str("checksum=");
    out.push_str(&sum);
    out.push('\n');
    out
}

struct Fields<'a>(HashMap<&'a str, &'a str>);

impl Fields<'_> {
    fn raw(&self, key: &str) -> &str {
        self.0[key]
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, ModelFileError> {
        let v = self.raw(key);
        v.parse().map_err(|_| ModelFileError::Malformed { field: key.into(), value: v.into() })
    }
}

pub fn parse_model(text: &str) -> Result<TrainedModel, ModelFileError> {
    let mut pairs = Vec::new();
    let mut offset = 0;
    let mut checksum_at = None;
    for (n, line) in text.split_inclusive('\n').enumerate() {
        let start = offset;
        offset += line.len();
        let body = line.trim_end_matches(['\n', '\r']);
        if body.trim().is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or(ModelFileError::MalformedLine { line: n + 1 })?;
        let k = k.trim();
        if k == "checksum" {
            checksum_at = Some(start);
        } else if checksum_at.is_some() {
            return Err(ModelFileError::ChecksumPlacement);
        }
        pairs.push((n + 1, k, v.trim()));
    }

    match pairs.iter().find(|(_, k, _)| *k == "format_version") {
        Some((_, _, v)) if v.parse::<u32>() == Ok(FORMAT_VERSION) => {}
        Some((_, _, v)) => return Err(ModelFileError::Version { found: (*v).into() }),
        None => return Err(ModelFileError::MissingField("format_version".into())),
    }

    let names = field_names();
    let mut map = HashMap::new();
    for &(line, k, v) in &pairs {
        if !names.iter().any(|n| n == k) {
            return Err(ModelFileError::UnknownField { line, key: k.into() });
        }
        if map.insert(k, v).is_some() {
            return Err(ModelFileError::DuplicateField { line, key: k.into() });
        }
    }
    if let Some(missing) = names.iter().find(|n| !map.contains_key(n.as_str())) {
        return Err(ModelFileError::MissingField(missing.clone()));
    }

    let stated = map["checksum"];
    let actual = digest(&text.as_bytes()[..checksum_at.unwrap_or(0)]);
    if stated != actual {
        return Err(ModelFileError::Checksum { stated: stated.into(), actual });
    }

    let f = Fields(map);
    let invalid = |e: &dyn std::fmt::Display| ModelFileError::Invalid(e.to_string());
    let mut coefficients = [0.0; COEFFICIENT_COUNT];
    for (k, c) in coefficients.iter_mut().enumerate() {
        *c = f.parse(&format!("coef_{k}"))?;
    }
    let genome = TreeGenome::new(f.parse("scheme_id")?, coefficients).map_err(|e| invalid(&e))?;

    let names: Vec<&str> = f.raw("selected").split(',').collect();
    if names.len() != 4 {
        return Err(ModelFileError::Malformed { field: "selected".into(), value: f.raw("selected").into() });
    }
    let mut inputs = [CbcIndex::Rbc; 4];
    for (slot, name) in inputs.iter_mut().zip(&names) {
        *slot = name
            .parse()
            .map_err(|_| ModelFileError::Malformed { field: "selected".into(), value: f.raw("selected").into() })?;
    }
    let mut ranges = [MinMax { min: 0.0, max: 0.0 }; 4];
    for (k, r) in ranges.iter_mut().enumerate() {
        r.min = f.parse(&format!("scale_min_{k}"))?;
        r.max = f.parse(&format!("scale_max_{k}"))?;
    }
    let scaling = InputScaling::new(inputs, ranges).map_err(|e| invalid(&e))?;

    let calibration = Calibration { threshold: f.parse("threshold")?, ida_above: f.parse("ida_above")? };
    if !calibration.threshold.is_finite() {
        return Err(invalid(&"threshold is not finite"));
    }
    let optimizer: OptimizerKind = f
        .raw("optimizer")
        .parse()
        .map_err(|_| ModelFileError::Malformed { field: "optimizer".into(), value: f.raw("optimizer").into() })?;
    let provenance = Provenance {
        optimizer,
        seed: f.parse("seed")?,
        iterations: f.parse("improvisations")?,
        memory_size: f.parse("hms")?,
        final_fitness: f.parse("final_fitness")?,
    };
    Ok(TrainedModel::new(genome, scaling, calibration, provenance))
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    atomic::write_bytes(path, to_model_string(model).as_bytes())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_model(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_model() -> TrainedModel {
        let coefficients: [f64; COEFFICIENT_COUNT] = core::array::from_fn(|k| (k as f64 - 8.5) / 3.0 + 1e-17);
        let genome = TreeGenome::new(7, coefficients).unwrap();
        let ranges = [(3.1, 7.9), (7.0, 15.2), (20.0, 47.5), (55.0, 92.0)].map(|(min, max)| MinMax { min, max });
        let scaling = InputScaling::new([CbcIndex::Rbc, CbcIndex::Hb, CbcIndex::Hct, CbcIndex::Mcv], ranges).unwrap();
        let calibration = Calibration { threshold: -0.1 / 3.0, ida_above: false };
        let provenance =
            Provenance { optimizer: OptimizerKind::Dhs, seed: 42, iterations: 8000, memory_size: 100, final_fitness: 2.0 / 7.0 };
        TrainedModel::new(genome, scaling, calibration, provenance)
    }

    #[test]
    fn round_trip_is_exact() {
        let m = sample_model();
        assert_eq!(parse_model(&to_model_string(&m)).unwrap(), m);
    }

    #[test]
    fn file_layout() {
        let text = to_model_string(&sample_model());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "format_version=1");
        assert_eq!(lines[1], "optimizer=dhs");
        assert!(lines.contains(&"selected=RBC,Hb,HCT,MCV"));
        assert!(lines.last().unwrap().starts_with("checksum=sha256:"));
        assert_eq!(lines.len(), field_names().len());
    }

    #[test]
    fn version_is_checked_first() {
        let text = to_model_string(&sample_model()).replace("format_version=1", "format_version=99");
        assert_eq!(parse_model(&text), Err(ModelFileError::Version { found: "99".into() }));
        assert_eq!(parse_model("format_version=99\n"), Err(ModelFileError::Version { found: "99".into() }));
    }

    #[test]
    fn truncation_names_the_missing_field() {
        let text = to_model_string(&sample_model());
        let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert_eq!(parse_model(&cut), Err(ModelFileError::MissingField("coef_7".into())));
        let no_sum: String = text.lines().filter(|l| !l.starts_with("checksum")).map(|l| format!("{l}\n")).collect();
        assert_eq!(parse_model(&no_sum), Err(ModelFileError::MissingField("checksum".into())));
    }

    #[test]
    fn tampering_fails_the_checksum() {
        let text = to_model_string(&sample_model()).replace("seed=42", "seed=43");
        assert!(matches!(parse_model(&text), Err(ModelFileError::Checksum { .. })));
    }

    #[test]
    fn strict_keys() {
        let text = to_model_string(&sample_model());
        let extra = text.replacen("seed=42\n", "seed=42\ncolour=red\n", 1);
        assert!(matches!(parse_model(&extra), Err(ModelFileError::UnknownField { key, .. }) if key == "colour"));
        let dup = text.replacen("seed=42\n", "seed=42\nseed=42\n", 1);
        assert!(matches!(parse_model(&dup), Err(ModelFileError::DuplicateField { .. })));
        let trailing = format!("{text}seed=1\n");
        assert_eq!(parse_model(&trailing), Err(ModelFileError::ChecksumPlacement));
        assert_eq!(parse_model("format_version=1\nnonsense\n"), Err(ModelFileError::MalformedLine { line: 2 }));
    }

    #[test]
    fn malformed_values_are_reported_after_the_checksum() {
        let mut body: String = to_model_string(&sample_model())
            .lines()
            .filter(|l| !l.starts_with("checksum"))
            .map(|l| format!("{l}\n"))
            .collect();
        body = body.replace("ida_above=false", "ida_above=maybe");
        body.push_str(&format!("checksum={}\n", digest(body.as_bytes())));
        assert!(matches!(parse_model(&body), Err(ModelFileError::Malformed { field, .. }) if field == "ida_above"));
    }
}
