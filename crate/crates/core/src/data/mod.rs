//! CBC samples, normal ranges, cohorts and seeded train/test splitting.

mod fixture;
mod synthetic;

pub use fixture::table2_fixture;
pub use synthetic::{class_profile, generate_synthetic_cohort, ClassProfile};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DataError {
    #[error("{field} must be finite and strictly positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("label {label} is inconsistent with class {class}")]
    LabelClassMismatch { label: Label, class: ClassTag },
    #[error("empty cohort")]
    EmptyCohort,
    #[error("split needs {requested} samples but the cohort has {available}")]
    SplitTooLarge { requested: usize, available: usize },
    #[error("split counts must both be at least 1")]
    EmptySplitPart,
    #[error("normal range for {index} needs low < high, got ({low}, {high})")]
    InvalidRange { index: CbcIndex, low: f64, high: f64 },
    #[error("sample count must be at least 1")]
    ZeroCount,
    #[error("unknown {kind} token {token:?}")]
    UnknownToken { kind: &'static str, token: String },
}

/// The six CBC indices that every sample carries, in canonical order.
///
/// The canonical order doubles as the tie-break order for index selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CbcIndex {
    Rbc,
    Hb,
    Hct,
    Mcv,
    Mch,
    Mchc,
}

impl CbcIndex {
    pub const ALL: [CbcIndex; 6] = [
        CbcIndex::Rbc,
        CbcIndex::Hb,
        CbcIndex::Hct,
        CbcIndex::Mcv,
        CbcIndex::Mch,
        CbcIndex::Mchc,
    ];

    pub const fn position(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            CbcIndex::Rbc => "RBC",
            CbcIndex::Hb => "Hb",
            CbcIndex::Hct => "HCT",
            CbcIndex::Mcv => "MCV",
            CbcIndex::Mch => "MCH",
            CbcIndex::Mchc => "MCHC",
        }
    }
}

impl fmt::Display for CbcIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CbcIndex {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        CbcIndex::ALL
            .into_iter()
            .find(|i| i.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| DataError::UnknownToken { kind: "index", token: t.into() })
    }
}

/// Ground-truth label of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Ida,
    Btt,
    Normal,
}

impl Label {
    pub const fn token(self) -> &'static str {
        match self {
            Label::Ida => "IDA",
            Label::Btt => "BTT",
            Label::Normal => "NORMAL",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Label {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "IDA" => Ok(Label::Ida),
            "BTT" => Ok(Label::Btt),
            "NORMAL" => Ok(Label::Normal),
            other => Err(DataError::UnknownToken { kind: "label", token: other.into() }),
        }
    }
}

/// Output of a binary IDA / β-TT classifier. IDA is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Diagnosis {
    Ida,
    Btt,
}

impl From<Diagnosis> for Label {
    fn from(d: Diagnosis) -> Self {
        match d {
            Diagnosis::Ida => Label::Ida,
            Diagnosis::Btt => Label::Btt,
        }
    }
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Label::from(*self).fmt(f)
    }
}

/// Data-collection class: I normal, II clearly abnormal, III indeterminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassTag {
    I,
    II,
    III,
}

impl ClassTag {
    pub const fn token(self) -> &'static str {
        match self {
            ClassTag::I => "I",
            ClassTag::II => "II",
            ClassTag::III => "III",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ClassTag {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" => Ok(ClassTag::I),
            "II" => Ok(ClassTag::II),
            "III" => Ok(ClassTag::III),
            other => Err(DataError::UnknownToken { kind: "class", token: other.into() }),
        }
    }
}

/// One subject's CBC panel.
///
/// Units: RBC in million cells/µL, Hb in g/dL, HCT %, MCV fL, MCH pg,
/// MCHC %, RDW %.
#[derive(Debug, Clone, PartialEq)]
pub struct CbcSample {
    indices: [f64; 6],
    rdw: Option<f64>,
    label: Option<Label>,
    class_tag: Option<ClassTag>,
}

fn check_positive(field: &'static str, value: f64) -> Result<f64, DataError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(DataError::NonPositive { field, value })
    }
}

impl CbcSample {
    /// `indices` are in [`CbcIndex::ALL`] order.
    pub fn new(
        indices: [f64; 6],
        rdw: Option<f64>,
        label: Option<Label>,
        class_tag: Option<ClassTag>,
    ) -> Result<Self, DataError> {
        for idx in CbcIndex::ALL {
            check_positive(idx.name(), indices[idx.position()])?;
        }
        if let Some(r) = rdw {
            check_positive("RDW", r)?;
        }
        if let (Some(label), Some(class)) = (label, class_tag) {
            if (label == Label::Normal) != (class == ClassTag::I) {
                return Err(DataError::LabelClassMismatch { label, class });
            }
        }
        Ok(Self { indices, rdw, label, class_tag })
    }

    pub fn value(&self, index: CbcIndex) -> f64 {
        self.indices[index.position()]
    }

    pub fn values(&self) -> &[f64; 6] {
        &self.indices
    }

    pub fn rbc(&self) -> f64 {
        self.value(CbcIndex::Rbc)
    }
    pub fn hb(&self) -> f64 {
        self.value(CbcIndex::Hb)
    }
    pub fn hct(&self) -> f64 {
        self.value(CbcIndex::Hct)
    }
    pub fn mcv(&self) -> f64 {
        self.value(CbcIndex::Mcv)
    }
    pub fn mch(&self) -> f64 {
        self.value(CbcIndex::Mch)
    }
    pub fn mchc(&self) -> f64 {
        self.value(CbcIndex::Mchc)
    }

    pub fn rdw(&self) -> Option<f64> {
        self.rdw
    }

    pub fn label(&self) -> Option<Label> {
        self.label
    }

    pub fn class_tag(&self) -> Option<ClassTag> {
        self.class_tag
    }

    /// Same sample with every index (and RDW) multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, DataError> {
        let mut indices = self.indices;
        indices.iter_mut().for_each(|v| *v *= factor);
        Self::new(indices, self.rdw.map(|r| r * factor), self.label, self.class_tag)
    }
}

/// Closed normal interval for one index; values strictly outside are abnormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalRange {
    low: f64,
    high: f64,
}

impl NormalRange {
    pub fn new(index: CbcIndex, low: f64, high: f64) -> Result<Self, DataError> {
        if low.is_finite() && high.is_finite() && low < high {
            Ok(Self { low, high })
        } else {
            Err(DataError::InvalidRange { index, low, high })
        }
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }
}

/// One [`NormalRange`] per CBC index. Defaults to the reference table header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalRanges([NormalRange; 6]);

impl Default for NormalRanges {
    fn default() -> Self {
        const fn r(low: f64, high: f64) -> NormalRange {
            NormalRange { low, high }
        }
        NormalRanges([
            r(4.5, 6.3),
            r(13.5, 18.0),
            r(39.0, 50.0),
            r(80.0, 96.0),
            r(27.0, 32.0),
            r(32.0, 38.0),
        ])
    }
}

impl NormalRanges {
    pub fn get(&self, index: CbcIndex) -> NormalRange {
        self.0[index.position()]
    }

    pub fn set(&mut self, index: CbcIndex, range: NormalRange) {
        self.0[index.position()] = range;
    }
}

/// A non-empty, ordered collection of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    samples: Vec<CbcSample>,
    source: String,
}

impl Cohort {
    pub fn new(samples: Vec<CbcSample>, source: impl Into<String>) -> Result<Self, DataError> {
        if samples.is_empty() {
            return Err(DataError::EmptyCohort);
        }
        Ok(Self { samples, source: source.into() })
    }

    pub fn samples(&self) -> &[CbcSample] {
        &self.samples
    }

    pub fn iter(&self) -> core::slice::Iter<'_, CbcSample> {
        self.samples.iter()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.samples.iter().filter(|s| s.label() == Some(label)).count()
    }

    pub fn contains_label(&self, label: Label) -> bool {
        self.samples.iter().any(|s| s.label() == Some(label))
    }

    /// Keeps the samples matching `keep`, in order.
    pub fn filtered(&self, keep: impl Fn(&CbcSample) -> bool) -> Result<Self, DataError> {
        let samples = self.samples.iter().filter(|s| keep(s)).cloned().collect();
        Cohort::new(samples, self.source.clone())
    }

    /// Drops NORMAL-labelled samples, as required for the IDA/β-TT task.
    pub fn without_normals(&self) -> Result<Self, DataError> {
        self.filtered(|s| s.label() != Some(Label::Normal))
    }

    /// Returns every sample multiplied by `factor` (see [`CbcSample::scaled`]).
    pub fn scaled(&self, factor: f64) -> Result<Self, DataError> {
        let samples = self.samples.iter().map(|s| s.scaled(factor)).collect::<Result<_, _>>()?;
        Cohort::new(samples, self.source.clone())
    }

    fn pick(&self, positions: &[usize], suffix: &str) -> Result<Self, DataError> {
        let samples = positions.iter().map(|&p| self.samples[p].clone()).collect();
        let mut source = self.source.clone();
        source.push_str(suffix);
        Cohort::new(samples, source)
    }
}

impl<'a> IntoIterator for &'a Cohort {
    type Item = &'a CbcSample;
    type IntoIter = core::slice::Iter<'a, CbcSample>;

    fn into_iter(self) -> Self::IntoIter {
        self.samples.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_count: usize, test_count: usize, seed: u64) -> Self {
        Self { train_count, test_count, seed }
    }

    pub fn validate(&self, cohort_len: usize) -> Result<(), DataError> {
        if self.train_count == 0 || self.test_count == 0 {
            return Err(DataError::EmptySplitPart);
        }
        let requested = self.train_count.saturating_add(self.test_count);
        if requested > cohort_len {
            return Err(DataError::SplitTooLarge { requested, available: cohort_len });
        }
        Ok(())
    }
}

/// Seeded sampling without replacement into disjoint train and test parts.
///
/// Both parts keep the cohort's original sample order.
pub fn split(cohort: &Cohort, spec: SplitSpec) -> Result<(Cohort, Cohort), DataError> {
    spec.validate(cohort.len())?;
    let mut order: Vec<usize> = (0..cohort.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    order.shuffle(&mut rng);
    let mut train: Vec<usize> = order[..spec.train_count].to_vec();
    let mut test: Vec<usize> = order[spec.train_count..spec.train_count + spec.test_count].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((cohort.pick(&train, " [train]")?, cohort.pick(&test, " [test]")?))
}
