//! Training and applying a polynomial-tree discriminator.
//!
//! The fitness of a tree over a labeled cohort is
//!
//! ```text
//! F = |α − β| / (1 + γ·δ)
//! ```
//!
//! where α, β are the mean tree outputs over IDA and β-TT samples and γ, δ
//! the matching population variances. Inputs are min-max scaled with
//! statistics taken from the training cohort. A trained tree labels a
//! sample by comparing its output with the midpoint of α and β.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::data::{CbcIndex, CbcSample, Cohort, DataError, Diagnosis, Label};
use crate::hs::{self, Bounds, Dimension, GaParams, HsError, HsParams, Trace};
use crate::poly_tree::{TreeGenome, COEFFICIENT_COUNT, GENOME_LEN, SCHEME_COUNT};

/// Tree input slots, in order.
pub const DEFAULT_INPUTS: [CbcIndex; 4] = [CbcIndex::Rbc, CbcIndex::Hb, CbcIndex::Hct, CbcIndex::Mcv];

/// Pitch bandwidth for coefficient genes.
pub const DEFAULT_BANDWIDTH: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiscriminatorError {
    #[error("{index} is constant over the training cohort; cannot scale it")]
    ConstantInput { index: CbcIndex },
    #[error("invalid scaling for {index}: need min < max, got [{min}, {max}]")]
    InvalidScaling { index: CbcIndex, min: f64, max: f64 },
    #[error("sample {position} is NORMAL; exclude NORMAL samples first")]
    NormalSample { position: usize },
    #[error("sample {position} has no label")]
    Unlabeled { position: usize },
    #[error("training cohort has no {0} samples")]
    MissingClass(Label),
    #[error("degenerate model: class means are equal ({alpha})")]
    EqualMeans { alpha: f64 },
    #[error("degenerate evaluation")]
    DegenerateEvaluation,
    #[error("input {0} listed twice")]
    DuplicateInput(CbcIndex),
    #[error(transparent)]
    Search(#[from] HsError),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMax {
    pub min: f64,
    pub max: f64,
}

impl MinMax {
    /// Linear map sending `min` to 0 and `max` to 1; values outside the
    /// range are not clamped.
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }
}

/// Selected indices with their per-index min-max scaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputScaling {
    inputs: [CbcIndex; 4],
    ranges: [MinMax; 4],
}

impl InputScaling {
    pub fn new(inputs: [CbcIndex; 4], ranges: [MinMax; 4]) -> Result<Self, DiscriminatorError> {
        check_distinct(&inputs)?;
        for (&index, r) in inputs.iter().zip(&ranges) {
            if !(r.min.is_finite() && r.max.is_finite() && r.min < r.max) {
                return Err(DiscriminatorError::InvalidScaling { index, min: r.min, max: r.max });
            }
        }
        Ok(Self { inputs, ranges })
    }

    pub fn fit(cohort: &Cohort, inputs: [CbcIndex; 4]) -> Result<Self, DiscriminatorError> {
        check_distinct(&inputs)?;
        let mut ranges = [MinMax { min: f64::INFINITY, max: f64::NEG_INFINITY }; 4];
        for s in cohort {
            for (r, &index) in ranges.iter_mut().zip(&inputs) {
                let v = s.value(index);
                r.min = r.min.min(v);
                r.max = r.max.max(v);
            }
        }
        for (r, &index) in ranges.iter().zip(&inputs) {
            if !(r.min < r.max) {
                return Err(DiscriminatorError::ConstantInput { index });
            }
        }
        Ok(Self { inputs, ranges })
    }

    pub fn apply(&self, sample: &CbcSample) -> [f64; 4] {
        core::array::from_fn(|k| self.ranges[k].apply(sample.value(self.inputs[k])))
    }

    pub fn inputs(&self) -> [CbcIndex; 4] {
        self.inputs
    }

    pub fn ranges(&self) -> [MinMax; 4] {
        self.ranges
    }
}

fn check_distinct(inputs: &[CbcIndex; 4]) -> Result<(), DiscriminatorError> {
    for (p, i) in inputs.iter().enumerate() {
        if inputs[..p].contains(i) {
            return Err(DiscriminatorError::DuplicateInput(*i));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassStats {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl ClassStats {
    pub fn fitness(&self) -> f64 {
        let f = libm::fabs(self.alpha - self.beta) / (1.0 + self.gamma * self.delta);
        if f.is_finite() {
            f
        } else {
            0.0
        }
    }
}

/// Mean and population variance; `None` when any value is non-finite.
fn mean_var(values: impl Iterator<Item = f64> + Clone) -> Option<(f64, f64)> {
    let mut n = 0usize;
    let mut sum = 0.0;
    for v in values.clone() {
        if !v.is_finite() {
            return None;
        }
        n += 1;
        sum += v;
    }
    let mean = sum / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean.is_finite() && var.is_finite()).then_some((mean, var))
}

/// Scaled tree inputs of a labeled training cohort, split by class.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    scaling: InputScaling,
    ida: Vec<[f64; 4]>,
    btt: Vec<[f64; 4]>,
}

impl TrainingSet {
    /// Fits the scaling on `cohort` and scales every sample.
    pub fn new(cohort: &Cohort, inputs: [CbcIndex; 4]) -> Result<Self, DiscriminatorError> {
        let scaling = InputScaling::fit(cohort, inputs)?;
        Self::with_scaling(cohort, scaling)
    }

    pub fn with_scaling(cohort: &Cohort, scaling: InputScaling) -> Result<Self, DiscriminatorError> {
        let (mut ida, mut btt) = (Vec::new(), Vec::new());
        for (position, s) in cohort.iter().enumerate() {
            match s.label() {
                Some(Label::Ida) => ida.push(scaling.apply(s)),
                Some(Label::Btt) => btt.push(scaling.apply(s)),
                Some(Label::Normal) => return Err(DiscriminatorError::NormalSample { position }),
                None => return Err(DiscriminatorError::Unlabeled { position }),
            }
        }
        if ida.is_empty() {
            return Err(DiscriminatorError::MissingClass(Label::Ida));
        }
        if btt.is_empty() {
            return Err(DiscriminatorError::MissingClass(Label::Btt));
        }
        Ok(Self { scaling, ida, btt })
    }

    pub fn scaling(&self) -> &InputScaling {
        &self.scaling
    }

    pub fn ida(&self) -> &[[f64; 4]] {
        &self.ida
    }

    pub fn btt(&self) -> &[[f64; 4]] {
        &self.btt
    }

    /// The same samples with the class labels exchanged.
    pub fn swapped(&self) -> Self {
        Self { scaling: self.scaling, ida: self.btt.clone(), btt: self.ida.clone() }
    }

    /// `None` when the tree output is non-finite on any sample.
    pub fn class_stats(&self, genome: &TreeGenome) -> Option<ClassStats> {
        let out = |rows: &[[f64; 4]]| {
            let raw = rows.iter().map(move |x| genome.scheme().evaluate([genome.node(0), genome.node(1), genome.node(2)], x));
            mean_var(raw)
        };
        let (alpha, gamma) = out(&self.ida)?;
        let (beta, delta) = out(&self.btt)?;
        Some(ClassStats { alpha, beta, gamma, delta })
    }

    pub fn fitness(&self, genome: &TreeGenome) -> f64 {
        self.class_stats(genome).map_or(0.0, |s| s.fitness())
    }
}

pub fn fitness(genome: &TreeGenome, train: &TrainingSet) -> f64 {
    train.fitness(genome)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub threshold: f64,
    /// True when IDA samples score above the threshold.
    pub ida_above: bool,
}

impl Calibration {
    /// Outputs exactly at the threshold are IDA.
    pub fn decide(&self, output: f64) -> Diagnosis {
        let ida = if self.ida_above { output >= self.threshold } else { output <= self.threshold };
        if ida {
            Diagnosis::Ida
        } else {
            Diagnosis::Btt
        }
    }
}

pub fn calibrate_stats(stats: &ClassStats) -> Result<Calibration, DiscriminatorError> {
    if stats.alpha == stats.beta {
        return Err(DiscriminatorError::EqualMeans { alpha: stats.alpha });
    }
    let threshold = stats.alpha / 2.0 + stats.beta / 2.0;
    if !threshold.is_finite() {
        return Err(DiscriminatorError::DegenerateEvaluation);
    }
    Ok(Calibration { threshold, ida_above: stats.alpha > stats.beta })
}

pub fn calibrate(genome: &TreeGenome, train: &TrainingSet) -> Result<Calibration, DiscriminatorError> {
    let stats = train.class_stats(genome).ok_or(DiscriminatorError::DegenerateEvaluation)?;
    calibrate_stats(&stats)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Hs,
    Dhs,
    Ga,
}

impl OptimizerKind {
    pub const fn token(self) -> &'static str {
        match self {
            OptimizerKind::Hs => "hs",
            OptimizerKind::Dhs => "dhs",
            OptimizerKind::Ga => "ga",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for OptimizerKind {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hs" => Ok(OptimizerKind::Hs),
            "dhs" => Ok(OptimizerKind::Dhs),
            "ga" => Ok(OptimizerKind::Ga),
            _ => Err(DataError::UnknownToken { kind: "optimizer", token: s.into() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Optimizer {
    Hs(HsParams),
    Ga(GaParams),
}

impl Optimizer {
    pub fn kind(&self) -> OptimizerKind {
        match self {
            Optimizer::Hs(p) if p.dynamic => OptimizerKind::Dhs,
            Optimizer::Hs(_) => OptimizerKind::Hs,
            Optimizer::Ga(_) => OptimizerKind::Ga,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Optimizer::Hs(p) => p.seed,
            Optimizer::Ga(p) => p.seed,
        }
    }

    /// Improvisations for harmony search, generations for the GA.
    pub fn iterations(&self) -> usize {
        match self {
            Optimizer::Hs(p) => p.ni,
            Optimizer::Ga(p) => p.generations,
        }
    }

    /// Harmony memory size, or GA population.
    pub fn memory_size(&self) -> usize {
        match self {
            Optimizer::Hs(p) => p.hms,
            Optimizer::Ga(p) => p.population,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub inputs: [CbcIndex; 4],
    pub coefficient_low: f64,
    pub coefficient_high: f64,
    pub optimizer: Optimizer,
}

impl TrainConfig {
    /// Harmony search over coefficients in [−10, 10) with
    /// [`DEFAULT_BANDWIDTH`].
    pub fn harmony(hms: usize, ni: usize, dynamic: bool, seed: u64) -> Self {
        let params = HsParams::new(hms, ni, GENOME_LEN, DEFAULT_BANDWIDTH, seed).with_dynamic(dynamic);
        Self { inputs: DEFAULT_INPUTS, coefficient_low: -10.0, coefficient_high: 10.0, optimizer: Optimizer::Hs(params) }
    }

    pub fn genetic(population: usize, generations: usize, seed: u64) -> Self {
        Self {
            inputs: DEFAULT_INPUTS,
            coefficient_low: -10.0,
            coefficient_high: 10.0,
            optimizer: Optimizer::Ga(GaParams::new(population, generations, seed)),
        }
    }

    /// 18 continuous coefficient genes followed by the scheme id.
    pub fn bounds(&self) -> Result<Bounds, HsError> {
        let mut dims = alloc::vec![Dimension::Continuous { low: self.coefficient_low, high: self.coefficient_high }; COEFFICIENT_COUNT];
        dims.push(Dimension::Categorical { arity: SCHEME_COUNT });
        Bounds::new(dims)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub optimizer: OptimizerKind,
    pub seed: u64,
    pub iterations: usize,
    pub memory_size: usize,
    pub final_fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainedModel {
    genome: TreeGenome,
    scaling: InputScaling,
    calibration: Calibration,
    provenance: Provenance,
}

impl TrainedModel {
    pub fn new(genome: TreeGenome, scaling: InputScaling, calibration: Calibration, provenance: Provenance) -> Self {
        Self { genome, scaling, calibration, provenance }
    }

    pub fn genome(&self) -> &TreeGenome {
        &self.genome
    }

    pub fn scaling(&self) -> &InputScaling {
        &self.scaling
    }

    pub fn selected_indices(&self) -> [CbcIndex; 4] {
        self.scaling.inputs()
    }

    pub fn calibration(&self) -> Calibration {
        self.calibration
    }

    pub fn threshold(&self) -> f64 {
        self.calibration.threshold
    }

    pub fn ida_above(&self) -> bool {
        self.calibration.ida_above
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Raw tree output on a sample.
    pub fn output(&self, sample: &CbcSample) -> Result<f64, DiscriminatorError> {
        self.genome
            .eval_tree(&self.scaling.apply(sample))
            .map_err(|_| DiscriminatorError::DegenerateEvaluation)
    }

    pub fn predict(&self, sample: &CbcSample) -> Result<Diagnosis, DiscriminatorError> {
        Ok(self.calibration.decide(self.output(sample)?))
    }

    pub fn predict_all(&self, cohort: &Cohort) -> Result<Vec<Diagnosis>, DiscriminatorError> {
        cohort.iter().map(|s| self.predict(s)).collect()
    }
}

pub fn predict(model: &TrainedModel, sample: &CbcSample) -> Result<Diagnosis, DiscriminatorError> {
    model.predict(sample)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: TrainedModel,
    pub trace: Trace,
}

pub fn train(cohort: &Cohort, config: &TrainConfig) -> Result<TrainOutcome, DiscriminatorError> {
    let set = TrainingSet::new(cohort, config.inputs)?;
    let bounds = config.bounds()?;
    let cost = |genes: &[f64]| TreeGenome::from_genes(genes).map_or(0.0, |g| set.fitness(&g));
    let outcome = match &config.optimizer {
        Optimizer::Hs(p) => hs::run(&bounds, p, cost)?,
        Optimizer::Ga(p) => hs::run_ga_baseline(&bounds, p, cost)?,
    };
    let genome = TreeGenome::from_genes(&outcome.best.genes).map_err(|_| DiscriminatorError::DegenerateEvaluation)?;
    let calibration = calibrate(&genome, &set)?;
    let provenance = Provenance {
        optimizer: config.optimizer.kind(),
        seed: config.optimizer.seed(),
        iterations: config.optimizer.iterations(),
        memory_size: config.optimizer.memory_size(),
        final_fitness: outcome.best.fitness,
    };
    Ok(TrainOutcome { model: TrainedModel::new(genome, *set.scaling(), calibration, provenance), trace: outcome.trace })
}
