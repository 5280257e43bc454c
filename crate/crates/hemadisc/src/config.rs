//! Run configuration: a `key=value` file (`#` starts a comment) whose
//! settings command-line flags may override. [`RunConfig::to_config_string`]
//! writes the fully resolved settings back out in the same syntax.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use hemadisc_core::data::{NormalRange, SplitSpec};
use hemadisc_core::discriminator::{Optimizer, OptimizerKind, TrainConfig, DEFAULT_BANDWIDTH, DEFAULT_INPUTS};
use hemadisc_core::hs::{GaParams, HsError, HsParams, Interval, PitchMode};
use hemadisc_core::poly_tree::GENOME_LEN;
use hemadisc_core::{CbcIndex, NormalRanges};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    MalformedLine { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("config key {0} set twice")]
    DuplicateKey(String),
    #[error("config key {key}: {value:?} is not {expected}")]
    BadValue { key: String, value: String, expected: &'static str },
    #[error("{0}")]
    Conflict(String),
    #[error(transparent)]
    Invalid(#[from] HsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub dynamic: Option<bool>,
    pub ni: usize,
    pub hms: usize,
    pub hmcr: f64,
    pub par: f64,
    pub bw: f64,
    pub pitch: PitchMode,
    pub hmcr_min: f64,
    pub hmcr_max: f64,
    pub par_min: f64,
    pub par_max: f64,
    pub coef_low: f64,
    pub coef_high: f64,
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub k: usize,
    pub train_count: Option<usize>,
    pub test_count: Option<usize>,
    pub split_seed: Option<u64>,
    pub inputs: [CbcIndex; 4],
    pub ranges: NormalRanges,
}

impl Default for RunConfig {
    fn default() -> Self {
        let hs = HsParams::new(2, 1, 1, DEFAULT_BANDWIDTH, 0);
        let ga = GaParams::new(2, 1, 0);
        Self {
            seed: 0,
            optimizer: OptimizerKind::Dhs,
            dynamic: None,
            ni: 2000,
            hms: 50,
            hmcr: hs.hmcr,
            par: hs.par,
            bw: DEFAULT_BANDWIDTH,
            pitch: hs.pitch,
            hmcr_min: hs.hmcr_bounds.low,
            hmcr_max: hs.hmcr_bounds.high,
            par_min: hs.par_bounds.low,
            par_max: hs.par_bounds.high,
            coef_low: -10.0,
            coef_high: 10.0,
            population: None,
            generations: None,
            crossover_rate: ga.crossover_rate,
            mutation_rate: ga.mutation_rate,
            k: 4,
            train_count: None,
            test_count: None,
            split_seed: None,
            inputs: DEFAULT_INPUTS,
            ranges: NormalRanges::default(),
        }
    }
}

const KEYS: &[&str] = &[
    "seed",
    "optimizer",
    "dynamic",
    "ni",
    "hms",
    "hmcr",
    "par",
    "bw",
    "pitch",
    "hmcr_min",
    "hmcr_max",
    "par_min",
    "par_max",
    "coef_low",
    "coef_high",
    "population",
    "generations",
    "crossover_rate",
    "mutation_rate",
    "k",
    "train_count",
    "test_count",
    "split_seed",
    "inputs",
];

fn value<T: FromStr>(key: &str, v: &str, expected: &'static str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::BadValue { key: key.into(), value: v.into(), expected })
}

fn range_key(key: &str) -> Option<CbcIndex> {
    let name = key.strip_prefix("range_")?;
    name.parse().ok()
}

fn pitch_token(p: PitchMode) -> &'static str {
    match p {
        PitchMode::OneSided => "one-sided",
        PitchMode::Symmetric => "symmetric",
    }
}

impl RunConfig {
    /// Applies one setting. `key` is a config key or `range_<INDEX>`.
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), ConfigError> {
        let v = v.trim();
        const UINT: &str = "a non-negative integer";
        const REAL: &str = "a number";
        match key {
            "seed" => self.seed = value(key, v, UINT)?,
            "optimizer" => self.optimizer = value(key, v, "one of hs, dhs, ga")?,
            "dynamic" => self.dynamic = Some(value(key, v, "true or false")?),
            "ni" => self.ni = value(key, v, UINT)?,
            "hms" => self.hms = value(key, v, UINT)?,
            "hmcr" => self.hmcr = value(key, v, REAL)?,
            "par" => self.par = value(key, v, REAL)?,
            "bw" => self.bw = value(key, v, REAL)?,
            "pitch" => {
                self.pitch = match v {
                    "one-sided" => PitchMode::OneSided,
                    "symmetric" => PitchMode::Symmetric,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: v.into(),
                            expected: "one-sided or symmetric",
                        })
                    }
                }
            }
            "hmcr_min" => self.hmcr_min = value(key, v, REAL)?,
            "hmcr_max" => self.hmcr_max = value(key, v, REAL)?,
            "par_min" => self.par_min = value(key, v, REAL)?,
            "par_max" => self.par_max = value(key, v, REAL)?,
            "coef_low" => self.coef_low = value(key, v, REAL)?,
            "coef_high" => self.coef_high = value(key, v, REAL)?,
            "population" => self.population = Some(value(key, v, UINT)?),
            "generations" => self.generations = Some(value(key, v, UINT)?),
            "crossover_rate" => self.crossover_rate = value(key, v, REAL)?,
            "mutation_rate" => self.mutation_rate = value(key, v, REAL)?,
            "k" => self.k = value(key, v, UINT)?,
            "train_count" => self.train_count = Some(value(key, v, UINT)?),
            "test_count" => self.test_count = Some(value(key, v, UINT)?),
            "split_seed" => self.split_seed = Some(value(key, v, UINT)?),
            "inputs" => {
                let bad = || ConfigError::BadValue { key: key.into(), value: v.into(), expected: "four index names" };
                let parts: Vec<&str> = v.split(',').collect();
                if parts.len() != 4 {
                    return Err(bad());
                }
                for (slot, p) in self.inputs.iter_mut().zip(parts) {
                    *slot = p.parse().map_err(|_| bad())?;
                }
            }
            _ => {
                let index = range_key(key).ok_or_else(|| ConfigError::UnknownKey(key.into()))?;
                let bad = || ConfigError::BadValue { key: key.into(), value: v.into(), expected: "low,high with low < high" };
                let (lo, hi) = v.split_once(',').ok_or_else(bad)?;
                let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
                self.ranges.set(index, NormalRange::new(index, lo, hi).map_err(|_| bad())?);
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or(ConfigError::MalformedLine { line: n + 1 })?;
            let k = k.trim();
            let canonical = match range_key(k) {
                Some(i) => format!("range_{}", i.name()),
                None => k.to_string(),
            };
            if seen.contains(&canonical) {
                return Err(ConfigError::DuplicateKey(canonical));
            }
            cfg.set(k, v)?;
            seen.push(canonical);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text)?)
    }

    /// The optimizer after folding in the `dynamic` switch.
    pub fn resolved_optimizer(&self) -> Result<OptimizerKind, ConfigError> {
        match (self.optimizer, self.dynamic) {
            (k, None) => Ok(k),
            (OptimizerKind::Hs | OptimizerKind::Dhs, Some(true)) => Ok(OptimizerKind::Dhs),
            (OptimizerKind::Hs, Some(false)) => Ok(OptimizerKind::Hs),
            (k, Some(d)) => Err(ConfigError::Conflict(format!("dynamic={d} does not apply to optimizer {k}"))),
        }
    }

    pub fn population(&self) -> usize {
        self.population.unwrap_or(self.hms)
    }

    pub fn generations(&self) -> usize {
        self.generations.unwrap_or(self.ni)
    }

    pub fn hs_params(&self, dynamic: bool) -> HsParams {
        let mut p = HsParams::new(self.hms, self.ni, GENOME_LEN, self.bw, self.seed)
            .with_rates(self.hmcr, self.par)
            .with_dynamic(dynamic);
        p.pitch = self.pitch;
        p.hmcr_bounds = Interval::new(self.hmcr_min, self.hmcr_max);
        p.par_bounds = Interval::new(self.par_min, self.par_max);
        p
    }

    /// Builds and validates the training configuration.
    pub fn train_config(&self) -> Result<TrainConfig, ConfigError> {
        let optimizer = match self.resolved_optimizer()? {
            OptimizerKind::Ga => {
                let mut p = GaParams::new(self.population(), self.generations(), self.seed);
                p.crossover_rate = self.crossover_rate;
                p.mutation_rate = self.mutation_rate;
                p.validate()?;
                Optimizer::Ga(p)
            }
            kind => Optimizer::Hs(self.hs_params(kind == OptimizerKind::Dhs)),
        };
        let tc = TrainConfig {
            inputs: self.inputs,
            coefficient_low: self.coef_low,
            coefficient_high: self.coef_high,
            optimizer,
        };
        let bounds = tc.bounds()?;
        if let Optimizer::Hs(p) = &tc.optimizer {
            p.validate(&bounds)?;
        }
        for (p, i) in self.inputs.iter().enumerate() {
            if self.inputs[..p].contains(i) {
                return Err(ConfigError::Conflict(format!("inputs lists {i} twice")));
            }
        }
        Ok(tc)
    }

    /// `None` when no split counts are configured.
    pub fn split_spec(&self) -> Result<Option<SplitSpec>, ConfigError> {
        match (self.train_count, self.test_count) {
            (None, None) => Ok(None),
            (Some(tr), Some(te)) => Ok(Some(SplitSpec::new(tr, te, self.split_seed.unwrap_or(self.seed)))),
            _ => Err(ConfigError::Conflict("train_count and test_count must be given together".into())),
        }
    }

    /// Every setting with defaults filled in; parses back to an equivalent
    /// configuration.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let optimizer = self.resolved_optimizer().unwrap_or(self.optimizer);
        let mut put = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k}={v}");
        };
        put("seed", &self.seed);
        put("optimizer", &optimizer);
        put("ni", &self.ni);
        put("hms", &self.hms);
        put("hmcr", &self.hmcr);
        put("par", &self.par);
        put("bw", &self.bw);
        put("pitch", &pitch_token(self.pitch));
        put("hmcr_min", &self.hmcr_min);
        put("hmcr_max", &self.hmcr_max);
        put("par_min", &self.par_min);
        put("par_max", &self.par_max);
        put("coef_low", &self.coef_low);
        put("coef_high", &self.coef_high);
        put("population", &self.population());
        put("generations", &self.generations());
        put("crossover_rate", &self.crossover_rate);
        put("mutation_rate", &self.mutation_rate);
        put("k", &self.k);
        if let (Some(tr), Some(te)) = (self.train_count, self.test_count) {
            put("train_count", &tr);
            put("test_count", &te);
            put("split_seed", &self.split_seed.unwrap_or(self.seed));
        }
        let inputs: Vec<&str> = self.inputs.iter().map(|i| i.name()).collect();
        put("inputs", &inputs.join(","));
        for i in CbcIndex::ALL {
            let r = self.ranges.get(i);
            put(&format!("range_{}", i.name()), &format_args!("{},{}", r.low(), r.high()));
        }
        s
    }
}

/// Keys accepted by [`RunConfig::set`] besides `range_<INDEX>`.
pub fn known_keys() -> &'static [&'static str] {
    KEYS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_to_dynamic_search() {
        let c = RunConfig::default();
        let tc = c.train_config().unwrap();
        assert_eq!(tc.optimizer.kind(), OptimizerKind::Dhs);
        assert_eq!((tc.optimizer.iterations(), tc.optimizer.memory_size()), (2000, 50));
        assert_eq!(c.split_spec().unwrap(), None);
    }

    #[test]
    fn parses_comments_and_ranges() {
        let c = RunConfig::parse("# run\nseed = 9\nni=100 # short\nrange_hb=12,17.5\ninputs=MCV,HCT,Hb,RBC\n").unwrap();
        assert_eq!((c.seed, c.ni), (9, 100));
        assert_eq!(c.ranges.get(CbcIndex::Hb).high(), 17.5);
        assert_eq!(c.inputs[0], CbcIndex::Mcv);
    }

    #[test]
    fn rejects_unknown_duplicate_and_bad_values() {
        assert_eq!(RunConfig::parse("speed=3\n"), Err(ConfigError::UnknownKey("speed".into())));
        assert_eq!(RunConfig::parse("ni=1\nni=2\n"), Err(ConfigError::DuplicateKey("ni".into())));
        assert!(matches!(RunConfig::parse("range_RBC=1,3\nrange_rbc=1,2\n"), Err(ConfigError::DuplicateKey(_))));
        assert!(matches!(RunConfig::parse("hms=-1\n"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(RunConfig::parse("range_RBC=5,4\n"), Err(ConfigError::BadValue { .. })));
        assert!(matches!(RunConfig::parse("pitch=sideways\n"), Err(ConfigError::BadValue { .. })));
        assert_eq!(RunConfig::parse("ni\n"), Err(ConfigError::MalformedLine { line: 1 }));
    }

    #[test]
    fn numeric_invariants_are_validated() {
        for text in ["hmcr=1.5", "hms=1", "ni=0", "bw=0", "coef_low=3\ncoef_high=2", "par_max=1"] {
            let c = RunConfig::parse(text).unwrap();
            assert!(c.train_config().is_err(), "{text}");
        }
        let c = RunConfig::parse("optimizer=ga\nmutation_rate=2").unwrap();
        assert!(c.train_config().is_err());
        let c = RunConfig::parse("inputs=RBC,RBC,HCT,MCV").unwrap();
        assert!(c.train_config().is_err());
    }

    #[test]
    fn dynamic_switch_folds_into_optimizer() {
        let mut c = RunConfig::parse("optimizer=hs").unwrap();
        assert_eq!(c.resolved_optimizer(), Ok(OptimizerKind::Hs));
        c.set("dynamic", "true").unwrap();
        assert_eq!(c.resolved_optimizer(), Ok(OptimizerKind::Dhs));
        c.set("optimizer", "ga").unwrap();
        assert!(c.resolved_optimizer().is_err());
    }

    #[test]
    fn ga_budget_defaults_to_search_budget() {
        let c = RunConfig::parse("optimizer=ga\nhms=30\nni=40").unwrap();
        match c.train_config().unwrap().optimizer {
            Optimizer::Ga(p) => assert_eq!((p.population, p.generations), (30, 40)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn split_needs_both_counts() {
        assert!(RunConfig::parse("train_count=5").unwrap().split_spec().is_err());
        let s = RunConfig::parse("train_count=5\ntest_count=6\nseed=3").unwrap().split_spec().unwrap().unwrap();
        assert_eq!(s, SplitSpec::new(5, 6, 3));
    }

    #[test]
    fn stamp_parses_back() {
        let c = RunConfig::parse("seed=4\nhmcr=0.85\npitch=symmetric\ntrain_count=10\ntest_count=20\nrange_MCHC=31,37.5\ndynamic=false\noptimizer=hs").unwrap();
        let back = RunConfig::parse(&c.to_config_string()).unwrap();
        assert_eq!(back.train_config().unwrap(), c.train_config().unwrap());
        assert_eq!(back.split_spec().unwrap(), c.split_spec().unwrap());
        assert_eq!(back.ranges, c.ranges);
        assert_eq!(back.to_config_string(), c.to_config_string());
        for line in c.to_config_string().lines() {
            let key = line.split('=').next().unwrap();
            assert!(known_keys().contains(&key) || key.starts_with("range_"), "{key}");
        }
    }
}
