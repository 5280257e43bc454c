//! Harmony search over mixed continuous/categorical genomes.
//!
//! Fitness is maximized. A cost function returning a non-finite value
//! poisons that genome to fitness 0. With [`HsParams::dynamic`] set, HMCR
//! and PAR adapt from recent improvisation outcomes (see [`dhs`]).

pub mod dhs;
pub mod ga;

pub use dhs::{adapt_hmcr, adapt_par, hmcr_step, par_step, DhsState, Window, WINDOW};
pub use ga::{run_ga_baseline, GaParams};

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic, portable generator used by every stochastic routine.
pub type SearchRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HsError {
    #[error("dimension {dim}: need low < high, got [{low}, {high})")]
    InvalidInterval { dim: usize, low: f64, high: f64 },
    #[error("dimension {dim}: categorical arity must be at least 2, got {arity}")]
    InvalidArity { dim: usize, arity: usize },
    #[error("search space has no dimensions")]
    NoDimensions,
    #[error("{name} must be {requirement}, got {value}")]
    InvalidParam { name: &'static str, requirement: &'static str, value: f64 },
    #[error("bandwidth has {got} entries but the search space has {expected} dimensions")]
    BandwidthLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    /// Uniform on `[low, high)`.
    Continuous { low: f64, high: f64 },
    /// Integer-valued gene in `0..arity`, stored as an `f64`.
    Categorical { arity: usize },
}

impl Dimension {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Dimension::Continuous { low, high } => {
                let r: f64 = rng.random();
                low + (high - low) * r
            }
            Dimension::Categorical { arity } => {
                let r: f64 = rng.random();
                (libm::floor(arity as f64 * r) as usize).min(arity - 1) as f64
            }
        }
    }

    /// Width of the dimension; for categorical genes, the arity.
    pub fn range(&self) -> f64 {
        match *self {
            Dimension::Continuous { low, high } => high - low,
            Dimension::Categorical { arity } => arity as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    dims: Vec<Dimension>,
}

impl Bounds {
    pub fn new(dims: Vec<Dimension>) -> Result<Self, HsError> {
        if dims.is_empty() {
            return Err(HsError::NoDimensions);
        }
        for (dim, d) in dims.iter().enumerate() {
            match *d {
                Dimension::Continuous { low, high } => {
                    if !(low.is_finite() && high.is_finite() && low < high) {
                        return Err(HsError::InvalidInterval { dim, low, high });
                    }
                }
                Dimension::Categorical { arity } => {
                    if arity < 2 {
                        return Err(HsError::InvalidArity { dim, arity });
                    }
                }
            }
        }
        Ok(Self { dims })
    }

    /// `n` continuous dimensions sharing one interval.
    pub fn uniform(n: usize, low: f64, high: f64) -> Result<Self, HsError> {
        Self::new(alloc::vec![Dimension::Continuous { low, high }; n])
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.dims.iter().map(|d| d.sample(rng)).collect()
    }

    /// True when every gene lies inside its dimension.
    pub fn contains(&self, genes: &[f64]) -> bool {
        genes.len() == self.dims.len()
            && self.dims.iter().zip(genes).all(|(d, &x)| match *d {
                Dimension::Continuous { low, high } => x >= low && x <= high,
                Dimension::Categorical { arity } => x >= 0.0 && x < arity as f64 && x == libm::trunc(x),
            })
    }
}

/// Closed interval used to clamp adaptive rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.max(self.low).min(self.high)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.low && x <= self.high
    }
}

/// Sign convention of the pitch-adjustment offset `BW(j)·r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PitchMode {
    /// `r` uniform in `[0, 1)`.
    OneSided,
    /// `r` uniform in `[-1, 1)`.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HsParams {
    pub hms: usize,
    pub ni: usize,
    pub hmcr: f64,
    pub par: f64,
    /// Per-dimension bandwidth; entries for categorical dimensions are ignored.
    pub bandwidth: Vec<f64>,
    pub dynamic: bool,
    pub seed: u64,
    pub hmcr_bounds: Interval,
    pub par_bounds: Interval,
    pub pitch: PitchMode,
}

pub const DEFAULT_HMCR_BOUNDS: Interval = Interval::new(0.5, 0.99);
pub const DEFAULT_PAR_BOUNDS: Interval = Interval::new(0.01, 0.99);

impl HsParams {
    /// Standard HS with HMCR 0.9, PAR 0.3 and one bandwidth for all dimensions.
    pub fn new(hms: usize, ni: usize, dims: usize, bandwidth: f64, seed: u64) -> Self {
        Self {
            hms,
            ni,
            hmcr: 0.9,
            par: 0.3,
            bandwidth: alloc::vec![bandwidth; dims],
            dynamic: false,
            seed,
            hmcr_bounds: DEFAULT_HMCR_BOUNDS,
            par_bounds: DEFAULT_PAR_BOUNDS,
            pitch: PitchMode::OneSided,
        }
    }

    pub fn with_dynamic(mut self, dynamic: bool) -> Self {
        self.dynamic = dynamic;
        self
    }

    pub fn with_rates(mut self, hmcr: f64, par: f64) -> Self {
        self.hmcr = hmcr;
        self.par = par;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self, bounds: &Bounds) -> Result<(), HsError> {
        let bad = |name, requirement, value: f64| Err(HsError::InvalidParam { name, requirement, value });
        if self.hms < 2 {
            return bad("hms", "at least 2", self.hms as f64);
        }
        if self.ni < 1 {
            return bad("ni", "at least 1", self.ni as f64);
        }
        if !(self.hmcr > 0.0 && self.hmcr < 1.0) {
            return bad("hmcr", "in (0, 1)", self.hmcr);
        }
        if !(self.par > 0.0 && self.par < 1.0) {
            return bad("par", "in (0, 1)", self.par);
        }
        for (name, iv) in [("hmcr_bounds", self.hmcr_bounds), ("par_bounds", self.par_bounds)] {
            if !(iv.low > 0.0 && iv.low <= iv.high && iv.high < 1.0) {
                return bad(name, "a sub-interval of (0, 1)", iv.low);
            }
        }
        if self.bandwidth.len() != bounds.len() {
            return Err(HsError::BandwidthLength { expected: bounds.len(), got: self.bandwidth.len() });
        }
        for (d, &bw) in bounds.dims().iter().zip(&self.bandwidth) {
            if matches!(d, Dimension::Continuous { .. }) && !(bw.is_finite() && bw > 0.0) {
                return bad("bandwidth", "finite and positive", bw);
            }
        }
        Ok(())
    }
}

/// One genome with its cached fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmony {
    pub genes: Vec<f64>,
    pub fitness: f64,
}

/// Cost-function output with non-finite values poisoned to 0.
#[inline]
pub fn score<F: FnMut(&[f64]) -> f64>(cost: &mut F, genes: &[f64]) -> f64 {
    let f = cost(genes);
    if f.is_finite() {
        f
    } else {
        0.0
    }
}

/// Population kept sorted by fitness, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonyMemory {
    rows: Vec<Harmony>,
}

impl HarmonyMemory {
    /// Builds a memory from arbitrary rows, sorting them best-first (stable).
    pub fn from_rows(mut rows: Vec<Harmony>) -> Self {
        rows.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
        Self { rows }
    }

    pub fn rows(&self) -> &[Harmony] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn best(&self) -> &Harmony {
        &self.rows[0]
    }

    pub fn worst(&self) -> &Harmony {
        self.rows.last().expect("memory is never empty")
    }

    pub fn is_sorted(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].fitness >= w[1].fitness)
    }

    /// Replaces the worst row when `candidate` is strictly fitter.
    ///
    /// The candidate is placed after any rows of equal fitness, so older rows
    /// keep precedence.
    pub fn update(&mut self, candidate: Harmony) -> bool {
        if !(candidate.fitness > self.worst().fitness) {
            return false;
        }
        self.rows.pop();
        let at = self.rows.partition_point(|h| h.fitness >= candidate.fitness);
        self.rows.insert(at, candidate);
        true
    }
}

/// Free-function form of [`HarmonyMemory::update`].
pub fn update_memory(hm: &mut HarmonyMemory, candidate: Harmony) -> bool {
    hm.update(candidate)
}

/// Samples `params.hms` genomes uniformly within `bounds` and scores them.
pub fn init_memory<F, R>(bounds: &Bounds, params: &HsParams, cost: &mut F, rng: &mut R) -> HarmonyMemory
where
    F: FnMut(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let rows = (0..params.hms)
        .map(|_| {
            let genes = bounds.sample(rng);
            let fitness = score(cost, &genes);
            Harmony { genes, fitness }
        })
        .collect();
    HarmonyMemory::from_rows(rows)
}

/// Where an improvised gene came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneSource {
    Memory,
    /// Copied from memory, then pitch-adjusted.
    Adjusted,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Improvisation {
    pub genes: Vec<f64>,
    pub sources: Vec<GeneSource>,
    /// The genome before pitch adjustment, present when any gene was adjusted.
    pub pre_adjustment: Option<Vec<f64>>,
}

impl Improvisation {
    /// True when a strict majority of genes were taken from memory.
    pub fn memory_considered(&self) -> bool {
        let copied = self.sources.iter().filter(|s| !matches!(s, GeneSource::Random)).count();
        2 * copied > self.sources.len()
    }
}

/// Current consideration and adjustment rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub hmcr: f64,
    pub par: f64,
}

/// Builds one new harmony gene by gene: memory consideration with
/// probability HMCR (from a uniformly chosen row), then pitch adjustment
/// with probability PAR; otherwise a fresh uniform draw.
///
/// Continuous adjustments add `BW(j)·r` and are clamped into bounds;
/// categorical adjustments step ±1 modulo the arity.
pub fn improvise<R: Rng + ?Sized>(
    hm: &HarmonyMemory,
    bounds: &Bounds,
    rates: Rates,
    params: &HsParams,
    rng: &mut R,
) -> Improvisation {
    let n = bounds.len();
    let mut genes = Vec::with_capacity(n);
    let mut pre = Vec::with_capacity(n);
    let mut sources = Vec::with_capacity(n);
    let mut adjusted_any = false;
    for (j, dim) in bounds.dims().iter().enumerate() {
        let r1: f64 = rng.random();
        if r1 < rates.hmcr {
            let row = (libm::floor(rng.random::<f64>() * hm.len() as f64) as usize).min(hm.len() - 1);
            let copied = hm.rows()[row].genes[j];
            pre.push(copied);
            let r2: f64 = rng.random();
            if r2 < rates.par {
                let value = match *dim {
                    Dimension::Continuous { low, high } => {
                        let r: f64 = match params.pitch {
                            PitchMode::OneSided => rng.random(),
                            PitchMode::Symmetric => rng.random_range(-1.0..1.0),
                        };
                        (copied + params.bandwidth[j] * r).max(low).min(high)
                    }
                    Dimension::Categorical { arity } => {
                        let step = if rng.random::<bool>() { 1 } else { arity - 1 };
                        ((copied as usize + step) % arity) as f64
                    }
                };
                genes.push(value);
                sources.push(GeneSource::Adjusted);
                adjusted_any = true;
            } else {
                genes.push(copied);
                sources.push(GeneSource::Memory);
            }
        } else {
            let value = dim.sample(rng);
            genes.push(value);
            pre.push(value);
            sources.push(GeneSource::Random);
        }
    }
    Improvisation { genes, sources, pre_adjustment: adjusted_any.then_some(pre) }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub best_fitness: f64,
    /// Absent for optimizers without a consideration rate (the GA).
    pub hmcr: Option<f64>,
    pub par: Option<f64>,
}

/// Best-so-far fitness after each improvisation (or generation).
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub initial_best: f64,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn final_best(&self) -> f64 {
        self.records.last().map_or(self.initial_best, |r| r.best_fitness)
    }

    pub fn is_monotone(&self) -> bool {
        let mut prev = self.initial_best;
        self.records.iter().all(|r| {
            let ok = r.best_fitness >= prev;
            prev = r.best_fitness;
            ok
        })
    }

    /// First iteration whose best fitness reaches `fraction` of the final
    /// best; 0 when the initial population already does.
    pub fn iterations_to_fraction(&self, fraction: f64) -> usize {
        let target = fraction * self.final_best();
        if self.initial_best >= target {
            return 0;
        }
        self.records
            .iter()
            .find(|r| r.best_fitness >= target)
            .map_or(self.records.len(), |r| r.iteration)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best: Harmony,
    pub trace: Trace,
}

/// Full harmony-search run: initialization, then `params.ni` improvisations.
pub fn run<F>(bounds: &Bounds, params: &HsParams, mut cost: F) -> Result<RunOutcome, HsError>
where
    F: FnMut(&[f64]) -> f64,
{
    params.validate(bounds)?;
    let mut rng = rng_from_seed(params.seed);
    let mut hm = init_memory(bounds, params, &mut cost, &mut rng);
    let mut rates = Rates { hmcr: params.hmcr, par: params.par };
    let mut state = DhsState::default();
    let mut records = Vec::with_capacity(params.ni);
    let initial_best = hm.best().fitness;

    for iteration in 1..=params.ni {
        let imp = improvise(&hm, bounds, rates, params, &mut rng);
        let fitness = score(&mut cost, &imp.genes);
        if params.dynamic {
            let pitch_success = imp.pre_adjustment.as_ref().map(|pre| fitness > score(&mut cost, pre));
            state.record(imp.memory_considered(), fitness, pitch_success);
            if let Some(par) = adapt_par(&mut state, rates.par, params.par_bounds) {
                rates.par = par;
            }
            if iteration % WINDOW == 0 {
                if let Some(hmcr) = adapt_hmcr(&mut state, rates.hmcr, params.hmcr_bounds) {
                    rates.hmcr = hmcr;
                }
            }
        }
        hm.update(Harmony { genes: imp.genes, fitness });
        records.push(TraceRecord {
            iteration,
            best_fitness: hm.best().fitness,
            hmcr: Some(rates.hmcr),
            par: Some(rates.par),
        });
    }

    Ok(RunOutcome { best: hm.best().clone(), trace: Trace { initial_best, records } })
}
