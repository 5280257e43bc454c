//! Confusion matrices and diagnostic metrics with IDA as the positive class.

use crate::data::{Diagnosis, Label};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("{predictions} predictions but {truths} truths")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("nothing to evaluate")]
    Empty,
    #[error("truth at position {0} is NORMAL; exclude NORMAL samples first")]
    NormalTruth(usize),
    #[error("truth at position {0} is missing")]
    MissingTruth(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    pub true_positive: u64,
    pub true_negative: u64,
    pub false_positive: u64,
    pub false_negative: u64,
}

impl ConfusionMatrix {
    pub const fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        Self { true_positive: tp, true_negative: tn, false_positive: fp, false_negative: fn_ }
    }

    pub fn total(&self) -> u64 {
        self.true_positive + self.true_negative + self.false_positive + self.false_negative
    }

    /// The same matrix with BTT taken as the positive class.
    pub fn swapped(&self) -> Self {
        Self::new(self.true_negative, self.true_positive, self.false_negative, self.false_positive)
    }

    pub fn record(&mut self, predicted: Diagnosis, truth: Diagnosis) {
        match (predicted, truth) {
            (Diagnosis::Ida, Diagnosis::Ida) => self.true_positive += 1,
            (Diagnosis::Btt, Diagnosis::Btt) => self.true_negative += 1,
            (Diagnosis::Ida, Diagnosis::Btt) => self.false_positive += 1,
            (Diagnosis::Btt, Diagnosis::Ida) => self.false_negative += 1,
        }
    }
}

pub fn confusion(predictions: &[Diagnosis], truths: &[Option<Label>]) -> Result<ConfusionMatrix, MetricsError> {
    if predictions.len() != truths.len() {
        return Err(MetricsError::LengthMismatch { predictions: predictions.len(), truths: truths.len() });
    }
    if predictions.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (i, (&p, &t)) in predictions.iter().zip(truths).enumerate() {
        let truth = match t {
            Some(Label::Ida) => Diagnosis::Ida,
            Some(Label::Btt) => Diagnosis::Btt,
            Some(Label::Normal) => return Err(MetricsError::NormalTruth(i)),
            None => return Err(MetricsError::MissingTruth(i)),
        };
        cm.record(p, truth);
    }
    Ok(cm)
}

/// Percentages at full precision. A metric whose denominator is zero is
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricReport {
    pub sens: Option<f64>,
    pub spec: Option<f64>,
    pub ppv: Option<f64>,
    pub npv: Option<f64>,
    pub acc: Option<f64>,
    pub yi: Option<f64>,
}

fn percent(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

pub fn report(cm: &ConfusionMatrix) -> MetricReport {
    let ConfusionMatrix { true_positive: tp, true_negative: tn, false_positive: fp, false_negative: fn_ } = *cm;
    let sens = percent(tp, tp + fn_);
    let spec = percent(tn, tn + fp);
    MetricReport {
        sens,
        spec,
        ppv: percent(tp, tp + fp),
        npv: percent(tn, tn + fn_),
        acc: percent(tp + tn, cm.total()),
        yi: sens.zip(spec).map(|(a, b)| a + b - 100.0),
    }
}

impl MetricReport {
    /// `[sens, spec, ppv, npv, acc, yi]`.
    pub fn values(&self) -> [Option<f64>; 6] {
        [self.sens, self.spec, self.ppv, self.npv, self.acc, self.yi]
    }

    pub fn rounded(&self) -> [Option<f64>; 6] {
        self.values().map(|v| v.map(round1))
    }
}

pub const METRIC_NAMES: [&str; 6] = ["sens", "spec", "ppv", "npv", "acc", "yi"];

/// Rounds half away from zero to one decimal.
pub fn round1(x: f64) -> f64 {
    libm::round(x * 10.0) / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_and_total_miss() {
        let truths = vec![Some(Label::Ida); 7];
        assert_eq!(confusion(&[Diagnosis::Ida; 7], &truths).unwrap(), ConfusionMatrix::new(7, 0, 0, 0));
        assert_eq!(confusion(&[Diagnosis::Btt; 7], &truths).unwrap(), ConfusionMatrix::new(0, 0, 0, 7));
    }

    #[test]
    fn counting_matches_flat_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pick = |b: bool| if b { Diagnosis::Ida } else { Diagnosis::Btt };
        let preds: Vec<Diagnosis> = (0..50).map(|_| pick(rng.random())).collect();
        let truth_d: Vec<Diagnosis> = (0..50).map(|_| pick(rng.random())).collect();
        let truths: Vec<Option<Label>> = truth_d.iter().map(|&d| Some(d.into())).collect();
        let mut counts = [0u64; 4];
        for i in 0..50 {
            let slot = match (preds[i] == Diagnosis::Ida, truth_d[i] == Diagnosis::Ida) {
                (true, true) => 0,
                (false, false) => 1,
                (true, false) => 2,
                (false, true) => 3,
            };
            counts[slot] += 1;
        }
        assert_eq!(confusion(&preds, &truths).unwrap(), ConfusionMatrix::new(counts[0], counts[1], counts[2], counts[3]));
    }

    #[test]
    fn confusion_errors() {
        assert_eq!(
            confusion(&[Diagnosis::Ida], &[]),
            Err(MetricsError::LengthMismatch { predictions: 1, truths: 0 })
        );
        assert_eq!(confusion(&[], &[]), Err(MetricsError::Empty));
        assert_eq!(
            confusion(&[Diagnosis::Ida, Diagnosis::Btt], &[Some(Label::Ida), Some(Label::Normal)]),
            Err(MetricsError::NormalTruth(1))
        );
        assert_eq!(confusion(&[Diagnosis::Ida], &[None]), Err(MetricsError::MissingTruth(0)));
    }

    #[test]
    fn best_configuration_row() {
        let r = report(&ConfusionMatrix::new(201, 191, 2, 6)).rounded();
        assert_eq!(r, [Some(97.1), Some(99.0), Some(99.0), Some(97.0), Some(98.0), Some(96.1)]);
    }

    #[test]
    fn mentzer_row() {
        let r = report(&ConfusionMatrix::new(175, 165, 28, 32)).rounded();
        assert_eq!(r[0], Some(84.5));
        assert_eq!(r[1], Some(85.5));
        assert_eq!(r[4], Some(85.0));
        assert_eq!(r[5], Some(70.0));
    }

    #[test]
    fn absent_denominators() {
        let r = report(&ConfusionMatrix::new(0, 9, 0, 0));
        assert_eq!(r.sens, None);
        assert_eq!(r.spec, Some(100.0));
        assert_eq!(r.ppv, None);
        assert_eq!(r.npv, Some(100.0));
        assert_eq!(r.acc, Some(100.0));
        assert_eq!(r.yi, None);
    }

    #[test]
    fn swapping_swaps_pairs() {
        let cm = ConfusionMatrix::new(13, 8, 3, 5);
        let (a, b) = (report(&cm), report(&cm.swapped()));
        assert_eq!((a.sens, a.spec, a.ppv, a.npv, a.acc), (b.spec, b.sens, b.npv, b.ppv, b.acc));
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round1(0.25), 0.3);
        assert_eq!(round1(-0.25), -0.3);
        assert_eq!(round1(98.75), 98.8);
        assert_eq!(round1(96.14), 96.1);
    }
}
