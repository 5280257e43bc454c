//! Seeded synthetic cohorts drawn from class-conditional Gaussians.
//!
//! Per-index means and sample standard deviations come from the class III
//! rows of the reference fixture (five per class). Indices are drawn
//! independently; five rows are too few for a usable covariance estimate, so
//! the generated cohort is only an approximation of real CBC structure.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{table2_fixture, CbcIndex, CbcSample, ClassTag, Cohort, DataError, Label};

/// Mean and sample standard deviation (n − 1) of each index for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassProfile {
    pub mean: [f64; 6],
    pub std_dev: [f64; 6],
}

/// Profile of the `label` samples tagged `class` in `cohort`.
///
/// Returns `None` when fewer than two matching samples exist.
pub fn class_profile(cohort: &Cohort, label: Label, class: ClassTag) -> Option<ClassProfile> {
    let rows: Vec<&CbcSample> = cohort
        .iter()
        .filter(|s| s.label() == Some(label) && s.class_tag() == Some(class))
        .collect();
    if rows.len() < 2 {
        return None;
    }
    let n = rows.len() as f64;
    let mut mean = [0.0; 6];
    let mut std_dev = [0.0; 6];
    for idx in CbcIndex::ALL {
        let p = idx.position();
        let m = rows.iter().map(|s| s.value(idx)).sum::<f64>() / n;
        let ss = rows.iter().map(|s| (s.value(idx) - m) * (s.value(idx) - m)).sum::<f64>();
        mean[p] = m;
        std_dev[p] = libm::sqrt(ss / (n - 1.0));
    }
    Some(ClassProfile { mean, std_dev })
}

fn draw_sample<R: Rng>(profile: &ClassProfile, label: Label, rng: &mut R) -> CbcSample {
    let mut values = [0.0; 6];
    for (p, v) in values.iter_mut().enumerate() {
        let normal = Normal::new(profile.mean[p], profile.std_dev[p]).expect("profile std is finite");
        // Truncate to strictly positive values by rejection.
        *v = loop {
            let x: f64 = normal.sample(rng);
            if x > 0.0 && x.is_finite() {
                break x;
            }
        };
    }
    CbcSample::new(values, None, Some(label), Some(ClassTag::III)).expect("draws are positive")
}

/// `n_ida` IDA samples followed by `n_btt` β-TT samples, all tagged class III.
pub fn generate_synthetic_cohort(n_ida: usize, n_btt: usize, seed: u64) -> Result<Cohort, DataError> {
    if n_ida == 0 || n_btt == 0 {
        return Err(DataError::ZeroCount);
    }
    let fixture = table2_fixture();
    let ida = class_profile(&fixture, Label::Ida, ClassTag::III).expect("fixture has class III IDA rows");
    let btt = class_profile(&fixture, Label::Btt, ClassTag::III).expect("fixture has class III BTT rows");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_ida + n_btt);
    samples.extend((0..n_ida).map(|_| draw_sample(&ida, Label::Ida, &mut rng)));
    samples.extend((0..n_btt).map(|_| draw_sample(&btt, Label::Btt, &mut rng)));
    Cohort::new(samples, alloc::format!("synthetic(n_ida={n_ida}, n_btt={n_btt}, seed={seed})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen from an independent computation (Python `statistics.mean`/`stdev`)
    // over the five class III rows of each label.
    const BTT_MEAN: [f64; 6] = [5.38, 11.4, 38.86, 72.62, 21.32, 29.36];
    const BTT_STD: [f64; 6] = [
        0.8853530369293371,
        1.2999999999999998,
        4.433170423071956,
        4.300813876465704,
        1.2637246535539308,
        0.43358966777357677,
    ];
    const IDA_MEAN: [f64; 6] = [4.974, 12.22, 38.96, 78.32, 24.56, 30.84];
    const IDA_STD: [f64; 6] = [
        0.1230040649734797,
        0.7259476565152612,
        0.9126883367283707,
        1.112205017071943,
        1.1802542099056448,
        0.8080841540334764,
    ];

    #[test]
    fn profiles_match_frozen_statistics() {
        let f = table2_fixture();
        for (label, mean, sd) in [(Label::Btt, BTT_MEAN, BTT_STD), (Label::Ida, IDA_MEAN, IDA_STD)] {
            let p = class_profile(&f, label, ClassTag::III).unwrap();
            for i in 0..6 {
                assert!((p.mean[i] - mean[i]).abs() < 1e-9, "{label} mean {i}");
                assert!((p.std_dev[i] - sd[i]).abs() < 1e-9, "{label} std {i}");
            }
        }
    }

    #[test]
    fn seed_determinism_and_counts() {
        let a = generate_synthetic_cohort(100, 100, 1).unwrap();
        let b = generate_synthetic_cohort(100, 100, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.count_label(Label::Ida), 100);
        assert_eq!(a.count_label(Label::Btt), 100);
        assert_ne!(a, generate_synthetic_cohort(100, 100, 2).unwrap());
        assert!(a.iter().all(|s| s.class_tag() == Some(ClassTag::III)));
    }

    #[test]
    fn one_of_each() {
        let c = generate_synthetic_cohort(1, 1, 99).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.samples()[0].label(), Some(Label::Ida));
        assert_eq!(c.samples()[1].label(), Some(Label::Btt));
    }

    #[test]
    fn zero_count_rejected() {
        assert_eq!(generate_synthetic_cohort(0, 10, 1), Err(DataError::ZeroCount));
    }

    #[test]
    fn large_draw_tracks_profile_means() {
        let c = generate_synthetic_cohort(4000, 4000, 5).unwrap();
        let btt: Vec<_> = c.iter().filter(|s| s.label() == Some(Label::Btt)).collect();
        let m = btt.iter().map(|s| s.rbc()).sum::<f64>() / btt.len() as f64;
        assert!((m - BTT_MEAN[0]).abs() < 0.05, "{m}");
    }
}
