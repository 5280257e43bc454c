use alloc::vec::Vec;

use super::{CbcSample, ClassTag, Cohort, Label};

// RBC, Hb, HCT, MCV, MCH, MCHC, class, label
const ROWS: [([f64; 6], ClassTag, Label); 20] = [
    ([5.43, 10.2, 34.0, 62.6, 18.8, 30.0], ClassTag::II, Label::Btt),
    ([6.13, 12.5, 40.1, 65.4, 20.4, 31.2], ClassTag::II, Label::Btt),
    ([6.8, 12.6, 43.4, 63.8, 18.5, 29.0], ClassTag::II, Label::Btt),
    ([4.73, 10.1, 38.7, 69.9, 19.7, 30.3], ClassTag::II, Label::Ida),
    ([4.13, 8.2, 38.4, 71.8, 19.9, 28.9], ClassTag::II, Label::Ida),
    ([4.61, 12.8, 38.9, 84.4, 27.8, 32.9], ClassTag::I, Label::Normal),
    ([4.36, 13.1, 39.7, 91.1, 30.0, 33.0], ClassTag::I, Label::Normal),
    ([4.77, 13.3, 39.7, 83.2, 27.9, 33.5], ClassTag::I, Label::Normal),
    ([3.99, 11.4, 35.1, 88.0, 28.6, 32.5], ClassTag::I, Label::Normal),
    ([4.4, 13.7, 40.5, 92.0, 31.1, 33.8], ClassTag::I, Label::Normal),
    ([6.62, 13.1, 43.9, 65.9, 19.7, 29.8], ClassTag::III, Label::Btt),
    ([4.56, 10.3, 34.7, 76.1, 22.6, 29.7], ClassTag::III, Label::Btt),
    ([5.95, 12.5, 43.4, 72.8, 21.0, 28.9], ClassTag::III, Label::Btt),
    ([4.65, 10.5, 35.6, 76.6, 22.6, 29.5], ClassTag::III, Label::Btt),
    ([5.12, 10.6, 36.7, 71.7, 20.7, 28.9], ClassTag::III, Label::Btt),
    ([4.81, 11.6, 37.6, 78.2, 24.1, 30.9], ClassTag::III, Label::Ida),
    ([5.05, 11.5, 38.8, 76.8, 22.8, 29.6], ClassTag::III, Label::Ida),
    ([4.88, 12.1, 38.8, 79.5, 24.8, 31.2], ClassTag::III, Label::Ida),
    ([5.03, 12.7, 39.9, 79.3, 25.2, 31.8], ClassTag::III, Label::Ida),
    ([5.1, 13.2, 39.7, 77.8, 25.9, 30.7], ClassTag::III, Label::Ida),
];

/// The twenty published reference CBC panels (5 class II, 5 class I,
/// 10 class III), in publication order. No RDW values are available.
pub fn table2_fixture() -> Cohort {
    let samples: Vec<CbcSample> = ROWS
        .iter()
        .map(|(v, class, label)| {
            CbcSample::new(*v, None, Some(*label), Some(*class)).expect("fixture rows are valid")
        })
        .collect();
    Cohort::new(samples, "reference table").expect("fixture is non-empty")
}
