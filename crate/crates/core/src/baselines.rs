//! Classical single-formula IDA / β-TT discriminators.

use core::fmt;
use core::str::FromStr;

use crate::data::{CbcSample, Diagnosis};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaselineError {
    #[error("sample is missing {0}")]
    MissingField(&'static str),
    #[error("unknown baseline {0:?}")]
    Unknown(alloc::string::String),
}

/// Which side of the cutoff indicates IDA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdaSide {
    AtOrAbove,
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraditionalIndex {
    /// Mentzer: MCV / RBC.
    Mi,
    /// England & Fraser: MCV − RBC − 5·Hb − 3.4.
    Efi,
    /// Srivastava & Bevington: MCH / RBC.
    Sbi,
    /// Shine & Lal: MCV² × MCH × 0.01.
    Sli,
    /// Sirdah: MCV − RBC − 3·Hb.
    Si,
    /// Ehsani: MCV − 10·RBC.
    Ei,
    /// Green & King: MCV² × RDW × Hb × 0.01.
    Gki,
}

impl TraditionalIndex {
    pub const ALL: [TraditionalIndex; 7] = [
        TraditionalIndex::Mi,
        TraditionalIndex::Efi,
        TraditionalIndex::Sbi,
        TraditionalIndex::Sli,
        TraditionalIndex::Si,
        TraditionalIndex::Ei,
        TraditionalIndex::Gki,
    ];

    pub const fn symbol(self) -> &'static str {
        match self {
            TraditionalIndex::Mi => "MI",
            TraditionalIndex::Efi => "E&FI",
            TraditionalIndex::Sbi => "S&BI",
            TraditionalIndex::Sli => "S&LI",
            TraditionalIndex::Si => "SI",
            TraditionalIndex::Ei => "EI",
            TraditionalIndex::Gki => "G&KI",
        }
    }

    pub const fn cutoff(self) -> f64 {
        match self {
            TraditionalIndex::Mi => 13.0,
            TraditionalIndex::Efi => 0.0,
            TraditionalIndex::Sbi => 3.8,
            TraditionalIndex::Sli => 1530.0,
            TraditionalIndex::Si => 27.0,
            TraditionalIndex::Ei => 15.0,
            TraditionalIndex::Gki => 72.0,
        }
    }

    pub const fn ida_side(self) -> IdaSide {
        IdaSide::AtOrAbove
    }

    pub const fn needs_rdw(self) -> bool {
        matches!(self, TraditionalIndex::Gki)
    }

    pub fn value(self, sample: &CbcSample) -> Result<f64, BaselineError> {
        index_value(self, sample)
    }

    pub fn classify(self, sample: &CbcSample) -> Result<Diagnosis, BaselineError> {
        classify(self, sample)
    }
}

impl fmt::Display for TraditionalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for TraditionalIndex {
    type Err = BaselineError;

    /// Accepts the symbol (`E&FI`) or its letters only (`efi`), any case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fn norm(t: &str) -> impl Iterator<Item = char> + '_ {
            t.chars().filter(|c| c.is_ascii_alphabetic()).map(|c| c.to_ascii_lowercase())
        }
        Self::ALL
            .into_iter()
            .find(|id| norm(id.symbol()).eq(norm(s)))
            .ok_or_else(|| BaselineError::Unknown(s.into()))
    }
}

pub fn index_value(id: TraditionalIndex, s: &CbcSample) -> Result<f64, BaselineError> {
    let v = match id {
        TraditionalIndex::Mi => s.mcv() / s.rbc(),
        TraditionalIndex::Efi => s.mcv() - s.rbc() - 5.0 * s.hb() - 3.4,
        TraditionalIndex::Sbi => s.mch() / s.rbc(),
        TraditionalIndex::Sli => s.mcv() * s.mcv() * s.mch() * 0.01,
        TraditionalIndex::Si => s.mcv() - s.rbc() - 3.0 * s.hb(),
        TraditionalIndex::Ei => s.mcv() - 10.0 * s.rbc(),
        TraditionalIndex::Gki => {
            let rdw = s.rdw().ok_or(BaselineError::MissingField("RDW"))?;
            s.mcv() * s.mcv() * rdw * s.hb() * 0.01
        }
    };
    Ok(v)
}

/// Values exactly at the cutoff go to IDA.
pub fn classify(id: TraditionalIndex, s: &CbcSample) -> Result<Diagnosis, BaselineError> {
    let v = index_value(id, s)?;
    let ida = match id.ida_side() {
        IdaSide::AtOrAbove => v >= id.cutoff(),
        IdaSide::Below => v < id.cutoff(),
    };
    Ok(if ida { Diagnosis::Ida } else { Diagnosis::Btt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{table2_fixture, ClassTag, Label};

    fn sample(rbc: f64, hb: f64, mcv: f64, mch: f64, rdw: Option<f64>) -> CbcSample {
        CbcSample::new([rbc, hb, 35.0, mcv, mch, 32.0], rdw, Some(Label::Btt), None).unwrap()
    }

    #[test]
    fn first_reference_row() {
        let f = table2_fixture();
        let row = &f.samples()[0];
        assert_eq!(row.mcv(), 62.6);
        assert!((index_value(TraditionalIndex::Mi, row).unwrap() - 11.528545119705341).abs() < 1e-12);
        assert!((index_value(TraditionalIndex::Ei, row).unwrap() - 8.3).abs() < 1e-12);
        assert_eq!(classify(TraditionalIndex::Mi, row).unwrap(), Diagnosis::Btt);
        assert_eq!(index_value(TraditionalIndex::Gki, row), Err(BaselineError::MissingField("RDW")));
    }

    #[test]
    fn class_two_ida_row() {
        let f = table2_fixture();
        let row = f
            .iter()
            .find(|s| s.class_tag() == Some(ClassTag::II) && s.label() == Some(Label::Ida))
            .unwrap();
        assert_eq!((row.rbc(), row.mcv()), (4.73, 69.9));
        assert_eq!(classify(TraditionalIndex::Mi, row).unwrap(), Diagnosis::Ida);
        assert!((index_value(TraditionalIndex::Ei, row).unwrap() - 22.6).abs() < 1e-9);
        assert_eq!(classify(TraditionalIndex::Ei, row).unwrap(), Diagnosis::Ida);
    }

    #[test]
    fn boundary_goes_to_ida() {
        let s = sample(5.0, 14.0, 65.0, 19.0, None);
        assert_eq!(index_value(TraditionalIndex::Mi, &s).unwrap(), 13.0);
        assert_eq!(classify(TraditionalIndex::Mi, &s).unwrap(), Diagnosis::Ida);
        assert_eq!(index_value(TraditionalIndex::Sbi, &s).unwrap(), 3.8);
        assert_eq!(classify(TraditionalIndex::Sbi, &s).unwrap(), Diagnosis::Ida);
        assert_eq!(classify(TraditionalIndex::Ei, &s).unwrap(), Diagnosis::Ida);
    }

    #[test]
    fn formulas() {
        let s = sample(5.0, 12.0, 70.0, 22.0, Some(15.0));
        assert!((index_value(TraditionalIndex::Efi, &s).unwrap() - 1.6).abs() < 1e-12);
        assert!((index_value(TraditionalIndex::Sli, &s).unwrap() - 1078.0).abs() < 1e-9);
        assert_eq!(index_value(TraditionalIndex::Si, &s).unwrap(), 29.0);
        assert!((index_value(TraditionalIndex::Gki, &s).unwrap() - 8820.0).abs() < 1e-9);
    }

    #[test]
    fn symbols_round_trip() {
        for id in TraditionalIndex::ALL {
            assert_eq!(id.symbol().parse::<TraditionalIndex>().unwrap(), id);
        }
        assert_eq!("gki".parse::<TraditionalIndex>().unwrap(), TraditionalIndex::Gki);
        assert!("xyz".parse::<TraditionalIndex>().is_err());
    }
}
