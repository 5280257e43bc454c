//! Bivariate Kolmogorov–Gabor polynomials and fixed four-leaf tree schemes.
//!
//! Every non-leaf node of a tree is the complete six-term quadratic
//!
//! ```text
//! f(x1, x2) = a0 + a1·x1 + a2·x2 + a3·x1·x2 + a4·x1² + a5·x2²
//! ```
//!
//! A [`TreeGenome`] packs the three node polynomials (f1, f2, f3, six
//! coefficients each, in that order) and the id of one of the 15
//! [`TreeScheme`]s that wire the four inputs to the leaves.

use alloc::vec::Vec;
use core::fmt;

pub const SCHEME_COUNT: usize = 15;
pub const NODE_TERMS: usize = 6;
pub const COEFFICIENT_COUNT: usize = 3 * NODE_TERMS;
/// 18 coefficients followed by the scheme id.
pub const GENOME_LEN: usize = COEFFICIENT_COUNT + 1;

/// Leaf names for input slots 0..4 under the default input selection.
pub const LEAF_NAMES: [&str; 4] = ["RBC", "Hb", "HCT", "MCV"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("basis form must be in 1..=16, got {0}")]
    UnknownForm(usize),
    #[error("basis form {form} takes {expected} coefficients, got {got}")]
    CoefficientCount { form: usize, expected: usize, got: usize },
    #[error("tree scheme id must be in 0..15, got {0}")]
    UnknownScheme(usize),
    #[error("scheme gene {0} is not an integer id")]
    NonIntegralScheme(f64),
    #[error("genome needs {GENOME_LEN} genes, got {0}")]
    GenomeLength(usize),
    #[error("polynomial evaluation overflowed")]
    Overflow,
}

/// One monomial of the six-term quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    One,
    X1,
    X2,
    X1X2,
    X1Sq,
    X2Sq,
}

impl Term {
    /// Position of this monomial in the full quadratic.
    pub const fn full_position(self) -> usize {
        match self {
            Term::One => 0,
            Term::X1 => 1,
            Term::X2 => 2,
            Term::X1X2 => 3,
            Term::X1Sq => 4,
            Term::X2Sq => 5,
        }
    }

    #[inline]
    pub fn eval(self, x1: f64, x2: f64) -> f64 {
        match self {
            Term::One => 1.0,
            Term::X1 => x1,
            Term::X2 => x2,
            Term::X1X2 => x1 * x2,
            Term::X1Sq => x1 * x1,
            Term::X2Sq => x2 * x2,
        }
    }
}

use Term::*;

const FORMS: [&[Term]; 16] = [
    &[One, X1, X2, X1X2],
    &[One, X1, X2],
    &[One, X1, X2, X1Sq, X2Sq],
    &[One, X1, X1X2, X1Sq],
    &[One, X1, X2Sq],
    &[One, X1, X2, X1Sq],
    &[One, X1, X1Sq, X2Sq],
    &[One, X1Sq, X2Sq],
    &[One, X1, X2, X1X2, X1Sq, X2Sq],
    &[One, X1, X2, X1X2, X1Sq],
    &[One, X1, X1X2, X1Sq, X2Sq],
    &[One, X1X2, X1Sq, X2Sq],
    &[One, X1, X1X2, X2Sq],
    &[One, X1, X1X2],
    &[One, X1X2],
    &[One, X1X2, X1Sq],
];

/// One of the sixteen reduced bivariate quadratic forms (ids 1..=16).
/// Form 9 is the complete quadratic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisForm(u8);

impl BasisForm {
    pub const FULL: BasisForm = BasisForm(9);

    pub fn new(id: usize) -> Result<Self, PolyError> {
        if (1..=FORMS.len()).contains(&id) {
            Ok(BasisForm(id as u8))
        } else {
            Err(PolyError::UnknownForm(id))
        }
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn terms(self) -> &'static [Term] {
        FORMS[self.0 as usize - 1]
    }

    pub fn term_count(self) -> usize {
        self.terms().len()
    }

    pub fn all() -> impl Iterator<Item = BasisForm> {
        (1..=FORMS.len() as u8).map(BasisForm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisPoly {
    form: BasisForm,
    coefficients: Vec<f64>,
}

impl BasisPoly {
    pub fn new(form: BasisForm, coefficients: Vec<f64>) -> Result<Self, PolyError> {
        if coefficients.len() != form.term_count() {
            return Err(PolyError::CoefficientCount {
                form: form.id(),
                expected: form.term_count(),
                got: coefficients.len(),
            });
        }
        Ok(Self { form, coefficients })
    }

    pub fn form(&self) -> BasisForm {
        self.form
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Coefficients of the same polynomial written in the complete form.
    pub fn to_full(&self) -> [f64; NODE_TERMS] {
        let mut full = [0.0; NODE_TERMS];
        for (term, a) in self.form.terms().iter().zip(&self.coefficients) {
            full[term.full_position()] = *a;
        }
        full
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Result<f64, PolyError> {
        let y: f64 = self
            .form
            .terms()
            .iter()
            .zip(&self.coefficients)
            .map(|(t, a)| a * t.eval(x1, x2))
            .sum();
        finite(y)
    }
}

/// Evaluates `poly` at `(x1, x2)`.
pub fn eval_basis(poly: &BasisPoly, x1: f64, x2: f64) -> Result<f64, PolyError> {
    poly.eval(x1, x2)
}

#[inline]
fn finite(y: f64) -> Result<f64, PolyError> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(PolyError::Overflow)
    }
}

/// Complete quadratic with coefficients in [`Term`] position order.
#[inline]
pub fn quadratic(a: &[f64; NODE_TERMS], x1: f64, x2: f64) -> f64 {
    a[0] + a[1] * x1 + a[2] * x2 + a[3] * x1 * x2 + a[4] * x1 * x1 + a[5] * x2 * x2
}

/// How the four input slots are wired into the three nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeShape {
    /// `f1(f2(l0, l1), f3(r0, r1))`
    Balanced { left: [u8; 2], right: [u8; 2] },
    /// `f1(f2(f3(i0, i1), middle), outer)`
    LeftDeep { inner: [u8; 2], middle: u8, outer: u8 },
}

const fn bal(l0: u8, l1: u8, r0: u8, r1: u8) -> TreeShape {
    TreeShape::Balanced { left: [l0, l1], right: [r0, r1] }
}

const fn deep(i0: u8, i1: u8, middle: u8, outer: u8) -> TreeShape {
    TreeShape::LeftDeep { inner: [i0, i1], middle, outer }
}

// Slots: 0 = RBC, 1 = Hb, 2 = HCT, 3 = MCV.
const SCHEMES: [TreeShape; SCHEME_COUNT] = [
    bal(0, 1, 2, 3),
    bal(0, 2, 1, 3),
    bal(0, 3, 1, 2),
    deep(0, 1, 2, 3),
    deep(0, 1, 3, 2),
    deep(0, 2, 1, 3),
    deep(0, 2, 3, 1),
    deep(0, 3, 1, 2),
    deep(0, 3, 2, 1),
    deep(1, 2, 0, 3),
    deep(1, 2, 3, 0),
    deep(1, 3, 0, 2),
    deep(1, 3, 2, 0),
    deep(2, 3, 0, 1),
    deep(2, 3, 1, 0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeScheme {
    id: u8,
    shape: TreeShape,
}

/// Scheme `id` (0..15) with its composition.
pub fn decode_scheme(id: usize) -> Result<TreeScheme, PolyError> {
    SCHEMES
        .get(id)
        .map(|&shape| TreeScheme { id: id as u8, shape })
        .ok_or(PolyError::UnknownScheme(id))
}

impl TreeScheme {
    pub fn id(&self) -> usize {
        self.id as usize
    }

    pub fn shape(&self) -> TreeShape {
        self.shape
    }

    pub fn all() -> impl Iterator<Item = TreeScheme> {
        (0..SCHEME_COUNT).map(|id| decode_scheme(id).expect("in range"))
    }

    /// Unchecked evaluation; the result may be non-finite.
    #[inline]
    pub fn evaluate(&self, nodes: [&[f64; NODE_TERMS]; 3], x: &[f64; 4]) -> f64 {
        let [f1, f2, f3] = nodes;
        match self.shape {
            TreeShape::Balanced { left, right } => {
                let l = quadratic(f2, x[left[0] as usize], x[left[1] as usize]);
                let r = quadratic(f3, x[right[0] as usize], x[right[1] as usize]);
                quadratic(f1, l, r)
            }
            TreeShape::LeftDeep { inner, middle, outer } => {
                let i = quadratic(f3, x[inner[0] as usize], x[inner[1] as usize]);
                let m = quadratic(f2, i, x[middle as usize]);
                quadratic(f1, m, x[outer as usize])
            }
        }
    }
}

impl fmt::Display for TreeScheme {
    /// Renders the composition with the default leaf names,
    /// e.g. `f1(f2(RBC, Hb), f3(HCT, MCV))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |s: u8| LEAF_NAMES[s as usize];
        match self.shape {
            TreeShape::Balanced { left, right } => write!(
                f,
                "f1(f2({}, {}), f3({}, {}))",
                n(left[0]),
                n(left[1]),
                n(right[0]),
                n(right[1])
            ),
            TreeShape::LeftDeep { inner, middle, outer } => write!(
                f,
                "f1(f2(f3({}, {}), {}), {})",
                n(inner[0]),
                n(inner[1]),
                n(middle),
                n(outer)
            ),
        }
    }
}

/// Scheme id plus 18 node coefficients (f1, f2, f3 groups of six).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeGenome {
    scheme: TreeScheme,
    coefficients: [f64; COEFFICIENT_COUNT],
}

impl TreeGenome {
    pub fn new(scheme_id: usize, coefficients: [f64; COEFFICIENT_COUNT]) -> Result<Self, PolyError> {
        Ok(Self { scheme: decode_scheme(scheme_id)?, coefficients })
    }

    /// Decodes a flat 19-gene harmony (coefficients first, scheme id last).
    pub fn from_genes(genes: &[f64]) -> Result<Self, PolyError> {
        if genes.len() != GENOME_LEN {
            return Err(PolyError::GenomeLength(genes.len()));
        }
        let raw = genes[COEFFICIENT_COUNT];
        if !(raw.is_finite() && raw >= 0.0 && raw == libm::trunc(raw)) {
            return Err(PolyError::NonIntegralScheme(raw));
        }
        let mut coefficients = [0.0; COEFFICIENT_COUNT];
        coefficients.copy_from_slice(&genes[..COEFFICIENT_COUNT]);
        Self::new(raw as usize, coefficients)
    }

    pub fn to_genes(&self) -> [f64; GENOME_LEN] {
        let mut genes = [0.0; GENOME_LEN];
        genes[..COEFFICIENT_COUNT].copy_from_slice(&self.coefficients);
        genes[COEFFICIENT_COUNT] = self.scheme.id() as f64;
        genes
    }

    pub fn scheme(&self) -> TreeScheme {
        self.scheme
    }

    pub fn coefficients(&self) -> &[f64; COEFFICIENT_COUNT] {
        &self.coefficients
    }

    /// Coefficients of node `f{k+1}` for `k` in 0..3.
    pub fn node(&self, k: usize) -> &[f64; NODE_TERMS] {
        self.coefficients[k * NODE_TERMS..(k + 1) * NODE_TERMS]
            .try_into()
            .expect("six coefficients per node")
    }

    /// Tree output for inputs in slot order (RBC, Hb, HCT, MCV by default).
    pub fn eval_tree(&self, inputs: &[f64; 4]) -> Result<f64, PolyError> {
        let nodes = [self.node(0), self.node(1), self.node(2)];
        // A non-finite intermediate always propagates to the root (inf·0 gives
        // NaN), so checking the root output is enough.
        finite(self.scheme.evaluate(nodes, inputs))
    }
}

/// Evaluates `genome` on `inputs`.
pub fn eval_tree(genome: &TreeGenome, inputs: &[f64; 4]) -> Result<f64, PolyError> {
    genome.eval_tree(inputs)
}
