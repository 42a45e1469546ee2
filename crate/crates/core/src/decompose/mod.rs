//! Certified decompositions of `n` into `h` parts drawn from the cells of a
//! partition, plus an independent certificate checker.
//!
//! Two decomposers are provided: [`decompose_thm1`] writes every `n > m_2` as
//! a sum of `h` elements of `A \ {g^2}` for the sparse-interval partition, and
//! [`decompose_thm2`] writes every `n >= h` as a sum of `h` elements of
//! `A_g(W_0)` for the periodic partition. Each returns a
//! [`DecompositionCertificate`] carrying the parts and a trace of the case
//! analysis that produced them.

mod groups;
mod thm1;
mod thm2;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decimal;
use crate::gadic::{self, GadicError, GadicExpansion};
use crate::partition::{PartitionError, PartitionSpec};

pub use groups::split_groups;
pub use thm1::{
    classify_case, decompose_thm1, sample_expansion, sample_for_case, Thm1Case, Thm1Decomposer,
};
pub use thm2::{decompose_thm2, Thm2Decomposer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("n = {n} is out of range: need n {requirement}")]
    OutOfRange { n: String, requirement: String },
    #[error(transparent)]
    InvalidParams(#[from] PartitionError),
    #[error(transparent)]
    Gadic(#[from] GadicError),
    #[error("infeasible grouping: {0}")]
    Infeasible(String),
    #[error("unknown case label {0:?}")]
    UnknownCase(String),
    #[error("case {label} is unreachable: {reason}")]
    Unreachable { label: String, reason: String },
    #[error("invariant violated: {what}")]
    InvariantViolation {
        what: String,
        trace: Box<DecompositionTrace>,
    },
}

/// One level of a recursive decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(with = "decimal::big")]
    pub n: BigUint,
    pub case: String,
    pub scalars: BTreeMap<String, u64>,
    /// Amount subtracted before recursing, when the step recurses.
    #[serde(with = "decimal::big_opt")]
    pub subtracted: Option<BigUint>,
    /// Named value lists such as the `b_j`, `b'_j`, `r_j` or `c_j`.
    #[serde(serialize_with = "ser_values", deserialize_with = "de_values")]
    pub values: BTreeMap<String, Vec<BigUint>>,
    /// Inequalities re-checked at this step, all of which held.
    pub inequalities: Vec<String>,
}

fn ser_values<S: serde::Serializer>(v: &BTreeMap<String, Vec<BigUint>>, s: S) -> Result<S::Ok, S::Error> {
    let strs: BTreeMap<&str, Vec<String>> = v
        .iter()
        .map(|(k, xs)| (k.as_str(), xs.iter().map(|x| x.to_str_radix(10)).collect()))
        .collect();
    strs.serialize(s)
}

fn de_values<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Vec<BigUint>>, D::Error> {
    let strs = BTreeMap::<String, Vec<String>>::deserialize(d)?;
    strs.into_iter()
        .map(|(k, xs)| {
            let vals = xs
                .iter()
                .map(|x| decimal::parse(x).ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {x:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((k, vals))
        })
        .collect()
}

/// Case analysis behind a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DecompositionTrace {
    /// Case label of the outermost step, e.g. `"2.3-k3"` or `"1.1"`.
    pub case: String,
    /// Set when a generalized construction replaced the textbook display.
    pub variant: Option<String>,
    pub scalars: BTreeMap<String, u64>,
    /// The exponents `f_0 > f_1 > …` the case works with.
    pub exponents: Vec<u64>,
    /// Exponent groups `L_i` when the case splits a support.
    pub groups: Vec<Vec<u64>>,
    pub inequalities: Vec<String>,
    /// Recursion chain, outermost first (recursive decompositions only).
    pub steps: Vec<TraceStep>,
}

impl DecompositionTrace {
    pub(crate) fn new(case: impl Into<String>) -> Self {
        Self {
            case: case.into(),
            ..Self::default()
        }
    }

    /// Records `label` and fails with an invariant violation when `ok` is false.
    pub(crate) fn check(&mut self, ok: bool, label: impl Into<String>) -> Result<(), DecomposeError> {
        let label = label.into();
        if ok {
            self.inequalities.push(label);
            Ok(())
        } else {
            Err(DecomposeError::InvariantViolation {
                what: label,
                trace: Box::new(self.clone()),
            })
        }
    }
}

/// `h` parts summing to `n`, each supported in a single partition cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionCertificate {
    pub g: u32,
    pub h: u32,
    pub n: GadicExpansion,
    pub parts: Vec<GadicExpansion>,
    /// Cell claimed for each part's support.
    pub part_cells: Vec<u32>,
    /// A value no part may equal.
    pub forbidden: Option<GadicExpansion>,
    /// When set, every part must lie in this cell.
    pub target_cell: Option<u32>,
    pub trace: DecompositionTrace,
}

impl DecompositionCertificate {
    pub fn sorted_parts(&self) -> Vec<GadicExpansion> {
        let mut p = self.parts.clone();
        p.sort();
        p
    }

    pub fn parts_big(&self) -> Vec<BigUint> {
        self.parts.iter().map(GadicExpansion::evaluate).collect()
    }

    pub fn n_big(&self) -> BigUint {
        self.n.evaluate()
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    #[serde(with = "decimal::big")]
    n: BigUint,
    g: u32,
    h: u32,
    #[serde(with = "decimal::big_vec")]
    parts: Vec<BigUint>,
    #[serde(default, with = "decimal::big_vec", skip_deserializing)]
    sorted_parts: Vec<BigUint>,
    part_cells: Vec<u32>,
    #[serde(with = "decimal::big_opt")]
    forbidden: Option<BigUint>,
    #[serde(default)]
    target_cell: Option<u32>,
    trace: DecompositionTrace,
}

impl Serialize for DecompositionCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertificateJson {
            n: self.n.evaluate(),
            g: self.g,
            h: self.h,
            parts: self.parts_big(),
            sorted_parts: self.sorted_parts().iter().map(GadicExpansion::evaluate).collect(),
            part_cells: self.part_cells.clone(),
            forbidden: self.forbidden.as_ref().map(GadicExpansion::evaluate),
            target_cell: self.target_cell,
            trace: self.trace.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DecompositionCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = CertificateJson::deserialize(d)?;
        let ex = |x: &BigUint| gadic::expand(x, j.g).map_err(serde::de::Error::custom);
        Ok(Self {
            g: j.g,
            h: j.h,
            n: ex(&j.n)?,
            parts: j.parts.iter().map(ex).collect::<Result<_, _>>()?,
            part_cells: j.part_cells.clone(),
            forbidden: j.forbidden.as_ref().map(ex).transpose()?,
            target_cell: j.target_cell,
            trace: j.trace.clone(),
        })
    }
}

/// The first certificate clause that fails, in checking order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "kebab-case")]
pub enum Violation {
    BaseMismatch { expected: u32, found: u32 },
    PartCount { expected: u32, found: usize },
    CellCount { expected: usize, found: usize },
    EmptyPart { part: usize },
    ForbiddenElement { part: usize },
    WrongCell { part: usize, declared: u32, required: u32 },
    CellMembership { part: usize, exponent: u64, cell: u32 },
    SumMismatch,
}

impl Violation {
    /// Short clause name used in diagnostics.
    pub fn clause(&self) -> &'static str {
        match self {
            Violation::BaseMismatch { .. } => "base-mismatch",
            Violation::PartCount { .. } => "part-count",
            Violation::CellCount { .. } => "cell-count",
            Violation::EmptyPart { .. } => "empty-part",
            Violation::ForbiddenElement { .. } => "forbidden-element",
            Violation::WrongCell { .. } => "wrong-cell",
            Violation::CellMembership { .. } => "cell-membership",
            Violation::SumMismatch => "sum-mismatch",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BaseMismatch { expected, found } => {
                write!(f, "base mismatch: expected {expected}, found {found}")
            }
            Violation::PartCount { expected, found } => {
                write!(f, "expected {expected} parts, found {found}")
            }
            Violation::CellCount { expected, found } => {
                write!(f, "expected {expected} part cells, found {found}")
            }
            Violation::EmptyPart { part } => write!(f, "part {part} is zero"),
            Violation::ForbiddenElement { part } => write!(f, "part {part} equals the forbidden element"),
            Violation::WrongCell { part, declared, required } => {
                write!(f, "part {part} is declared in cell {declared} but must lie in cell {required}")
            }
            Violation::CellMembership { part, exponent, cell } => write!(
                f,
                "part {part} has exponent {exponent} in cell {cell}, outside its declared cell"
            ),
            Violation::SumMismatch => f.write_str("parts do not sum to n"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Valid,
    Invalid(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Valid => None,
            Verdict::Invalid(v) => Some(v),
        }
    }
}

/// Exponent bound below which the sum is also checked with plain integers.
const BIG_CROSS_CHECK: u64 = 4096;

/// Checks every certificate clause against the partition and reports the
/// first one that fails. Uses only expansion membership and addition.
pub fn verify_certificate(c: &DecompositionCertificate, spec: &PartitionSpec, g: u32) -> Verdict {
    match first_violation(c, spec.h(), |w| spec.cell(w), g) {
        None => Verdict::Valid,
        Some(v) => Verdict::Invalid(v),
    }
}

pub(crate) fn first_violation(
    c: &DecompositionCertificate,
    h: u32,
    cell: impl Fn(u64) -> u32,
    g: u32,
) -> Option<Violation> {
    if c.g != g {
        return Some(Violation::BaseMismatch { expected: g, found: c.g });
    }
    let all = std::iter::once(&c.n).chain(&c.parts).chain(c.forbidden.as_ref());
    for e in all {
        if e.base() != g {
            return Some(Violation::BaseMismatch {
                expected: g,
                found: e.base(),
            });
        }
    }
    if c.h != h || c.parts.len() != h as usize {
        return Some(Violation::PartCount {
            expected: h,
            found: c.parts.len(),
        });
    }
    if c.part_cells.len() != c.parts.len() {
        return Some(Violation::CellCount {
            expected: c.parts.len(),
            found: c.part_cells.len(),
        });
    }
    if let Some(part) = c.parts.iter().position(GadicExpansion::is_zero) {
        return Some(Violation::EmptyPart { part });
    }
    if let Some(forbidden) = &c.forbidden {
        if let Some(part) = c.parts.iter().position(|p| p == forbidden) {
            return Some(Violation::ForbiddenElement { part });
        }
    }
    for (part, (p, &declared)) in c.parts.iter().zip(&c.part_cells).enumerate() {
        if let Some(required) = c.target_cell {
            if declared != required {
                return Some(Violation::WrongCell {
                    part,
                    declared,
                    required,
                });
            }
        }
        if let Some(exponent) = p.support().find(|&e| cell(e) != declared) {
            return Some(Violation::CellMembership {
                part,
                exponent,
                cell: cell(exponent),
            });
        }
    }
    if GadicExpansion::sum(g, &c.parts) != c.n {
        return Some(Violation::SumMismatch);
    }
    let small = std::iter::once(&c.n)
        .chain(&c.parts)
        .all(|e| e.top().is_none_or(|t| t.exponent < BIG_CROSS_CHECK));
    if small {
        let total: BigUint = c.parts.iter().map(GadicExpansion::evaluate).sum();
        if total != c.n.evaluate() {
            return Some(Violation::SumMismatch);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{thm1_partition, thm2_partition, Thm1Params, Thm2Params};

    fn thm2_cert(n: u64) -> (DecompositionCertificate, PartitionSpec) {
        let p = Thm2Params::new(2, 5, 2, 7).unwrap();
        (decompose_thm2(&n.into(), &p).unwrap(), thm2_partition(&p).unwrap())
    }

    #[test]
    fn valid_certificate_passes() {
        let (c, spec) = thm2_cert(1000);
        assert_eq!(verify_certificate(&c, &spec, 2), Verdict::Valid);
    }

    #[test]
    fn moved_digit_names_the_part() {
        let (mut c, spec) = thm2_cert(1000);
        // position 5 is in cell 4
        let moved = c.parts[0].add(&GadicExpansion::monomial(2, 5, 1));
        if moved.digit_at(5) == 0 {
            panic!("carry hid the injected digit");
        }
        c.parts[0] = moved;
        let v = verify_certificate(&c, &spec, 2);
        assert!(matches!(v.violation(), Some(Violation::CellMembership { part: 0, .. })), "{v:?}");
    }

    #[test]
    fn forbidden_part_is_rejected() {
        let p = Thm1Params::new(2, 4, 2, 65, 65).unwrap();
        let spec = thm1_partition(&p).unwrap();
        let mut c = decompose_thm1(&200u32.into(), &p).unwrap();
        assert!(verify_certificate(&c, &spec, 2).is_valid());
        c.parts[1] = GadicExpansion::monomial(2, 2, 1);
        assert_eq!(
            verify_certificate(&c, &spec, 2),
            Verdict::Invalid(Violation::ForbiddenElement { part: 1 })
        );
    }

    #[test]
    fn clause_order() {
        let (c, spec) = thm2_cert(77);
        let mut bad = c.clone();
        bad.g = 3;
        assert_eq!(verify_certificate(&bad, &spec, 2).violation().unwrap().clause(), "base-mismatch");
        let mut bad = c.clone();
        bad.parts.pop();
        assert_eq!(verify_certificate(&bad, &spec, 2).violation().unwrap().clause(), "part-count");
        let mut bad = c.clone();
        bad.parts[2] = GadicExpansion::zero(2);
        assert_eq!(
            verify_certificate(&bad, &spec, 2),
            Verdict::Invalid(Violation::EmptyPart { part: 2 })
        );
        let mut bad = c.clone();
        bad.part_cells[3] = 1;
        assert_eq!(verify_certificate(&bad, &spec, 2).violation().unwrap().clause(), "wrong-cell");
        let mut bad = c.clone();
        bad.n = bad.n.add(&GadicExpansion::monomial(2, 0, 1));
        assert_eq!(verify_certificate(&bad, &spec, 2), Verdict::Invalid(Violation::SumMismatch));
    }

    #[test]
    fn json_round_trip() {
        let (c, _) = thm2_cert(8);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["n"], "8");
        assert_eq!(v["parts"], serde_json::json!(["3", "1", "1", "1", "2"]));
        assert_eq!(v["sorted_parts"], serde_json::json!(["1", "1", "1", "2", "3"]));
        assert_eq!(v["forbidden"], serde_json::Value::Null);
        assert_eq!(v["trace"]["case"], "1.1");
        let back: DecompositionCertificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
    }
}
