//! Canonical base-`g` expansions and the digit-support sets `A_g(W)`.
//!
//! An expansion stores only its nonzero digits, highest exponent first. A
//! number lies in `A_g(W)` exactly when it is positive and every exponent of
//! its expansion lies in `W`. Position sets are passed around as membership
//! predicates `Fn(u64) -> bool`, so finite sets, residue classes and the cells
//! of a [`PartitionSpec`](crate::partition::PartitionSpec) plug in uniformly.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Above this bound `count_members` stops materializing the member list.
pub const MATERIALIZE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadicError {
    #[error("invalid base {0}: need g >= 2")]
    InvalidBase(u32),
    #[error("non-canonical expansion: {0}")]
    NonCanonical(String),
}

/// One nonzero digit `digit * g^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub exponent: u64,
    pub digit: u32,
}

/// Canonical base-`g` expansion `Σ a_f g^f` with `1 <= a_f <= g-1`.
///
/// Terms are sorted by strictly decreasing exponent and the empty expansion is
/// zero. For a fixed base the derived ordering is the numeric ordering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GadicExpansion {
    base: u32,
    terms: Vec<Term>,
}

fn check_base(g: u32) -> Result<(), GadicError> {
    if g < 2 {
        Err(GadicError::InvalidBase(g))
    } else {
        Ok(())
    }
}

impl GadicExpansion {
    /// Builds an expansion from terms, rejecting anything non-canonical.
    pub fn new(base: u32, terms: Vec<Term>) -> Result<Self, GadicError> {
        check_base(base)?;
        for (idx, t) in terms.iter().enumerate() {
            if t.digit == 0 || t.digit >= base {
                return Err(GadicError::NonCanonical(format!(
                    "digit {} at exponent {} outside [1, {}]",
                    t.digit,
                    t.exponent,
                    base - 1
                )));
            }
            if idx > 0 && terms[idx - 1].exponent <= t.exponent {
                return Err(GadicError::NonCanonical(format!(
                    "exponents not strictly decreasing at {}",
                    t.exponent
                )));
            }
        }
        Ok(Self { base, terms })
    }

    /// `[(exponent, digit)]` pairs, highest exponent first.
    pub fn from_pairs(base: u32, pairs: &[(u64, u32)]) -> Result<Self, GadicError> {
        Self::new(
            base,
            pairs
                .iter()
                .map(|&(exponent, digit)| Term { exponent, digit })
                .collect(),
        )
    }

    pub fn zero(base: u32) -> Self {
        Self {
            base,
            terms: Vec::new(),
        }
    }

    /// `digit * base^exponent`; a zero digit gives the zero expansion.
    pub fn monomial(base: u32, exponent: u64, digit: u32) -> Self {
        assert!(base >= 2 && digit < base, "digit {digit} out of range for base {base}");
        let terms = if digit == 0 {
            Vec::new()
        } else {
            vec![Term { exponent, digit }]
        };
        Self { base, terms }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero digits.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponents of the nonzero digits, descending.
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.terms.iter().map(|t| t.exponent)
    }

    pub fn top(&self) -> Option<Term> {
        self.terms.first().copied()
    }

    pub fn digit_at(&self, exponent: u64) -> u32 {
        self.terms
            .binary_search_by(|t| exponent.cmp(&t.exponent))
            .map(|i| self.terms[i].digit)
            .unwrap_or(0)
    }

    pub fn support_within(&self, w: impl Fn(u64) -> bool) -> bool {
        self.terms.iter().all(|t| w(t.exponent))
    }

    pub fn evaluate(&self) -> BigUint {
        evaluate(self)
    }

    pub fn to_u64(&self) -> Option<u64> {
        let mut acc: u64 = 0;
        for t in &self.terms {
            let p = (self.base as u64).checked_pow(u32::try_from(t.exponent).ok()?)?;
            acc = acc.checked_add(p.checked_mul(t.digit as u64)?)?;
        }
        Some(acc)
    }

    /// Exact sum of expansions in the same base, carried digit by digit.
    pub fn sum<'a>(base: u32, items: impl IntoIterator<Item = &'a GadicExpansion>) -> Self {
        let mut acc: BTreeMap<u64, u64> = BTreeMap::new();
        for e in items {
            assert_eq!(e.base, base, "mixed bases in sum");
            for t in &e.terms {
                *acc.entry(t.exponent).or_default() += t.digit as u64;
            }
        }
        let g = base as u64;
        let mut out = Vec::with_capacity(acc.len());
        while let Some((exp, c)) = acc.pop_first() {
            if c >= g {
                *acc.entry(exp + 1).or_default() += c / g;
            }
            if c % g != 0 {
                out.push(Term {
                    exponent: exp,
                    digit: (c % g) as u32,
                });
            }
        }
        out.reverse();
        Self { base, terms: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::sum(self.base, [self, other])
    }
}

impl fmt::Display for GadicExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.digit == 1 {
                write!(f, "{}^{}", self.base, t.exponent)?;
            } else {
                write!(f, "{}*{}^{}", t.digit, self.base, t.exponent)?;
            }
        }
        Ok(())
    }
}

/// JSON form: `[[exponent, digit], ...]`, highest exponent first.
impl Serialize for GadicExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for t in &self.terms {
            seq.serialize_element(&(t.exponent, t.digit))?;
        }
        seq.end()
    }
}

pub fn expand(n: &BigUint, g: u32) -> Result<GadicExpansion, GadicError> {
    check_base(g)?;
    let mut terms = Vec::new();
    if g <= 256 {
        for (exp, &d) in n.to_radix_le(g).iter().enumerate() {
            if d != 0 {
                terms.push(Term {
                    exponent: exp as u64,
                    digit: d as u32,
                });
            }
        }
    } else {
        let mut rest = n.clone();
        let gb = BigUint::from(g);
        let mut exp = 0u64;
        while !rest.is_zero() {
            let d = (&rest % &gb).to_u32().expect("remainder below base");
            rest /= &gb;
            if d != 0 {
                terms.push(Term { exponent: exp, digit: d });
            }
            exp += 1;
        }
    }
    terms.reverse();
    Ok(GadicExpansion { base: g, terms })
}

pub fn expand_u64(n: u64, g: u32) -> Result<GadicExpansion, GadicError> {
    check_base(g)?;
    let mut terms = Vec::new();
    let mut rest = n;
    let mut exp = 0;
    while rest > 0 {
        let d = (rest % g as u64) as u32;
        if d != 0 {
            terms.push(Term { exponent: exp, digit: d });
        }
        rest /= g as u64;
        exp += 1;
    }
    terms.reverse();
    Ok(GadicExpansion { base: g, terms })
}

pub fn evaluate(e: &GadicExpansion) -> BigUint {
    let g = BigUint::from(e.base);
    let mut acc = BigUint::zero();
    let mut prev: Option<u64> = None;
    for t in &e.terms {
        if let Some(p) = prev {
            acc *= pow(&g, p - t.exponent);
        }
        acc += t.digit;
        prev = Some(t.exponent);
    }
    if let Some(p) = prev {
        acc *= pow(&g, p);
    }
    acc
}

pub(crate) fn pow(g: &BigUint, e: u64) -> BigUint {
    g.pow(u32::try_from(e).expect("exponent beyond u32 range"))
}

/// `n ∈ A_g(W)`: positive with support inside `W`.
pub fn is_member(n: &BigUint, w: impl Fn(u64) -> bool, g: u32) -> bool {
    match expand(n, g) {
        Ok(e) => !e.is_zero() && e.support_within(w),
        Err(_) => false,
    }
}

/// Largest `L` with `g^L <= bound` together with the powers `g^0..=g^L`.
fn powers_up_to(g: u32, bound: u64) -> Vec<u64> {
    let mut pw = vec![1u64];
    while let Some(next) = pw.last().unwrap().checked_mul(g as u64) {
        if next > bound {
            break;
        }
        pw.push(next);
    }
    pw
}

/// `A_g(W) ∩ [1, bound]` in ascending order.
///
/// Depth-first over the positions of `W` below `log_g(bound)`, highest
/// first, pruning as soon as the partial value exceeds the bound.
pub fn enumerate_members(w: impl Fn(u64) -> bool, g: u32, bound: u64) -> Vec<u64> {
    assert!(g >= 2, "invalid base {g}");
    let pw = powers_up_to(g, bound);
    let positions: Vec<usize> = (0..pw.len()).rev().filter(|&p| w(p as u64)).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
    while let Some((idx, value)) = stack.pop() {
        if idx == positions.len() {
            if value >= 1 {
                out.push(value);
            }
            continue;
        }
        let p = pw[positions[idx]];
        stack.push((idx + 1, value));
        for d in 1..g as u64 {
            let v = value + d * p;
            if v > bound {
                break;
            }
            stack.push((idx + 1, v));
        }
    }
    out.sort_unstable();
    out
}

/// `|A_g(W) ∩ [1, x]|`.
pub fn count_members(w: impl Fn(u64) -> bool, g: u32, x: u64) -> u64 {
    if x < MATERIALIZE_LIMIT {
        enumerate_members(w, g, x).len() as u64
    } else {
        count_members_dp(w, g, x)
    }
}

/// Digit-DP count of `A_g(W) ∩ [1, x]` without materializing members.
pub fn count_members_dp(w: impl Fn(u64) -> bool, g: u32, x: u64) -> u64 {
    assert!(g >= 2, "invalid base {g}");
    let digits = expand_u64(x, g).expect("base checked");
    let top = match digits.top() {
        Some(t) => t.exponent,
        None => return 0,
    };
    // free[p] = number of support-admissible values below g^p (including 0)
    let mut free = Vec::with_capacity(top as usize + 2);
    free.push(1u64);
    for p in 0..=top {
        let f = *free.last().unwrap();
        free.push(if w(p) { f * g as u64 } else { f });
    }
    let mut count = 0u64;
    let mut tight_alive = true;
    for p in (0..=top).rev() {
        let xd = digits.digit_at(p) as u64;
        // digits d < xd at position p: d = 0 always allowed, d >= 1 only in W
        let choices = if w(p) { xd } else { xd.min(1) };
        count += choices * free[p as usize];
        if xd != 0 && !w(p) {
            tight_alive = false;
            break;
        }
    }
    if tight_alive {
        count += 1;
    }
    count - 1
}
