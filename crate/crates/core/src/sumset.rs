//! Bounded brute-force oracle for h-fold sumsets on `[0, N]`.
//!
//! Every representation of `n <= N` uses summands `<= n`, so sumsets,
//! representation counts and removability sets computed on `[0, N]` are
//! exact there; nothing outside the window is ever reported.

use std::collections::BTreeMap;
use std::io;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gadic;
use crate::partition::PartitionSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumsetError {
    #[error("{n} is outside the bitset bound {bound}")]
    OutOfBounds { n: u64, bound: u64 },
    #[error("h must be at least 1")]
    ZeroOrder,
    #[error("{a} is not an element of A")]
    NotAnElement { a: u64 },
}

/// Membership bits for `[0, bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedBitset {
    bound: u64,
    words: Vec<u64>,
}

fn word_count(bound: u64) -> usize {
    (bound / 64 + 1) as usize
}

impl BoundedBitset {
    /// Empty set on `[0, bound]`.
    pub fn new(bound: u64) -> Self {
        Self {
            bound,
            words: vec![0; word_count(bound)],
        }
    }

    pub fn from_elements(bound: u64, elems: impl IntoIterator<Item = u64>) -> Result<Self, SumsetError> {
        let mut s = Self::new(bound);
        for n in elems {
            s.insert(n)?;
        }
        Ok(s)
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    fn check(&self, n: u64) -> Result<(), SumsetError> {
        if n > self.bound {
            Err(SumsetError::OutOfBounds { n, bound: self.bound })
        } else {
            Ok(())
        }
    }

    pub fn contains(&self, n: u64) -> Result<bool, SumsetError> {
        self.check(n)?;
        Ok(self.words[(n / 64) as usize] >> (n % 64) & 1 == 1)
    }

    pub fn insert(&mut self, n: u64) -> Result<(), SumsetError> {
        self.check(n)?;
        self.words[(n / 64) as usize] |= 1 << (n % 64);
        Ok(())
    }

    pub fn remove(&mut self, n: u64) -> Result<(), SumsetError> {
        self.check(n)?;
        self.words[(n / 64) as usize] &= !(1 << (n % 64));
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Set elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * 64;
            BitIter(w).map(move |b| base + b)
        })
    }

    /// Same set on the smaller window `[0, bound]`.
    pub fn truncate(&self, bound: u64) -> Self {
        let bound = bound.min(self.bound);
        let mut words = self.words[..word_count(bound)].to_vec();
        clear_above(&mut words, bound);
        Self { bound, words }
    }

    /// Elements of `self` not in `other` (same bound).
    pub fn difference(&self, other: &Self) -> Vec<u64> {
        assert_eq!(self.bound, other.bound, "bitset bounds differ");
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .flat_map(|(i, (&a, &b))| {
                let base = i as u64 * 64;
                BitIter(a & !b).map(move |bit| base + bit)
            })
            .collect()
    }

    /// `{x + y <= bound}` for `x ∈ self`, `y ∈ other`.
    pub fn add(&self, other: &Self) -> Self {
        let bound = self.bound.min(other.bound);
        let (sparse, dense) = if self.len() <= other.len() {
            (self.truncate(bound), other.truncate(bound))
        } else {
            (other.truncate(bound), self.truncate(bound))
        };
        let shifts: Vec<u64> = sparse.iter().collect();
        Self {
            bound,
            words: shifted_union(&dense.words, &shifts, bound),
        }
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as u64;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

fn clear_above(words: &mut [u64], bound: u64) {
    let used = bound % 64 + 1;
    if used < 64 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << used) - 1;
        }
    }
}

/// `dst |= src << shift`, truncated to `dst`'s length.
fn or_shifted(dst: &mut [u64], src: &[u64], shift: u64) {
    let q = (shift / 64) as usize;
    let r = (shift % 64) as u32;
    if q >= dst.len() {
        return;
    }
    let n = dst.len() - q;
    if r == 0 {
        for (d, s) in dst[q..].iter_mut().zip(&src[..n.min(src.len())]) {
            *d |= s;
        }
    } else {
        let mut carry = 0u64;
        for (d, s) in dst[q..].iter_mut().zip(src.iter().chain(std::iter::repeat(&0))) {
            *d |= (s << r) | carry;
            carry = s >> (64 - r);
        }
    }
}

const PAR_CHUNK: usize = 64;

/// `⋃_{x ∈ shifts} (src << x)` on `[0, bound]`. Parallel partial unions are
/// combined with OR, so the result does not depend on the thread count.
fn shifted_union(src: &[u64], shifts: &[u64], bound: u64) -> Vec<u64> {
    let len = word_count(bound);
    let mut out = if shifts.len() <= PAR_CHUNK || (len as u64) < 1024 {
        let mut acc = vec![0u64; len];
        for &x in shifts {
            or_shifted(&mut acc, src, x);
        }
        acc
    } else {
        shifts
            .par_chunks(PAR_CHUNK)
            .map(|chunk| {
                let mut acc = vec![0u64; len];
                for &x in chunk {
                    or_shifted(&mut acc, src, x);
                }
                acc
            })
            .reduce(
                || vec![0u64; len],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x |= y);
                    a
                },
            )
    };
    clear_above(&mut out, bound);
    out
}

/// Bits of `A ∩ [0, bound]` for a membership predicate.
pub fn restrict(a: impl Fn(u64) -> bool, bound: u64) -> BoundedBitset {
    let mut s = BoundedBitset::new(bound);
    for n in 0..=bound {
        if a(n) {
            s.words[(n / 64) as usize] |= 1 << (n % 64);
        }
    }
    s
}

/// `A_g(W) ∩ [0, bound]` via enumeration rather than a per-integer test.
pub fn restrict_members(w: impl Fn(u64) -> bool, g: u32, bound: u64) -> BoundedBitset {
    let members = gadic::enumerate_members(w, g, bound);
    BoundedBitset::from_elements(bound, members).expect("members lie below the bound")
}

/// `⋃_i A_g(W_i) ∩ [0, bound]` over all cells of a partition.
pub fn restrict_union(spec: &PartitionSpec, g: u32, bound: u64) -> BoundedBitset {
    let mut s = BoundedBitset::new(bound);
    for c in 0..spec.h() {
        for n in gadic::enumerate_members(spec.in_cell(c), g, bound) {
            s.insert(n).expect("members lie below the bound");
        }
    }
    s
}

/// `hX ∩ [0, bound]`.
pub fn hfold(x: &BoundedBitset, h: u32, bound: u64) -> Result<BoundedBitset, SumsetError> {
    if h < 1 {
        return Err(SumsetError::ZeroOrder);
    }
    x.check(bound)?;
    let base = x.truncate(bound);
    let shifts: Vec<u64> = base.iter().collect();
    let mut cur = base.words.clone();
    for _ in 1..h {
        cur = shifted_union(&cur, &shifts, bound);
    }
    Ok(BoundedBitset { bound, words: cur })
}

/// Number of ordered `h`-tuples from `X` summing to each `n <= bound`
/// (saturating at `u64::MAX`).
pub fn rep_table(x: &BoundedBitset, h: u32, bound: u64) -> Result<Vec<u64>, SumsetError> {
    if h < 1 {
        return Err(SumsetError::ZeroOrder);
    }
    x.check(bound)?;
    let elems: Vec<u64> = x.truncate(bound).iter().collect();
    let len = bound as usize + 1;
    let mut cur = vec![0u64; len];
    for &e in &elems {
        cur[e as usize] = 1;
    }
    for _ in 1..h {
        let mut next = vec![0u64; len];
        for (s, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &e in &elems {
                let t = s + e as usize;
                if t >= len {
                    break;
                }
                next[t] = next[t].saturating_add(c);
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// `r_h(X, n)`: ordered `h`-tuples from `X` summing to `n`.
pub fn rep_count(x: &BoundedBitset, h: u32, n: u64) -> Result<u64, SumsetError> {
    Ok(rep_table(x, h, n)?[n as usize])
}

/// `E_a ∩ [0, bound]` where `E_a = hA \ h(A \ {a})`.
pub fn removability(a_set: &BoundedBitset, a: u64, h: u32, bound: u64) -> Result<Vec<u64>, SumsetError> {
    if !a_set.contains(a)? {
        return Err(SumsetError::NotAnElement { a });
    }
    let full = hfold(a_set, h, bound)?;
    let mut without = a_set.clone();
    without.remove(a)?;
    let reduced = hfold(&without, h, bound)?;
    Ok(full.difference(&reduced))
}

/// Writes `n,r_h` rows for `n` in `[0, bound]`.
pub fn write_rep_csv<W: io::Write>(out: W, table: &[u64]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "r_h"])?;
    for (n, r) in table.iter().enumerate() {
        w.write_record([n.to_string(), r.to_string()])?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumsetReport {
    pub h: u32,
    #[serde(rename = "N")]
    pub bound: u64,
    /// Least `n0` with `[n0, N] ⊆ hA`, or `None` when `N ∉ hA`.
    pub basis_threshold: Option<u64>,
    /// Integers in `[min hA, N]` missing from `hA`.
    pub gaps: Vec<u64>,
    /// `a -> E_a ∩ [0, N]` for the probed elements.
    pub removability: BTreeMap<u64, Vec<u64>>,
}

impl SumsetReport {
    pub fn compute(a_set: &BoundedBitset, h: u32, bound: u64, probes: &[u64]) -> Result<Self, SumsetError> {
        let full = hfold(a_set, h, bound)?;
        let basis_threshold = threshold(&full);
        let gaps = match full.iter().next() {
            Some(lo) => (lo..=bound).filter(|&n| !full.contains(n).unwrap()).collect(),
            None => Vec::new(),
        };
        let mut removability = BTreeMap::new();
        for &a in probes {
            let mut without = a_set.clone();
            if !without.contains(a)? {
                return Err(SumsetError::NotAnElement { a });
            }
            without.remove(a)?;
            removability.insert(a, full.difference(&hfold(&without, h, bound)?));
        }
        Ok(Self {
            h,
            bound,
            basis_threshold,
            gaps,
            removability,
        })
    }
}

/// Least `n0` with `[n0, bound]` contained in the set.
pub fn threshold(s: &BoundedBitset) -> Option<u64> {
    let mut n0 = None;
    let mut n = s.bound;
    loop {
        if !s.contains(n).unwrap() {
            return n0;
        }
        n0 = Some(n);
        if n == 0 {
            return n0;
        }
        n -= 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub a: u64,
    /// `|E_a ∩ [0, N]|`.
    pub count: u64,
    pub min: Option<u64>,
    pub max: Option<u64>,
    /// `E_a ∩ [tail_from, N]` is empty: nothing in the upper window needs `a`.
    pub candidate: bool,
}

impl ProbeEntry {
    pub fn nonempty(&self) -> bool {
        self.count > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub h: u32,
    #[serde(rename = "N")]
    pub bound: u64,
    #[serde(rename = "B")]
    pub probe_bound: u64,
    pub tail_from: u64,
    pub entries: Vec<ProbeEntry>,
    /// Always "evidence, not proof": a finite window cannot show `E_a` is infinite.
    pub status: String,
}

impl MinimalityReport {
    pub fn all_nonempty(&self) -> bool {
        self.entries.iter().all(ProbeEntry::nonempty)
    }

    pub fn candidates(&self) -> Vec<u64> {
        self.entries.iter().filter(|e| e.candidate).map(|e| e.a).collect()
    }
}

/// Probes `E_a ∩ [0, N]` for every `a ∈ A ∩ [0, B]`, flagging as
/// non-minimality candidates the `a` with `E_a ∩ [N/2, N]` empty.
pub fn minimality_probe(a_set: &BoundedBitset, h: u32, bound: u64, probe_bound: u64) -> Result<MinimalityReport, SumsetError> {
    minimality_probe_with_tail(a_set, h, bound, probe_bound, bound / 2)
}

pub fn minimality_probe_with_tail(
    a_set: &BoundedBitset,
    h: u32,
    bound: u64,
    probe_bound: u64,
    tail_from: u64,
) -> Result<MinimalityReport, SumsetError> {
    let full = hfold(a_set, h, bound)?;
    let probe_bound = probe_bound.min(bound);
    let elems: Vec<u64> = a_set.iter().take_while(|&a| a <= probe_bound).collect();
    let entries = elems
        .iter()
        .map(|&a| {
            let mut without = a_set.clone();
            without.remove(a)?;
            let e = full.difference(&hfold(&without, h, bound)?);
            Ok(ProbeEntry {
                a,
                count: e.len() as u64,
                min: e.first().copied(),
                max: e.last().copied(),
                candidate: e.last().is_none_or(|&m| m < tail_from),
            })
        })
        .collect::<Result<Vec<_>, SumsetError>>()?;
    Ok(MinimalityReport {
        h,
        bound,
        probe_bound,
        tail_from,
        entries,
        status: "evidence, not proof".into(),
    })
}
