//! Eventually periodic partitions `N = W_0 ∪ … ∪ W_{h-1}` of digit positions.
//!
//! A [`PartitionSpec`] is a finite preperiod of intervals followed by a
//! periodic pattern, which makes cell lookups O(1) at any position, including
//! positions far beyond anything that could be enumerated.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("need h >= 2 cells, got {0}")]
    TooFewCells(u32),
    #[error("{0} violated")]
    Inequality(String),
    #[error("position {position} is covered twice")]
    Overlap { position: u64 },
    #[error("position {position} is not covered")]
    Gap { position: u64 },
    #[error("cell {cell} at position {position} is outside [0, h-1]")]
    CellOutOfRange { position: u64, cell: u32 },
    #[error("interval [{start}, {end}] is empty")]
    EmptyInterval { start: u64, end: u64 },
    #[error("empty period pattern")]
    EmptyPeriod,
    #[error("pattern has {got} entries but the period is {period}")]
    PatternLength { period: u64, got: usize },
    #[error("cell {0} never occurs")]
    EmptyCell(u32),
}

/// A maximal preperiod interval `[start, end]` assigned to one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Interval {
    pub start: u64,
    pub end: u64,
    pub cell: u32,
}

/// Partition of the naturals into `h` cells.
///
/// Positions `w < preperiod_end` are looked up in the preperiod intervals;
/// every later position maps to `pattern[(w - preperiod_end) mod P]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    h: u32,
    preperiod: Vec<Interval>,
    preperiod_end: u64,
    pattern: Vec<u32>,
}

impl PartitionSpec {
    /// Validating constructor. `preperiod` must tile `[0, e)` for some `e`.
    pub fn new(h: u32, preperiod: Vec<Interval>, pattern: Vec<u32>) -> Result<Self, PartitionError> {
        if h < 2 {
            return Err(PartitionError::TooFewCells(h));
        }
        if pattern.is_empty() {
            return Err(PartitionError::EmptyPeriod);
        }
        let mut next = 0u64;
        for iv in &preperiod {
            if iv.start > iv.end {
                return Err(PartitionError::EmptyInterval {
                    start: iv.start,
                    end: iv.end,
                });
            }
            if iv.cell >= h {
                return Err(PartitionError::CellOutOfRange {
                    position: iv.start,
                    cell: iv.cell,
                });
            }
            if iv.start > next {
                return Err(PartitionError::Gap { position: next });
            }
            if iv.start < next {
                return Err(PartitionError::Overlap { position: iv.start });
            }
            next = iv.end + 1;
        }
        for (offset, &c) in pattern.iter().enumerate() {
            if c >= h {
                return Err(PartitionError::CellOutOfRange {
                    position: next + offset as u64,
                    cell: c,
                });
            }
        }
        let mut seen = vec![false; h as usize];
        preperiod.iter().for_each(|iv| seen[iv.cell as usize] = true);
        pattern.iter().for_each(|&c| seen[c as usize] = true);
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(PartitionError::EmptyCell(missing as u32));
        }
        Ok(Self {
            h,
            preperiod,
            preperiod_end: next,
            pattern,
        })
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn period(&self) -> u64 {
        self.pattern.len() as u64
    }

    pub fn preperiod_end(&self) -> u64 {
        self.preperiod_end
    }

    pub fn preperiod(&self) -> &[Interval] {
        &self.preperiod
    }

    pub fn pattern(&self) -> &[u32] {
        &self.pattern
    }

    pub fn cell(&self, w: u64) -> u32 {
        if w < self.preperiod_end {
            let idx = self.preperiod.partition_point(|iv| iv.end < w);
            self.preperiod[idx].cell
        } else {
            self.pattern[((w - self.preperiod_end) % self.period()) as usize]
        }
    }

    /// Cell lookup at an arbitrary-precision position.
    pub fn cell_big(&self, w: &BigUint) -> u32 {
        match w.to_u64() {
            Some(w) => self.cell(w),
            None => {
                let off = (w - BigUint::from(self.preperiod_end)) % BigUint::from(self.period());
                self.pattern[off.to_usize().expect("offset below period")]
            }
        }
    }

    /// Membership predicate for cell `c`.
    pub fn in_cell(&self, c: u32) -> impl Fn(u64) -> bool + '_ {
        move |w| self.cell(w) == c
    }

    /// Exhaustive totality check on `[0, preperiod_end + 2P]`: every position
    /// falls in exactly one cell index below `h`.
    pub fn check_totality(&self) -> bool {
        (0..=self.preperiod_end + 2 * self.period()).all(|w| self.cell(w) < self.h)
    }

    /// Maximal runs `(start, len, cell)` on a window wide enough to show every
    /// finite periodic run in full. Runs touching the right edge of the window
    /// are dropped since they may continue.
    fn runs(&self) -> (Vec<(u64, u64, u32)>, Vec<bool>) {
        let end = self.preperiod_end + 3 * self.period();
        let mut runs = Vec::new();
        let mut unbounded = vec![false; self.h as usize];
        let mut start = 0u64;
        let mut cur = self.cell(0);
        for w in 1..end {
            let c = self.cell(w);
            if c != cur {
                runs.push((start, w - start, cur));
                start = w;
                cur = c;
            }
        }
        if end - start >= self.period() {
            unbounded[cur as usize] = true;
        }
        (runs, unbounded)
    }

    /// Lengths of the maximal runs of cell `c` that start at or after
    /// `preperiod_end`, within one period's worth of the periodic part.
    pub fn periodic_run_lengths(&self, c: u32) -> Vec<u64> {
        let (runs, _) = self.runs();
        let lo = self.preperiod_end + self.period();
        let hi = lo + self.period();
        runs.iter()
            .filter(|&&(s, _, cell)| cell == c && s >= lo && s < hi)
            .map(|&(_, len, _)| len)
            .collect()
    }
}

/// JSON form `{h, preperiod: [[a,b,cell]...], period: P, pattern: [cell...]}`.
#[derive(Serialize, Deserialize)]
struct PartitionJson {
    h: u32,
    preperiod: Vec<(u64, u64, u32)>,
    period: u64,
    pattern: Vec<u32>,
}

impl Serialize for PartitionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PartitionJson {
            h: self.h,
            preperiod: self.preperiod.iter().map(|iv| (iv.start, iv.end, iv.cell)).collect(),
            period: self.period(),
            pattern: self.pattern.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartitionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PartitionJson::deserialize(d)?;
        if j.pattern.len() as u64 != j.period {
            return Err(serde::de::Error::custom(PartitionError::PatternLength {
                period: j.period,
                got: j.pattern.len(),
            }));
        }
        let pre = j
            .preperiod
            .into_iter()
            .map(|(start, end, cell)| Interval { start, end, cell })
            .collect();
        PartitionSpec::new(j.h, pre, j.pattern).map_err(serde::de::Error::custom)
    }
}

fn pow_u128(g: u32, e: u32) -> Option<u128> {
    (g as u128).checked_pow(e)
}

fn big_pow(g: u32, e: u32) -> BigUint {
    BigUint::from(g).pow(e)
}

/// Parameters of the sparse-interval construction: cells `W_1..W_{h-1}` are
/// intervals `[m_i+1, m_i+t]` with `m_i = m_1 + (i-1)d`, cell index `i mod (h-1)`,
/// and `W_0` is everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm1Params {
    pub g: u32,
    pub h: u32,
    pub t: u32,
    pub m_start: u64,
    pub m_gap: u64,
}

impl Thm1Params {
    pub fn new(g: u32, h: u32, t: u32, m_start: u64, m_gap: u64) -> Result<Self, PartitionError> {
        let p = Self {
            g,
            h,
            t,
            m_start,
            m_gap,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PartitionError> {
        let Self { g, h, t, m_start, m_gap } = *self;
        if g < 2 {
            return Err(PartitionError::Inequality("g >= 2".into()));
        }
        if h < 2 {
            return Err(PartitionError::TooFewCells(h));
        }
        if t < 2 {
            return Err(PartitionError::Inequality("2 <= t".into()));
        }
        if big_pow(g, t) > BigUint::from(h) {
            return Err(PartitionError::Inequality("g^t <= h".into()));
        }
        let floor = big_pow(g, h + 2);
        if BigUint::from(m_start) <= floor {
            return Err(PartitionError::Inequality("m_1 > g^(h+2)".into()));
        }
        if BigUint::from(m_gap) <= floor {
            return Err(PartitionError::Inequality("m_(i+1) - m_i > g^(h+2)".into()));
        }
        Ok(())
    }

    /// `m_i` for `i >= 1`.
    pub fn m(&self, i: u64) -> u64 {
        self.m_start + (i - 1) * self.m_gap
    }

    /// `m_2 = m_1 + d`, the start of the proven range.
    pub fn m2(&self) -> u64 {
        self.m(2)
    }

    /// Closed-form cell lookup, identical to the partition built by
    /// [`thm1_partition`].
    pub fn cell(&self, w: u64) -> u32 {
        if w <= self.m_start {
            return 0;
        }
        let off = w - self.m_start - 1;
        let r = off % self.m_gap;
        if r < self.t as u64 {
            let block = (off / self.m_gap) % (self.h as u64 - 1);
            block as u32 + 1
        } else {
            0
        }
    }

    /// Interval index `i` with `w ∈ [m_i+1, m_i+t]`, if `w` is in a nonzero cell.
    pub fn interval_of(&self, w: u64) -> Option<u64> {
        if w <= self.m_start {
            return None;
        }
        let off = w - self.m_start - 1;
        (off % self.m_gap < self.t as u64).then(|| off / self.m_gap + 1)
    }
}

/// Parameters of the periodic construction: position `mk + r` is in `W_0` for
/// `r <= m-t-1` and in cell `k mod (h-1)` (class 0 mapped to `h-1`) otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thm2Params {
    pub g: u32,
    pub h: u32,
    pub t: u32,
    pub m: u32,
}

impl Thm2Params {
    pub fn new(g: u32, h: u32, t: u32, m: u32) -> Result<Self, PartitionError> {
        let p = Self { g, h, t, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), PartitionError> {
        let Self { g, h, t, m } = *self;
        if g < 2 {
            return Err(PartitionError::Inequality("g >= 2".into()));
        }
        if t < 1 {
            return Err(PartitionError::Inequality("t >= 1".into()));
        }
        if m < 1 {
            return Err(PartitionError::Inequality("m >= 1".into()));
        }
        if BigUint::from(h) <= big_pow(g, t) * (g - 1) {
            return Err(PartitionError::Inequality("h > g^t(g-1)".into()));
        }
        if big_pow(g, m) <= big_pow(g, t + 2) * h {
            return Err(PartitionError::Inequality("g^m > g^(t+2)h".into()));
        }
        Ok(())
    }

    pub fn cell(&self, w: u64) -> u32 {
        let m = self.m as u64;
        let (k, r) = (w / m, w % m);
        if r + (self.t as u64) < m {
            0
        } else {
            let c = (k % (self.h as u64 - 1)) as u32;
            if c == 0 {
                self.h - 1
            } else {
                c
            }
        }
    }

    pub fn in_w0(&self, w: u64) -> bool {
        w % self.m as u64 + (self.t as u64) < self.m as u64
    }
}

/// `W_i = {w : w ≡ i (mod h)}`.
pub fn residue_partition(h: u32) -> Result<PartitionSpec, PartitionError> {
    if h < 2 {
        return Err(PartitionError::TooFewCells(h));
    }
    PartitionSpec::new(h, Vec::new(), (0..h).collect())
}

pub fn thm1_partition(p: &Thm1Params) -> Result<PartitionSpec, PartitionError> {
    p.validate()?;
    let period = p.m_gap * (p.h as u64 - 1);
    let pattern: Vec<u32> = (0..period).map(|off| p.cell(p.m_start + 1 + off)).collect();
    PartitionSpec::new(
        p.h,
        vec![Interval {
            start: 0,
            end: p.m_start,
            cell: 0,
        }],
        pattern,
    )
}

pub fn thm2_partition(p: &Thm2Params) -> Result<PartitionSpec, PartitionError> {
    p.validate()?;
    let period = p.m as u64 * (p.h as u64 - 1);
    PartitionSpec::new(p.h, Vec::new(), (0..period).map(|w| p.cell(w)).collect())
}

fn tile(intervals: &[(u64, u64, u32)], h: u32) -> Result<Vec<Interval>, PartitionError> {
    let mut sorted: Vec<Interval> = intervals
        .iter()
        .map(|&(start, end, cell)| Interval { start, end, cell })
        .collect();
    sorted.sort_by_key(|iv| (iv.start, iv.end));
    let mut next = 0u64;
    for iv in &sorted {
        if iv.start > iv.end {
            return Err(PartitionError::EmptyInterval {
                start: iv.start,
                end: iv.end,
            });
        }
        if iv.cell >= h {
            return Err(PartitionError::CellOutOfRange {
                position: iv.start,
                cell: iv.cell,
            });
        }
        if iv.start < next {
            return Err(PartitionError::Overlap { position: iv.start });
        }
        if iv.start > next {
            return Err(PartitionError::Gap { position: next });
        }
        next = iv.end + 1;
    }
    Ok(sorted)
}

/// Partition from user intervals: `preperiod` must tile `[0, e)` and `period`
/// must tile `[0, P)` in offsets; the periodic part starts at `e`.
pub fn interval_partition(
    h: u32,
    preperiod: &[(u64, u64, u32)],
    period: &[(u64, u64, u32)],
) -> Result<PartitionSpec, PartitionError> {
    if h < 2 {
        return Err(PartitionError::TooFewCells(h));
    }
    if period.is_empty() {
        return Err(PartitionError::EmptyPeriod);
    }
    let pre = tile(preperiod, h)?;
    let pre_end = pre.last().map_or(0, |iv| iv.end + 1);
    let per = tile(period, h).map_err(|e| match e {
        PartitionError::Overlap { position } => PartitionError::Overlap {
            position: pre_end + position,
        },
        PartitionError::Gap { position } => PartitionError::Gap {
            position: pre_end + position,
        },
        PartitionError::CellOutOfRange { position, cell } => PartitionError::CellOutOfRange {
            position: pre_end + position,
            cell,
        },
        other => other,
    })?;
    let mut pattern = Vec::new();
    for iv in &per {
        pattern.extend(std::iter::repeat_n(iv.cell, (iv.end - iv.start + 1) as usize));
    }
    PartitionSpec::new(h, pre, pattern)
}

/// Which classical regime the pair `(g, h, t)` falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `t > max(1, log h / log g)`: runs of length `t` in every infinite cell
    /// force a minimal basis.
    Minimal,
    /// `2 <= t <= log h / log g`: partitions with runs of length `t` exist
    /// whose basis is not minimal.
    NonMinimalExists,
    /// `t <= 1`.
    Unclassified,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Minimal => "minimal",
            Regime::NonMinimalExists => "non-minimal-exists",
            Regime::Unclassified => "unclassified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellReport {
    pub cell: u32,
    /// The cell occurs in the periodic pattern.
    pub infinite: bool,
    /// Longest maximal run anywhere (`None` when the cell occupies a whole period).
    pub longest_run: Option<u64>,
    /// Lengths of the maximal runs inside one period of the periodic part.
    pub periodic_runs: Vec<u64>,
    pub has_run_of_t: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub g: u32,
    pub h: u32,
    pub t: u32,
    pub cells: Vec<CellReport>,
    pub all_infinite: bool,
    pub all_have_run_of_t: bool,
    pub regime: Regime,
    /// `h > g^t (g-1)`: the stronger single-cell basis construction applies.
    pub single_cell_basis_possible: bool,
}

impl HypothesisReport {
    /// Every cell is infinite and holds `t` consecutive integers.
    pub fn holds(&self) -> bool {
        self.all_infinite && self.all_have_run_of_t
    }
}

pub fn check_hypotheses(spec: &PartitionSpec, g: u32, h: u32, t: u32) -> HypothesisReport {
    let (runs, unbounded) = spec.runs();
    let lo = spec.preperiod_end() + spec.period();
    let hi = lo + spec.period();
    let cells: Vec<CellReport> = (0..spec.h())
        .map(|c| {
            let mine = runs.iter().filter(|r| r.2 == c);
            let longest = if unbounded[c as usize] {
                None
            } else {
                Some(mine.clone().map(|r| r.1).max().unwrap_or(0))
            };
            let periodic: Vec<u64> = mine
                .filter(|r| r.0 >= lo && r.0 < hi)
                .map(|r| r.1)
                .collect();
            CellReport {
                cell: c,
                infinite: spec.pattern().contains(&c),
                has_run_of_t: longest.is_none_or(|l| l >= t as u64),
                longest_run: longest,
                periodic_runs: periodic,
            }
        })
        .collect();
    let gt = big_pow(g, t);
    let regime = if t >= 2 && gt > BigUint::from(h) {
        Regime::Minimal
    } else if t >= 2 {
        Regime::NonMinimalExists
    } else if t == 1 && BigUint::from(g) > BigUint::from(h) {
        // t = 1 exceeds log h / log g but not max(1, ...)
        Regime::Unclassified
    } else {
        Regime::Unclassified
    };
    let strong = pow_u128(g, t)
        .and_then(|x| x.checked_mul(g as u128 - 1))
        .is_some_and(|x| (h as u128) > x);
    HypothesisReport {
        g,
        h,
        t,
        all_infinite: cells.iter().all(|c| c.infinite),
        all_have_run_of_t: cells.iter().all(|c| c.has_run_of_t),
        cells,
        regime,
        single_cell_basis_possible: strong,
    }
}

/// Blocks of `t` consecutive positions assigned to cells `0, 1, …, h-1` in
/// turn. Every cell is infinite and contains runs of exactly `t`.
pub fn block_partition(h: u32, t: u32) -> Result<PartitionSpec, PartitionError> {
    let t = t.max(1) as u64;
    let period: Vec<(u64, u64, u32)> = (0..h).map(|c| (c as u64 * t, c as u64 * t + t - 1, c)).collect();
    interval_partition(h, &[], &period)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1() -> Thm1Params {
        Thm1Params::new(2, 4, 2, 65, 65).unwrap()
    }

    fn ex2() -> Thm2Params {
        Thm2Params::new(2, 5, 2, 7).unwrap()
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_partition(2).unwrap().cell(7), 1);
        assert_eq!(residue_partition(4).unwrap().cell(8), 0);
        let p = residue_partition(3).unwrap();
        assert_eq!((0..6).map(|w| p.cell(w)).collect::<Vec<_>>(), vec![0, 1, 2, 0, 1, 2]);
        assert_eq!(residue_partition(1), Err(PartitionError::TooFewCells(1)));
    }

    #[test]
    fn thm1_examples() {
        let spec = thm1_partition(&ex1()).unwrap();
        assert_eq!(spec.cell(66), 1);
        assert_eq!(spec.cell(70), 0);
        assert_eq!(spec.cell(131), 2);
        assert_eq!(spec.cell(196), 3);
        assert_eq!(spec.cell(261), 1);
        assert_eq!(spec.cell(65), 0);
        assert_eq!(spec.cell(130), 0);
        assert_eq!(spec.period(), 195);
        assert_eq!(spec.preperiod_end(), 66);
    }

    #[test]
    fn thm1_closed_form_matches_table() {
        let p = ex1();
        let spec = thm1_partition(&p).unwrap();
        for w in 0..5_000 {
            assert_eq!(spec.cell(w), p.cell(w), "w={w}");
        }
    }

    #[test]
    fn thm1_validation_names_inequality() {
        let err = Thm1Params::new(2, 4, 2, 64, 65).unwrap_err();
        assert_eq!(err.to_string(), "m_1 > g^(h+2) violated");
        let err = Thm1Params::new(2, 4, 2, 65, 64).unwrap_err();
        assert!(err.to_string().contains("g^(h+2)"));
        let err = Thm1Params::new(2, 3, 2, 65, 65).unwrap_err();
        assert_eq!(err.to_string(), "g^t <= h violated");
        assert!(Thm1Params::new(2, 4, 1, 65, 65).is_err());
    }

    #[test]
    fn thm2_examples() {
        let p = ex2();
        let spec = thm2_partition(&p).unwrap();
        assert_eq!(spec.cell(4), 0);
        assert_eq!(spec.cell(5), 4);
        assert_eq!(spec.cell(6), 4);
        assert_eq!(spec.cell(12), 1);
        assert_eq!(spec.cell(7), 0);
        assert_eq!(spec.cell(26), 3);
        assert_eq!(spec.cell(33), 4);
        assert_eq!(spec.period(), 28);
    }

    #[test]
    fn thm2_validation() {
        assert_eq!(
            Thm2Params::new(2, 4, 2, 7).unwrap_err().to_string(),
            "h > g^t(g-1) violated"
        );
        assert_eq!(
            Thm2Params::new(2, 5, 2, 6).unwrap_err().to_string(),
            "g^m > g^(t+2)h violated"
        );
        assert!(Thm2Params::new(3, 7, 1, 6).is_ok());
    }

    #[test]
    fn interval_examples() {
        let from_intervals = interval_partition(3, &[], &[(0, 0, 0), (1, 1, 1), (2, 2, 2)]).unwrap();
        assert_eq!(from_intervals, residue_partition(3).unwrap());
        let alt = interval_partition(2, &[], &[(0, 1, 0), (2, 3, 1)]).unwrap();
        assert_eq!(alt.cell(3), 1);
        assert_eq!(alt.cell(5), 0);
        let err = interval_partition(2, &[(0, 4, 0), (3, 6, 1)], &[(0, 0, 0), (1, 1, 1)]).unwrap_err();
        assert_eq!(err, PartitionError::Overlap { position: 3 });
        let err = interval_partition(2, &[(0, 4, 0)], &[(0, 0, 0), (2, 2, 1)]).unwrap_err();
        assert_eq!(err, PartitionError::Gap { position: 6 });
        let err = interval_partition(2, &[], &[(0, 0, 0), (1, 1, 2)]).unwrap_err();
        assert_eq!(err, PartitionError::CellOutOfRange { position: 1, cell: 2 });
        let err = interval_partition(3, &[], &[(0, 0, 0), (1, 1, 1)]).unwrap_err();
        assert_eq!(err, PartitionError::EmptyCell(2));
    }

    #[test]
    fn hypotheses_examples() {
        let r = check_hypotheses(&residue_partition(2).unwrap(), 2, 2, 2);
        assert!(r.all_infinite);
        assert!(!r.all_have_run_of_t);

        let r = check_hypotheses(&thm2_partition(&ex2()).unwrap(), 2, 5, 2);
        for c in &r.cells[1..] {
            assert!(!c.periodic_runs.is_empty());
            assert!(c.periodic_runs.iter().all(|&l| l == 2), "{c:?}");
        }
        assert!(r.cells[0].periodic_runs.iter().all(|&l| l == 5));
        assert!(r.holds());
        assert!(r.single_cell_basis_possible);
        assert_eq!(r.regime, Regime::NonMinimalExists);

        let r = check_hypotheses(&thm1_partition(&ex1()).unwrap(), 2, 4, 2);
        assert!(r.cells[0].periodic_runs.contains(&63));
        assert_eq!(r.cells[0].longest_run, Some(66));
        assert!(r.holds());
        assert_eq!(r.regime, Regime::NonMinimalExists);
        assert!(!r.single_cell_basis_possible);

        let r = check_hypotheses(&block_partition(4, 2).unwrap(), 3, 4, 2);
        assert!(r.holds());
        assert_eq!(r.regime, Regime::Minimal);
    }

    #[test]
    fn json_round_trip() {
        let spec = thm2_partition(&ex2()).unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.starts_with("{\"h\":5,\"preperiod\":[],\"period\":28,\"pattern\":[0,0,0,0,0,4,4,"));
        let back: PartitionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"h":2,"preperiod":[],"period":3,"pattern":[0,1]}"#;
        assert!(serde_json::from_str::<PartitionSpec>(bad).is_err());
    }

    #[test]
    fn big_position_lookup() {
        let p = ex1();
        let spec = thm1_partition(&p).unwrap();
        let w = BigUint::from(u64::MAX) * 1000u32 + 7u32;
        let reduced = (&w - BigUint::from(66u32)) % BigUint::from(195u32);
        let expect = spec.pattern()[reduced.to_usize().unwrap()];
        assert_eq!(spec.cell_big(&w), expect);
    }
}
