//! Decomposition of `n > m_2` into `h` elements of `A \ {g^2}` for the
//! sparse-interval partition.
//!
//! The support `F_n` of `n` is classified by how it meets `W_0`; every case
//! either groups digits into single-cell parts or rewrites the top digit as a
//! telescoping sum `(g-1)g^{f-1} + … + (g-1)g^{f-c+1} + g^{f-c+1}` to make up
//! the missing parts. Works on sparse expansions throughout, so exponents in
//! the millions cost nothing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::groups::split_groups;
use super::{first_violation, DecomposeError, DecompositionCertificate, DecompositionTrace};
use crate::gadic::{self, GadicExpansion, Term};
use crate::partition::Thm1Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Thm1Case {
    /// No digit in `W_0`, at least `h` digits: group by cell.
    CellsSplit,
    /// No digit in `W_0`, fewer than `h` digits: telescope the top digit.
    CellsTelescope,
    /// Digits in `W_0` (not just position 2) and at least `h-1` outside.
    MixedSplit,
    /// Digits in `W_0` (not just position 2) and 1..h-2 outside.
    MixedTelescope,
    /// All digits in `W_0`, at least three of them.
    ZeroMany,
    /// All digits in `W_0`, two of them, lower one not `g^2`.
    ZeroPair,
    /// All digits in `W_0`: `a g^f + g^2`.
    ZeroPairSquare,
    /// A single digit in `W_0`.
    ZeroSingle,
    /// `W_0` meets the support in `{2}` with `a_2 > 1`, `h-1` or more other digits.
    SquareSplit,
    /// `a_2 > 1`, 1..h-2 other digits.
    SquareTelescope,
    /// `a_2 = 1`, `h-2` or more other digits.
    UnitSquareSplit,
    /// `a_2 = 1`, 1..h-3 other digits.
    UnitSquareTelescope,
}

impl Thm1Case {
    pub const ALL: [Thm1Case; 12] = [
        Thm1Case::CellsSplit,
        Thm1Case::CellsTelescope,
        Thm1Case::MixedSplit,
        Thm1Case::MixedTelescope,
        Thm1Case::ZeroMany,
        Thm1Case::ZeroPair,
        Thm1Case::ZeroPairSquare,
        Thm1Case::ZeroSingle,
        Thm1Case::SquareSplit,
        Thm1Case::SquareTelescope,
        Thm1Case::UnitSquareSplit,
        Thm1Case::UnitSquareTelescope,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Thm1Case::CellsSplit => "1.1",
            Thm1Case::CellsTelescope => "1.2",
            Thm1Case::MixedSplit => "2.1",
            Thm1Case::MixedTelescope => "2.2",
            Thm1Case::ZeroMany => "2.3-k3",
            Thm1Case::ZeroPair => "2.3-k2",
            Thm1Case::ZeroPairSquare => "2.3-k2-f2",
            Thm1Case::ZeroSingle => "2.3-k1",
            Thm1Case::SquareSplit => "3.1",
            Thm1Case::SquareTelescope => "3.2",
            Thm1Case::UnitSquareSplit => "3.3",
            Thm1Case::UnitSquareTelescope => "3.4",
        }
    }

    /// Needs a digit `a_2 > 1`, which base 2 cannot provide.
    pub fn needs_large_square_digit(self) -> bool {
        matches!(self, Thm1Case::SquareSplit | Thm1Case::SquareTelescope)
    }
}

impl fmt::Display for Thm1Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Thm1Case {
    type Err = DecomposeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Thm1Case::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| DecomposeError::UnknownCase(s.to_string()))
    }
}

/// Decomposer bound to one parameter set.
#[derive(Debug, Clone)]
pub struct Thm1Decomposer {
    p: Thm1Params,
    m2: GadicExpansion,
    square: GadicExpansion,
}

/// Digits of `n` split by cell: `W_0` terms and the rest, both high to low.
struct Split {
    zero: Vec<Term>,
    rest: Vec<Term>,
}

impl Thm1Decomposer {
    pub fn new(p: &Thm1Params) -> Result<Self, DecomposeError> {
        p.validate()?;
        Ok(Self {
            p: *p,
            m2: gadic::expand(&BigUint::from(p.m2()), p.g)?,
            square: GadicExpansion::monomial(p.g, 2, 1),
        })
    }

    pub fn params(&self) -> &Thm1Params {
        &self.p
    }

    fn split(&self, n: &GadicExpansion) -> Result<Split, DecomposeError> {
        if n.base() != self.p.g {
            return Err(DecomposeError::Gadic(gadic::GadicError::InvalidBase(n.base())));
        }
        if *n <= self.m2 {
            return Err(DecomposeError::OutOfRange {
                n: n.evaluate().to_string(),
                requirement: format!("> m_2 = {}", self.p.m2()),
            });
        }
        let (zero, rest) = n.terms().iter().partition(|t| self.p.cell(t.exponent) == 0);
        Ok(Split { zero, rest })
    }

    pub fn classify(&self, n: &GadicExpansion) -> Result<Thm1Case, DecomposeError> {
        let s = self.split(n)?;
        Ok(self.classify_split(&s))
    }

    fn classify_split(&self, s: &Split) -> Thm1Case {
        let h = self.p.h as usize;
        let l = s.rest.len();
        if s.zero.is_empty() {
            if l >= h {
                Thm1Case::CellsSplit
            } else {
                Thm1Case::CellsTelescope
            }
        } else if s.zero.len() == 1 && s.zero[0].exponent == 2 {
            match (s.zero[0].digit > 1, l) {
                (true, l) if l >= h - 1 => Thm1Case::SquareSplit,
                (true, _) => Thm1Case::SquareTelescope,
                (false, l) if l >= h - 2 => Thm1Case::UnitSquareSplit,
                (false, _) => Thm1Case::UnitSquareTelescope,
            }
        } else if l >= h - 1 {
            Thm1Case::MixedSplit
        } else if l >= 1 {
            Thm1Case::MixedTelescope
        } else {
            match s.zero.len() {
                1 => Thm1Case::ZeroSingle,
                2 if s.zero[1].exponent == 2 && s.zero[1].digit == 1 => Thm1Case::ZeroPairSquare,
                2 => Thm1Case::ZeroPair,
                _ => Thm1Case::ZeroMany,
            }
        }
    }

    pub fn decompose(&self, n: &BigUint) -> Result<DecompositionCertificate, DecomposeError> {
        self.decompose_expansion(&gadic::expand(n, self.p.g)?)
    }

    pub fn decompose_expansion(&self, n: &GadicExpansion) -> Result<DecompositionCertificate, DecomposeError> {
        let s = self.split(n)?;
        let case = self.classify_split(&s);
        let mut b = Builder {
            p: &self.p,
            trace: DecompositionTrace::new(case.label()),
            parts: Vec::new(),
        };
        b.trace.check(
            s.rest.iter().all(|t| t.exponent > self.p.m_start),
            "f > m_1 for every f in F_n outside W_0",
        )?;
        self.run(case, &s, &mut b)?;
        let Builder { mut trace, parts, .. } = b;
        let h = self.p.h;
        trace.check(parts.len() == h as usize, format!("display has exactly h = {h} summands"))?;
        let (parts, part_cells): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
        let cert = DecompositionCertificate {
            g: self.p.g,
            h,
            n: n.clone(),
            parts,
            part_cells,
            forbidden: Some(self.square.clone()),
            target_cell: None,
            trace,
        };
        if let Some(v) = first_violation(&cert, h, |w| self.p.cell(w), self.p.g) {
            return Err(DecomposeError::InvariantViolation {
                what: format!("certificate self-check: {v}"),
                trace: Box::new(cert.trace),
            });
        }
        Ok(cert)
    }

    fn run(&self, case: Thm1Case, s: &Split, b: &mut Builder) -> Result<(), DecomposeError> {
        let h = self.p.h as i64;
        let g = self.p.g;
        match case {
            Thm1Case::CellsSplit => b.split(&s.rest, h as usize),
            Thm1Case::CellsTelescope => {
                let l = s.rest.len() as i64;
                b.telescoped_tail(&s.rest, h - l + 1, FLOOR_L2, FLOOR_L3)
            }
            Thm1Case::MixedSplit => {
                b.group(&s.zero, 0);
                b.split(&s.rest, h as usize - 1)
            }
            Thm1Case::MixedTelescope => {
                let l = s.rest.len() as i64;
                b.group(&s.zero, 0);
                b.telescoped_tail(&s.rest, h - l, FLOOR_L3, FLOOR_L4)
            }
            Thm1Case::ZeroMany => self.zero_many(&s.zero, b),
            Thm1Case::ZeroPair => {
                b.trace.check(s.zero[0].exponent >= h as u64 + 2, "f_0 >= h+2")?;
                b.single(s.zero[1]);
                b.top_telescope(s.zero[0], h - 1)
            }
            Thm1Case::ZeroPairSquare => {
                b.trace.check(s.zero[0].exponent >= h as u64 + 2, "f_0 >= h+2")?;
                b.square_rewrite(g);
                b.top_telescope(s.zero[0], h - 2)
            }
            Thm1Case::ZeroSingle => {
                b.trace.check(s.zero[0].exponent >= h as u64 + 2, "f_0 >= h+2")?;
                b.top_telescope(s.zero[0], h)
            }
            Thm1Case::SquareSplit => {
                b.single(s.zero[0]);
                b.split(&s.rest, h as usize - 1)
            }
            Thm1Case::SquareTelescope => {
                let l = s.rest.len() as i64;
                b.single(s.zero[0]);
                b.telescoped_tail(&s.rest, h - l, FLOOR_L3, FLOOR_L4)
            }
            Thm1Case::UnitSquareSplit => {
                let exps: Vec<u64> = s.rest.iter().map(|t| t.exponent).collect();
                match split_groups(&exps, |w| self.p.cell(w), h as usize - 2) {
                    Ok(groups) => {
                        b.square_rewrite(g);
                        b.groups(&s.rest, groups);
                        Ok(())
                    }
                    Err(_) => self.spread_into_zero(&s.rest, b),
                }
            }
            Thm1Case::UnitSquareTelescope => {
                let l = s.rest.len() as i64;
                b.square_rewrite(g);
                b.telescoped_tail(&s.rest, h - l - 1, FLOOR_L4, FLOOR_L5)
            }
        }
    }

    /// All `k >= 3` digits in `W_0`. The lower digits become single parts and
    /// the top digit is telescoped into `h-k+1` pieces. When there are too
    /// many lower digits, or one of them is the bare `g^2`, lower digits are
    /// merged into multi-digit `W_0` parts instead.
    fn zero_many(&self, zero: &[Term], b: &mut Builder) -> Result<(), DecomposeError> {
        let h = self.p.h as usize;
        let k = zero.len();
        let top = zero[0];
        let lower = &zero[1..];
        b.trace.check(top.exponent >= h as u64 + 2, "f_0 >= h+2")?;
        b.trace.exponents = zero.iter().map(|t| t.exponent).collect();
        b.trace.scalars.insert("k".into(), k as u64);
        let is_square = |t: &Term| t.exponent == 2 && t.digit == 1;
        let fits = if top.digit == 1 { k <= h } else { k < h };
        if fits && !lower.iter().any(is_square) {
            for &t in lower {
                b.single(t);
            }
            return b.top_telescope(top, (h - k + 1) as i64);
        }
        b.trace.variant = Some("regrouped".into());
        let mut count = (k - 1).min(h - 1);
        let mut groups: Vec<Vec<Term>> = lower[..count - 1].iter().map(|&t| vec![t]).collect();
        groups.push(lower[count - 1..].to_vec());
        if let Some(idx) = groups.iter().position(|g| g.len() == 1 && is_square(&g[0])) {
            let lone = groups.remove(idx);
            let into = if idx < groups.len() { idx } else { idx - 1 };
            groups[into].extend(lone);
            groups[into].sort_by_key(|t| std::cmp::Reverse(t.exponent));
            count -= 1;
        }
        b.trace.groups = groups.iter().map(|g| g.iter().map(|t| t.exponent).collect()).collect();
        for g in &groups {
            b.group(g, 0);
        }
        b.top_telescope(top, (h - count) as i64)
    }

    /// `a_2 = 1` with the other digits meeting every nonzero cell, so no
    /// grouping into `h-2` single-cell parts exists. Each interval block
    /// `c g^{m_i+1}` (`c < g^t <= h`) is rewritten on the `W_0` positions
    /// `m_i, m_i - 1, …` directly below it, at most `h(g-1)` units per
    /// position, and the units are dealt round-robin to all `h` parts. The
    /// `g^2` digit joins part 0.
    fn spread_into_zero(&self, rest: &[Term], b: &mut Builder) -> Result<(), DecomposeError> {
        let p = &self.p;
        let h = p.h as u64;
        let g = p.g as u64;
        b.trace.variant = Some("w0-spread".into());
        let mut blocks: BTreeMap<u64, u64> = BTreeMap::new();
        for t in rest {
            let i = p.interval_of(t.exponent).expect("digit outside W_0 lies in an interval");
            let shift = t.exponent - (p.m(i) + 1);
            *blocks.entry(i).or_default() += t.digit as u64 * g.pow(shift as u32);
        }
        let cap = h * (g - 1);
        let mut units: Vec<(u64, u64)> = Vec::new();
        for (&i, &c) in blocks.iter().rev() {
            b.trace.check(c < h, format!("block multiplier c_{i} < h"))?;
            let mut pos = p.m(i);
            let mut e = c * g;
            loop {
                b.trace.check(p.cell(pos) == 0, format!("position {pos} lies in W_0"))?;
                let here = e.min(cap);
                units.push((pos, here));
                e -= here;
                if e == 0 {
                    break;
                }
                e *= g;
                pos -= 1;
            }
        }
        let mut digits: Vec<BTreeMap<u64, u32>> = vec![BTreeMap::new(); h as usize];
        let mut next = 0usize;
        for &(pos, count) in &units {
            for _ in 0..count {
                *digits[next].entry(pos).or_default() += 1;
                next = (next + 1) % h as usize;
            }
        }
        *digits[0].entry(2).or_default() += 1;
        b.trace.check(digits.iter().all(|d| !d.is_empty()), "every spread part is nonzero")?;
        for d in digits {
            let terms = d
                .into_iter()
                .rev()
                .map(|(exponent, digit)| Term { exponent, digit })
                .collect();
            b.parts.push((GadicExpansion::new(p.g, terms)?, 0));
        }
        Ok(())
    }
}

/// Exponent floor `f_0 - shift(h, l) > bound(l)` with its printed form.
#[derive(Clone, Copy)]
struct Floor(fn(i64, i64) -> i64, fn(i64) -> i64, &'static str);

const FLOOR_L2: Floor = Floor(|h, l| h - l, |l| l + 2, "f_0-(h-l)>l+2");
const FLOOR_L3: Floor = Floor(|h, l| h - l - 1, |l| l + 3, "f_0-(h-l-1)>l+3");
const FLOOR_L4: Floor = Floor(|h, l| h - l - 2, |l| l + 4, "f_0-(h-l-2)>l+4");
const FLOOR_L5: Floor = Floor(|h, l| h - l - 3, |l| l + 5, "f_0-(h-l-3)>l+5");

struct Builder<'a> {
    p: &'a Thm1Params,
    trace: DecompositionTrace,
    parts: Vec<(GadicExpansion, u32)>,
}

impl Builder<'_> {
    fn single(&mut self, t: Term) {
        self.parts.push((GadicExpansion::monomial(self.p.g, t.exponent, t.digit), self.p.cell(t.exponent)));
    }

    /// One part holding all of `terms`, which lie in `cell`.
    fn group(&mut self, terms: &[Term], cell: u32) {
        let e = GadicExpansion::new(self.p.g, terms.to_vec()).expect("terms come from a canonical expansion");
        self.parts.push((e, cell));
    }

    fn groups(&mut self, terms: &[Term], groups: Vec<Vec<u64>>) {
        let digit: BTreeMap<u64, u32> = terms.iter().map(|t| (t.exponent, t.digit)).collect();
        for grp in &groups {
            let ts: Vec<Term> = grp
                .iter()
                .map(|&e| Term {
                    exponent: e,
                    digit: digit[&e],
                })
                .collect();
            self.group(&ts, self.p.cell(grp[0]));
        }
        self.trace.groups = groups;
    }

    fn split(&mut self, rest: &[Term], needed: usize) -> Result<(), DecomposeError> {
        let exps: Vec<u64> = rest.iter().map(|t| t.exponent).collect();
        let groups = split_groups(&exps, |w| self.p.cell(w), needed)?;
        self.groups(rest, groups);
        Ok(())
    }

    /// `(g-1)g + g`, the two-part rewrite of `g^2`.
    fn square_rewrite(&mut self, g: u32) {
        self.parts.push((GadicExpansion::monomial(g, 1, g - 1), 0));
        self.parts.push((GadicExpansion::monomial(g, 1, 1), 0));
    }

    /// Lower digits `f_1..f_{l-1}` as single parts, then the top digit `f_0`
    /// telescoped into `pieces` parts. `unit` and `large` are the exponent
    /// floors `f_0 - shift > bound` checked for `a_{f_0} = 1` and `a_{f_0} > 1`.
    fn telescoped_tail(&mut self, rest: &[Term], pieces: i64, unit: Floor, large: Floor) -> Result<(), DecomposeError> {
        let top = rest[0];
        let l = rest.len() as i64;
        self.trace.exponents = rest.iter().map(|t| t.exponent).collect();
        self.trace.scalars.insert("l".into(), l as u64);
        let Floor(shift, bound, label) = if top.digit == 1 { unit } else { large };
        let h = self.p.h as i64;
        self.trace.check(top.exponent as i64 - shift(h, l) > bound(l), label)?;
        for &t in &rest[1..] {
            self.single(t);
        }
        self.top_telescope(top, pieces)
    }

    /// `a g^f` as `pieces` single-digit parts:
    /// `a = 1`: `(g-1)g^{f-1} + … + (g-1)g^{f-c+1} + g^{f-c+1}`;
    /// `a > 1`: `(a-1)g^f + (g-1)g^{f-1} + … + (g-1)g^{f-c+2} + g^{f-c+2}`.
    fn top_telescope(&mut self, top: Term, pieces: i64) -> Result<(), DecomposeError> {
        let g = self.p.g;
        self.trace.check(pieces >= 1, "telescope has at least one piece")?;
        let c = pieces as u64;
        let f = top.exponent;
        let mut out = Vec::new();
        if top.digit == 1 {
            self.trace.check(f >= c - 1 + 3, "lowest telescoped exponent f_0-(c-1) > 2")?;
            for j in 1..c {
                out.push(GadicExpansion::monomial(g, f - j, g - 1));
            }
            out.push(GadicExpansion::monomial(g, f - (c - 1), 1));
        } else if c == 1 {
            out.push(GadicExpansion::monomial(g, f, top.digit));
        } else {
            self.trace.check(f >= c - 2 + 3, "lowest telescoped exponent f_0-(c-2) > 2")?;
            out.push(GadicExpansion::monomial(g, f, top.digit - 1));
            for j in 1..=c - 2 {
                out.push(GadicExpansion::monomial(g, f - j, g - 1));
            }
            out.push(GadicExpansion::monomial(g, f - (c - 2), 1));
        }
        self.trace.scalars.insert("f0".into(), f);
        for e in out {
            let cell = self.p.cell(e.top().expect("nonzero piece").exponent);
            self.parts.push((e, cell));
        }
        Ok(())
    }
}

/// Case label `decompose_thm1` takes for `n`.
pub fn classify_case(n: &BigUint, p: &Thm1Params) -> Result<Thm1Case, DecomposeError> {
    Thm1Decomposer::new(p)?.classify(&gadic::expand(n, p.g)?)
}

/// `n` as a sum of `h` elements of `A \ {g^2}`, for `n > m_2`.
pub fn decompose_thm1(n: &BigUint, p: &Thm1Params) -> Result<DecompositionCertificate, DecomposeError> {
    Thm1Decomposer::new(p)?.decompose(n)
}

/// How many digits of each kind a sample for a given case carries.
struct Recipe {
    /// Digit at position 2 as the only `W_0` digit, drawn from this range.
    square: Option<(u32, u32)>,
    zero: (usize, usize),
    cells: (usize, usize),
}

fn recipe(case: Thm1Case, h: usize, g: u32) -> Recipe {
    let (z, c) = match case {
        Thm1Case::CellsSplit => ((0, 0), (h, h + 4)),
        Thm1Case::CellsTelescope => ((0, 0), (1, h - 1)),
        Thm1Case::MixedSplit => ((1, 4), (h - 1, h + 3)),
        Thm1Case::MixedTelescope => ((1, 4), (1, h - 2)),
        Thm1Case::ZeroMany => ((3, h + 3), (0, 0)),
        Thm1Case::ZeroPair => ((2, 2), (0, 0)),
        Thm1Case::ZeroPairSquare => ((1, 1), (0, 0)),
        Thm1Case::ZeroSingle => ((1, 1), (0, 0)),
        Thm1Case::SquareSplit | Thm1Case::UnitSquareSplit => ((0, 0), (h - 2, h + 3)),
        Thm1Case::SquareTelescope => ((0, 0), (1, h - 2)),
        Thm1Case::UnitSquareTelescope => ((0, 0), (1, h - 3)),
    };
    let square = match case {
        Thm1Case::SquareSplit | Thm1Case::SquareTelescope => Some((2, g - 1)),
        Thm1Case::UnitSquareSplit | Thm1Case::UnitSquareTelescope | Thm1Case::ZeroPairSquare => Some((1, 1)),
        _ => None,
    };
    Recipe {
        square,
        zero: z,
        cells: c,
    }
}

const SAMPLE_ATTEMPTS: usize = 10_000;

/// Random `n > m_2` with all exponents `<= max_exponent` that falls into
/// `case`, as a sparse expansion.
pub fn sample_expansion<R: Rng>(
    rng: &mut R,
    case: Thm1Case,
    p: &Thm1Params,
    max_exponent: u64,
) -> Result<GadicExpansion, DecomposeError> {
    let dec = Thm1Decomposer::new(p)?;
    let unreachable = |reason: String| DecomposeError::Unreachable {
        label: case.label().into(),
        reason,
    };
    if case.needs_large_square_digit() && p.g == 2 {
        return Err(unreachable("a_2 > 1 needs g >= 3".into()));
    }
    let h = p.h as usize;
    let r = recipe(case, h, p.g);
    let mut cell_positions = Vec::new();
    let mut i = 1;
    while p.m(i) < max_exponent {
        cell_positions.extend((p.m(i) + 1..=p.m(i) + p.t as u64).filter(|&w| w <= max_exponent));
        i += 1;
    }
    if cell_positions.len() < r.cells.0 {
        return Err(unreachable(format!(
            "needs {} positions outside W_0 below {max_exponent}, found {}",
            r.cells.0,
            cell_positions.len()
        )));
    }
    let cell_hi = r.cells.1.min(cell_positions.len());
    let small = 2 * h as u64 + 4;
    for _ in 0..SAMPLE_ATTEMPTS {
        let mut digits: BTreeMap<u64, u32> = BTreeMap::new();
        if let Some((lo, hi)) = r.square {
            digits.insert(2, rng.gen_range(lo..=hi));
        }
        let zcount = rng.gen_range(r.zero.0..=r.zero.1);
        let mut placed = 0;
        while placed < zcount {
            let w = if rng.gen_bool(0.25) {
                rng.gen_range(0..small.min(max_exponent + 1))
            } else {
                rng.gen_range(0..=max_exponent)
            };
            if p.cell(w) == 0 && !digits.contains_key(&w) {
                digits.insert(w, rng.gen_range(1..p.g));
                placed += 1;
            }
        }
        let ccount = rng.gen_range(r.cells.0..=cell_hi.max(r.cells.0));
        let mut pool = cell_positions.clone();
        for _ in 0..ccount {
            let w = pool.swap_remove(rng.gen_range(0..pool.len()));
            digits.insert(w, rng.gen_range(1..p.g));
        }
        let terms = digits
            .into_iter()
            .rev()
            .map(|(exponent, digit)| Term { exponent, digit })
            .collect();
        let n = GadicExpansion::new(p.g, terms)?;
        if let Ok(c) = dec.classify(&n) {
            if c == case {
                return Ok(n);
            }
        }
    }
    Err(unreachable(format!("no sample found in {SAMPLE_ATTEMPTS} attempts")))
}

/// Seeded sample for a case label, as an integer.
pub fn sample_for_case(label: &str, p: &Thm1Params, seed: u64, max_exponent: u64) -> Result<BigUint, DecomposeError> {
    let case: Thm1Case = label.parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_expansion(&mut rng, case, p, max_exponent)?.evaluate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::thm1_partition;
    use crate::decompose::verify_certificate;

    fn params() -> Thm1Params {
        Thm1Params::new(2, 4, 2, 65, 65).unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn pow2(e: u32) -> BigUint {
        BigUint::from(1u32) << e
    }

    fn parts(c: &DecompositionCertificate) -> Vec<BigUint> {
        c.parts_big()
    }

    #[test]
    fn two_hundred() {
        let c = decompose_thm1(&big(200), &params()).unwrap();
        assert_eq!(parts(&c), vec![big(64), big(8), big(64), big(64)]);
        assert_eq!(c.trace.case, "2.3-k3");
        assert_eq!(c.trace.scalars["k"], 3);
        assert_eq!(c.trace.scalars["f0"], 7);
        assert_eq!(c.trace.variant, None);
    }

    #[test]
    fn square_plus_top() {
        let n = pow2(70) + 4u32;
        let c = decompose_thm1(&n, &params()).unwrap();
        assert_eq!(parts(&c), vec![big(2), big(2), pow2(69), pow2(69)]);
        assert_eq!(c.trace.case, "2.3-k2-f2");
    }

    #[test]
    fn square_plus_cell_digit() {
        let n = pow2(66) + 4u32;
        let c = decompose_thm1(&n, &params()).unwrap();
        assert_eq!(parts(&c), vec![big(2), big(2), pow2(65), pow2(65)]);
        assert_eq!(c.trace.case, "3.4");
        assert_eq!(c.part_cells, vec![0, 0, 0, 0]);
    }

    #[test]
    fn classify_examples() {
        let p = params();
        assert_eq!(classify_case(&big(200), &p).unwrap(), Thm1Case::ZeroMany);
        assert_eq!(classify_case(&(pow2(66) + pow2(67)), &p).unwrap().label(), "1.2");
        assert_eq!(classify_case(&(pow2(66) + 4u32), &p).unwrap().label(), "3.4");
    }

    #[test]
    fn proven_range_only() {
        let p = params();
        assert!(matches!(decompose_thm1(&big(100), &p), Err(DecomposeError::OutOfRange { .. })));
        assert!(matches!(decompose_thm1(&big(130), &p), Err(DecomposeError::OutOfRange { .. })));
        assert!(decompose_thm1(&big(131), &p).is_ok());
    }

    #[test]
    fn every_integer_in_window() {
        let p = params();
        let spec = thm1_partition(&p).unwrap();
        let dec = Thm1Decomposer::new(&p).unwrap();
        for n in 131u64..20_000 {
            let c = dec.decompose(&big(n)).unwrap_or_else(|e| panic!("n={n}: {e}"));
            assert!(verify_certificate(&c, &spec, 2).is_valid(), "n={n}");
        }
    }

    #[test]
    fn labels_round_trip() {
        for c in Thm1Case::ALL {
            assert_eq!(c.label().parse::<Thm1Case>().unwrap(), c);
        }
        assert!("9.9".parse::<Thm1Case>().is_err());
    }

    #[test]
    fn many_low_digits_regroup() {
        // k = 6 > h digits, all in W_0
        let n = pow2(100) + pow2(90) + pow2(80) + pow2(70) + 8u32 + 4u32;
        let p = params();
        let c = decompose_thm1(&n, &p).unwrap();
        assert_eq!(c.trace.case, "2.3-k3");
        assert_eq!(c.trace.variant.as_deref(), Some("regrouped"));
        assert!(verify_certificate(&c, &thm1_partition(&p).unwrap(), 2).is_valid());
    }

    #[test]
    fn isolated_square_regroups() {
        let n = pow2(100) + pow2(90) + 4u32;
        let c = decompose_thm1(&n, &params()).unwrap();
        assert_eq!(c.trace.variant.as_deref(), Some("regrouped"));
        assert!(!c.parts.contains(&GadicExpansion::monomial(2, 2, 1)));
        assert_eq!(c.parts.len(), 4);
    }

    #[test]
    fn every_cell_touched_spreads_into_zero() {
        let p = params();
        let spec = thm1_partition(&p).unwrap();
        let core = pow2(66) + pow2(131) + pow2(196);
        for n in [core.clone() + 4u32, core * 3u32 + 4u32] {
            let c = decompose_thm1(&n, &p).unwrap();
            assert_eq!(c.trace.case, "3.3");
            assert_eq!(c.trace.variant.as_deref(), Some("w0-spread"));
            assert_eq!(c.part_cells, vec![0; 4]);
            assert!(verify_certificate(&c, &spec, 2).is_valid());
        }
    }

    #[test]
    fn unit_square_split_uses_groups() {
        let n = pow2(66) + pow2(67) + pow2(131) + 4u32;
        let c = decompose_thm1(&n, &params()).unwrap();
        assert_eq!(c.trace.case, "3.3");
        assert_eq!(c.trace.variant, None);
        assert_eq!(c.parts[0], GadicExpansion::monomial(2, 1, 1));
    }

    #[test]
    fn samples_hit_their_case() {
        let p = params();
        let dec = Thm1Decomposer::new(&p).unwrap();
        for case in Thm1Case::ALL {
            let res = sample_for_case(case.label(), &p, 7, 400);
            if case.needs_large_square_digit() {
                assert!(matches!(res, Err(DecomposeError::Unreachable { .. })));
                continue;
            }
            let n = res.unwrap();
            assert_eq!(dec.classify(&gadic::expand(&n, 2).unwrap()).unwrap(), case);
            assert!(n > big(p.m2()));
        }
    }

    #[test]
    fn samples_are_deterministic() {
        let p = params();
        let a = sample_for_case("2.2", &p, 11, 400).unwrap();
        let b = sample_for_case("2.2", &p, 11, 400).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn base_three_square_cases() {
        let m = 3u64.pow(11) + 1;
        let p = Thm1Params::new(3, 9, 2, m, m).unwrap();
        let dec = Thm1Decomposer::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let top = p.m(9) + 2;
        for case in [Thm1Case::SquareSplit, Thm1Case::SquareTelescope, Thm1Case::UnitSquareSplit] {
            for _ in 0..20 {
                let n = sample_expansion(&mut rng, case, &p, top).unwrap();
                let c = dec.decompose_expansion(&n).unwrap();
                assert_eq!(c.trace.case, case.label());
                assert_eq!(c.parts.len(), 9);
            }
        }
    }
}
