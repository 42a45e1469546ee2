//! Verification drivers shared by the command-line tool and the test suites.
//!
//! Each driver runs one family of checks end to end and returns a
//! serializable report with a `passed` flag. Parallel loops collect results
//! in input order, so reports are identical across runs and thread counts.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{
    sample_expansion, verify_certificate, DecomposeError, DecompositionCertificate, Thm1Case, Thm1Decomposer,
    Thm2Decomposer, Verdict,
};
use crate::gadic::{self, GadicExpansion, Term};
use crate::partition::{
    block_partition, check_hypotheses, residue_partition, thm1_partition, thm2_partition, HypothesisReport,
    PartitionError, PartitionSpec, Thm1Params, Thm2Params,
};
use crate::sumset::{self, MinimalityReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub n: String,
    pub reason: String,
}

fn failure(n: impl ToString, reason: impl ToString) -> Failure {
    Failure {
        n: n.to_string(),
        reason: reason.to_string(),
    }
}

fn check_cert(cert: Result<DecompositionCertificate, DecomposeError>, spec: &PartitionSpec, g: u32) -> Result<DecompositionCertificate, String> {
    let cert = cert.map_err(|e| e.to_string())?;
    match verify_certificate(&cert, spec, g) {
        Verdict::Valid => Ok(cert),
        Verdict::Invalid(v) => Err(v.to_string()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm2Report {
    pub params: Thm2Params,
    pub from: u64,
    pub to: u64,
    pub decomposed: u64,
    pub failures: Vec<Failure>,
    /// Number of certificates whose outermost step took each case.
    pub cases: BTreeMap<String, u64>,
    /// Least `n0` with `[n0, to] ⊆ h A_g(W_0)` according to the bitset oracle.
    pub oracle_threshold: Option<u64>,
    /// The oracle contains every `n` in `[h, to]`.
    pub oracle_covers: bool,
    /// Integers where decomposer and oracle disagree.
    pub disagreements: Vec<u64>,
    pub passed: bool,
}

/// Decomposes and verifies every `n` in `[h, to]`, then checks the result
/// against the bitset sumset of `A_g(W_0)`.
pub fn verify_thm2(p: &Thm2Params, to: u64) -> Result<Thm2Report, PartitionError> {
    let spec = thm2_partition(p)?;
    let dec = Thm2Decomposer::new(p).map_err(|e| match e {
        DecomposeError::InvalidParams(pe) => pe,
        other => unreachable!("{other}"),
    })?;
    let h = p.h as u64;
    let outcomes: Vec<(u64, Result<String, String>)> = (h..=to.max(h))
        .into_par_iter()
        .map(|n| {
            let r = check_cert(dec.decompose(&n.into()), &spec, p.g).map(|c| c.trace.case);
            (n, r)
        })
        .collect();
    let mut cases = BTreeMap::new();
    let mut failures = Vec::new();
    let mut ok_set = Vec::with_capacity(outcomes.len());
    for (n, r) in outcomes {
        match r {
            Ok(case) => {
                *cases.entry(case).or_insert(0) += 1;
                ok_set.push(n);
            }
            Err(e) => failures.push(failure(n, e)),
        }
    }
    let zero = sumset::restrict_members(|w| p.in_w0(w), p.g, to);
    let reach = sumset::hfold(&zero, p.h, to).expect("bound matches");
    let disagreements: Vec<u64> = (h..=to)
        .filter(|&n| reach.contains(n).unwrap() != ok_set.binary_search(&n).is_ok())
        .collect();
    let oracle_threshold = sumset::threshold(&reach);
    let oracle_covers = oracle_threshold.is_some_and(|t| t <= h);
    Ok(Thm2Report {
        params: *p,
        from: h,
        to,
        decomposed: ok_set.len() as u64,
        passed: failures.is_empty() && disagreements.is_empty() && oracle_covers,
        failures,
        cases,
        oracle_threshold,
        oracle_covers,
        disagreements,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomReport {
    pub samples: usize,
    pub max_exponent: u64,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// Random `n` below `g^max_exponent` (and at least `h`).
pub fn verify_thm2_random(p: &Thm2Params, samples: usize, seed: u64, max_exponent: u64) -> Result<RandomReport, PartitionError> {
    let spec = thm2_partition(p)?;
    let dec = Thm2Decomposer::new(p).map_err(|e| match e {
        DecomposeError::InvalidParams(pe) => pe,
        other => unreachable!("{other}"),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<BigUint> = (0..samples)
        .map(|_| {
            let top = rng.gen_range(1..=max_exponent);
            let digits: Vec<u8> = (0..top).map(|_| rng.gen_range(0..p.g) as u8).collect();
            BigUint::from_radix_le(&digits, p.g).expect("digits below base") + p.h
        })
        .collect();
    let failures: Vec<Failure> = inputs
        .par_iter()
        .filter_map(|n| check_cert(dec.decompose(n), &spec, p.g).err().map(|e| failure(n, e)))
        .collect();
    Ok(RandomReport {
        samples,
        max_exponent,
        passed: failures.is_empty(),
        failures,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseRow {
    pub case: String,
    pub reachable: bool,
    pub samples: usize,
    pub valid: usize,
    /// Certificates built by a generalized construction, by variant name.
    pub variants: BTreeMap<String, usize>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Thm1Report {
    pub params: Thm1Params,
    pub seed: u64,
    pub max_exponent: u64,
    pub rows: Vec<CaseRow>,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

impl Thm1Report {
    pub fn row(&self, label: &str) -> Option<&CaseRow> {
        self.rows.iter().find(|r| r.case == label)
    }
}

/// Samples `per_case` integers for every reachable case label, decomposes
/// them and verifies each certificate, including that no part is `g^2`.
pub fn verify_thm1(p: &Thm1Params, per_case: usize, seed: u64, max_exponent: u64) -> Result<Thm1Report, PartitionError> {
    let dec = Thm1Decomposer::new(p).map_err(|e| match e {
        DecomposeError::InvalidParams(pe) => pe,
        other => unreachable!("{other}"),
    })?;
    let spec = thm1_partition(p)?;
    let square = GadicExpansion::monomial(p.g, 2, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for case in Thm1Case::ALL {
        let mut samples = Vec::with_capacity(per_case);
        let mut note = None;
        for _ in 0..per_case {
            match sample_expansion(&mut rng, case, p, max_exponent) {
                Ok(n) => samples.push(n),
                Err(e) => {
                    note = Some(e.to_string());
                    break;
                }
            }
        }
        let results: Vec<Result<DecompositionCertificate, Failure>> = samples
            .par_iter()
            .map(|n| {
                let label = || display_n(n);
                let cert = check_cert(dec.decompose_expansion(n), &spec, p.g).map_err(|e| failure(label(), e))?;
                if cert.trace.case != case.label() {
                    return Err(failure(label(), format!("took case {} instead of {}", cert.trace.case, case)));
                }
                if cert.parts.contains(&square) {
                    return Err(failure(label(), "a part equals g^2"));
                }
                if let Some(bad) = membership_failure(&cert, &spec) {
                    return Err(failure(label(), bad));
                }
                Ok(cert)
            })
            .collect();
        let mut row = CaseRow {
            case: case.label().into(),
            reachable: note.is_none() || !samples.is_empty(),
            samples: samples.len(),
            valid: 0,
            variants: BTreeMap::new(),
            note,
        };
        for r in results {
            match r {
                Ok(c) => {
                    row.valid += 1;
                    if let Some(v) = c.trace.variant {
                        *row.variants.entry(v).or_insert(0) += 1;
                    }
                }
                Err(f) => failures.push(f),
            }
        }
        rows.push(row);
    }
    let passed = failures.is_empty() && rows.iter().all(|r| !r.reachable || r.valid == per_case);
    Ok(Thm1Report {
        params: *p,
        seed,
        max_exponent,
        rows,
        failures,
        passed,
    })
}

/// Small parts are re-checked as integers with `is_member`; huge ones were
/// already checked exponent by exponent.
fn membership_failure(cert: &DecompositionCertificate, spec: &PartitionSpec) -> Option<String> {
    for (j, (part, &cell)) in cert.parts.iter().zip(&cert.part_cells).enumerate() {
        if part.top().is_some_and(|t| t.exponent < 4096) && !gadic::is_member(&part.evaluate(), spec.in_cell(cell), cert.g) {
            return Some(format!("part {j} is not in A_g(W_{cell})"));
        }
    }
    None
}

fn display_n(n: &GadicExpansion) -> String {
    match n.top() {
        Some(t) if t.exponent < 4096 => n.evaluate().to_string(),
        _ => n.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    MoveDigit,
    ForbiddenPart,
    PerturbSum,
}

impl Mutation {
    pub fn expected_clause(self) -> &'static str {
        match self {
            Mutation::MoveDigit => "cell-membership",
            Mutation::ForbiddenPart => "forbidden-element",
            Mutation::PerturbSum => "sum-mismatch",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FaultCase {
    pub mutation: Mutation,
    pub n: String,
    pub diagnosed: Option<String>,
    pub correct: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaultReport {
    pub total: usize,
    pub correct: usize,
    pub misses: Vec<FaultCase>,
    pub passed: bool,
}

/// Moves one digit of a part into a position of another cell.
fn move_digit(c: &mut DecompositionCertificate, j: usize, cell: impl Fn(u64) -> u32) -> bool {
    let part = &c.parts[j];
    let declared = c.part_cells[j];
    let Some(&Term { exponent, digit }) = part.terms().last() else {
        return false;
    };
    let target = (exponent + 1..).find(|&w| cell(w) != declared && part.digit_at(w) == 0 && w >= 3).unwrap();
    let mut terms: Vec<Term> = part.terms()[..part.len() - 1].to_vec();
    terms.push(Term { exponent: target, digit });
    terms.sort_by_key(|t| std::cmp::Reverse(t.exponent));
    c.parts[j] = GadicExpansion::new(c.g, terms).expect("distinct exponents");
    true
}

/// Builds `count` mutated certificates from valid ones (cycling through the
/// three mutation kinds) and checks that each is rejected with the clause
/// matching its mutation.
pub fn fault_injection(count: usize, seed: u64) -> FaultReport {
    let p1 = Thm1Params::new(2, 4, 2, 65, 65).expect("valid parameters");
    let p2 = Thm2Params::new(2, 5, 2, 7).expect("valid parameters");
    let spec1 = thm1_partition(&p1).expect("valid parameters");
    let spec2 = thm2_partition(&p2).expect("valid parameters");
    let d1 = Thm1Decomposer::new(&p1).expect("valid parameters");
    let d2 = Thm2Decomposer::new(&p2).expect("valid parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(count);
    for idx in 0..count {
        let mutation = [Mutation::MoveDigit, Mutation::ForbiddenPart, Mutation::PerturbSum][idx % 3];
        // certificates with a forbidden element come from the first decomposer only
        let use_first = mutation == Mutation::ForbiddenPart || rng.gen_bool(0.5);
        let (mut cert, spec) = if use_first {
            let case = Thm1Case::ALL[rng.gen_range(0..Thm1Case::ALL.len())];
            let case = if case.needs_large_square_digit() { Thm1Case::MixedSplit } else { case };
            let n = sample_expansion(&mut rng, case, &p1, 400).expect("reachable case");
            (d1.decompose_expansion(&n).expect("proven range"), &spec1)
        } else {
            let n: u64 = rng.gen_range(5..1_000_000);
            (d2.decompose(&n.into()).expect("n >= h"), &spec2)
        };
        let j = rng.gen_range(0..cert.parts.len());
        match mutation {
            Mutation::MoveDigit => {
                move_digit(&mut cert, j, |w| spec.cell(w));
            }
            Mutation::ForbiddenPart => {
                cert.parts[j] = GadicExpansion::monomial(cert.g, 2, 1);
            }
            Mutation::PerturbSum => {
                cert.n = cert.n.add(&GadicExpansion::monomial(cert.g, 0, 1));
            }
        }
        let verdict = verify_certificate(&cert, spec, cert.g);
        let diagnosed = verdict.violation().map(|v| v.clause().to_string());
        let correct = diagnosed.as_deref() == Some(mutation.expected_clause());
        cases.push(FaultCase {
            mutation,
            n: display_n(&cert.n),
            diagnosed,
            correct,
        });
    }
    let correct = cases.iter().filter(|c| c.correct).count();
    FaultReport {
        total: count,
        correct,
        passed: correct == count,
        misses: cases.into_iter().filter(|c| !c.correct).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjointnessReport {
    pub g: u32,
    pub h: u32,
    pub bound: u64,
    pub sizes: Vec<usize>,
    /// `(i, j, n)` with `n ∈ A_g(W_i) ∩ A_g(W_j)`.
    pub violations: Vec<(u32, u32, u64)>,
    pub passed: bool,
}

/// Pairwise disjointness of the `A_g(W_i)` for the residue partition mod `h`.
pub fn lemma1_disjoint(g: u32, h: u32, bound: u64) -> Result<DisjointnessReport, PartitionError> {
    let spec = residue_partition(h)?;
    let sets: Vec<Vec<u64>> = (0..h)
        .into_par_iter()
        .map(|c| gadic::enumerate_members(spec.in_cell(c), g, bound))
        .collect();
    let mut violations = Vec::new();
    for i in 0..h as usize {
        for j in i + 1..h as usize {
            let (a, b) = (&sets[i], &sets[j]);
            let (mut x, mut y) = (0, 0);
            while x < a.len() && y < b.len() {
                match a[x].cmp(&b[y]) {
                    std::cmp::Ordering::Less => x += 1,
                    std::cmp::Ordering::Greater => y += 1,
                    std::cmp::Ordering::Equal => {
                        violations.push((i as u32, j as u32, a[x]));
                        x += 1;
                        y += 1;
                    }
                }
            }
        }
    }
    Ok(DisjointnessReport {
        g,
        h,
        bound,
        sizes: sets.iter().map(Vec::len).collect(),
        passed: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisReport {
    pub g: u32,
    pub h: u32,
    pub bound: u64,
    pub threshold: Option<u64>,
    pub limit: u64,
    /// Integers in `[1, threshold)` missing from the sumset.
    pub exceptions: Vec<u64>,
    pub passed: bool,
}

/// `h`-fold sumset of `⋃ A_g(W_i)` over the residue partition mod `h`,
/// passing when it covers `[C, bound]` for some `C <= limit`.
pub fn lemma1_basis(g: u32, h: u32, bound: u64, limit: u64) -> Result<BasisReport, PartitionError> {
    let spec = residue_partition(h)?;
    let union = sumset::restrict_union(&spec, g, bound);
    let reach = sumset::hfold(&union, h, bound).expect("bound matches");
    let threshold = sumset::threshold(&reach);
    let exceptions = match threshold {
        Some(t) => (1..t).filter(|&n| !reach.contains(n).unwrap()).collect(),
        None => Vec::new(),
    };
    Ok(BasisReport {
        g,
        h,
        bound,
        threshold,
        limit,
        exceptions,
        passed: threshold.is_some_and(|t| t <= limit),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub g: u32,
    pub partition: PartitionSpec,
    pub hypotheses: HypothesisReport,
    pub probe: MinimalityReport,
    pub passed: bool,
}

/// Minimality probe on the union of `A_g(W_i)` for a partition into blocks
/// of `t` consecutive positions. Passes when the partition satisfies the run
/// hypotheses and every probed `E_a` is nonempty. Evidence only.
pub fn minimality_block_probe(g: u32, h: u32, t: u32, bound: u64, probe_bound: u64) -> Result<ProbeReport, PartitionError> {
    let spec = block_partition(h, t)?;
    probe_partition(g, t, spec, bound, probe_bound)
}

pub fn probe_partition(g: u32, t: u32, spec: PartitionSpec, bound: u64, probe_bound: u64) -> Result<ProbeReport, PartitionError> {
    let h = spec.h();
    let hypotheses = check_hypotheses(&spec, g, h, t);
    let union = sumset::restrict_union(&spec, g, bound);
    let probe = sumset::minimality_probe(&union, h, bound, probe_bound).expect("bound matches");
    Ok(ProbeReport {
        g,
        passed: hypotheses.holds() && probe.all_nonempty() && !probe.entries.is_empty(),
        partition: spec,
        hypotheses,
        probe,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripReport {
    pub bases: Vec<u32>,
    pub exhaustive_to: u64,
    pub random_samples: usize,
    pub counterexamples: Vec<String>,
    pub passed: bool,
}

/// `evaluate(expand(n)) = n` with canonical digits, exhaustively on
/// `[0, exhaustive_to]` and on random integers below `g^max_exponent`.
pub fn gadic_round_trip(bases: &[u32], exhaustive_to: u64, samples: usize, max_exponent: u32, seed: u64) -> RoundTripReport {
    let mut counterexamples = Vec::new();
    let canonical = |e: &GadicExpansion| GadicExpansion::new(e.base(), e.terms().to_vec()).is_ok();
    for &g in bases {
        let bad: Vec<String> = (0..=exhaustive_to)
            .into_par_iter()
            .filter_map(|n| {
                let e = gadic::expand(&BigUint::from(n), g).ok()?;
                let ok = canonical(&e) && e.to_u64() == Some(n) && gadic::expand_u64(n, g).ok()? == e;
                (!ok).then(|| format!("g={g} n={n}"))
            })
            .collect();
        counterexamples.extend(bad);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ g as u64);
        for _ in 0..samples {
            let len = rng.gen_range(1..=max_exponent as usize);
            let digits: Vec<u8> = (0..len).map(|_| rng.gen_range(0..g) as u8).collect();
            let n = BigUint::from_radix_le(&digits, g).expect("digits below base");
            let e = gadic::expand(&n, g).expect("valid base");
            let from_digits: Vec<Term> = digits
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &d)| d != 0)
                .map(|(i, &d)| Term {
                    exponent: i as u64,
                    digit: d as u32,
                })
                .collect();
            if !canonical(&e) || gadic::evaluate(&e) != n || e.terms() != from_digits.as_slice() {
                counterexamples.push(format!("g={g} random n with {len} digits"));
            }
        }
    }
    RoundTripReport {
        bases: bases.to_vec(),
        exhaustive_to,
        random_samples: samples,
        passed: counterexamples.is_empty(),
        counterexamples,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub x: u64,
    pub count: u64,
}

/// `|A_g(W) ∩ [1, g^j]|` for `j = 1..=steps`.
pub fn growth_table(w: impl Fn(u64) -> bool + Copy, g: u32, steps: u32) -> Vec<GrowthRow> {
    (1..=steps)
        .map_while(|j| (g as u64).checked_pow(j))
        .map(|x| GrowthRow {
            x,
            count: gadic::count_members(w, g, x),
        })
        .collect()
}

/// Least-squares slope of `log count` against `log x`.
pub fn log_log_slope(rows: &[GrowthRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.count > 0)
        .map(|r| ((r.x as f64).ln(), (r.count as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Some(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm2_small_window() {
        let p = Thm2Params::new(2, 5, 2, 7).unwrap();
        let r = verify_thm2(&p, 4096).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.decomposed, 4092);
    }

    #[test]
    fn thm1_few_samples() {
        let p = Thm1Params::new(2, 4, 2, 65, 65).unwrap();
        let r = verify_thm1(&p, 20, 1, 400).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert!(!r.row("3.1").unwrap().reachable);
        assert_eq!(r.row("1.1").unwrap().valid, 20);
    }

    #[test]
    fn faults_are_caught() {
        let r = fault_injection(30, 9);
        assert!(r.passed, "{:?}", r.misses);
    }

    #[test]
    fn disjoint_and_basis() {
        assert!(lemma1_disjoint(2, 3, 10_000).unwrap().passed);
        let b = lemma1_basis(2, 2, 1 << 12, 100).unwrap();
        assert!(b.passed, "{b:?}");
    }

    #[test]
    fn growth_slope_for_evens() {
        // A_2(evens) up to 2^j has about 2^{j/2} elements
        let rows = growth_table(|w| w % 2 == 0, 2, 30);
        let slope = log_log_slope(&rows).unwrap();
        assert!((slope - 0.5).abs() < 0.05, "{slope}");
    }

    #[test]
    fn round_trip_small() {
        let r = gadic_round_trip(&[2, 3], 1000, 5, 50, 1);
        assert!(r.passed);
    }
}
