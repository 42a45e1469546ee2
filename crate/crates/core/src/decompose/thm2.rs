//! Decomposition of every `n >= h` into `h` elements of `A_g(W_0)` for the
//! periodic partition.
//!
//! The induction on `n` is unrolled: the descent subtracts a multiple of a
//! power of `g` at each level until a base case `h <= n <= h + g(g-1)` is
//! reached, then the unwind repairs the parts level by level.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{first_violation, DecomposeError, DecompositionCertificate, DecompositionTrace, TraceStep};
use crate::gadic;
use crate::partition::Thm2Params;

/// What to do with the parts on the way back up.
enum Repair {
    /// Add `(g-1)g^e` to the first part below it.
    Single { e: u64 },
    /// Add `g^e` to the first `g-1` parts below `(g-1)g^e`.
    Spread { e: u64 },
    /// Reassemble around the digit position `p = mk+v-1`.
    Telescoped { p: u64, s: u64, tail: BigUint },
    /// Reassemble with `q` copies of `g^e` and `s` copies of `(g-1)g^{e+1}`.
    Shifted { e: u64, s: u64, q: u64 },
}

/// Decomposer bound to one parameter set.
#[derive(Debug, Clone)]
pub struct Thm2Decomposer {
    p: Thm2Params,
}

/// `g^0, g^1, …` extended on demand.
struct Powers {
    g: BigUint,
    pw: Vec<BigUint>,
}

impl Powers {
    fn new(g: u32) -> Self {
        Self {
            g: BigUint::from(g),
            pw: vec![BigUint::one()],
        }
    }

    fn get(&mut self, e: u64) -> &BigUint {
        while self.pw.len() as u64 <= e {
            let next = self.pw.last().unwrap() * &self.g;
            self.pw.push(next);
        }
        &self.pw[e as usize]
    }

    /// Largest `e` with `scale * g^e <= x`, for `x >= scale`.
    fn floor_log(&mut self, x: &BigUint, scale: &BigUint) -> u64 {
        let mut e = 0;
        while scale * self.get(e + 1) <= *x {
            e += 1;
        }
        e
    }
}

impl Thm2Decomposer {
    pub fn new(p: &Thm2Params) -> Result<Self, DecomposeError> {
        p.validate()?;
        Ok(Self { p: *p })
    }

    pub fn params(&self) -> &Thm2Params {
        &self.p
    }

    pub fn decompose(&self, n: &BigUint) -> Result<DecompositionCertificate, DecomposeError> {
        let Thm2Params { g, h, t, m } = self.p;
        let (gu, hu, tu, mu) = (g as u64, h as u64, t as u64, m as u64);
        let hb = BigUint::from(h);
        if *n < hb {
            return Err(DecomposeError::OutOfRange {
                n: n.to_string(),
                requirement: format!(">= h = {h}"),
            });
        }
        let g1 = BigUint::from(g - 1);
        let mut pw = Powers::new(g);
        let mut trace = DecompositionTrace::new("");
        let mut repairs: Vec<Repair> = Vec::new();
        let mut cur = n.clone();
        let base_top = &hb + BigUint::from(gu * (gu - 1));

        let mut parts: Vec<BigUint> = loop {
            let mut step = TraceStep {
                n: cur.clone(),
                ..TraceStep::default()
            };
            if cur == hb {
                step.case = "base-h".into();
                trace.steps.push(step);
                break vec![BigUint::one(); h as usize];
            }
            if cur <= base_top {
                let i = (&cur - &hb).to_u64().expect("small offset");
                step.case = "base-h+i".into();
                step.scalars.insert("i".into(), i);
                trace.steps.push(step);
                let mut v = vec![BigUint::one(); h as usize - 1];
                v.push(BigUint::from(i + 1));
                break v;
            }
            let x = &cur - &hb;
            let e = pw.floor_log(&x, &g1);
            let (k, i) = (e / mu, e % mu);
            step.scalars.insert("k".into(), k);
            step.scalars.insert("i".into(), i);
            let mut checks: Vec<(bool, &str)> = vec![
                (
                    &g1 * pw.get(m as u64 * k) <= x && x < &g1 * pw.get(mu * (k + 1)),
                    "(g-1)g^{mk} <= n-h < (g-1)g^{m(k+1)}",
                ),
                (
                    &g1 * pw.get(e) <= x && x < &g1 * pw.get(e + 1),
                    "(g-1)g^{mk+i} <= n-h < (g-1)g^{mk+i+1}",
                ),
                (e >= 1, "mk+i >= 1"),
            ];
            let subtracted;
            if i + tu < mu {
                let amount = &g1 * pw.get(e);
                let rest = &cur - &amount;
                checks.push((
                    hb <= rest && rest < &g1 * &g1 * pw.get(e) + &hb,
                    "h <= n-(g-1)g^{mk+i} < (g-1)^2 g^{mk+i} + h",
                ));
                if i + tu + 2 <= mu {
                    step.case = "1.1".into();
                    repairs.push(Repair::Single { e });
                } else {
                    step.case = "1.2".into();
                    repairs.push(Repair::Spread { e });
                }
                subtracted = amount;
            } else {
                step.case = "2".into();
                let hg1 = &hb * &g1;
                let e2 = pw.floor_log(&x, &hg1);
                let base = mu * k;
                let u = e2 as i64 - base as i64;
                checks.push((
                    &hg1 * pw.get(e2) <= x && x < &hg1 * pw.get(e2 + 1),
                    "h(g-1)g^{mk+u} <= n-h < h(g-1)g^{mk+u+1}",
                ));
                checks.push((u >= 2 && u <= (mu - tu - 1) as i64, "2 <= u <= m-t-1"));
                if let Some(&(false, what)) = checks.iter().find(|c| !c.0) {
                    return Err(fail(&mut trace, step, checks, what));
                }
                let u = u as u64;
                step.scalars.insert("u".into(), u);
                if u == mu - tu - 1 {
                    step.case = "2.1".into();
                    let top = mu - tu - 1;
                    let mut v = top;
                    let mut sv = &hg1 * pw.get(base + top);
                    loop {
                        let wider = &sv + &hg1 * pw.get(base + v - 1);
                        if x < wider {
                            break;
                        }
                        sv = wider;
                        v -= 1;
                        if v == 0 {
                            break;
                        }
                    }
                    checks.push((v >= 3, "3 <= v <= m-t-1"));
                    if v < 3 {
                        return Err(fail(&mut trace, step, checks, "3 <= v <= m-t-1"));
                    }
                    let p = base + v - 1;
                    let unit = &g1 * pw.get(p);
                    let s = ((&x - &sv) / &unit).to_u64().unwrap_or(u64::MAX);
                    checks.push((s < hu, "0 <= s <= h-1"));
                    if let Some(&(false, what)) = checks.iter().find(|c| !c.0) {
                        return Err(fail(&mut trace, step, checks, what));
                    }
                    let amount = BigUint::from(s) * &unit + &sv;
                    let rest = &cur - &amount;
                    checks.push((
                        hb <= rest && rest < &unit + &hb,
                        "h <= n-s(g-1)g^{mk+v-1}-sum h(g-1)g^{mk+j} < (g-1)g^{mk+v-1}+h",
                    ));
                    let tail: BigUint = (v..=top).map(|j| &g1 * pw.get(base + j)).sum();
                    step.scalars.insert("v".into(), v);
                    step.scalars.insert("s".into(), s);
                    repairs.push(Repair::Telescoped { p, s, tail });
                    subtracted = amount;
                } else {
                    step.case = "2.2".into();
                    let ep = base + u;
                    let big_unit = &g1 * pw.get(ep + 1);
                    let s = (&x / &big_unit).to_u64().unwrap_or(u64::MAX);
                    let s_lo = gu.pow(t - 1) * (gu - 1);
                    checks.push((s_lo <= s && s < hu, "g^{t-1}(g-1) <= s <= h-1"));
                    if let Some(&(false, what)) = checks.iter().find(|c| !c.0) {
                        return Err(fail(&mut trace, step, checks, what));
                    }
                    let rem = &x - BigUint::from(s) * &big_unit;
                    let q = (&rem / pw.get(ep)).to_u64().unwrap_or(u64::MAX);
                    checks.push((q < gu * (gu - 1), "0 <= q <= g(g-1)-1"));
                    if let Some(&(false, what)) = checks.iter().find(|c| !c.0) {
                        return Err(fail(&mut trace, step, checks, what));
                    }
                    let amount = BigUint::from(q) * pw.get(ep) + BigUint::from(s) * &big_unit;
                    let rest = &cur - &amount;
                    checks.push((
                        hb <= rest && rest < pw.get(ep) + &hb,
                        "h <= n-qg^{mk+u}-s(g-1)g^{mk+u+1} < g^{mk+u}+h",
                    ));
                    step.scalars.insert("s".into(), s);
                    step.scalars.insert("q".into(), q);
                    repairs.push(Repair::Shifted { e: ep, s, q });
                    subtracted = amount;
                }
            }
            checks.push((!subtracted.is_zero(), "recursion argument strictly decreases"));
            if let Some(&(false, what)) = checks.iter().find(|c| !c.0) {
                return Err(fail(&mut trace, step, checks, what));
            }
            step.inequalities = checks.into_iter().map(|c| c.1.to_string()).collect();
            cur -= &subtracted;
            step.subtracted = Some(subtracted);
            trace.steps.push(step);
        };

        for (level, repair) in repairs.iter().enumerate().rev() {
            match repair {
                Repair::Single { e } => {
                    let add = &g1 * pw.get(*e);
                    let Some(j) = parts.iter().position(|a| *a < add) else {
                        let what = "some a_j < (g-1)g^{mk+i}";
                        return Err(violation(&trace, what));
                    };
                    trace.steps[level].scalars.insert("j".into(), j as u64 + 1);
                    parts[j] += add;
                }
                Repair::Spread { e } => {
                    let bound = &g1 * pw.get(*e);
                    let chosen: Vec<usize> = (0..parts.len()).filter(|&j| parts[j] < bound).take(g as usize - 1).collect();
                    if chosen.len() < g as usize - 1 {
                        return Err(violation(&trace, "at least g-1 a_j < (g-1)g^{mk+m-t-1}"));
                    }
                    let add = pw.get(*e).clone();
                    for &j in &chosen {
                        parts[j] += &add;
                    }
                }
                Repair::Telescoped { p, s, tail } => {
                    let gp = pw.get(*p).clone();
                    let ceiling = pw.get(p + 1).clone();
                    if parts.iter().any(|b| *b >= ceiling) {
                        return Err(violation(&trace, "b_j < g^{mk+v}"));
                    }
                    let (large, small): (Vec<BigUint>, Vec<BigUint>) = parts.drain(..).partition(|b| *b >= gp);
                    let l = large.len();
                    if l > g as usize - 1 {
                        return Err(violation(&trace, "at most g-1 b_j >= g^{mk+v-1}"));
                    }
                    let b: Vec<BigUint> = large.into_iter().chain(small).collect();
                    let r: Vec<BigUint> = b.iter().map(|x| x / &gp).collect();
                    let b_low: Vec<BigUint> = b.iter().map(|x| x % &gp).collect();
                    let r_sum: u64 = r.iter().map(|x| x.to_u64().expect("digit")).sum();
                    if r_sum > gu - 1 {
                        return Err(violation(&trace, "r_1+...+r_l <= g-1"));
                    }
                    let s = *s as usize;
                    let top = &g1 * &gp;
                    let moved: BigUint = r[..=s].iter().sum();
                    parts = (0..h as usize)
                        .map(|j| {
                            if j == 0 {
                                &b_low[0] + &moved * &gp + tail
                            } else if j <= s {
                                &b_low[j] + &top + tail
                            } else {
                                &b[j] + tail
                            }
                        })
                        .collect();
                    let step = &mut trace.steps[level];
                    step.scalars.insert("l".into(), l as u64);
                    step.values.insert("b".into(), b);
                    step.values.insert("b_prime".into(), b_low);
                    step.values.insert("r".into(), r);
                }
                Repair::Shifted { e, s, q } => {
                    let ge = pw.get(*e).clone();
                    let large: Vec<usize> = (0..parts.len()).filter(|&j| parts[j] >= ge).collect();
                    if large.len() > 1 {
                        return Err(violation(&trace, "at most one c_j >= g^{mk+u}"));
                    }
                    if let Some(&j) = large.first() {
                        let c = parts.remove(j);
                        parts.insert(0, c);
                    }
                    trace.steps[level].values.insert("c".into(), parts.clone());
                    let wide = &g1 * pw.get(e + 1);
                    for part in &mut parts[1..=*q as usize] {
                        *part += &ge;
                    }
                    for part in &mut parts[1..=*s as usize] {
                        *part += &wide;
                    }
                }
            }
        }

        let variant = repairs.iter().enumerate().find_map(|(level, r)| match r {
            Repair::Telescoped { s, .. } if trace.steps[level].scalars["l"] > s + 1 => Some("generalized"),
            Repair::Shifted { s, q, .. } if q > s => Some("generalized"),
            _ => None,
        });
        trace.variant = variant.map(str::to_string);
        trace.case = trace.steps[0].case.clone();
        for key in ["k", "i", "u", "v", "s", "q", "l"] {
            if let Some(&val) = trace.steps[0].scalars.get(key) {
                trace.scalars.insert(key.into(), val);
            }
        }
        let parts = parts
            .iter()
            .map(|x| gadic::expand(x, g))
            .collect::<Result<Vec<_>, _>>()?;
        let cert = DecompositionCertificate {
            g,
            h,
            n: gadic::expand(n, g)?,
            parts,
            part_cells: vec![0; h as usize],
            forbidden: None,
            target_cell: Some(0),
            trace,
        };
        if let Some(v) = first_violation(&cert, h, |w| self.p.cell(w), g) {
            return Err(DecomposeError::InvariantViolation {
                what: format!("certificate self-check: {v}"),
                trace: Box::new(cert.trace),
            });
        }
        Ok(cert)
    }
}

fn fail(trace: &mut DecompositionTrace, mut step: TraceStep, checks: Vec<(bool, &str)>, what: &str) -> DecomposeError {
    step.inequalities = checks.into_iter().filter(|c| c.0).map(|c| c.1.to_string()).collect();
    trace.steps.push(step);
    violation(trace, what)
}

fn violation(trace: &DecompositionTrace, what: &str) -> DecomposeError {
    DecomposeError::InvariantViolation {
        what: what.to_string(),
        trace: Box::new(trace.clone()),
    }
}

/// `n` as a sum of `h` elements of `A_g(W_0)`, for `n >= h`.
pub fn decompose_thm2(n: &BigUint, p: &Thm2Params) -> Result<DecompositionCertificate, DecomposeError> {
    Thm2Decomposer::new(p)?.decompose(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::verify_certificate;
    use crate::partition::thm2_partition;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> Thm2Params {
        Thm2Params::new(2, 5, 2, 7).unwrap()
    }

    fn parts_u64(c: &DecompositionCertificate) -> Vec<u64> {
        c.parts.iter().map(|p| p.to_u64().unwrap()).collect()
    }

    #[test]
    fn base_cases() {
        let p = params();
        let c = decompose_thm2(&5u32.into(), &p).unwrap();
        assert_eq!(parts_u64(&c), vec![1; 5]);
        assert_eq!(c.trace.case, "base-h");
        let c = decompose_thm2(&7u32.into(), &p).unwrap();
        assert_eq!(parts_u64(&c), vec![1, 1, 1, 1, 3]);
        assert_eq!(c.trace.case, "base-h+i");
    }

    #[test]
    fn eight_repairs_first_part() {
        let c = decompose_thm2(&8u32.into(), &params()).unwrap();
        assert_eq!(parts_u64(&c), vec![3, 1, 1, 1, 2]);
        assert_eq!(c.trace.case, "1.1");
        assert_eq!(c.trace.scalars["k"], 0);
        assert_eq!(c.trace.scalars["i"], 1);
        assert_eq!(c.trace.steps[0].subtracted, Some(BigUint::from(2u32)));
    }

    #[test]
    fn below_h_is_out_of_range() {
        assert!(matches!(
            decompose_thm2(&4u32.into(), &params()),
            Err(DecomposeError::OutOfRange { .. })
        ));
    }

    #[test]
    fn all_cases_occur() {
        let d = Thm2Decomposer::new(&params()).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for n in 5u32..20_000 {
            let c = d.decompose(&n.into()).unwrap();
            for s in &c.trace.steps {
                seen.insert(s.case.clone());
            }
        }
        for case in ["base-h", "base-h+i", "1.1", "1.2", "2.1", "2.2"] {
            assert!(seen.contains(case), "{case} never used");
        }
    }

    #[test]
    fn recursion_strictly_decreases() {
        let d = Thm2Decomposer::new(&params()).unwrap();
        let c = d.decompose(&BigUint::from(123_456_789u64)).unwrap();
        for w in c.trace.steps.windows(2) {
            assert!(w[1].n < w[0].n);
            assert_eq!(&w[0].n - w[0].subtracted.as_ref().unwrap(), w[1].n);
        }
    }

    #[test]
    fn base_three_window() {
        let p = Thm2Params::new(3, 7, 1, 6).unwrap();
        let spec = thm2_partition(&p).unwrap();
        let d = Thm2Decomposer::new(&p).unwrap();
        for n in 7u32..5_000 {
            let c = d.decompose(&n.into()).unwrap_or_else(|e| panic!("n={n}: {e}"));
            assert!(verify_certificate(&c, &spec, 3).is_valid());
        }
    }

    #[test]
    fn large_random_inputs() {
        let p = params();
        let spec = thm2_partition(&p).unwrap();
        let d = Thm2Decomposer::new(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let bits = rng.gen_range(20..500);
            let bytes: Vec<u8> = (0..bits / 8 + 1).map(|_| rng.gen()).collect();
            let n = BigUint::from_bytes_le(&bytes) + 5u32;
            let c = d.decompose(&n).unwrap();
            assert!(verify_certificate(&c, &spec, 2).is_valid());
        }
    }

    proptest! {
        #[test]
        fn certificates_verify(n in 5u64..1_000_000) {
            let p = params();
            let c = decompose_thm2(&n.into(), &p).unwrap();
            prop_assert!(verify_certificate(&c, &thm2_partition(&p).unwrap(), 2).is_valid());
        }
    }
}
