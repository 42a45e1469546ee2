use gadic_bases::checks;
use gadic_bases::gadic::{self, GadicExpansion};
use gadic_bases::partition::{block_partition, thm1_partition, thm2_partition};
use gadic_bases::sumset::{self, restrict_union};
use gadic_bases::{decompose_thm2, verify_certificate, BigUint, Thm1Params, Thm2Params, Verdict};
use proptest::prelude::*;

fn thm2() -> Thm2Params {
    Thm2Params::new(2, 5, 2, 7).unwrap()
}

/// Brute-force E_a by enumerating h-tuples over the finite set.
fn naive_removable(a_set: &[u64], a: u64, h: u32, bound: u64) -> Vec<u64> {
    fn sums(xs: &[u64], h: u32, bound: u64) -> Vec<bool> {
        let mut cur = vec![false; bound as usize + 1];
        cur[0] = true;
        for _ in 0..h {
            let mut next = vec![false; bound as usize + 1];
            for (s, _) in cur.iter().enumerate().filter(|(_, &b)| b) {
                for &x in xs {
                    if s as u64 + x <= bound {
                        next[s + x as usize] = true;
                    }
                }
            }
            cur = next;
        }
        cur
    }
    let with = sums(a_set, h, bound);
    let rest: Vec<u64> = a_set.iter().copied().filter(|&x| x != a).collect();
    let without = sums(&rest, h, bound);
    (0..=bound).filter(|&n| with[n as usize] && !without[n as usize]).collect()
}

#[test]
fn thm2_setting_flags_square_as_candidate() {
    let p = thm2();
    let spec = thm2_partition(&p).unwrap();
    let bound = 1 << 14;
    let union = restrict_union(&spec, 2, bound);
    let r = sumset::minimality_probe(&union, 5, bound, 64).unwrap();
    assert!(r.candidates().contains(&4));
    assert_eq!(r.status, "evidence, not proof");
}

#[test]
fn removability_matches_enumeration() {
    let spec = thm2_partition(&thm2()).unwrap();
    let bound = 600;
    let union = restrict_union(&spec, 2, bound);
    let elems: Vec<u64> = union.iter().collect();
    for &a in elems.iter().take(12) {
        assert_eq!(sumset::removability(&union, a, 3, bound).unwrap(), naive_removable(&elems, a, 3, bound), "a = {a}");
    }
}

#[test]
fn union_matches_membership() {
    let spec = block_partition(4, 2).unwrap();
    let union = restrict_union(&spec, 3, 5000);
    for n in 1..=5000u64 {
        let member = (0..4).any(|c| gadic::is_member(&BigUint::from(n), spec.in_cell(c), 3));
        assert_eq!(union.contains(n).unwrap(), member, "n = {n}");
    }
}

#[test]
fn thm2_random_bignums() {
    let r = checks::verify_thm2_random(&thm2(), 200, 11, 600).unwrap();
    assert!(r.passed, "{:?}", r.failures.first());
}

#[test]
fn thm1_certificates_serialize() {
    let p = Thm1Params::new(2, 4, 2, 65, 65).unwrap();
    let spec = thm1_partition(&p).unwrap();
    let n: BigUint = BigUint::from(1u8) << 300usize;
    let cert = gadic_bases::decompose_thm1(&n, &p).unwrap();
    assert_eq!(verify_certificate(&cert, &spec, 2), Verdict::Valid);
    let json = serde_json::to_value(&cert).unwrap();
    assert_eq!(json["parts"].as_array().unwrap().len(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cells_are_periodic_at_large_positions(k in 0u64..1_000_000, w in 0u64..10_000) {
        let p = thm2();
        let spec = thm2_partition(&p).unwrap();
        let far = spec.preperiod_end() + w + k * spec.period();
        prop_assert_eq!(spec.cell(far), spec.cell(spec.preperiod_end() + w));
        prop_assert_eq!(spec.cell(far), p.cell(far));
    }

    #[test]
    fn thm2_certificates_sum_to_n(n in 5u64..u64::MAX) {
        let p = thm2();
        let spec = thm2_partition(&p).unwrap();
        let cert = decompose_thm2(&BigUint::from(n), &p).unwrap();
        prop_assert_eq!(verify_certificate(&cert, &spec, 2), Verdict::Valid);
        let total: BigUint = cert.parts.iter().map(GadicExpansion::evaluate).sum();
        prop_assert_eq!(total, BigUint::from(n));
    }
}

#[test]
fn square_is_never_needed() {
    let spec = thm2_partition(&thm2()).unwrap();
    let bound = 1 << 17;
    let union = restrict_union(&spec, 2, bound);
    let e = sumset::removability(&union, 4, 5, bound).unwrap();
    assert!(e.is_empty(), "{e:?}");
}
