//! Fixed inputs shared by the benchmarks in `benches/`.

use gadic_bases::{sample_for_case, BigUint, Thm1Case, Thm1Params, Thm2Params};

pub fn thm1_params() -> Thm1Params {
    Thm1Params::new(2, 4, 2, 65, 65).expect("valid parameters")
}

pub fn thm2_params() -> Thm2Params {
    Thm2Params::new(2, 5, 2, 7).expect("valid parameters")
}

/// `2^bits - 1 - 2^(bits/2)`: dense binary digits with one hole.
pub fn dense(bits: u32) -> BigUint {
    let one = BigUint::from(1u8);
    ((&one << bits) - &one) - (one << (bits / 2))
}

/// One sample per reachable case of the `g = 2` parameters.
pub fn thm1_inputs(max_exponent: u64) -> Vec<(&'static str, BigUint)> {
    let p = thm1_params();
    Thm1Case::ALL
        .iter()
        .filter_map(|c| sample_for_case(c.label(), &p, 1, max_exponent).ok().map(|n| (c.label(), n)))
        .collect()
}
