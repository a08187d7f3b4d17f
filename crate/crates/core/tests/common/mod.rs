#![allow(dead_code)]

use arad::generate::{gaussian_matrix, gen_member, gen_psd, rng_from_seed};
use arad::kernel::{norm2, CMat, CVec};
use arad::SemiSpace;
use proptest::prelude::*;

/// `(n, r, seed)` with `2 <= n <= 5` and `0 <= r <= n`.
pub fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=5).prop_flat_map(|n| (Just(n), 0..=n, any::<u64>()))
}

/// Same, but with a nonzero weight.
pub fn shape_nonzero() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=5).prop_flat_map(|n| (Just(n), 1..=n, any::<u64>()))
}

pub fn space(n: usize, r: usize, seed: u64) -> SemiSpace {
    SemiSpace::with_default_tol(&gen_psd(n, r, seed).unwrap()).unwrap()
}

pub fn member(s: &SemiSpace, seed: u64) -> CMat {
    gen_member(s, seed)
}

pub fn gaussian(n: usize, seed: u64) -> CMat {
    gaussian_matrix(n, n, &mut rng_from_seed(seed))
}

pub fn gaussian_vec(n: usize, seed: u64) -> CVec {
    gaussian_matrix(n, 1, &mut rng_from_seed(seed))
        .column(0)
        .into_owned()
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    norm2(&(a - b))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
