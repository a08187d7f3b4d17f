mod common;

use arad::generate::{
    gen_a_selfadjoint, gen_a_unitary, gen_instance_sized, gen_member, gen_square_zero, Profile,
    PROFILE_NAMES,
};
use arad::kernel::{identity, norm2};
use arad::{gen_instance, Error};
use proptest::prelude::*;

use common::{shape, space};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structured_generators_meet_their_predicates((n, r, seed) in shape()) {
        let s = space(n, r, seed);
        prop_assert!(s.in_b_a(&gen_member(&s, seed ^ 1)).unwrap());
        prop_assert!(s.is_a_selfadjoint(&gen_a_selfadjoint(&s, seed ^ 2)).unwrap());
        prop_assert!(s.is_a_unitary(&gen_a_unitary(&s, seed ^ 3)).unwrap());
        let t = gen_square_zero(&s, seed ^ 4);
        prop_assert!(s.in_b_a(&t).unwrap());
        let nt = norm2(&t);
        prop_assert!(norm2(&(&t * &t)) <= 1e-12 * (nt * nt).max(1.0));
    }

    #[test]
    fn weights_stay_well_conditioned((n, r, seed) in shape()) {
        let s = space(n, r, seed);
        prop_assert_eq!(s.rank(), r);
        if r > 0 {
            let lam = s.lambda();
            let (lo, hi) = lam.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &l| (a.min(l), b.max(l)));
            prop_assert!(hi / lo <= 1e4 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn null_space_junk_is_populated(n in 2usize..6, seed in any::<u64>()) {
        let r = 1 + (seed as usize) % (n - 1);
        let s = space(n, r, seed);
        let q = identity(n) - s.range_projector();
        let t = gen_member(&s, seed ^ 5);
        prop_assert!(norm2(&(&q * &t * &q)) > 1e-6);
    }

    #[test]
    fn instances_replay_from_profile_and_seed(idx in 0usize..PROFILE_NAMES.len(), seed in any::<u64>()) {
        let p = Profile::named(PROFILE_NAMES[idx]).unwrap();
        let a = gen_instance(&p, seed).unwrap().to_file().to_json_pretty();
        let b = gen_instance(&p, seed).unwrap().to_file().to_json_pretty();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sized_instances_keep_the_requested_dimension(seed in any::<u64>(), dim in 2usize..7) {
        let p = Profile::named("default").unwrap();
        let inst = gen_instance_sized(&p, seed, Some(dim)).unwrap();
        prop_assert_eq!(inst.dim(), dim);
        prop_assert!(inst.rank() <= dim);
    }
}

#[test]
fn profile_rosters_and_ranks() {
    let quad = gen_instance(&Profile::named("2x2-general").unwrap(), 3).unwrap();
    let names: Vec<&str> = quad.operators.keys().map(String::as_str).collect();
    assert_eq!(names, ["T1", "T2", "T3", "T4"]);
    for seed in 0..20 {
        let d = gen_instance(&Profile::named("rank-deficient").unwrap(), seed).unwrap();
        assert!(d.rank() < d.dim());
        let f = gen_instance(&Profile::named("full-rank").unwrap(), seed).unwrap();
        assert_eq!(f.rank(), f.dim());
        let z = gen_instance(&Profile::named("rank-zero").unwrap(), seed).unwrap();
        assert_eq!(z.rank(), 0);
        let b = gen_instance(&Profile::named("block3").unwrap(), seed).unwrap();
        assert_eq!(b.block_shape, Some(3));
        assert!(b.op("B33").is_some());
    }
    assert!(matches!(Profile::named("nope"), Err(Error::BadProfile(_))));
}

#[test]
fn default_profile_mixes_ranks() {
    let p = Profile::named("default").unwrap().with_dims(2, 5);
    let insts: Vec<_> = (0..200).map(|s| gen_instance(&p, s).unwrap()).collect();
    let deficient = insts.iter().filter(|i| i.rank() < i.dim()).count();
    assert!(deficient >= 80, "{deficient} of 200 rank-deficient");
    assert!(insts.iter().any(|i| i.rank() == 0));
    assert!(insts.iter().any(|i| i.rank() == i.dim()));
}
