use std::sync::OnceLock;

use era_core::arith::derive_rng;
use era_core::group::ot_query;
use era_core::ope::serve_mapped_bids;
use era_core::rangeproof::{gen_test_set, prove_range, verify_range, TestSet};
use era_core::{BidSpace, GroupParams, KeyPair, OpeTable, Randomness};
use num_bigint::BigUint;
use proptest::prelude::*;

fn keys() -> &'static KeyPair {
    static K: OnceLock<KeyPair> = OnceLock::new();
    K.get_or_init(|| KeyPair::generate(256, &mut derive_rng(b"invariants", "keys")).unwrap())
}

fn group() -> &'static GroupParams {
    static G: OnceLock<GroupParams> = OnceLock::new();
    G.get_or_init(|| GroupParams::generate(64, b"invariants").unwrap())
}

fn test_set() -> &'static TestSet {
    static T: OnceLock<TestSet> = OnceLock::new();
    T.get_or_init(|| {
        gen_test_set(keys().public(), 32, 1, &mut derive_rng(b"invariants", "ts")).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paillier_round_trip_and_randomness(m in any::<u64>(), seed in any::<u64>()) {
        let kp = keys();
        let pk = kp.public();
        let r = Randomness::sample(pk, &mut derive_rng(&seed.to_be_bytes(), "r"));
        let c = pk.encrypt_u64(m, &r).unwrap();
        prop_assert_eq!(kp.decrypt(&c).unwrap(), BigUint::from(m));
        prop_assert_eq!(kp.recover_randomness(&c).unwrap(), r.clone());
        prop_assert_eq!(pk.decrypt_with_randomness(&c, &r).unwrap(), BigUint::from(m));
    }

    #[test]
    fn paillier_is_additive(a in any::<u32>(), b in any::<u32>(), seed in any::<u64>()) {
        let kp = keys();
        let pk = kp.public();
        let mut rng = derive_rng(&seed.to_be_bytes(), "add");
        let ca = pk.encrypt_u64(a.into(), &Randomness::sample(pk, &mut rng)).unwrap();
        let cb = pk.encrypt_u64(b.into(), &Randomness::sample(pk, &mut rng)).unwrap();
        let sum = kp.decrypt(&pk.add(&ca, &cb).unwrap()).unwrap();
        prop_assert_eq!(sum, BigUint::from(u64::from(a) + u64::from(b)));
    }

    #[test]
    fn group_pow_matches_reference(base in 1u64.., exp in any::<u64>()) {
        let g = group();
        let base = BigUint::from(base) % g.p();
        prop_assume!(base != BigUint::from(0u8));
        let exp = BigUint::from(exp);
        prop_assert_eq!(g.pow(&base, &exp), base.modpow(&exp, g.p()));
    }

    #[test]
    fn ope_preserves_order(max in 2u64..400, t in 10u32..40, seed in any::<u64>()) {
        let table = OpeTable::generate(BidSpace::new(1, max, 1).unwrap(), t, seed).unwrap();
        let mapped: Vec<u64> = (1..=max).map(|c| table.map(c).unwrap()).collect();
        prop_assert!(mapped.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(mapped.iter().all(|&m| m >= 1 && m < 1u64 << t));
        for cents in 1..=max {
            prop_assert_eq!(table.unmap(table.map(cents).unwrap()).unwrap(), cents);
        }
    }

    #[test]
    fn ot_recovers_the_chosen_message(z in 1usize..60, pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let g = group();
        let table = OpeTable::generate(BidSpace::new(1, z as u64, 1).unwrap(), 32, seed).unwrap();
        let alpha = pick.index(z) + 1;
        let mut rng = derive_rng(&seed.to_be_bytes(), "ot");
        let (req, rx) = ot_query(alpha, z, g, &mut rng).unwrap();
        let batch = serve_mapped_bids(&table, &req, g, &mut rng).unwrap();
        prop_assert_eq!(rx.recover(&batch, g).unwrap(), BigUint::from(table.mapped_values()[alpha - 1]));
    }

    #[test]
    fn range_proofs_verify_below_the_bound(x in any::<u32>(), seed in any::<u64>()) {
        let pk = keys().public();
        let ts = test_set();
        let r = Randomness::sample(pk, &mut derive_rng(&seed.to_be_bytes(), "rp"));
        let x = BigUint::from(x);
        let c = pk.encrypt(&x, &r).unwrap();
        let proof = prove_range(pk, &x, &r, ts).unwrap();
        prop_assert!(verify_range(pk, &c, &proof, ts.public(), 32).is_ok());
    }

    #[test]
    fn range_proofs_refuse_above_the_bound(x in (1u64 << 32)..) {
        let pk = keys().public();
        let r = Randomness::sample(pk, &mut derive_rng(b"above", "rp"));
        prop_assert!(prove_range(pk, &BigUint::from(x), &r, test_set()).is_err());
    }
}
