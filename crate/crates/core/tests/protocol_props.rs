use proptest::prelude::*;

use hamsmp::bits::BitString;
use hamsmp::protocol::{execute, Branch, InnerVariant, ProtocolConfig};
use hamsmp::{gen_instance, ham_predicate, Verdict};

fn small_config(inner: InnerVariant) -> ProtocolConfig {
    ProtocolConfig { gamma: 600, inner, ..ProtocolConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The referee treats the two parties symmetrically.
    #[test]
    fn verdict_is_swap_symmetric(n in 1usize..300, d in 1usize..6, k in 0usize..20, seed: u64) {
        let d = d.min(n);
        let inst = gen_instance(n, k.min(n), seed).unwrap();
        let c = small_config(InnerVariant::Syndrome);
        let ab = execute(&inst.x, &inst.y, d, &c, seed).unwrap().transcript;
        let ba = execute(&inst.y, &inst.x, d, &c, seed).unwrap().transcript;
        prop_assert_eq!((ab.r1, ab.r2, ab.final_verdict), (ba.r1, ba.r2, ba.final_verdict));
        prop_assert_eq!(ab.alice_bits, ba.bob_bits);
    }

    /// Identical inputs are always accepted.
    #[test]
    fn equal_inputs_accept(n in 1usize..2000, d in 1usize..8, seed: u64) {
        let d = d.min(n);
        let x = gen_instance(n, 0, seed).unwrap().x;
        let t = execute(&x, &x, d, &small_config(InnerVariant::Syndrome), seed).unwrap().transcript;
        prop_assert_eq!(t.final_verdict, Verdict::Le);
    }

    /// Both inner variants agree on P1 whenever the reduced distance is within the promise.
    #[test]
    fn inner_variants_agree_under_promise(seed: u64, d in 1usize..5, k in 0usize..10) {
        let n = 2048;
        let k = k.min(2 * d);
        let inst = gen_instance(n, k, seed).unwrap();
        let s = execute(&inst.x, &inst.y, d, &small_config(InnerVariant::Syndrome), seed).unwrap().transcript;
        let r = execute(&inst.x, &inst.y, d, &small_config(InnerVariant::Reference), seed).unwrap().transcript;
        prop_assert_eq!(s.r1, r.r1);
        prop_assert_eq!(s.r2, r.r2);
    }

    /// With no reduction the P1 verdict is exact on any input.
    #[test]
    fn small_n_p1_is_exact(n in 1usize..60, d in 1usize..4, k in 0usize..60, seed: u64) {
        let d = d.min(n);
        let inst = gen_instance(n, k.min(n), seed).unwrap();
        let e = execute(&inst.x, &inst.y, d, &small_config(InnerVariant::Reference), seed).unwrap();
        prop_assert!(e.setup.branch != Branch::Reduced || 16 * d * d < n);
        if e.setup.branch == Branch::SmallN {
            prop_assert_eq!(e.transcript.r1.as_bit(), ham_predicate(&inst.x, &inst.y, d).unwrap());
        }
    }
}

#[test]
fn mismatched_lengths_are_rejected() {
    let c = small_config(InnerVariant::Syndrome);
    assert!(execute(&BitString::zeros(10), &BitString::zeros(11), 1, &c, 0).is_err());
}
