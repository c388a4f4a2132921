use euclidlab_core::closure::{
    closure_run, witness_subset_for_prime, ClosureState, StopReason, DEFAULT_CAP,
    DEFAULT_SUBSET_BUDGET,
};
use euclidlab_core::Sign;
use num_bigint::BigUint;
use proptest::prelude::*;

fn seed() -> Vec<BigUint> {
    [2u32, 3, 5].map(BigUint::from).to_vec()
}

#[test]
fn covers_primes_below_one_hundred_for_both_signs() {
    for eps in Sign::BOTH {
        let run = closure_run(&seed(), eps, 100, 16, DEFAULT_CAP, DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(run.report.stop_reason, StopReason::Covered, "{eps}");
        assert_eq!(run.report.covered.len(), 25);
        assert!(run.report.certificates_verified);
        let counts: Vec<usize> = run
            .report
            .generations
            .iter()
            .map(|g| g.element_count)
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(run.report.generation, 3);
    }
}

#[test]
fn eleven_witness_needs_ten_in_one_class() {
    let run = closure_run(
        &seed(),
        Sign::Plus,
        100,
        16,
        DEFAULT_CAP,
        DEFAULT_SUBSET_BUDGET,
    )
    .unwrap();
    let mut values: Vec<BigUint> = run
        .state
        .values()
        .into_iter()
        .filter(|v| (v % 11u32) != BigUint::from(0u32))
        .collect();
    values.sort();
    // 40 elements spread over 10 classes: no class reaches 10
    let prefix = &values[..40];
    assert_eq!(witness_subset_for_prime(prefix, 11).unwrap(), None);
    let w = witness_subset_for_prime(&values, 11).unwrap().unwrap();
    assert_eq!(w.subset.len(), 10);
    assert_eq!(w.value % 11u32, BigUint::from(0u32));
}

#[test]
fn runs_do_not_depend_on_thread_count() {
    let in_pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                closure_run(
                    &seed(),
                    Sign::Minus,
                    60,
                    16,
                    DEFAULT_CAP,
                    DEFAULT_SUBSET_BUDGET,
                )
                .unwrap()
            })
    };
    let a = in_pool(1);
    let b = in_pool(6);
    assert_eq!(a.state, b.state);
    assert_eq!(a.report, b.report);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_are_monotone_and_certified(
        seed in proptest::sample::subsequence(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 25, 27], 3..6),
        plus in any::<bool>(),
        cap in 1usize..=3,
    ) {
        let eps = if plus { Sign::Plus } else { Sign::Minus };
        let s0 = ClosureState::from_u64(&seed, eps).unwrap();
        let s1 = s0.step(cap, DEFAULT_SUBSET_BUDGET).unwrap();
        let s2 = s1.step(cap, DEFAULT_SUBSET_BUDGET).unwrap();
        for (before, after) in [(&s0, &s1), (&s1, &s2)] {
            prop_assert_eq!(&after.elements()[..before.elements().len()], before.elements());
            let new = &after.generations().last().unwrap().new_primes;
            prop_assert!(new.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(new.iter().all(|q| !before.covers(q)));
            prop_assert!(after.verify_certificates());
        }
        for q in s2.bases() {
            let chain = s2.certify(q).unwrap();
            prop_assert!(s2.verify_chain(&chain));
        }
    }
}
