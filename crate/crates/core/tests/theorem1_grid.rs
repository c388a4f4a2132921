use euclidlab_core::arith::primes_up_to;
use euclidlab_core::witness::verify_theorem1;
use itertools::Itertools;

#[test]
fn no_violation_for_three_and_four_primes() {
    let pool = primes_up_to(29);
    assert_eq!(pool.len(), 10);
    let mut runs = 0;
    for n in [3usize, 4] {
        for primes in pool.iter().copied().combinations(n) {
            for exps in (0..n).map(|_| 1u32..=3).multi_cartesian_product() {
                let out = verify_theorem1(&primes, &exps, &[])
                    .unwrap_or_else(|e| panic!("{primes:?} {exps:?}: {e}"));
                assert!(out.plus.found && out.minus.found);
                runs += 2;
            }
        }
    }
    assert_eq!(runs, 40_500);
}

#[test]
fn large_smallest_prime_families_lack_witnesses() {
    // every p_i - 1 is smooth over the smaller primes
    for n in 5..=15 {
        let primes: Vec<u64> = primes_up_to(50)[..n].to_vec();
        let family = euclidlab_core::SubsetFamily::build(n, [1]).unwrap();
        let inst = euclidlab_core::PrimePowerInstance::new(
            primes,
            vec![1; n],
            family,
            euclidlab_core::SignAssignment::constant(euclidlab_core::Sign::Plus),
        )
        .unwrap();
        assert!(
            !euclidlab_core::witness::witness_search(&inst).found,
            "n = {n}"
        );
    }
}
