use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::factor::factorize_u64;
use super::primality::{is_prime_u64, pow_mod};
use crate::error::{Error, Result};

/// `base^exp mod m`; `exp = 0` gives `1 mod m`.
pub fn mod_pow(base: &BigUint, exp: &BigUint, m: &BigUint) -> Result<BigUint> {
    if m.is_zero() {
        return Err(Error::domain("mod_pow: modulus must be at least 1"));
    }
    Ok(base.modpow(exp, m))
}

/// Smallest `k >= 1` with `a^k = 1 (mod m)`.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::domain(
            "multiplicative_order: modulus must be at least 2",
        ));
    }
    if a.gcd(&m) != 1 {
        return Err(Error::domain(format!(
            "multiplicative_order: gcd({a}, {m}) != 1"
        )));
    }
    let phi = factorize_u64(m)
        .into_iter()
        .fold(1u64, |acc, (p, e)| acc * p.pow(e - 1) * (p - 1));
    let mut order = phi;
    for (r, _) in factorize_u64(phi) {
        while order % r == 0 && pow_mod(a, order / r, m) == 1 {
            order /= r;
        }
    }
    Ok(order)
}

fn is_primitive_root_of_prime(g: u64, p: u64, cofactors: &[u64]) -> bool {
    g % p != 0 && cofactors.iter().all(|&c| pow_mod(g, c, p) != 1)
}

/// `(p - 1) / r` for every prime `r | p - 1`.
fn order_cofactors(p: u64) -> Vec<u64> {
    factorize_u64(p - 1)
        .into_iter()
        .map(|(r, _)| (p - 1) / r)
        .collect()
}

/// Smallest primitive root modulo an odd prime.
pub fn primitive_root(p: u64) -> Result<u64> {
    if p % 2 == 0 || !is_prime_u64(p) {
        return Err(Error::domain(format!(
            "primitive_root: {p} is not an odd prime"
        )));
    }
    let cof = order_cofactors(p);
    Ok((2..p)
        .find(|&g| is_primitive_root_of_prime(g, p, &cof))
        .expect("every odd prime has a primitive root"))
}

/// Combines pairwise coprime congruences `x = r_i (mod m_i)` into the unique
/// class modulo the product. An empty list gives `(0, 1)`.
pub fn crt_combine(congruences: &[(BigUint, BigUint)]) -> Result<(BigUint, BigUint)> {
    let mut residue = BigInt::zero();
    let mut modulus = BigInt::one();
    for (r, m) in congruences {
        if m.is_zero() {
            return Err(Error::domain("crt_combine: modulus must be at least 1"));
        }
        if r >= m {
            return Err(Error::domain(format!(
                "crt_combine: residue {r} not reduced modulo {m}"
            )));
        }
        let m = BigInt::from(m.clone());
        let r = BigInt::from(r.clone());
        let eg = modulus.extended_gcd(&m);
        if !eg.gcd.is_one() {
            return Err(Error::domain(format!(
                "crt_combine: moduli {modulus} and {m} are not coprime"
            )));
        }
        // x = residue + modulus * t, with t = (r - residue) * modulus^-1 mod m
        let t = ((&r - &residue) * eg.x).mod_floor(&m);
        residue += &modulus * t;
        modulus *= &m;
        residue = residue.mod_floor(&modulus);
    }
    Ok((
        residue
            .to_biguint()
            .expect("reduced residue is nonnegative"),
        modulus.to_biguint().expect("product of positive moduli"),
    ))
}

/// Smallest prime `g <= search_bound` that is a primitive root modulo every
/// prime in `qs`.
pub fn common_primitive_root_prime(qs: &[u64], search_bound: u64) -> Result<Option<u64>> {
    let mut sorted = qs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != qs.len() {
        return Err(Error::domain(
            "common_primitive_root_prime: primes must be distinct",
        ));
    }
    if let Some(&bad) = qs.iter().find(|&&q| q % 2 == 0 || !is_prime_u64(q)) {
        return Err(Error::domain(format!(
            "common_primitive_root_prime: {bad} is not an odd prime"
        )));
    }
    let cofactors: Vec<(u64, Vec<u64>)> = qs.iter().map(|&q| (q, order_cofactors(q))).collect();
    Ok((2..=search_bound).filter(|&g| is_prime_u64(g)).find(|&g| {
        cofactors
            .iter()
            .all(|(q, cof)| is_primitive_root_of_prime(g % q, *q, cof))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use std::collections::BTreeSet;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn brute_order(a: u64, m: u64) -> u64 {
        let mut x = a % m;
        let mut k = 1;
        while x != 1 {
            x = x * a % m;
            k += 1;
        }
        k
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&big(2), &big(0), &big(7)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(2), &big(10), &big(1000)).unwrap(), big(24));
        assert_eq!(mod_pow(&big(3), &big(4), &big(5)).unwrap(), big(1));
        assert_eq!(mod_pow(&big(5), &big(0), &big(1)).unwrap(), big(0));
        assert!(mod_pow(&big(2), &big(3), &big(0)).is_err());
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(1, 5).unwrap(), 1);
        assert_eq!(multiplicative_order(2, 7).unwrap(), 3);
        assert_eq!(multiplicative_order(2, 5).unwrap(), 4);
        assert!(multiplicative_order(2, 4).is_err());
        assert!(multiplicative_order(3, 1).is_err());
    }

    #[test]
    fn order_matches_enumeration_and_divides_p_minus_1() {
        for p in primes_up_to(1000) {
            for a in 1..p.min(60) {
                let k = multiplicative_order(a, p).unwrap();
                assert_eq!(k, brute_order(a, p), "a={a}, p={p}");
                assert_eq!((p - 1) % k, 0);
            }
        }
        for m in 2..300u64 {
            for a in (1..m).filter(|a| a.gcd(&m) == 1) {
                assert_eq!(multiplicative_order(a, m).unwrap(), brute_order(a, m));
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert_eq!(primitive_root(5).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert!(primitive_root(2).is_err());
        assert!(primitive_root(9).is_err());
    }

    #[test]
    fn primitive_root_generates_the_group() {
        for p in primes_up_to(500).into_iter().skip(1) {
            let g = primitive_root(p).unwrap();
            let powers: BTreeSet<u64> = (1..p).map(|k| pow_mod(g, k, p)).collect();
            assert_eq!(powers, (1..p).collect::<BTreeSet<_>>(), "p={p}");
            // smallest
            assert!((2..g).all(|h| brute_order(h, p) != p - 1));
        }
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(&[(big(0), big(1))]).unwrap(), (big(0), big(1)));
        assert_eq!(
            crt_combine(&[(big(1), big(2)), (big(2), big(3))]).unwrap(),
            (big(5), big(6))
        );
        assert_eq!(
            crt_combine(&[(big(2), big(3)), (big(3), big(5)), (big(2), big(7))]).unwrap(),
            (big(23), big(105))
        );
        assert!(crt_combine(&[(big(1), big(4)), (big(1), big(6))]).is_err());
        assert!(crt_combine(&[(big(5), big(4))]).is_err());
    }

    #[test]
    fn crt_matches_exhaustive_scan() {
        let moduli = [3u64, 4, 5, 7];
        for r0 in 0..3 {
            for r1 in 0..4 {
                for r2 in 0..5 {
                    let r3 = (r0 + r1 + r2) % 7;
                    let cs: Vec<_> = [r0, r1, r2, r3]
                        .iter()
                        .zip(moduli)
                        .map(|(&r, m)| (big(r), big(m)))
                        .collect();
                    let (x, m) = crt_combine(&cs).unwrap();
                    assert_eq!(m, big(420));
                    let scan = (0..420u64)
                        .find(|x| x % 3 == r0 && x % 4 == r1 && x % 5 == r2 && x % 7 == r3)
                        .unwrap();
                    assert_eq!(x, big(scan));
                }
            }
        }
    }

    #[test]
    fn common_root_examples() {
        assert_eq!(common_primitive_root_prime(&[5], 100).unwrap(), Some(2));
        assert_eq!(common_primitive_root_prime(&[3, 5], 100).unwrap(), Some(2));
        assert_eq!(common_primitive_root_prime(&[7], 100).unwrap(), Some(3));
        // 2 has order 3 mod 7, 3 fails mod 3; 5 is a root mod 7 and 3
        assert_eq!(common_primitive_root_prime(&[3, 7], 100).unwrap(), Some(5));
        assert_eq!(common_primitive_root_prime(&[7], 2).unwrap(), None);
        assert!(common_primitive_root_prime(&[2], 100).is_err());
        assert!(common_primitive_root_prime(&[5, 5], 100).is_err());
    }
}
