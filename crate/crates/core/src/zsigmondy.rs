//! Primitive prime divisors of `a^n - b^n`.
//!
//! A prime `p` is primitive for `(a, b, n)` when it divides `a^n - b^n` but
//! no `a^k - b^k` with `1 <= k < n`. Zsigmondy's theorem says one exists for
//! coprime `a > b >= 1` and `n >= 2`, except for `(2, 1, 6)` and for `n = 2`
//! with `a + b` a power of two.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, FactorMap};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZsigmondyQuery {
    pub a: u64,
    pub b: u64,
    pub n: u32,
}

impl ZsigmondyQuery {
    pub fn new(a: u64, b: u64, n: u32) -> Result<Self> {
        if b == 0 || a <= b {
            return Err(Error::domain(format!(
                "zsigmondy: need a > b >= 1, got a = {a}, b = {b}"
            )));
        }
        if n < 2 {
            return Err(Error::domain(format!("zsigmondy: need n >= 2, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    /// `a^n - b^n`.
    pub fn value(&self) -> BigUint {
        difference_of_powers(self.a, self.b, self.n)
    }

    pub fn coprime(&self) -> bool {
        self.a.gcd(&self.b) == 1
    }

    /// Whether `p` divides `a^k - b^k` for some `1 <= k < n`.
    fn divides_earlier_term(&self, p: &BigUint) -> bool {
        let a = BigUint::from(self.a) % p;
        let b = BigUint::from(self.b) % p;
        let (mut ak, mut bk) = (a.clone(), b.clone());
        for _ in 1..self.n {
            if ak == bk {
                return true;
            }
            ak = (&ak * &a) % p;
            bk = (&bk * &b) % p;
        }
        false
    }
}

fn difference_of_powers(a: u64, b: u64, k: u32) -> BigUint {
    BigUint::from(a).pow(k) - BigUint::from(b).pow(k)
}

/// The two cases excluded by Zsigmondy's theorem.
pub fn is_exception(q: &ZsigmondyQuery) -> bool {
    (q.a, q.b, q.n) == (2, 1, 6) || (q.n == 2 && (q.a + q.b).is_power_of_two())
}

/// Primitive prime divisors by definition: factor `a^n - b^n` and keep the
/// primes dividing no earlier term. Ascending.
pub fn primitive_prime_divisors_by_definition(q: &ZsigmondyQuery) -> Vec<BigUint> {
    factorize(&q.value())
        .primes()
        .filter(|p| !q.divides_earlier_term(p))
        .cloned()
        .collect()
}

/// Primitive prime divisors, ascending.
///
/// Every primitive prime divides the homogeneous cyclotomic value
/// `Phi_n(a, b)`, which is much smaller than `a^n - b^n`, so only that value
/// is factored. Each candidate is then checked against the definition.
pub fn primitive_prime_divisors(q: &ZsigmondyQuery) -> Vec<BigUint> {
    factorize(&cyclotomic_value(q.n, q.a, q.b))
        .primes()
        .filter(|p| !q.divides_earlier_term(p))
        .cloned()
        .collect()
}

fn mobius(mut n: u32) -> i32 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// `Phi_n(a, b) = prod_{d | n} (a^d - b^d)^mu(n / d)` for `a > b >= 1`.
pub fn cyclotomic_value(n: u32, a: u64, b: u64) -> BigUint {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for d in (1..=n).filter(|d| n % d == 0) {
        let term = BigInt::from(difference_of_powers(a, b, d));
        match mobius(n / d) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    let (quot, rem) = num.div_rem(&den);
    debug_assert!(rem.is_zero());
    debug_assert!(quot.is_positive());
    quot.to_biguint().expect("cyclotomic value is positive")
}

/// Everything the CLI prints for one query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZsigmondyReport {
    pub query: ZsigmondyQuery,
    pub value: String,
    pub factorization: FactorMap,
    pub primitive_prime_divisors: Vec<String>,
    pub is_exception: bool,
    pub coprime: bool,
    /// `true` when the theorem promises a primitive divisor.
    pub guaranteed: bool,
}

pub fn report(q: &ZsigmondyQuery) -> ZsigmondyReport {
    let value = q.value();
    let exception = is_exception(q);
    ZsigmondyReport {
        query: *q,
        factorization: factorize(&value),
        value: value.to_string(),
        primitive_prime_divisors: primitive_prime_divisors(q)
            .iter()
            .map(ToString::to_string)
            .collect(),
        is_exception: exception,
        coprime: q.coprime(),
        guaranteed: q.coprime() && !exception,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn query(a: u64, b: u64, n: u32) -> ZsigmondyQuery {
        ZsigmondyQuery::new(a, b, n).unwrap()
    }

    fn ints(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn exception_examples() {
        assert!(is_exception(&query(2, 1, 6)));
        assert!(is_exception(&query(3, 1, 2)));
        assert!(!is_exception(&query(2, 1, 4)));
        assert!(is_exception(&query(5, 3, 2)));
        assert!(!is_exception(&query(5, 3, 3)));
    }

    #[test]
    fn primitive_examples() {
        assert!(primitive_prime_divisors(&query(2, 1, 6)).is_empty());
        assert_eq!(primitive_prime_divisors(&query(2, 1, 4)), ints(&[5]));
        assert!(primitive_prime_divisors(&query(3, 1, 2)).is_empty());
        // 2^12 - 1 = 3^2 * 5 * 7 * 13
        assert_eq!(primitive_prime_divisors(&query(2, 1, 12)), ints(&[13]));
    }

    #[test]
    fn rejects_malformed_queries() {
        assert!(ZsigmondyQuery::new(1, 1, 2).is_err());
        assert!(ZsigmondyQuery::new(3, 0, 2).is_err());
        assert!(ZsigmondyQuery::new(3, 1, 1).is_err());
    }

    #[test]
    fn cyclotomic_small_values() {
        // Phi_1(x) = x - 1, Phi_2 = x + 1, Phi_3 = x^2 + x + 1, Phi_6 = x^2 - x + 1
        assert_eq!(cyclotomic_value(1, 5, 1), BigUint::from(4u32));
        assert_eq!(cyclotomic_value(2, 5, 1), BigUint::from(6u32));
        assert_eq!(cyclotomic_value(3, 5, 1), BigUint::from(31u32));
        assert_eq!(cyclotomic_value(6, 5, 1), BigUint::from(21u32));
        // Phi_6(a, b) = a^2 - ab + b^2
        assert_eq!(cyclotomic_value(6, 7, 3), BigUint::from(49u32 - 21 + 9));
        assert_eq!(cyclotomic_value(12, 2, 1), BigUint::from(13u32));
    }

    #[test]
    fn non_coprime_inputs_follow_the_definition() {
        // 6^3 - 4^3 = 152 = 2^3 * 19; 2 divides 6 - 4
        let q = query(6, 4, 3);
        assert_eq!(primitive_prime_divisors_by_definition(&q), ints(&[19]));
        assert_eq!(primitive_prime_divisors(&q), ints(&[19]));
    }

    #[test]
    fn primitive_primes_are_one_mod_n_or_divide_n() {
        for a in 2..=20u64 {
            for b in 1..a {
                for n in 2..=12u32 {
                    let q = query(a, b, n);
                    for p in primitive_prime_divisors(&q) {
                        let p = p.to_u64().unwrap();
                        assert!(p % n as u64 == 1 || n as u64 % p == 0, "{q:?}: {p}");
                    }
                }
            }
        }
    }

    #[test]
    fn report_flags_the_exception() {
        let r = report(&query(2, 1, 6));
        assert!(r.is_exception);
        assert!(!r.guaranteed);
        assert!(r.primitive_prime_divisors.is_empty());
        assert_eq!(r.value, "63");
    }
}
