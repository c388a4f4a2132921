//! Integer factorization: trial division by the primes below `10^6`, then
//! Pollard rho in Brent's formulation with the deterministic increment
//! sequence `c = 1, 2, 3, ...` and starting point 2.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::primality::{is_prime, is_prime_u64, mul_mod};
use super::sieve::{small_primes, SMALL_PRIME_BOUND};

/// Prime factorization: distinct primes mapped to positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FactorMap(BTreeMap<BigUint, u32>);

impl FactorMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prime: BigUint, exponent: u32) {
        if exponent > 0 {
            *self.0.entry(prime).or_insert(0) += exponent;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn exponent(&self, prime: &BigUint) -> u32 {
        self.0.get(prime).copied().unwrap_or(0)
    }

    /// Distinct primes, ascending.
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> + '_ {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigUint, u32)> + '_ {
        self.0.iter().map(|(p, &e)| (p, e))
    }

    pub fn product(&self) -> BigUint {
        self.0
            .iter()
            .fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e))
    }

    /// Every key prime and the product equal to `m`.
    pub fn certifies(&self, m: &BigUint) -> bool {
        self.0.keys().all(is_prime) && self.product() == *m
    }
}

impl fmt::Display for FactorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FactorEntry {
    prime: String,
    exponent: u32,
}

impl Serialize for FactorMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for (p, &e) in &self.0 {
            seq.serialize_element(&FactorEntry {
                prime: p.to_string(),
                exponent: e,
            })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for FactorMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<FactorEntry>::deserialize(deserializer)?;
        let mut map = FactorMap::new();
        for entry in entries {
            let p = entry
                .prime
                .parse::<BigUint>()
                .map_err(serde::de::Error::custom)?;
            map.insert(p, entry.exponent);
        }
        Ok(map)
    }
}

/// Factorizes `m >= 1`; `1` gives the empty map.
///
/// # Panics
///
/// Panics if `m` is zero.
pub fn factorize(m: &BigUint) -> FactorMap {
    assert!(!m.is_zero(), "factorize: input must be positive");
    let mut out = FactorMap::new();
    if let Some(small) = m.to_u64() {
        for (p, e) in factorize_u64(small) {
            out.insert(BigUint::from(p), e);
        }
        return out;
    }

    let mut rest = m.clone();
    for &p in small_primes() {
        if rem_u64(&rest, p) == 0 {
            let mut e = 0;
            while rem_u64(&rest, p) == 0 {
                rest /= p;
                e += 1;
            }
            out.insert(BigUint::from(p), e);
            if let Some(small) = rest.to_u64() {
                for (q, e) in factorize_u64(small) {
                    out.insert(BigUint::from(q), e);
                }
                return out;
            }
        }
    }
    if !rest.is_one() {
        split_big(rest, &mut out);
    }
    out
}

/// Factorization of a machine word, ascending by prime.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n != 0, "factorize: input must be positive");
    let mut out = Vec::new();
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        if n < SMALL_PRIME_BOUND * SMALL_PRIME_BOUND || is_prime_u64(n) {
            out.push((n, 1));
        } else {
            let mut big = Vec::new();
            split_u64(n, &mut big);
            big.sort_unstable();
            for p in big {
                match out.last_mut() {
                    Some((q, e)) if *q == p => *e += 1,
                    _ => out.push((p, 1)),
                }
            }
        }
    }
    out
}

fn rem_u64(m: &BigUint, p: u64) -> u64 {
    let p = p as u128;
    m.iter_u64_digits()
        .rev()
        .fold(0u128, |acc, d| ((acc << 64) | d as u128) % p) as u64
}

/// Pushes the prime factors of `n` (with multiplicity) into `out`.
fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = (1..)
        .find_map(|c| brent_u64(n, c))
        .expect("rho eventually splits a composite");
    split_u64(d, out);
    split_u64(n / d, out);
}

fn split_big(n: BigUint, out: &mut FactorMap) {
    if let Some(small) = n.to_u64() {
        let mut ps = Vec::new();
        split_u64(small, &mut ps);
        for p in ps {
            out.insert(BigUint::from(p), 1);
        }
        return;
    }
    if is_prime(&n) {
        out.insert(n, 1);
        return;
    }
    let d = (1u64..)
        .find_map(|c| brent_big(&n, c))
        .expect("rho eventually splits a composite");
    let other = &n / &d;
    split_big(d, out);
    split_big(other, out);
}

const BATCH: u64 = 128;

/// One Brent rho attempt with `f(x) = x^2 + c`; a proper divisor or `None`.
fn brent_u64(n: u64, c: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let f = |x: u64| (mul_mod(x, x, n) + c % n) % n;
    let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn brent_big(n: &BigUint, c: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let c = BigUint::from(c);
    let f = |x: &BigUint| (x * x + &c) % n;
    let diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };
    let mut y = BigUint::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r = 1u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..BATCH.min(r - k) {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (g != *n).then_some(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(pairs: &[(u64, u32)]) -> FactorMap {
        let mut m = FactorMap::new();
        for &(p, e) in pairs {
            m.insert(BigUint::from(p), e);
        }
        m
    }

    fn trial(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn known_values() {
        assert!(factorize(&BigUint::one()).is_empty());
        assert_eq!(factorize(&BigUint::from(63u32)), fm(&[(3, 2), (7, 1)]));
        assert_eq!(
            factorize(&BigUint::from(960u32)),
            fm(&[(2, 6), (3, 1), (5, 1)])
        );
    }

    #[test]
    fn reconstructs_every_value_to_100k() {
        for m in 1..=100_000u64 {
            let f = factorize(&BigUint::from(m));
            assert_eq!(f.product(), BigUint::from(m));
            assert!(f.primes().all(is_prime), "m = {m}");
            assert_eq!(factorize_u64(m), trial(m));
        }
    }

    #[test]
    fn rho_splits_large_semiprimes() {
        // two primes above the trial-division bound
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        assert_eq!(factorize_u64(p * q), vec![(p, 1), (q, 1)]);
        let big = 4_294_967_311u64; // next prime after 2^32
        assert_eq!(
            factorize_u64(big * 3_000_017),
            vec![(3_000_017, 1), (big, 1)]
        );
    }

    #[test]
    fn multiword_inputs() {
        // 2^64 + 1 = 274177 * 67280421310721
        let m = (BigUint::one() << 64) + 1u32;
        assert_eq!(factorize(&m), fm(&[(274177, 1), (67280421310721, 1)]));
        // (2^61 - 1) * (2^31 - 1)^2 * 1000003^3
        let m61 = BigUint::from(2305843009213693951u64);
        let m31 = BigUint::from(2147483647u64);
        let p = BigUint::from(1_000_003u64);
        let m = &m61 * &m31 * &m31 * p.pow(3);
        let f = factorize(&m);
        assert_eq!(f.exponent(&m61), 1);
        assert_eq!(f.exponent(&m31), 2);
        assert_eq!(f.exponent(&p), 3);
        assert_eq!(f.len(), 3);
        // two 40-bit primes
        let a = BigUint::from(1_099_511_627_791u64);
        let b = BigUint::from(1_099_511_627_803u64);
        let c = BigUint::from(2_305_843_009_213_693_951u64);
        let f = factorize(&(&a * &b * &c));
        assert!(f.certifies(&(&a * &b * &c)));
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn deterministic_across_threads() {
        let m: BigUint = "12345678910111213141516171819".parse().unwrap();
        let first = factorize(&m);
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let m = m.clone();
                std::thread::spawn(move || factorize(&m))
            })
            .collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), first);
        }
        assert!(first.certifies(&m));
    }

    #[test]
    fn serde_shape() {
        let f = fm(&[(2, 6), (3, 1)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"[{"prime":"2","exponent":6},{"prime":"3","exponent":1}]"#
        );
        let back: FactorMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.to_string(), "2^6 * 3");
    }
}
