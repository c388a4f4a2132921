//! Primality testing.
//!
//! Inputs below `3.3 * 10^24` get a deterministic Miller-Rabin test over the
//! first thirteen prime bases (Sorenson-Webster bound), which is proven
//! correct. Larger inputs get strong BPSW: a base-2 strong probable-prime test
//! followed by a strong Lucas test with Selfridge parameters. No BPSW
//! pseudoprime is known.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// 3317044064679887385961981: below this the 13 bases above are exact.
fn deterministic_bound() -> &'static BigUint {
    static BOUND: OnceLock<BigUint> = OnceLock::new();
    BOUND.get_or_init(|| "3317044064679887385961981".parse().unwrap())
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic for every `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    MR_BASES[..12]
        .iter()
        .all(|&a| strong_probable_prime_u64(n, a))
}

fn strong_probable_prime(n: &BigUint, a: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = a.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub(crate) fn jacobi(a: &BigUint, n: &BigUint) -> i32 {
    debug_assert!(n.is_odd());
    let mut a = a % n;
    let mut n = n.clone();
    let mut result = 1;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz % 2 == 1 {
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        a >>= tz;
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

fn half_mod(x: BigUint, n: &BigUint) -> BigUint {
    if x.is_odd() {
        (x + n) >> 1
    } else {
        x >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge's method A parameters
/// (`P = 1`, `Q = (1 - D) / 4`). `n` must be odd and greater than 2.
pub(crate) fn strong_lucas_probable_prime(n: &BigUint) -> bool {
    if is_perfect_square(n) {
        return false;
    }
    // D = 5, -7, 9, -11, ...
    let n_int = BigInt::from(n.clone());
    let mut d_abs: u64 = 5;
    let mut negative = false;
    let d = loop {
        let d = if negative {
            -BigInt::from(d_abs)
        } else {
            BigInt::from(d_abs)
        };
        let d_mod = d.mod_floor(&n_int).to_biguint().unwrap();
        match jacobi(&d_mod, n) {
            -1 => break d,
            0 => {
                // gcd(D, n) > 1; n is composite unless n == |D|
                if BigUint::from(d_abs) != *n {
                    return false;
                }
            }
            _ => {}
        }
        d_abs += 2;
        negative = !negative;
    };

    let to_mod = |v: &BigInt| v.mod_floor(&n_int).to_biguint().unwrap();
    let q = (BigInt::one() - &d) / 4;
    let q_mod = to_mod(&q);
    let d_mod = to_mod(&d);

    let np1 = n + 1u32;
    let s = np1.trailing_zeros().unwrap_or(0);
    let k = &np1 >> s;

    // Left-to-right ladder over the bits of k, starting from U_1, V_1.
    let mut u = BigUint::one();
    let mut v = BigUint::one(); // P = 1
    let mut qk = q_mod.clone();
    let two = BigUint::from(2u32);
    for i in (0..k.bits() - 1).rev() {
        // double: U_2m = U_m V_m, V_2m = V_m^2 - 2 Q^m
        u = (&u * &v) % n;
        v = ((&v * &v) + n * &two - ((&qk * &two) % n)) % n;
        qk = (&qk * &qk) % n;
        if k.bit(i) {
            // increment: U_{m+1} = (P U + V)/2, V_{m+1} = (D U + P V)/2
            let nu = half_mod((&u + &v) % n, n);
            let nv = half_mod(((&d_mod * &u) + &v) % n, n);
            u = nu;
            v = nv;
            qk = (&qk * &q_mod) % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = ((&v * &v) + n * &two - ((&qk * &two) % n)) % n;
        if v.is_zero() {
            return true;
        }
        qk = (&qk * &qk) % n;
    }
    false
}

/// Primality of an arbitrary-precision integer.
pub fn is_prime(m: &BigUint) -> bool {
    if let Some(small) = m.to_u64() {
        return is_prime_u64(small);
    }
    if m.is_even() {
        return false;
    }
    for &p in &MR_BASES {
        if (m % p).is_zero() {
            return false;
        }
    }
    if m < deterministic_bound() {
        return MR_BASES
            .iter()
            .all(|&a| strong_probable_prime(m, &BigUint::from(a)));
    }
    strong_probable_prime(m, &BigUint::from(2u32)) && strong_lucas_probable_prime(m)
}
