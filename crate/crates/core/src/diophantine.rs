//! Bounded searches over exponential equations and the two constructions of
//! prime-power sets with controlled divisor sets.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    common_primitive_root_prime, factorize_u64, is_prime_u64, pow_mod, primes_up_to,
};
use crate::error::{Error, Result};
use crate::instance::Sign;
use crate::serde_big;

/// A solution of `q^x - 1 = p^y (q^z - 1)` with `p | q + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lemma8Solution {
    pub p: u64,
    pub q: u64,
    pub x: u32,
    pub y: u32,
    pub z: u32,
}

impl Lemma8Solution {
    /// Recomputes both sides.
    pub fn holds(&self) -> bool {
        let q = BigUint::from(self.q);
        let lhs = q.pow(self.x) - 1u32;
        let rhs = BigUint::from(self.p).pow(self.y) * (q.pow(self.z) - 1u32);
        (self.q + 1) % self.p == 0 && lhs == rhs
    }

    /// `x = 2`, `z = 1`, `p = 2`, `y` prime and `q = 2^y - 1`.
    pub fn satisfies_conclusion(&self) -> bool {
        self.x == 2
            && self.z == 1
            && self.p == 2
            && is_prime_u64(self.y as u64)
            && BigUint::from(self.q) == (BigUint::one() << self.y) - 1u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma8Bounds {
    pub q_bound: u64,
    pub x_bound: u32,
    pub y_bound: u32,
    pub z_bound: u32,
}

impl Lemma8Bounds {
    fn check(&self) -> Result<()> {
        if self.q_bound < 1 || self.x_bound < 1 || self.y_bound < 1 || self.z_bound < 1 {
            return Err(Error::domain("lemma8: all bounds must be at least 1"));
        }
        Ok(())
    }
}

/// Smallest `y` in `lo..=hi` with `p^y >= target`, by bisection.
fn power_search(p: &BigUint, target: &BigUint, lo: u32, hi: u32) -> Option<u32> {
    let (mut lo, mut hi) = (lo, hi);
    if lo > hi || &p.pow(hi) < target {
        return None;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if &p.pow(mid) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Every solution within the bounds with `x >= 1`, `2 <= y`, `z >= 0`, sorted.
pub fn lemma8_solutions(bounds: Lemma8Bounds) -> Result<Vec<Lemma8Solution>> {
    bounds.check()?;
    let qs = primes_up_to(bounds.q_bound);
    let mut out: Vec<Lemma8Solution> = qs
        .par_iter()
        .flat_map_iter(|&q| {
            let qb = BigUint::from(q);
            let mut found = Vec::new();
            for (p, _) in factorize_u64(q + 1) {
                let pb = BigUint::from(p);
                for x in 1..=bounds.x_bound {
                    let lhs = qb.pow(x) - 1u32;
                    // z = 0 makes the right side vanish
                    for z in 1..=bounds.z_bound {
                        let base = qb.pow(z) - 1u32;
                        let (ratio, rem) = lhs.div_rem(&base);
                        if !rem.is_zero() {
                            continue;
                        }
                        if let Some(y) = power_search(&pb, &ratio, 2, bounds.y_bound) {
                            if pb.pow(y) == ratio {
                                found.push(Lemma8Solution { p, q, x, y, z });
                            }
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// [`lemma8_solutions`], failing with [`Error::LemmaViolation`] if any
/// solution misses the classification `x = 2, z = 1, p = 2, q = 2^y - 1`.
pub fn lemma8_scan(bounds: Lemma8Bounds) -> Result<Vec<Lemma8Solution>> {
    let solutions = lemma8_solutions(bounds)?;
    let violations: Vec<Lemma8Solution> = solutions
        .iter()
        .filter(|s| !s.satisfies_conclusion())
        .copied()
        .collect();
    if violations.is_empty() {
        Ok(solutions)
    } else {
        Err(Error::LemmaViolation {
            solutions,
            violations,
        })
    }
}

/// `A (a^x1 - a^x2) = B (b^y1 - b^y2)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PillaiSolution {
    pub coeff_a: u64,
    pub coeff_b: u64,
    pub a: u64,
    pub b: i64,
    pub x1: u32,
    pub x2: u32,
    pub y1: u32,
    pub y2: u32,
}

impl PillaiSolution {
    pub fn holds(&self) -> bool {
        let a = BigInt::from(self.a);
        let b = BigInt::from(self.b);
        let lhs = BigInt::from(self.coeff_a) * (a.pow(self.x1) - a.pow(self.x2));
        let rhs = BigInt::from(self.coeff_b) * (b.pow(self.y1) - b.pow(self.y2));
        lhs == rhs && self.x1 != self.x2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PillaiBounds {
    /// Largest prime `a`.
    pub a_bound: u64,
    /// Largest `A` and `B`.
    pub coefficient_bound: u64,
    /// Exponents run over `1..=exponent_bound`.
    pub exponent_bound: u32,
}

pub const DEFAULT_PILLAI_BUDGET: u64 = 50_000_000;

fn smooth_numbers(primes: &BTreeSet<u64>, bound: u64) -> Vec<u64> {
    (1..=bound)
        .filter(|&n| factorize_u64(n).iter().all(|(p, _)| primes.contains(p)))
        .collect()
}

/// Every solution with prime `a`, `gcd(A a, B b) = 1`, `x1 != x2` and the
/// prime factors of `A B` inside `primes`. Sorted by `(A, B, a, x1, x2, y1, y2)`.
pub fn pillai_scan(
    b: i64,
    primes: &BTreeSet<u64>,
    bounds: PillaiBounds,
    budget: u64,
) -> Result<Vec<PillaiSolution>> {
    if b == 0 {
        return Err(Error::domain("pillai: b must be nonzero"));
    }
    if let Some(p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
        return Err(Error::domain(format!("pillai: {p} is not prime")));
    }
    if bounds.exponent_bound < 1 || bounds.coefficient_bound < 1 {
        return Err(Error::domain("pillai: bounds must be at least 1"));
    }
    let coefficients = smooth_numbers(primes, bounds.coefficient_bound);
    let bases = primes_up_to(bounds.a_bound);
    let e = bounds.exponent_bound as u128;
    let required = (coefficients.len() as u128).pow(2) * bases.len() as u128 * e * e;
    if required > budget as u128 {
        return Err(Error::Budget {
            what: "pillai scan",
            required,
            budget,
        });
    }
    let exps = 1..=bounds.exponent_bound;
    let bb = BigInt::from(b);
    let b_pows: Vec<BigInt> = std::iter::once(BigInt::one())
        .chain(exps.clone().map(|y| bb.pow(y)))
        .collect();
    let pairs: Vec<(u64, u64)> = coefficients
        .iter()
        .flat_map(|&ca| coefficients.iter().map(move |&cb| (ca, cb)))
        .filter(|&(ca, cb)| ca.gcd(&(cb * b.unsigned_abs())) == 1)
        .collect();
    let mut out: Vec<PillaiSolution> = pairs
        .par_iter()
        .flat_map_iter(|&(ca, cb)| {
            let mut rhs: HashMap<BigInt, Vec<(u32, u32)>> = HashMap::new();
            for y1 in exps.clone() {
                for y2 in exps.clone() {
                    let v = BigInt::from(cb) * (&b_pows[y1 as usize] - &b_pows[y2 as usize]);
                    rhs.entry(v).or_default().push((y1, y2));
                }
            }
            let mut found = Vec::new();
            for &a in &bases {
                if (ca * a).gcd(&(cb * b.unsigned_abs())) != 1 {
                    continue;
                }
                let ab = BigInt::from(a);
                let a_pows: Vec<BigInt> = std::iter::once(BigInt::one())
                    .chain(exps.clone().map(|x| ab.pow(x)))
                    .collect();
                for x1 in exps.clone() {
                    for x2 in exps.clone().filter(|&x2| x2 != x1) {
                        let v = BigInt::from(ca) * (&a_pows[x1 as usize] - &a_pows[x2 as usize]);
                        for &(y1, y2) in rhs.get(&v).into_iter().flatten() {
                            found.push(PillaiSolution {
                                coeff_a: ca,
                                coeff_b: cb,
                                a,
                                b,
                                x1,
                                x2,
                                y1,
                                y2,
                            });
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// A sampled subset and its product residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledProduct {
    /// Positions in the element sample.
    pub subset: Vec<usize>,
    /// `(prod(B) + 1) mod q` for each `q` in order.
    pub residues: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example13Report {
    pub primes: Vec<u64>,
    pub k: u64,
    /// Sampled elements `p^(n k)`, smallest first.
    pub elements: Vec<SampledPower>,
    pub subsets: Vec<SampledProduct>,
    /// Every sampled `prod(B) + 1` is `2 mod q` for each `q`.
    pub residues_hold: bool,
    /// Primes up to the largest sampled base that divide no sampled element.
    pub uncovered_primes: Vec<u64>,
    /// `uncovered_primes` is exactly the part of the input primes in range.
    pub coverage_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledPower {
    pub base: u64,
    pub exponent: u64,
    #[serde(with = "serde_big")]
    pub value: BigUint,
}

pub const DEFAULT_SAMPLE_ELEMENTS: usize = 50;
pub const DEFAULT_SAMPLE_SUBSETS: usize = 200;
pub const DEFAULT_SAMPLE_SEED: u64 = 0;

/// The `count` smallest numbers `p^(n k)` with `p` prime and not excluded.
fn smallest_powers(k: u64, excluded: &BTreeSet<u64>, count: usize) -> Vec<SampledPower> {
    let mut primes = Vec::new();
    let mut bound = 64u64;
    let mut next_prime = |idx: usize| -> u64 {
        while primes.len() <= idx {
            primes = primes_up_to(bound)
                .into_iter()
                .filter(|p| !excluded.contains(p))
                .collect();
            bound *= 2;
        }
        primes[idx]
    };
    let power = |p: u64, n: u64| BigUint::from(p).pow((n * k) as u32);
    let mut heap = BinaryHeap::new();
    let mut newest = 0usize;
    let first = next_prime(0);
    heap.push(Reverse((power(first, 1), first, 1u64, 0usize)));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let Reverse((value, p, n, idx)) = heap.pop().expect("heap is never empty");
        heap.push(Reverse((power(p, n + 1), p, n + 1, idx)));
        if idx == newest {
            newest += 1;
            let q = next_prime(newest);
            heap.push(Reverse((power(q, 1), q, 1, newest)));
        }
        out.push(SampledPower {
            base: p,
            exponent: n * k,
            value,
        });
    }
    out
}

fn check_odd_primes(qs: &[u64]) -> Result<()> {
    if qs.is_empty() {
        return Err(Error::domain("need at least one prime"));
    }
    if let Some(q) = qs.iter().find(|&&q| q < 3 || !is_prime_u64(q)) {
        return Err(Error::domain(format!("{q} is not an odd prime")));
    }
    if qs.iter().collect::<BTreeSet<_>>().len() != qs.len() {
        return Err(Error::domain("primes must be distinct"));
    }
    Ok(())
}

/// Samples the set `{p^(n k) : p prime outside qs}` with `k = lcm(q - 1)`
/// and checks that every sampled `prod(B) + 1` avoids each `q`.
///
/// Subsets are drawn with a seeded ChaCha8 generator, so reports are
/// reproducible.
pub fn construct_example_13(
    qs: &[u64],
    element_count: usize,
    subset_count: usize,
    seed: u64,
) -> Result<Example13Report> {
    check_odd_primes(qs)?;
    if element_count < 2 {
        return Err(Error::domain("need at least 2 sampled elements"));
    }
    let k = qs.iter().fold(1u64, |acc, q| acc.lcm(&(q - 1)));
    let excluded: BTreeSet<u64> = qs.iter().copied().collect();
    let elements = smallest_powers(k, &excluded, element_count);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proper = if element_count >= 64 {
        u128::MAX
    } else {
        (1u128 << element_count) - 2
    };
    let target = (subset_count as u128).min(proper) as usize;
    let mut chosen: BTreeSet<Vec<usize>> = BTreeSet::new();
    while chosen.len() < target {
        let size = rng.random_range(1..element_count);
        let mut picked: BTreeSet<usize> = BTreeSet::new();
        while picked.len() < size {
            picked.insert(rng.random_range(0..element_count));
        }
        chosen.insert(picked.into_iter().collect());
    }
    let subsets: Vec<SampledProduct> = chosen
        .into_iter()
        .map(|subset| {
            let residues = qs
                .iter()
                .map(|&q| {
                    let prod = subset
                        .iter()
                        .map(|&i| pow_mod(elements[i].base % q, elements[i].exponent, q))
                        .fold(1u64, |acc, r| acc * r % q);
                    (prod + 1) % q
                })
                .collect();
            SampledProduct { subset, residues }
        })
        .collect();
    let residues_hold = subsets.iter().all(|s| s.residues.iter().all(|&r| r == 2));
    let max_base = elements.iter().map(|e| e.base).max().unwrap_or(2);
    let bases: BTreeSet<u64> = elements.iter().map(|e| e.base).collect();
    let uncovered_primes: Vec<u64> = primes_up_to(max_base)
        .into_iter()
        .filter(|p| !bases.contains(p))
        .collect();
    let expected: Vec<u64> = excluded
        .iter()
        .copied()
        .filter(|&q| q <= max_base)
        .collect();
    Ok(Example13Report {
        primes: qs.to_vec(),
        k,
        coverage_matches: uncovered_primes == expected,
        elements,
        subsets,
        residues_hold,
        uncovered_primes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example14Witness {
    pub prime: u64,
    /// Exponent `e` of the sampled element `g^e` with `prime | g^e - eps0`.
    pub exponent: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example14Report {
    pub primes: Vec<u64>,
    pub epsilon0: Sign,
    pub g: u64,
    /// Exponents of the sampled elements `g^e`, increasing.
    pub exponents: Vec<u64>,
    pub witnesses: Vec<Example14Witness>,
    /// Every input prime divides some sampled `a - eps0`.
    pub every_prime_divides: bool,
    /// No sampled element is divisible by an input prime.
    pub no_element_divisible: bool,
}

pub const DEFAULT_ROOT_BOUND: u64 = 1_000_000;

/// Builds the sample of powers of a prime common primitive root `g` and
/// checks both divisibility claims.
pub fn construct_example_14(
    qs: &[u64],
    epsilon0: Sign,
    element_count: usize,
    root_bound: u64,
) -> Result<Example14Report> {
    check_odd_primes(qs)?;
    if element_count < 1 {
        return Err(Error::domain("need at least 1 sampled element"));
    }
    let g = common_primitive_root_prime(qs, root_bound)?.ok_or_else(|| {
        Error::NotFound(format!("no prime common primitive root below {root_bound}"))
    })?;
    // the n-th exponent for q, n = 1, 2, ...
    let exponent = |q: u64, n: u64| match epsilon0 {
        Sign::Plus => (q - 1) * n,
        Sign::Minus => (q - 1) / 2 * (2 * n - 1),
    };
    let mut heap: BinaryHeap<Reverse<(u64, usize, u64)>> = qs
        .iter()
        .enumerate()
        .map(|(i, &q)| Reverse((exponent(q, 1), i, 1)))
        .collect();
    let mut exponents: Vec<u64> = Vec::with_capacity(element_count);
    while exponents.len() < element_count {
        let Reverse((e, i, n)) = heap.pop().expect("one sequence per prime");
        heap.push(Reverse((exponent(qs[i], n + 1), i, n + 1)));
        if exponents.last() != Some(&e) {
            exponents.push(e);
        }
    }
    let shifted = |q: u64, e: u64| {
        let r = pow_mod(g % q, e, q);
        (r as i64 - epsilon0.value()).rem_euclid(q as i64) as u64
    };
    let witnesses: Vec<Example14Witness> = qs
        .iter()
        .filter_map(|&q| {
            exponents
                .iter()
                .find(|&&e| shifted(q, e) == 0)
                .map(|&e| Example14Witness {
                    prime: q,
                    exponent: e,
                })
        })
        .collect();
    let no_element_divisible = qs
        .iter()
        .all(|&q| exponents.iter().all(|&e| pow_mod(g % q, e, q) != 0));
    Ok(Example14Report {
        primes: qs.to_vec(),
        epsilon0,
        g,
        every_prime_divides: witnesses.len() == qs.len(),
        exponents,
        witnesses,
        no_element_divisible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol(p: u64, q: u64, x: u32, y: u32, z: u32) -> Lemma8Solution {
        Lemma8Solution { p, q, x, y, z }
    }

    const MERSENNE: [(u64, u64, u32, u32, u32); 4] = [
        (2, 3, 2, 2, 1),
        (2, 7, 2, 3, 1),
        (2, 31, 2, 5, 1),
        (2, 127, 2, 7, 1),
    ];

    fn lemma8_oracle(
        q_bound: u64,
        x_bound: u32,
        y_bound: u32,
        z_bound: u32,
    ) -> Vec<Lemma8Solution> {
        const M: u64 = (1 << 61) - 1;
        let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % M as u128) as u64;
        let powm = |b: u64, e: u32| (0..e).fold(1u64, |acc, _| mulm(acc, b % M));
        let mut out = Vec::new();
        for q in (2..=q_bound).filter(|&q| is_prime_u64(q)) {
            for p in (2..=q + 1).filter(|&p| is_prime_u64(p) && (q + 1) % p == 0) {
                for x in 1..=x_bound {
                    for y in 2..=y_bound {
                        for z in 0..=z_bound {
                            let lhs = (powm(q, x) + M - 1) % M;
                            let rhs = mulm(powm(p, y), (powm(q, z) + M - 1) % M);
                            let s = sol(p, q, x, y, z);
                            if lhs == rhs && s.holds() {
                                out.push(s);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn lemma8_examples() {
        for (p, q, x, y, z) in MERSENNE {
            let s = sol(p, q, x, y, z);
            assert!(s.holds() && s.satisfies_conclusion());
        }
        // 2^6 - 1 = 63 = 3^2 (2^3 - 1) with 3 | 2 + 1
        let s = sol(3, 2, 6, 2, 3);
        assert!(s.holds());
        assert!(!s.satisfies_conclusion());
    }

    #[test]
    fn lemma8_scan_matches_oracle() {
        let bounds = Lemma8Bounds {
            q_bound: 300,
            x_bound: 12,
            y_bound: 12,
            z_bound: 12,
        };
        assert_eq!(
            lemma8_solutions(bounds).unwrap(),
            lemma8_oracle(300, 12, 12, 12)
        );
    }

    #[test]
    fn lemma8_full_bounds() {
        let bounds = Lemma8Bounds {
            q_bound: 1000,
            x_bound: 30,
            y_bound: 30,
            z_bound: 30,
        };
        let mut expected: Vec<Lemma8Solution> = MERSENNE
            .iter()
            .map(|&(p, q, x, y, z)| sol(p, q, x, y, z))
            .collect();
        expected.push(sol(3, 2, 6, 2, 3));
        expected.sort_unstable();
        assert_eq!(lemma8_solutions(bounds).unwrap(), expected);
        match lemma8_scan(bounds) {
            Err(Error::LemmaViolation {
                violations,
                solutions,
            }) => {
                assert_eq!(violations, vec![sol(3, 2, 6, 2, 3)]);
                assert_eq!(solutions.len(), 5);
            }
            other => panic!("expected a violation, got {other:?}"),
        }
        // odd q only: the classification holds
        let odd = lemma8_solutions(bounds)
            .unwrap()
            .into_iter()
            .filter(|s| s.q > 2);
        assert!(odd.clone().all(|s| s.satisfies_conclusion()));
        assert_eq!(odd.count(), 4);
        assert!(lemma8_solutions(Lemma8Bounds {
            q_bound: 0,
            ..bounds
        })
        .is_err());
    }

    fn pillai_oracle(b: i64, a_bound: u64, e: u32) -> Vec<(u64, u32, u32, u32, u32)> {
        let mut out = Vec::new();
        for a in (2..=a_bound).filter(|&a| is_prime_u64(a)) {
            if a.gcd(&b.unsigned_abs()) != 1 {
                continue;
            }
            for x1 in 1..=e {
                for x2 in 1..=e {
                    for y1 in 1..=e {
                        for y2 in 1..=e {
                            let l = (a as i128).pow(x1) - (a as i128).pow(x2);
                            let r = (b as i128).pow(y1) - (b as i128).pow(y2);
                            if x1 != x2 && l == r {
                                out.push((a, x1, x2, y1, y2));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn tuples(v: &[PillaiSolution]) -> Vec<(u64, u32, u32, u32, u32)> {
        v.iter().map(|s| (s.a, s.x1, s.x2, s.y1, s.y2)).collect()
    }

    fn unit_bounds(a_bound: u64) -> PillaiBounds {
        PillaiBounds {
            a_bound,
            coefficient_bound: 1,
            exponent_bound: 12,
        }
    }

    #[test]
    fn pillai_fixtures() {
        let none = BTreeSet::new();
        let b3 = pillai_scan(3, &none, unit_bounds(50), DEFAULT_PILLAI_BUDGET).unwrap();
        assert_eq!(
            tuples(&b3),
            vec![
                (2, 1, 3, 1, 2),
                (2, 3, 1, 2, 1),
                (2, 3, 5, 1, 3),
                (2, 4, 8, 1, 5),
                (2, 5, 3, 3, 1),
                (2, 8, 4, 5, 1),
                (13, 1, 3, 1, 7),
                (13, 3, 1, 7, 1)
            ]
        );
        assert_eq!(tuples(&b3), pillai_oracle(3, 50, 12));
        assert!(b3.iter().all(PillaiSolution::holds));

        let five = pillai_scan(
            2,
            &none,
            PillaiBounds {
                a_bound: 5,
                ..unit_bounds(5)
            },
            DEFAULT_PILLAI_BUDGET,
        )
        .unwrap();
        let five: Vec<_> = tuples(&five).into_iter().filter(|t| t.0 == 5).collect();
        assert_eq!(five, vec![(5, 1, 3, 3, 7), (5, 3, 1, 7, 3)]);

        let b2 = pillai_scan(2, &none, unit_bounds(50), DEFAULT_PILLAI_BUDGET).unwrap();
        assert_eq!(
            tuples(&b2),
            vec![
                (3, 1, 2, 1, 3),
                (3, 1, 3, 3, 5),
                (3, 1, 5, 4, 8),
                (3, 2, 1, 3, 1),
                (3, 3, 1, 5, 3),
                (3, 5, 1, 8, 4),
                (5, 1, 3, 3, 7),
                (5, 3, 1, 7, 3)
            ]
        );
        assert_eq!(tuples(&b2), pillai_oracle(2, 50, 12));
    }

    #[test]
    fn pillai_with_coefficients() {
        let s: BTreeSet<u64> = [5, 7].into();
        let found = pillai_scan(
            2,
            &s,
            PillaiBounds {
                a_bound: 20,
                coefficient_bound: 10,
                exponent_bound: 6,
            },
            DEFAULT_PILLAI_BUDGET,
        )
        .unwrap();
        assert!(!found.is_empty());
        for f in &found {
            assert!(f.holds());
            assert!([1, 5, 7].contains(&f.coeff_a) && [1, 5, 7].contains(&f.coeff_b));
            assert_eq!((f.coeff_a * f.a).gcd(&(f.coeff_b * 2)), 1);
        }
        let negative =
            pillai_scan(-2, &BTreeSet::new(), unit_bounds(20), DEFAULT_PILLAI_BUDGET).unwrap();
        assert!(negative.iter().all(PillaiSolution::holds));
        assert!(pillai_scan(0, &BTreeSet::new(), unit_bounds(20), 10).is_err());
        assert!(matches!(
            pillai_scan(2, &BTreeSet::new(), unit_bounds(50), 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn example13_examples() {
        let r = construct_example_13(&[3], 10, 50, 7).unwrap();
        assert_eq!(r.k, 2);
        let values: Vec<BigUint> = r.elements.iter().map(|e| e.value.clone()).collect();
        for v in [4u32, 16, 25, 49] {
            assert!(values.contains(&BigUint::from(v)));
        }
        assert!(values.windows(2).all(|w| w[0] < w[1]));
        assert!(r.residues_hold && r.coverage_matches);
        assert_eq!(r.uncovered_primes, vec![3]);

        let r = construct_example_13(&[3, 5], DEFAULT_SAMPLE_ELEMENTS, DEFAULT_SAMPLE_SUBSETS, 1)
            .unwrap();
        assert_eq!(r.k, 4);
        assert_eq!(r.subsets.len(), DEFAULT_SAMPLE_SUBSETS);
        assert!(r.subsets.iter().all(|s| s.residues == vec![2, 2]));
        assert!(r.residues_hold && r.coverage_matches);
        let again =
            construct_example_13(&[3, 5], DEFAULT_SAMPLE_ELEMENTS, DEFAULT_SAMPLE_SUBSETS, 1)
                .unwrap();
        assert_eq!(r, again);
        // 2^4 7^4 + 1
        let v = BigUint::from(2u32).pow(4) * BigUint::from(7u32).pow(4) + 1u32;
        assert_eq!(&v % 3u32, BigUint::from(2u32));
        assert_eq!(&v % 5u32, BigUint::from(2u32));

        // only 2 proper subsets of a 2-element sample
        assert_eq!(
            construct_example_13(&[7], 2, 200, 0).unwrap().subsets.len(),
            2
        );
        assert!(construct_example_13(&[2], 10, 10, 0).is_err());
        assert!(construct_example_13(&[3, 3], 10, 10, 0).is_err());
    }

    #[test]
    fn example14_examples() {
        let r = construct_example_14(&[5], Sign::Plus, 10, DEFAULT_ROOT_BOUND).unwrap();
        assert_eq!(r.g, 2);
        assert_eq!(r.exponents[0], 4);
        assert_eq!(
            r.witnesses,
            vec![Example14Witness {
                prime: 5,
                exponent: 4
            }]
        );
        assert!(r.every_prime_divides && r.no_element_divisible);

        let r = construct_example_14(&[5], Sign::Minus, 10, DEFAULT_ROOT_BOUND).unwrap();
        assert_eq!(r.exponents[..3], [2, 6, 10]);
        assert!(r.every_prime_divides && r.no_element_divisible);

        let r = construct_example_14(&[3, 5], Sign::Plus, 10, DEFAULT_ROOT_BOUND).unwrap();
        assert_eq!(r.g, 2);
        assert_eq!(r.exponents[..4], [2, 4, 6, 8]);
        assert!(r.witnesses.iter().all(|w| w.exponent <= 4));
        assert!(r.every_prime_divides && r.no_element_divisible);

        for qs in [vec![3, 7, 11], vec![13, 17, 19, 23]] {
            for eps in Sign::BOTH {
                let r = construct_example_14(&qs, eps, DEFAULT_SAMPLE_ELEMENTS, DEFAULT_ROOT_BOUND)
                    .unwrap();
                assert!(
                    r.every_prime_divides && r.no_element_divisible,
                    "{qs:?} {eps}"
                );
            }
        }
        assert!(construct_example_14(&[2], Sign::Plus, 10, 100).is_err());
    }
}
