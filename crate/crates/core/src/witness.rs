//! Searching for outside primes.
//!
//! A witness for an instance is a prime `q` outside `{p_1, ..., p_n}` that
//! divides some target value `P_I - sign(I)` with `I` in the family. Subsets
//! are scanned in canonical order and the first witness wins, with the
//! smallest outside prime of that target.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime_u64, pow_mod, primes_up_to, FactorMap};
use crate::error::{Error, Result};
use crate::instance::{PrimePowerInstance, Sign, SignAssignment, Subset, SubsetFamily};
use crate::serde_big;

/// The factorization of one checked target value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetFactorization {
    pub subset: Subset,
    pub sign: Sign,
    #[serde(with = "serde_big")]
    pub target_value: BigUint,
    pub factors: FactorMap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub found: bool,
    #[serde(with = "serde_big::option")]
    pub witness_prime: Option<BigUint>,
    pub subset: Option<Subset>,
    pub sign: Option<Sign>,
    #[serde(with = "serde_big::option")]
    pub target_value: Option<BigUint>,
    /// Factorization of the witnessing target value.
    pub certificate: Option<FactorMap>,
    pub subsets_checked: u64,
    pub instance_digest: String,
    /// For absent reports: every checked target with its factorization.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absence_certificate: Vec<TargetFactorization>,
}

impl WitnessReport {
    /// Re-checks the report against the instance it claims to describe.
    pub fn verify(&self, inst: &PrimePowerInstance) -> bool {
        if self.instance_digest != inst.digest() {
            return false;
        }
        if self.found {
            let (Some(q), Some(subset), Some(cert)) =
                (&self.witness_prime, self.subset, &self.certificate)
            else {
                return false;
            };
            let Ok(target) = inst.target_value(subset) else {
                return false;
            };
            inst.family().contains(subset)
                && cert.certifies(&target)
                && cert.exponent(q) > 0
                && !inst.has_prime(q)
        } else {
            self.absence_certificate.len() == inst.family().len()
                && self
                    .absence_certificate
                    .iter()
                    .zip(inst.family().members())
                    .all(|(t, s)| {
                        t.subset == s
                            && inst.target_value(s).is_ok_and(|v| v == t.target_value)
                            && t.factors.certifies(&t.target_value)
                            && t.factors.primes().all(|q| inst.has_prime(q))
                    })
        }
    }
}

struct Evaluation {
    subset: Subset,
    sign: Sign,
    target: BigUint,
    factors: FactorMap,
    outside: Option<BigUint>,
}

fn evaluate(inst: &PrimePowerInstance, subset: Subset) -> Evaluation {
    let target = inst
        .target_value(subset)
        .expect("family members are nonempty proper subsets");
    let factors = factorize(&target);
    let outside = factors.primes().find(|q| !inst.has_prime(q)).cloned();
    Evaluation {
        subset,
        sign: inst.signs().sign_of(subset),
        target,
        factors,
        outside,
    }
}

/// Scans the family in canonical order for the first outside prime.
///
/// Target values are factored in parallel blocks; the reported witness is the
/// canonical one regardless of the thread count.
pub fn witness_search(inst: &PrimePowerInstance) -> WitnessReport {
    let members: Vec<Subset> = inst.family().members().collect();
    let block = (rayon::current_num_threads() * 8).max(8);
    let digest = inst.digest();
    let mut checked: Vec<Evaluation> = Vec::new();
    for (b, chunk) in members.chunks(block).enumerate() {
        let evals: Vec<Evaluation> = chunk.par_iter().map(|&s| evaluate(inst, s)).collect();
        if let Some(k) = evals.iter().position(|e| e.outside.is_some()) {
            let hit = evals.into_iter().nth(k).unwrap();
            return WitnessReport {
                found: true,
                witness_prime: hit.outside,
                subset: Some(hit.subset),
                sign: Some(hit.sign),
                target_value: Some(hit.target),
                certificate: Some(hit.factors),
                subsets_checked: (b * block + k + 1) as u64,
                instance_digest: digest,
                absence_certificate: Vec::new(),
            };
        }
        checked.extend(evals);
    }
    WitnessReport {
        found: false,
        witness_prime: None,
        subset: None,
        sign: None,
        target_value: None,
        certificate: None,
        subsets_checked: members.len() as u64,
        instance_digest: digest,
        absence_certificate: checked
            .into_iter()
            .map(|e| TargetFactorization {
                subset: e.subset,
                sign: e.sign,
                target_value: e.target,
                factors: e.factors,
            })
            .collect(),
    }
}

/// Both constant-sign searches over `D_0 = P_1 + P_{n-2} + P_{n-1}` plus extras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Outcome {
    pub plus: WitnessReport,
    pub minus: WitnessReport,
}

/// The family `P_1(S_n) + P_{n-2}(S_n) + P_{n-1}(S_n)`.
pub fn theorem1_family(n: usize) -> Result<SubsetFamily> {
    if n < 3 {
        return Err(Error::domain(format!("need n >= 3, got {n}")));
    }
    SubsetFamily::build(n, [1, n - 2, n - 1])
}

/// Runs [`witness_search`] for both constant signs on `D_0` plus `extra`,
/// failing with [`Error::TheoremViolation`] if either comes back empty.
pub fn verify_theorem1(
    primes: &[u64],
    exponents: &[u32],
    extra: &[Subset],
) -> Result<Theorem1Outcome> {
    let family = theorem1_family(primes.len())?.with_subsets(extra.iter().copied())?;
    let mut reports = Vec::with_capacity(2);
    for sign in Sign::BOTH {
        let inst = PrimePowerInstance::new(
            primes.to_vec(),
            exponents.to_vec(),
            family.clone(),
            SignAssignment::constant(sign),
        )?;
        let report = witness_search(&inst);
        if !report.found {
            return Err(Error::TheoremViolation {
                sign,
                report: Box::new(report),
            });
        }
        reports.push(report);
    }
    let minus = reports.pop().unwrap();
    let plus = reports.pop().unwrap();
    Ok(Theorem1Outcome { plus, minus })
}

/// An instance built so that no witness exists, with the prime that bounds it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeExample {
    pub instance: PrimePowerInstance,
    /// Greatest prime dividing any of the considered values.
    pub greatest_prime: Option<u64>,
    /// First subset (seed indexing), sign and value that produced it.
    pub source: Option<(Subset, Sign, BigUint)>,
}

/// Largest prime the extension will sieve up to by default.
pub const DEFAULT_EXTENSION_LIMIT: u64 = 100_000_000;

/// Extends seed primes to every prime up to the greatest prime factor `q` of
/// the seed values, keeping the seed family, so no outside prime can appear.
///
/// With `signs = None` the values are `prod_{i in I} q_i^{e_i} +- 1` over every
/// nonempty proper `I` and both signs, so any sign map works on the result
/// (the result carries the constant sign `+1`). With `Some(signs)` only the
/// family members with their own signs are considered, giving a smaller
/// extension that is only guaranteed for those signs.
pub fn negative_example_extend(
    seed_primes: &[u64],
    seed_exponents: &[u32],
    seed_family: &SubsetFamily,
    signs: Option<&SignAssignment>,
    prime_limit: u64,
) -> Result<NegativeExample> {
    let k = seed_primes.len();
    if k < 3 {
        return Err(Error::domain(format!(
            "need at least 3 seed primes, got {k}"
        )));
    }
    if seed_exponents.len() != k || seed_exponents.contains(&0) {
        return Err(Error::domain("need one positive exponent per seed prime"));
    }
    if seed_family.n() != k {
        return Err(Error::domain(format!(
            "seed family is over S_{} but there are {k} seed primes",
            seed_family.n()
        )));
    }
    if seed_family.is_empty() {
        return Err(Error::domain("seed family is empty"));
    }
    if let Some(&p) = seed_primes.iter().find(|&&p| !is_prime_u64(p)) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if seed_primes.iter().duplicates().next().is_some() {
        return Err(Error::domain("seed primes must be distinct"));
    }

    let power = |pos: usize| BigUint::from(seed_primes[pos]).pow(seed_exponents[pos]);
    let product = |s: Subset| s.positions().map(power).product::<BigUint>();
    let values: Vec<(Subset, Sign)> = match signs {
        None => SubsetFamily::all_proper(k)?
            .members()
            .flat_map(|s| Sign::BOTH.map(|e| (s, e)))
            .collect(),
        Some(signs) => seed_family
            .members()
            .map(|s| (s, signs.sign_of(s)))
            .collect(),
    };
    let factored: Vec<(Subset, Sign, BigUint, Option<BigUint>)> = values
        .into_par_iter()
        .map(|(s, e)| {
            let v = e.subtract_from(&product(s));
            let top = factorize(&v).primes().last().cloned();
            (s, e, v, top)
        })
        .collect();
    let mut best: Option<(BigUint, Subset, Sign, BigUint)> = None;
    for (s, e, v, top) in factored {
        if let Some(q) = top {
            if best.as_ref().is_none_or(|b| q > b.0) {
                best = Some((q, s, e, v));
            }
        }
    }

    let greatest = match &best {
        Some((q, ..)) => Some(u64::try_from(q).ok().filter(|&q| q <= prime_limit).ok_or(
            Error::Budget {
                what: "prime extension",
                required: u128::try_from(q).unwrap_or(u128::MAX),
                budget: prime_limit,
            },
        )?),
        None => None,
    };

    let mut primes: Vec<u64> = seed_primes.to_vec();
    if let Some(q) = greatest {
        primes.extend(
            primes_up_to(q)
                .into_iter()
                .filter(|p| !seed_primes.contains(p)),
        );
    }
    primes.sort_unstable();
    let n = primes.len();
    if n > crate::instance::MAX_N {
        return Err(Error::domain(format!(
            "extension needs {n} primes, more than the supported {}",
            crate::instance::MAX_N
        )));
    }
    let position: Vec<usize> = seed_primes
        .iter()
        .map(|p| primes.binary_search(p).unwrap() + 1)
        .collect();
    let reindex = |s: Subset| {
        Subset::from_indices(s.positions().map(|i| position[i])).expect("index within S_n")
    };
    let mut exponents = vec![1u32; n];
    for (i, &pos) in position.iter().enumerate() {
        exponents[pos - 1] = seed_exponents[i];
    }
    let family = SubsetFamily::explicit(n, seed_family.members().map(reindex))?;
    let signs = match signs {
        None => SignAssignment::constant(Sign::Plus),
        Some(signs) => SignAssignment {
            default: signs.default,
            overrides: signs
                .overrides
                .iter()
                .map(|(&s, &e)| (reindex(s), e))
                .collect(),
        },
    };
    let instance = PrimePowerInstance::new(primes, exponents, family, signs)?;
    Ok(NegativeExample {
        instance,
        greatest_prime: greatest,
        source: best.map(|(_, s, e, v)| (s, e, v)),
    })
}

/// Which primes an instance scan draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimePool {
    /// Every `n`-subset of the primes up to the bound.
    UpTo(u64),
    /// Only the first `n` primes.
    Smallest,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxationScan {
    pub n_min: usize,
    pub n_max: usize,
    pub pool: PrimePool,
    pub exponent_bound: u32,
    pub sizes: Vec<usize>,
    pub signs: Vec<Sign>,
    pub budget: u64,
}

pub const DEFAULT_SCAN_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxationCandidate {
    pub primes: Vec<u64>,
    pub exponents: Vec<u32>,
    pub sign: Sign,
    pub report: WitnessReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxationOutcome {
    pub instances_checked: u64,
    /// Instances with no witness, in enumeration order.
    pub candidates: Vec<RelaxationCandidate>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

impl RelaxationScan {
    fn pool_for(&self, n: usize, upto: &[u64]) -> Vec<u64> {
        match self.pool {
            PrimePool::UpTo(_) => upto.to_vec(),
            PrimePool::Smallest => first_primes(n),
        }
    }

    /// Number of instances the scan would enumerate.
    pub fn instance_count(&self) -> u128 {
        let upto = match self.pool {
            PrimePool::UpTo(b) => primes_up_to(b).len(),
            PrimePool::Smallest => 0,
        };
        (self.n_min..=self.n_max)
            .map(|n| {
                let choices = match self.pool {
                    PrimePool::UpTo(_) => binomial(upto, n),
                    PrimePool::Smallest => 1,
                };
                choices
                    .saturating_mul((self.exponent_bound as u128).saturating_pow(n as u32))
                    .saturating_mul(self.signs.len() as u128)
            })
            .fold(0u128, u128::saturating_add)
    }
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut bound = 32u64;
    loop {
        let ps = primes_up_to(bound);
        if ps.len() >= n {
            return ps[..n].to_vec();
        }
        bound *= 2;
    }
}

/// Enumerates every instance in the scan and returns those without a witness.
pub fn scan_relaxation(scan: &RelaxationScan) -> Result<RelaxationOutcome> {
    if scan.n_min < 3 || scan.n_min > scan.n_max {
        return Err(Error::domain(format!(
            "scan: bad n range {}..={}",
            scan.n_min, scan.n_max
        )));
    }
    if scan.exponent_bound == 0 || scan.signs.is_empty() || scan.sizes.is_empty() {
        return Err(Error::domain(
            "scan: exponent bound, signs and sizes must be nonempty",
        ));
    }
    let required = scan.instance_count();
    if required > scan.budget as u128 {
        return Err(Error::Budget {
            what: "relaxation scan",
            required,
            budget: scan.budget,
        });
    }
    let upto = match scan.pool {
        PrimePool::UpTo(b) => primes_up_to(b),
        PrimePool::Smallest => Vec::new(),
    };
    let mut outcome = RelaxationOutcome {
        instances_checked: 0,
        candidates: Vec::new(),
    };
    for n in scan.n_min..=scan.n_max {
        let family = SubsetFamily::build(n, scan.sizes.iter().copied())?;
        let pool = scan.pool_for(n, &upto);
        let mut jobs = Vec::new();
        for primes in pool.iter().copied().combinations(n) {
            for exps in (0..n)
                .map(|_| 1..=scan.exponent_bound)
                .multi_cartesian_product()
            {
                for &sign in &scan.signs {
                    jobs.push((primes.clone(), exps.clone(), sign));
                }
            }
        }
        outcome.instances_checked += jobs.len() as u64;
        let found: Vec<Option<RelaxationCandidate>> = jobs
            .into_par_iter()
            .map(|(primes, exponents, sign)| {
                let inst = PrimePowerInstance::new(
                    primes.clone(),
                    exponents.clone(),
                    family.clone(),
                    SignAssignment::constant(sign),
                )
                .expect("scan instances are well formed");
                let report = witness_search(&inst);
                (!report.found).then_some(RelaxationCandidate {
                    primes,
                    exponents,
                    sign,
                    report,
                })
            })
            .collect();
        outcome.candidates.extend(found.into_iter().flatten());
    }
    Ok(outcome)
}

/// `P_{-I} = sign(S_n \ I) + prod_{i in I} p_i^{alpha_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaSolution {
    pub subset: Subset,
    /// 1-based index to exponent, for every index in the subset.
    pub alphas: BTreeMap<usize, u32>,
    pub sign: Sign,
}

impl AlphaSolution {
    pub fn verify(&self, inst: &PrimePowerInstance) -> bool {
        let n = inst.n();
        let Ok(rest) = inst.subset_product(self.subset.complement(n)) else {
            return false;
        };
        let prod: BigUint = self
            .alphas
            .iter()
            .map(|(&i, &a)| BigUint::from(inst.primes()[i - 1]).pow(a))
            .product();
        self.alphas.keys().copied().eq(self.subset.indices())
            && self.sign == inst.signs().sign_of(self.subset.complement(n))
            && self.sign.subtract_from(&rest) == prod
    }
}

/// Writes `P_{-I} - sign(S_n \ I)` over the primes indexed by `I`, or `None`
/// when some other prime divides it (which is then a witness).
pub fn alpha_decompose(inst: &PrimePowerInstance, subset: Subset) -> Result<Option<AlphaSolution>> {
    let n = inst.n();
    if !subset.is_proper_nonempty(n) {
        return Err(Error::domain(format!(
            "{subset:?} is not a nonempty proper subset of S_{n}"
        )));
    }
    let complement = subset.complement(n);
    let sign = inst.signs().sign_of(complement);
    let value = sign.subtract_from(&inst.subset_product(complement)?);
    let factors = factorize(&value);
    let allowed: Vec<BigUint> = subset
        .positions()
        .map(|i| BigUint::from(inst.primes()[i]))
        .collect();
    if factors.primes().any(|q| !allowed.contains(q)) {
        return Ok(None);
    }
    let alphas = subset
        .indices()
        .zip(&allowed)
        .map(|(i, p)| (i, factors.exponent(p)))
        .collect();
    Ok(Some(AlphaSolution {
        subset,
        alphas,
        sign,
    }))
}

/// The three mutually exclusive ways `3 | p^alpha + sign` can happen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum ExposCase {
    /// sign = -1, alpha even.
    EvenExponent = 1,
    /// sign = -1, alpha odd, `p = 1 (mod 6)`.
    OddExponentOneModSix = 2,
    /// sign = +1, alpha odd, `p = 2 (mod 3)`.
    OddExponentTwoModThree = 3,
}

impl From<ExposCase> for u8 {
    fn from(c: ExposCase) -> u8 {
        c as u8
    }
}

impl TryFrom<u8> for ExposCase {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(ExposCase::EvenExponent),
            2 => Ok(ExposCase::OddExponentOneModSix),
            3 => Ok(ExposCase::OddExponentTwoModThree),
            _ => Err(format!("no case {v}")),
        }
    }
}

/// Which case holds when `3 | p^alpha + sign`; `None` when 3 does not divide.
pub fn classify_expos_case(p: u64, alpha: u32, sign: Sign) -> Result<Option<ExposCase>> {
    if p == 3 {
        return Err(Error::domain("classify_expos_case: p must differ from 3"));
    }
    if !is_prime_u64(p) {
        return Err(Error::domain(format!(
            "classify_expos_case: {p} is not prime"
        )));
    }
    if alpha == 0 {
        return Err(Error::domain("classify_expos_case: alpha must be positive"));
    }
    let residue = (pow_mod(p, alpha as u64, 3) as i64 + sign.value()).rem_euclid(3);
    if residue != 0 {
        return Ok(None);
    }
    let even = alpha % 2 == 0;
    let matches: Vec<ExposCase> = [
        (sign == Sign::Minus && even, ExposCase::EvenExponent),
        (
            sign == Sign::Minus && !even && p % 6 == 1,
            ExposCase::OddExponentOneModSix,
        ),
        (
            sign == Sign::Plus && !even && p % 3 == 2,
            ExposCase::OddExponentTwoModThree,
        ),
    ]
    .into_iter()
    .filter_map(|(hit, case)| hit.then_some(case))
    .collect();
    match matches.as_slice() {
        [case] => Ok(Some(*case)),
        _ => Err(Error::Invariant(format!(
            "3 | {p}^{alpha} {} 1 matches cases {matches:?}",
            if sign == Sign::Plus { "+" } else { "-" }
        ))),
    }
}

/// Whether `p - 1` is a power of two with `p >= 3`, i.e. `p` is a Fermat prime
/// when `p` is prime.
pub fn fermat_prime_check(p: u64) -> bool {
    p >= 3 && (p - 1).is_power_of_two()
}
