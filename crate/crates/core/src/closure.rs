//! Growing a set of prime powers under the divisor rule.
//!
//! Starting from a seed `A`, every prime `q` dividing `prod(B) - eps0` for a
//! nonempty proper `B` of `A` must divide some element of `A`. The engine
//! adjoins such `q` as `q^1` generation by generation and records which
//! subset introduced each new prime.
//!
//! Elements keep their insertion order: the seed sorted by value, then each
//! generation's new primes in increasing order. Subsets are identified by
//! element ids and enumerated by size, then lexicographically over ids.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, is_prime_u64, primes_up_to};
use crate::error::{Error, Result};
use crate::instance::Sign;
use crate::serde_big;

pub const DEFAULT_CAP: usize = 4;
pub const DEFAULT_SUBSET_BUDGET: u64 = 100_000;
pub const DEFAULT_MAX_GENERATIONS: u32 = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "serde_big")]
    pub base: BigUint,
    pub exponent: u32,
    #[serde(with = "serde_big")]
    pub value: BigUint,
}

impl PrimePower {
    pub fn prime(base: BigUint) -> Self {
        Self {
            value: base.clone(),
            base,
            exponent: 1,
        }
    }

    /// Splits `value` as `p^k`, rejecting anything that is not a prime power.
    pub fn from_value(value: BigUint) -> Result<Self> {
        if value < BigUint::from(2u32) {
            return Err(Error::domain(format!("{value} is not a prime power")));
        }
        let f = factorize(&value);
        match f.iter().collect::<Vec<_>>().as_slice() {
            [(p, k)] => Ok(Self {
                base: (*p).clone(),
                exponent: *k,
                value,
            }),
            _ => Err(Error::domain(format!("{value} is not a prime power"))),
        }
    }
}

/// How a base prime entered the set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Origin {
    Seed {
        #[serde(with = "serde_big")]
        element: BigUint,
    },
    Product {
        #[serde(with = "serde_big::vec")]
        subset: Vec<BigUint>,
        /// `prod(subset) - eps0`.
        #[serde(with = "serde_big")]
        value: BigUint,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(with = "serde_big")]
    pub prime: BigUint,
    pub generation: u32,
    #[serde(flatten)]
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub generation: u32,
    pub subsets_expanded: u64,
    #[serde(with = "serde_big::vec")]
    pub new_primes: Vec<BigUint>,
    pub element_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Expansion {
    element_count: usize,
    cap: usize,
}

impl Expansion {
    fn max_size(self) -> usize {
        self.cap.min(self.element_count - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureState {
    elements: Vec<PrimePower>,
    epsilon0: Sign,
    bases: BTreeSet<BigUint>,
    provenance: BTreeMap<BigUint, Provenance>,
    history: Vec<Expansion>,
    generations: Vec<GenerationSummary>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

impl ClosureState {
    /// Seeds a state with distinct prime powers, stored in increasing order.
    pub fn new(seed: &[BigUint], epsilon0: Sign) -> Result<Self> {
        let values: BTreeSet<BigUint> = seed.iter().cloned().collect();
        if values.len() != seed.len() {
            return Err(Error::domain("seed elements must be distinct"));
        }
        if values.is_empty() {
            return Err(Error::domain("seed is empty"));
        }
        let elements = values
            .into_iter()
            .map(PrimePower::from_value)
            .collect::<Result<Vec<_>>>()?;
        let mut provenance = BTreeMap::new();
        for e in &elements {
            provenance
                .entry(e.base.clone())
                .or_insert_with(|| Provenance {
                    prime: e.base.clone(),
                    generation: 0,
                    origin: Origin::Seed {
                        element: e.value.clone(),
                    },
                });
        }
        Ok(Self {
            bases: elements.iter().map(|e| e.base.clone()).collect(),
            generations: vec![GenerationSummary {
                generation: 0,
                subsets_expanded: 0,
                new_primes: Vec::new(),
                element_count: elements.len(),
            }],
            elements,
            epsilon0,
            provenance,
            history: Vec::new(),
        })
    }

    pub fn from_u64(seed: &[u64], epsilon0: Sign) -> Result<Self> {
        Self::new(
            &seed.iter().map(|&v| BigUint::from(v)).collect::<Vec<_>>(),
            epsilon0,
        )
    }

    pub fn elements(&self) -> &[PrimePower] {
        &self.elements
    }

    pub fn values(&self) -> Vec<BigUint> {
        self.elements.iter().map(|e| e.value.clone()).collect()
    }

    pub fn epsilon0(&self) -> Sign {
        self.epsilon0
    }

    pub fn generation(&self) -> u32 {
        self.generations.len() as u32 - 1
    }

    pub fn generations(&self) -> &[GenerationSummary] {
        &self.generations
    }

    pub fn bases(&self) -> &BTreeSet<BigUint> {
        &self.bases
    }

    pub fn provenance(&self) -> &BTreeMap<BigUint, Provenance> {
        &self.provenance
    }

    /// Whether `q` divides some element.
    pub fn covers(&self, q: &BigUint) -> bool {
        self.bases.contains(q)
    }

    /// Largest size of an already expanded subset whose top element id is `m`.
    fn expanded_through(&self, m: usize) -> usize {
        self.history
            .iter()
            .filter(|h| h.element_count > m)
            .map(|h| h.max_size())
            .max()
            .unwrap_or(0)
    }

    fn size_limit(&self, cap: usize) -> usize {
        cap.min(self.elements.len() - 1)
    }

    /// Number of subsets the next step with this cap would expand.
    pub fn frontier_count(&self, cap: usize) -> u128 {
        let limit = self.size_limit(cap);
        (0..self.elements.len())
            .map(|m| {
                (self.expanded_through(m) + 1..=limit)
                    .map(|k| binomial(m, k - 1))
                    .fold(0u128, u128::saturating_add)
            })
            .fold(0u128, u128::saturating_add)
    }

    /// The unexpanded subsets for this cap, as sorted id lists in canonical order.
    pub fn frontier(&self, cap: usize) -> Vec<Vec<usize>> {
        let limit = self.size_limit(cap);
        let mut out = Vec::new();
        for k in 1..=limit {
            let mut level: Vec<Vec<usize>> = Vec::new();
            for m in 0..self.elements.len() {
                if self.expanded_through(m) >= k {
                    continue;
                }
                level.extend((0..m).combinations(k - 1).map(|mut c| {
                    c.push(m);
                    c
                }));
            }
            level.sort_unstable();
            out.extend(level);
        }
        out
    }

    /// Expands every frontier subset of size at most `cap` and adjoins the
    /// new primes. Returns a new state; `self` is left untouched.
    pub fn step(&self, cap: usize, subset_budget: u64) -> Result<ClosureState> {
        if cap < 1 {
            return Err(Error::domain("subset size cap must be at least 1"));
        }
        let required = self.frontier_count(cap);
        if required > subset_budget as u128 {
            return Err(Error::Budget {
                what: "closure step",
                required,
                budget: subset_budget,
            });
        }
        let frontier = self.frontier(cap);
        let eps = self.epsilon0;
        let factored: Vec<(BigUint, Vec<BigUint>)> = frontier
            .par_iter()
            .map(|ids| {
                let product: BigUint = ids.iter().map(|&i| &self.elements[i].value).product();
                let value = eps.subtract_from(&product);
                let primes = if value.is_zero() {
                    Vec::new()
                } else {
                    factorize(&value).primes().cloned().collect()
                };
                (value, primes)
            })
            .collect();

        let generation = self.generation() + 1;
        let mut next = self.clone();
        let mut fresh: BTreeMap<BigUint, Provenance> = BTreeMap::new();
        for (ids, (value, primes)) in frontier.iter().zip(factored) {
            for q in primes {
                if self.bases.contains(&q) || fresh.contains_key(&q) {
                    continue;
                }
                fresh.insert(
                    q.clone(),
                    Provenance {
                        prime: q,
                        generation,
                        origin: Origin::Product {
                            subset: ids
                                .iter()
                                .map(|&i| self.elements[i].value.clone())
                                .collect(),
                            value: value.clone(),
                        },
                    },
                );
            }
        }
        next.history.push(Expansion {
            element_count: self.elements.len(),
            cap,
        });
        let new_primes: Vec<BigUint> = fresh.keys().cloned().collect();
        for (q, prov) in fresh {
            next.elements.push(PrimePower::prime(q.clone()));
            next.bases.insert(q.clone());
            next.provenance.insert(q, prov);
        }
        next.generations.push(GenerationSummary {
            generation,
            subsets_expanded: frontier.len() as u64,
            new_primes,
            element_count: next.elements.len(),
        });
        Ok(next)
    }

    /// The derivation chain for `p`: every prime it depends on, ancestors first.
    pub fn certify(&self, p: &BigUint) -> Result<Vec<Provenance>> {
        if !self.provenance.contains_key(p) {
            return Err(Error::NotFound(format!("{p} divides no element")));
        }
        let mut needed: BTreeSet<BigUint> = BTreeSet::new();
        let mut stack = vec![p.clone()];
        while let Some(q) = stack.pop() {
            if !needed.insert(q.clone()) {
                continue;
            }
            if let Origin::Product { subset, .. } = &self.provenance[&q].origin {
                for v in subset {
                    stack.push(self.base_of(v)?.clone());
                }
            }
        }
        let mut chain: Vec<Provenance> =
            needed.iter().map(|q| self.provenance[q].clone()).collect();
        chain.sort_by(|a, b| (a.generation, &a.prime).cmp(&(b.generation, &b.prime)));
        Ok(chain)
    }

    fn base_of(&self, value: &BigUint) -> Result<&BigUint> {
        self.elements
            .iter()
            .find(|e| &e.value == value)
            .map(|e| &e.base)
            .ok_or_else(|| Error::Invariant(format!("{value} is not an element")))
    }

    /// Checks a chain from [`certify`](Self::certify) from scratch: each
    /// recorded prime divides its value, each value is `prod(subset) - eps0`,
    /// and each subset only uses elements introduced earlier in the chain.
    pub fn verify_chain(&self, chain: &[Provenance]) -> bool {
        let mut known: BTreeMap<BigUint, u32> = BTreeMap::new();
        for step in chain {
            let ok = match &step.origin {
                Origin::Seed { element } => {
                    step.generation == 0
                        && PrimePower::from_value(element.clone())
                            .is_ok_and(|pp| pp.base == step.prime)
                }
                Origin::Product { subset, value } => {
                    let product: BigUint = subset.iter().product();
                    let distinct = subset.iter().all_unique();
                    let earlier = subset.iter().all(|v| {
                        PrimePower::from_value(v.clone()).is_ok_and(|pp| {
                            known.get(&pp.base).is_some_and(|&g| g < step.generation)
                        })
                    });
                    !subset.is_empty()
                        && distinct
                        && earlier
                        && self.epsilon0.subtract_from(&product) == *value
                        && !value.is_zero()
                        && (value % &step.prime).is_zero()
                        && is_prime(&step.prime)
                }
            };
            if !ok {
                return false;
            }
            known.insert(step.prime.clone(), step.generation);
        }
        true
    }

    /// Verifies every recorded provenance entry against the current elements.
    pub fn verify_certificates(&self) -> bool {
        self.provenance.values().all(|prov| match &prov.origin {
            Origin::Seed { element } => self.elements.iter().any(|e| &e.value == element),
            Origin::Product { subset, value } => {
                let product: BigUint = subset.iter().product();
                subset.len() < self.elements.len()
                    && subset
                        .iter()
                        .all(|v| self.elements.iter().any(|e| &e.value == v))
                    && self.epsilon0.subtract_from(&product) == *value
                    && (value % &prov.prime).is_zero()
            }
        })
    }
}

/// Why [`closure_run`] stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Every prime up to the bound divides an element.
    Covered,
    /// The generation limit was reached first.
    StepBudgetExhausted,
    /// The next step would expand more subsets than allowed.
    SubsetBudgetExceeded,
    /// Nothing left to expand and no new primes.
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub epsilon0: Sign,
    pub prime_bound: u64,
    pub cap: usize,
    pub stop_reason: StopReason,
    pub generation: u32,
    pub element_count: usize,
    pub generations: Vec<GenerationSummary>,
    pub covered: Vec<u64>,
    pub uncovered: Vec<u64>,
    /// Whether every covered prime's chain verified.
    pub certificates_verified: bool,
    /// Set when the subset budget stopped the run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_subsets: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ClosureRun {
    pub state: ClosureState,
    pub report: CoverageReport,
}

impl ClosureRun {
    /// Chains for every covered prime, keyed by the prime.
    pub fn certificates(&self) -> BTreeMap<u64, Vec<Provenance>> {
        self.report
            .covered
            .iter()
            .map(|&p| {
                (
                    p,
                    self.state
                        .certify(&BigUint::from(p))
                        .expect("covered primes have provenance"),
                )
            })
            .collect()
    }
}

/// Steps from `seed` until every prime up to `prime_bound` is covered or a
/// budget runs out. Budget exhaustion is reported in the result.
pub fn closure_run(
    seed: &[BigUint],
    epsilon0: Sign,
    prime_bound: u64,
    max_generations: u32,
    cap: usize,
    subset_budget: u64,
) -> Result<ClosureRun> {
    if seed.len() < 3 {
        return Err(Error::domain(format!(
            "seed needs at least 3 elements, got {}",
            seed.len()
        )));
    }
    if cap < 1 {
        return Err(Error::domain("subset size cap must be at least 1"));
    }
    let targets = primes_up_to(prime_bound);
    let covered_all = |s: &ClosureState| targets.iter().all(|&p| s.covers(&BigUint::from(p)));
    let mut state = ClosureState::new(seed, epsilon0)?;
    let mut required_subsets = None;
    let stop_reason = loop {
        if covered_all(&state) {
            break StopReason::Covered;
        }
        if state.generation() >= max_generations {
            break StopReason::StepBudgetExhausted;
        }
        let required = state.frontier_count(cap);
        if required == 0 {
            break StopReason::Stalled;
        }
        if required > subset_budget as u128 {
            required_subsets = Some(required.to_string());
            break StopReason::SubsetBudgetExceeded;
        }
        state = state.step(cap, subset_budget)?;
    };
    let (covered, uncovered): (Vec<u64>, Vec<u64>) = targets
        .iter()
        .partition(|&&p| state.covers(&BigUint::from(p)));
    let certificates_verified = covered.iter().all(|&p| {
        state
            .certify(&BigUint::from(p))
            .is_ok_and(|chain| state.verify_chain(&chain))
    }) && state.verify_certificates();
    let report = CoverageReport {
        epsilon0,
        prime_bound,
        cap,
        stop_reason,
        generation: state.generation(),
        element_count: state.elements.len(),
        generations: state.generations.clone(),
        covered,
        uncovered,
        certificates_verified,
        required_subsets,
    };
    Ok(ClosureRun { state, report })
}

/// Elements of `A` sorted into residue classes mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResiduePartition {
    pub modulus: u64,
    pub threshold: usize,
    /// Residue to members, each list in increasing order.
    pub classes: BTreeMap<u64, Vec<String>>,
    /// Residues whose class has more than `threshold` members.
    pub infinite_classes: Vec<u64>,
    pub finite_classes: Vec<u64>,
    #[serde(skip)]
    members: BTreeMap<u64, Vec<BigUint>>,
}

impl ResiduePartition {
    /// Classes are labelled infinite above `threshold` members, default `2(p-1)`.
    pub fn new(elements: &[BigUint], p: u64, threshold: Option<usize>) -> Result<Self> {
        if !is_prime_u64(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        let threshold = threshold.unwrap_or(2 * (p as usize - 1));
        let mut members: BTreeMap<u64, Vec<BigUint>> = (1..p).map(|r| (r, Vec::new())).collect();
        for a in elements.iter().sorted().dedup() {
            let r = (a % p).to_u64().unwrap();
            if r != 0 {
                members.get_mut(&r).unwrap().push(a.clone());
            }
        }
        let (infinite_classes, finite_classes): (Vec<u64>, Vec<u64>) =
            (1..p).partition(|r| members[r].len() > threshold);
        Ok(Self {
            modulus: p,
            threshold,
            classes: members
                .iter()
                .map(|(&r, v)| (r, v.iter().map(ToString::to_string).collect()))
                .collect(),
            infinite_classes,
            finite_classes,
            members,
        })
    }

    pub fn class(&self, r: u64) -> &[BigUint] {
        self.members.get(&r).map_or(&[], Vec::as_slice)
    }

    /// Product of every element in a finite class.
    pub fn xi0(&self) -> BigUint {
        self.finite_classes
            .iter()
            .flat_map(|r| self.class(*r))
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSubset {
    pub residue: u64,
    #[serde(with = "serde_big::vec")]
    pub subset: Vec<BigUint>,
    /// `prod(subset) - 1`, divisible by the prime.
    #[serde(with = "serde_big")]
    pub value: BigUint,
}

/// Finds `p - 1` elements in one residue class mod `p`, so that their product
/// is `1 (mod p)`. Takes the smallest residue with enough members and the
/// smallest members of it.
pub fn witness_subset_for_prime(elements: &[BigUint], p: u64) -> Result<Option<WitnessSubset>> {
    if !is_prime_u64(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if let Some(a) = elements.iter().find(|a| (*a % p).is_zero()) {
        return Err(Error::domain(format!("{p} divides the element {a}")));
    }
    let partition = ResiduePartition::new(elements, p, None)?;
    let need = p as usize - 1;
    let Some(r) = (1..p).find(|&r| partition.class(r).len() >= need) else {
        return Ok(None);
    };
    let subset = partition.class(r)[..need].to_vec();
    let value = subset.iter().product::<BigUint>() - 1u32;
    if !(&value % p).is_zero() {
        return Err(Error::Invariant(format!("{p} does not divide {value}")));
    }
    Ok(Some(WitnessSubset {
        residue: r,
        subset,
        value,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoLink {
    pub n: usize,
    #[serde(with = "serde_big")]
    pub rho: BigUint,
    /// The distinct elements of `A` whose product is `rho`.
    #[serde(with = "serde_big::vec")]
    pub factors: Vec<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainStop {
    /// Reached `n = max_n`; `divides` tells whether `p | 1 + rho_n`.
    Completed { divides: bool },
    /// `p | 1 + rho_n` before `max_n`: `p` would be forced into `A`.
    TargetDivides { n: usize },
    /// `1 + rho_n` has a prime factor that is not in `A`.
    FactorOutsideSet {
        n: usize,
        #[serde(with = "serde_big")]
        prime: BigUint,
    },
    /// Not enough unused elements above `rho_0` in a residue class.
    InsufficientElements {
        n: usize,
        residue: u64,
        needed: usize,
    },
    /// `1 + rho_n` is larger than the factoring limit.
    ValueTooLarge { n: usize, bits: u64 },
    /// Every class counts as finite, so there is no `a_0`.
    NoInfiniteClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoChain {
    pub prime: u64,
    #[serde(with = "serde_big")]
    pub xi0: BigUint,
    pub partition: ResiduePartition,
    pub links: Vec<RhoLink>,
    pub stop: ChainStop,
}

impl RhoChain {
    /// Re-checks `xi0 | rho_n` and `1 + rho_n = sum_{i<=n+1} rho_0^i (mod p)`
    /// for every stored link, plus that each `rho_n` is a product of
    /// distinct members of `elements`.
    pub fn verify(&self, elements: &[BigUint]) -> bool {
        let Some(first) = self.links.first() else {
            return true;
        };
        let p = BigUint::from(self.prime);
        let rho0 = &first.rho % &p;
        let set: BTreeSet<&BigUint> = elements.iter().collect();
        let mut sum = BigUint::one() + &rho0;
        let mut power = rho0.clone();
        for (idx, link) in self.links.iter().enumerate() {
            if idx > 0 {
                power = (&power * &rho0) % &p;
                sum += &power;
            }
            let product: BigUint = link.factors.iter().product();
            let ok = link.n == idx
                && link.factors.iter().all_unique()
                && link.factors.iter().all(|a| set.contains(a))
                && product == link.rho
                && (&link.rho % &self.xi0).is_zero()
                && (BigUint::one() + &link.rho) % &p == &sum % &p;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Default cap on the size of `1 + rho_n` the chain will factor.
pub const DEFAULT_RHO_BITS: u64 = 256;

/// Runs the `rho_n` recursion for a prime `p` outside a finite prime set `A`.
///
/// `rho_0 = a_0 * xi0` with `a_0` the smallest member of an infinite class,
/// and `rho_{n+1} = rho_0 * a_1 * ... * a_h` where the `a_i > rho_0` are
/// unused elements matching the residues of the prime factors of `1 + rho_n`
/// with multiplicity. Stops at `max_n` (default `p(p-1) - 2`) or as soon as
/// the finite prefix cannot continue.
pub fn rho_chain_build(
    elements: &[BigUint],
    p: u64,
    max_n: Option<usize>,
    threshold: Option<usize>,
    max_bits: u64,
) -> Result<RhoChain> {
    if let Some(a) = elements.iter().find(|a| !is_prime(a)) {
        return Err(Error::domain(format!("{a} is not prime")));
    }
    let pb = BigUint::from(p);
    if elements.contains(&pb) {
        return Err(Error::domain(format!("{p} is already in the set")));
    }
    let partition = ResiduePartition::new(elements, p, threshold)?;
    let max_n = max_n.unwrap_or((p * (p - 1)) as usize - 2);
    let xi0 = partition.xi0();
    let set: BTreeSet<BigUint> = elements.iter().cloned().collect();
    let finite: Vec<BigUint> = partition
        .finite_classes
        .iter()
        .flat_map(|r| partition.class(*r).iter().cloned())
        .sorted()
        .collect();
    let finish = |links, stop| RhoChain {
        prime: p,
        xi0: xi0.clone(),
        partition: partition.clone(),
        links,
        stop,
    };
    let Some(a0) = partition
        .infinite_classes
        .iter()
        .flat_map(|r| partition.class(*r).first())
        .min()
        .cloned()
    else {
        return Ok(finish(Vec::new(), ChainStop::NoInfiniteClass));
    };
    let rho0 = &a0 * &xi0;
    let mut factors0 = finite.clone();
    factors0.push(a0);
    factors0.sort();
    let mut links = vec![RhoLink {
        n: 0,
        rho: rho0.clone(),
        factors: factors0.clone(),
    }];
    loop {
        let link = links.last().unwrap();
        let n = link.n;
        let next = BigUint::one() + &link.rho;
        if (&next % p).is_zero() {
            let stop = if n >= max_n {
                ChainStop::Completed { divides: true }
            } else {
                ChainStop::TargetDivides { n }
            };
            return Ok(finish(links, stop));
        }
        if n >= max_n {
            return Ok(finish(links, ChainStop::Completed { divides: false }));
        }
        if next.bits() > max_bits {
            return Ok(finish(
                links,
                ChainStop::ValueTooLarge {
                    n,
                    bits: next.bits(),
                },
            ));
        }
        let factored = factorize(&next);
        let mut chosen: Vec<BigUint> = Vec::new();
        for (q, s) in factored.iter() {
            if !set.contains(q) {
                return Ok(finish(
                    links,
                    ChainStop::FactorOutsideSet {
                        n,
                        prime: q.clone(),
                    },
                ));
            }
            let r = (q % p).to_u64().unwrap();
            let picks: Vec<BigUint> = partition
                .class(r)
                .iter()
                .filter(|a| **a > rho0 && !chosen.contains(a))
                .take(s as usize)
                .cloned()
                .collect();
            if picks.len() < s as usize {
                return Ok(finish(
                    links,
                    ChainStop::InsufficientElements {
                        n,
                        residue: r,
                        needed: s as usize,
                    },
                ));
            }
            chosen.extend(picks);
        }
        let rho = &rho0 * chosen.iter().product::<BigUint>();
        let mut factors = factors0.clone();
        factors.extend(chosen);
        factors.sort();
        links.push(RhoLink {
            n: n + 1,
            rho,
            factors,
        });
    }
}
