//! Instances of the outside-prime question: distinct primes `p_1 < ... < p_n`
//! with exponents `v_i`, a family of nonempty proper subsets of
//! `{1, ..., n}`, and a sign for each subset.
//!
//! For a subset `I` the subset product is `P_I = prod_{i in I} p_i^{v_i}` and
//! the target value is `P_I - sign(I)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::arith::is_prime_u64;
use crate::error::{Error, Result};
pub use crate::subset::{Subset, MAX_N};

/// Largest family that may be materialized (`2^24` members).
pub const MAX_FAMILY_LEN: u128 = 1 << 24;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(Error::domain(format!("sign must be +1 or -1, got {v}"))),
        }
    }

    /// `x - sign`; `x` must be at least 2 when the sign is `+1`.
    pub fn subtract_from(self, x: &BigUint) -> BigUint {
        match self {
            Sign::Plus => x - 1u32,
            Sign::Minus => x + 1u32,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => Err(Error::domain(format!(
                "sign must be +1 or -1, got {other:?}"
            ))),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Sign::from_value(i64::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// Nonempty proper subsets of `{1, ..., n}`, held as the union of whole
/// size classes and explicitly listed members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetFamily {
    n: usize,
    sizes: BTreeSet<usize>,
    explicit: BTreeSet<Subset>,
    members: BTreeSet<Subset>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

impl SubsetFamily {
    /// All subsets whose cardinality is in `sizes`, each size in `1..n`.
    pub fn build(n: usize, sizes: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(n, sizes, [])
    }

    pub fn explicit(n: usize, subsets: impl IntoIterator<Item = Subset>) -> Result<Self> {
        Self::new(n, [], subsets)
    }

    /// Every nonempty proper subset of `{1, ..., n}`.
    pub fn all_proper(n: usize) -> Result<Self> {
        Self::build(n, 1..n)
    }

    pub fn new(
        n: usize,
        sizes: impl IntoIterator<Item = usize>,
        subsets: impl IntoIterator<Item = Subset>,
    ) -> Result<Self> {
        if !(3..=MAX_N).contains(&n) {
            return Err(Error::domain(format!(
                "family: n must be in 3..={MAX_N}, got {n}"
            )));
        }
        let sizes: BTreeSet<usize> = sizes.into_iter().collect();
        if let Some(&s) = sizes.iter().find(|&&s| s == 0 || s >= n) {
            return Err(Error::domain(format!(
                "family: size {s} outside 1..={}",
                n - 1
            )));
        }
        let explicit: BTreeSet<Subset> = subsets.into_iter().collect();
        if let Some(bad) = explicit.iter().find(|s| !s.is_proper_nonempty(n)) {
            return Err(Error::domain(format!(
                "family: {bad:?} is not a nonempty proper subset of S_{n}"
            )));
        }
        let count: u128 =
            sizes.iter().map(|&s| binomial(n, s)).sum::<u128>() + explicit.len() as u128;
        if count > MAX_FAMILY_LEN {
            return Err(Error::Budget {
                what: "subset family",
                required: count,
                budget: MAX_FAMILY_LEN as u64,
            });
        }
        let mut members: BTreeSet<Subset> = explicit.clone();
        for &s in &sizes {
            members.extend(Subset::all_of_size(n, s));
        }
        Ok(Self {
            n,
            sizes,
            explicit,
            members,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.contains(&s)
    }

    /// Members in canonical order.
    pub fn members(&self) -> impl Iterator<Item = Subset> + '_ {
        self.members.iter().copied()
    }

    pub fn sizes(&self) -> &BTreeSet<usize> {
        &self.sizes
    }

    pub fn explicit_members(&self) -> &BTreeSet<Subset> {
        &self.explicit
    }

    /// The family of complements. Applying it twice gives back `self`.
    pub fn opposite(&self) -> Self {
        let n = self.n;
        Self {
            n,
            sizes: self.sizes.iter().map(|&s| n - s).collect(),
            explicit: self.explicit.iter().map(|s| s.complement(n)).collect(),
            members: self.members.iter().map(|s| s.complement(n)).collect(),
        }
    }

    /// `self` with extra explicit members.
    pub fn with_subsets(&self, extra: impl IntoIterator<Item = Subset>) -> Result<Self> {
        Self::new(
            self.n,
            self.sizes.iter().copied(),
            self.explicit.iter().copied().chain(extra),
        )
    }
}

/// Signs for subsets: a default plus sparse overrides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    pub default: Sign,
    pub overrides: BTreeMap<Subset, Sign>,
}

impl SignAssignment {
    pub fn constant(sign: Sign) -> Self {
        Self {
            default: sign,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, subset: Subset, sign: Sign) -> Self {
        self.overrides.insert(subset, sign);
        self
    }

    pub fn sign_of(&self, subset: Subset) -> Sign {
        self.overrides.get(&subset).copied().unwrap_or(self.default)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimePowerInstance {
    primes: Vec<u64>,
    exponents: Vec<u32>,
    family: SubsetFamily,
    signs: SignAssignment,
}

impl PrimePowerInstance {
    pub fn new(
        primes: Vec<u64>,
        exponents: Vec<u32>,
        family: SubsetFamily,
        signs: SignAssignment,
    ) -> Result<Self> {
        let n = primes.len();
        if exponents.len() != n {
            return Err(Error::InvalidInstance(format!(
                "{n} primes but {} exponents",
                exponents.len()
            )));
        }
        if family.n() != n {
            return Err(Error::InvalidInstance(format!(
                "family is over S_{} but there are {n} primes",
                family.n()
            )));
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime_u64(p)) {
            return Err(Error::InvalidInstance(format!("{p} is not prime")));
        }
        if primes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInstance(
                "primes must be strictly increasing".into(),
            ));
        }
        if exponents.contains(&0) {
            return Err(Error::InvalidInstance("exponents must be positive".into()));
        }
        if family.is_empty() {
            return Err(Error::InvalidInstance("family is empty".into()));
        }
        if let Some(bad) = signs.overrides.keys().find(|s| !s.is_proper_nonempty(n)) {
            return Err(Error::InvalidInstance(format!(
                "sign override for {bad:?}, which is not a nonempty proper subset of S_{n}"
            )));
        }
        Ok(Self {
            primes,
            exponents,
            family,
            signs,
        })
    }

    pub fn n(&self) -> usize {
        self.primes.len()
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn family(&self) -> &SubsetFamily {
        &self.family
    }

    pub fn signs(&self) -> &SignAssignment {
        &self.signs
    }

    pub fn has_prime(&self, q: &BigUint) -> bool {
        u64::try_from(q).is_ok_and(|q| self.primes.binary_search(&q).is_ok())
    }

    /// `p_i^{v_i}` for a 0-based position.
    fn prime_power(&self, pos: usize) -> BigUint {
        BigUint::from(self.primes[pos]).pow(self.exponents[pos])
    }

    /// `P = prod p_i^{v_i}`.
    pub fn total_product(&self) -> BigUint {
        (0..self.n()).fold(BigUint::one(), |acc, i| acc * self.prime_power(i))
    }

    fn check_subset(&self, subset: Subset) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::domain("subset must be nonempty"));
        }
        if !subset.is_within(self.n()) {
            return Err(Error::domain(format!(
                "{subset:?} is not a subset of S_{}",
                self.n()
            )));
        }
        Ok(())
    }

    /// `P_I`.
    pub fn subset_product(&self, subset: Subset) -> Result<BigUint> {
        self.check_subset(subset)?;
        Ok(subset
            .positions()
            .fold(BigUint::one(), |acc, i| acc * self.prime_power(i)))
    }

    /// `P_I - sign(I)`; never below 1.
    pub fn target_value(&self, subset: Subset) -> Result<BigUint> {
        if !subset.is_proper_nonempty(self.n()) {
            return Err(Error::domain(format!(
                "{subset:?} is not a nonempty proper subset of S_{}",
                self.n()
            )));
        }
        let product = self.subset_product(subset)?;
        Ok(self.signs.sign_of(subset).subtract_from(&product))
    }

    /// Complement closure of the size-`k` members, with equal signs on each
    /// member and its complement.
    pub fn is_k_symmetric(&self, k: usize) -> Result<bool> {
        let n = self.n();
        if k == 0 || k >= n {
            return Err(Error::domain(format!("k must be in 1..={}", n - 1)));
        }
        Ok(self.family.members().filter(|s| s.len() == k).all(|s| {
            let c = s.complement(n);
            self.family.contains(c) && self.signs.sign_of(s) == self.signs.sign_of(c)
        }))
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let nonempty_sizes = !self.family.sizes.is_empty();
        let nonempty_subsets = !self.family.explicit.is_empty();
        InstanceDoc {
            primes: self.primes.clone(),
            exponents: self.exponents.clone(),
            family: FamilyDoc {
                sizes: nonempty_sizes.then(|| self.family.sizes.iter().copied().collect()),
                subsets: nonempty_subsets.then(|| self.family.explicit.iter().copied().collect()),
            },
            signs: SignsDoc {
                default: self.signs.default,
                overrides: SignOverrides(self.signs.overrides.clone()),
            },
        }
    }

    pub fn from_doc(doc: InstanceDoc) -> Result<Self> {
        let n = doc.primes.len();
        let family = SubsetFamily::new(
            n,
            doc.family.sizes.unwrap_or_default(),
            doc.family.subsets.unwrap_or_default(),
        )?;
        Self::new(
            doc.primes,
            doc.exponents,
            family,
            SignAssignment {
                default: doc.signs.default,
                overrides: doc.signs.overrides.0,
            },
        )
    }

    /// Canonical JSON document (pretty printed, two-space indent).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance documents serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_doc(serde_json::from_str(s)?)
    }

    /// SHA-256 over the canonical JSON document, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

/// The JSON shape of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub primes: Vec<u64>,
    pub exponents: Vec<u32>,
    pub family: FamilyDoc,
    pub signs: SignsDoc,
}

/// Either whole size classes, explicit subsets, or both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsets: Option<Vec<Subset>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignsDoc {
    pub default: Sign,
    #[serde(default)]
    pub overrides: SignOverrides,
}

/// Overrides keyed by `"1,2"`-style subset strings, in canonical subset order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignOverrides(pub BTreeMap<Subset, Sign>);

impl Serialize for SignOverrides {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (subset, sign) in &self.0 {
            map.serialize_entry(&subset.to_string(), sign)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SignOverrides {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = BTreeMap::<String, Sign>::deserialize(deserializer)?;
        let mut out = BTreeMap::new();
        for (key, sign) in raw {
            let subset: Subset = key.parse().map_err(serde::de::Error::custom)?;
            if out.insert(subset, sign).is_some() {
                return Err(serde::de::Error::custom(format!(
                    "duplicate sign override for subset {key:?}"
                )));
            }
        }
        Ok(SignOverrides(out))
    }
}
