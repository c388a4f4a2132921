//! Subsets of `{1, ..., n}` as bitmasks.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 64;

/// A subset of `{1, ..., n}`; bit `i - 1` is set when `i` is a member.
///
/// Ordering is canonical: by cardinality, then lexicographically on the
/// ascending list of members, so `{3} < {1, 2} < {1, 3} < {2, 3}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    /// From 1-based member indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut bits = 0u64;
        for i in indices {
            if i == 0 || i > MAX_N {
                return Err(Error::domain(format!(
                    "subset index {i} outside 1..={MAX_N}"
                )));
            }
            bits |= 1 << (i - 1);
        }
        Ok(Subset(bits))
    }

    /// `{1, ..., n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_N);
        if n == MAX_N {
            Subset(u64::MAX)
        } else {
            Subset((1u64 << n) - 1)
        }
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_N).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    /// Members as ascending 1-based indices.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i + 1)
        })
    }

    /// Members as ascending 0-based positions.
    pub fn positions(self) -> impl Iterator<Item = usize> {
        self.indices().map(|i| i - 1)
    }

    pub fn complement(self, n: usize) -> Self {
        Subset(!self.0 & Subset::full(n).0)
    }

    pub fn is_within(self, n: usize) -> bool {
        self.0 & !Subset::full(n).0 == 0
    }

    /// Nonempty and missing at least one element of `{1, ..., n}`.
    pub fn is_proper_nonempty(self, n: usize) -> bool {
        !self.is_empty() && self.is_within(n) && self != Subset::full(n)
    }

    /// All `k`-subsets of `{1, ..., n}` in canonical order.
    pub fn all_of_size(n: usize, k: usize) -> impl Iterator<Item = Subset> {
        // With member i stored at bit n - i, lexicographic order on members is
        // decreasing numeric order, so walk k-bit patterns downwards.
        let first = if k == 0 || k > n {
            None
        } else if k == 64 {
            Some(u64::MAX)
        } else {
            Some(((1u64 << k) - 1) << (n - k))
        };
        let mut cur = first;
        std::iter::from_fn(move || {
            let x = cur?;
            cur = prev_same_popcount(x);
            Some(Subset(reverse_low(x, n)))
        })
    }
}

fn reverse_low(x: u64, n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - n)
    }
}

/// Largest number below `x` with the same popcount.
fn prev_same_popcount(x: u64) -> Option<u64> {
    if x == u64::MAX {
        return None;
    }
    let t = x.trailing_ones();
    let rest = x >> t;
    if rest == 0 {
        return None;
    }
    // lowest set bit of the remaining part moves down by one, the `t` trailing
    // ones pack directly below it
    let z = rest.trailing_zeros() + t;
    let cleared = x & !(1u64 << z) & !((1u64 << t) - 1);
    let block = ((1u64 << (t + 1)) - 1) << (z - t - 1);
    Some(cleared | block)
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 >> diff.trailing_zeros() & 1 == 1 {
                // the lowest differing index belongs to self
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// `1,2,5`
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('{').trim_end_matches('}');
        let indices = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::domain(format!("bad subset index {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Subset::from_indices(indices)
    }
}

/// Serialized as the ascending list of 1-based members.
impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.indices())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(deserializer)?;
        Subset::from_indices(indices).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[usize]) -> Subset {
        Subset::from_indices(v.iter().copied()).unwrap()
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![
            s(&[2, 3]),
            s(&[1, 3]),
            s(&[3]),
            s(&[1, 2]),
            s(&[1]),
            s(&[1, 2, 3]),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                s(&[1]),
                s(&[3]),
                s(&[1, 2]),
                s(&[1, 3]),
                s(&[2, 3]),
                s(&[1, 2, 3])
            ]
        );
        assert!(s(&[1, 4]) < s(&[2, 3]));
        assert!(s(&[1, 2, 9]) < s(&[1, 3, 4]));
    }

    #[test]
    fn enumerates_k_subsets_in_order() {
        let got: Vec<Subset> = Subset::all_of_size(4, 2).collect();
        assert_eq!(
            got,
            vec![
                s(&[1, 2]),
                s(&[1, 3]),
                s(&[1, 4]),
                s(&[2, 3]),
                s(&[2, 4]),
                s(&[3, 4])
            ]
        );
        assert_eq!(Subset::all_of_size(5, 0).count(), 0);
        assert_eq!(Subset::all_of_size(5, 6).count(), 0);
        assert_eq!(
            Subset::all_of_size(5, 5).collect::<Vec<_>>(),
            vec![Subset::full(5)]
        );
        assert_eq!(Subset::all_of_size(64, 1).count(), 64);
        assert_eq!(Subset::all_of_size(64, 64).count(), 1);
    }

    #[test]
    fn complement_and_predicates() {
        assert_eq!(s(&[1, 2]).complement(3), s(&[3]));
        assert!(s(&[1, 2]).is_proper_nonempty(3));
        assert!(!Subset::full(3).is_proper_nonempty(3));
        assert!(!Subset::EMPTY.is_proper_nonempty(3));
        assert!(!s(&[4]).is_within(3));
        assert!(Subset::from_indices([0]).is_err());
        assert!(Subset::from_indices([65]).is_err());
        assert_eq!("1, 3".parse::<Subset>().unwrap(), s(&[1, 3]));
        assert_eq!(s(&[1, 3]).to_string(), "1,3");
    }

    proptest! {
        #[test]
        fn size_enumeration_is_sorted_and_complete(n in 1usize..12, k in 1usize..12) {
            let got: Vec<Subset> = Subset::all_of_size(n, k).collect();
            let mut expect: Vec<Subset> = (0u64..1 << n)
                .map(Subset::from_bits)
                .filter(|x| x.len() == k)
                .collect();
            expect.sort();
            prop_assert_eq!(got, expect);
        }

        #[test]
        fn order_matches_index_lists(a in 0u64..1 << 10, b in 0u64..1 << 10) {
            let (x, y) = (Subset::from_bits(a), Subset::from_bits(b));
            let lx: Vec<usize> = x.indices().collect();
            let ly: Vec<usize> = y.indices().collect();
            prop_assert_eq!(x.cmp(&y), lx.len().cmp(&ly.len()).then(lx.cmp(&ly)));
        }
    }
}
