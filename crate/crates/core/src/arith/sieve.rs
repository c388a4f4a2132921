//! Segmented sieve of Eratosthenes.

use std::sync::OnceLock;

/// Entries per sieve segment.
pub const SEGMENT_LEN: usize = 1 << 20;

/// Bound for the cached trial-division table.
pub const SMALL_PRIME_BOUND: u64 = 1_000_000;

/// Returns exactly the primes `<= limit`, in increasing order.
///
/// Memory use is one segment of [`SEGMENT_LEN`] bytes plus the base primes up
/// to `sqrt(limit)`, so bounds around `10^8` are fine.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if limit < 2 {
        return out;
    }
    let base = simple_sieve(limit.isqrt());
    out.reserve(estimate_count(limit));

    let mut low = 0u64;
    let mut seg = vec![true; SEGMENT_LEN];
    while low <= limit {
        let high = limit.min(low + SEGMENT_LEN as u64 - 1);
        let len = (high - low + 1) as usize;
        seg[..len].fill(true);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut start = (low.div_ceil(p) * p).max(p * p);
            while start <= high {
                seg[(start - low) as usize] = false;
                start += p;
            }
        }
        for (i, &is_p) in seg[..len].iter().enumerate() {
            let v = low + i as u64;
            if is_p && v >= 2 {
                out.push(v);
            }
        }
        if high == limit {
            break;
        }
        low = high + 1;
    }
    out
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut mark = vec![true; n + 1];
    mark[0] = false;
    mark[1] = false;
    let mut i = 2;
    while i * i <= n {
        if mark[i] {
            let mut j = i * i;
            while j <= n {
                mark[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    mark.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i as u64))
        .collect()
}

fn estimate_count(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

/// Primes up to [`SMALL_PRIME_BOUND`], computed once.
pub fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(SMALL_PRIME_BOUND))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_cases() {
        assert!(primes_up_to(0).is_empty());
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn agrees_with_trial_division_across_segment_boundary() {
        let limit = SEGMENT_LEN as u64 + 5_000;
        let sieved = primes_up_to(limit);
        let lo = SEGMENT_LEN as u64 - 5_000;
        let expect: Vec<u64> = (lo..=limit).filter(|&n| trial(n)).collect();
        let got: Vec<u64> = sieved.into_iter().filter(|&p| p >= lo).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn prime_counts() {
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(small_primes().len(), 78_498);
        assert_eq!(primes_up_to(10_000_000).len(), 664_579);
    }
}
