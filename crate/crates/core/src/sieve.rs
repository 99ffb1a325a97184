// SPDX-License-Identifier: Apache-2.0

//! Segmented sieve of Eratosthenes over odd numbers.
//!
//! Memory is `O(sqrt(limit) + SEGMENT)`; primes are streamed to a callback in
//! increasing order so that callers can stop early.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Default upper bound accepted by the sieve.
pub const DEFAULT_SIEVE_CAP: u64 = 1_000_000_000;

/// Number of odd candidates per segment.
const SEGMENT: usize = 1 << 16;

fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = vec![2];
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Calls `f` on every prime `p <= limit` in increasing order until it breaks.
pub fn try_for_each_prime<F>(limit: u64, cap: u64, mut f: F) -> Result<ControlFlow<()>>
where
    F: FnMut(u64) -> ControlFlow<()>,
{
    if limit > cap {
        return Err(Error::LimitTooLarge { limit, cap });
    }
    if limit < 2 {
        return Ok(ControlFlow::Continue(()));
    }
    if f(2).is_break() {
        return Ok(ControlFlow::Break(()));
    }
    let base: Vec<u64> = small_primes(isqrt(limit)).into_iter().skip(1).collect();
    // next odd multiple to strike for each base prime
    let mut next: Vec<u64> = base.iter().map(|&p| p * p).collect();
    let mut seg = vec![false; SEGMENT];
    // segment covers odd numbers lo, lo + 2, ..., lo + 2 (SEGMENT - 1)
    let mut lo = 3u64;
    while lo <= limit {
        let hi = (lo + 2 * SEGMENT as u64 - 2).min(limit);
        let len = ((hi - lo) / 2 + 1) as usize;
        seg[..len].fill(false);
        for (p, nx) in base.iter().zip(next.iter_mut()) {
            let mut m = *nx;
            while m <= hi {
                seg[((m - lo) / 2) as usize] = true;
                m += 2 * p;
            }
            *nx = m;
        }
        for (i, &c) in seg[..len].iter().enumerate() {
            if !c && f(lo + 2 * i as u64).is_break() {
                return Ok(ControlFlow::Break(()));
            }
        }
        lo = hi + 2;
    }
    Ok(ControlFlow::Continue(()))
}

/// Calls `f` on every prime `p <= limit`.
pub fn for_each_prime<F: FnMut(u64)>(limit: u64, cap: u64, mut f: F) -> Result<()> {
    try_for_each_prime(limit, cap, |p| {
        f(p);
        ControlFlow::Continue(())
    })
    .map(|_| ())
}

/// All primes `p <= limit`, sorted. Fails above [`DEFAULT_SIEVE_CAP`].
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    sieve_primes_capped(limit, DEFAULT_SIEVE_CAP)
}

pub fn sieve_primes_capped(limit: u64, cap: u64) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for_each_prime(limit, cap, |p| out.push(p))?;
    Ok(out)
}

/// `π(limit)`.
pub fn prime_count(limit: u64) -> Result<u64> {
    let mut n = 0;
    for_each_prime(limit, DEFAULT_SIEVE_CAP, |_| n += 1)?;
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(limit: usize) -> Vec<u64> {
        let mut is = vec![true; limit + 1];
        let mut out = vec![];
        for n in 2..=limit {
            if is[n] {
                out.push(n as u64);
                for m in (2 * n..=limit).step_by(n) {
                    is[m] = false;
                }
            }
        }
        out
    }

    #[test]
    fn small_limits() {
        assert_eq!(sieve_primes(10).unwrap(), vec![2, 3, 5, 7]);
        assert!(sieve_primes(1).unwrap().is_empty());
        assert!(sieve_primes(0).unwrap().is_empty());
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(sieve_primes(3).unwrap(), vec![2, 3]);
        assert_eq!(sieve_primes(9).unwrap(), vec![2, 3, 5, 7]);
    }

    #[test]
    fn matches_naive_sieve() {
        let fast = sieve_primes(1_000_000).unwrap();
        assert_eq!(fast.len(), 78498);
        assert_eq!(fast, naive(1_000_000));
        // segment boundaries
        for limit in [131_071u64, 131_072, 131_073, 262_147, 393_216] {
            assert_eq!(sieve_primes(limit).unwrap(), naive(limit as usize), "limit {limit}");
        }
    }

    #[test]
    fn cap_and_early_exit() {
        assert_eq!(
            sieve_primes(DEFAULT_SIEVE_CAP + 1),
            Err(Error::LimitTooLarge {
                limit: DEFAULT_SIEVE_CAP + 1,
                cap: DEFAULT_SIEVE_CAP
            })
        );
        let mut seen = vec![];
        let flow = try_for_each_prime(1_000_000, DEFAULT_SIEVE_CAP, |p| {
            seen.push(p);
            if p > 20 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert!(flow.is_break());
        assert_eq!(seen, vec![2, 3, 5, 7, 11, 13, 17, 19, 23]);
    }
}
