//! Primes in the progression `1 + i * 2M`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Exponent used for the least-prime search cap `ℓ·(2M)^L`; Heath-Brown's
/// bound gives `L <= 5.5`, rounded up here.
pub const LINNIK_EXPONENT: u32 = 6;
/// The constant `ℓ` in the search cap. Linnik's theorem gives no value, so
/// this is a safety rail: exceeding it means a bug, not bad luck.
pub const LINNIK_FACTOR: u64 = 1 << 16;
/// Draw budget multiplier for the randomized search: at most
/// `RANDOM_BUDGET_FACTOR * max(1, log2(M))^6` candidates are tested.
pub const RANDOM_BUDGET_FACTOR: u64 = 64;

/// Witnesses that make Miller-Rabin deterministic for every `n < 2^64`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("primality is undefined for {0} (< 2)")]
    Domain(u64),
    #[error("modulus 2M = {0} is not a power of two >= 2")]
    BadModulus(u64),
    #[error("no prime = 1 mod {modulus} below the search bound {bound}")]
    SearchExhausted { modulus: u64, bound: u64 },
    #[error("randomized search drew {draws} candidates mod {modulus} without finding a prime")]
    BudgetExhausted { modulus: u64, draws: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStrategy {
    Deterministic,
    Randomized { seed: u64 },
}

impl fmt::Display for SearchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchStrategy::Deterministic => f.write_str("deterministic"),
            SearchStrategy::Randomized { seed } => write!(f, "randomized(seed={seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeSearchReport {
    pub p: u64,
    /// Number of candidates handed to [`is_prime`].
    pub trials: u64,
    pub strategy: SearchStrategy,
}

#[inline]
fn mul_mod64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn pow_mod64(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod64(r, b, n);
        }
        b = mul_mod64(b, b, n);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for `n < 2^64`.
pub fn is_prime(n: u64) -> Result<bool, PrimeError> {
    if n < 2 {
        return Err(PrimeError::Domain(n));
    }
    for &w in &MR_WITNESSES {
        if n == w {
            return Ok(true);
        }
        if n % w == 0 {
            return Ok(false);
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

/// Distinct prime factors of `n` by trial division.
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn check_modulus(two_m: u64) -> Result<(), PrimeError> {
    if two_m < 2 || !two_m.is_power_of_two() {
        return Err(PrimeError::BadModulus(two_m));
    }
    Ok(())
}

/// Upper bound for the least prime `= 1 mod 2M`: `ℓ·(2M)^L`, saturating.
pub fn linnik_bound(two_m: u64) -> u64 {
    (0..LINNIK_EXPONENT).fold(LINNIK_FACTOR, |acc, _| acc.saturating_mul(two_m))
}

/// Least prime `p = 1 (mod 2M)` by a linear scan of the progression.
pub fn find_prime(m_deg: u64) -> Result<PrimeSearchReport, PrimeError> {
    let two_m = m_deg
        .checked_mul(2)
        .ok_or(PrimeError::BadModulus(u64::MAX))?;
    check_modulus(two_m)?;
    let bound = linnik_bound(two_m);
    let mut trials = 0;
    let mut candidate = 1u64;
    loop {
        candidate = match candidate.checked_add(two_m) {
            Some(c) if c < bound => c,
            _ => {
                return Err(PrimeError::SearchExhausted {
                    modulus: two_m,
                    bound,
                })
            }
        };
        trials += 1;
        if is_prime(candidate)? {
            return Ok(PrimeSearchReport {
                p: candidate,
                trials,
                strategy: SearchStrategy::Deterministic,
            });
        }
    }
}

/// Sampling window `[1, 2M·log2(M)^6]` for the multiplier `i` of `i·2M + 1`,
/// clipped so that every candidate stays below `2^63`.
pub fn random_window(m_deg: u64) -> u64 {
    let two_m = 2 * m_deg;
    let log = (63 - m_deg.leading_zeros()).max(1) as u64;
    let window = two_m.saturating_mul(log.pow(6));
    window.min(((1u64 << 63) - 1) / two_m)
}

/// Some prime `p = 1 (mod 2M)`, found by sampling `i` uniformly from
/// [`random_window`] and testing `i·2M + 1`. Reproducible for a fixed seed.
pub fn find_prime_randomized(m_deg: u64, seed: u64) -> Result<PrimeSearchReport, PrimeError> {
    let two_m = m_deg
        .checked_mul(2)
        .ok_or(PrimeError::BadModulus(u64::MAX))?;
    check_modulus(two_m)?;
    if m_deg < 2 {
        return Err(PrimeError::BadModulus(two_m));
    }
    let window = random_window(m_deg);
    let log = (63 - m_deg.leading_zeros()).max(1) as u64;
    let budget = RANDOM_BUDGET_FACTOR.saturating_mul(log.pow(6));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trials in 1..=budget {
        let i = rng.gen_range(1..=window);
        let candidate = i * two_m + 1;
        if is_prime(candidate)? {
            return Ok(PrimeSearchReport {
                p: candidate,
                trials,
                strategy: SearchStrategy::Randomized { seed },
            });
        }
    }
    Err(PrimeError::BudgetExhausted {
        modulus: two_m,
        draws: budget,
    })
}

/// Dispatches on `strategy`.
pub fn search(m_deg: u64, strategy: SearchStrategy) -> Result<PrimeSearchReport, PrimeError> {
    match strategy {
        SearchStrategy::Deterministic => find_prime(m_deg),
        SearchStrategy::Randomized { seed } => find_prime_randomized(m_deg, seed),
    }
}
