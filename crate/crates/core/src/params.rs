//! Parameter selection and validation.
//!
//! For an `N`-bit input the multiplier works with `k`-variate polynomials of
//! degree below `M` in each variable, whose coefficients live in
//! `Z[α]/(p^c, α^m + 1)`. [`select_params`] picks `(k, M, m, p, c)`;
//! [`Params::validate`] re-checks every constraint the algorithm relies on.

use std::fmt;

use thiserror::Error;

use crate::bignat::{mul_oracle, BigNat};
use crate::primes::{self, PrimeError, PrimeSearchReport, SearchStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamsError {
    #[error("bit length must be at least 1")]
    ZeroBits,
    #[error("number of variables must be at least 1")]
    ZeroVars,
    #[error("group of side {side} in {vars} variables is too large to index")]
    GroupTooLarge { side: usize, vars: usize },
    #[error("p^c exceeds 2^127 (p = {prime})")]
    ModulusTooWide { prime: u64 },
    #[error("malformed parameter block: {0}")]
    Parse(String),
    #[error(transparent)]
    Prime(#[from] PrimeError),
}

/// A single violated constraint, as reported by [`Params::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotPowerOfTwo(&'static str),
    AlphaDegreeTooSmall,
    /// `2m` must divide `2M` so that `(Z/2m)^k` embeds in `(Z/2M)^k`.
    InnerGroupNotSubgroup,
    BlockLayout,
    Capacity,
    NotPrime,
    NotCongruent,
    OverflowBound,
    ZeroExponent,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotPowerOfTwo(what) => write!(f, "{what} is not a power of two"),
            Violation::AlphaDegreeTooSmall => f.write_str("m < 2"),
            Violation::InnerGroupNotSubgroup => f.write_str("2m does not divide 2M"),
            Violation::BlockLayout => f.write_str("block layout does not tile the padded input"),
            Violation::Capacity => f.write_str("u·(m/2)·M^k < N"),
            Violation::NotPrime => f.write_str("p is not prime"),
            Violation::NotCongruent => f.write_str("p ≢ 1 mod 2M"),
            Violation::OverflowBound => f.write_str("overflow bound: p^c <= M^k·m·2^(2u)"),
            Violation::ZeroExponent => f.write_str("c = 0"),
        }
    }
}

/// The full parameter bundle for one multiplication size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Params {
    /// Requested input bit length `N`.
    pub bits: usize,
    /// `N` rounded up so the block layout tiles it exactly.
    pub padded_bits: usize,
    /// Number of variables `k`.
    pub num_vars: usize,
    /// Per-variable degree bound `M`.
    pub degree_bound: usize,
    /// Degree of the α-modulus `α^m + 1`.
    pub alpha_degree: usize,
    pub prime: u64,
    /// Exponent `c` of the coefficient modulus `p^c`.
    pub exponent: u32,
    /// Bits per α-coefficient, `u = 2N'/(M^k·m)`.
    pub alpha_block_bits: usize,
    /// Bits per monomial block, `log2 q = N'/M^k`.
    pub block_bits: usize,
}

impl Params {
    /// Side of the group `(Z/2MZ)^k`.
    pub fn group_side(&self) -> usize {
        2 * self.degree_bound
    }

    pub fn group_order(&self) -> usize {
        self.group_side().pow(self.num_vars as u32)
    }

    /// Number of monomials `M^k` an input is split into.
    pub fn monomials(&self) -> usize {
        self.degree_bound.pow(self.num_vars as u32)
    }

    /// `p^c`, if it fits in 128 bits.
    pub fn modulus(&self) -> Option<u128> {
        (self.prime as u128).checked_pow(self.exponent)
    }

    /// `M^k·m·2^(2u)`, the largest possible product coefficient.
    pub fn coefficient_bound(&self) -> BigNat {
        let mut bound = BigNat::from_u64(self.alpha_degree as u64);
        for _ in 0..self.num_vars {
            bound = mul_oracle(&bound, &BigNat::from_u64(self.degree_bound as u64));
        }
        &bound << (2 * self.alpha_block_bits)
    }

    fn modulus_big(&self) -> BigNat {
        let p = BigNat::from_u64(self.prime);
        (0..self.exponent).fold(BigNat::one(), |acc, _| mul_oracle(&acc, &p))
    }

    /// Every violated constraint; empty iff the bundle is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let m_ok = self.degree_bound.is_power_of_two();
        let a_ok = self.alpha_degree.is_power_of_two();
        if !m_ok {
            out.push(Violation::NotPowerOfTwo("M"));
        }
        if !a_ok {
            out.push(Violation::NotPowerOfTwo("m"));
        }
        if self.alpha_degree < 2 {
            out.push(Violation::AlphaDegreeTooSmall);
        }
        if self.alpha_degree == 0 || self.degree_bound % self.alpha_degree != 0 {
            out.push(Violation::InnerGroupNotSubgroup);
        }
        let monomials = self
            .degree_bound
            .checked_pow(self.num_vars as u32)
            .unwrap_or(usize::MAX);
        let half = self.alpha_degree / 2;
        if monomials.checked_mul(self.block_bits) != Some(self.padded_bits)
            || self.alpha_block_bits.checked_mul(half) != Some(self.block_bits)
        {
            out.push(Violation::BlockLayout);
        }
        let capacity = self
            .alpha_block_bits
            .saturating_mul(half)
            .saturating_mul(monomials);
        if capacity < self.bits {
            out.push(Violation::Capacity);
        }
        if !primes::is_prime(self.prime).unwrap_or(false) {
            out.push(Violation::NotPrime);
        }
        let two_m = 2 * self.degree_bound as u64;
        if two_m == 0 || self.prime % two_m != 1 {
            out.push(Violation::NotCongruent);
        }
        if self.exponent == 0 {
            out.push(Violation::ZeroExponent);
        }
        if self.modulus_big() <= self.coefficient_bound() {
            out.push(Violation::OverflowBound);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Flat `key=value` lines, one field per line, in a fixed order.
    pub fn to_kv(&self) -> String {
        let modulus = self
            .modulus()
            .map_or_else(|| "overflow".to_string(), |m| m.to_string());
        format!(
            "bits={}\npadded_bits={}\nk={}\nM={}\nm={}\np={}\nc={}\npc={}\nu={}\nblock_bits={}\ngroup_side={}\ngroup_order={}\n",
            self.bits,
            self.padded_bits,
            self.num_vars,
            self.degree_bound,
            self.alpha_degree,
            self.prime,
            self.exponent,
            modulus,
            self.alpha_block_bits,
            self.block_bits,
            self.group_side(),
            self.group_order(),
        )
    }

    /// Parses the block produced by [`Params::to_kv`]; unknown keys are ignored.
    pub fn from_kv(text: &str) -> Result<Params, ParamsError> {
        let get = |key: &str| -> Result<u64, ParamsError> {
            text.lines()
                .filter_map(|l| l.split_once('='))
                .find(|(k, _)| k.trim() == key)
                .ok_or_else(|| ParamsError::Parse(format!("missing key {key}")))?
                .1
                .trim()
                .parse::<u64>()
                .map_err(|e| ParamsError::Parse(format!("{key}: {e}")))
        };
        Ok(Params {
            bits: get("bits")? as usize,
            padded_bits: get("padded_bits")? as usize,
            num_vars: get("k")? as usize,
            degree_bound: get("M")? as usize,
            alpha_degree: get("m")? as usize,
            prime: get("p")?,
            exponent: get("c")? as u32,
            alpha_block_bits: get("u")? as usize,
            block_bits: get("block_bits")? as usize,
        })
    }
}

fn next_pow2_f(x: f64) -> usize {
    let mut p = 1usize;
    while (p as f64) < x {
        p *= 2;
    }
    p
}

/// Largest admissible `log2(M^k·m·2^(2u))`; keeps `p^c` inside 127 bits
/// with room for the prime's granularity.
const MAX_BOUND_BITS: usize = 112;

/// `(M, m)` for a given (padded) bit length, with `M >= min_degree`.
fn shape(bits: usize, num_vars: usize, min_degree: usize) -> (usize, usize) {
    let log = (bits as f64).log2().max(1.0);
    let alpha_degree = next_pow2_f(log).max(2);
    let target = bits as f64 / (log * log);
    let mut degree_bound = min_degree.max(2);
    while (degree_bound as f64).powi(num_vars as i32) < target {
        degree_bound *= 2;
    }
    // The inner group (Z/2m)^k must fit inside (Z/2M)^k.
    (degree_bound, alpha_degree.min(degree_bound))
}

/// Padded length and `(M, m)`, or `None` if the coefficient bound is too wide.
fn layout(
    bits: usize,
    num_vars: usize,
    min_degree: usize,
) -> Result<Option<(usize, usize, usize)>, ParamsError> {
    // Pad until the shape chosen for the padded length tiles it exactly.
    let mut padded = bits;
    for _ in 0..64 {
        let (big, small) = shape(padded, num_vars, min_degree);
        let too_large = ParamsError::GroupTooLarge {
            side: 2 * big,
            vars: num_vars,
        };
        let monomials = big.checked_pow(num_vars as u32).ok_or(too_large.clone())?;
        let unit = monomials.checked_mul(small / 2).ok_or(too_large)?;
        let next = bits.div_ceil(unit) * unit;
        padded = next;
        if shape(next, num_vars, min_degree) != (big, small) {
            continue;
        }
        let u = 2 * (next / monomials) / small;
        let bound_bits =
            num_vars * big.trailing_zeros() as usize + small.trailing_zeros() as usize + 2 * u;
        return Ok((bound_bits <= MAX_BOUND_BITS).then_some((next, big, small)));
    }
    Ok(None)
}

/// Parameters for `bits`-bit inputs with the least admissible prime.
pub fn select_params(bits: usize, num_vars: usize) -> Result<Params, ParamsError> {
    select_params_with(bits, num_vars, SearchStrategy::Deterministic).map(|(p, _)| p)
}

/// Like [`select_params`], with an explicit prime search strategy; also
/// returns the search report.
pub fn select_params_with(
    bits: usize,
    num_vars: usize,
    strategy: SearchStrategy,
) -> Result<(Params, PrimeSearchReport), ParamsError> {
    if bits == 0 {
        return Err(ParamsError::ZeroBits);
    }
    if num_vars == 0 {
        return Err(ParamsError::ZeroVars);
    }

    // When m is capped by a small M the α-blocks grow; widen M until the
    // coefficient bound fits a 128-bit modulus.
    let mut min_degree = 2;
    let (padded, degree_bound, alpha_degree) = loop {
        if let Some(found) = layout(bits, num_vars, min_degree)? {
            break found;
        }
        min_degree = shape(bits, num_vars, min_degree).0 * 2;
    };

    let monomials = degree_bound.pow(num_vars as u32);
    let block_bits = padded / monomials;
    let alpha_block_bits = 2 * block_bits / alpha_degree;

    let report = primes::search(degree_bound as u64, strategy)?;
    let mut params = Params {
        bits,
        padded_bits: padded,
        num_vars,
        degree_bound,
        alpha_degree,
        prime: report.p,
        exponent: 0,
        alpha_block_bits,
        block_bits,
    };

    let bound = params.coefficient_bound();
    let p = BigNat::from_u64(report.p);
    let mut pc = BigNat::one();
    while pc <= bound {
        pc = mul_oracle(&pc, &p);
        params.exponent += 1;
    }
    if pc.bit_len() > 127 {
        return Err(ParamsError::ModulusTooWide { prime: report.p });
    }
    Ok((params, report))
}
