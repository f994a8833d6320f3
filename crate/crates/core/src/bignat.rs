//! Arbitrary-precision non-negative integers.
//!
//! Only what the encoder, decoder and the oracle multipliers need: parsing
//! and printing in hex, addition, subtraction, shifts, bit extraction and a
//! schoolbook/Karatsuba multiplier that shares no code with the FFT path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Shl};
use std::str::FromStr;

use thiserror::Error;

/// Limb width in bits.
pub const LIMB_BITS: usize = 64;

/// Operand length (in limbs) at which [`mul_oracle`] switches from
/// schoolbook to Karatsuba.
pub const KARATSUBA_CUTOFF: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BigNatError {
    #[error("empty hex string")]
    Empty,
    #[error("invalid hex digit {0:?}")]
    InvalidDigit(char),
    #[error("subtraction underflow")]
    Underflow,
    #[error("malformed byte encoding: {0}")]
    Bytes(&'static str),
}

/// Non-negative integer stored as little-endian 64-bit limbs with no
/// trailing zero limbs. Zero is the empty limb vector.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BigNat {
    limbs: Vec<u64>,
}

impl BigNat {
    pub fn zero() -> Self {
        BigNat { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        BigNat::from_u64(1)
    }

    pub fn from_u64(x: u64) -> Self {
        BigNat::from_limbs(vec![x])
    }

    pub fn from_u128(x: u128) -> Self {
        BigNat::from_limbs(vec![x as u64, (x >> 64) as u64])
    }

    /// Takes ownership of little-endian limbs and normalizes them.
    pub fn from_limbs(mut limbs: Vec<u64>) -> Self {
        while limbs.last() == Some(&0) {
            limbs.pop();
        }
        BigNat { limbs }
    }

    /// `2^bits`.
    pub fn pow2(bits: usize) -> Self {
        let mut limbs = vec![0u64; bits / LIMB_BITS + 1];
        limbs[bits / LIMB_BITS] = 1 << (bits % LIMB_BITS);
        BigNat { limbs }
    }

    /// `2^bits - 1`.
    pub fn ones(bits: usize) -> Self {
        let mut limbs = vec![u64::MAX; bits.div_ceil(LIMB_BITS)];
        if bits % LIMB_BITS != 0 {
            *limbs.last_mut().unwrap() = (1u64 << (bits % LIMB_BITS)) - 1;
        }
        BigNat::from_limbs(limbs)
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn into_limbs(self) -> Vec<u64> {
        self.limbs
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Number of significant bits; zero has bit length 0.
    pub fn bit_len(&self) -> usize {
        match self.limbs.last() {
            None => 0,
            Some(&top) => self.limbs.len() * LIMB_BITS - top.leading_zeros() as usize,
        }
    }

    pub fn bit(&self, i: usize) -> bool {
        self.limbs
            .get(i / LIMB_BITS)
            .is_some_and(|l| (l >> (i % LIMB_BITS)) & 1 == 1)
    }

    pub fn to_u128(&self) -> Option<u128> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0] as u128),
            2 => Some(self.limbs[0] as u128 | (self.limbs[1] as u128) << 64),
            _ => None,
        }
    }

    pub fn from_hex(s: &str) -> Result<Self, BigNatError> {
        let digits: Vec<u8> = s
            .chars()
            .filter(|&c| c != '_')
            .map(|c| {
                c.to_digit(16)
                    .map(|d| d as u8)
                    .ok_or(BigNatError::InvalidDigit(c))
            })
            .collect::<Result<_, _>>()?;
        if digits.is_empty() {
            return Err(BigNatError::Empty);
        }
        let mut limbs = vec![0u64; digits.len().div_ceil(16)];
        for (i, d) in digits.iter().rev().enumerate() {
            limbs[i / 16] |= (*d as u64) << (4 * (i % 16));
        }
        Ok(BigNat::from_limbs(limbs))
    }

    pub fn to_hex(&self) -> String {
        let mut iter = self.limbs.iter().rev();
        let mut out = match iter.next() {
            None => return "0".to_string(),
            Some(top) => format!("{top:x}"),
        };
        for limb in iter {
            out.push_str(&format!("{limb:016x}"));
        }
        out
    }

    /// Length-prefixed little-endian dump: the limb count as a `u64`,
    /// then each limb, all in little-endian byte order.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * (self.limbs.len() + 1));
        out.extend_from_slice(&(self.limbs.len() as u64).to_le_bytes());
        for limb in &self.limbs {
            out.extend_from_slice(&limb.to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(bytes: &[u8]) -> Result<Self, BigNatError> {
        if bytes.len() < 8 {
            return Err(BigNatError::Bytes("missing length prefix"));
        }
        let (head, body) = bytes.split_at(8);
        let count = u64::from_le_bytes(head.try_into().unwrap()) as usize;
        if body.len() != count.saturating_mul(8) {
            return Err(BigNatError::Bytes("length prefix does not match payload"));
        }
        let limbs: Vec<u64> = body
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if limbs.last() == Some(&0) {
            return Err(BigNatError::Bytes("non-canonical trailing zero limb"));
        }
        Ok(BigNat { limbs })
    }

    pub fn checked_sub(&self, rhs: &BigNat) -> Result<BigNat, BigNatError> {
        if *self < *rhs {
            return Err(BigNatError::Underflow);
        }
        let mut limbs = self.limbs.clone();
        let borrow = sub_assign_limbs(&mut limbs, &rhs.limbs);
        debug_assert!(!borrow);
        Ok(BigNat::from_limbs(limbs))
    }

    pub fn shr(&self, bits: usize) -> BigNat {
        self.extract_bits(bits, self.bit_len().saturating_sub(bits))
    }

    /// `floor(self / 2^offset) mod 2^count`.
    pub fn extract_bits(&self, offset: usize, count: usize) -> BigNat {
        let mut limbs = vec![0u64; count.div_ceil(LIMB_BITS)];
        for (i, limb) in limbs.iter_mut().enumerate() {
            let width = (count - i * LIMB_BITS).min(LIMB_BITS);
            *limb = self.bits_u64(offset + i * LIMB_BITS, width);
        }
        BigNat::from_limbs(limbs)
    }

    /// Reads `count <= 64` bits starting at bit `offset`.
    #[inline]
    pub fn bits_u64(&self, offset: usize, count: usize) -> u64 {
        debug_assert!(count <= LIMB_BITS);
        if count == 0 {
            return 0;
        }
        let idx = offset / LIMB_BITS;
        let sh = offset % LIMB_BITS;
        let lo = self.limbs.get(idx).copied().unwrap_or(0) >> sh;
        let hi = if sh == 0 {
            0
        } else {
            self.limbs.get(idx + 1).copied().unwrap_or(0) << (LIMB_BITS - sh)
        };
        let v = lo | hi;
        if count == LIMB_BITS {
            v
        } else {
            v & ((1u64 << count) - 1)
        }
    }
}

impl fmt::Debug for BigNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigNat(0x{})", self.to_hex())
    }
}

impl fmt::LowerHex for BigNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for BigNat {
    type Err = BigNatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BigNat::from_hex(s)
    }
}

impl Ord for BigNat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.limbs
            .len()
            .cmp(&other.limbs.len())
            .then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl PartialOrd for BigNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&BigNat> for &BigNat {
    type Output = BigNat;
    fn add(self, rhs: &BigNat) -> BigNat {
        let (long, short) = if self.limbs.len() >= rhs.limbs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut limbs = long.limbs.clone();
        if add_assign_limbs(&mut limbs, &short.limbs) {
            limbs.push(1);
        }
        BigNat { limbs }
    }
}

impl Add for BigNat {
    type Output = BigNat;
    fn add(self, rhs: BigNat) -> BigNat {
        &self + &rhs
    }
}

impl Shl<usize> for &BigNat {
    type Output = BigNat;
    fn shl(self, bits: usize) -> BigNat {
        if self.is_zero() {
            return BigNat::zero();
        }
        let words = bits / LIMB_BITS;
        let sh = bits % LIMB_BITS;
        let mut limbs = vec![0u64; words + self.limbs.len() + 1];
        for (i, &l) in self.limbs.iter().enumerate() {
            limbs[words + i] |= l << sh;
            if sh != 0 {
                limbs[words + i + 1] = l >> (LIMB_BITS - sh);
            }
        }
        BigNat::from_limbs(limbs)
    }
}

impl Shl<usize> for BigNat {
    type Output = BigNat;
    fn shl(self, bits: usize) -> BigNat {
        &self << bits
    }
}

/// `acc += x` over `acc.len()` limbs (`x.len() <= acc.len()`); returns the carry out.
pub(crate) fn add_assign_limbs(acc: &mut [u64], x: &[u64]) -> bool {
    let mut carry = false;
    for (i, a) in acc.iter_mut().enumerate() {
        let b = match x.get(i) {
            Some(&b) => b,
            None if !carry => return false,
            None => 0,
        };
        let (s1, c1) = a.overflowing_add(b);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        *a = s2;
        carry = c1 | c2;
    }
    carry
}

/// `acc -= x`; returns the borrow out.
pub(crate) fn sub_assign_limbs(acc: &mut [u64], x: &[u64]) -> bool {
    let mut borrow = false;
    for (i, a) in acc.iter_mut().enumerate() {
        let b = match x.get(i) {
            Some(&b) => b,
            None if !borrow => return false,
            None => 0,
        };
        let (s1, c1) = a.overflowing_sub(b);
        let (s2, c2) = s1.overflowing_sub(borrow as u64);
        *a = s2;
        borrow = c1 | c2;
    }
    borrow
}

/// Exact product by schoolbook multiplication, switching to Karatsuba once
/// both operands reach [`KARATSUBA_CUTOFF`] limbs. Independent of the FFT
/// multiplier and used as its correctness oracle.
pub fn mul_oracle(a: &BigNat, b: &BigNat) -> BigNat {
    if a.is_zero() || b.is_zero() {
        return BigNat::zero();
    }
    let mut out = vec![0u64; a.limbs.len() + b.limbs.len()];
    mul_karatsuba(&a.limbs, &b.limbs, &mut out);
    BigNat::from_limbs(out)
}

/// Quadratic schoolbook product, never switching algorithms.
pub fn mul_schoolbook(a: &BigNat, b: &BigNat) -> BigNat {
    if a.is_zero() || b.is_zero() {
        return BigNat::zero();
    }
    let mut out = vec![0u64; a.limbs.len() + b.limbs.len()];
    schoolbook_into(&a.limbs, &b.limbs, &mut out);
    BigNat::from_limbs(out)
}

/// `out += a * b`; `out` must hold `a.len() + b.len()` limbs and the sum
/// must not overflow them.
fn schoolbook_into(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let mut carry: u128 = 0;
        for (j, &bj) in b.iter().enumerate() {
            let t = ai as u128 * bj as u128 + out[i + j] as u128 + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        let mut k = i + b.len();
        while carry != 0 {
            let t = out[k] as u128 + carry;
            out[k] = t as u64;
            carry = t >> 64;
            k += 1;
        }
    }
}

/// `out = a * b` where `out` is zeroed and exactly `a.len() + b.len()` long.
fn mul_karatsuba(a: &[u64], b: &[u64], out: &mut [u64]) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if b.len() < KARATSUBA_CUTOFF {
        schoolbook_into(a, b, out);
        return;
    }
    if b.len() * 2 <= a.len() {
        // Unbalanced: multiply b by slices of a the size of b.
        let mut tmp = vec![0u64; 2 * b.len()];
        for (chunk_idx, chunk) in a.chunks(b.len()).enumerate() {
            let tmp = &mut tmp[..chunk.len() + b.len()];
            tmp.fill(0);
            mul_karatsuba(chunk, b, tmp);
            let off = chunk_idx * b.len();
            let carry = add_assign_limbs(&mut out[off..], tmp);
            debug_assert!(!carry);
        }
        return;
    }

    let h = a.len() / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);

    let mut z0 = vec![0u64; a0.len() + b0.len()];
    mul_karatsuba(a0, b0, &mut z0);
    let mut z2 = vec![0u64; a1.len() + b1.len()];
    mul_karatsuba(a1, b1, &mut z2);

    let sa = sum_limbs(a0, a1);
    let sb = sum_limbs(b0, b1);
    let mut z1 = vec![0u64; sa.len() + sb.len()];
    mul_karatsuba(&sa, &sb, &mut z1);
    let borrow0 = sub_assign_limbs(&mut z1, &z0);
    let borrow2 = sub_assign_limbs(&mut z1, &z2);
    debug_assert!(!borrow0 && !borrow2);

    out[..z0.len()].copy_from_slice(&z0);
    out[2 * h..2 * h + z2.len()].copy_from_slice(&z2);
    let z1_len = significant_len(&z1);
    let carry = add_assign_limbs(&mut out[h..], &z1[..z1_len]);
    debug_assert!(!carry);
}

fn sum_limbs(x: &[u64], y: &[u64]) -> Vec<u64> {
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let mut s = long.to_vec();
    if add_assign_limbs(&mut s, short) {
        s.push(1);
    }
    s
}

fn significant_len(x: &[u64]) -> usize {
    x.iter().rposition(|&l| l != 0).map_or(0, |i| i + 1)
}

/// Adds `value` (little-endian limbs) into `acc` at bit offset `offset`,
/// propagating the carry. `acc` must be long enough to absorb it.
pub(crate) fn add_shifted_into(acc: &mut [u64], value: &[u64], offset: usize) {
    let words = offset / LIMB_BITS;
    let sh = offset % LIMB_BITS;
    let mut carry = false;
    let mut idx = words;
    for i in 0..=value.len() {
        let cur = value.get(i).copied().unwrap_or(0);
        let piece = if sh == 0 {
            cur
        } else {
            let prev = if i > 0 {
                value[i - 1] >> (LIMB_BITS - sh)
            } else {
                0
            };
            (cur << sh) | prev
        };
        if i == value.len() && piece == 0 {
            break;
        }
        let (s1, c1) = acc[idx].overflowing_add(piece);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        acc[idx] = s2;
        carry = c1 | c2;
        idx += 1;
    }
    while carry {
        let (s, c) = acc[idx].overflowing_add(1);
        acc[idx] = s;
        carry = c;
        idx += 1;
    }
}
